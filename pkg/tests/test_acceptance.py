"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (visible with -rA or on failure)
and enforces the stated tolerance; the pytest -v listing gives the same
one-line-per-criterion view.
"""
import time

import numpy as np
import pytest

from carnot_calc import (
    CharacteristicPointError,
    DeformationField,
    IntrinsicGraph,
    build_group,
    build_surface,
    bump2,
    first_variation_analytic,
    frame_at,
    frame_param,
    frame_variation_rates,
    frame_variation_rates_fd,
    hmc_divergence,
    hmc_levelset,
    hmc_param,
    hmc_pauls,
    ibp_residual,
    identity_battery,
    integrate_patch,
    intrinsic_stability_form,
    intrinsic_to_patch,
    coordinate_harmonicity_residuals,
    eps_area,
    mcf_residual,
    numeric_variation,
    perimeter,
    quadratic_form,
    random_product_bumps,
    scaling_ratio,
    second_variation,
    stability_scan,
    stokes_residual,
    translation_ratio,
)

H1 = build_group("h1")
H2 = build_group("hn:2")
ENGEL = build_group("engel")

ROUTE_SURFACES = ["vertical-plane:1,0,0", "vertical-plane:1,0.5,-0.25",
                  "t-graph:zero", "t-graph:parab", "xyt-graph",
                  "intrinsic:linear:0.75"]
MINIMAL_SURFACES = ["vertical-plane:1,0,0", "vertical-plane:1,0.5,-0.25",
                    "t-graph:zero", "xyt-graph", "intrinsic:zero",
                    "intrinsic:linear:0.75"]

BATTERY_SUBSET = ["z-of-normal", "curvature-squared", "zy-commutator",
                  "zt-commutator", "vertical-rate", "mixed-commutator",
                  "z-vertical-rate", "z-y-coefficient", "z-t-coefficient"]


def _report(label, ok, t0, detail):
    line = "[%s] %s (%.2fs) %s" % (label, "PASS" if ok else "FAIL",
                                   time.perf_counter() - t0, detail)
    print(line)
    assert ok, line


def _sample_points(cat, count, rng, w_min=0.05):
    dom = cat.patch.domain
    su, sv = dom[1] - dom[0], dom[3] - dom[2]
    out = []
    while len(out) < count:
        u = rng.uniform(dom[0] + 0.1 * su, dom[1] - 0.1 * su)
        v = rng.uniform(dom[2] + 0.1 * sv, dom[3] - 0.1 * sv)
        try:
            fr = frame_param(cat.patch, (u, v))
        except CharacteristicPointError:
            continue
        if fr.W / max(1.0, fr.normN) < w_min:
            continue
        out.append((u, v))
    return out


def _closed_frame(G, g):
    if G is H1:
        x, y, _ = g
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0],
                         [-y / 2.0, x / 2.0, 1.0]])
    if G is H2:
        A = np.eye(5)
        A[4, :4] = [-g[2] / 2.0, -g[3] / 2.0, g[0] / 2.0, g[1] / 2.0]
        return A
    x, y, t, _ = g
    A = np.eye(4)
    A[2, 0], A[2, 1] = -y / 2.0, x / 2.0
    A[3, 0] = -t / 2.0 - x * y / 12.0
    A[3, 1] = x * x / 12.0
    A[3, 2] = x / 2.0
    return A


def test_criterion_01_frame_fields_exact_and_brackets_close():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    mismatches = 0
    for G in (H1, H2, ENGEL):
        for _ in range(100):
            g = rng.uniform(-5, 5, size=G.dim)
            if not np.array_equal(frame_at(G, g), _closed_frame(G, g)):
                mismatches += 1

    # frame-field commutators against the structure tensor, by nested
    # central differences of linear functions (exact stencils, pure roundoff)
    h = 1e-2
    worst = 0.0
    for G in (H1, H2, ENGEL):
        c = rng.normal(size=G.dim)

        def xdf(j, g):
            col = frame_at(G, g)[:, j]
            return (c @ (g + h * col) - c @ (g - h * col)) / (2 * h)

        def xxdf(i, j, g):
            col = frame_at(G, g)[:, i]
            return (xdf(j, g + h * col) - xdf(j, g - h * col)) / (2 * h)

        for _ in range(4):
            g = rng.uniform(-2, 2, size=G.dim)
            A = frame_at(G, g)
            for i in range(G.dim):
                for j in range(i + 1, G.dim):
                    comm = xxdf(i, j, g) - xxdf(j, i, g)
                    want = sum(G.b[i, j, k] * (c @ A[:, k])
                               for k in range(G.dim))
                    worst = max(worst, abs(comm - want))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and worst <= 1e-8 and elapsed < 1.0
    _report("01 frame fields", ok, t0,
            "mismatches=%d bracket=%.2e t=%.2fs" % (mismatches, worst,
                                                    elapsed))


def test_criterion_02_curvature_routes_agree():
    t0 = time.perf_counter()
    rng = np.random.default_rng(202)
    worst_div, worst_par = 0.0, 0.0
    for sid in ROUTE_SURFACES:
        cat = build_surface(sid)
        for (u, v) in _sample_points(cat, 50, rng):
            g = cat.patch.point(u, v)
            h_ls = hmc_levelset(cat.levelset, g).H
            h_dv = hmc_divergence(cat.levelset, g).H
            h_pa = hmc_param(cat.patch, (u, v)).H
            worst_div = max(worst_div, abs(h_ls - h_dv))
            worst_par = max(worst_par, abs(h_ls - h_pa))
    elapsed = time.perf_counter() - t0
    ok = worst_div <= 1e-5 and worst_par <= 1e-5 and elapsed < 5.0
    _report("02 curvature routes", ok, t0,
            "|ls-div|=%.2e |ls-param|=%.2e t=%.2fs" % (worst_div, worst_par,
                                                       elapsed))


def test_criterion_03_minimal_surfaces_have_zero_curvature():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    worst = 0.0
    for sid in MINIMAL_SURFACES:
        cat = build_surface(sid)
        for (u, v) in _sample_points(cat, 50, rng):
            worst = max(worst, abs(hmc_param(cat.patch, (u, v)).H))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 2.0
    _report("03 minimal families", ok, t0,
            "max|H|=%.2e t=%.2fs" % (worst, elapsed))


def test_criterion_04_riemannian_curvatures_converge():
    t0 = time.perf_counter()
    cat = build_surface("t-graph:parab")
    ok, details = True, []
    for uv in ((1.1, 0.8), (0.7, 1.3), (1.3, 1.2)):
        g = cat.patch.point(*uv)
        H = hmc_levelset(cat.levelset, g).H
        out = hmc_pauls(cat.levelset, g, eps_list=(1e-1, 1e-2, 1e-3, 1e-4))
        eps = np.asarray(out["eps"])
        err = np.abs(np.asarray(out["H_eps"]) - H)
        slope = np.polyfit(np.log(eps), np.log(err), 1)[0]
        ok = ok and np.all(err <= 10.0 * eps) and 0.8 <= slope <= 1.2
        details.append("slope=%.3f maxerr/eps=%.2f" % (slope,
                                                       np.max(err / eps)))
    _report("04 eps-curvature limit", ok, t0, "; ".join(details))


def test_criterion_05_riemannian_area_bound():
    t0 = time.perf_counter()
    P = build_surface("t-graph:zero", domain=(1, 2, 0, 1)).patch
    base = perimeter(P, nu=64, nv=64).value
    weight = integrate_patch(P, lambda zz: zz["obar"] ** 2, nu=64,
                             nv=64).value
    ok, worst = True, 0.0
    for eps in (1e-4, 1e-3, 1e-2, 1e-1):
        excess = eps_area(P, eps, nu=64, nv=64).value - base
        ok = ok and 0.0 <= excess <= eps * weight / 2.0 + 1e-5
        worst = max(worst, excess - eps * weight / 2.0)
    _report("05 eps-area bound", ok, t0,
            "max(excess - eps*bound)=%.2e" % worst)


def test_criterion_06_dilation_and_translation_of_the_measure():
    t0 = time.perf_counter()
    rng = np.random.default_rng(606)
    worst_scale, worst_shift = 0.0, 0.0
    for sid in ("t-graph:parab", "xyt-graph"):
        P = build_surface(sid).patch
        for lam in (0.5, 2.0, 5.0):
            rel = abs(scaling_ratio(P, lam, nu=64, nv=64) - lam**3) / lam**3
            worst_scale = max(worst_scale, rel)
        for _ in range(5):
            g0 = rng.uniform(-2, 2, size=3)
            worst_shift = max(worst_shift,
                              abs(translation_ratio(P, g0, nu=64, nv=64)
                                  - 1.0))
    ok = worst_scale <= 1e-6 and worst_shift <= 1e-8
    _report("06 measure symmetry", ok, t0,
            "scaling rel=%.2e translation=%.2e" % (worst_scale, worst_shift))


def test_criterion_07_integration_by_parts():
    t0 = time.perf_counter()
    worst, worst_order = 0.0, np.inf
    for sid in ("t-graph:parab", "xyt-graph"):
        P = build_surface(sid).patch
        d = P.domain
        cu, cv = (d[0] + d[1]) / 2, (d[2] + d[3]) / 2
        su, sv = d[1] - d[0], d[3] - d[2]
        bumps = [bump2(cu, cv, 0.45 * su, 0.45 * sv),
                 bump2(cu - 0.1 * su, cv + 0.1 * sv, 0.3 * su, 0.3 * sv),
                 bump2(cu + 0.15 * su, cv - 0.1 * sv, 0.25 * su, 0.3 * sv)]
        f = bumps[1]
        for z in bumps:
            for kind in ("Z", "TY", "gradient", "green"):
                r256 = abs(ibp_residual(P, kind, z, f=f, nu=256, nv=256))
                worst = max(worst, r256)
                if r256 >= 1e-12:  # above the roundoff floor: measure order
                    r64 = abs(ibp_residual(P, kind, z, f=f, nu=64, nv=64))
                    order = np.log(r64 / r256) / np.log(4.0)
                    worst_order = min(worst_order, order)
    ok = worst <= 1e-4 and worst_order >= 2.0
    _report("07 integration by parts", ok, t0,
            "max residual=%.2e min order=%.2f" % (worst, worst_order))


def test_criterion_08_stokes_and_harmonic_coordinates():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    worst_stokes = 0.0
    for sid, dom in (("t-graph:zero", (1, 2, 0, 1)), ("xyt-graph", None)):
        P = build_surface(sid, domain=dom).patch
        d = P.domain
        f = bump2((d[0] + d[1]) / 2, (d[2] + d[3]) / 2,
                  0.45 * (d[1] - d[0]), 0.45 * (d[3] - d[2]))
        worst_stokes = max(worst_stokes,
                           abs(stokes_residual(P, f, nu=256, nv=256)))
    cat = build_surface("xyt-graph")
    worst_harm = 0.0
    for (u, v) in _sample_points(cat, 50, rng):
        res = coordinate_harmonicity_residuals(cat.patch, u, v)
        worst_harm = max(worst_harm, abs(res["x"]), abs(res["y"]),
                         abs(res["t"]))
    ok = worst_stokes <= 1e-4 and worst_harm <= 1e-5
    _report("08 stokes and harmonicity", ok, t0,
            "stokes=%.2e harmonicity=%.2e" % (worst_stokes, worst_harm))


def test_criterion_09_curvature_flow_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    worst = 0.0
    for sid in ("t-graph:parab", "xyt-graph"):
        cat = build_surface(sid)
        for (u, v) in _sample_points(cat, 50, rng):
            worst = max(worst, abs(mcf_residual(cat.patch, u, v)))
    ok = worst <= 1e-4
    _report("09 flow identity", ok, t0, "max residual=%.2e" % worst)


def test_criterion_10_identity_battery_by_finite_differences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1010)
    worst = 0.0
    for sid in ROUTE_SURFACES:
        cat = build_surface(sid)
        pts = [cat.patch.point(u, v)
               for (u, v) in _sample_points(cat, 50, rng)]
        rows = identity_battery(cat.levelset, pts, ids=BATTERY_SUBSET)
        worst = max(worst, max(abs(r["residual"]) for r in rows))
    ok = worst <= 1e-4
    _report("10 identity battery", ok, t0, "max residual=%.2e" % worst)


def _parab_normal_deformation():
    z = bump2(1.0, 1.0, 0.4, 0.4)

    def comp(i):
        def f(u, v):
            p1 = -2.0 * u - v / 2.0
            p2 = -2.0 * v + u / 2.0
            W2 = p1 * p1 + p2 * p2
            W = W2.sqrt() if hasattr(W2, "sqrt") else np.sqrt(W2)
            return z(u, v) * (p1 if i == 0 else p2) / W
        return f

    return DeformationField(comp(0), comp(1), lambda u, v: 0.0 * u)


def _xyt_normal_deformation():
    z = bump2(0.0, 0.0, 3.0, 1.5)

    def comp(i):
        def f(u, v):
            s = 1.0 + u * u / 2.0
            W2 = s * s * (1.0 + v * v)
            W = W2.sqrt() if hasattr(W2, "sqrt") else np.sqrt(W2)
            return z(u, v) * (s if i == 0 else -v * s) / W
        return f

    return DeformationField(comp(0), comp(1), lambda u, v: 0.0 * u)


def test_criterion_11_variation_routes():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1111)
    P = build_surface("t-graph:parab").patch
    D = _parab_normal_deformation()
    v1n = numeric_variation(P, D, order=1, nu=256, nv=256)
    v1a = first_variation_analytic(P, D, nu=256, nv=256)
    gap1 = abs(v1n - v1a)

    v2n = numeric_variation(P, D, order=2, nu=128, nv=128)
    v2f = second_variation(P, D, mode="full", nu=128, nv=128)
    gap2 = abs(v2n - v2f) / abs(v2f)

    Px = build_surface("xyt-graph").patch
    Dx = _xyt_normal_deformation()
    full = second_variation(Px, Dx, mode="full", nu=128, nv=128)
    geom = second_variation(Px, Dx, mode="geometric", nu=128, nv=128)
    gap3 = abs(full - geom) / abs(geom)

    worst_rate = 0.0
    for _ in range(10):
        u, v = rng.uniform(0.7, 1.3, size=2)
        ana = frame_variation_rates(P, D, u, v)
        fd = frame_variation_rates_fd(P, D, u, v)
        for key in ("pdot", "qdot", "ppdot_qqdot"):
            worst_rate = max(worst_rate, abs(ana[key] - fd[key]))
    elapsed = time.perf_counter() - t0
    ok = (gap1 <= 1e-4 and gap2 <= 1e-2 and gap3 <= 1e-3
          and worst_rate <= 1e-4 and elapsed < 60.0)
    _report("11 variation routes", ok, t0,
            "V1=%.2e V2rel=%.2e full-geom=%.2e rates=%.2e t=%.2fs"
            % (gap1, gap2, gap3, worst_rate, elapsed))


def test_criterion_12_stability():
    t0 = time.perf_counter()
    # (a) the vertical plane is stable under a hundred random profiles
    P = build_surface("vertical-plane:1,0,0", domain=(0, 1, 0, 1)).patch
    rng = np.random.default_rng(12345)
    qmin = np.inf
    for F, _meta in random_product_bumps((0, 1, 0, 1), 100, rng,
                                         margin=0.05):
        qmin = min(qmin, quadratic_form(P, F, nu=64, nv=64))

    # (b) the unstable minimal graph produces a certified witness
    scan = stability_scan(build_surface("xyt-graph").patch, nu=96, nv=96)
    has_witness = scan["witness"] is not None and \
        scan["witness"]["Q"] < -1e-6

    # (c) the graph form agrees with the geometric form on x = yt
    Gr = IntrinsicGraph(lambda u, v: u * v / (1.0 + u * u / 2.0),
                        (-3, 3, -2, 2), name="xyt")
    F = bump2(0.0, 0.0, 2.0, 1.2)
    gap = abs(intrinsic_stability_form(Gr, F, nu=96, nv=96)["Q"]
              - quadratic_form(intrinsic_to_patch(Gr), F, nu=96, nv=96))

    ok = qmin >= -1e-8 and has_witness and gap <= 1e-4
    _report("12 stability", ok, t0,
            "plane min Q=%.2e witness=%s form gap=%.2e"
            % (qmin, has_witness, gap))
