"""Numerical calculus for hypersurfaces in Carnot groups.

Horizontal frames on stratified Lie groups, horizontal mean curvature
through several independent routes, H-perimeter quadrature, tangential
Laplacians, first and second variation of the H-perimeter, and stability
scans, plus a small surface/field catalog and a reporting CLI.
"""

from .groups import (
    GroupError,
    StratifiedGroup,
    build_group,
    dilate,
    frame_at,
    frame_jacobian,
    gauge_norm,
    group_inverse,
    group_product,
    horizontal_connection,
    metric_eps,
)
from .fields import (
    ANALYTIC,
    FD,
    DerivativeEngine,
    FieldError,
    Jet,
    ScalarField,
    build_field,
    bump1,
    bump2,
    coordinate_field,
    gauge_power_field,
    horizontal_gradient,
    horizontal_jet,
    jet_partial,
    poly_field,
    seed_jets,
    x_derivative,
)
from .surfaces import (
    CatalogSurface,
    CharacteristicPointError,
    DegenerateSurfaceError,
    IntrinsicGraph,
    LevelSetSurface,
    ParamPatch,
    build_surface,
    burgers,
    catalog_ids,
    dilate_levelset,
    dilate_patch,
    SurfaceFrame,
    characteristic_tolerance,
    frame_levelset,
    frame_param,
    horizontal_plane_residual,
    intrinsic_to_patch,
    left_translate_patch,
    patch_fields_jets,
    restrict_to_patch,
    translate_levelset,
    zy_derivative,
    zy_second,
)
from .curvature import (
    CurvatureReport,
    IDENTITY_IDS,
    curvature_grid,
    geometry_aux,
    hmc_divergence,
    hmc_intrinsic,
    hmc_levelset,
    hmc_param,
    hmc_pauls,
    identity_battery,
    pseudo_hermitian_check,
)
from .measure import (
    IntegralResult,
    pairwise_sum,
    QuadratureGrid,
    ambient_tangential_laplacian,
    coordinate_harmonicity_residuals,
    coordinate_laplacians,
    eps_area,
    ibp_residual,
    integrate_patch,
    mcf_residual,
    perimeter,
    scaling_ratio,
    stokes_residual,
    surface_gradient,
    tangential_laplacian,
    translation_ratio,
)
from .variation import (
    DeformationField,
    deform_patch,
    first_variation_analytic,
    frame_variation_rates,
    frame_variation_rates_fd,
    normal_first_variation,
    intrinsic_stability_form,
    numeric_variation,
    product_bump_lattice,
    quadratic_form,
    random_product_bumps,
    second_variation,
    second_variation_full,
    second_variation_geometric,
    stability_scan,
)

__version__ = "0.1.0"
