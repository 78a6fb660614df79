import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def uv_lattice(domain, k, inset=0.15):
    """k x k interior lattice of (u, v) samples on a patch domain."""
    u0, u1, v0, v1 = domain
    du, dv = u1 - u0, v1 - v0
    us = np.linspace(u0 + inset * du, u1 - inset * du, k)
    vs = np.linspace(v0 + inset * dv, v1 - inset * dv, k)
    return [(float(u), float(v)) for u in us for v in vs]
