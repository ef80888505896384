"""Shared fixtures and independent numerical oracles.

The oracles deliberately avoid the library's closed forms: transforms
are checked against adaptive quadrature of the jump-measure integral,
moment identities against combinatorial moment/cumulant conversion, and
samplers against textbook distribution facts.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from tempstable import OneSidedParams, TemperedStableParams


def levy_cgf_one_sided(alpha, beta, lam, z):
    """Quadrature of int (e^{zx} - 1) alpha x^{-1-beta} e^{-lam x} dx."""
    f = lambda x: alpha * x ** (-1.0 - beta) * (np.exp((z - lam) * x) - np.exp(-lam * x))
    v1, _ = quad(f, 0.0, 1.0, points=[0.0], limit=400)
    v2, _ = quad(f, 1.0, np.inf, limit=400)
    return v1 + v2


def levy_cgf(p: TemperedStableParams, z):
    return (levy_cgf_one_sided(p.plus.alpha, p.plus.beta, p.plus.lam, z)
            + levy_cgf_one_sided(p.minus.alpha, p.minus.beta, p.minus.lam, -z))


def levy_cf_one_sided(alpha, beta, lam, z):
    """Oscillatory quadrature of int (e^{izx} - 1) against the jump density."""
    re = lambda x: (np.cos(z * x) - 1.0) * alpha * x ** (-1.0 - beta) * np.exp(-lam * x)
    im = lambda x: np.sin(z * x) * alpha * x ** (-1.0 - beta) * np.exp(-lam * x)
    r1, _ = quad(re, 0.0, 1.0, points=[0.0], limit=400)
    r2, _ = quad(re, 1.0, np.inf, limit=400)
    i1, _ = quad(im, 0.0, 1.0, points=[0.0], limit=400)
    i2, _ = quad(im, 1.0, np.inf, limit=400)
    return complex(r1 + r2, i1 + i2)


def levy_cf(p: TemperedStableParams, z):
    plus = levy_cf_one_sided(p.plus.alpha, p.plus.beta, p.plus.lam, z)
    minus = levy_cf_one_sided(p.minus.alpha, p.minus.beta, p.minus.lam, -z)
    return np.exp(plus + minus)


def moments_from_cumulants(kappa):
    """Raw moments m1..m6 from cumulants k1..k6 (Bell-polynomial identities)."""
    k1, k2, k3, k4, k5, k6 = kappa
    m1 = k1
    m2 = k2 + k1**2
    m3 = k3 + 3 * k2 * k1 + k1**3
    m4 = k4 + 4 * k3 * k1 + 3 * k2**2 + 6 * k2 * k1**2 + k1**4
    m5 = (k5 + 5 * k4 * k1 + 10 * k3 * k2 + 10 * k3 * k1**2
          + 15 * k2**2 * k1 + 10 * k2 * k1**3 + k1**5)
    m6 = (k6 + 6 * k5 * k1 + 15 * k4 * k2 + 15 * k4 * k1**2 + 10 * k3**2
          + 60 * k3 * k2 * k1 + 20 * k3 * k1**3 + 15 * k2**3
          + 45 * k2**2 * k1**2 + 15 * k2 * k1**4 + k1**6)
    return np.array([m1, m2, m3, m4, m5, m6])


_FD_STENCILS = {
    1: ([-0.5, 0.5], [-1, 1]),
    2: ([1.0, -2.0, 1.0], [-1, 0, 1]),
    3: ([-0.5, 1.0, -1.0, 0.5], [-2, -1, 1, 2]),
    4: ([1.0, -4.0, 6.0, -4.0, 1.0], [-2, -1, 0, 1, 2]),
}


def fd_cumulant(p, n, h0=0.04):
    """Finite-difference n-th derivative of the generating function at 0.

    Central stencils at steps h, h/2, h/4 with two Richardson levels,
    step scaled to the tighter tempering rate.
    """
    import tempstable as ts

    h = h0 * min(p.plus.lam, p.minus.lam)
    weights, offsets = _FD_STENCILS[n]

    def plain(step):
        return sum(w * ts.cgf(p, k * step) for w, k in zip(weights, offsets)) / step**n

    f1, f2, f3 = plain(h), plain(h / 2), plain(h / 4)
    r1 = (4 * f2 - f1) / 3
    r2 = (4 * f3 - f2) / 3
    return (16 * r2 - r1) / 15


def cumulant_scale(p, n):
    """Cancellation-free magnitude of the n-th cumulant (sum of leg sizes)."""
    from tempstable.core import cumulant_one_sided

    return cumulant_one_sided(p.plus, n) + cumulant_one_sided(p.minus, n)


def random_params(rng, beta_lo=0.05, beta_hi=0.95, alpha_lo=0.5, alpha_hi=3.0,
                  lam_lo=0.5, lam_hi=4.0) -> TemperedStableParams:
    return TemperedStableParams.create(
        rng.uniform(alpha_lo, alpha_hi), rng.uniform(beta_lo, beta_hi),
        rng.uniform(lam_lo, lam_hi),
        rng.uniform(alpha_lo, alpha_hi), rng.uniform(beta_lo, beta_hi),
        rng.uniform(lam_lo, lam_hi),
    )


def inversion_cost_ok(p: TemperedStableParams, extent_sd=12.0, cap=2**20) -> bool:
    """Whether the default-density plan fits the node cap for this law."""
    from tempstable import ConvergenceError, DensityEvaluator, InversionSettings

    try:
        DensityEvaluator(p, InversionSettings(extent_sd=extent_sd, max_nodes=cap))
    except ConvergenceError:
        return False
    return True


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def sym_half():
    """Symmetric law with beta = 0.5 on both legs."""
    return TemperedStableParams.create(1.0, 0.5, 1.0, 1.0, 0.5, 1.0)


@pytest.fixture
def skewed():
    return TemperedStableParams.create(1.0, 0.3, 3.0, 2.0, 0.6, 4.0)


@pytest.fixture
def one_sided_half():
    return OneSidedParams(1.0, 0.5, 1.0)


@pytest.fixture
def skewed_tight():
    """Skewed law with both tempering rates above 2 (pricing-friendly)."""
    return TemperedStableParams.create(0.6, 0.4, 4.0, 0.5, 0.5, 3.5)
