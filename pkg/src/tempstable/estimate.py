"""Moment/cumulant statistics and the three estimation procedures.

The one-sided law has a closed-form inverse from its first three
cumulants.  The six-parameter law is recovered by solving the
moment-matching system G(kappa, theta) = 0 with a damped Newton
iteration in log/logit coordinates, so every iterate automatically stays
inside the open parameter domain.  A separate estimator reads the
intensity off the jump record of an observed path.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma, gamma as _gamma

from .errors import ConvergenceError, DomainError, InfeasibleCumulantsError
from .params import CumulantVector, OneSidedParams, TemperedStableParams

_LOGIT_CLIP = 30.0


@dataclass(frozen=True)
class SampleCumulants:
    kappa_hat: tuple
    n_obs: int


@dataclass(frozen=True)
class FitResult:
    params: TemperedStableParams
    residual: float
    iterations: int
    converged: bool


def _kappa_of(k) -> np.ndarray:
    if isinstance(k, SampleCumulants):
        return np.asarray(k.kappa_hat, dtype=float)
    if isinstance(k, CumulantVector):
        return np.asarray(k.kappa, dtype=float)
    return np.asarray(k, dtype=float)


def sample_cumulants(data) -> SampleCumulants:
    """First six sample cumulants via the raw-moment polynomial identities."""
    x = np.asarray(data, dtype=float).ravel()
    if x.size < 7:
        raise DomainError(
            f"need at least 7 observations, got {x.size}", code="TOO_FEW_OBS"
        )
    m1, m2, m3, m4, m5, m6 = (np.mean(x**j) for j in range(1, 7))
    k1 = m1
    k2 = m2 - m1**2
    k3 = m3 - 3 * m1 * m2 + 2 * m1**3
    k4 = m4 - 4 * m1 * m3 - 3 * m2**2 + 12 * m1**2 * m2 - 6 * m1**4
    k5 = (m5 - 5 * m1 * m4 - 10 * m2 * m3 + 20 * m1**2 * m3
          + 30 * m1 * m2**2 - 60 * m1**3 * m2 + 24 * m1**5)
    k6 = (m6 - 6 * m1 * m5 - 15 * m2 * m4 + 30 * m1**2 * m4 - 10 * m3**2
          + 120 * m1 * m2 * m3 - 120 * m1**3 * m3 + 30 * m2**3
          - 270 * m1**2 * m2**2 + 360 * m1**4 * m2 - 120 * m1**6)
    return SampleCumulants(kappa_hat=(k1, k2, k3, k4, k5, k6), n_obs=int(x.size))


def fit_one_sided(k) -> OneSidedParams:
    """Closed-form one-sided estimate from the first three cumulants.

    Feasibility requires k1, k2 > 0 and k1*k3 > k2^2; the Gamma boundary
    k1*k3 = 2*k2^2 maps to beta = 0 and larger ratios to beta in (0, 1).
    """
    kappa = _kappa_of(k)
    if kappa.size < 3:
        raise DomainError("need at least three cumulants")
    k1, k2, k3 = kappa[0], kappa[1], kappa[2]
    if not (k1 > 0.0 and k2 > 0.0):
        raise InfeasibleCumulantsError(
            f"first cumulants must be positive, got k1={k1}, k2={k2}"
        )
    gap = k1 * k3 - k2**2
    if not (gap > 0.0):
        raise InfeasibleCumulantsError(
            f"cumulants violate k1*k3 > k2^2 (k1*k3 - k2^2 = {gap})"
        )
    beta = 1.0 - k2**2 / gap
    if -1e-12 < beta < 0.0:
        beta = 0.0  # Gamma boundary reached up to roundoff
    if not (0.0 <= beta < 1.0):
        raise InfeasibleCumulantsError(
            f"implied stability index {beta} outside [0, 1)"
        )
    lam = (1.0 - beta) * k1 / k2
    alpha = lam ** (1.0 - beta) * k1 / _gamma(1.0 - beta)
    return OneSidedParams(alpha, beta, lam)


# -- six-parameter moment solve ----------------------------------------------


def two_sided_G(kappa, theta) -> np.ndarray:
    """Moment-matching system whose root is the parameter estimate.

    G_j = Gamma(j-b+) a+ (l-)^(j-b-) + (-1)^j Gamma(j-b-) a- (l+)^(j-b+)
          - kappa_j (l+)^(j-b+) (l-)^(j-b-),   j = 1..6.
    """
    kappa = _kappa_of(kappa)
    ap, bp, lp, am, bm, lm = theta
    j = np.arange(1, 7)
    pow_p = lp ** (j - bp)
    pow_m = lm ** (j - bm)
    return (_gamma(j - bp) * ap * pow_m
            + (-1.0) ** j * _gamma(j - bm) * am * pow_p
            - kappa[:6] * pow_p * pow_m)


def two_sided_jacobian(kappa, theta) -> np.ndarray:
    """Analytic Jacobian of ``two_sided_G`` in the parameter vector, at an
    arbitrary point (not just at a root)."""
    kappa = _kappa_of(kappa)
    ap, bp, lp, am, bm, lm = theta
    j = np.arange(1, 7)
    sign = (-1.0) ** j
    gp = _gamma(j - bp)
    gm = _gamma(j - bm)
    pow_p = lp ** (j - bp)
    pow_m = lm ** (j - bm)
    s = pow_p * pow_m
    log_lp, log_lm = math.log(lp), math.log(lm)

    jac = np.empty((6, 6))
    jac[:, 0] = gp * pow_m
    jac[:, 1] = (-gp * digamma(j - bp) * ap * pow_m
                 - sign * gm * am * log_lp * pow_p
                 + kappa[:6] * log_lp * s)
    jac[:, 2] = (sign * gm * am * (j - bp) * pow_p / lp
                 - kappa[:6] * (j - bp) * s / lp)
    jac[:, 3] = sign * gm * pow_p
    jac[:, 4] = (-sign * gm * digamma(j - bm) * am * pow_p
                 - gp * ap * log_lm * pow_m
                 + kappa[:6] * log_lm * s)
    jac[:, 5] = (gp * ap * (j - bm) * pow_m / lm
                 - kappa[:6] * (j - bm) * s / lm)
    return jac


def population_kappa(theta) -> np.ndarray:
    ap, bp, lp, am, bm, lm = theta
    j = np.arange(1, 7)
    return (_gamma(j - bp) * ap / lp ** (j - bp)
            + (-1.0) ** j * _gamma(j - bm) * am / lm ** (j - bm))


def _to_unconstrained(theta) -> np.ndarray:
    ap, bp, lp, am, bm, lm = theta
    logit = lambda b: math.log(b / (1.0 - b))
    return np.array([math.log(ap), logit(bp), math.log(lp),
                     math.log(am), logit(bm), math.log(lm)])


def _from_unconstrained(u) -> np.ndarray:
    u = np.clip(u, -_LOGIT_CLIP, _LOGIT_CLIP)
    expit = lambda v: 1.0 / (1.0 + math.exp(-v))
    return np.array([math.exp(u[0]), expit(u[1]), math.exp(u[2]),
                     math.exp(u[3]), expit(u[4]), math.exp(u[5])])


def _coord_scale(theta) -> np.ndarray:
    # d(theta)/d(u) for u = (ln a+, logit b+, ln l+, ln a-, logit b-, ln l-)
    ap, bp, lp, am, bm, lm = theta
    return np.array([ap, bp * (1.0 - bp), lp, am, bm * (1.0 - bm), lm])


def _validate_init(init: TemperedStableParams) -> None:
    for leg in (init.plus, init.minus):
        if not (0.0 < leg.beta < 1.0):
            raise DomainError(
                "the six-parameter solve works on the open domain with "
                "stability legs in (0, 1); Gamma-boundary data belongs to "
                "the closed-form one-sided estimator"
            )


def _scaled_system(kappa, scale):
    def fun(u):
        theta = _from_unconstrained(u)
        return (population_kappa(theta) - kappa) / scale

    def jac(u):
        theta = _from_unconstrained(u)
        j = np.arange(1, 7)
        s_rows = theta[2] ** (j - theta[1]) * theta[5] ** (j - theta[4])
        jac_g = two_sided_jacobian(kappa, theta)
        # rows of G divided by the lambda powers equal the cumulant
        # mismatch, so this is the Jacobian of `fun` by the chain rule
        return (jac_g / (s_rows * scale)[:, None]) * _coord_scale(theta)[None, :]

    return fun, jac


def fit_two_sided(k, init: TemperedStableParams,
                  tol: float = 1e-12, max_iter: int = 200) -> FitResult:
    """Damped Newton solve of the six-cumulant matching system.

    Convergence is declared when every cumulant mismatch is below ``tol``
    relative to its natural scale max(|kappa_j|, k2^(j/2)).  A
    backtracking Newton iteration runs first; if it stalls, a dogleg
    trust-region pass with the same analytic Jacobian finishes the job
    (plain line-searched Newton alone strands on a sizable fraction of
    perturbed starts).  On failure the best iterate is returned with
    ``converged=False``.
    """
    kappa = _kappa_of(k)
    if kappa.size != 6:
        raise DomainError("need exactly six cumulants")
    if not (kappa[1] > 0.0 and kappa[3] > 0.0 and kappa[5] > 0.0):
        raise InfeasibleCumulantsError(
            "even sample cumulants must be positive for a six-parameter fit"
        )
    _validate_init(init)
    scale = np.maximum(np.abs(kappa), kappa[1] ** (np.arange(1, 7) / 2.0))
    fun, jac = _scaled_system(kappa, scale)

    u_init = _to_unconstrained(np.array(init.as_tuple()))
    u = u_init.copy()
    r = fun(u)
    best_u, best_norm = u, float(np.max(np.abs(r)))
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if np.max(np.abs(r)) <= tol:
            break
        try:
            step = np.linalg.solve(jac(u), -r)
        except np.linalg.LinAlgError:
            break
        norm0 = float(np.sum(r**2))
        t_step = 1.0
        for _ in range(40):
            u_new = np.clip(u + t_step * step, -_LOGIT_CLIP, _LOGIT_CLIP)
            r_new = fun(u_new)
            if np.all(np.isfinite(r_new)) and float(np.sum(r_new**2)) < norm0:
                break
            t_step *= 0.5
        else:
            break
        u, r = u_new, r_new
        norm = float(np.max(np.abs(r)))
        if norm < best_norm:
            best_u, best_norm = u, norm

    if best_norm > tol:
        from scipy.optimize import root as _root

        for start in (best_u, u_init):
            sol = _root(fun, start, jac=jac, method="hybr", tol=1e-14)
            iterations += int(sol.nfev)
            norm = float(np.max(np.abs(fun(sol.x))))
            if norm < best_norm:
                best_u, best_norm = sol.x, norm
            if best_norm <= tol:
                break

    converged = best_norm <= tol
    params = TemperedStableParams.create(*_from_unconstrained(best_u))
    return FitResult(params=params, residual=best_norm,
                     iterations=iterations, converged=converged)


def _default_starts(kappa) -> list[TemperedStableParams]:
    """Moment-informed starting points for the multi-start fit."""
    kappa = _kappa_of(kappa)
    mu, k2 = kappa[0], kappa[1]
    sigma = math.sqrt(k2)
    starts = []
    from .limits import alpha_pair_for_moments

    for bp, bm in ((0.5, 0.5), (0.25, 0.25), (0.75, 0.75), (0.25, 0.75),
                   (0.75, 0.25), (0.5, 0.25), (0.25, 0.5), (0.6, 0.6)):
        for lam_scale in (1.0, 3.0):
            lp = lam_scale / sigma
            lm = lam_scale / sigma
            try:
                a_p, a_m = alpha_pair_for_moments(bp, lp, bm, lm, mu, k2)
                starts.append(TemperedStableParams.create(a_p, bp, lp, a_m, bm, lm))
            except DomainError:
                continue
            if len(starts) >= 8:
                return starts
    if not starts:
        raise InfeasibleCumulantsError("no feasible starting point found")
    return starts


def _max_workers() -> int:
    env = os.environ.get("TS_THREADS", "")
    if env.strip():
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def multistart_fit_two_sided(k, tol: float = 1e-12, max_iter: int = 200) -> FitResult:
    """Run the Newton solve from the default start set and keep the best
    residual; ties break deterministically on start index."""
    kappa = _kappa_of(k)
    starts = _default_starts(kappa)

    def run(start):
        try:
            return fit_two_sided(kappa, start, tol=tol, max_iter=max_iter)
        except (DomainError, ConvergenceError):
            return None

    with ThreadPoolExecutor(max_workers=_max_workers()) as pool:
        results = list(pool.map(run, starts))
    best = None
    for res in results:
        if res is None:
            continue
        if best is None or res.residual < best.residual:
            best = res
    if best is None:
        raise ConvergenceError("all starting points failed")
    return best


# -- path-based estimators -----------------------------------------------------


def alpha_from_jump_counts(counts, horizon: float) -> float:
    """Intensity estimate: mean band count per unit time."""
    counts = np.asarray(counts, dtype=float)
    if counts.size == 0:
        raise DomainError("empty count sequence")
    if not (horizon > 0.0):
        raise DomainError("horizon must be positive")
    return float(np.sum(counts) / (counts.size * horizon))


def lambda_given_alpha_beta(alpha: float, beta: float, mean: float) -> float:
    """Tempering rate from the intensity, stability and observed mean drift."""
    if not (alpha > 0.0 and 0.0 <= beta < 1.0):
        raise DomainError("need alpha > 0 and beta in [0, 1)")
    if not (mean > 0.0):
        raise DomainError("mean of a subordinator must be positive")
    return (alpha * _gamma(1.0 - beta) / mean) ** (1.0 / (1.0 - beta))
