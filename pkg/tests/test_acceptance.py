"""Acceptance suite: one test per criterion, each printing a pass line.

Every tolerance is pinned here; nothing defers to later calibration.
Runtime budgets are asserted so the suite stays desk-scale.
"""

import math
import time

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as G, gammainc
from scipy.stats import norm

import tempstable as ts
from tempstable import (
    MarketConfig,
    OptionSpec,
    OneSidedParams,
    PathConfig,
    TemperedStableParams,
)
from tempstable.estimate import population_kappa

from conftest import cumulant_scale, fd_cumulant, inversion_cost_ok, random_params


def _report(name, elapsed, budget, detail=""):
    print(f"[PASS] {name}: {detail} ({elapsed:.1f}s < {budget}s)")
    assert elapsed < budget


def test_criterion_1_cumulant_consistency():
    start = time.monotonic()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        p = random_params(rng, beta_lo=0.02, beta_hi=0.95)
        for n in (1, 2, 3, 4):
            err = abs(fd_cumulant(p, n) - ts.cumulant(p, n)) / cumulant_scale(p, n)
            worst = max(worst, err)
    assert worst < 1e-5
    _report("criterion 1 (cumulant consistency)", time.monotonic() - start, 5.0,
            f"worst FD error {worst:.2e} <= 1e-5 over 100 sets, n=1..4")


def test_criterion_2_transform_algebra():
    start = time.monotonic()
    rng = np.random.default_rng(102)
    z = np.linspace(-20.0, 20.0, 161)
    worst_conv, worst_scale = 0.0, 0.0
    for _ in range(20):
        p1 = random_params(rng)
        p2 = TemperedStableParams.create(
            rng.uniform(0.3, 3.0), p1.plus.beta, p1.plus.lam,
            rng.uniform(0.3, 3.0), p1.minus.beta, p1.minus.lam,
        )
        lhs = ts.cf(ts.convolve(p1, p2), z)
        worst_conv = max(worst_conv, float(np.max(np.abs(lhs - ts.cf(p1, z) * ts.cf(p2, z)))))
        rho = rng.uniform(0.3, 3.0)
        worst_scale = max(worst_scale, float(np.max(np.abs(
            ts.cf(ts.scale(p1, rho), z) - ts.cf(p1, rho * z)
        ))))
    assert worst_conv < 1e-12 and worst_scale < 1e-12
    _report("criterion 2 (transform algebra)", time.monotonic() - start, 5.0,
            f"convolution {worst_conv:.2e}, scaling {worst_scale:.2e} <= 1e-12 on |z|<=20")


def test_criterion_3_density_sanity():
    start = time.monotonic()
    rng = np.random.default_rng(103)
    done = 0
    worst_mass, worst_mean, worst_var = 0.0, 0.0, 0.0
    while done < 50:
        p = random_params(rng, beta_lo=0.05, beta_hi=0.95)
        if not inversion_cost_ok(p):
            continue
        done += 1
        grid = ts.density_grid(p)
        stats = ts.moment_stats(p)
        sigma = math.sqrt(stats.variance)
        mass = np.trapezoid(grid.pdf, grid.x)
        mean_num = np.trapezoid(grid.x * grid.pdf, grid.x)
        var_num = np.trapezoid((grid.x - mean_num) ** 2 * grid.pdf, grid.x)
        worst_mass = max(worst_mass, abs(mass - 1.0))
        worst_mean = max(worst_mean, abs(mean_num - stats.mean) / sigma)
        worst_var = max(worst_var, abs(var_num - stats.variance) / stats.variance)
        bracket = ts.mode_bracket(p)
        x_hat = grid.x[np.argmax(grid.pdf)]
        assert bracket.lower - 1e-6 <= x_hat <= bracket.upper + 1e-6
    assert worst_mass < 1e-4 and worst_mean < 1e-3 and worst_var < 1e-3
    _report("criterion 3 (density sanity)", time.monotonic() - start, 120.0,
            f"50 sets: mass err {worst_mass:.1e}, mean err {worst_mean:.1e}, "
            f"var err {worst_var:.1e}, modes inside brackets")


def test_criterion_4_estimator_round_trips():
    start = time.monotonic()
    rng = np.random.default_rng(104)
    for _ in range(20):
        one = OneSidedParams(rng.uniform(0.2, 4.0), rng.uniform(0.02, 0.95),
                             rng.uniform(0.3, 5.0))
        kappa = [G(n - one.beta) * one.alpha / one.lam ** (n - one.beta)
                 for n in range(1, 7)]
        fit = ts.fit_one_sided(kappa)
        assert abs(fit.alpha - one.alpha) < 1e-12 * one.alpha
        assert abs(fit.beta - one.beta) < 1e-12
        assert abs(fit.lam - one.lam) < 1e-12 * one.lam

    worst_param = 0.0
    for _ in range(20):
        theta = np.array([
            rng.uniform(0.4, 2.5), rng.uniform(0.1, 0.9), rng.uniform(0.5, 4.0),
            rng.uniform(0.4, 2.5), rng.uniform(0.1, 0.9), rng.uniform(0.5, 4.0),
        ])
        kappa = population_kappa(theta)
        init = theta * (1.0 + 0.2 * rng.uniform(-1.0, 1.0, 6))
        init[1] = min(max(init[1], 0.02), 0.98)
        init[4] = min(max(init[4], 0.02), 0.98)
        fit = ts.fit_two_sided(kappa, TemperedStableParams.create(*init))
        assert fit.converged
        worst_param = max(worst_param, float(np.max(np.abs(
            np.array(fit.params.as_tuple()) - theta
        ))))
    assert worst_param < 1e-8

    worst_jac = 0.0
    for _ in range(20):
        theta = np.array([
            rng.uniform(0.3, 3.0), rng.uniform(0.05, 0.95), rng.uniform(0.3, 4.0),
            rng.uniform(0.3, 3.0), rng.uniform(0.05, 0.95), rng.uniform(0.3, 4.0),
        ])
        kappa = population_kappa(theta) * rng.uniform(0.7, 1.3, 6)
        jac = ts.two_sided_jacobian(kappa, theta)
        fd = np.empty((6, 6))
        for i in range(6):
            h = 1e-6 * max(abs(theta[i]), 1e-3)
            up, dn = theta.copy(), theta.copy()
            up[i] += h
            dn[i] -= h
            fd[:, i] = (ts.two_sided_G(kappa, up) - ts.two_sided_G(kappa, dn)) / (2 * h)
        row_scale = np.max(np.abs(fd), axis=1, keepdims=True)
        worst_jac = max(worst_jac, float(np.max(np.abs(jac - fd) / row_scale)))
    assert worst_jac < 1e-6
    _report("criterion 4 (estimator round trips)", time.monotonic() - start, 60.0,
            f"one-sided exact, two-sided {worst_param:.1e} <= 1e-8, "
            f"jacobian vs FD {worst_jac:.1e} <= 1e-6")


def test_criterion_5_monte_carlo_marginals():
    start = time.monotonic()
    legs = [OneSidedParams(0.8, 0.5, 1.2), OneSidedParams(1.1, 0.3, 0.8)]
    n = 1_000_000
    worst_z = 0.0
    rng = np.random.default_rng(105)
    for leg in legs:
        for t in (0.1, 1.0, 10.0):
            x = ts.sample_one_sided(leg, t, rng, size=n)
            a = leg.alpha * t
            mean_t = G(1 - leg.beta) * a / leg.lam ** (1 - leg.beta)
            var_t = G(2 - leg.beta) * a / leg.lam ** (2 - leg.beta)
            m3_t = ts.third_moment_one_sided(OneSidedParams(a, leg.beta, leg.lam))
            z_mean = (np.mean(x) - mean_t) / (np.std(x) / math.sqrt(n))
            sq = (x - np.mean(x)) ** 2
            z_var = (np.var(x) - var_t) / (np.std(sq) / math.sqrt(n))
            cubes = x**3
            z_m3 = (np.mean(cubes) - m3_t) / (np.std(cubes) / math.sqrt(n))
            worst_z = max(worst_z, abs(z_mean), abs(z_var), abs(z_m3))
    assert worst_z < 4.0
    _report("criterion 5 (Monte-Carlo marginals)", time.monotonic() - start, 120.0,
            f"worst z-score {worst_z:.2f} < 4 over 2 legs x 3 horizons at N=1e6")


def test_criterion_6_berry_esseen():
    start = time.monotonic()
    laws = [
        TemperedStableParams.create(30.0, 0.0, 1.0, 30.0, 0.0, 1.0),
        TemperedStableParams.create(80.0, 0.0, 2.0, 60.0, 0.0, 1.5),
        TemperedStableParams.create(200.0, 0.0, 1.0, 200.0, 0.0, 1.0),
        TemperedStableParams.create(0.3, 0.5, 0.25, 0.3, 0.5, 0.25),
        TemperedStableParams.create(0.5, 0.4, 0.4, 0.4, 0.3, 0.5),
    ]
    n = 1_000_000
    rng = np.random.default_rng(106)
    checked = []
    for p in laws:
        b1 = ts.berry_esseen_bound(p).bound
        for t in (1.0, 10.0, 100.0):
            law_t = ts.marginal(p, t)
            report = ts.berry_esseen_bound(law_t)
            assert abs(report.bound - b1 / math.sqrt(t)) < 1e-12 * b1
            x = np.sort(
                ts.sample_one_sided(law_t.plus, 1.0, rng, size=n)
                - ts.sample_one_sided(law_t.minus, 1.0, rng, size=n)
            )
            gauss = norm.cdf(x, loc=report.mu, scale=math.sqrt(report.sigma2))
            hi = np.arange(1, n + 1) / n
            lo = np.arange(0, n) / n
            ks = max(np.max(np.abs(gauss - hi)), np.max(np.abs(gauss - lo)))
            assert ks <= report.bound
            checked.append((t, ks, report.bound))
    tightest = min(b / k for t, k, b in checked)
    _report("criterion 6 (Berry-Esseen)", time.monotonic() - start, 300.0,
            f"15 law/horizon pairs: empirical KS <= bound (min slack x{tightest:.1f}); "
            "1/sqrt(t) decay exact")


def test_criterion_7_jump_count_estimator():
    start = time.monotonic()
    alpha, beta, lam = 2.0, 0.5, 1.0
    horizon, n_bins, floor = 10_000.0, 50, 1e-3
    assert floor <= ts.size_band_edge(beta, n_bins + 1)
    p = TemperedStableParams.create(alpha, beta, lam, 1e-12, 0.5, 1.0)
    path = ts.simulate_path(p, PathConfig(horizon=horizon, step=1.0, seed=1070,
                                          jump_floor=floor))
    counts = ts.jump_bin_counts(path, OneSidedParams(alpha, beta, lam), n_bins)
    alpha_hat = ts.alpha_from_jump_counts(counts, horizon)
    rel_err = abs(alpha_hat - alpha) / alpha
    assert rel_err < 0.05
    _report("criterion 7 (jump-count estimator)", time.monotonic() - start, 300.0,
            f"alpha_hat {alpha_hat:.4f} vs 2 (rel err {rel_err:.3%} < 5%)")


def test_criterion_8_martingale_residuals():
    start = time.monotonic()
    p = TemperedStableParams.create(0.6, 0.4, 4.0, 0.5, 0.5, 3.5)
    r, q = 0.04, 0.01

    sol = ts.esscher_martingale(p, r, q)
    assert sol.exists and sol.residual <= 1e-10

    t1, t2 = ts.phi_domain(p, r, q)
    grid = np.linspace(t1 + 0.01 * (t2 - t1), t2 - 0.01 * (t2 - t1), 50)
    phis = []
    for theta in grid:
        point = ts.curve_point(p, theta, r, q)
        assert point.residual <= 1e-10
        phis.append(point.theta[1])
    assert np.all(np.diff(phis) > 0.0)

    mmm = ts.minimal_martingale(p, 0.01, 0.0)
    assert mmm.exists
    base, tilted = mmm.factors
    psi1 = (ts.cgf(base, 1.0) if base else 0.0) + (ts.cgf(tilted, 1.0) if tilted else 0.0)
    assert abs(psi1 - 0.01) <= 1e-10

    # existence predicates
    low_rate = TemperedStableParams.create(1.0, 0.5, 0.4, 1.0, 0.5, 0.4)
    assert not ts.esscher_martingale(low_rate, 0.03, 0.0).exists
    hi_carry = ts.esscher_f(p, p.plus.lam - 1.0)
    assert not ts.esscher_martingale(p, hi_carry + 0.5, 0.0).exists
    starved = TemperedStableParams.create(0.01, 0.5, 4.0, 0.5, 0.5, 3.0)
    try:
        ts.phi_domain(starved, 0.2, 0.0)
        raise AssertionError("expected empty martingale set")
    except ts.NoMartingaleMeasureError:
        pass
    carry_hi = ts.cgf(p, 2.0) - ts.cgf(p, 1.0)
    assert not ts.minimal_martingale(p, carry_hi + 0.2, 0.0).exists
    _report("criterion 8 (martingale residuals)", time.monotonic() - start, 30.0,
            "all residuals <= 1e-10; curve increasing over 50 points; "
            "existence predicates match")


def test_criterion_9_pricing():
    start = time.monotonic()
    base = TemperedStableParams.create(0.6, 0.4, 4.0, 0.5, 0.5, 3.5)
    market = MarketConfig(s0=100.0, r=0.04, q_div=0.01)
    pq = ts.esscher_martingale(base, market.r, market.q_div).new_params

    opt = OptionSpec(strike=100.0, maturity=1.0)
    lam_plus = pq.plus.lam
    nus = np.linspace(1.0 + 0.02 * (lam_plus - 1.0), lam_plus - 0.02 * (lam_plus - 1.0), 7)
    prices = [ts.call_price_fourier(pq, market, opt, nu) for nu in nus]
    nu_spread = max(prices) - min(prices)
    assert nu_spread <= 1e-8 * market.s0

    fourier = prices[3]
    mc, se = ts.mc_call_price(pq, market, opt, 1_000_000, seed=109)
    z = abs(fourier - mc) / se
    assert z < 3.0

    forward = lambda t: market.s0 * math.exp(-market.q_div * t)
    for strike in np.linspace(60.0, 150.0, 10):
        for mat in np.linspace(0.25, 3.0, 10):
            price = ts.call_price_fourier(pq, market, OptionSpec(strike, mat))
            lo = max(0.0, forward(mat) - strike * math.exp(-market.r * mat))
            assert lo - 1e-8 <= price <= forward(mat) + 1e-8
    _report("criterion 9 (pricing)", time.monotonic() - start, 300.0,
            f"nu spread {nu_spread:.1e} <= 1e-8*S0; MC z {z:.2f} < 3; "
            "no-arbitrage bounds on 10x10 grid")


def test_criterion_10_blumenthal_getoor():
    start = time.monotonic()
    rng = np.random.default_rng(110)

    def small_jump_integral(p, p_exp, cutoff):
        total = 0.0
        for leg in (p.plus, p.minus):
            val, _ = quad(
                lambda u: leg.alpha * math.exp(u * (p_exp - leg.beta))
                * math.exp(-leg.lam * math.exp(u)),
                math.log(cutoff), 0.0, limit=200,
            )
            total += val
        return total

    def analytic_limit(p, p_exp):
        total = 0.0
        for leg in (p.plus, p.minus):
            a = p_exp - leg.beta
            total += leg.alpha * leg.lam**-a * G(a) * gammainc(a, leg.lam)
        return total

    for _ in range(10):
        # intensities large enough that the divergent side blows past 1e6
        # by cutoff 1e-12, per the stated divergence yardstick
        p = TemperedStableParams.create(
            rng.uniform(1e4, 4e4), rng.uniform(0.1, 0.9), rng.uniform(0.5, 2.0),
            rng.uniform(1e4, 4e4), rng.uniform(0.1, 0.9), rng.uniform(0.5, 2.0),
        )
        idx = ts.bg_index(p)
        finite_val = small_jump_integral(p, idx + 0.1, 1e-12)
        assert abs(finite_val - analytic_limit(p, idx + 0.1)) < 0.1 * finite_val
        div_mid = small_jump_integral(p, idx - 0.1, 1e-6)
        div_val = small_jump_integral(p, idx - 0.1, 1e-12)
        assert div_val > 1e6
        assert div_val > 3.0 * div_mid  # cutoff^-0.1 growth, no plateau
    _report("criterion 10 (Blumenthal-Getoor)", time.monotonic() - start, 30.0,
            "10 sets: +0.1 integral finite (matches limit), -0.1 integral "
            "exceeds 1e6 by cutoff 1e-12 and keeps growing")
