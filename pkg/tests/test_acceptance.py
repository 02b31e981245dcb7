"""End-to-end acceptance gates, one verdict line per criterion.

Each test exercises a full pipeline (certificate -> constants -> curve ->
oracle comparison) at its stated tolerance and prints exactly one line

    ACCEPTANCE <k>: PASS|FAIL  [numbers]

outside pytest's capture, so the verdicts survive in teed logs. The line is
printed before the assertion fires; a red criterion still reports itself.

Criteria, in order: queueing-bound dominance against the exact oracle, the
heavy-traffic crossover between coupling sets, independence-sampler iteration
targets, Monte Carlo consistency of the coupling moments, randomized property
suites, negative controls, and the statement of what this suite does not
assert.
"""

import dataclasses
import time

import numpy as np
import pytest

from subgeom import isampler, mg1, verify
from subgeom.bounds import BoundCurve, YoungPair, compute_m_u
from subgeom.drift import (
    SmallSetRegion,
    UnivariateDriftCert,
    admissible_lambda_interval,
    bivariate_from_univariate,
    check_drift_pointwise,
)
from subgeom.errors import CertificateError, ConfigurationError
from subgeom.monotone import (
    DiscreteKernel,
    MinorisationCert,
    find_minorisation,
    ordered_coupling_step,
    residual_kernel,
)
from subgeom.rates import PhiGenerator, RateSequence


def _verdict(capsys, k: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\nACCEPTANCE {k}: {'PASS' if ok else 'FAIL'}  [{detail}]")


# ------------------------------------------------- 1: dominance vs exact oracle


def test_criterion_1_dominance_against_exact_oracle(capsys):
    """Every certified TV curve dominates the exact l1 distance on n = 1..200
    for rho in {0.5, 0.9} and coupling sets {atom, {0..3}, {0..6}}, with the
    truncation boundary never holding 1e-6 of mass, in under two minutes."""
    t0 = time.monotonic()
    barriers = {}
    min_margin = np.inf
    failures = []
    for rho in (0.5, 0.9):
        base = mg1.MG1Config.from_rho(rho, x0=3)
        grown, k, exact = mg1.exact_reference(base, nmax=200)
        barriers[rho] = exact.barrier_mass
        for x0 in (1, 3, 6):
            cfg = dataclasses.replace(grown, x0=x0)
            curve = mg1.bound_curve(cfg, nmax=200, kernel=k, pi=exact.pi)
            rep = verify.dominance_report(curve, exact)
            min_margin = min(min_margin, rep.min_margin)
            if not rep.passed:
                failures.append((rho, x0, rep.first_violation_n))
    elapsed = time.monotonic() - t0
    ok = (
        not failures
        and all(b < 1e-6 for b in barriers.values())
        and elapsed < 120.0
    )
    _verdict(
        capsys, 1, ok,
        f"6/6 curves vs exact on n=1..200; min margin {min_margin:.3g}; "
        f"barrier rho0.5={barriers[0.5]:.2e}, rho0.9={barriers[0.9]:.2e}; "
        f"{elapsed:.1f}s",
    )
    assert not failures, f"dominance violations: {failures}"
    assert all(b < 1e-6 for b in barriers.values()), barriers
    assert elapsed < 120.0


# ------------------------------------------------- 2: heavy-traffic crossover


def test_criterion_2_heavy_traffic_crossover(capsys):
    """At rho = 0.9 the {0..6} bound drops strictly below the atom bound at
    some n <= 1e4; whether rho = 0.5 crosses is reported informationally."""

    def first_crossing(rho):
        pairs = mg1.figure_curves(
            [mg1.MG1Config.from_rho(rho, x0=x0) for x0 in (1, 6)], nmax=10_000
        )
        atom, six = pairs[0][1], pairs[1][1]
        below = six.tv < atom.tv
        return int(atom.n[np.argmax(below)]) if below.any() else None

    n9 = first_crossing(0.9)
    n5 = first_crossing(0.5)
    ok = n9 is not None
    half = f"crossover at n={n5}" if n5 is not None else "no crossover by n=1e4"
    _verdict(
        capsys, 2, ok,
        f"rho=0.9: x0=6 strictly below atom from n={n9}; "
        f"rho=0.5: {half} (informational)",
    )
    assert ok, "no n <= 1e4 with the x0=6 bound below the atom bound at rho=0.9"


# ------------------------------------------------- 3: sampler iteration targets


def test_criterion_3_sampler_iteration_targets(capsys):
    """n*(bound <= 0.1) lands in [250, 1000] for the slow sampler
    (r=2, alpha=1.1, eta*=0.25), at or under 100 for the fast one
    (r=1/2, alpha=1.5, eta*=0.5), and the two differ by more than 5x."""
    slow = isampler.sampler_curves(
        isampler.ISamplerConfig(r_exp=2.0, alpha_drift=1.1, eta_star=0.25),
        nmax=2000,
    )
    fast = isampler.sampler_curves(
        isampler.ISamplerConfig(r_exp=0.5, alpha_drift=1.5, eta_star=0.5),
        nmax=2000,
    )
    ns, nf = slow.meta["n_star"], fast.meta["n_star"]
    ok = (
        ns is not None and 250 <= ns <= 1000
        and nf is not None and nf <= 100
        and ns > 5 * nf
    )
    ratio = ns / nf if (ns and nf) else float("nan")
    _verdict(
        capsys, 3, ok,
        f"n*(r=2)={ns} in [250,1000]; n*(r=1/2)={nf} <= 100; ratio {ratio:.2f} > 5",
    )
    assert ns is not None and 250 <= ns <= 1000, ns
    assert nf is not None and nf <= 100, nf
    assert ns > 5 * nf, (ns, nf)


# ------------------------------------------------- 4: coupling-moment consistency


def test_criterion_4_coupling_moment_consistency(capsys):
    """Monte Carlo E[sum_{k<=sigma} r(k)] from (10, 0) under the ordered
    coupling at rho = 0.5 stays within 3 standard errors of the certified
    moment U0(10) = 19, and the atom coupling fires at the first C x C visit
    in every replica."""
    cfg = mg1.MG1Config.from_rho(0.5, x0=1)
    k = mg1.embedded_matrix(cfg)
    cert, mb, rate = mg1.certificate_for(cfg, k)
    u_bound = float(mb.u_fn(10, 0))
    stats = verify.simulate_coupling(
        k, cert, 10, 0, rate, replicas=10_000, seed=42
    )
    first_visit_freq = float(np.mean(stats.n_at_coupling == 1))
    ok = (
        abs(u_bound - 19.0) < 1e-9
        and stats.censored == 0
        and stats.mean_r <= u_bound + 3.0 * stats.se_r
        and first_visit_freq == 1.0
    )
    _verdict(
        capsys, 4, ok,
        f"mean sum_r {stats.mean_r:.4f} <= {u_bound:.4f} + 3*{stats.se_r:.4f}; "
        f"first-visit coupling frequency {first_visit_freq:.4f}; "
        f"{stats.censored} censored of 10000",
    )
    assert abs(u_bound - 19.0) < 1e-9, u_bound
    assert stats.censored == 0
    assert stats.mean_r <= u_bound + 3.0 * stats.se_r, (stats.mean_r, stats.se_r)
    assert first_visit_freq == 1.0


# ------------------------------------------------- 5: randomized property suites


def _suite_young(cases=1200) -> int:
    rng = np.random.default_rng(1001)
    for _ in range(cases):
        yp = YoungPair(rho=rng.uniform(0.05, 0.95), p=rng.uniform(1.05, 8.0))
        u = 10.0 ** rng.uniform(-6.0, 6.0)
        v = 10.0 ** rng.uniform(-6.0, 6.0)
        lhs = float(yp.alpha_fn(u)) * float(yp.beta_fn(v))
        rhs = yp.rho * u + (1.0 - yp.rho) * v
        assert lhs <= rhs * (1.0 + 1e-9), (yp.rho, yp.p, u, v, lhs, rhs)
    return cases


def _suite_h_roundtrip(cases=1000, general=30) -> int:
    rng = np.random.default_rng(1002)
    for _ in range(cases):
        g = PhiGenerator.polynomial(
            10.0 ** rng.uniform(-1.0, 1.0), rng.uniform(1.05, 6.0)
        )
        v = 10.0 ** rng.uniform(0.0, 6.0)
        back = g.h_inv(g.h(v))
        assert abs(back - v) <= 1e-10 * max(1.0, v), (g.c, g.alpha, v, back)
    # same checks through the quadrature + bisection path
    for _ in range(general):
        c = rng.uniform(0.3, 3.0)
        alpha = rng.uniform(1.2, 5.0)
        expo = 1.0 - 1.0 / alpha
        g = PhiGenerator(
            lambda x, _c=c, _e=expo: _c * np.asarray(x, float) ** _e,
            lambda x, _c=c, _e=expo: _c * _e * np.asarray(x, float) ** (_e - 1.0),
        )
        assert not g.is_polynomial
        v = 10.0 ** rng.uniform(0.0, 5.0)
        back = g.h_inv(g.h(v))
        assert abs(back - v) <= 1e-10 * max(1.0, v), (c, alpha, v, back)
    return cases + general


def _suite_rate_class(cases=1000, window=64) -> int:
    n = np.arange(window)
    for i in range(cases):
        rng = np.random.default_rng(2000 + i)
        r = RateSequence.polynomial(
            10.0 ** rng.uniform(-2.0, 2.0), rng.uniform(1.0, 8.0)
        )
        rv = r.r_values(window)
        assert abs(rv[0] - 1.0) <= 1e-12
        assert np.all(np.diff(rv) >= -1e-12 * rv[:-1])          # non-decreasing
        lr = np.log(rv)
        ratio = lr[1:] / n[1:]
        assert np.all(np.diff(ratio) <= 1e-9 * (1.0 + np.abs(ratio[:-1])))
        assert np.all(lr[:-2] + lr[2:] - 2.0 * lr[1:-1] <= 1e-9)  # log-concave
    return cases


def _suite_m_u_brute(cases=100, kmax=200_000) -> int:
    rng = np.random.default_rng(1004)
    for _ in range(cases):
        r = RateSequence.polynomial(
            10.0 ** rng.uniform(-1.5, 1.0), rng.uniform(1.05, 4.0)
        )
        b_u = rng.uniform(1.0, 50.0)
        eps = rng.uniform(0.02, 1.0)
        got = compute_m_u(r, b_u, eps)
        rk = r.r_values(kmax)
        Rk1 = r.R_values(kmax)[1:]
        want = max(0.0, float((b_u * rk * (1.0 - eps) / eps - Rk1).max()))
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12), (b_u, eps)
    return cases


def _random_kernel(rng, n) -> DiscreteKernel:
    return DiscreteKernel(rng.dirichlet(np.ones(n), size=n))


def _random_monotone_kernel(rng, n) -> DiscreteKernel:
    cdf = np.sort(rng.uniform(size=(n, n - 1)), axis=1)
    cdf = np.sort(cdf, axis=0)[::-1]        # column sort keeps rows sorted
    full = np.hstack([np.zeros((n, 1)), cdf, np.ones((n, 1))])
    return DiscreteKernel(np.diff(full, axis=1))


def _suite_residual_stochastic(cases=1000) -> int:
    rng = np.random.default_rng(1005)
    for _ in range(cases):
        n = int(rng.integers(3, 9))
        k = _random_kernel(rng, n)
        cert = find_minorisation(k, int(rng.integers(0, n - 1)))
        q = residual_kernel(k, cert)
        assert np.all(q.rows >= 0.0)
        assert np.max(np.abs(q.rows.sum(axis=1) - 1.0)) <= 1e-10
        assert np.array_equal(q.rows[cert.x0 + 1 :], k.rows[cert.x0 + 1 :])
    return cases


def _suite_marginal_breakpoints(cases=1000) -> int:
    # the shared uniform partitions (0, 1]; summing interval widths per
    # quantile value must recover each coordinate's exact row
    rng = np.random.default_rng(1006)
    for _ in range(cases):
        n = int(rng.integers(3, 11))
        k = _random_kernel(rng, n)
        x, xp = int(rng.integers(0, n)), int(rng.integers(0, n))
        cuts = np.unique(np.concatenate([[0.0], k.cdf_row(x), k.cdf_row(xp)]))
        law_x = np.zeros(n)
        law_xp = np.zeros(n)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            law_x[k.quantile(x, hi)] += hi - lo
            law_xp[k.quantile(xp, hi)] += hi - lo
        assert np.allclose(law_x, k.rows[x], atol=1e-12)
        assert np.allclose(law_xp, k.rows[xp], atol=1e-12)
    return cases


def _suite_order_absorption(cases=1000) -> int:
    rng = np.random.default_rng(1007)
    for _ in range(cases):
        n = int(rng.integers(3, 10))
        k = _random_monotone_kernel(rng, n)
        cert = find_minorisation(k, int(rng.integers(0, n - 1)))
        q = residual_kernel(k, cert)
        x = int(rng.integers(0, n))
        xp = int(rng.integers(x, n))
        grid = np.unique(np.concatenate(
            [k.cdf_row(x), k.cdf_row(xp), q.cdf_row(x), q.cdf_row(xp), [1.0]]
        ))
        for u in grid[grid > 0.0]:
            y, yp = ordered_coupling_step(k, cert, (x, xp), float(u), residual=q)
            assert y <= yp, (x, xp, u, y, yp)
            ye, ype = ordered_coupling_step(k, cert, (x, x), float(u), residual=q)
            assert ye == ype                 # met pairs never separate
    return cases


def _suite_grid_drift() -> int:
    states = 0
    for kw in (
        dict(r_exp=2.0, alpha_drift=1.1, eta_star=0.25),
        dict(r_exp=0.5, alpha_drift=1.5, eta_star=0.5),
    ):
        for grid_n in (200, 400):
            cfg = isampler.ISamplerConfig(grid_n=grid_n, **kw)
            cert = isampler.drift_certificate(cfg)
            kernel = isampler.discretized_kernel(cfg)
            check_drift_pointwise(cert, kernel, slack=5.0 / grid_n)
            states += grid_n
    return states


def test_criterion_5_randomized_property_suites(capsys):
    """Seeded randomized suites, at or above a thousand cases apiece except
    the hundred-config M_U cross-check: the Young product inequality at 1e-9
    relative, H round trips at 1e-10, rate-class membership surrogates,
    compute_m_u against a literal 200k-term scan, residual-kernel rows
    stochastic to 1e-10, exact coupling marginals by breakpoint enumeration,
    order preservation and absorption of the shared-uniform step, and the
    sampler grid drift inequality within its discretization slack."""
    counts = {}
    failed = None
    try:
        counts["young"] = _suite_young()
        counts["roundtrip"] = _suite_h_roundtrip()
        counts["rate-class"] = _suite_rate_class()
        counts["m_u"] = _suite_m_u_brute()
        counts["residual"] = _suite_residual_stochastic()
        counts["marginal"] = _suite_marginal_breakpoints()
        counts["order"] = _suite_order_absorption()
        counts["grid-drift-states"] = _suite_grid_drift()
    except AssertionError as e:
        failed = e
    detail = "; ".join(f"{k} {v}" for k, v in counts.items())
    _verdict(capsys, 5, failed is None, detail or "first suite failed")
    if failed is not None:
        raise failed
    assert counts["young"] >= 1000 and counts["roundtrip"] >= 1000
    assert counts["rate-class"] >= 1000 and counts["m_u"] >= 100
    assert counts["residual"] >= 1000 and counts["marginal"] >= 1000
    assert counts["order"] >= 1000


# ------------------------------------------------- 6: negative controls


def _raises_with(exc, needle, fn) -> bool:
    try:
        fn()
    except exc as e:
        return needle in str(e)
    except Exception:
        return False
    return False


def test_criterion_6_negative_controls(capsys):
    """Corruption and out-of-range certificates must be refused loudly: a
    bound scaled by 0.01 fails dominance with a witness index, and lambda,
    alpha, epsilon violations raise errors naming the broken invariant."""
    cfg = mg1.MG1Config.from_rho(0.5, x0=1)
    grown, k, exact = mg1.exact_reference(cfg, nmax=60)
    curve = mg1.bound_curve(grown, nmax=60, kernel=k, pi=exact.pi)
    rep = verify.dominance_report(
        BoundCurve(n=curve.n, tv=curve.tv * 0.01), exact
    )
    corrupted_ok = (not rep.passed) and rep.first_violation_n is not None

    toy = UnivariateDriftCert(
        w0=lambda x: float(x),
        phi0=PhiGenerator.polynomial(1.0, 2.0),
        b0=2.0,
        small_set=SmallSetRegion(
            contains=lambda x: x <= 100.0, epsilon=0.5, label="toy"
        ),
        d0=100.0,
        sup_pw0_on_c=50.0,
        nu_w0=10.0,
    )
    lo, hi = admissible_lambda_interval(toy)
    lambda_ok = (
        (lo, hi) == (0.0, pytest.approx(0.8))
        and _raises_with(
            CertificateError, "outside the admissible interval",
            lambda: bivariate_from_univariate(toy, lam=0.9),
        )
    )
    alpha_ok = _raises_with(
        ConfigurationError, "outside (1, 1 + 1/r)",
        lambda: isampler.ISamplerConfig(r_exp=2.0, alpha_drift=1.5, eta_star=0.25),
    )
    epsilon_ok = _raises_with(
        CertificateError, "minorisation level",
        lambda: MinorisationCert(x0=0, epsilon=0.0, nu=np.array([1.0])),
    )

    ok = corrupted_ok and lambda_ok and alpha_ok and epsilon_ok
    _verdict(
        capsys, 6, ok,
        f"x0.01 bound refuted at n={rep.first_violation_n}; "
        f"lambda=0.9 outside ({lo:g}, {hi:g}) rejected; "
        "alpha=1.5 outside (1, 1.5) rejected; epsilon=0 rejected",
    )
    assert corrupted_ok, rep.summary()
    assert lambda_ok and alpha_ok and epsilon_ok


# ------------------------------------------------- 7: what is not asserted


def test_criterion_7_no_external_figure_values(capsys):
    """No externally published curve values are asserted anywhere in this
    suite; the constants behind such plots are not printed anywhere
    recoverable. Dominance (1), crossover ordering (2), and iteration-count
    windows (3) are the acceptance contract in their place."""
    surrogates = [
        test_criterion_1_dominance_against_exact_oracle,
        test_criterion_2_heavy_traffic_crossover,
        test_criterion_3_sampler_iteration_targets,
    ]
    ok = all(callable(t) for t in surrogates)
    _verdict(
        capsys, 7, ok,
        "no external figure values asserted; criteria 1-3 carry the contract "
        "(dominance, ordering, iteration windows)",
    )
    assert ok
