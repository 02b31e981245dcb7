"""Bound engine: constants, curves, Young interpolation."""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subgeom.bounds import (
    TV_CAP,
    BoundConstants,
    BoundCurve,
    MomentBounds,
    YoungPair,
    bound_constants,
    bound_vs_stationary,
    compute_m_u,
    f_norm_bound,
    interpolated_bound,
    tv_bound,
    tv_curve_from_scalars,
)
from subgeom.errors import CertificateError, ConfigurationError, NonTerminationError
from subgeom.rates import RateSequence


def _scalar_moments(u=4.0, b_u=2.0, b_v=None, v=None):
    v = u if v is None else v
    b_v = b_u if b_v is None else b_v
    return MomentBounds(u_fn=lambda x, xp: u, v_fn=lambda x, xp: v, b_u=b_u, b_v=b_v)


def brute_force_m_u(r: RateSequence, b_u: float, epsilon: float, kmax: int = 200_000):
    ks = np.arange(kmax)
    rv = r.r_values(kmax)
    Rv = r.R_values(kmax)
    vals = b_u * rv * (1.0 - epsilon) / epsilon - Rv[ks + 1]
    return max(0.0, float(vals.max()))


# ---------------------------------------------------------------- M_U / M_V


def test_m_u_constant_rate_closed_form():
    # constant rate: sup_k (b_u (1-eps)/eps - (k+1))_+ attained at k = 0
    r = RateSequence.constant()
    assert compute_m_u(r, 2.0, 0.5) == pytest.approx(1.0)
    # argument already negative at k = 0: positive part clamps to zero
    assert compute_m_u(r, 1.0, 0.9) == 0.0


def test_m_u_atom_collapses_to_zero():
    r = RateSequence.constant()
    assert compute_m_u(r, 5.0, 1.0) == 0.0


def test_m_u_against_brute_force_frozen_config():
    # the rho=0.5, x0=3 queue certificate
    r = RateSequence.constant()
    b_u, eps = 1.3227712905274398, 0.10673598153308973
    m = compute_m_u(r, b_u, eps)
    assert m == pytest.approx(10.070156300786847, rel=1e-12)
    assert m == pytest.approx(brute_force_m_u(r, b_u, eps), rel=1e-12)


def test_m_u_sweep_matches_brute_force():
    """Block-scan termination rule equals the definition on 100 mixed configs."""
    rng = np.random.default_rng(7)
    for i in range(100):
        if i % 2:
            r = RateSequence.polynomial(rng.uniform(0.05, 3.0), rng.uniform(1.0, 2.0))
        else:
            r = RateSequence.constant()
        b_u = rng.uniform(1.0, 50.0)
        eps = rng.uniform(0.02, 1.0)
        assert compute_m_u(r, b_u, eps) == pytest.approx(
            brute_force_m_u(r, b_u, eps), rel=1e-10, abs=1e-10
        )


def test_m_u_nontermination_guard():
    # rate growing fast enough that the scan cap trips: r admissible but with
    # b_u(1-eps)/eps so large the argmax lies beyond the cap
    r = RateSequence.polynomial(3.0, 1.05)
    with pytest.raises(NonTerminationError):
        compute_m_u(r, 1e9, 1e-7)


def test_m_v_identity():
    r = RateSequence.constant()
    mb = _scalar_moments(u=4.0, b_u=2.0, b_v=3.0)
    bc = bound_constants(r, mb, 0.25)
    assert bc.m_v == pytest.approx(3.0 * 0.75 / 0.25, rel=0, abs=0)
    assert bc.epsilon == 0.25


def test_bound_constants_reject_bad_epsilon():
    r = RateSequence.constant()
    mb = _scalar_moments()
    for eps in (0.0, -0.1, 1.5):
        with pytest.raises(CertificateError):
            bound_constants(r, mb, eps)


# ---------------------------------------------------------------- curves


def test_tv_bound_formula_and_cap():
    r = RateSequence.constant()
    mb = _scalar_moments(u=4.0, b_u=2.0)
    bc = bound_constants(r, mb, 0.5)  # M_U = 1
    assert tv_bound(mb, bc, r, 0, 0, 1) == TV_CAP  # 2*(5)/2 = 5, capped
    assert tv_bound(mb, bc, r, 0, 0, 100) == pytest.approx(2.0 * 5.0 / 101.0)


def test_curve_from_scalars_matches_pointwise():
    r = RateSequence.polynomial(1.0, 1.5)
    mb = _scalar_moments(u=7.0, b_u=3.0)
    bc = bound_constants(r, mb, 0.3)
    curve = tv_curve_from_scalars(7.0, bc.m_u, r, 50)
    for n in (1, 10, 50):
        assert curve[n - 1] == pytest.approx(tv_bound(mb, bc, r, 0, 0, n))
    assert np.all(np.diff(curve) <= 1e-15)


def test_f_norm_has_no_tv_factor():
    r = RateSequence.constant()
    mb = _scalar_moments(u=4.0, v=6.0, b_u=2.0, b_v=2.0)
    bc = bound_constants(r, mb, 0.5)
    assert f_norm_bound(mb, bc, 1, 2) == pytest.approx(6.0 + bc.m_v)


def test_csv_round_trip(tmp_path):
    curve = BoundCurve(
        n=np.arange(1, 6),
        tv=np.linspace(2.0, 0.4, 5),
        f=np.linspace(9.0, 5.0, 5),
    )
    p = tmp_path / "curve.csv"
    curve.write_csv(p)
    text = p.read_text().splitlines()
    assert text[0] == "n,bound_tv,bound_f,bound_g"
    back = np.loadtxt(p, delimiter=",", skiprows=1)
    assert np.allclose(back[:, 1], curve.tv, rtol=0, atol=0)
    assert np.isnan(back[:, 3]).all()


def test_bound_vs_stationary_averages_before_clipping(rho05):
    _, k, pi = rho05
    u_spike = 1e6
    mb = MomentBounds(
        u_fn=lambda x, xp: u_spike if max(x, xp) > 0 else 1.0,
        v_fn=lambda x, xp: 1.0,
        b_u=1.5,
        b_v=1.0,
    )
    r = RateSequence.constant()
    bc = bound_constants(r, mb, 1.0)
    curve = bound_vs_stationary(mb, bc, r, 0, pi, k.states, 10)
    # pi-average of u, not u at a clipped point
    expect_u = pi[0] * 1.0 + (1.0 - pi[0]) * u_spike
    assert curve.meta["u_avg"] == pytest.approx(expect_u, rel=1e-12)
    assert curve.tv[0] == TV_CAP


# ---------------------------------------------------------------- Young pairs


@settings(max_examples=500, deadline=None)
@given(
    rho=st.floats(0.01, 0.99),
    p=st.floats(1.01, 12.0),
    u=st.floats(1e-6, 1e6),
    v=st.floats(1e-6, 1e6),
)
def test_young_inequality(rho, p, u, v):
    yp = YoungPair(rho=rho, p=p)
    lhs = float(yp.alpha_fn(u) * yp.beta_fn(v))
    rhs = rho * u + (1.0 - rho) * v
    assert lhs <= rhs * (1.0 + 1e-9) + 1e-9


def test_young_equality_at_tangent():
    # alpha(u) beta(v) = rho u + (1-rho) v exactly when rho u = (1-rho) v / (p-1)
    yp = YoungPair(rho=0.3, p=2.0)
    u = 5.0
    v = (yp.p - 1.0) * yp.rho * u / (1.0 - yp.rho)
    lhs = float(yp.alpha_fn(u) * yp.beta_fn(v))
    assert lhs == pytest.approx(yp.rho * u + (1.0 - yp.rho) * v, rel=1e-12)


def test_young_boundaries_rejected():
    for rho, p in ((0.0, 2.0), (1.0, 2.0), (0.5, 1.0), (0.5, 0.5)):
        with pytest.raises(ConfigurationError):
            YoungPair(rho=rho, p=p)


def test_interpolated_bound_between_extremes():
    r = RateSequence.constant()
    mb = _scalar_moments(u=10.0, v=20.0, b_u=2.0, b_v=2.0)
    bc = bound_constants(r, mb, 0.5)
    yp = YoungPair(rho=0.5, p=2.0)
    g = interpolated_bound(mb, bc, r, yp, 0, 0, 50)
    # g-norm bound is the Young mix over alpha(R + M_U)
    num = 0.5 * (10.0 + bc.m_u) + 0.5 * (20.0 + bc.m_v)
    assert g == pytest.approx(num / float(yp.alpha_fn(r.R(50) + bc.m_u)))
