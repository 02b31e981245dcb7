"""Embedded queue-length chain: mixture weights, certificates, references.

Expected constants were frozen from an independent prototype (closed forms
plus scipy quadrature at 1e-12) before this module was written.
"""

import numpy as np
import pytest

from subgeom import mg1, verify
from subgeom.bounds import bound_constants
from subgeom.errors import ConfigurationError, KernelError

LAM_05 = 1.1851449205516007
LAM_09 = 2.1332608569928815
M1 = 0.42188933296637304
A_05 = [
    0.6769555510637463,
    0.21630846740316417,
    0.06929619110622709,
    0.02280742841934552,
    0.00803306690999929,
    0.003158168348743227,
]


# ---------------------------------------------------------------- config


def test_arrival_rate_from_utilisation():
    cfg = mg1.MG1Config.from_rho(0.5)
    assert cfg.m1 == pytest.approx(M1, rel=1e-15)
    assert cfg.lambda_arrival == pytest.approx(LAM_05, rel=1e-14)
    assert cfg.rho == pytest.approx(0.5, rel=1e-14)
    cfg9 = mg1.MG1Config.from_rho(0.9)
    assert cfg9.lambda_arrival == pytest.approx(LAM_09, rel=1e-14)
    assert cfg9.truncation == 800  # heavier traffic gets the wider window


def test_config_rejections():
    with pytest.raises(ConfigurationError):
        mg1.MG1Config.from_rho(1.0)  # unstable
    with pytest.raises(ConfigurationError):
        mg1.MG1Config(lambda_arrival=1.0, b_tail=1.0, alpha_tail=1.0,
                      x0=3, truncation=100, start_x=0)  # infinite mean service
    with pytest.raises(ConfigurationError):
        mg1.MG1Config(lambda_arrival=-0.5, b_tail=1.0, alpha_tail=2.5,
                      x0=3, truncation=100, start_x=0)
    with pytest.raises(ConfigurationError):
        mg1.MG1Config(lambda_arrival=0.5, b_tail=1.0, alpha_tail=2.5,
                      x0=3, truncation=4, start_x=0)  # truncation < x0 + 2


def test_service_density_shape():
    cfg = mg1.MG1Config.from_rho(0.5)
    ts = np.array([0.2, 0.9999, 1.0001, 3.0])
    vals = mg1.service_density(cfg, ts)
    a, b = cfg.alpha_tail, cfg.b_tail
    assert vals[0] == pytest.approx((a / b) * np.exp(-a * 0.2))
    # density continuous across the body/tail splice at t = b
    assert vals[1] == pytest.approx(vals[2], rel=1e-3)
    assert vals[3] == pytest.approx(a * np.exp(-a) * 3.0 ** -(a + 1.0))


def test_service_mean_quadrature_agreement():
    cfg = mg1.MG1Config.from_rho(0.5)
    assert mg1.service_moment_m1(cfg) == pytest.approx(M1, rel=1e-15)


# ---------------------------------------------------------------- mixture / matrix


def test_mixture_weights_frozen(rho05):
    cfg, _, _ = rho05
    a = mg1.poisson_mixture(cfg, 6)
    assert np.allclose(a, A_05, rtol=1e-10, atol=0)


def test_mixture_is_a_probability_prefix(rho05):
    cfg, _, _ = rho05
    a = mg1.poisson_mixture(cfg, 400)
    assert np.all(a >= 0)
    assert a.sum() < 1.0
    # a_j inherits the j**-(alpha+1) service tail; the 400-term deficit is
    # what the matrix folds into the barrier state
    assert 1.0 - a.sum() < 1e-7


def test_embedded_matrix_structure(rho05):
    cfg, k, _ = rho05
    rows = k.rows
    n = cfg.truncation
    assert rows.shape == (n, n)
    assert np.array_equal(rows[0], rows[1])  # post-departure atom at {0, 1}
    # skip-free downward: from x the chain cannot fall below x - 1
    for x in (2, 5, 17):
        assert np.all(rows[x, : x - 1] == 0.0)
    sums = rows.sum(axis=1)
    assert np.allclose(sums, 1.0, atol=1e-12)


def test_embedded_matrix_monotone(rho05):
    from subgeom.monotone import check_monotone

    _, k, _ = rho05
    ok, witness = check_monotone(k)
    assert ok, witness


# ---------------------------------------------------------------- certificates


def test_atom_certificate_frozen(rho05):
    cfg, k, _ = rho05
    cert, mb, rate = mg1.atom_certificate(cfg, k)
    assert cert.epsilon == 1.0
    assert cert.x0 == 1
    assert mb.b_u == pytest.approx(1.353890004780267, rel=1e-12)
    assert rate.r(17) == 1.0
    bc = bound_constants(rate, mb, cert.epsilon)
    assert bc.m_u == 0.0  # atom: no waiting for the coin
    # pair moment joins at the larger queue length
    assert mb.u_fn(10, 0) == pytest.approx(1.0 + 2.0 * 9.0)
    assert mb.u_fn(0, 10) == mb.u_fn(10, 0)


def test_smallset_certificates_frozen(rho05):
    cfg, k, _ = rho05
    cert3, mb3, _ = mg1.smallset_certificate(cfg, k)
    assert cert3.epsilon == pytest.approx(0.10673598153308973, rel=1e-12)
    assert mb3.b_u == pytest.approx(1.3227712905274398, rel=1e-12)
    r = mg1.certificate_for(cfg, k)[2]
    bc3 = bound_constants(r, mb3, cert3.epsilon)
    assert bc3.m_u == pytest.approx(10.070156300786847, rel=1e-12)

    cfg6 = mg1.MG1Config.from_rho(0.5, x0=6)
    cert6, mb6, r6 = mg1.smallset_certificate(cfg6, k)
    assert cert6.epsilon == pytest.approx(0.00659929509751783, rel=1e-12)
    assert mb6.b_u == pytest.approx(1.3399087055842764, rel=1e-12)
    bc6 = bound_constants(r6, mb6, cert6.epsilon)
    assert bc6.m_u == pytest.approx(200.69824700414472, rel=1e-12)


def test_certificate_routing(rho05):
    cfg, k, _ = rho05
    for x0 in (0, 1):
        cert, _, _ = mg1.certificate_for(
            mg1.MG1Config.from_rho(0.5, x0=x0), k
        )
        assert cert.epsilon == 1.0
    cert, _, _ = mg1.certificate_for(cfg, k)
    assert cert.epsilon < 1.0


def test_smallset_needs_room(rho05):
    _, k, _ = rho05
    with pytest.raises(ConfigurationError):
        mg1.smallset_certificate(mg1.MG1Config.from_rho(0.5, x0=1), k)


# ---------------------------------------------------------------- curves / exact


def test_stationary_mean_frozen(rho05):
    _, k, pi = rho05
    assert float(pi @ np.arange(len(pi))) == pytest.approx(1.2562411676835183, rel=1e-10)


def test_bound_curve_meta_and_monotonicity(rho05):
    cfg, k, pi = rho05
    curve = mg1.bound_curve(cfg, nmax=500, kernel=k, pi=pi)
    assert curve.meta["rho"] == pytest.approx(0.5)
    assert curve.meta["coupling_set"] == "{0..3}"
    assert curve.meta["u_avg"] == pytest.approx(15.21117944608442, rel=1e-10)
    assert np.all(np.diff(curve.tv) <= 0)
    assert curve.tv[0] == 2.0


def test_exact_reference_barrier(rho05):
    cfg, _, _ = rho05
    grown, k, exact = mg1.exact_reference(cfg, nmax=200)
    assert grown.truncation == cfg.truncation  # 400 already suffices
    assert exact.barrier_mass < 1e-6
    assert exact.barrier_mass == pytest.approx(8.06e-8, rel=0.05)
    assert exact.tv[0] > exact.tv[-1]
    # exact curve is a genuine l1 distance: trapped below 2
    assert np.all(exact.tv <= 2.0)


def test_exact_reference_grows_truncation():
    cfg = mg1.MG1Config.from_rho(0.5, truncation=12, start_x=8)
    grown, k, exact = mg1.exact_reference(cfg, nmax=60)
    assert grown.truncation > 12
    assert exact.barrier_mass < 1e-6
