"""Independence sampler on (0, 1] with uniform target and proposal density
q(x) = (r+1) x^r.

The proposal undersamples the region near 0, and the importance ratio
w(x) = q(x)/pi(x) = (r+1) x^r orders the space: states with small w reject
more and linger. The chain is stochastically monotone for that order, and
W0(x) = K(w(x)) = x^(-r alpha) is a drift function for

    phi0(v) = (1 - psi(eta*)) phi(v) - int (u ^ eta*) K(u) dpsi(u),
    phi(v)  = (r+1) v^(1 - 1/alpha),

valid off the small set C = [x*, 1], x* = psi(eta*) = (eta*/(r+1))^(1/r),
with minorisation level eps = eta* (1 - psi(eta*)). The exponent window
1 < alpha < 1 + 1/r keeps both the drift integral and the moment integral
int u K dpsi finite.

The rate sequence is generated from the scaled power family
c_eff v^(1 - 1/alpha) with c_eff = (1 - psi(eta*)) (r+1): the displayed phi0
differs from it by a negative additive constant, which stays in the pointwise
drift inequality but is dropped for rate generation. Dropping it only slows
the generated rate, so every emitted bound remains valid.

Everything analytic here is a number computed by quadrature at 1e-12
tolerance; closed forms exist for the integrals and are used as test
oracles, not trusted inputs.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .bounds import BoundCurve, bound_constants, tv_curve_from_scalars
from .drift import SmallSetRegion, UnivariateDriftCert, moments_from_monotone_drift
from .errors import CertificateError, ConfigurationError, KernelError
from .monotone import DiscreteKernel
from .rates import PhiGenerator

_QUAD_ABS_TOL = 1e-13
_QUAD_REL_TOL = 1e-12
_QUAD_ERR_LIMIT = 1e-9
_TV_TARGET = 0.1


@dataclass(frozen=True)
class ISamplerConfig:
    r_exp: float
    alpha_drift: float
    eta_star: float
    grid_n: int = 200

    def __post_init__(self):
        if self.r_exp <= 0.0:
            raise ConfigurationError(f"proposal exponent r must be > 0, got {self.r_exp}")
        if not 1.0 < self.alpha_drift < 1.0 + 1.0 / self.r_exp:
            raise ConfigurationError(
                f"alpha = {self.alpha_drift} outside (1, 1 + 1/r) = "
                f"(1, {1.0 + 1.0 / self.r_exp:g}); the drift and moment "
                "integrals are finite only inside that window"
            )
        if not 0.0 < self.eta_star < self.r_exp + 1.0:
            raise ConfigurationError(
                f"eta* must lie in (0, r+1) = (0, {self.r_exp + 1.0:g}), "
                f"got {self.eta_star}"
            )
        if self.grid_n < 1:
            raise ConfigurationError(f"grid_n must be positive, got {self.grid_n}")
        c_eff = effective_phi_coeff(self)
        clipped = integral_clipped_k(self)
        if not c_eff > clipped:
            raise CertificateError(
                "drift generator not positive at 1: (1 - psi(eta*)) * phi(1) = "
                f"{c_eff:.6g} <= int (u ^ eta*) K dpsi = {clipped:.6g}"
            )


def psi(cfg: ISamplerConfig, eta: float) -> float:
    """Mass the target puts outside the sublevel set at eta, clipped to [0, 1]."""
    if eta < 0.0:
        raise ConfigurationError(f"psi is defined for eta >= 0, got {eta}")
    return min(1.0, (eta / (cfg.r_exp + 1.0)) ** (1.0 / cfg.r_exp))


def proposal_density(cfg: ISamplerConfig, x) -> np.ndarray:
    x = np.asarray(x, float)
    return (cfg.r_exp + 1.0) * x**cfg.r_exp


def k_weight(cfg: ISamplerConfig, u) -> np.ndarray:
    """K(u) = (u/(r+1))^(-alpha); W0 is K composed with the importance ratio."""
    u = np.asarray(u, float)
    return (u / (cfg.r_exp + 1.0)) ** -cfg.alpha_drift


def x_star(cfg: ISamplerConfig) -> float:
    return psi(cfg, cfg.eta_star)


def minorisation_level(cfg: ISamplerConfig) -> float:
    return cfg.eta_star * (1.0 - psi(cfg, cfg.eta_star))


def effective_phi_coeff(cfg: ISamplerConfig) -> float:
    return (1.0 - psi(cfg, cfg.eta_star)) * (cfg.r_exp + 1.0)


def _quad(fn, lo, hi, what, points=None) -> float:
    kwargs = dict(epsabs=_QUAD_ABS_TOL, epsrel=_QUAD_REL_TOL, limit=400)
    if points is not None:
        kwargs["points"] = points
    val, err = integrate.quad(fn, lo, hi, **kwargs)
    if err > _QUAD_ERR_LIMIT:
        raise KernelError(f"{what}: quadrature error estimate {err:.3e} too large")
    return val


def _weighted_k(u: float, r: float, alpha: float) -> float:
    # K(u) * psi'(u) with both powers expanded
    s = u / (r + 1.0)
    return s**-alpha * s ** (1.0 / r - 1.0) / (r * (r + 1.0))


@functools.lru_cache(maxsize=64)
def _integral_u_k(r: float, alpha: float) -> float:
    return _quad(
        lambda u: u * _weighted_k(u, r, alpha),
        0.0,
        r + 1.0,
        "int u K dpsi",
    )


@functools.lru_cache(maxsize=64)
def _integral_clipped_k(r: float, alpha: float, eta: float) -> float:
    return _quad(
        lambda u: min(u, eta) * _weighted_k(u, r, alpha),
        0.0,
        r + 1.0,
        "int (u ^ eta*) K dpsi",
        points=[eta],
    )


def integral_u_k(cfg: ISamplerConfig) -> float:
    """int_0^(r+1) u K(u) dpsi(u): the mean of W0 after an accepted move."""
    return _integral_u_k(cfg.r_exp, cfg.alpha_drift)


def integral_clipped_k(cfg: ISamplerConfig) -> float:
    return _integral_clipped_k(cfg.r_exp, cfg.alpha_drift, cfg.eta_star)


def nu_w0_mean(cfg: ISamplerConfig) -> float:
    """Mean of W0 under the minorising measure (target restricted to C)."""
    xs = x_star(cfg)
    ra = cfg.r_exp * cfg.alpha_drift
    return _quad(lambda y: y**-ra, xs, 1.0, "nu(W0)") / (1.0 - xs)


def sup_pw0_on_c(cfg: ISamplerConfig) -> float:
    """One-step mean of W0 from anywhere in C: accepted mass contributes
    int u K dpsi, rejections at worst hold the pre-move value K(eta*)."""
    return integral_u_k(cfg) + float(k_weight(cfg, cfg.eta_star))


def drift_certificate(cfg: ISamplerConfig) -> UnivariateDriftCert:
    xs = x_star(cfg)
    eps = minorisation_level(cfg)
    c_eff = effective_phi_coeff(cfg)
    shift = integral_clipped_k(cfg)
    alpha = cfg.alpha_drift
    ra = cfg.r_exp * alpha
    expo = 1.0 - 1.0 / alpha

    phi0 = PhiGenerator(
        lambda v: c_eff * np.asarray(v, float) ** expo - shift,
        lambda v: c_eff * expo * np.asarray(v, float) ** (expo - 1.0),
    )
    rate_phi = PhiGenerator.polynomial(c_eff, alpha)
    d0 = xs**-ra
    sup_pw0 = sup_pw0_on_c(cfg)
    # one step from C: P W0 <= sup_C P W0, and v - phi0(v) >= 1 - phi0(1) on C
    b0 = sup_pw0 - 1.0 + (c_eff - shift)
    return UnivariateDriftCert(
        w0=lambda x: float(x) ** -ra,
        phi0=phi0,
        b0=b0,
        small_set=SmallSetRegion(
            contains=lambda x: xs <= x <= 1.0,
            epsilon=eps,
            label=f"[{xs:.6g}, 1]",
        ),
        d0=d0,
        sup_pw0_on_c=sup_pw0,
        nu_w0=nu_w0_mean(cfg),
        sup_phi_w0_on_c=c_eff * d0**expo,
        rate_phi=rate_phi,
    )


def sampler_curves(cfg: ISamplerConfig, nmax: int = 2000) -> BoundCurve:
    """TV bound curve for a pair started inside the small set (u_fn = 1 there).

    The stationary mean of W0 is infinite whenever r*alpha >= 1, so there is
    no finite moment to average against the target; the within-C start is the
    quantity the certificate actually controls. Reports
    n* = min{n : bound <= 0.1} in the metadata.
    """
    cert = drift_certificate(cfg)
    mb = moments_from_monotone_drift(cert, join=min)
    rate = mb.rate
    bc = bound_constants(rate, mb, cert.epsilon)
    tv = tv_curve_from_scalars(1.0, bc.m_u, rate, nmax)
    ns = np.arange(1, nmax + 1)
    hit = np.flatnonzero(tv <= _TV_TARGET)
    n_star = int(ns[hit[0]]) if hit.size else None
    c_eff = effective_phi_coeff(cfg)
    return BoundCurve(
        n=ns,
        tv=tv,
        meta={
            "model": "isampler",
            "r_exp": cfg.r_exp,
            "alpha_drift": cfg.alpha_drift,
            "eta_star": cfg.eta_star,
            "x_star": x_star(cfg),
            "epsilon": cert.epsilon,
            "b_u": mb.b_u,
            "m_u": bc.m_u,
            "n_star": n_star,
            "tv_target": _TV_TARGET,
            "start": "pair inside small set (u_fn = 1)",
            "rate_family": f"polynomial(c={c_eff:.12g}, alpha={cfg.alpha_drift:g})",
            "rate_note": (
                "rate generated from the scaled power family; the negative "
                "constant stays in the pointwise drift inequality"
            ),
        },
    )


def grid_states(cfg: ISamplerConfig) -> np.ndarray:
    """Cell midpoints in descending x, so index order = reversed importance
    order and the small set [x*, 1] is a bottom segment of indices."""
    n = cfg.grid_n
    return 1.0 - (np.arange(n) + 0.5) / n


def grid_smallset_index(cfg: ISamplerConfig) -> int:
    """Largest index whose midpoint still lies in [x*, 1]."""
    inside = grid_states(cfg) >= x_star(cfg)
    if not inside.any():
        raise ConfigurationError("grid too coarse: no midpoint falls in the small set")
    return int(np.flatnonzero(inside)[-1])


def discretized_kernel(cfg: ISamplerConfig) -> DiscreteKernel:
    """Finite verification stand-in: cell-averaged acceptance moves plus the
    rejection mass on the diagonal.

    Acceptance from x into a cell integrates q(y) min(1, (x/y)^r) exactly:
    the antiderivative is y^(r+1) below x and (r+1) x^r y above it. Rows are
    checked stochastic to 1e-10 before rescaling to machine-exact sums.
    """
    if cfg.grid_n < 100:
        raise ConfigurationError(
            f"verification grid needs grid_n >= 100, got {cfg.grid_n}"
        )
    n = cfg.grid_n
    r = cfg.r_exp
    mids = grid_states(cfg)
    hi = 1.0 - np.arange(n) / n          # cell j = (lo[j], hi[j]], descending
    lo = 1.0 - (np.arange(n) + 1.0) / n

    def accept_mass(x: float) -> np.ndarray:
        below = np.minimum(hi, x)        # portion of each cell with y <= x
        below_lo = np.minimum(lo, x)
        part1 = below ** (r + 1.0) - below_lo ** (r + 1.0)
        above = np.maximum(lo, x)        # portion with y > x
        above_hi = np.maximum(hi, x)
        part2 = (r + 1.0) * x**r * (above_hi - above)
        return part1 + part2

    rows = np.empty((n, n))
    for i in range(n):
        acc = accept_mass(float(mids[i]))
        total = float(acc.sum())
        if total > 1.0 + 1e-10:
            raise KernelError(
                f"acceptance mass {total!r} from x = {mids[i]:.6g} exceeds 1"
            )
        acc[i] += max(0.0, 1.0 - total)  # rejection keeps the chain in place
        s = float(acc.sum())
        if abs(s - 1.0) > 1e-10:
            raise KernelError(f"grid row {i} sums to {s!r}, outside 1 +- 1e-10")
        rows[i] = acc / s
    return DiscreteKernel(rows, states=mids)
