"""Convergence-bound engine: the constants M_U/M_V and the three bound families.

Given a minorisation level epsilon on a coupling set, hitting-time moment
bounds (u_fn, v_fn) for the coupled chain, and a subgeometric rate r, the
engine produces:

  * total-variation curves   min(2, 2*(u_fn + M_U) / (R(n) + M_U)),
  * f-norm constants          v_fn + M_V,
  * interpolated g-norm curves combining both through a Young pair.

The factor 2 in the TV family is deliberate. The coupling argument bounds
the l1 distance by E[(f(X_n) + f(X'_n)) * (1-eps)^{N_{n-1}}] with f == 1, so
the distance in the sup_{|g|<=1} convention (mass 2 between mutually singular
laws) picks up f(x) + f(x') = 2 against the supermartingale estimate
E[(1-eps)^{N_{n-1}}] <= (u_fn + M_U)/(R(n) + M_U). Dropping the 2 would give
a half-total-variation bound that an exact l1 oracle refutes. The f-norm and
g-norm families need no factor: their admissibility contracts
(f(x) + f(x') <= v_fn + M_V, and g(x) + g(x') <= beta(v_fn + M_V)) absorb it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CertificateError, ConfigurationError, NonTerminationError
from .rates import RateSequence

TV_CAP = 2.0  # sup_{|g|<=1} |mu(g) - nu(g)| between probability laws

_MU_SCAN_CAP = 10_000_000
_MU_SCAN_BLOCK = 4096
_MU_CONSECUTIVE = 10


@dataclass(frozen=True)
class YoungPair:
    """Interpolation pair (alpha, beta) with alpha(u)*beta(v) <= rho*u + (1-rho)*v.

    Power family: alpha(u) = (p*rho*u)**(1/p), beta(v) = (p*(1-rho)*v/(p-1))**((p-1)/p).
    The family degenerates at p = 1 and at rho in {0, 1}, so those are rejected.
    """

    rho: float
    p: float
    alpha_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)
    beta_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ConfigurationError(
                f"Young pair needs rho strictly inside (0,1), got rho={self.rho}"
            )
        if not self.p > 1.0:
            raise ConfigurationError(f"power-family Young pair needs p > 1, got p={self.p}")
        p, rho = self.p, self.rho
        object.__setattr__(
            self, "alpha_fn", lambda u: (p * rho * np.asarray(u, float)) ** (1.0 / p)
        )
        object.__setattr__(
            self,
            "beta_fn",
            lambda v: (p * (1.0 - rho) * np.asarray(v, float) / (p - 1.0)) ** ((p - 1.0) / p),
        )


@dataclass(frozen=True)
class MomentBounds:
    """Certified bounds on the coupled-chain hitting moments.

    u_fn(x, x') bounds E[sum_{k=0}^{sigma} r(k)]  (so u_fn >= r(0) = 1),
    v_fn(x, x') bounds E[sum_{k=0}^{sigma} v(X_k, X'_k)],
    b_u / b_v are the one-step suprema of the same moments over the coupling set.
    Routes that derive the rate alongside the moments attach it.
    """

    u_fn: Callable
    v_fn: Callable
    b_u: float
    b_v: float
    rate: Optional["RateSequence"] = None

    def __post_init__(self):
        if self.b_u < 1.0:
            raise CertificateError(f"b_u >= 1 required (moments count r(0)=1), got {self.b_u}")
        if self.b_v < 0.0:
            raise CertificateError(f"b_v >= 0 required, got {self.b_v}")


@dataclass(frozen=True)
class BoundConstants:
    m_u: float
    m_v: float
    epsilon: float
    b_u: float
    b_v: float

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise CertificateError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.m_u < 0 or not np.isfinite(self.m_u):
            raise CertificateError(f"M_U must be finite and nonnegative, got {self.m_u}")
        expected_mv = self.b_v * (1.0 - self.epsilon) / self.epsilon
        if self.m_v != expected_mv:
            raise CertificateError(
                f"M_V must equal b_v*(1-eps)/eps = {expected_mv}, got {self.m_v}"
            )


def compute_m_u(r: RateSequence, b_u: float, epsilon: float) -> float:
    """sup_k (b_u * r(k) * (1-eps)/eps - R(k+1))_+ by literal scan.

    Termination: once r(k)/R(k+1) has dropped below eps/(b_u*(1-eps)) and the
    term has been non-positive for 10 consecutive k, no later k can win
    (subgeometric rates have r(k)/R(k+1) -> 0). Hard cap 1e7 guards against
    inputs outside the class.
    """
    if not 0.0 < epsilon <= 1.0:
        raise CertificateError(f"epsilon must lie in (0, 1], got {epsilon}")
    if b_u < 1.0:
        raise CertificateError(f"b_u >= 1 required, got {b_u}")
    if epsilon == 1.0:
        return 0.0
    coeff = b_u * (1.0 - epsilon) / epsilon
    ratio_gate = epsilon / (b_u * (1.0 - epsilon))

    best = 0.0
    nonpos_run = 0
    k0 = 0
    while k0 < _MU_SCAN_CAP:
        k1 = min(k0 + _MU_SCAN_BLOCK, _MU_SCAN_CAP)
        Rs = r.R_values(k1)            # R(0..k1)
        rk = r.r_values(k1)[k0:k1]
        terms = coeff * rk - Rs[k0 + 1 : k1 + 1]
        best = max(best, float(terms.max()))
        ratios = rk / Rs[k0 + 1 : k1 + 1]
        # replay the stated rule exactly: both conditions on the running scan
        for i in range(terms.size):
            nonpos_run = nonpos_run + 1 if terms[i] <= 0.0 else 0
            if nonpos_run >= _MU_CONSECUTIVE and ratios[i] < ratio_gate:
                return best
        k0 = k1
    raise NonTerminationError(
        f"M_U scan exceeded k = {_MU_SCAN_CAP}; rate does not look subgeometric"
    )


def bound_constants(r: RateSequence, mb: MomentBounds, epsilon: float) -> BoundConstants:
    m_u = compute_m_u(r, mb.b_u, epsilon)
    m_v = mb.b_v * (1.0 - epsilon) / epsilon
    return BoundConstants(m_u=m_u, m_v=m_v, epsilon=epsilon, b_u=mb.b_u, b_v=mb.b_v)


def tv_bound(mb: MomentBounds, bc: BoundConstants, r: RateSequence, x, xp, n: int) -> float:
    """l1 total-variation bound between P^n(x, .) and P^n(x', .)."""
    if n < 1:
        raise ConfigurationError(f"bounds are stated for n >= 1, got n={n}")
    u = float(mb.u_fn(x, xp))
    return min(TV_CAP, 2.0 * (u + bc.m_u) / (r.R(n) + bc.m_u))


def f_norm_bound(mb: MomentBounds, bc: BoundConstants, x, xp) -> float:
    """Constant-in-n f-norm bound, valid for any f with f(x)+f(x') <= v_fn+M_V."""
    return float(mb.v_fn(x, xp)) + bc.m_v


def interpolated_bound(
    mb: MomentBounds, bc: BoundConstants, r: RateSequence, yp: YoungPair, x, xp, n: int
) -> float:
    """g-norm bound for g with g(x)+g(x') <= beta(v_fn+M_V); contract documented,
    not enforced pointwise."""
    if n < 1:
        raise ConfigurationError(f"bounds are stated for n >= 1, got n={n}")
    u = float(mb.u_fn(x, xp))
    v = float(mb.v_fn(x, xp))
    num = yp.rho * (u + bc.m_u) + (1.0 - yp.rho) * (v + bc.m_v)
    return num / float(yp.alpha_fn(r.R(n) + bc.m_u))


@dataclass
class BoundCurve:
    """Per-n bound values plus the constants that produced them."""

    n: np.ndarray
    tv: np.ndarray
    f: Optional[np.ndarray] = None
    g: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("n,bound_tv,bound_f,bound_g\n")
        f = self.f if self.f is not None else np.full_like(self.tv, np.nan)
        g = self.g if self.g is not None else np.full_like(self.tv, np.nan)
        for i in range(self.n.size):
            buf.write(f"{int(self.n[i])},{self.tv[i]:.17g},{f[i]:.17g},{g[i]:.17g}\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_csv())


def tv_curve_from_scalars(u: float, m_u: float, r: RateSequence, nmax: int) -> np.ndarray:
    """Vectorized TV curve for a fixed numerator u over n = 1..nmax."""
    Rn = r.R_values(nmax)[1:]
    return np.minimum(TV_CAP, 2.0 * (u + m_u) / (Rn + m_u))


def bound_vs_stationary(
    mb: MomentBounds,
    bc: BoundConstants,
    r: RateSequence,
    x,
    pi: np.ndarray,
    states,
    nmax: int,
    young: Optional[YoungPair] = None,
) -> BoundCurve:
    """Bound on the distance to stationarity, integrating the pair bound over pi.

    The moments are averaged first and the clip applied after; averaging the
    clipped values would only sharpen, but the unclipped average is the form
    with a closed expression against the stationary law, and it still
    dominates.
    """
    pi = np.asarray(pi, float)
    if abs(pi.sum() - 1.0) > 1e-10:
        raise ConfigurationError(f"pi must sum to 1 within 1e-10, got {pi.sum()!r}")
    u_avg = float(sum(w * float(mb.u_fn(x, xp)) for w, xp in zip(pi, states) if w != 0.0))
    v_avg = float(sum(w * float(mb.v_fn(x, xp)) for w, xp in zip(pi, states) if w != 0.0))
    ns = np.arange(1, nmax + 1)
    Rn = r.R_values(nmax)[1:]
    tv = np.minimum(TV_CAP, 2.0 * (u_avg + bc.m_u) / (Rn + bc.m_u))
    f = np.full(nmax, v_avg + bc.m_v)
    g = None
    if young is not None:
        num = young.rho * (u_avg + bc.m_u) + (1.0 - young.rho) * (v_avg + bc.m_v)
        g = num / young.alpha_fn(Rn + bc.m_u)
    return BoundCurve(
        n=ns, tv=tv, f=f, g=g,
        meta={
            "u_avg": u_avg, "v_avg": v_avg, "m_u": bc.m_u, "m_v": bc.m_v,
            "epsilon": bc.epsilon, "b_u": bc.b_u, "b_v": bc.b_v,
        },
    )
