"""Embedded queue-length chain of the M/G/1 queue with a heavy-tailed
service time.

The chain observed at service completions moves by X_{n+1} = (X_n - 1)_+ plus
the arrivals during one service, so the transition matrix is built from the
Poisson-mixture weights

    a_j = int_0^inf e^{-lam t} (lam t)^j / j!  b(t) dt

against the service density b. The density is exponential with rate
alpha/B on [0, B] and a Pareto tail alpha B^alpha e^{-alpha} t^{-(alpha+1)}
beyond B, which integrates to one and has mean
m1 = B (1 + e^{-alpha}/(alpha-1)) / alpha.

Two coupling certificates come out of the same chain: the atom {0, 1}
(rows 0 and 1 of the matrix are identical, so epsilon = 1 exactly), and an
enlarged set {0..x0} whose minorisation level is read off the column minima.
Both feed the bound engine with the rate r == 1 and the mean-hitting-time
moment U0(x) = 1 + (1-rho)^{-1} (x - x0)_+.
"""

from __future__ import annotations

import dataclasses
import functools
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, special

from . import verify
from .bounds import (
    BoundCurve,
    MomentBounds,
    bound_constants,
    bound_vs_stationary,
)
from .errors import CertificateError, ConfigurationError, KernelError
from .monotone import DiscreteKernel, MinorisationCert, find_minorisation
from .rates import RateSequence

_A_J_ABS_TOL = 1e-13
_A_J_REL_TOL = 1e-11
_A_J_ERR_LIMIT = 1e-9
_BARRIER_LIMIT = 1e-6   # mass allowed on the repaired truncation boundary
_TRUNCATION_CAP = 6400


def _m1_closed(b_tail: float, alpha_tail: float) -> float:
    return b_tail * (1.0 + np.exp(-alpha_tail) / (alpha_tail - 1.0)) / alpha_tail


@dataclass(frozen=True)
class MG1Config:
    """Arrival rate, service-density parameters, and run geometry.

    truncation is the matrix size; the folded tail mass is monitored
    downstream and the truncation grown when it shows.
    """

    lambda_arrival: float
    b_tail: float = 1.0
    alpha_tail: float = 2.5
    x0: int = 3
    truncation: int = 400
    start_x: int = 10

    def __post_init__(self):
        if self.lambda_arrival <= 0.0:
            raise ConfigurationError(
                f"arrival rate must be positive, got {self.lambda_arrival}"
            )
        if self.b_tail <= 0.0:
            raise ConfigurationError(f"tail onset B must be positive, got {self.b_tail}")
        if self.alpha_tail <= 1.0:
            raise ConfigurationError(
                f"alpha_tail = {self.alpha_tail} <= 1 makes the service mean infinite"
            )
        if self.x0 < 0:
            raise ConfigurationError(f"x0 must be a nonnegative count, got {self.x0}")
        if self.truncation < self.x0 + 2:
            raise ConfigurationError(
                f"truncation {self.truncation} too small for x0 = {self.x0}"
            )
        if not 0 <= self.start_x < self.truncation:
            raise ConfigurationError(
                f"start_x = {self.start_x} outside the truncated state space"
            )
        if self.rho >= 1.0:
            raise ConfigurationError(
                f"traffic rho = lambda * m1 = {self.rho:.6g} >= 1; "
                "the queue is unstable"
            )

    @property
    def m1(self) -> float:
        return _m1_closed(self.b_tail, self.alpha_tail)

    @property
    def rho(self) -> float:
        return self.lambda_arrival * self.m1

    @classmethod
    def from_rho(
        cls,
        rho: float,
        alpha_tail: float = 2.5,
        b_tail: float = 1.0,
        x0: int = 3,
        truncation: Optional[int] = None,
        start_x: int = 10,
    ) -> "MG1Config":
        """Fix B and choose lambda = rho / m1; rho is the only scale-free knob."""
        if not 0.0 < rho < 1.0:
            raise ConfigurationError(f"traffic rho must lie in (0, 1), got {rho}")
        if truncation is None:
            truncation = 400 if rho < 0.7 else 800
        lam = rho / _m1_closed(b_tail, alpha_tail)
        return cls(
            lambda_arrival=lam,
            b_tail=b_tail,
            alpha_tail=alpha_tail,
            x0=x0,
            truncation=truncation,
            start_x=start_x,
        )


def service_density(cfg: MG1Config, t) -> np.ndarray:
    t = np.asarray(t, float)
    b, alpha = cfg.b_tail, cfg.alpha_tail
    body = (alpha / b) * np.exp(-(alpha / b) * t)
    tail = alpha * b**alpha * np.exp(-alpha) * np.where(t > 0, t, 1.0) ** -(alpha + 1.0)
    return np.where(t <= b, body, tail)


def service_moment_m1(cfg: MG1Config) -> float:
    """Mean service time, closed form cross-checked against quadrature."""
    closed = cfg.m1
    b, alpha = cfg.b_tail, cfg.alpha_tail
    q1, _ = integrate.quad(
        lambda t: t * (alpha / b) * np.exp(-(alpha / b) * t), 0.0, b
    )
    q2, _ = integrate.quad(
        lambda t: t * alpha * b**alpha * np.exp(-alpha) * t ** -(alpha + 1.0),
        b,
        np.inf,
    )
    quad = q1 + q2
    if abs(quad - closed) > 1e-8 * closed:
        raise KernelError(
            f"service mean mismatch: closed form {closed!r} vs quadrature {quad!r}"
        )
    return closed


@functools.lru_cache(maxsize=16)
def _mixture_cached(lam: float, b: float, alpha: float, count: int) -> np.ndarray:
    tail_scale = alpha * b**alpha * np.exp(-alpha)
    a = np.empty(count)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for j in range(count):

            def weight(t, _j=j):
                # Poisson pmf in log space; (lam t)^j overflows for j ~ hundreds
                return np.exp(
                    special.xlogy(_j, lam * t) - lam * t - special.gammaln(_j + 1.0)
                )

            def body(t):
                return weight(t) * (alpha / b) * np.exp(-(alpha / b) * t)

            def tail(t):
                return weight(t) * tail_scale * t ** -(alpha + 1.0)

            v1, e1 = integrate.quad(body, 0.0, b, epsabs=_A_J_ABS_TOL, epsrel=_A_J_REL_TOL, limit=200)
            peak = j / lam
            if peak > b:
                # split at the Poisson mode so the quadrature sees the bump
                v2a, e2a = integrate.quad(tail, b, peak, epsabs=_A_J_ABS_TOL, epsrel=_A_J_REL_TOL, limit=200)
                v2b, e2b = integrate.quad(
                    tail, peak, np.inf, epsabs=_A_J_ABS_TOL, epsrel=_A_J_REL_TOL, limit=200
                )
                v2, e2 = v2a + v2b, e2a + e2b
            else:
                v2, e2 = integrate.quad(tail, b, np.inf, epsabs=_A_J_ABS_TOL, epsrel=_A_J_REL_TOL, limit=200)
            if e1 + e2 > _A_J_ERR_LIMIT:
                raise KernelError(
                    f"a_{j} quadrature error estimate {e1 + e2:.3e} exceeds "
                    f"{_A_J_ERR_LIMIT:g}"
                )
            a[j] = v1 + v2
    a.setflags(write=False)
    return a


def poisson_mixture(cfg: MG1Config, count: int) -> np.ndarray:
    """Arrival-count weights a_0 .. a_{count-1} for one service period."""
    return _mixture_cached(cfg.lambda_arrival, cfg.b_tail, cfg.alpha_tail, count)


def embedded_matrix(cfg: MG1Config) -> DiscreteKernel:
    """Truncated transition matrix of the post-departure chain.

    The untruncated row mass is folded into the last state. That state is a
    reflecting repair, not part of the model; its occupancy is reported by
    the exact oracle as barrier mass. The fold keeps rows 0 and 1 bitwise
    identical, so the atom certificate keeps epsilon = 1 exactly.
    """
    n = cfg.truncation
    a = poisson_mixture(cfg, n)
    rows = np.zeros((n, n))
    rows[0, :] = a
    for x in range(1, n):
        rows[x, x - 1 :] = a[: n - x + 1]
    rows[:, -1] = 1.0 - rows[:, :-1].sum(axis=1)
    if (rows[:, -1] < 0.0).any():
        raise KernelError("truncation repair produced negative boundary mass")
    return DiscreteKernel(rows, states=np.arange(n))


def _lifted_moments(u0: np.ndarray, b: float, rate: RateSequence) -> MomentBounds:
    # ordered coupling on a monotone kernel: the pair moment is U0 at the max
    def at_join(x, xp):
        return float(u0[max(int(x), int(xp))])

    return MomentBounds(u_fn=at_join, v_fn=at_join, b_u=b, b_v=b, rate=rate)


def atom_certificate(cfg: MG1Config, kernel: Optional[DiscreteKernel] = None):
    """Coupling at the atom {0, 1}: epsilon = 1, nu = the common row.

    U0(x) = V0(x) = 1 + (1-rho)^{-1} (x-1)_+ is one plus the mean hitting
    time of the atom, and the one-step constant is nu(U0).
    """
    k = kernel if kernel is not None else embedded_matrix(cfg)
    if not np.array_equal(k.rows[0], k.rows[1]):
        raise KernelError("rows 0 and 1 differ; {0,1} is not an atom here")
    cert = MinorisationCert(x0=1, epsilon=1.0, nu=k.rows[0].copy())
    ratio = 1.0 / (1.0 - cfg.rho)
    u0 = 1.0 + ratio * np.maximum(k.states - 1, 0).astype(float)
    b = float(k.rows[0] @ u0)
    rate = RateSequence.constant()
    return cert, _lifted_moments(u0, b, rate), rate


def smallset_certificate(cfg: MG1Config, kernel: Optional[DiscreteKernel] = None):
    """Coupling on the enlarged set {0..x0} with column-minima minorisation.

    sup_C P U0 is bounded by 1 + (1-rho)^{-1} sum_{j>=2} (j-1) a_j (the worst
    point of C is x0 itself), and the residual constant follows as
    b_U0 = (1-eps)^{-1} (sup_C P U0 - eps nu(U0)).
    """
    if cfg.x0 < 2:
        raise ConfigurationError(
            f"enlarged small set needs x0 >= 2, got {cfg.x0}; "
            "use atom_certificate for the atom"
        )
    k = kernel if kernel is not None else embedded_matrix(cfg)
    cert = find_minorisation(k, cfg.x0)
    a = poisson_mixture(cfg, cfg.truncation)
    ratio = 1.0 / (1.0 - cfg.rho)
    u0 = 1.0 + ratio * np.maximum(k.states - cfg.x0, 0).astype(float)
    j = np.arange(a.size, dtype=float)
    sup_pu0 = 1.0 + ratio * float(((j - 1.0)[2:] * a[2:]).sum())
    nu_u0 = float(cert.nu @ u0)
    eps = cert.epsilon
    b_u0 = (sup_pu0 - eps * nu_u0) / (1.0 - eps)
    if b_u0 < 1.0:
        raise CertificateError(
            f"residual constant b_U0 = {b_u0:.6g} < 1; certificate inconsistent"
        )
    rate = RateSequence.constant()
    return cert, _lifted_moments(u0, b_u0, rate), rate


def certificate_for(cfg: MG1Config, kernel: Optional[DiscreteKernel] = None):
    """Route on x0: the atom for x0 <= 1, the enlarged set otherwise."""
    if cfg.x0 <= 1:
        return atom_certificate(cfg, kernel)
    return smallset_certificate(cfg, kernel)


def bound_curve(
    cfg: MG1Config,
    nmax: int = 10_000,
    kernel: Optional[DiscreteKernel] = None,
    pi: Optional[np.ndarray] = None,
) -> BoundCurve:
    """TV bound on ||P^n(start_x, .) - pi|| for n = 1..nmax, moments averaged
    over the numeric stationary law."""
    k = kernel if kernel is not None else embedded_matrix(cfg)
    if pi is None:
        pi = verify.stationary(k)
    cert, mb, rate = certificate_for(cfg, k)
    bc = bound_constants(rate, mb, cert.epsilon)
    curve = bound_vs_stationary(mb, bc, rate, cfg.start_x, pi, k.states, nmax)
    curve.meta.update(
        {
            "model": "mg1",
            "rho": cfg.rho,
            "lambda": cfg.lambda_arrival,
            "b_tail": cfg.b_tail,
            "alpha_tail": cfg.alpha_tail,
            "x0": cfg.x0,
            "start_x": cfg.start_x,
            "truncation": cfg.truncation,
            "coupling_set": "atom" if cfg.x0 <= 1 else f"{{0..{cfg.x0}}}",
        }
    )
    return curve


def figure_curves(configs, nmax: int = 10_000):
    """Bound curves for a batch of configs; kernels and stationary laws are
    shared between configs that differ only in x0."""
    cache = {}
    out = []
    for cfg in configs:
        key = (cfg.lambda_arrival, cfg.b_tail, cfg.alpha_tail, cfg.truncation)
        if key not in cache:
            k = embedded_matrix(cfg)
            cache[key] = (k, verify.stationary(k))
        k, pi = cache[key]
        out.append((cfg, bound_curve(cfg, nmax=nmax, kernel=k, pi=pi)))
    return out


def default_figure_configs(rhos=(0.5, 0.9), x0s=(1, 3, 6)) -> list:
    return [MG1Config.from_rho(rho, x0=x0) for rho in rhos for x0 in x0s]


def exact_reference(cfg: MG1Config, nmax: int = 200):
    """Exact TV curve with the truncation doubled until the repaired boundary
    stays below the barrier limit. Returns (possibly grown cfg, kernel, curve)."""
    c = cfg
    while True:
        k = embedded_matrix(c)
        ex = verify.exact_tv_curve(k, c.start_x, nmax)
        if ex.barrier_mass < _BARRIER_LIMIT:
            return c, k, ex
        if c.truncation * 2 > _TRUNCATION_CAP:
            raise KernelError(
                f"barrier mass {ex.barrier_mass:.3e} still visible at the "
                f"truncation cap {_TRUNCATION_CAP}"
            )
        c = dataclasses.replace(c, truncation=c.truncation * 2)
