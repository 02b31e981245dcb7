"""Stochastically monotone kernels on totally ordered finite state spaces.

Indices 0..N-1 are the order: index 0 is the bottom of the space, and small
sets are bottom segments C = {0..x0}. The labels attached to the indices can
be anything (queue lengths, reversed grid midpoints); all structure lives in
the index order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CertificateError, ConfigurationError, KernelError

_ROWSUM_TOL = 1e-12
_RESIDUAL_NEG_TOL = 1e-12


class DiscreteKernel:
    """Row-stochastic matrix over an ordered finite truncation.

    rows[x, y] = P(x, y). Row sums must be 1 within 1e-12 (builders repair
    truncation mass into the last column before constructing). CDFs are
    normalized so each row's final value is exactly 1.0, which makes the
    quantile function total on (0, 1].
    """

    def __init__(self, rows, states: Optional[np.ndarray] = None):
        rows = np.asarray(rows, float)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise KernelError(f"kernel must be square, got shape {rows.shape}")
        if rows.min() < 0.0:
            x, y = np.unravel_index(int(np.argmin(rows)), rows.shape)
            raise KernelError(f"negative entry P({x},{y}) = {rows[x, y]}")
        sums = rows.sum(axis=1)
        bad = np.abs(sums - 1.0) > _ROWSUM_TOL
        if np.any(bad):
            x = int(np.argmax(bad))
            raise KernelError(f"row {x} sums to {sums[x]!r}, outside 1 +- 1e-12")
        self.rows = rows
        self.n = rows.shape[0]
        self.states = np.arange(self.n) if states is None else np.asarray(states)
        if self.states.shape != (self.n,):
            raise KernelError("states must have one label per row")
        cdf = np.cumsum(rows, axis=1)
        self._cdf = cdf / cdf[:, -1:]

    def cdf_row(self, x: int) -> np.ndarray:
        return self._cdf[x]

    def quantile(self, x: int, u: float) -> int:
        """G^-(x, u) = min{y : P(x, [0..y]) >= u} for u in (0, 1]."""
        if not 0.0 < u <= 1.0:
            raise ConfigurationError(f"quantile needs u in (0, 1], got {u}")
        return int(np.searchsorted(self._cdf[x], u, side="left"))

    def quantile_many(self, x: int, us: np.ndarray) -> np.ndarray:
        us = np.asarray(us, float)
        if us.size and (us.min() <= 0.0 or us.max() > 1.0):
            raise ConfigurationError("quantile needs u in (0, 1]")
        return np.searchsorted(self._cdf[x], us, side="left")


@dataclass(frozen=True)
class MinorisationCert:
    """One-step pointwise minorisation P(x, .) >= epsilon * nu on C = {0..x0}."""

    x0: int
    epsilon: float
    nu: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.x0 < 0:
            raise CertificateError(f"small-set threshold must be >= 0, got x0={self.x0}")
        if not 0.0 < self.epsilon <= 1.0:
            raise CertificateError(
                f"minorisation level must lie in (0, 1], got epsilon={self.epsilon}"
            )
        nu = np.asarray(self.nu, float)
        if nu.min() < 0.0:
            raise CertificateError("nu must be nonnegative")
        if abs(nu.sum() - 1.0) > _ROWSUM_TOL:
            raise CertificateError(f"nu must sum to 1 within 1e-12, got {nu.sum()!r}")

    def in_c(self, x: int) -> bool:
        return x <= self.x0

    def validate_against(self, k: DiscreteKernel):
        block = k.rows[: self.x0 + 1, :]
        deficit = block - self.epsilon * self.nu[None, :]
        if deficit.min() < -_RESIDUAL_NEG_TOL:
            x, y = np.unravel_index(int(np.argmin(deficit)), deficit.shape)
            raise KernelError(
                f"minorisation fails at P({x},{y}): deficit {deficit[x, y]:.3e}"
            )


def check_monotone(k: DiscreteKernel):
    """Stochastic monotonicity: x -> P(x, [0..a]) non-increasing for every a.

    Returns (True, None) or (False, (x, x+1, a)) with the first adjacent
    violation in scan order.
    """
    cdf = k._cdf
    diff = cdf[1:, :] - cdf[:-1, :]          # must be <= 0 everywhere
    viol = diff > 1e-12
    if not viol.any():
        return True, None
    x, a = np.unravel_index(int(np.argmax(viol)), viol.shape)
    return False, (int(x), int(x) + 1, int(a))


def find_minorisation(k: DiscreteKernel, x0: int) -> MinorisationCert:
    """Maximal one-step pointwise minorisation for C = {0..x0}: column minima."""
    if x0 < 0 or x0 >= k.n:
        raise ConfigurationError(f"x0={x0} outside state range [0, {k.n - 1}]")
    colmin = k.rows[: x0 + 1, :].min(axis=0)
    eps = float(colmin.sum())
    if eps <= 0.0:
        raise KernelError(
            f"no one-step minorisation on C = {{0..{x0}}}: column minima vanish"
        )
    if eps >= 1.0 - 1e-12:
        # rows on C identical up to rounding dust (atom); a literal eps of
        # 1 - ulp would make the residual weight 0/0
        eps = 1.0
        nu = colmin / colmin.sum()
    else:
        nu = colmin / eps
    return MinorisationCert(x0=x0, epsilon=eps, nu=nu)


def residual_kernel(k: DiscreteKernel, cert: MinorisationCert) -> DiscreteKernel:
    """Q = (P - eps*nu)/(1-eps) on C; rows off C pass through unchanged.

    The coupled chain only consults Q on C x C, so the passthrough keeps the
    result a square kernel without inventing values anywhere it is used.
    For eps = 1 the residual is nu itself on C.
    """
    cert.validate_against(k)
    rows = k.rows.copy()
    c = cert.x0 + 1
    if cert.epsilon == 1.0:
        rows[:c, :] = cert.nu[None, :]
    else:
        q = (k.rows[:c, :] - cert.epsilon * cert.nu[None, :]) / (1.0 - cert.epsilon)
        if q.min() < -_RESIDUAL_NEG_TOL:
            x, y = np.unravel_index(int(np.argmin(q)), q.shape)
            raise KernelError(
                f"residual row {x} has entry {q[x, y]:.3e} beyond -1e-12: "
                "minorisation violated"
            )
        q = np.maximum(q, 0.0)
        q /= q.sum(axis=1, keepdims=True)
        rows[:c, :] = q
    return DiscreteKernel(rows, states=k.states)


def ordered_coupling_step(
    k: DiscreteKernel,
    cert: MinorisationCert,
    pair,
    u: float,
    residual: Optional[DiscreteKernel] = None,
):
    """One step of the order-preserving coupling: common uniform through the
    quantile rows, residual rows inside C x C, raw rows outside.

    Passing the precomputed residual kernel avoids rebuilding it per step.
    Order preservation: for monotone kernels the quantile map is monotone in
    x, so x <= x' implies G(x, u) <= G(x', u); monotone P implies monotone Q.
    """
    x, xp = pair
    if cert.in_c(x) and cert.in_c(xp):
        q = residual if residual is not None else residual_kernel(k, cert)
        return q.quantile(x, u), q.quantile(xp, u)
    return k.quantile(x, u), k.quantile(xp, u)
