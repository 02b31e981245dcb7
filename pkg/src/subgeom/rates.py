"""Subgeometric rate sequences and the phi-calculus that generates them.

A rate sequence r is admissible when r(0) = 1, r is non-decreasing, and
log r(n) / n decreases to zero (slower than every geometric rate). Such
sequences arise from concave drift generators phi via

    H_phi(v) = integral_1^v dx / phi(x),
    r_phi(n) = phi(H_phi^{-1}(n)) / phi(H_phi^{-1}(0)).

The polynomial family phi(v) = c * v**(1 - 1/alpha) admits closed forms:
H_phi^{-1}(t) = (1 + c*t/alpha)**alpha and r_phi(n) = (1 + c*n/alpha)**(alpha-1).
Everything else goes through adaptive quadrature and bracketed bisection.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .errors import CertificateError, ConfigurationError

# numeric contracts, stated once
_H_QUAD_ABSTOL = 1e-12
_ROUNDTRIP_RTOL = 1e-10
_PHI_GRID = np.logspace(0.0, 8.0, 160)


class PhiGenerator:
    """A concave drift generator phi on [1, inf).

    Membership requirements (phi positive at 1, increasing, concave,
    derivative vanishing at infinity) can only be sample-tested for
    user-supplied functions; violations on the test grid raise
    CertificateError rather than being silently accepted.
    """

    def __init__(self, fn, dfn, *, c=None, alpha=None, _skip_checks=False):
        self.fn = fn
        self.dfn = dfn
        self.c = c
        self.alpha = alpha
        self.is_polynomial = c is not None
        if not _skip_checks and not self.is_polynomial:
            self._grid_check()

    @classmethod
    def polynomial(cls, c: float, alpha: float) -> "PhiGenerator":
        """phi(v) = c * v**(1 - 1/alpha); alpha = 1 gives constant phi = c."""
        if c <= 0:
            raise ConfigurationError(f"polynomial phi needs c > 0, got c={c}")
        if alpha < 1:
            raise ConfigurationError(f"polynomial phi needs alpha >= 1, got alpha={alpha}")
        expo = 1.0 - 1.0 / alpha
        return cls(
            lambda v: c * np.asarray(v, float) ** expo,
            lambda v: c * expo * np.asarray(v, float) ** (expo - 1.0),
            c=float(c),
            alpha=float(alpha),
            _skip_checks=True,
        )

    def _grid_check(self):
        v = _PHI_GRID
        fv = np.asarray(self.fn(v), float)
        dv = np.asarray(self.dfn(v), float)
        if not fv[0] > 0:
            raise CertificateError(f"phi(1) = {fv[0]} must be positive")
        if np.any(dv <= 0):
            bad = v[np.argmax(dv <= 0)]
            raise CertificateError(f"phi' must stay positive; phi'({bad:g}) <= 0")
        if np.any(np.diff(dv) > 1e-9 * dv[:-1]):
            i = int(np.argmax(np.diff(dv) > 1e-9 * dv[:-1]))
            raise CertificateError(
                f"phi' must be non-increasing (concavity); rises at v={v[i]:g}"
            )
        # finite-grid surrogate for phi'(v) -> 0
        if not dv[-1] < 0.5 * dv[0]:
            raise CertificateError(
                "phi' does not decay on [1, 1e8]; generator not accepted as concave-to-flat"
            )

    def __call__(self, v):
        return self.fn(v)

    def h(self, v: float) -> float:
        """H_phi(v) = integral_1^v dx/phi(x), v >= 1."""
        if v < 1.0:
            raise ConfigurationError(f"H_phi domain is v >= 1, got {v}")
        if self.is_polynomial:
            c, a = self.c, self.alpha
            return a / c * (v ** (1.0 / a) - 1.0)
        val, _ = integrate.quad(lambda x: 1.0 / self.fn(x), 1.0, v,
                                epsabs=_H_QUAD_ABSTOL, limit=200)
        return val

    def h_inv(self, t: float) -> float:
        """Inverse of h; closed form for the polynomial family, else bisection.

        h is strictly increasing, so bisection with a doubling upper bracket
        is unconditionally safe.
        """
        if t < 0:
            raise ConfigurationError(f"H_phi^-1 domain is t >= 0, got {t}")
        if self.is_polynomial:
            c, a = self.c, self.alpha
            return (1.0 + c * t / a) ** a
        if t == 0.0:
            return 1.0
        lo, hi = 1.0, 2.0
        while self.h(hi) < t:
            lo, hi = hi, hi * 2.0
            if hi > 1e300:
                raise ConfigurationError("H_phi^-1 bracket expansion overflow")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.h(mid) < t:
                lo = mid
            else:
                hi = mid
            if hi - lo <= _ROUNDTRIP_RTOL * max(1.0, hi):
                break
        return 0.5 * (lo + hi)


class RateSequence:
    """Memoized subgeometric rate r with cumulative sums R(n) = sum_{k<n} r(k).

    Values are filled in order into a growable table, so R(n) is O(1)
    amortized and curve evaluation for all n <= N costs one pass. The table
    is append-only; concurrent readers see a consistent prefix.
    """

    def __init__(self, fn, label: str = "user"):
        self._fn = fn
        self.label = label
        self._r = np.empty(256)
        self._R = np.empty(257)
        self._R[0] = 0.0
        self._filled = 0
        if not math.isclose(float(fn(0)), 1.0, rel_tol=0, abs_tol=1e-12):
            raise CertificateError(f"rate sequence must have r(0) = 1, got {fn(0)}")

    @classmethod
    def constant(cls) -> "RateSequence":
        return cls(lambda n: np.ones_like(np.asarray(n, float)), label="constant")

    @classmethod
    def polynomial(cls, c: float, alpha: float) -> "RateSequence":
        """r(n) = (1 + c*n/alpha)**(alpha - 1), the phi-polynomial closed form."""
        if c <= 0 or alpha < 1:
            raise ConfigurationError(
                f"polynomial rate needs c > 0 and alpha >= 1, got c={c}, alpha={alpha}"
            )
        return cls(
            lambda n: (1.0 + c * np.asarray(n, float) / alpha) ** (alpha - 1.0),
            label=f"polynomial(c={c:g}, alpha={alpha:g})",
        )

    @classmethod
    def from_table(cls, values) -> "RateSequence":
        vals = np.asarray(values, float)
        if vals.ndim != 1 or vals.size == 0:
            raise ConfigurationError("rate table must be a nonempty 1-d sequence")
        if np.any(np.diff(vals) < 0):
            raise CertificateError("rate table must be non-decreasing")

        def fn(n):
            idx = np.asarray(n)
            if np.any(idx >= vals.size):
                raise ConfigurationError(
                    f"rate table has {vals.size} entries; asked for n={np.max(idx)}"
                )
            return vals[idx]

        return cls(fn, label="table")

    def _grow(self, n: int):
        while self._filled <= n:
            if self._filled >= self._r.size:
                r2 = np.empty(self._r.size * 2)
                R2 = np.empty(self._r.size * 2 + 1)
                r2[: self._filled] = self._r[: self._filled]
                R2[: self._filled + 1] = self._R[: self._filled + 1]
                self._r, self._R = r2, R2
            k0, k1 = self._filled, min(self._r.size, n + 1)
            ks = np.arange(k0, k1)
            rk = np.asarray(self._fn(ks), float)
            self._r[k0:k1] = rk
            self._R[k0 + 1 : k1 + 1] = self._R[k0] + np.cumsum(rk)
            self._filled = k1

    def r(self, n: int) -> float:
        self._grow(int(n))
        return float(self._r[int(n)])

    def R(self, n: int) -> float:
        if n == 0:
            return 0.0
        self._grow(int(n) - 1)
        return float(self._R[int(n)])

    def r_values(self, nmax: int) -> np.ndarray:
        """r(0..nmax-1) as one array."""
        self._grow(int(nmax) - 1)
        return self._r[: int(nmax)].copy()

    def R_values(self, nmax: int) -> np.ndarray:
        """R(0..nmax) as one array (length nmax+1)."""
        self._grow(int(nmax) - 1)
        return self._R[: int(nmax) + 1].copy()


def rate_from_phi(g: PhiGenerator) -> RateSequence:
    """r_phi(n) = phi(H_phi^{-1}(n)) / phi(H_phi^{-1}(0))."""
    if g.is_polynomial:
        return RateSequence.polynomial(g.c, g.alpha)
    phi1 = float(g.fn(1.0))

    def fn(n):
        ns = np.atleast_1d(np.asarray(n, float))
        out = np.array([float(g.fn(g.h_inv(t))) / phi1 for t in ns])
        return out if np.ndim(n) else out[0]

    return RateSequence(fn, label="phi-generated")
