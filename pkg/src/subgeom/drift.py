"""Drift certificates and their conversion into hitting-moment bounds.

Three routes produce MomentBounds for the coupled chain:

  * a genuinely bivariate drift certificate (pair function W, generator phi),
  * a univariate certificate lifted to pairs by W(x,x') = W0(x) + W0(x') - 1
    with a scaled generator lambda*phi0 (valid when phi0(d0) > b0),
  * a univariate certificate on a stochastically monotone kernel, lifted
    through the ordered coupling as U(x,x') = U0(x join x').

All three share the same transformation constant r_phi(1)/phi(1): one unit of
drift buys one unit of rate mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .bounds import MomentBounds
from .errors import CertificateError
from .monotone import DiscreteKernel, MinorisationCert
from .rates import PhiGenerator, RateSequence, rate_from_phi


@dataclass(frozen=True)
class SmallSetRegion:
    """Continuous-space stand-in for a discrete MinorisationCert: membership
    predicate plus the certified minorisation level."""

    contains: Callable = field(repr=False)
    epsilon: float = 0.0
    label: str = "region"

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise CertificateError(
                f"minorisation level must lie in (0, 1], got epsilon={self.epsilon}"
            )

    def in_c(self, x) -> bool:
        return bool(self.contains(x))


SmallSet = Union[MinorisationCert, SmallSetRegion]


def _epsilon_of(small_set: SmallSet) -> float:
    return small_set.epsilon


@dataclass(frozen=True)
class UnivariateDriftCert:
    """P W0 <= W0 - phi0(W0) + b0 * 1_C, with the plug-in suprema supplied.

    sup_pw0_on_c, nu_w0, and (when needed) sup_phi_w0_on_c are numbers, not
    functions: suprema over abstract spaces are not computable generically,
    so analytic constructions must integrate them out themselves.

    rate_phi, when given, generates the rate sequence and the transformation
    constant in place of phi0; phi0 always remains the generator used in the
    pointwise drift check. This is how a certificate with an additive
    constant folded into phi0 can still ride a closed-form rate family.
    """

    w0: Callable = field(repr=False)
    phi0: PhiGenerator = field(repr=False)
    b0: float = 0.0
    small_set: SmallSet = None
    d0: float = 1.0
    sup_pw0_on_c: float = None
    nu_w0: float = None
    sup_phi_w0_on_c: Optional[float] = None
    rate_phi: Optional[PhiGenerator] = None

    def __post_init__(self):
        if self.b0 < 0:
            raise CertificateError(f"b0 >= 0 required, got {self.b0}")
        if self.d0 < 1.0:
            raise CertificateError(f"d0 = inf off-C W0 must be >= 1, got {self.d0}")
        if self.sup_pw0_on_c is None or self.nu_w0 is None:
            raise CertificateError(
                "certificate must supply sup_C P W0 and nu(W0) as numbers"
            )
        if self.nu_w0 < 1.0:
            raise CertificateError(f"nu(W0) >= 1 required (W0 >= 1), got {self.nu_w0}")

    @property
    def epsilon(self) -> float:
        return _epsilon_of(self.small_set)

    def generator(self) -> PhiGenerator:
        return self.rate_phi if self.rate_phi is not None else self.phi0

    def in_c(self, x) -> bool:
        return self.small_set.in_c(x)

    def residual_mean(self) -> float:
        """Mean of W0 after one residual-kernel step from the worst point of C."""
        eps = self.epsilon
        if eps == 1.0:
            out = self.nu_w0
        else:
            num = self.sup_pw0_on_c - eps * self.nu_w0
            if num < 0.0:
                raise CertificateError(
                    f"negative residual mass: sup_C P W0 = {self.sup_pw0_on_c} "
                    f"< eps * nu(W0) = {eps * self.nu_w0}"
                )
            out = num / (1.0 - eps)
        if out < 1.0:
            raise CertificateError(
                f"residual mean of W0 is {out} < 1; W0 >= 1 makes this impossible"
            )
        return out


@dataclass(frozen=True)
class BivariateDriftCert:
    """Coupled-chain drift P_pair W <= W - phi(W) off C x C, with
    sup_{C x C} P_pair W supplied."""

    w: Callable = field(repr=False)
    phi: PhiGenerator = field(repr=False)
    sup_pw_on_cc: float = None
    small_set: SmallSet = None
    sup_w_on_cc: Optional[float] = None

    def __post_init__(self):
        if self.sup_pw_on_cc is None:
            raise CertificateError("certificate must supply sup_{CxC} P W as a number")
        if self.sup_pw_on_cc < 1.0:
            raise CertificateError(
                f"sup_{{CxC}} P W >= 1 required (W >= 1), got {self.sup_pw_on_cc}"
            )

    @property
    def epsilon(self) -> float:
        return _epsilon_of(self.small_set)

    def in_cc(self, x, xp) -> bool:
        return self.small_set.in_c(x) and self.small_set.in_c(xp)

    def sup_phi_w_on_cc(self) -> float:
        """sup over C x C of phi(W); phi increasing, so sup W suffices."""
        if self.sup_w_on_cc is not None:
            return float(self.phi(self.sup_w_on_cc))
        if isinstance(self.small_set, MinorisationCert):
            idx = range(self.small_set.x0 + 1)
            return max(float(self.phi(self.w(x, xp))) for x in idx for xp in idx)
        raise CertificateError(
            "sup_{CxC} W missing: supply sup_w_on_cc for non-discrete small sets"
        )


def _ratio(phi: PhiGenerator, rate: RateSequence) -> float:
    return rate.r(1) / float(phi(1.0))


def moments_from_bivariate_drift(cert: BivariateDriftCert) -> MomentBounds:
    """Pair drift to pair moments:
    u = 1 + (r_phi(1)/phi(1)) (W - 1) off C x C, v = sup phi(W) + W off C x C."""
    rate = rate_from_phi(cert.phi)
    ratio = _ratio(cert.phi, rate)
    sup_phi_w = cert.sup_phi_w_on_cc()

    def u_fn(x, xp):
        if cert.in_cc(x, xp):
            return 1.0
        return 1.0 + ratio * (float(cert.w(x, xp)) - 1.0)

    def v_fn(x, xp):
        if cert.in_cc(x, xp):
            return sup_phi_w
        return sup_phi_w + float(cert.w(x, xp))

    b_u = 1.0 + ratio * (cert.sup_pw_on_cc - 1.0)
    b_v = sup_phi_w + cert.sup_pw_on_cc
    return MomentBounds(u_fn=u_fn, v_fn=v_fn, b_u=b_u, b_v=b_v, rate=rate)


def admissible_lambda_interval(cert: UnivariateDriftCert):
    phi0_d0 = float(cert.phi0(cert.d0))
    if not phi0_d0 > cert.b0:
        raise CertificateError(
            f"lift requires phi0(d0) > b0, got phi0({cert.d0:g}) = {phi0_d0:g} "
            f"<= b0 = {cert.b0:g}"
        )
    return 0.0, 1.0 - cert.b0 / phi0_d0


def bivariate_from_univariate(
    cert: UnivariateDriftCert, lam: Optional[float] = None
) -> BivariateDriftCert:
    """Lift W(x,x') = W0(x) + W0(x') - 1 with generator lam * phi0.

    lam defaults to the midpoint of the admissible interval so runs are
    reproducible without tuning.
    """
    lo, hi = admissible_lambda_interval(cert)
    if lam is None:
        lam = 0.5 * hi
    if not lo < lam < hi:
        raise CertificateError(
            f"lambda = {lam} outside the admissible interval ({lo:g}, {hi:g})"
        )
    g = cert.phi0
    if g.is_polynomial:
        scaled = PhiGenerator.polynomial(lam * g.c, g.alpha)
    else:
        scaled = PhiGenerator(
            lambda v, _g=g, _l=lam: _l * np.asarray(_g.fn(v), float),
            lambda v, _g=g, _l=lam: _l * np.asarray(_g.dfn(v), float),
            _skip_checks=True,  # scaling by lam in (0,1) preserves class membership
        )

    eps = cert.epsilon
    resid = cert.residual_mean()
    if eps == 1.0:
        sup_pw = 2.0 * cert.nu_w0 - 1.0
    else:
        sup_pw = 2.0 * resid - 1.0

    return BivariateDriftCert(
        w=lambda x, xp: float(cert.w0(x)) + float(cert.w0(xp)) - 1.0,
        phi=scaled,
        sup_pw_on_cc=sup_pw,
        small_set=cert.small_set,
        # sup over CxC of W0(x)+W0(x')-1, from d0 = sup_C W0
        sup_w_on_cc=2.0 * cert.d0 - 1.0,
    )


def check_drift_pointwise(
    cert: UnivariateDriftCert, kernel: DiscreteKernel, slack: float = 0.0
):
    """P W0 <= W0 - phi0(W0) + b0 1_C + slack, exhaustively on a finite kernel.

    Raises with the worst offending state; the slack parameter exists for
    discretized continuous kernels whose cells smear the inequality.
    """
    w0_vec = np.array([float(cert.w0(s)) for s in kernel.states])
    pw0 = kernel.rows @ w0_vec
    in_c = np.array([bool(cert.in_c(s)) for s in kernel.states])
    rhs = w0_vec - np.asarray(cert.phi0(w0_vec), float) + cert.b0 * in_c + slack
    gap = pw0 - rhs
    if np.any(gap > 0.0):
        i = int(np.argmax(gap))
        raise CertificateError(
            f"drift inequality fails at state {kernel.states[i]!r}: "
            f"P W0 = {pw0[i]:.6g} exceeds allowance by {gap[i]:.3e}"
        )


def moments_from_monotone_drift(
    cert: UnivariateDriftCert,
    kernel: Optional[DiscreteKernel] = None,
    slack: float = 0.0,
    join: Callable = max,
) -> MomentBounds:
    """Univariate drift on a monotone kernel to pair moments via the ordered
    coupling: U(x,x') = U0(x join x'), V likewise.

    join is the order's maximum; pass min when larger labels sit lower in
    the order (reversed parameterizations).
    """
    if kernel is not None:
        check_drift_pointwise(cert, kernel, slack)
    g = cert.generator()
    rate = rate_from_phi(g)
    ratio = _ratio(g, rate)
    resid = cert.residual_mean()

    sup_phi_w0 = cert.sup_phi_w0_on_c
    if sup_phi_w0 is None:
        # phi increasing, so sup_C phi(W0) = phi(sup_C W0) = phi(d0)
        sup_phi_w0 = float(g(cert.d0))

    def u0(x):
        if cert.in_c(x):
            return 1.0
        return 1.0 + ratio * (float(cert.w0(x)) - 1.0)

    def v0(x):
        if cert.in_c(x):
            return sup_phi_w0
        return sup_phi_w0 + float(cert.w0(x))

    b_u = 1.0 + ratio * (resid - 1.0)
    b_v = sup_phi_w0 + resid
    return MomentBounds(
        u_fn=lambda x, xp: u0(join(x, xp)),
        v_fn=lambda x, xp: v0(join(x, xp)),
        b_u=b_u,
        b_v=b_v,
        rate=rate,
    )
