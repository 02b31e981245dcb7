"""Ground-truth oracles: exact distances on truncated kernels and a Monte
Carlo simulator of the coupled chain.

The exact oracle is what keeps the bound engine honest: every certified curve
is compared against sum_y |P^n(x,y) - pi(y)| on the truncation, with the mass
that ever reaches the last (repair) state tracked so that truncation
artifacts cannot masquerade as dominance results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from .bounds import BoundCurve
from .errors import ConfigurationError, KernelError
from .monotone import DiscreteKernel, MinorisationCert, residual_kernel
from .rates import RateSequence

_STATIONARY_RESIDUAL_TOL = 1e-10
_DOMINANCE_SLOP = 1e-12  # the exact l1 curve may exceed the cap by rounding dust
_STEP_CAP = 10_000_000


def _reachable(adj_rows: np.ndarray, start: int) -> np.ndarray:
    n = adj_rows.shape[0]
    seen = np.zeros(n, bool)
    seen[start] = True
    frontier = [start]
    while frontier:
        nxt = np.flatnonzero(adj_rows[frontier].any(axis=0) & ~seen)
        seen[nxt] = True
        frontier = list(nxt)
    return seen


def stationary(k: DiscreteKernel) -> np.ndarray:
    """Solve pi P = pi by dense LU with a normalization row.

    Requires the truncation to be a single communicating class; otherwise the
    stationary law is not unique and the solve would silently pick one.
    """
    adj = k.rows > 0.0
    if not _reachable(adj, 0).all() or not _reachable(adj.T, 0).all():
        raise KernelError("kernel is reducible on its truncation; pi not unique")
    n = k.n
    a = k.rows.T - np.eye(n)
    a[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = linalg.solve(a, rhs)
    pi = np.maximum(pi, 0.0)
    pi /= pi.sum()
    residual = np.abs(pi @ k.rows - pi).sum()
    if residual > _STATIONARY_RESIDUAL_TOL:
        raise KernelError(f"stationary solve residual {residual:.3e} exceeds 1e-10")
    return pi


@dataclass
class ExactCurve:
    """sum_y |P^n(x, y) - pi(y)| for n = 1..nmax, plus the truncation proxy."""

    n: np.ndarray
    tv: np.ndarray
    barrier_mass: float
    pi: np.ndarray = field(repr=False)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write("n,exact_tv\n")
            for i in range(self.n.size):
                fh.write(f"{int(self.n[i])},{self.tv[i]:.17g}\n")


def exact_tv_curve(
    k: DiscreteKernel, x: int, nmax: int, pi: Optional[np.ndarray] = None
) -> ExactCurve:
    """Iterated vector-matrix products; no matrix powers are stored.

    barrier_mass = max_n P^n(x, last state): how much of the law ever sits on
    the repaired truncation boundary.
    """
    if nmax < 1:
        raise ConfigurationError(f"nmax >= 1 required, got {nmax}")
    if pi is None:
        pi = stationary(k)
    mu = np.zeros(k.n)
    mu[x] = 1.0
    tv = np.empty(nmax)
    barrier = 0.0
    for n in range(1, nmax + 1):
        mu = mu @ k.rows
        barrier = max(barrier, float(mu[-1]))
        tv[n - 1] = float(np.abs(mu - pi).sum())
    return ExactCurve(n=np.arange(1, nmax + 1), tv=tv, barrier_mass=barrier, pi=pi)


@dataclass
class DominanceReport:
    passed: bool
    margins: np.ndarray
    min_margin: float
    argmin_n: int
    first_violation_n: Optional[int]
    n: np.ndarray

    def summary(self) -> str:
        if self.passed:
            return (
                f"dominance holds on n in [{self.n[0]}, {self.n[-1]}]; "
                f"min margin {self.min_margin:.6g} at n = {self.argmin_n}"
            )
        return (
            f"dominance FAILS first at n = {self.first_violation_n} "
            f"(margin {self.min_margin:.6g} at n = {self.argmin_n})"
        )

    def write_csv(self, path, bound: np.ndarray, exact: np.ndarray):
        with open(path, "w") as fh:
            fh.write("n,bound_tv,exact_tv,margin\n")
            for i in range(self.n.size):
                fh.write(
                    f"{int(self.n[i])},{bound[i]:.17g},{exact[i]:.17g},"
                    f"{self.margins[i]:.17g}\n"
                )


def dominance_report(bound: BoundCurve, exact: ExactCurve) -> DominanceReport:
    """Pointwise bound >= exact over the common n range.

    Rounding slop of 1e-12 is tolerated so the clip-at-2 region cannot fail
    on float dust; margins are reported raw.
    """
    if bound.n.size != exact.n.size or bound.n[0] != exact.n[0]:
        raise ConfigurationError("bound and exact curves must share the same n range")
    margins = bound.tv - exact.tv
    bad = margins < -_DOMINANCE_SLOP
    min_i = int(np.argmin(margins))
    first = int(exact.n[np.argmax(bad)]) if bad.any() else None
    return DominanceReport(
        passed=not bad.any(),
        margins=margins,
        min_margin=float(margins[min_i]),
        argmin_n=int(exact.n[min_i]),
        first_violation_n=first,
        n=exact.n,
    )


@dataclass
class CouplingStats:
    """Monte Carlo output of the coupled chain, one entry per replica."""

    sum_r_at_sigma: np.ndarray    # sum_{k=0}^{sigma} r(k)
    sum_v_at_sigma: np.ndarray
    sigma: np.ndarray             # first entry time to C x C
    n_at_coupling: np.ndarray     # visits to C x C when the coin lands heads
    censored: int
    replicas: int

    @property
    def mean_r(self) -> float:
        return float(self.sum_r_at_sigma.mean())

    @property
    def se_r(self) -> float:
        return float(self.sum_r_at_sigma.std(ddof=1) / np.sqrt(self.replicas))

    @property
    def mean_v(self) -> float:
        return float(self.sum_v_at_sigma.mean())

    @property
    def se_v(self) -> float:
        return float(self.sum_v_at_sigma.std(ddof=1) / np.sqrt(self.replicas))


def _replica_generator(seed: int, replica: int) -> np.random.Generator:
    # counter-based stream: (seed, replica) fully determines the draws,
    # independent of scheduling or batch order
    return np.random.Generator(
        np.random.Philox(key=[seed, 0], counter=[0, 0, replica, 0])
    )


def _nu_quantile(nu_cdf: np.ndarray, u: float) -> int:
    return int(np.searchsorted(nu_cdf, u, side="left"))


def coupled_pair_step(
    k: DiscreteKernel,
    q: DiscreteKernel,
    cert: MinorisationCert,
    nu_cdf: np.ndarray,
    x: int,
    xp: int,
    gen: np.random.Generator,
    ordered: bool,
):
    """One transition of the coupling kernel. Returns (x, xp, coupled, visited).

    Inside C x C the epsilon-coin is drawn first; heads sends both chains to a
    common nu draw (coupled), tails moves the pair through the residual
    kernel. Outside, the raw kernel drives the pair. The ordered flavor pushes
    one shared uniform through both quantile rows; the independent flavor
    draws one uniform per chain.
    """
    if cert.in_c(x) and cert.in_c(xp):
        if gen.random() < cert.epsilon:
            y = _nu_quantile(nu_cdf, gen.random())
            return y, y, True, True
        mover = q
        visited = True
    else:
        mover = k
        visited = False
    if ordered:
        u = gen.random()
        return mover.quantile(x, u), mover.quantile(xp, u), False, visited
    return (
        mover.quantile(x, gen.random()),
        mover.quantile(xp, gen.random()),
        False,
        visited,
    )


def simulate_coupling(
    k: DiscreteKernel,
    cert: MinorisationCert,
    x: int,
    xp: int,
    rate: RateSequence,
    replicas: int,
    seed: int,
    coupling: str = "ordered",
    v_fn: Optional[Callable] = None,
    step_cap: int = _STEP_CAP,
) -> CouplingStats:
    """Run the coupled chain until the coin lands heads, replica by replica.

    Replicas exceeding step_cap are counted as censored rather than silently
    truncated; their partial sums are excluded from the moment estimates.
    """
    if coupling not in ("ordered", "independent"):
        raise ConfigurationError(f"coupling must be ordered|independent, got {coupling!r}")
    if replicas < 1:
        raise ConfigurationError("replicas >= 1 required")
    cert.validate_against(k)
    q = residual_kernel(k, cert)
    nu_cdf = np.cumsum(cert.nu)
    nu_cdf /= nu_cdf[-1]
    ordered = coupling == "ordered"
    v = v_fn if v_fn is not None else (lambda a, b: 1.0)

    sr = np.empty(replicas)
    sv = np.empty(replicas)
    sig = np.full(replicas, -1, dtype=np.int64)
    nvis = np.zeros(replicas, dtype=np.int64)
    censored = 0
    keep = np.ones(replicas, bool)

    for rep in range(replicas):
        gen = _replica_generator(seed, rep)
        cx, cxp = int(x), int(xp)
        run_r = 0.0
        run_v = 0.0
        visits = 0
        t = 0
        sigma_seen = False
        while True:
            run_r += rate.r(t)
            run_v += float(v(cx, cxp))
            if not sigma_seen and cert.in_c(cx) and cert.in_c(cxp):
                sr[rep] = run_r
                sv[rep] = run_v
                sig[rep] = t
                sigma_seen = True
            nx, nxp, coupled, visited = coupled_pair_step(
                k, q, cert, nu_cdf, cx, cxp, gen, ordered
            )
            if visited:
                visits += 1
            if coupled:
                nvis[rep] = visits
                break
            cx, cxp = nx, nxp
            t += 1
            if t > step_cap:
                censored += 1
                keep[rep] = False
                if not sigma_seen:
                    sr[rep] = np.nan
                    sv[rep] = np.nan
                break

    return CouplingStats(
        sum_r_at_sigma=sr[keep & (sig >= 0)],
        sum_v_at_sigma=sv[keep & (sig >= 0)],
        sigma=sig[keep & (sig >= 0)],
        n_at_coupling=nvis[keep],
        censored=censored,
        replicas=int((keep & (sig >= 0)).sum()),
    )


def coupled_marginal_counts(
    k: DiscreteKernel,
    cert: MinorisationCert,
    x: int,
    xp: int,
    nsteps: int,
    replicas: int,
    seed: int,
    coupling: str = "ordered",
) -> np.ndarray:
    """Empirical law of the first coordinate after nsteps coupled transitions.

    The coupling preserves the single-chain marginals exactly, so these counts
    should be multinomial(P^nsteps(x, .)) regardless of the flavor.
    """
    q = residual_kernel(k, cert)
    nu_cdf = np.cumsum(cert.nu)
    nu_cdf /= nu_cdf[-1]
    ordered = coupling == "ordered"
    counts = np.zeros(k.n, dtype=np.int64)
    for rep in range(replicas):
        gen = _replica_generator(seed, rep)
        cx, cxp = int(x), int(xp)
        coupled = False
        for _ in range(nsteps):
            if coupled:
                cx = k.quantile(cx, gen.random())
                cxp = cx
                continue
            cx, cxp, coupled, _ = coupled_pair_step(
                k, q, cert, nu_cdf, cx, cxp, gen, ordered
            )
        counts[cx] += 1
    return counts
