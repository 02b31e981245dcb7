"""Command-line front door.

Subcommands: rates, bound, mg1, isampler, verify, render. Each accepts flags
and (where it makes sense) a TOML config file; flags override config values,
which override SUBGEOM_* environment variables. Artifacts are CSV curves,
JSON metadata sidecars (written next to each artifact as <name>.meta.json),
and optional SVG overlays. Runs are deterministic given the config, seed
included; exit status is nonzero exactly when a declared check fails or an
input is rejected.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import isampler as isampler_mod
from . import mg1 as mg1_mod
from . import verify as verify_mod
from .bounds import (
    BoundCurve,
    MomentBounds,
    YoungPair,
    bound_constants,
    bound_vs_stationary,
    tv_curve_from_scalars,
)
from .drift import check_drift_pointwise
from .errors import ConfigurationError, SubgeomError
from .monotone import DiscreteKernel, find_minorisation
from .rates import RateSequence
from .svg import render_svg


def _env(name: str, default=None):
    return os.environ.get(f"SUBGEOM_{name}", default)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _write_meta(artifact_path: Path, meta: dict):
    side = artifact_path.with_name(artifact_path.name + ".meta.json")
    with open(side, "w") as fh:
        json.dump(_jsonable(meta), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _resolve_out(args, name: str) -> Path:
    out_dir = args.out_dir or _env("OUT_DIR") or "."
    p = Path(name)
    if not p.is_absolute():
        p = Path(out_dir) / p
    if not p.parent.is_dir():
        raise ConfigurationError(f"output directory {p.parent} does not exist")
    if not os.access(p.parent, os.W_OK):
        raise ConfigurationError(f"output directory {p.parent} is not writable")
    return p


def _load_toml(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file {path} not found")
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(f"config parse error in {path}: {e}")


def _seed(args, cfg: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    if "seed" in cfg:
        return int(cfg["seed"])
    return int(_env("SEED", 0))


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        return max(1, args.threads)
    return max(1, int(_env("THREADS", 1)))


def _rate_from_spec(family: str, c, alpha) -> RateSequence:
    if family == "constant":
        return RateSequence.constant()
    if family == "polynomial":
        if c is None or alpha is None:
            raise ConfigurationError("polynomial rate needs both c and alpha")
        return RateSequence.polynomial(float(c), float(alpha))
    raise ConfigurationError(f"unknown rate family {family!r}")


# ---------------------------------------------------------------- rates


def _cmd_rates(args) -> int:
    r = _rate_from_spec(args.family, args.c, args.alpha)
    out = _resolve_out(args, args.out)
    rv = r.r_values(args.nmax + 1)
    Rv = r.R_values(args.nmax)
    with open(out, "w") as fh:
        fh.write("n,r,R\n")
        for n in range(args.nmax + 1):
            fh.write(f"{n},{rv[n]:.17g},{Rv[n]:.17g}\n")
    _write_meta(out, {"family": args.family, "c": args.c, "alpha": args.alpha,
                      "nmax": args.nmax})
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------- bound


def _cmd_bound(args) -> int:
    r = _rate_from_spec(args.rate_family, args.c, args.alpha)
    b_v = args.b_v if args.b_v is not None else args.b_u
    v = args.v if args.v is not None else args.u
    mb = MomentBounds(
        u_fn=lambda x, xp: args.u, v_fn=lambda x, xp: v, b_u=args.b_u, b_v=b_v
    )
    bc = bound_constants(r, mb, args.epsilon)
    ns = np.arange(1, args.nmax + 1)
    tv = tv_curve_from_scalars(args.u, bc.m_u, r, args.nmax)
    f = None
    g = None
    if args.v is not None:
        f = np.full(args.nmax, v + bc.m_v)
    if args.young_rho is not None:
        yp = YoungPair(rho=args.young_rho, p=args.young_p)
        num = yp.rho * (args.u + bc.m_u) + (1.0 - yp.rho) * (v + bc.m_v)
        g = num / yp.alpha_fn(r.R_values(args.nmax)[1:] + bc.m_u)
    curve = BoundCurve(n=ns, tv=tv, f=f, g=g)
    out = _resolve_out(args, args.out)
    curve.write_csv(out)
    _write_meta(out, {
        "u": args.u, "v": v, "b_u": args.b_u, "b_v": b_v,
        "epsilon": args.epsilon, "m_u": bc.m_u, "m_v": bc.m_v,
        "rate_family": args.rate_family, "c": args.c, "alpha": args.alpha,
    })
    print(f"wrote {out}  (M_U = {bc.m_u:.6g}, M_V = {bc.m_v:.6g})")
    return 0


# ---------------------------------------------------------------- mg1


def _parse_x0_list(raw) -> list:
    if isinstance(raw, (list, tuple)):
        vals = [int(v) for v in raw]
    else:
        vals = [int(tok) for tok in str(raw).replace("atom", "1").split(",") if tok]
    if not vals:
        raise ConfigurationError("no x0 values given")
    return vals


def _mg1_configs_from(args, cfg: dict):
    m = cfg.get("mg1", {})
    run = cfg.get("run", {})
    rho = args.rho if args.rho is not None else m.get("rho")
    lam = args.lambda_arrival if args.lambda_arrival is not None else m.get("lambda_arrival")
    alpha = args.alpha if args.alpha is not None else m.get("alpha_tail", 2.5)
    b_tail = args.b if args.b is not None else m.get("b_tail", 1.0)
    x = args.x if args.x is not None else m.get("x", 10)
    trunc = args.truncation if args.truncation is not None else m.get("truncation")
    x0s = _parse_x0_list(args.x0 if args.x0 is not None else m.get("x0", 3))
    nmax = int(args.nmax if args.nmax is not None else run.get("nmax", 10_000))

    def build(x0: int) -> mg1_mod.MG1Config:
        if rho is not None:
            return mg1_mod.MG1Config.from_rho(
                float(rho), alpha_tail=float(alpha), b_tail=float(b_tail),
                x0=x0, truncation=trunc, start_x=int(x),
            )
        if lam is None:
            raise ConfigurationError("mg1 needs either rho or lambda_arrival")
        return mg1_mod.MG1Config(
            lambda_arrival=float(lam), b_tail=float(b_tail), alpha_tail=float(alpha),
            x0=x0, truncation=trunc if trunc is not None else 400, start_x=int(x),
        )

    return [build(x0) for x0 in x0s], nmax


def _x0_tag(x0: int) -> str:
    return "atom" if x0 <= 1 else f"x0={x0}"


def _cmd_mg1(args) -> int:
    cfg = _load_toml(args.config) if args.config else {}
    run = cfg.get("run", {})
    outputs = cfg.get("outputs", {})
    configs, nmax = _mg1_configs_from(args, cfg)
    want_exact = args.exact or bool(run.get("exact", False))
    exact_nmax = int(
        args.exact_nmax if args.exact_nmax is not None else run.get("exact_nmax", 200)
    )
    svg_name = args.svg or outputs.get("svg")
    prefix = outputs.get("prefix")

    exact = None
    if want_exact:
        base, k, exact = mg1_mod.exact_reference(configs[0], nmax=exact_nmax)
        configs = [dataclasses.replace(base, x0=c.x0) for c in configs]
        pi = exact.pi
    else:
        base = configs[0]
        k = mg1_mod.embedded_matrix(base)
        pi = verify_mod.stationary(k)

    def one(c):
        return mg1_mod.bound_curve(c, nmax=nmax, kernel=k, pi=pi)

    nthreads = _threads(args)
    if nthreads > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            curves = list(pool.map(one, configs))
    else:
        curves = [one(c) for c in configs]

    if prefix is None and not (args.out and len(configs) == 1):
        prefix = f"mg1_rho{base.rho:g}"

    labels = [_x0_tag(c.x0) for c in configs]
    failures = 0
    for c, curve in zip(configs, curves):
        name = args.out if prefix is None else f"{prefix}_{_x0_tag(c.x0).replace('=', '')}.csv"
        out = _resolve_out(args, name)
        curve.write_csv(out)
        _write_meta(out, curve.meta)
        print(f"wrote {out}")

    if exact is not None:
        out = _resolve_out(args, f"{prefix or 'mg1'}_exact.csv")
        exact.write_csv(out)
        _write_meta(out, {
            "model": "mg1", "rho": base.rho, "truncation": base.truncation,
            "barrier_mass": exact.barrier_mass, "start_x": base.start_x,
        })
        print(f"wrote {out}  (barrier mass {exact.barrier_mass:.3e})")
        for c, curve in zip(configs, curves):
            clipped = BoundCurve(n=curve.n[:exact_nmax], tv=curve.tv[:exact_nmax])
            report = verify_mod.dominance_report(clipped, exact)
            print(f"dominance [{_x0_tag(c.x0)}]: {report.summary()}")
            if not report.passed:
                failures += 1

    if svg_name:
        svg_curves = [
            (lab, list(curve.n), list(curve.tv)) for lab, curve in zip(labels, curves)
        ]
        if exact is not None:
            svg_curves.append(("exact", list(exact.n), list(exact.tv)))
        out = _resolve_out(args, svg_name)
        meta = render_svg(svg_curves, out, title=f"mg1 rho={base.rho:g} x={base.start_x}")
        _write_meta(out, meta)
        print(f"wrote {out}")

    return 1 if failures else 0


# ---------------------------------------------------------------- isampler


def _cmd_isampler(args) -> int:
    cfg = _load_toml(args.config) if args.config else {}
    m = cfg.get("isampler", {})
    run = cfg.get("run", {})
    outputs = cfg.get("outputs", {})
    r = args.r if args.r is not None else m.get("r")
    alpha = args.alpha if args.alpha is not None else m.get("alpha")
    eta = args.eta_star if args.eta_star is not None else m.get("eta_star")
    grid_n = args.grid_n if args.grid_n is not None else m.get("grid_n", 200)
    nmax = args.nmax if args.nmax is not None else run.get("nmax", 2000)
    if r is None or alpha is None or eta is None:
        raise ConfigurationError("isampler needs r, alpha, and eta-star")
    c = isampler_mod.ISamplerConfig(
        r_exp=float(r), alpha_drift=float(alpha), eta_star=float(eta),
        grid_n=int(grid_n),
    )
    curve = isampler_mod.sampler_curves(c, nmax=int(nmax))
    out = _resolve_out(args, args.out or outputs.get("out", "is_curve.csv"))
    curve.write_csv(out)
    _write_meta(out, curve.meta)
    n_star = curve.meta["n_star"]
    print(f"wrote {out}  (n* = {n_star})")

    if args.grid_check or bool(run.get("grid_check", False)):
        k = isampler_mod.discretized_kernel(c)
        cert = isampler_mod.drift_certificate(c)
        slack = 5.0 / c.grid_n
        check_drift_pointwise(cert, k, slack=slack)
        i_star = isampler_mod.grid_smallset_index(c)
        grid_cert = find_minorisation(k, i_star)
        eps_gap = isampler_mod.minorisation_level(c) - grid_cert.epsilon
        print(
            f"grid check ok: drift holds within slack {slack:g}; grid epsilon "
            f"{grid_cert.epsilon:.6g} vs analytic {isampler_mod.minorisation_level(c):.6g}"
        )
        if eps_gap > slack:
            print(f"grid minorisation short by {eps_gap:.3g} > slack", file=sys.stderr)
            return 1

    svg_name = args.svg or outputs.get("svg")
    if svg_name:
        outp = _resolve_out(args, svg_name)
        meta = render_svg(
            [(f"r={c.r_exp:g} alpha={c.alpha_drift:g}", list(curve.n), list(curve.tv))],
            outp,
            title=f"independence sampler eta*={c.eta_star:g}",
        )
        _write_meta(outp, meta)
        print(f"wrote {outp}")
    return 0


# ---------------------------------------------------------------- verify


def _read_matrix_csv(path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError:
        raise ConfigurationError(f"matrix file {path} not found")
    except ValueError as e:
        raise ConfigurationError(f"matrix file {path} unparsable: {e}")


def _cmd_verify_dominance(args) -> int:
    cfg = _load_toml(args.config)
    kind = cfg.get("kind")
    run = cfg.get("run", {})
    nmax = int(args.nmax if args.nmax is not None else run.get("nmax", 200))
    outputs = cfg.get("outputs", {})
    failures = 0

    if kind == "mg1":
        m = cfg.get("mg1", {})
        x0s = _parse_x0_list(m.get("x0", [1, 3, 6]))
        base = mg1_mod.MG1Config.from_rho(
            float(m.get("rho", 0.5)),
            alpha_tail=float(m.get("alpha_tail", 2.5)),
            b_tail=float(m.get("b_tail", 1.0)),
            x0=x0s[0],
            truncation=m.get("truncation"),
            start_x=int(m.get("x", 10)),
        )
        grown, k, exact = mg1_mod.exact_reference(base, nmax=nmax)
        print(f"exact oracle: truncation {grown.truncation}, "
              f"barrier mass {exact.barrier_mass:.3e}")
        for x0 in x0s:
            c2 = dataclasses.replace(grown, x0=x0)
            cert, mb, rate = mg1_mod.certificate_for(c2, k)
            tag = _x0_tag(x0)
            bc = bound_constants(rate, mb, cert.epsilon)
            curve = bound_vs_stationary(
                mb, bc, rate, grown.start_x, exact.pi, k.states, nmax
            )
            report = verify_mod.dominance_report(curve, exact)
            print(f"dominance [{tag}]: {report.summary()}")
            if not report.passed:
                failures += 1
            name = outputs.get("out", f"margins_{tag.replace('=', '')}.csv")
            if len(x0s) > 1:
                name = f"margins_{tag.replace('=', '')}.csv"
            out = _resolve_out(args, name)
            report.write_csv(out, curve.tv, exact.tv)
            _write_meta(out, {
                "kind": "mg1", "tag": tag, "rho": grown.rho,
                "passed": report.passed, "min_margin": report.min_margin,
                "argmin_n": report.argmin_n, "barrier_mass": exact.barrier_mass,
                "epsilon": cert.epsilon, "b_u": mb.b_u, "m_u": bc.m_u,
            })
            print(f"wrote {out}")
        return 1 if failures else 0

    if kind == "custom-discrete":
        chain = cfg.get("chain", {})
        bound = cfg.get("bound", {})
        if "matrix_csv" in chain:
            rows = _read_matrix_csv(chain["matrix_csv"])
        elif "rows" in chain:
            rows = np.asarray(chain["rows"], float)
        else:
            raise ConfigurationError("custom-discrete chain needs matrix_csv or rows")
        k = DiscreteKernel(rows)
        x0 = int(chain.get("x0", 0))
        x = int(chain.get("x", 0))
        cert = find_minorisation(k, x0)
        rate_spec = bound.get("rate", {"family": "constant"})
        rate = _rate_from_spec(
            rate_spec.get("family", "constant"),
            rate_spec.get("c"), rate_spec.get("alpha"),
        )
        u = float(bound["u"])
        b_u = float(bound["b_u"])
        mb = MomentBounds(u_fn=lambda a, b: u, v_fn=lambda a, b: u, b_u=b_u, b_v=b_u)
        bc = bound_constants(rate, mb, cert.epsilon)
        tv = tv_curve_from_scalars(u, bc.m_u, rate, nmax)
        curve = BoundCurve(n=np.arange(1, nmax + 1), tv=tv)
        exact = verify_mod.exact_tv_curve(k, x, nmax)
        report = verify_mod.dominance_report(curve, exact)
        print(f"dominance [custom]: {report.summary()}")
        out = _resolve_out(args, outputs.get("out", "margins_custom.csv"))
        report.write_csv(out, curve.tv, exact.tv)
        _write_meta(out, {
            "kind": "custom-discrete", "passed": report.passed,
            "min_margin": report.min_margin, "epsilon": cert.epsilon,
            "u": u, "b_u": b_u, "m_u": bc.m_u,
        })
        print(f"wrote {out}")
        return 0 if report.passed else 1

    raise ConfigurationError(
        f"dominance config kind must be mg1 or custom-discrete, got {kind!r}"
    )


def _cmd_verify_coupling(args) -> int:
    cfg = _load_toml(args.config) if args.config else {}
    m = cfg.get("mg1", {})
    run = cfg.get("run", {})
    rho = float(args.rho if args.rho is not None else m.get("rho", 0.5))
    x0 = int(args.x0 if args.x0 is not None else m.get("x0", 1))
    x = int(args.x if args.x is not None else m.get("x", 10))
    xp = int(args.xp if args.xp is not None else m.get("xp", 0))
    replicas = int(args.replicas if args.replicas is not None else run.get("replicas", 10_000))
    seed = _seed(args, cfg)
    flavor = args.coupling or run.get("coupling", "ordered")

    c = mg1_mod.MG1Config.from_rho(rho, x0=x0, start_x=x)
    k = mg1_mod.embedded_matrix(c)
    cert, mb, rate = mg1_mod.certificate_for(c, k)
    stats = verify_mod.simulate_coupling(
        k, cert, x, xp, rate, replicas=replicas, seed=seed, coupling=flavor
    )
    u_pair = float(mb.u_fn(x, xp))
    limit = u_pair + 3.0 * stats.se_r
    ok = stats.mean_r <= limit
    counts = np.bincount(stats.n_at_coupling)
    result = {
        "model": "mg1", "rho": rho, "x0": x0, "x": x, "xp": xp,
        "coupling": flavor, "replicas": replicas, "seed": seed,
        "mean_sum_r": stats.mean_r, "se_sum_r": stats.se_r,
        "mean_sigma": float(stats.sigma.mean()),
        "bound_u": u_pair, "bound_check": bool(ok),
        "censored": stats.censored,
        "n_at_coupling_hist": {str(i): int(v) for i, v in enumerate(counts) if v},
    }
    if args.out:
        out = _resolve_out(args, args.out)
        with open(out, "w") as fh:
            json.dump(_jsonable(result), fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(f"wrote {out}")
    print(
        f"coupling moment: {stats.mean_r:.4f} +- {stats.se_r:.4f} "
        f"(bound {u_pair:.4f}, {'ok' if ok else 'EXCEEDED'})"
    )
    return 0 if ok else 1


# ---------------------------------------------------------------- render


def _read_curve_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ycol = 1
    for cand in ("bound_tv", "exact_tv"):
        if cand in header:
            ycol = header.index(cand)
            break
    return data[:, 0], data[:, ycol]


def _cmd_render(args) -> int:
    if not args.csv:
        raise ConfigurationError("nothing to render: need at least one curve")
    labels = args.labels.split(",") if args.labels else None
    if labels is not None and len(labels) != len(args.csv):
        raise ConfigurationError(
            f"{len(labels)} labels for {len(args.csv)} curve files"
        )
    curves = []
    for i, f in enumerate(args.csv):
        if not Path(f).exists():
            raise ConfigurationError(f"curve file {f} not found")
        n, y = _read_curve_csv(f)
        label = labels[i] if labels else Path(f).stem
        curves.append((label, n, y))
    out = _resolve_out(args, args.out)
    meta = render_svg(curves, out, title=args.title or "")
    _write_meta(out, meta)
    print(f"wrote {out}")
    if any(v is not None for v in meta["first_crossings"].values()):
        for pair, n in sorted(meta["first_crossings"].items()):
            if n is not None:
                print(f"crossover {pair} at n = {n}")
    return 0


# ---------------------------------------------------------------- parser


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out-dir", default=None)
    sp.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="subgeom",
        description="certified subgeometric convergence bounds for Markov chains",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("rates", help="tabulate a rate sequence r and R")
    sp.add_argument("--family", choices=["constant", "polynomial"], default="polynomial")
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--nmax", type=int, default=100)
    sp.add_argument("--out", default="rates.csv")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_rates)

    sp = sub.add_parser("bound", help="bound curves from explicit certificate scalars")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--b-u", dest="b_u", type=float, required=True)
    sp.add_argument("--u", type=float, required=True)
    sp.add_argument("--b-v", dest="b_v", type=float, default=None)
    sp.add_argument("--v", type=float, default=None)
    sp.add_argument("--rate-family", choices=["constant", "polynomial"], default="constant")
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--young-rho", dest="young_rho", type=float, default=None)
    sp.add_argument("--young-p", dest="young_p", type=float, default=2.0)
    sp.add_argument("--nmax", type=int, default=1000)
    sp.add_argument("--out", default="bound.csv")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_bound)

    sp = sub.add_parser("mg1", help="queue-length chain bound curves")
    sp.add_argument("--config", default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--lambda", dest="lambda_arrival", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--b", type=float, default=None)
    sp.add_argument("--x0", default=None, help="int or comma list; 0/1 = atom")
    sp.add_argument("--x", type=int, default=None)
    sp.add_argument("--truncation", type=int, default=None)
    sp.add_argument("--nmax", type=int, default=None)
    sp.add_argument("--exact", action="store_true")
    sp.add_argument("--exact-nmax", dest="exact_nmax", type=int, default=None)
    sp.add_argument("--svg", default=None)
    sp.add_argument("--out", default=None,
                    help="single-curve output name; batches use prefix naming")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_mg1)

    sp = sub.add_parser("isampler", help="independence-sampler bound curve")
    sp.add_argument("--config", default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--eta-star", dest="eta_star", type=float, default=None)
    sp.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    sp.add_argument("--nmax", type=int, default=None)
    sp.add_argument("--grid-check", action="store_true")
    sp.add_argument("--svg", default=None)
    sp.add_argument("--out", default=None)
    _add_common(sp)
    sp.set_defaults(fn=_cmd_isampler)

    sp = sub.add_parser("verify", help="exact oracles and the coupling simulator")
    vsub = sp.add_subparsers(dest="verify_command", required=True)

    vp = vsub.add_parser("dominance", help="bound curve vs exact TV curve")
    vp.add_argument("--config", required=True)
    vp.add_argument("--nmax", type=int, default=None)
    _add_common(vp)
    vp.set_defaults(fn=_cmd_verify_dominance)

    vp = vsub.add_parser("coupling", help="Monte Carlo check of hitting moments")
    vp.add_argument("--config", default=None)
    vp.add_argument("--rho", type=float, default=None)
    vp.add_argument("--x0", type=int, default=None)
    vp.add_argument("--x", type=int, default=None)
    vp.add_argument("--xp", type=int, default=None)
    vp.add_argument("--replicas", type=int, default=None)
    vp.add_argument("--coupling", choices=["ordered", "independent"], default=None)
    vp.add_argument("--out", default=None)
    _add_common(vp)
    vp.set_defaults(fn=_cmd_verify_coupling)

    sp = sub.add_parser("render", help="overlay curve CSVs into one SVG")
    sp.add_argument("csv", nargs="*")
    sp.add_argument("--out", default="curves.svg")
    sp.add_argument("--labels", default=None)
    sp.add_argument("--title", default=None)
    _add_common(sp)
    sp.set_defaults(fn=_cmd_render)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SubgeomError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
