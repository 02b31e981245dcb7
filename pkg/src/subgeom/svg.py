"""Static SVG renderer for bound curves. No plotting dependency: the output
is assembled from strings so identical input yields identical bytes.

y is always log-scale (the curves decay polynomially); x switches to log
when the range spans two decades or more. Nonpositive y values cannot be
drawn on a log axis and are dropped per point.
"""

from __future__ import annotations

import math

from .errors import ConfigurationError

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 70, 170, 40, 55
_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
]
_MAX_POINTS = 1200


def first_crossings(curves) -> dict:
    """First n at which each pair of curves swaps order, None if they never do.

    Curves are (label, n, y) triples; comparison runs on the overlap of the
    n ranges. A swap means the sign of (y_i - y_j) changes between
    consecutive common points; ties are skipped.
    """
    out = {}
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            la, na, ya = curves[i]
            lb, nb, yb = curves[j]
            common = sorted(set(int(v) for v in na) & set(int(v) for v in nb))
            ia = {int(v): k for k, v in enumerate(na)}
            ib = {int(v): k for k, v in enumerate(nb)}
            sign = 0
            hit = None
            for n in common:
                d = float(ya[ia[n]]) - float(yb[ib[n]])
                s = (d > 0) - (d < 0)
                if s == 0:
                    continue
                if sign != 0 and s != sign:
                    hit = n
                    break
                sign = s
            out[f"{la}~{lb}"] = hit
    return out


def _decades(lo: float, hi: float):
    k0 = math.ceil(math.log10(lo) - 1e-12)
    k1 = math.floor(math.log10(hi) + 1e-12)
    return [10.0**k for k in range(k0, k1 + 1)]


def _fmt_tick(v: float) -> str:
    if 0.01 <= abs(v) < 10000:
        s = f"{v:g}"
    else:
        k = round(math.log10(abs(v)))
        s = f"1e{k}"
    return s


def _thin(ns, ys):
    if len(ns) <= _MAX_POINTS:
        return ns, ys
    stride = -(-len(ns) // _MAX_POINTS)
    idx = list(range(0, len(ns), stride))
    if idx[-1] != len(ns) - 1:
        idx.append(len(ns) - 1)
    return [ns[i] for i in idx], [ys[i] for i in idx]


def render_svg(curves, path, title: str = "") -> dict:
    """Write an overlay plot of (label, n, y) curves; returns metadata with
    the axis ranges and pairwise first crossings."""
    if not curves:
        raise ConfigurationError("nothing to render: need at least one curve")
    curves = [(str(l), list(map(float, n)), list(map(float, y))) for l, n, y in curves]
    for label, ns, ys in curves:
        if len(ns) != len(ys) or not ns:
            raise ConfigurationError(f"curve {label!r} is empty or misaligned")

    xs_all = [v for _, ns, _ in curves for v in ns]
    ys_pos = [v for _, _, ys in curves for v in ys if v > 0.0]
    if not ys_pos:
        raise ConfigurationError("no positive values; log-scale axis is empty")
    xmin, xmax = min(xs_all), max(xs_all)
    ymin, ymax = min(ys_pos), max(ys_pos) * 1.1
    ymin = 10.0 ** math.floor(math.log10(ymin))
    logx = xmin > 0 and xmax / max(xmin, 1e-300) >= 100.0

    pw = _W - _ML - _MR
    ph = _H - _MT - _MB

    def tx(x: float) -> float:
        if logx:
            a, b = math.log10(xmin), math.log10(xmax)
            t = (math.log10(x) - a) / (b - a) if b > a else 0.5
        else:
            t = (x - xmin) / (xmax - xmin) if xmax > xmin else 0.5
        return _ML + t * pw

    def ty(y: float) -> float:
        a, b = math.log10(ymin), math.log10(ymax)
        t = (math.log10(y) - a) / (b - a) if b > a else 0.5
        return _MT + (1.0 - t) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="Helvetica,Arial,sans-serif">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_ML}" y="24" font-size="14" fill="#222222">{_esc(title)}</text>'
        )

    # frame and y-decade grid
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#444444" stroke-width="1"/>'
    )
    for yv in _decades(ymin, ymax):
        yy = ty(yv)
        parts.append(
            f'<line x1="{_ML}" y1="{yy:.2f}" x2="{_ML + pw}" y2="{yy:.2f}" '
            f'stroke="#dddddd" stroke-width="0.7"/>'
        )
        parts.append(
            f'<text x="{_ML - 6}" y="{yy + 4:.2f}" font-size="11" fill="#333333" '
            f'text-anchor="end">{_fmt_tick(yv)}</text>'
        )
    if logx:
        xticks = _decades(max(xmin, 1e-300), xmax)
    else:
        xticks = [xmin + k * (xmax - xmin) / 5.0 for k in range(6)]
    for xv in xticks:
        xx = tx(xv)
        parts.append(
            f'<line x1="{xx:.2f}" y1="{_MT + ph}" x2="{xx:.2f}" y2="{_MT + ph + 5}" '
            f'stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{xx:.2f}" y="{_MT + ph + 18}" font-size="11" fill="#333333" '
            f'text-anchor="middle">{_fmt_tick(round(xv, 6))}</text>'
        )
    parts.append(
        f'<text x="{_ML + pw / 2:.2f}" y="{_H - 14}" font-size="12" '
        f'fill="#222222" text-anchor="middle">n{" (log)" if logx else ""}</text>'
    )

    for k, (label, ns, ys) in enumerate(curves):
        color = _PALETTE[k % len(_PALETTE)]
        pts = [(n, y) for n, y in zip(ns, ys) if y > 0.0]
        tns, tys = _thin([p[0] for p in pts], [p[1] for p in pts])
        coords = " ".join(f"{tx(n):.2f},{ty(y):.2f}" for n, y in zip(tns, tys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        ly = _MT + 16 + 18 * k
        lx = _ML + pw + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-size="11" fill="#222222">'
            f"{_esc(label)}</text>"
        )

    parts.append("</svg>")
    data = "\n".join(parts) + "\n"
    with open(path, "w") as fh:
        fh.write(data)
    return {
        "x_range": [xmin, xmax],
        "y_range": [ymin, ymax],
        "x_scale": "log" if logx else "linear",
        "y_scale": "log",
        "curves": [label for label, _, _ in curves],
        "first_crossings": first_crossings(curves),
    }


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
