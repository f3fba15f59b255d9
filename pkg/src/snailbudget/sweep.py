"""Fidelity surfaces over pump amplitude and conversion separation."""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import simulate_gate


@dataclass(frozen=True)
class SweepPoint:
    eta: float
    delta2: float
    fidelity: float
    t_f: float


@dataclass(frozen=True)
class FidelityGrid:
    eta_axis: tuple
    delta_axis: tuple
    values: np.ndarray  # shape (len(eta_axis), len(delta_axis))
    t_f: tuple  # per eta
    threshold: float = 0.99

    def __post_init__(self):
        if self.values.shape != (len(self.eta_axis), len(self.delta_axis)):
            raise ValueError("values shape does not match axes")

    def points(self):
        for i, eta in enumerate(self.eta_axis):
            for j, delta in enumerate(self.delta_axis):
                yield SweepPoint(eta, delta, float(self.values[i, j]), self.t_f[i])

    def crosses_threshold(self):
        return bool(np.any(self.values >= self.threshold) and np.any(self.values < self.threshold))


def default_axes(settings):
    eta = np.geomspace(settings.eta_min, settings.eta_max, settings.eta_points)
    delta = np.geomspace(settings.delta_min_hz, settings.delta_max_hz, settings.delta_points)
    return eta, delta


def _check_axis(axis, name):
    axis = [float(a) for a in axis]
    if not axis:
        raise ValueError(f"{name} axis is empty")
    if any(a <= 0 for a in axis):
        raise ValueError(f"{name} axis must be positive")
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise ValueError(f"{name} axis must be strictly increasing")
    return tuple(axis)


def _point(args):
    config, eta, delta = args
    r = simulate_gate(config, eta, delta)
    return r.avg_fidelity, r.t_f


def fidelity_grid(config, eta_axis, delta_axis, threshold=None, workers=1):
    """Average gate fidelity at every (eta, delta) pair.

    Points are independent; with ``workers > 1`` they run in a process pool
    and are merged by index, so the result does not depend on scheduling.
    """
    eta_axis = _check_axis(eta_axis, "eta")
    delta_axis = _check_axis(delta_axis, "delta")
    if threshold is None:
        threshold = config.gate.target_fidelity
    jobs = [(config, e, d) for e in eta_axis for d in delta_axis]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        out = [_point(j) for j in jobs]
    values = np.array([f for f, _ in out]).reshape(len(eta_axis), len(delta_axis))
    t_f = tuple(out[i * len(delta_axis)][1] for i in range(len(eta_axis)))
    return FidelityGrid(eta_axis, delta_axis, values, t_f, float(threshold))


def min_delta_for_target(config, eta, f_target, delta_lo, delta_hi, tol_hz=1e6):
    """Smallest separation in ``[delta_lo, delta_hi]`` reaching ``f_target``, by bisection.

    Returns ``None`` when even ``delta_hi`` falls short.
    """
    if not delta_lo < delta_hi:
        raise ValueError("delta_lo must be below delta_hi")
    if not tol_hz > 0:
        raise ValueError("tol_hz must be positive")

    def F(d):
        return simulate_gate(config, eta, d).avg_fidelity

    if F(delta_lo) >= f_target:
        return float(delta_lo)
    if F(delta_hi) < f_target:
        return None
    lo, hi = float(delta_lo), float(delta_hi)
    while hi - lo > tol_hz:
        mid = 0.5 * (lo + hi)
        if F(mid) >= f_target:
            hi = mid
        else:
            lo = mid
    return hi


def grid_csv_text(grid):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["eta", "delta2_hz", "fidelity", "t_f_s"])
    for p in grid.points():
        w.writerow([repr(p.eta), repr(p.delta2), repr(p.fidelity), repr(p.t_f)])
    return buf.getvalue()


def emit_grid_csv(grid, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(grid_csv_text(grid))


def read_grid_csv(path, threshold=0.99):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    etas = sorted({float(r["eta"]) for r in rows})
    deltas = sorted({float(r["delta2_hz"]) for r in rows})
    values = np.full((len(etas), len(deltas)), np.nan)
    t_f = [math.nan] * len(etas)
    for r in rows:
        i, j = etas.index(float(r["eta"])), deltas.index(float(r["delta2_hz"]))
        values[i, j] = float(r["fidelity"])
        t_f[i] = float(r["t_f_s"])
    return FidelityGrid(tuple(etas), tuple(deltas), values, tuple(t_f), threshold)


# viridis anchors, interpolated linearly
_CMAP = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)


def _color(u):
    u = min(max(u, 0.0), 1.0) * (len(_CMAP) - 1)
    k = min(int(u), len(_CMAP) - 2)
    c = _CMAP[k] + (u - k) * (_CMAP[k + 1] - _CMAP[k])
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def contour_points(grid):
    """Threshold crossing along the separation axis for each eta row, in fractional index units.

    Rows entirely above threshold contribute their first column; rows
    entirely below contribute nothing.
    """
    pts = []
    thr = grid.threshold
    for i, row in enumerate(grid.values):
        above = np.nonzero(row >= thr)[0]
        if above.size == 0:
            continue
        j = int(above[0])
        if j == 0:
            pts.append((0.0, float(i)))
            continue
        f0, f1 = row[j - 1], row[j]
        frac = (thr - f0) / (f1 - f0) if f1 != f0 else 1.0
        pts.append((j - 1 + frac, float(i)))
    return pts


def heatmap_svg_text(grid):
    ne, nd = len(grid.eta_axis), len(grid.delta_axis)
    cell = 12
    left, top, pad = 80, 30, 60
    width, height = left + nd * cell + pad, top + ne * cell + pad
    vals = grid.values
    vmin, vmax = float(np.min(vals)), float(np.max(vals))
    span = vmax - vmin if vmax > vmin else 1.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>average gate fidelity, threshold {grid.threshold:.4f}</title>',
        '<g id="cells" shape-rendering="crispEdges">',
    ]
    for i in range(ne):
        y = top + (ne - 1 - i) * cell  # eta increases upward
        for j in range(nd):
            x = left + j * cell
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{_color((vals[i, j] - vmin) / span)}"/>'
            )
    out.append("</g>")
    if grid.crosses_threshold():
        pts = contour_points(grid)
        coords = " ".join(
            f"{left + (x + 0.5) * cell:.2f},{top + (ne - 1 - y + 0.5) * cell:.2f}" for x, y in pts
        )
        out.append(f'<polyline class="contour" points="{coords}" fill="none" stroke="#ff0000" stroke-width="2"/>')
    ticks_x = sorted({0, nd // 2, nd - 1})
    for j in ticks_x:
        x = left + (j + 0.5) * cell
        out.append(
            f'<text x="{x:.2f}" y="{top + ne * cell + 14}" font-size="9" text-anchor="middle">{grid.delta_axis[j] / 1e6:.3g}</text>'
        )
    ticks_y = sorted({0, ne // 2, ne - 1})
    for i in ticks_y:
        y = top + (ne - 1 - i + 0.5) * cell + 3
        out.append(f'<text x="{left - 4}" y="{y:.2f}" font-size="9" text-anchor="end">{grid.eta_axis[i]:.3g}</text>')
    out.append(
        f'<text x="{left + nd * cell / 2:.2f}" y="{top + ne * cell + 34}" font-size="11" text-anchor="middle">conversion separation (MHz)</text>'
    )
    out.append(
        f'<text x="16" y="{top + ne * cell / 2:.2f}" font-size="11" text-anchor="middle" transform="rotate(-90 16 {top + ne * cell / 2:.2f})">pump amplitude</text>'
    )
    out.append(
        f'<text x="{left}" y="{top - 10}" font-size="10">F in [{vmin:.4f}, {vmax:.4f}]</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_heatmap_svg(grid, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(heatmap_svg_text(grid))
