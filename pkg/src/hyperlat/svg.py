"""Minimal SVG emitters for disc drawings, eigenstates and line/bar plots.

Output is deterministic: coordinates are printed with fixed precision and
every plot carries its data as a CSV block inside an XML comment.
"""
from __future__ import annotations

import colorsys
import math
from typing import Optional, Sequence

import numpy as np

from .hypgeo import Geodesic
from .lattice import EffectiveLattice, LayoutGraph

SIZE = 600
POS_COLOUR = "#d62728"
NEG_COLOUR = "#1f77b4"


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _doc(body: list[str], width: int = SIZE, height: int = SIZE, data: Optional[str] = None) -> str:
    head = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">']
    if data is not None:
        head.append("<!-- data (csv)\n" + data.replace("--", "- -") + "\n-->")
    head.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    return "\n".join(head + body + ["</svg>", ""])


def _csv(header: Sequence[str], rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(f"{x:.10g}" if isinstance(x, (float, np.floating)) else str(x) for x in r))
    return "\n".join(lines)


class _Frame:
    """Maps lattice coordinates to pixels, y up."""

    def __init__(self, coords: np.ndarray, disc: bool, size: int = SIZE, margin: float = 20):
        self.size = size
        if disc:
            self.centre, self.half = 0j, 1.0
        else:
            z = np.asarray(coords)
            lo = complex(z.real.min(), z.imag.min())
            hi = complex(z.real.max(), z.imag.max())
            self.centre = (lo + hi) / 2
            self.half = max(hi.real - lo.real, hi.imag - lo.imag, 1e-9) / 2 * 1.1
        self.scale = (size / 2 - margin) / self.half

    def __call__(self, z: complex) -> tuple[float, float]:
        w = (z - self.centre) * self.scale
        return self.size / 2 + w.real, self.size / 2 - w.imag


def _segment(frame: _Frame, a: complex, b: complex, hyperbolic: bool) -> str:
    x0, y0 = frame(a)
    x1, y1 = frame(b)
    if hyperbolic:
        g = Geodesic.through(a, b)
        if not g.is_diameter:
            r = g.radius * frame.scale
            cross = ((b - g.center) * (a - g.center).conjugate()).imag
            sweep = 1 if cross > 0 else 0
            return f"A {_f(r)} {_f(r)} 0 0 {sweep} {_f(x1)} {_f(y1)}"
    return f"L {_f(x1)} {_f(y1)}"


def render_layout(layout: LayoutGraph, lattice: Optional[EffectiveLattice] = None,
                  site_radius: float = 3.0) -> str:
    """Faces as geodesic polygons, couplers as dots, optional medial sites on top."""
    hyp = layout.geometry == "hyperbolic"
    frame = _Frame(layout.vertices, disc=hyp)
    body = []
    if hyp:
        c = frame(0j)
        body.append(f'<circle cx="{_f(c[0])}" cy="{_f(c[1])}" r="{_f(frame.scale)}" fill="none" stroke="#999"/>')
    for verts in layout.face_vertices:
        z = [layout.vertices[v] for v in verts] + [layout.vertices[verts[0]]]
        x, y = frame(z[0])
        d = [f"M {_f(x)} {_f(y)}"] + [_segment(frame, z[k], z[k + 1], hyp) for k in range(len(verts))]
        body.append(f'<path d="{" ".join(d)} Z" fill="none" stroke="#1b3a6b" stroke-width="1.2"/>')
    deg = layout.degrees()
    for v, z in enumerate(layout.vertices):
        x, y = frame(z)
        colour = "#ff7f0e" if deg[v] == 3 else "#bbbbbb"
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="1.6" fill="{colour}"/>')
    if lattice is not None:
        for z in lattice.coords:
            x, y = frame(z)
            body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(site_radius)}" fill="#6baed6" stroke="none"/>')
    data = _csv(["vertex", "x", "y", "shell"],
                [(v, z.real, z.imag, s) for v, (z, s) in enumerate(zip(layout.vertices, layout.vertex_shell))])
    return _doc(body, data=data)


def _phase_colour(phase: float) -> str:
    r, g, b = colorsys.hsv_to_rgb((phase / (2 * math.pi)) % 1.0, 0.85, 0.85)
    return "#%02x%02x%02x" % (round(255 * r), round(255 * g), round(255 * b))


def render_eigenstate(lat: EffectiveLattice, vector, max_radius: Optional[float] = None) -> str:
    """Circle per site: radius proportional to amplitude, colour from phase.

    Real vectors use two colours (positive / negative); complex vectors map
    the phase onto the hue circle.
    """
    psi = np.asarray(vector)
    if psi.ndim != 1 or len(psi) != lat.n_sites:
        raise ValueError(f"vector has shape {psi.shape}, lattice has {lat.n_sites} sites")
    amp = np.abs(psi)
    if amp.max(initial=0) == 0:
        raise ValueError("cannot render a zero vector")
    hyp = lat.geometry == "hyperbolic"
    frame = _Frame(lat.coords, disc=hyp)
    if max_radius is None:
        # half the smallest on-screen bond length keeps circles from overlapping
        if len(lat.bonds):
            px = np.array([frame(z) for z in lat.coords])
            d = np.linalg.norm(px[lat.bonds[:, 0]] - px[lat.bonds[:, 1]], axis=1)
            max_radius = max(0.5 * float(d.min()), 1.0)
        else:
            max_radius = 10.0
    body = []
    if hyp:
        c = frame(0j)
        body.append(f'<circle cx="{_f(c[0])}" cy="{_f(c[1])}" r="{_f(frame.scale)}" fill="none" stroke="#999"/>')
    for i, j in lat.bonds:
        x0, y0 = frame(lat.coords[i])
        x1, y1 = frame(lat.coords[j])
        body.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" stroke="#dddddd" stroke-width="0.6"/>')
    is_complex = np.iscomplexobj(psi) and np.any(np.abs(psi.imag) > 1e-12 * amp.max())
    for i, z in enumerate(lat.coords):
        if amp[i] <= 1e-12 * amp.max():
            continue
        x, y = frame(z)
        if is_complex:
            colour = _phase_colour(float(np.angle(psi[i])))
        else:
            colour = POS_COLOUR if np.real(psi[i]) > 0 else NEG_COLOUR
        r = max_radius * amp[i] / amp.max()
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{colour}"/>')
    data = _csv(["site", "x", "y", "re", "im"],
                [(i, z.real, z.imag, float(np.real(psi[i])), float(np.imag(psi[i]))) for i, z in enumerate(lat.coords)])
    return _doc(body, data=data)


# --------------------------------------------------------------------------
# plots

def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10 ** math.floor(math.log10(span / n))
    for m in (1, 2, 5, 10):
        if span / (m * step) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    return [start + k * step for k in range(int((hi - start) / step + 1e-9) + 1)]


class _Axes:
    def __init__(self, xlim, ylim, width=720, height=420, left=70, right=20, top=20, bottom=50):
        self.xlim, self.ylim = xlim, ylim
        self.width, self.height = width, height
        self.box = (left, top, width - right, height - bottom)

    def __call__(self, x, y):
        x0, y0, x1, y1 = self.box
        (a, b), (c, d) = self.xlim, self.ylim
        return x0 + (x - a) / (b - a) * (x1 - x0), y1 - (y - c) / (d - c) * (y1 - y0)

    def frame(self, xlabel: str, ylabel: str) -> list[str]:
        x0, y0, x1, y1 = self.box
        out = [f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="none" stroke="black"/>']
        for t in _nice_ticks(*self.xlim):
            x, _ = self(t, self.ylim[0])
            out.append(f'<line x1="{_f(x)}" y1="{y1}" x2="{_f(x)}" y2="{y1 + 5}" stroke="black"/>')
            out.append(f'<text x="{_f(x)}" y="{y1 + 18}" font-size="11" text-anchor="middle">{t:.4g}</text>')
        for t in _nice_ticks(*self.ylim):
            _, y = self(self.xlim[0], t)
            out.append(f'<line x1="{x0 - 5}" y1="{_f(y)}" x2="{x0}" y2="{_f(y)}" stroke="black"/>')
            out.append(f'<text x="{x0 - 8}" y="{_f(y + 4)}" font-size="11" text-anchor="end">{t:.4g}</text>')
        out.append(f'<text x="{(x0 + x1) / 2}" y="{self.height - 10}" font-size="13" text-anchor="middle">{xlabel}</text>')
        out.append(f'<text x="15" y="{(y0 + y1) / 2}" font-size="13" text-anchor="middle" '
                   f'transform="rotate(-90 15 {(y0 + y1) / 2})">{ylabel}</text>')
        return out


def _pad(lo, hi, frac=0.05):
    if hi - lo < 1e-12:
        return lo - 0.5, hi + 0.5
    d = (hi - lo) * frac
    return lo - d, hi + d


def plot_dos(counts, edges, xlabel: str = "E / |t|") -> str:
    counts = np.asarray(counts)
    edges = np.asarray(edges)
    ax = _Axes((float(edges[0]), float(edges[-1])), (0.0, float(max(counts.max(initial=0), 1)) * 1.05))
    body = ax.frame(xlabel, "states per bin")
    for k, c in enumerate(counts):
        if c == 0:
            continue
        xa, ya = ax(edges[k], c)
        xb, yb = ax(edges[k + 1], 0)
        body.append(f'<rect x="{_f(xa)}" y="{_f(ya)}" width="{_f(xb - xa)}" height="{_f(yb - ya)}" fill="#4c72b0"/>')
    data = _csv(["bin_lo", "bin_hi", "count"], [(edges[k], edges[k + 1], int(c)) for k, c in enumerate(counts)])
    return _doc(body, ax.width, ax.height, data)


def plot_spectrum(eigenvalues, ylabel: str = "E / |t|") -> str:
    w = np.asarray(eigenvalues)
    ax = _Axes((0.0, float(max(len(w) - 1, 1))), _pad(float(w.min()), float(w.max())))
    body = ax.frame("eigenstate index", ylabel)
    for i, e in enumerate(w):
        x, y = ax(i, e)
        body.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="1.5" fill="#4c72b0"/>')
    return _doc(body, ax.width, ax.height, _csv(["index", "energy"], enumerate(w)))


def plot_lines(x, curves: Sequence, labels: Sequence[str], colours: Sequence[str],
               xlabel: str, ylabel: str, widths: Optional[Sequence[float]] = None) -> str:
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(c, dtype=float) for c in curves]
    allx = np.concatenate([x] if len(ys) else [x])
    ally = np.concatenate(ys) if ys else np.zeros(1)
    ax = _Axes((float(allx.min()), float(allx.max())), _pad(float(ally.min()), float(ally.max())))
    body = ax.frame(xlabel, ylabel)
    widths = widths or [1.0] * len(ys)
    for y, colour, w in zip(ys, colours, widths):
        pts = " ".join(f"{_f(px)},{_f(py)}" for px, py in (ax(a, b) for a, b in zip(x, y)))
        body.append(f'<polyline points="{pts}" fill="none" stroke="{colour}" stroke-width="{w}"/>')
    rows = [(x[k], *(y[k] for y in ys)) for k in range(len(x))]
    return _doc(body, ax.width, ax.height, _csv(["x", *labels], rows))
