"""Diagonalization and flat-band analysis."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .lattice import EffectiveLattice, build_lattice
from .tightbinding import HoppingMatrix, ModelParams, assemble_full_wave

TOL_FLAT = 1e-8


class DiagonalizationError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    provenance: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def diagonalize(h, check: bool = True) -> SpectrumResult:
    """Dense symmetric eigensolve, ascending eigenvalues.

    Accepts a :class:`HoppingMatrix` or a plain symmetric array.  With
    ``check`` the residual and orthonormality bounds are verified.
    """
    if isinstance(h, HoppingMatrix):
        m, prov = h.matrix, dict(h.provenance)
    else:
        m, prov = np.asarray(h, dtype=float), {}
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        raise ValueError(f"matrix is not symmetric (max asymmetry {np.abs(m - m.T).max():.3g})")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise DiagonalizationError(
            f"eigh failed: {exc}; n = {m.shape[0]}, finite = {np.isfinite(m).all()}, "
            f"|H|_F = {np.linalg.norm(m):.3g}"
        ) from exc
    if check and len(w):
        norm = max(np.abs(w).max(), 1.0)
        resid = np.linalg.norm(m @ v - v * w, axis=0).max()
        orth = np.abs(v.T @ v - np.eye(len(w))).max()
        if resid > 1e-9 * norm or orth > 1e-9:
            raise DiagonalizationError(
                f"eigenpairs fail accuracy bounds: residual {resid:.3g} (limit {1e-9 * norm:.3g}), "
                f"orthonormality {orth:.3g}; cond ~ {np.abs(w).max() / max(np.abs(w).min(), 1e-300):.3g}"
            )
    return SpectrumResult(w, v, prov)


def dos_histogram(spec, bins: int = 100, range: Optional[tuple] = None):
    """Histogram of the eigenvalues: ``(counts, bin_edges)``."""
    w = spec.eigenvalues if isinstance(spec, SpectrumResult) else np.asarray(spec)
    if len(w) == 0:
        raise ValueError("empty spectrum")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if range is None:
        lo, hi = float(w.min()), float(w.max())
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        range = (lo, hi)
    return np.histogram(w, bins=bins, range=range)


@dataclass
class FlatBandReport:
    flat_energy: float
    degeneracy: int
    gap: float
    tol_flat: float
    gap_table: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.gap):
            d["gap"] = None
        return d


def _energy_scale(spec: SpectrumResult, omega0, t):
    params = spec.provenance.get("params", {})
    if omega0 is None:
        omega0 = params.get("omega0", 0.0)
    if t is None:
        t = params.get("t", -1.0)
    return float(omega0), float(t)


def flat_band_report(spec: SpectrumResult, tol_flat: float = TOL_FLAT, omega0=None, t=None) -> FlatBandReport:
    """Count eigenvalues at ``omega0 - 2|t|`` and measure the gap above them.

    The gap runs from the flat energy to the smallest eigenvalue exceeding
    ``flat + tol_flat*|t|``; infinite if no such eigenvalue exists.
    """
    omega0, t = _energy_scale(spec, omega0, t)
    flat = omega0 - 2.0 * abs(t)
    tol = tol_flat * abs(t)
    w = spec.eigenvalues
    degeneracy = int(np.count_nonzero(np.abs(w - flat) <= tol))
    above = w[w > flat + tol]
    gap = float(above.min() - flat) if len(above) else math.inf
    return FlatBandReport(flat, degeneracy, gap, tol_flat)


def higher_gap(spec: SpectrumResult, tol_flat: float = TOL_FLAT, omega0=None, t=None) -> float:
    """Largest spacing between consecutive eigenvalues above the flat-band gap."""
    omega0, t = _energy_scale(spec, omega0, t)
    flat = omega0 - 2.0 * abs(t)
    above = np.sort(spec.eigenvalues[spec.eigenvalues > flat + tol_flat * abs(t)])
    if len(above) < 2:
        return 0.0
    return float(np.diff(above).max())


# --------------------------------------------------------------------------
# compact flat-band states

@dataclass(frozen=True, eq=False)
class LoopState:
    sites: tuple  # ordered cycle of site ids
    amplitudes: np.ndarray  # full-length, normalized

    def __post_init__(self):
        if len(self.sites) % 2:
            raise ValueError("loop state needs an even cycle")


def build_loop_state(lat: EffectiveLattice, faces) -> LoopState:
    """Alternating-sign loop around one even face or two adjacent faces.

    For odd p the loop runs around both faces of a shared edge, skipping the
    shared edge itself: 2(p - 1) sites.  Faces touching a boundary vertex
    (one with a truncated triangle) are rejected.
    """
    faces = (faces,) if isinstance(faces, (int, np.integer)) else tuple(faces)
    if not 1 <= len(faces) <= 2:
        raise ValueError("give one face or a pair of adjacent faces")
    for f in faces:
        if not 0 <= f < len(lat.polygons):
            raise ValueError(f"no face {f}")
    deg = np.bincount(lat.ends.ravel())
    for f in faces:
        verts = {int(v) for e in lat.polygons[f] for v in lat.ends[e]}
        if any(deg[v] < 3 for v in verts):
            raise ValueError(f"face {f} touches the lattice boundary; its loop state is not protected")
    if len(faces) == 1:
        cycle = list(lat.polygons[faces[0]])
        if len(cycle) % 2:
            raise ValueError(f"face {faces[0]} has {len(cycle)} sides; odd faces need a partner face")
    else:
        cycle = _two_face_cycle(lat, *faces)
    amp = np.zeros(lat.n_sites)
    amp[cycle] = [(-1) ** k for k in range(len(cycle))]
    amp /= np.sqrt(len(cycle))
    return LoopState(tuple(int(c) for c in cycle), amp)


def _rotate_to(cycle, e):
    k = cycle.index(e)
    return list(cycle[k:]) + list(cycle[:k])


def _two_face_cycle(lat: EffectiveLattice, fa: int, fb: int) -> list[int]:
    shared = set(lat.polygons[fa]) & set(lat.polygons[fb])
    if len(shared) != 1 or fa == fb:
        raise ValueError(f"faces {fa} and {fb} do not share exactly one edge")
    e = shared.pop()
    path_a = _rotate_to(lat.polygons[fa], e)[1:]
    path_b = _rotate_to(lat.polygons[fb], e)[1:]
    # path_a walks from one end of e to the other; continue on b from there
    end_a = set(lat.ends[path_a[-1]]) & set(lat.ends[e])
    if not end_a & set(lat.ends[path_b[0]]):
        path_b = path_b[::-1]
    return path_a + path_b


# --------------------------------------------------------------------------
# size scans

@dataclass
class ShellScanRow:
    shells: int
    n: int
    degeneracy: int
    gap: float
    higher_gap: float


def shell_scan(p: int, shells: Sequence[int], params: Optional[ModelParams] = None, tol_flat: float = TOL_FLAT):
    """Full-wave spectra for a series of patch sizes.

    Returns ``(rows, spectra)``; ``rows`` is the gap table.
    """
    params = params or ModelParams()
    rows, spectra = [], []
    for k in shells:
        lat = build_lattice(p, k)
        spec = diagonalize(assemble_full_wave(lat, params))
        rep = flat_band_report(spec, tol_flat)
        rows.append(ShellScanRow(k, lat.n_sites, rep.degeneracy, rep.gap, higher_gap(spec, tol_flat)))
        spectra.append(spec)
    return rows, spectra


# --------------------------------------------------------------------------
# Euclidean kagome reference

_A1 = np.array([1.0, 0.0])
_A2 = np.array([0.5, math.sqrt(3) / 2])
# half the vectors between the three sublattices of a unit-constant kagome lattice
_D12, _D13, _D23 = _A1 / 2, _A2 / 2, (_A2 - _A1) / 2


def kagome_bloch_matrix(kx, ky, t: float = -1.0, omega0: float = 0.0) -> np.ndarray:
    """3x3 Bloch Hamiltonian(s); trailing axes are the matrix indices."""
    k = np.stack(np.broadcast_arrays(np.asarray(kx, float), np.asarray(ky, float)), axis=-1)
    c12 = 2 * np.cos(k @ _D12)
    c13 = 2 * np.cos(k @ _D13)
    c23 = 2 * np.cos(k @ _D23)
    z = np.zeros_like(c12)
    m = np.stack([np.stack([z, c12, c13], -1), np.stack([c12, z, c23], -1), np.stack([c13, c23, z], -1)], -2)
    return -t * m + omega0 * np.eye(3)


def kagome_bloch(kx, ky, t: float = -1.0, omega0: float = 0.0) -> np.ndarray:
    """Ascending band energies of the kagome lattice at momentum (kx, ky)."""
    return np.linalg.eigvalsh(kagome_bloch_matrix(kx, ky, t, omega0))
