"""Transmission (S21) of a finite resonator lattice driven through four ports.

Each eigenmode m contributes a single-pole term

    S21(f) = sum_m A_in,m A_out,m / (i (f - f_m) + kappa_m)

with port amplitudes A_q,m = g_q * psi_m[site_q] and half-width
kappa_m = kappa0 + kappa_ext * sum_q |A_q,m|^2.  Frequencies are in GHz,
port couplings g_q in sqrt(GHz), kappa_ext is dimensionless.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.ndimage import gaussian_filter1d

from .lattice import EffectiveLattice, build_lattice
from .spectra import SpectrumResult, diagonalize
from .tightbinding import ModelParams, assemble_full_wave

# Second-harmonic device defaults.  The measured ring offsets (-7 / +15 MHz)
# were quoted at the fundamental; they are doubled here.
DEVICE_PARAMS = ModelParams(
    omega0=16.0,
    t=-0.1362,
    onsite_sigma=0.00036,
    hop_sigma=0.01,
    ring_offsets={"middle": -0.014, "outer": 0.030},
    seed=0,
)
KAPPA0 = 0.0014
KAPPA_EXT = 1.0
PORT_COUPLING = 0.25
ENSEMBLE_SIZE = 15
# Gaussian sigma in GHz; FWHM about 59 MHz keeps 50-100 MHz leakage structure
# while flattening 1-10 MHz wide mode peaks
BACKGROUND_FILTER_WIDTH = 0.025


class MeasurementFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PortConfig:
    sites: tuple
    couplings: tuple
    input_port: int = 0
    output_port: int = 2

    def __post_init__(self):
        if len(self.sites) != len(self.couplings):
            raise ValueError("one coupling per port site")
        if any(not c > 0 for c in self.couplings):
            raise ValueError("port couplings must be positive")
        for q in (self.input_port, self.output_port):
            if not 0 <= q < len(self.sites):
                raise ValueError(f"port index {q} out of range")

    def swapped(self) -> "PortConfig":
        return PortConfig(self.sites, self.couplings, self.output_port, self.input_port)

    def check(self, n_sites: int) -> None:
        bad = [s for s in self.sites if not 0 <= s < n_sites]
        if bad:
            raise ValueError(f"port sites {bad} not in a lattice of {n_sites} sites")


def default_ports(lat: EffectiveLattice, coupling: float = PORT_COUPLING) -> PortConfig:
    """Four outermost-ring sites closest to the diagonal corners of the chip."""
    outer = np.flatnonzero(lat.site_shell == lat.site_shell.max())
    chosen = []
    for k in range(4):
        d = np.exp(1j * math.pi * (0.25 + 0.5 * k))
        proj = (lat.coords[outer] * np.conj(d)).real
        for idx in outer[np.argsort(-proj, kind="stable")]:
            if idx not in chosen:
                chosen.append(int(idx))
                break
    return PortConfig(tuple(chosen), (coupling,) * 4, 0, 2)


@dataclass(frozen=True)
class TransmissionConfig:
    params: ModelParams = DEVICE_PARAMS
    kappa0: float = KAPPA0
    kappa_ext: float = KAPPA_EXT
    freq_start: Optional[float] = None
    freq_stop: Optional[float] = None
    n_freq: int = 4001
    ensemble_size: int = ENSEMBLE_SIZE
    measured_path: Optional[str] = None
    filter_width: float = BACKGROUND_FILTER_WIDTH

    def __post_init__(self):
        if not self.kappa0 > 0:
            raise ValueError("kappa0 must be > 0")
        if self.kappa_ext < 0:
            raise ValueError("kappa_ext must be >= 0")
        if self.n_freq < 2:
            raise ValueError("need at least two frequency points")
        if self.ensemble_size < 1:
            raise ValueError("ensemble size must be >= 1")
        lo, hi = self.frequency_range()
        if not hi > lo:
            raise ValueError("frequency grid must be strictly increasing")

    def frequency_range(self) -> tuple[float, float]:
        w0, t = self.params.omega0, abs(self.params.t)
        lo = self.freq_start if self.freq_start is not None else w0 - 2 * t - 0.1
        hi = self.freq_stop if self.freq_stop is not None else w0 + 4 * t + 0.1
        return lo, hi

    def grid(self) -> np.ndarray:
        return np.linspace(*self.frequency_range(), self.n_freq)


@dataclass(frozen=True, eq=False)
class TransmissionResult:
    freqs: np.ndarray
    s21: np.ndarray
    mode_freqs: np.ndarray
    mode_kappa: np.ndarray
    overlaps: np.ndarray  # (modes, ports)
    member: int = 0
    seed: Optional[int] = None
    perturbation_norm: float = 0.0

    @property
    def port_weight(self) -> np.ndarray:
        return np.sum(np.abs(self.overlaps) ** 2, axis=1)


def mode_overlaps(spec: SpectrumResult, ports: PortConfig) -> np.ndarray:
    """Port amplitude of every mode: coupling times eigenvector component at the port site."""
    ports.check(spec.eigenvectors.shape[0])
    v = spec.eigenvectors[list(ports.sites), :]
    return (v * np.asarray(ports.couplings)[:, None]).T


def s21(spec: SpectrumResult, ports: PortConfig, config: TransmissionConfig,
        freqs: Optional[np.ndarray] = None, background: Optional[np.ndarray] = None) -> TransmissionResult:
    """Sum of single-pole mode responses plus an optional real background field."""
    f = config.grid() if freqs is None else np.asarray(freqs, dtype=float)
    if np.any(np.diff(f) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    amp = mode_overlaps(spec, ports)
    kappa = config.kappa0 + config.kappa_ext * np.sum(np.abs(amp) ** 2, axis=1)
    num = amp[:, ports.input_port] * amp[:, ports.output_port]
    fm = spec.eigenvalues
    out = np.zeros(len(f), dtype=complex)
    # chunk over frequency to keep the (freq, mode) block small
    for lo in range(0, len(f), 2048):
        blk = f[lo:lo + 2048, None]
        out[lo:lo + 2048] = np.sum(num / (1j * (blk - fm) + kappa), axis=1)
    if background is not None:
        bg = np.asarray(background, dtype=float)
        if bg.shape != f.shape:
            raise ValueError("background must live on the frequency grid")
        out = out + bg
    return TransmissionResult(f, out, fm.copy(), kappa, amp)


def band_window(params: ModelParams, kappa_max: float, perturbation_norm: float = 0.0) -> tuple[float, float]:
    """Interval that must contain every mode (Weyl bound) widened by 5 linewidths."""
    t = abs(params.t)
    pad = perturbation_norm + 5.0 * kappa_max
    return params.omega0 - 2 * t - pad, params.omega0 + 4 * t + pad


def device_spectrum(lat: EffectiveLattice, params: ModelParams, seed) -> tuple[SpectrumResult, float]:
    """Diagonalized device Hamiltonian and the spectral norm of its deviation from the clean model."""
    clean = assemble_full_wave(lat, params.replace(onsite_sigma=0.0, hop_sigma=0.0, ring_offsets={}))
    h = assemble_full_wave(lat, params.replace(seed=seed))
    delta = h.matrix - clean.matrix
    norm = float(np.linalg.norm(delta, 2)) if np.any(delta) else 0.0
    return diagonalize(h), norm


def ensemble(config: TransmissionConfig, n: Optional[int] = None, seed: Optional[int] = None,
             lat: Optional[EffectiveLattice] = None, ports: Optional[PortConfig] = None,
             background: Optional[np.ndarray] = None) -> list[TransmissionResult]:
    """Independent disorder realizations; member k uses the k-th child of ``seed``."""
    n = config.ensemble_size if n is None else n
    if n < 1:
        raise ValueError("ensemble needs n >= 1")
    seed = config.params.seed if seed is None else seed
    lat = lat if lat is not None else build_lattice(7, 2)
    ports = ports if ports is not None else default_ports(lat)
    children = np.random.SeedSequence(seed).spawn(n)
    out = []
    for k, child in enumerate(children):
        member_seed = int(child.generate_state(1)[0])
        spec, norm = device_spectrum(lat, config.params, member_seed)
        r = s21(spec, ports, config, background=background)
        out.append(TransmissionResult(r.freqs, r.s21, r.mode_freqs, r.mode_kappa, r.overlaps,
                                      member=k, seed=member_seed, perturbation_norm=norm))
    return out


# --------------------------------------------------------------------------
# measured data

@dataclass(frozen=True, eq=False)
class Measurement:
    freqs: np.ndarray
    s21: np.ndarray

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.s21)


def ingest_measurement(path) -> Measurement:
    """Read a CSV with header ``freq_ghz,re,im`` or ``freq_ghz,mag_db,phase_rad``."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh))]
    rows = [(ln, r) for ln, r in rows if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise MeasurementFormatError(f"{path}: empty file")
    header_line, header = rows[0]
    header = [h.strip().lower() for h in header]
    if header == ["freq_ghz", "re", "im"]:
        polar = False
    elif header == ["freq_ghz", "mag_db", "phase_rad"]:
        polar = True
    else:
        raise MeasurementFormatError(
            f"{path}:{header_line}: header must be freq_ghz,re,im or freq_ghz,mag_db,phase_rad, got {','.join(header)}")
    f, z = [], []
    for ln, r in rows[1:]:
        if len(r) != 3:
            raise MeasurementFormatError(f"{path}:{ln}: expected 3 columns, got {len(r)}")
        try:
            a, b, c = (float(x) for x in r)
        except ValueError:
            raise MeasurementFormatError(f"{path}:{ln}: non-numeric value in {r}") from None
        if not all(map(math.isfinite, (a, b, c))):
            raise MeasurementFormatError(f"{path}:{ln}: non-finite value")
        f.append(a)
        z.append(10 ** (b / 20) * complex(math.cos(c), math.sin(c)) if polar else complex(b, c))
        if len(f) > 1 and not f[-1] > f[-2]:
            raise MeasurementFormatError(
                f"{path}:{ln}: frequency {f[-1]} does not increase (previous {f[-2]}); data must be strictly increasing")
    if not f:
        raise MeasurementFormatError(f"{path}: no data rows")
    return Measurement(np.array(f), np.array(z))


def estimate_background(freqs, magnitude, filter_width: float = BACKGROUND_FILTER_WIDTH,
                        grid: Optional[np.ndarray] = None, regrid: bool = False) -> np.ndarray:
    """Slowly varying leakage field: square root of the Gaussian-smoothed power.

    ``filter_width`` is the Gaussian standard deviation in GHz.  The phase of
    the leakage is taken as zero.  If ``grid`` differs from ``freqs`` the call
    fails unless ``regrid`` allows linear interpolation onto it.
    """
    f = np.asarray(freqs, dtype=float)
    mag = np.asarray(magnitude, dtype=float)
    if f.shape != mag.shape or f.ndim != 1 or len(f) < 2:
        raise ValueError("frequencies and magnitudes must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(f) <= 0):
        raise ValueError("frequencies must be strictly increasing")
    if not filter_width > 0:
        raise ValueError("filter width must be > 0")
    uniform = np.linspace(f[0], f[-1], len(f))
    power = mag**2
    if not np.allclose(uniform, f, rtol=0, atol=1e-9 * max(1.0, abs(f[-1]))):
        power = np.interp(uniform, f, power)
    step = uniform[1] - uniform[0]
    smooth = gaussian_filter1d(power, filter_width / step, mode="nearest")
    field = np.sqrt(np.clip(smooth, 0.0, None))
    field = np.interp(f, uniform, field)
    if grid is None:
        return field
    grid = np.asarray(grid, dtype=float)
    if grid.shape == f.shape and np.allclose(grid, f, rtol=0, atol=1e-12):
        return field
    if not regrid:
        raise ValueError(
            f"measurement grid ({len(f)} points, {f[0]:.6g}-{f[-1]:.6g} GHz) differs from the "
            f"evaluation grid ({len(grid)} points, {grid[0]:.6g}-{grid[-1]:.6g} GHz); pass regrid=True to interpolate")
    return np.interp(grid, f, field)
