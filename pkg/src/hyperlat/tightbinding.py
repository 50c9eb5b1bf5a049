"""Single-particle hopping matrices on an effective lattice.

Sign convention: the matrix element between bonded sites is ``-t``.  With the
physical ``t < 0`` of capacitively coupled resonators this is ``+|t|``, which
puts the flat band at ``omega0 - 2|t|`` and the uniform state at the top.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.stats import truncnorm

from .lattice import EffectiveLattice, _two_colour

TRUNCATE_SIGMAS = 5.0
DISORDER_DISTRIBUTION = f"gaussian truncated at +-{TRUNCATE_SIGMAS:g} sigma"


@dataclass(frozen=True)
class ModelParams:
    """Model parameters.

    ``onsite_sigma`` is relative to ``|omega0|`` and ``hop_sigma`` relative to
    ``|t|``.  ``ring_offsets`` maps a shell index (or ``"outer"``/``"middle"``,
    meaning the last and second-to-last shell) to an additive on-site shift.
    """

    omega0: float = 0.0
    t: float = -1.0
    onsite_sigma: float = 0.0
    hop_sigma: float = 0.0
    ring_offsets: dict = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        if self.t == 0:
            raise ValueError("hopping t must be non-zero")
        if self.onsite_sigma < 0 or self.hop_sigma < 0:
            raise ValueError("disorder sigmas must be >= 0")

    @property
    def has_disorder(self) -> bool:
        return self.onsite_sigma > 0 or self.hop_sigma > 0

    @property
    def flat_energy(self) -> float:
        return self.omega0 - 2.0 * abs(self.t)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ring_offsets"] = {str(k): v for k, v in self.ring_offsets.items()}
        return d

    def replace(self, **kw) -> "ModelParams":
        d = asdict(self)
        d.update(kw)
        return ModelParams(**d)


@dataclass(frozen=True)
class Orientation:
    """Positive and negative end (layout vertex ids) of every layout edge."""

    positive: np.ndarray
    negative: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positive, dtype=int)
        neg = np.asarray(self.negative, dtype=int)
        if pos.shape != neg.shape or pos.ndim != 1:
            raise ValueError("positive and negative ends must be 1-d arrays of equal length")
        if np.any(pos == neg):
            raise ValueError("an edge needs two distinct ends")
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)

    @classmethod
    def from_ends(cls, ends: np.ndarray, flip=None) -> "Orientation":
        ends = np.asarray(ends, dtype=int)
        pos, neg = ends[:, 0].copy(), ends[:, 1].copy()
        if flip is not None:
            flip = np.asarray(flip, dtype=bool)
            pos[flip], neg[flip] = ends[flip, 1], ends[flip, 0]
        return cls(pos, neg)

    def sign(self, site: int, vertex: int) -> int:
        if self.positive[site] == vertex:
            return 1
        if self.negative[site] == vertex:
            return -1
        raise ValueError(f"vertex {vertex} is not an end of edge {site}")


@dataclass(frozen=True, eq=False)
class HoppingMatrix:
    matrix: np.ndarray
    bonds: np.ndarray
    convention: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def onsite(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def hoppings(self) -> np.ndarray:
        if len(self.bonds) == 0:
            return np.zeros(0)
        return self.matrix[self.bonds[:, 0], self.bonds[:, 1]].copy()

    def conjugate_by_signs(self, signs) -> "HoppingMatrix":
        """S H S for a diagonal +-1 matrix S (a gauge transformation)."""
        s = np.asarray(signs, dtype=float)
        return HoppingMatrix(s[:, None] * self.matrix * s[None, :], self.bonds, self.convention,
                             {**self.provenance, "gauge": "sign-conjugated"})


def resolve_ring_offsets(lat: EffectiveLattice, offsets: dict) -> np.ndarray:
    """Per-site additive offsets from a shell-label map."""
    shift = np.zeros(lat.n_sites)
    if not offsets:
        return shift
    outer = int(lat.site_shell.max())
    for label, value in offsets.items():
        if label == "outer":
            ring = outer
        elif label == "middle":
            ring = outer - 1
        else:
            try:
                ring = int(label)
            except (TypeError, ValueError):
                raise ValueError(f"unknown ring label {label!r}; use a shell index, 'outer' or 'middle'") from None
        shift[lat.site_shell == ring] += float(value)
    return shift


def _base(lat: EffectiveLattice, params: ModelParams, bond_values: np.ndarray, convention: str,
          extra: Optional[dict] = None) -> HoppingMatrix:
    n = lat.n_sites
    m = np.zeros((n, n))
    if len(lat.bonds):
        i, j = lat.bonds.T
        m[i, j] = bond_values
        m[j, i] = bond_values
    m[np.diag_indices(n)] = params.omega0 + resolve_ring_offsets(lat, params.ring_offsets)
    prov = {"convention": convention, "params": params.to_dict(), "seed": params.seed,
            "disorder_distribution": DISORDER_DISTRIBUTION}
    if extra:
        prov.update(extra)
    h = HoppingMatrix(m, lat.bonds.copy(), convention, prov)
    if params.has_disorder:
        h = apply_disorder(h, params, params.seed)
    return h


def assemble_full_wave(lat: EffectiveLattice, params: ModelParams) -> HoppingMatrix:
    """Symmetric (second-harmonic) resonator modes: every bond carries ``-t = |t|``."""
    if params.t >= 0:
        raise ValueError(f"full-wave convention needs t < 0, got t = {params.t}")
    values = np.full(len(lat.bonds), -params.t)
    return _base(lat, params, values, "full-wave")


def assemble_half_wave(lat: EffectiveLattice, params: ModelParams, orient: Orientation) -> HoppingMatrix:
    """Antisymmetric (fundamental) modes with per-resonator orientations.

    Hopping between two ends of the same sign is ``-|t|``, between ends of
    opposite sign ``+|t|``; the matrix element is minus the hopping.
    """
    if len(orient.positive) != lat.n_sites:
        raise ValueError(f"orientation covers {len(orient.positive)} edges, lattice has {lat.n_sites}")
    if lat.bond_vertex is None or len(lat.bond_vertex) != len(lat.bonds):
        raise ValueError("half-wave assembly needs the shared layout vertex of every bond")
    values = np.empty(len(lat.bonds))
    for k, ((i, j), v) in enumerate(zip(lat.bonds, lat.bond_vertex)):
        values[k] = abs(params.t) * orient.sign(i, v) * orient.sign(j, v)
    return _base(lat, params, values, "half-wave",
                 {"orientation_positive": orient.positive.tolist()})


def orientation_search(lat: EffectiveLattice):
    """``(orientation, None)`` if all half-wave bonds can be made negative,
    else ``(None, odd_cycle)`` with the layout vertices of a frustrated cycle.

    All ends meeting at a coupler must share a sign, so a consistent
    orientation is exactly a proper 2-colouring of the layout vertices.
    """
    if lat.ends is None:
        raise ValueError("lattice has no layout edge ends")
    n_vertices = int(lat.ends.max()) + 1 if lat.n_sites else 0
    colour, cycle = _two_colour(n_vertices, lat.ends)
    if colour is None:
        return None, cycle
    colour = np.asarray(colour)
    flip = colour[lat.ends[:, 0]] == 1
    return Orientation.from_ends(lat.ends, flip=flip), None


def find_consistent_orientation(lat: EffectiveLattice) -> Optional[Orientation]:
    return orientation_search(lat)[0]


def apply_disorder(h: HoppingMatrix, params: ModelParams, seed: Union[int, None, np.random.Generator] = None) -> HoppingMatrix:
    """Gaussian on-site and multiplicative hopping noise, truncated at 5 sigma.

    On-site std is ``onsite_sigma * |omega0|``; each existing bond ``h_ij``
    becomes ``h_ij * (1 + hop_sigma * xi)``.  Draws are made once per site and
    once per unordered bond, so symmetry is exact.
    """
    if not params.has_disorder:
        return h
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m = np.array(h.matrix)
    n = m.shape[0]
    xi_site = truncnorm.rvs(-TRUNCATE_SIGMAS, TRUNCATE_SIGMAS, size=n, random_state=rng)
    xi_bond = truncnorm.rvs(-TRUNCATE_SIGMAS, TRUNCATE_SIGMAS, size=len(h.bonds), random_state=rng)
    m[np.diag_indices(n)] += params.onsite_sigma * abs(params.omega0) * xi_site
    if len(h.bonds):
        i, j = h.bonds.T
        vals = m[i, j] * (1.0 + params.hop_sigma * xi_bond)
        m[i, j] = vals
        m[j, i] = vals
    prov = {**h.provenance, "disorder_seed": seed if not isinstance(seed, np.random.Generator) else "generator",
            "onsite_sigma": params.onsite_sigma, "hop_sigma": params.hop_sigma}
    return HoppingMatrix(m, h.bonds, h.convention, prov)
