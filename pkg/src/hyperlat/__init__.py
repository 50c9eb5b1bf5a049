"""Hyperbolic {p,3} lattices, their kagome-like medial lattices, and tight-binding spectra."""

__version__ = "0.1.0"

from .hypgeo import (CurvatureScale, DiscPoint, Geodesic, MobiusMap, circumradius, hyp_distance,
                     medial_spacing, mobius_apply, mobius_compose, reflect, tile_edge_length)
from .lattice import EffectiveLattice, LayoutGraph, build_lattice, build_layout, medial_graph
from .serialize import deserialize, serialize
from .spectra import (FlatBandReport, LoopState, SpectrumResult, build_loop_state, diagonalize,
                      dos_histogram, flat_band_report, kagome_bloch, shell_scan)
from .tightbinding import (HoppingMatrix, ModelParams, Orientation, apply_disorder, assemble_full_wave,
                           assemble_half_wave, find_consistent_orientation)
from .transmission import (PortConfig, TransmissionConfig, TransmissionResult, ensemble, estimate_background,
                           ingest_measurement, mode_overlaps, s21)
