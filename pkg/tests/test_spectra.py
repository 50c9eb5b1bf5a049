import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperlat.lattice import build_layout, medial_graph
from hyperlat.spectra import (DiagonalizationError, LoopState, build_loop_state, diagonalize,
                              dos_histogram, flat_band_report, higher_gap, kagome_bloch,
                              kagome_bloch_matrix, shell_scan)
from hyperlat.tightbinding import (ModelParams, Orientation, assemble_full_wave, assemble_half_wave)

from conftest import lattice

A1 = np.array([1.0, 0.0])
A2 = np.array([0.5, math.sqrt(3) / 2])


def spectrum(p, shells, **kw):
    return diagonalize(assemble_full_wave(lattice(p, shells), ModelParams(**kw)))


def interior_face_pairs(lat):
    deg = np.bincount(lat.ends.ravel())
    ok = [f for f, cyc in enumerate(lat.polygons)
          if all(deg[v] == 3 for e in cyc for v in lat.ends[e])]
    pairs = []
    for a in ok:
        for b in ok:
            if a < b and len(set(lat.polygons[a]) & set(lat.polygons[b])) == 1:
                pairs.append((a, b))
    return ok, pairs


def test_diagonalize_plain_array():
    m = np.array([[2.0, 1.0], [1.0, 2.0]])
    spec = diagonalize(m)
    np.testing.assert_allclose(spec.eigenvalues, [1, 3])
    assert spec.n == 2


def test_diagonalize_rejects_asymmetric():
    with pytest.raises(ValueError, match="symmetric"):
        diagonalize(np.array([[0.0, 1.0], [1.0 + 1e-15, 0.0]]))
    with pytest.raises(ValueError):
        diagonalize(np.zeros((2, 3)))


def test_diagonalize_nonfinite():
    with pytest.raises((DiagonalizationError, ValueError)):
        diagonalize(np.full((3, 3), np.nan))


def test_eigenpairs_accurate():
    spec = spectrum(7, 2, omega0=16.0, t=-0.1362, onsite_sigma=3.6e-4, hop_sigma=0.01, seed=1)
    h = assemble_full_wave(lattice(7, 2), ModelParams(omega0=16.0, t=-0.1362, onsite_sigma=3.6e-4,
                                                      hop_sigma=0.01, seed=1)).matrix
    v, w = spec.eigenvectors, spec.eigenvalues
    assert np.abs(h @ v - v * w).max() < 1e-12
    assert np.all(np.diff(w) >= 0)
    assert spec.provenance["convention"] == "full-wave"


def test_dos_histogram_counts():
    spec = spectrum(7, 2)
    counts, edges = dos_histogram(spec, bins=30)
    assert counts.sum() == 140 and len(edges) == 31
    counts, _ = dos_histogram(spec, bins=6, range=(-2.5, 4.5))
    assert counts[0] >= flat_band_report(spec).degeneracy
    with pytest.raises(ValueError):
        dos_histogram(np.array([]), bins=3)


@pytest.mark.parametrize("p", [6, 7, 8, 9, 10, 11, 12])
def test_flat_degeneracy_equals_incidence_nullity(p):
    g = build_layout(p, 1)
    b = np.zeros((g.n_vertices, g.n_edges))
    for k, (u, v) in enumerate(g.edges):
        b[u, k] = b[v, k] = 1
    nullity = g.n_edges - np.linalg.matrix_rank(b)
    expected = g.n_edges - g.n_vertices + (1 if p % 2 == 0 else 0)
    assert nullity == expected
    assert flat_band_report(spectrum(p, 1)).degeneracy == expected


def test_flat_report_scales_with_parameters():
    rep = flat_band_report(spectrum(7, 2, omega0=8.0, t=-0.5))
    assert rep.flat_energy == pytest.approx(7.0)
    ref = flat_band_report(spectrum(7, 2))
    assert rep.degeneracy == ref.degeneracy
    assert rep.gap == pytest.approx(0.5 * ref.gap, rel=1e-9)
    assert rep.to_dict()["gap"] == rep.gap


def test_flat_report_without_gap():
    spec = diagonalize(-2 * np.eye(3))
    rep = flat_band_report(spec)
    assert rep.degeneracy == 3 and math.isinf(rep.gap)
    assert rep.to_dict()["gap"] is None


@pytest.mark.parametrize("p,shells", [(7, 2), (7, 3), (9, 2), (11, 2)])
def test_loop_states_on_face_pairs(p, shells):
    lat = lattice(p, shells)
    h = assemble_full_wave(lat, ModelParams(omega0=0.3, t=-0.7)).matrix
    _, pairs = interior_face_pairs(lat)
    assert pairs
    for pair in pairs:
        st_ = build_loop_state(lat, pair)
        psi = st_.amplitudes
        assert len(st_.sites) == 2 * (p - 1)
        assert np.linalg.norm(h @ psi - (0.3 - 1.4) * psi) <= 1e-12
        assert np.linalg.norm(psi) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [6, 8, 10, 12])
def test_loop_states_on_even_faces(p):
    lat = lattice(p, 2 if p < 12 else 1)
    h = assemble_full_wave(lat, ModelParams()).matrix
    ok, _ = interior_face_pairs(lat)
    assert ok
    for f in ok:
        psi = build_loop_state(lat, f).amplitudes
        assert np.linalg.norm(h @ psi + 2 * psi) <= 1e-12


def test_loop_state_lies_in_flat_eigenspace():
    lat = lattice(7, 2)
    spec = spectrum(7, 2)
    flat = spec.eigenvectors[:, np.abs(spec.eigenvalues + 2) < 1e-8]
    psi = build_loop_state(lat, (0, 1)).amplitudes
    assert np.linalg.norm(flat.T @ psi) == pytest.approx(1.0, abs=1e-12)


def test_loop_state_rejections():
    lat = lattice(7, 1)
    with pytest.raises(ValueError, match="boundary"):
        build_loop_state(lat, (0, 1))
    lat2 = lattice(7, 2)
    with pytest.raises(ValueError, match="odd faces"):
        build_loop_state(lat2, 0)
    with pytest.raises(ValueError, match="share"):
        build_loop_state(lat2, (1, 4))
    with pytest.raises(ValueError):
        build_loop_state(lat2, (0, 1, 2))
    with pytest.raises(ValueError):
        LoopState((0, 1, 2), np.zeros(3))


def test_spectral_support():
    for p in (6, 7, 8, 9):
        w = spectrum(p, 2).eigenvalues
        assert w.min() >= -2 - 1e-9 and w.max() <= 4 + 1e-9


def test_gap_constant_for_heptagons_and_closing_for_octagons():
    rows7, _ = shell_scan(7, [1, 2, 3])
    rows8, _ = shell_scan(8, [1, 2, 3])
    g7 = [r.gap for r in rows7]
    g8 = [r.gap for r in rows8]
    assert abs(g7[2] - g7[1]) / g7[2] < 1e-3
    assert g8[0] > g8[1] > g8[2]
    assert g8[1] / g8[2] > 3
    assert [r.n for r in rows7] == [42, 140, 399]


def test_higher_gaps_shrink_with_size():
    rows, _ = shell_scan(7, [1, 2, 3])
    h = [r.higher_gap for r in rows]
    assert h[0] > h[1] > h[2] > 0


def test_half_wave_gap_shrinks_with_size():
    gaps = []
    for k in (1, 2, 3):
        lat = lattice(7, k)
        h = assemble_half_wave(lat, ModelParams(), Orientation.from_ends(lat.ends))
        gaps.append(flat_band_report(diagonalize(h)).gap)
    assert gaps[0] > gaps[1] > gaps[2]


def test_higher_gap_small_spectra():
    assert higher_gap(diagonalize(np.diag([-2.0, 1.0]))) == 0.0


kvec = st.tuples(st.floats(-10, 10), st.floats(-10, 10))


@settings(max_examples=200, deadline=None)
@given(kvec)
def test_kagome_bands_closed_form(k):
    kx, ky = k
    kv = np.array(k)
    s = math.cos(kv @ A1) + math.cos(kv @ A2) + math.cos(kv @ (A2 - A1))
    root = math.sqrt(max(3 + 2 * s, 0.0))
    expected = sorted([-2.0, 1 - root, 1 + root])
    np.testing.assert_allclose(kagome_bloch(kx, ky), expected, atol=1e-9)


def test_kagome_gamma_and_scaling():
    np.testing.assert_allclose(kagome_bloch(0, 0), [-2, -2, 4], atol=1e-12)
    np.testing.assert_allclose(kagome_bloch(0.3, -1.1, t=-0.5, omega0=3.0),
                               3.0 + 0.5 * kagome_bloch(0.3, -1.1), atol=1e-12)
    m = kagome_bloch_matrix(np.zeros(4), np.ones(4))
    assert m.shape == (4, 3, 3)
    np.testing.assert_array_equal(m, np.swapaxes(m, -1, -2))


def test_kagome_patch_matches_bloch_range():
    # the finite kagome patch spectrum sits within the Bloch band range
    w = spectrum(6, 4).eigenvalues
    k = np.random.default_rng(0).uniform(-2 * np.pi, 2 * np.pi, size=(4000, 2))
    bands = kagome_bloch(k[:, 0], k[:, 1])
    assert w.min() >= bands.min() - 1e-9 and w.max() <= bands.max() + 1e-9


@pytest.mark.parametrize("p,shells", [(7, 2), (8, 2), (8, 3), (9, 2)])
def test_gap_equals_signless_laplacian_minimum(p, shells):
    # above the flat band, H + 2 shares its spectrum with D + A of the layout
    import networkx as nx
    g = build_layout(p, shells)
    G = nx.Graph(list(map(tuple, g.edges)))
    a = nx.to_numpy_array(G, nodelist=range(g.n_vertices))
    signless = np.linalg.eigvalsh(np.diag(a.sum(1)) + a)
    lap = np.sort(nx.laplacian_spectrum(G))
    gap = flat_band_report(spectrum(p, shells)).gap
    if p % 2 == 0:
        assert gap == pytest.approx(lap[1], rel=1e-9)
    else:
        assert gap == pytest.approx(signless[0], rel=1e-9)
