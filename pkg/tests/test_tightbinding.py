import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hyperlat.lattice import build_layout, medial_graph
from hyperlat.serialize import from_dict
from hyperlat.tightbinding import (ModelParams, Orientation, apply_disorder, assemble_full_wave,
                                   assemble_half_wave, find_consistent_orientation, orientation_search,
                                   resolve_ring_offsets)

from conftest import lattice


def eig(h):
    return np.linalg.eigvalsh(h.matrix)


def cycle_lattice(n):
    from hyperlat.serialize import SCHEMA_ID
    sites = [{"id": k, "x": math.cos(2 * math.pi * k / n) / 2, "y": math.sin(2 * math.pi * k / n) / 2,
              "ends": [k, (k + 1) % n]} for k in range(n)]
    bonds = [{"sites": sorted([k, (k + 1) % n]), "vertex": (k + 1) % n} for k in range(n)]
    return from_dict({"schema": SCHEMA_ID, "kind": "effective", "effective": {"sites": sites, "bonds": bonds}})


@pytest.mark.parametrize("t", [-1.0, -0.37])
def test_heptagon_circulant(t):
    lat = medial_graph(build_layout(7, 0))
    h = assemble_full_wave(lat, ModelParams(t=t))
    expected = np.sort([2 * abs(t) * math.cos(2 * math.pi * k / 7) for k in range(7)])
    np.testing.assert_allclose(eig(h), expected, atol=1e-12)


def test_full_wave_rejects_positive_t():
    with pytest.raises(ValueError, match="t < 0"):
        assemble_full_wave(lattice(7, 0), ModelParams(t=0.5))
    with pytest.raises(ValueError):
        ModelParams(t=0)
    with pytest.raises(ValueError):
        ModelParams(onsite_sigma=-1)


def test_clean_diagonal_is_omega0():
    h = assemble_full_wave(lattice(7, 2), ModelParams(omega0=8.0, t=-0.1))
    assert np.all(h.onsite == 8.0)
    assert np.all(h.hoppings == 0.1)
    assert np.array_equal(h.matrix, h.matrix.T)
    assert not h.matrix.flags.writeable


@pytest.mark.parametrize("p", [6, 7, 8, 9, 12])
def test_full_wave_equals_unsigned_incidence_form(p):
    g = build_layout(p, 2 if p < 12 else 1)
    lat = medial_graph(g)
    b = np.zeros((g.n_vertices, g.n_edges))
    b[g.edges[:, 0], np.arange(g.n_edges)] = 1
    b[g.edges[:, 1], np.arange(g.n_edges)] = 1
    h = assemble_full_wave(lat, ModelParams(t=-1))
    np.testing.assert_array_equal(h.matrix, b.T @ b - 2 * np.eye(g.n_edges))


@pytest.mark.parametrize("p", [6, 7, 8, 9])
def test_line_graph_bounds(p):
    ev = eig(assemble_full_wave(lattice(p, 2), ModelParams(omega0=1.5, t=-0.5)))
    assert ev.min() >= 1.5 - 1.0 - 1e-9
    assert ev.max() <= 1.5 + 2.0 + 1e-9


@pytest.mark.parametrize("p", [6, 7, 9])
def test_half_wave_matches_layout_laplacian(p):
    g = build_layout(p, 1)
    lat = medial_graph(g)
    orient = Orientation.from_ends(lat.ends)
    ev = eig(assemble_half_wave(lat, ModelParams(), orient))
    G = nx.Graph(list(map(tuple, g.edges)))
    lap = np.sort(nx.laplacian_spectrum(G))
    # nonzero spectrum of B B^T and B^T B coincide; the rest of B^T B is zero
    expected = np.sort(np.concatenate([lap - 2, np.full(g.n_edges - g.n_vertices, -2.0)]))
    np.testing.assert_allclose(ev, expected, atol=1e-10)


def test_even_cycle_alternating_orientation():
    lat = cycle_lattice(6)
    flip = np.array([k % 2 == 1 for k in range(6)])
    orient = Orientation.from_ends(lat.ends, flip=flip)
    hh = assemble_half_wave(lat, ModelParams(), orient)
    hf = assemble_full_wave(lat, ModelParams())
    np.testing.assert_allclose(eig(hh), eig(hf), atol=1e-12)
    assert find_consistent_orientation(lat) is not None


def test_odd_cycle_has_no_consistent_orientation():
    orient, cycle = orientation_search(cycle_lattice(5))
    assert orient is None and len(cycle) == 5


def test_consistent_orientation_makes_all_bonds_positive():
    lat = lattice(6, 3)
    orient = find_consistent_orientation(lat)
    assert orient is not None
    h = assemble_half_wave(lat, ModelParams(), orient)
    assert np.all(h.hoppings == 1.0)
    np.testing.assert_allclose(eig(h), eig(assemble_full_wave(lat, ModelParams())), atol=1e-9)


def test_heptagon_lattice_is_frustrated():
    orient, cycle = orientation_search(lattice(7, 2))
    assert orient is None
    assert len(cycle) % 2 == 1
    g = lattice(7, 2).layout
    eset = {tuple(sorted(map(int, e))) for e in g.edges}
    assert all(tuple(sorted((cycle[k], cycle[(k + 1) % len(cycle)]))) in eset for k in range(len(cycle)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([6, 7, 8]))
def test_orientation_flips_are_gauge_transformations(seed, p):
    lat = lattice(p, 1)
    flip = np.random.default_rng(seed).random(lat.n_sites) < 0.5
    h0 = assemble_half_wave(lat, ModelParams(), Orientation.from_ends(lat.ends))
    h1 = assemble_half_wave(lat, ModelParams(), Orientation.from_ends(lat.ends, flip=flip))
    signs = np.where(flip, -1.0, 1.0)
    np.testing.assert_array_equal(h0.conjugate_by_signs(signs).matrix, h1.matrix)
    np.testing.assert_allclose(eig(h0), eig(h1), atol=1e-12)


def test_half_wave_requires_full_orientation():
    lat = lattice(7, 1)
    short = Orientation(np.array([0, 1]), np.array([1, 2]))
    with pytest.raises(ValueError, match="covers"):
        assemble_half_wave(lat, ModelParams(), short)


def test_zero_sigma_leaves_matrix_unchanged():
    h = assemble_full_wave(lattice(7, 1), ModelParams())
    assert apply_disorder(h, ModelParams(), 3) is h


def test_onsite_disorder_magnitude():
    # 0.036 % of 8 GHz
    params = ModelParams(omega0=8.0, t=-0.1, onsite_sigma=0.00036, seed=11)
    lat = lattice(7, 4)
    h = assemble_full_wave(lat, params)
    dev = h.onsite - 8.0
    assert dev.std() == pytest.approx(0.0029, rel=0.06)
    assert np.all(h.hoppings == 0.1)


def test_hopping_disorder_is_relative_and_symmetric():
    params = ModelParams(t=-2.0, hop_sigma=0.05, seed=5)
    h = assemble_full_wave(lattice(7, 3), params)
    rel = h.hoppings / 2.0 - 1
    assert rel.std() == pytest.approx(0.05, rel=0.1)
    assert np.array_equal(h.matrix, h.matrix.T)
    assert np.all(h.onsite == 0)


def test_disorder_reproducible_per_seed():
    params = ModelParams(omega0=8.0, t=-0.1, onsite_sigma=1e-3, hop_sigma=1e-2, seed=42)
    a = assemble_full_wave(lattice(7, 2), params)
    b = assemble_full_wave(lattice(7, 2), params)
    c = assemble_full_wave(lattice(7, 2), params.replace(seed=43))
    assert np.array_equal(a.matrix, b.matrix)
    assert not np.array_equal(a.matrix, c.matrix)


def test_ring_offsets_shift_diagonal():
    lat = lattice(7, 2)
    params = ModelParams(omega0=8.0, t=-0.1, ring_offsets={"outer": 0.015, "middle": -0.007})
    d = assemble_full_wave(lat, params).onsite - 8.0
    np.testing.assert_allclose(d[lat.site_shell == 2], 0.015)
    np.testing.assert_allclose(d[lat.site_shell == 1], -0.007)
    np.testing.assert_allclose(d[lat.site_shell == 0], 0.0)
    same = resolve_ring_offsets(lat, {2: 0.015, "1": -0.007})
    np.testing.assert_allclose(same, d)
    with pytest.raises(ValueError, match="ring label"):
        resolve_ring_offsets(lat, {"inner": 1.0})
