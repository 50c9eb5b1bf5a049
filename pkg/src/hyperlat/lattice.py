"""Shell-truncated {p,3} layout graphs and their medial (line) graphs.

A layout graph has one edge per resonator and one vertex per three-way
coupler.  The effective tight-binding lattice lives on the layout edges:
two sites are bonded when their parent edges share an endpoint.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import hypgeo
from .hypgeo import BOUNDARY_EPS, BoundaryError, Geodesic

SUPPORTED_P = (6, 7, 8, 9, 10, 11, 12)


class DedupError(RuntimeError):
    """Two generated points are neither clearly equal nor clearly distinct."""


@dataclass(frozen=True, eq=False)
class LayoutGraph:
    p: int
    shells: int
    geometry: str  # "hyperbolic" | "euclidean"
    vertices: np.ndarray  # complex coordinates, shape (V,)
    vertex_shell: np.ndarray  # first shell in which each vertex appears
    edges: np.ndarray  # (E, 2) vertex ids, smaller id first
    edge_midpoints: np.ndarray  # complex, shape (E,)
    faces: tuple  # per face: tuple of p edge ids in cycle order
    face_vertices: tuple  # per face: tuple of p vertex ids in cycle order
    face_shell: np.ndarray

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    def edge_faces(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_edges)]
        for f, cyc in enumerate(self.faces):
            for e in cyc:
                out[e].append(f)
        return out

    def edge_shell(self) -> np.ndarray:
        """Shell index of the first face containing each edge."""
        shell = np.full(self.n_edges, -1, dtype=int)
        for f, cyc in enumerate(self.faces):
            for e in cyc:
                if shell[e] < 0 or self.face_shell[f] < shell[e]:
                    shell[e] = self.face_shell[f]
        return shell

    def is_bipartite(self) -> bool:
        return _two_colour(self.n_vertices, self.edges)[0] is not None

    def audit(self) -> None:
        """Raise ``AssertionError`` if any structural invariant fails."""
        deg = self.degrees()
        assert deg.max(initial=0) <= 3, "vertex of degree > 3"
        assert deg.min(initial=2) >= 2, "vertex of degree < 2"
        for cyc, verts in zip(self.faces, self.face_vertices):
            assert len(cyc) == self.p and len(set(cyc)) == self.p, "face is not a p-cycle"
            for k, e in enumerate(cyc):
                pair = {verts[k], verts[(k + 1) % self.p]}
                assert set(self.edges[e]) == pair, "face cycle does not follow its vertices"
        ef = self.edge_faces()
        counts = np.array([len(x) for x in ef])
        assert counts.max(initial=1) <= 2, "edge in more than two faces"
        interior = np.all(deg[self.edges] == 3, axis=1)
        assert np.all(counts[interior] == 2), "interior edge not shared by two faces"
        shared = defaultdict(int)
        for faces in ef:
            if len(faces) == 2:
                shared[tuple(faces)] += 1
        assert all(v == 1 for v in shared.values()), "adjacent faces share more than one edge"
        assert _connected(self.n_vertices, self.edges), "layout graph is disconnected"
        if self.geometry == "hyperbolic" and self.n_vertices > 1:
            s = hypgeo.tile_edge_length(self.p, 3)
            # the closest distinct pair is always an edge for these patches;
            # a full pairwise check is cheap at the supported sizes
            z = self.vertices
            if len(z) <= 6000:
                num = np.abs(z[:, None] - z[None, :])
                den = np.abs(1 - np.conj(z)[:, None] * z[None, :])
                d = 2 * np.arctanh(np.clip(num / den, 0, 1 - 1e-16))
                np.fill_diagonal(d, np.inf)
                assert d.min() >= 0.5 * s, "vertices closer than half an edge"


@dataclass(frozen=True, eq=False)
class EffectiveLattice:
    coords: np.ndarray  # complex, one per site (parent edge midpoint)
    parent_edge: np.ndarray  # layout edge id per site
    ends: np.ndarray  # (n, 2) layout vertex ids of the parent edge
    bonds: np.ndarray  # (nb, 2) site ids, i < j
    bond_vertex: np.ndarray  # layout vertex shared by the bonded pair
    boundary: np.ndarray  # bool per site
    site_shell: np.ndarray
    triangles: tuple  # 3-site plaquettes around degree-3 layout vertices
    polygons: tuple  # p-site plaquettes around layout faces
    p: Optional[int] = None
    geometry: str = "hyperbolic"
    layout: Optional[LayoutGraph] = field(default=None, repr=False)

    @property
    def n_sites(self) -> int:
        return len(self.coords)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.bonds.ravel(), minlength=self.n_sites)

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n_sites, self.n_sites))
        i, j = self.bonds.T
        a[i, j] = 1.0
        a[j, i] = 1.0
        return a

    def neighbours(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n_sites)]
        for i, j in self.bonds:
            out[i].append(int(j))
            out[j].append(int(i))
        return out


# --------------------------------------------------------------------------
# point deduplication

class _PointIndex:
    """Spatial hash of disc points with a hyperbolic same/distinct decision.

    Points closer than ``0.25 * thr`` are the same point, points farther than
    ``0.75 * thr`` are distinct, anything in between is an error.
    """

    def __init__(self, thr: float, metric):
        self.thr = thr
        self.metric = metric
        # euclidean extent of a hyperbolic ball of radius d is at most d / 2
        self.h = 0.375 * thr
        self.cells: dict[tuple[int, int], list[int]] = defaultdict(list)
        self.points: list[complex] = []

    def _key(self, z: complex) -> tuple[int, int]:
        return (math.floor(z.real / self.h), math.floor(z.imag / self.h))

    def find_or_add(self, z: complex) -> tuple[int, bool]:
        kx, ky = self._key(z)
        hit = None
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for idx in self.cells.get((kx + dx, ky + dy), ()):
                    d = self.metric(z, self.points[idx])
                    if d < 0.25 * self.thr:
                        hit = idx
                    elif d <= 0.75 * self.thr:
                        raise DedupError(
                            f"ambiguous duplicate: points {z:.12g} and {self.points[idx]:.12g} "
                            f"are {d:.3g} apart (threshold {self.thr:.3g})"
                        )
        if hit is not None:
            return hit, False
        self.points.append(z)
        self.cells[(kx, ky)].append(len(self.points) - 1)
        return len(self.points) - 1, True


def _euclid(a: complex, b: complex) -> float:
    return abs(a - b)


# --------------------------------------------------------------------------
# builders

def build_layout(p: int, shells: int) -> LayoutGraph:
    """Central p-gon plus ``shells`` rings of neighbouring polygons.

    Each new shell adds every polygon sharing a vertex with the current
    patch.  For trivalent tilings that is the same as every polygon sharing
    an edge, so shells are grown by reflecting the outermost polygons in
    their edges.  ``p = 6`` gives the flat honeycomb with unit edges.
    """
    if not isinstance(p, (int, np.integer)) or p not in SUPPORTED_P:
        raise ValueError(f"p must be one of {SUPPORTED_P}, got {p!r}")
    if not isinstance(shells, (int, np.integer)) or shells < 0:
        raise ValueError(f"shells must be a non-negative integer, got {shells!r}")
    if p == 6:
        return _build_honeycomb(int(shells))
    return _build_hyperbolic(int(p), int(shells))


def _build_hyperbolic(p: int, shells: int) -> LayoutGraph:
    s = hypgeo.tile_edge_length(p, 3)
    central = hypgeo.polygon_vertices(p, 3, phase=-math.pi / 2 + math.pi / p)
    centres = _PointIndex(2.0 * hypgeo.inradius(p, 3), hypgeo.hyp_distance_z)
    centres.find_or_add(0j)
    faces: list[list[complex]] = [central]
    shell_of: list[int] = [0]
    frontier = [0]
    for k in range(1, shells + 1):
        new = []
        for f in frontier:
            verts = faces[f]
            ctr = centres.points[f]
            for i in range(p):
                g = Geodesic.through(verts[i], verts[(i + 1) % p])
                c = hypgeo.reflect_z(ctr, g)
                # keep the image counter-clockwise, starting at the shared edge
                img = [hypgeo.reflect_z(verts[(i + 1 - j) % p], g) for j in range(p)]
                worst = max(abs(z) for z in img)
                if worst >= 1.0 - BOUNDARY_EPS:
                    raise BoundaryError(
                        f"{{{p},3}} shell {k} reaches |z| = {worst:.12f}; "
                        f"at most {k - 1} shells fit inside the disc at eps = {BOUNDARY_EPS:g}"
                    )
                idx, added = centres.find_or_add(c)
                if added:
                    faces.append(img)
                    shell_of.append(k)
                    new.append(idx)
        frontier = new
    return _assemble(p, shells, "hyperbolic", faces, shell_of,
                     _PointIndex(0.5 * s, hypgeo.hyp_distance_z), hypgeo.midpoint_z)


_OMEGA = complex(0.5, math.sqrt(3) / 2)
_HEX_CORNERS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
_HEX_NEIGHBOURS = ((1, 1), (-1, 2), (-2, 1), (-1, -1), (1, -2), (2, -1))


def _build_honeycomb(shells: int) -> LayoutGraph:
    # hexagon centres and corners together form a unit triangular lattice;
    # integer coordinates (a, b) stand for a + b * omega
    seen = {(0, 0)}
    order = [(0, 0)]
    shell_of = [0]
    frontier = [(0, 0)]
    for k in range(1, shells + 1):
        new = []
        for a, b in frontier:
            for da, db in _HEX_NEIGHBOURS:
                c = (a + da, b + db)
                if c not in seen:
                    seen.add(c)
                    order.append(c)
                    shell_of.append(k)
                    new.append(c)
        frontier = new
    vid: dict[tuple[int, int], int] = {}
    coords: list[complex] = []
    face_verts = []
    for a, b in order:
        cyc = []
        for da, db in _HEX_CORNERS:
            key = (a + da, b + db)
            if key not in vid:
                vid[key] = len(coords)
                coords.append(key[0] + key[1] * _OMEGA)
            cyc.append(vid[key])
        face_verts.append(cyc)
    return _from_face_ids(6, shells, "euclidean", np.array(coords), face_verts, shell_of,
                          lambda u, v: 0.5 * (u + v))


def _assemble(p, shells, geometry, faces, shell_of, index: _PointIndex, midpoint) -> LayoutGraph:
    face_verts = []
    for verts in faces:
        face_verts.append([index.find_or_add(z)[0] for z in verts])
    return _from_face_ids(p, shells, geometry, np.array(index.points), face_verts, shell_of, midpoint)


def _from_face_ids(p, shells, geometry, coords, face_verts, shell_of, midpoint) -> LayoutGraph:
    vshell = np.full(len(coords), -1, dtype=int)
    eid: dict[tuple[int, int], int] = {}
    edges = []
    faces = []
    for f, cyc in enumerate(face_verts):
        for v in cyc:
            if vshell[v] < 0:
                vshell[v] = shell_of[f]
        ecyc = []
        for i in range(p):
            u, v = cyc[i], cyc[(i + 1) % p]
            key = (min(u, v), max(u, v))
            if key not in eid:
                eid[key] = len(edges)
                edges.append(key)
            ecyc.append(eid[key])
        faces.append(tuple(ecyc))
    edges = np.array(edges, dtype=int).reshape(-1, 2)
    mids = np.array([midpoint(coords[u], coords[v]) for u, v in edges], dtype=complex)
    return LayoutGraph(
        p=p,
        shells=shells,
        geometry=geometry,
        vertices=np.asarray(coords, dtype=complex),
        vertex_shell=vshell,
        edges=edges,
        edge_midpoints=mids,
        faces=tuple(faces),
        face_vertices=tuple(tuple(c) for c in face_verts),
        face_shell=np.array(shell_of, dtype=int),
    )


def medial_graph(layout: LayoutGraph) -> EffectiveLattice:
    """Line graph of the layout: one site per edge, bonds at shared vertices."""
    incident: list[list[int]] = [[] for _ in range(layout.n_vertices)]
    for e, (u, v) in enumerate(layout.edges):
        incident[u].append(e)
        incident[v].append(e)
    bonds = []
    bond_vertex = []
    triangles = []
    for v, es in enumerate(incident):
        for i, j in combinations(sorted(es), 2):
            bonds.append((i, j))
            bond_vertex.append(v)
        if len(es) == 3:
            triangles.append(tuple(sorted(es)))
    order = sorted(range(len(bonds)), key=lambda k: bonds[k])
    deg = layout.degrees()
    return EffectiveLattice(
        coords=layout.edge_midpoints.copy(),
        parent_edge=np.arange(layout.n_edges),
        ends=layout.edges.copy(),
        bonds=np.array([bonds[k] for k in order], dtype=int).reshape(-1, 2),
        bond_vertex=np.array([bond_vertex[k] for k in order], dtype=int),
        boundary=np.any(deg[layout.edges] < 3, axis=1),
        site_shell=layout.edge_shell(),
        triangles=tuple(triangles),
        polygons=tuple(layout.faces),
        p=layout.p,
        geometry=layout.geometry,
        layout=layout,
    )


def build_lattice(p: int, shells: int) -> EffectiveLattice:
    return medial_graph(build_layout(p, shells))


# --------------------------------------------------------------------------
# graph helpers

def _connected(n: int, edges: np.ndarray) -> bool:
    if n == 0:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _two_colour(n: int, edges: np.ndarray):
    """Proper 2-colouring of a graph, or ``(None, odd_cycle)``.

    Colours are found by BFS; the first edge joining two equal colours closes
    an odd cycle through the BFS tree, which is returned as a vertex list.
    """
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(int(v))
        adj[v].append(int(u))
    colour = [-1] * n
    parent = [-1] * n
    for root in range(n):
        if colour[root] >= 0:
            continue
        colour[root] = 0
        queue = [root]
        head = 0
        while head < len(queue):
            u = queue[head]
            head += 1
            for w in adj[u]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    parent[w] = u
                    queue.append(w)
                elif colour[w] == colour[u]:
                    return None, _tree_cycle(parent, u, w)
    return colour, None


def _tree_cycle(parent: list[int], u: int, w: int) -> list[int]:
    path_u = [u]
    while parent[path_u[-1]] >= 0:
        path_u.append(parent[path_u[-1]])
    path_w = [w]
    while parent[path_w[-1]] >= 0:
        path_w.append(parent[path_w[-1]])
    anc = set(path_u)
    lca = next(x for x in path_w if x in anc)
    left = path_u[: path_u.index(lca) + 1]
    right = path_w[: path_w.index(lca)]
    return left + right[::-1]
