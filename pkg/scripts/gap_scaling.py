"""Flat-band gap against the layout graph's algebraic connectivity.

The full-wave matrix is B^T B - 2 with B the unsigned vertex-edge incidence
matrix, so above the flat band its spectrum is that of the signless
Laplacian D + A of the layout, shifted by -2.  For even p the layout is
bipartite, D + A is similar to the Laplacian D - A, and the gap is exactly
the Fiedler value, which vanishes only as the patch grows.  For odd p the
signless Laplacian has no zero mode and the gap stays finite.
"""
import argparse

import numpy as np
from scipy.sparse import csgraph, coo_matrix

from hyperlat.lattice import build_layout, medial_graph
from hyperlat.spectra import diagonalize, flat_band_report
from hyperlat.tightbinding import ModelParams, assemble_full_wave


def layout_laplacians(g):
    n = g.n_vertices
    a = coo_matrix((np.ones(len(g.edges)), (g.edges[:, 0], g.edges[:, 1])), shape=(n, n))
    a = (a + a.T).toarray()
    lap = csgraph.laplacian(a)
    signless = np.diag(a.sum(1)) + a
    return np.linalg.eigvalsh(lap), np.linalg.eigvalsh(signless)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--p", type=int, nargs="+", default=[7, 8])
    ap.add_argument("--shells", type=int, nargs="+", default=[1, 2, 3, 4])
    args = ap.parse_args()
    print(f"{'p':>3} {'shells':>6} {'gap':>12} {'fiedler':>12} {'min signless':>13} {'ratio':>7}")
    for p in args.p:
        prev = None
        for k in args.shells:
            g = build_layout(p, k)
            gap = flat_band_report(diagonalize(assemble_full_wave(medial_graph(g), ModelParams()))).gap
            lap, sl = layout_laplacians(g)
            ratio = "" if prev is None else f"{prev / gap:7.2f}"
            print(f"{p:>3} {k:>6} {gap:12.6g} {lap[1]:12.6g} {sl[0]:13.6g} {ratio}")
            prev = gap


if __name__ == "__main__":
    main()
