"""SVG drawings of layouts, the top eigenstate and compact loop states."""
import argparse
from pathlib import Path

from hyperlat import svg
from hyperlat.lattice import build_layout, medial_graph
from hyperlat.spectra import build_loop_state, diagonalize
from hyperlat.tightbinding import ModelParams, assemble_full_wave


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("gallery"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    # even p: one face carries a loop; odd p: two faces sharing an edge
    for p, shells, faces in ((6, 2, (0,)), (7, 2, (0, 1)), (8, 2, (0,)), (9, 2, (0, 1))):
        layout = build_layout(p, shells)
        lat = medial_graph(layout)
        spec = diagonalize(assemble_full_wave(lat, ModelParams()))
        files = {
            f"layout_p{p}.svg": svg.render_layout(layout, lat),
            f"top_state_p{p}.svg": svg.render_eigenstate(lat, spec.eigenvectors[:, -1]),
            f"loop_state_p{p}.svg": svg.render_eigenstate(lat, build_loop_state(lat, faces).amplitudes),
        }
        for name, text in files.items():
            (args.out / name).write_text(text)
            print(args.out / name)


if __name__ == "__main__":
    main()
