"""Layout and effective-lattice spacings for {p,3} tilings, in units of R."""
import argparse

from hyperlat.hypgeo import circumradius, inradius, medial_spacing, tile_edge_length


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("p", nargs="*", type=int, default=list(range(7, 13)))
    args = ap.parse_args()
    print(f"{'p':>3} {'edge':>9} {'medial':>9} {'circum':>9} {'inradius':>9}")
    for p in args.p:
        print(f"{p:>3} {tile_edge_length(p):9.6f} {medial_spacing(p):9.6f} "
              f"{circumradius(p):9.6f} {inradius(p):9.6f}")


if __name__ == "__main__":
    main()
