"""Flat-band degeneracy and gap versus patch size for several p."""
import argparse
import time

from hyperlat.spectra import shell_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, nargs="+", default=[6, 7, 8, 9])
    ap.add_argument("--shells", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()
    print(f"{'p':>3} {'shells':>6} {'sites':>6} {'flat':>6} {'gap':>12} {'max higher gap':>15}")
    for p in args.p:
        t0 = time.perf_counter()
        rows, _ = shell_scan(p, args.shells)
        for r in rows:
            print(f"{p:>3} {r.shells:>6} {r.n:>6} {r.degeneracy:>6} {r.gap:12.6g} {r.higher_gap:15.6g}")
        print(f"    ({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
