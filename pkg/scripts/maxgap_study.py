"""Max gap of S+ on growing windows, per seed.

The largest hole of a relatively dense set is only seen on long windows;
this shows when the max gap settles.
"""

import argparse

import numpy as np

from chaodelone import TubeConfig, cut_project, random_geodesic, standard_surface


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--factor", type=float, default=0.95)
    ap.add_argument("--windows", default="50,100,200,400")
    a = ap.parse_args()
    g = standard_surface()
    cfg = TubeConfig(a.factor * g.mu)
    halves = [float(w) for w in a.windows.split(",")]
    print("seed  " + "  ".join(f"[+-{h:g}]" for h in halves))
    for seed in range(a.seeds):
        ell = random_geodesic(g, seed)
        gaps = [float(np.diff(cut_project(g, ell, cfg, (-h, h)).coords).max()) for h in halves]
        print(f"{seed:4d}  " + "  ".join(f"{x:8.4f}" for x in gaps))


if __name__ == "__main__":
    main()
