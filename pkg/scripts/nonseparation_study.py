"""How often does S+_l show a gap below a threshold once rho exceeds mu?

Prints, per seed, the minimum gap on the window and the fraction of seeds
below the threshold, with a binomial estimate for "k of 5" events.
"""

import argparse
import math

import numpy as np

from chaodelone import TubeConfig, cut_project, random_geodesic, standard_surface


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=200)
    ap.add_argument("--factor", type=float, default=1.05)
    ap.add_argument("--half-window", type=float, default=200.0)
    ap.add_argument("--threshold", type=float, default=0.01)
    a = ap.parse_args()
    g = standard_surface()
    cfg = TubeConfig(a.factor * g.mu)
    gaps = []
    for seed in range(a.seeds):
        ps = cut_project(g, random_geodesic(g, seed), cfg, (-a.half_window, a.half_window))
        gaps.append(float(ps.gaps().min()))
        print(f"seed {seed:4d}  min gap {gaps[-1]:.6f}")
    gaps = np.array(gaps)
    p = float(np.mean(gaps < a.threshold))
    at_least_4 = sum(math.comb(5, k) * p**k * (1 - p) ** (5 - k) for k in (4, 5))
    print(f"fraction below {a.threshold}: {p:.4f}  ({int(np.sum(gaps < a.threshold))}/{len(gaps)})")
    print(f"median min gap {np.median(gaps):.4f}; quartiles {np.quantile(gaps, [0.25, 0.75]).round(4)}")
    print(f"P(at least 4 of 5 below) = {at_least_4:.3e}")


if __name__ == "__main__":
    main()
