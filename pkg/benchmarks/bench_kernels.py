"""Benchmark the compiled kernel backend against the pure NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--triangles N] [--rays N]

Times the two hot kernels (ray casting, plane splitting) on an identical
random scene and prints a small table with the speedup. Runs with whatever
backends are importable; a missing extension is reported, not an error.
"""

import argparse
import time

import numpy as np
from scipy.spatial import ConvexHull


def build_scene(n_triangles, seed=7):
    rng = np.random.default_rng(seed)
    verts = []
    tris = []
    base = 0
    while sum(len(t) for t in tris) < n_triangles:
        pts = rng.uniform(-2, 2, size=(40, 3)) + rng.uniform(-10, 10, size=3)
        hull = ConvexHull(pts)
        v, t = hull.points, hull.simplices
        verts.append(v)
        tris.append(t + base)
        base += len(v)
    return np.concatenate(verts), np.concatenate(tris)[:n_triangles], rng


def bench_rays(backend, vertices, triangles, rays):
    start = time.perf_counter()
    hits = 0
    for origin, direction in rays:
        idx, t = backend.ray_triangle_hits(origin, direction, vertices, triangles)
        hits += len(idx)
    return time.perf_counter() - start, hits


def bench_splits(backend, vertices, triangles, cuts):
    start = time.perf_counter()
    produced = 0
    for axis, offset, keep in cuts:
        v2, kept, disc = backend.split_triangles_by_plane(
            vertices, triangles, axis, offset, keep)
        produced += len(kept) + len(disc)
    return time.perf_counter() - start, produced


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--triangles", type=int, default=20000)
    parser.add_argument("--rays", type=int, default=2000)
    parser.add_argument("--cuts", type=int, default=60)
    args = parser.parse_args()

    from sectionlab.kernels import _pure
    backends = [("pure", _pure)]
    try:
        from sectionlab.kernels import _native
        backends.append(("native", _native))
    except ImportError:
        print("compiled extension not built; benchmarking the fallback only")

    vertices, triangles, rng = build_scene(args.triangles)
    rays = []
    for _ in range(args.rays):
        d = rng.normal(size=3)
        rays.append((rng.uniform(-15, 15, size=3), d / np.linalg.norm(d)))
    cuts = [(int(rng.integers(3)),
             float(rng.uniform(-8, 8)),
             bool(rng.random() < 0.5)) for _ in range(args.cuts)]

    print(f"scene: {len(triangles)} triangles, {args.rays} rays, "
          f"{args.cuts} plane splits\n")
    print(f"{'kernel':<14}{'backend':<10}{'time (s)':>10}{'checksum':>12}")
    results = {}
    for name, backend in backends:
        dt, hits = bench_rays(backend, vertices, triangles, rays)
        results[("rays", name)] = dt
        print(f"{'ray casting':<14}{name:<10}{dt:>10.3f}{hits:>12}")
    for name, backend in backends:
        dt, produced = bench_splits(backend, vertices, triangles, cuts)
        results[("split", name)] = dt
        print(f"{'plane split':<14}{name:<10}{dt:>10.3f}{produced:>12}")
    if len(backends) == 2:
        print()
        for kernel in ("rays", "split"):
            speedup = results[(kernel, "pure")] / results[(kernel, "native")]
            print(f"native speedup, {kernel}: {speedup:.1f}x")


if __name__ == "__main__":
    main()
