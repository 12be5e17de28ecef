"""Compare the numba-jit and pure-numpy kernel paths.

Usage: python3 benchmarks/bench_kernels.py [--sizes 200,1000,5000]

The jit path is warmed up once before timing so compilation cost is
reported separately instead of polluting the steady-state numbers.
"""

import argparse
import os
import random
import time

from icon_engine.kernels import kmeans, knn_graph


def make_points(n, dim=3, seed=0):
    rnd = random.Random(seed)
    return [tuple(rnd.uniform(-10.0, 10.0) for _ in range(dim))
            for _ in range(n)]


def timed(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def run_path(path, points, km_k, knn_k):
    os.environ["ICON_NUMBA"] = "1" if path == "numba" else "0"
    km_s, labels = timed(lambda: kmeans(points, km_k))
    knn_s, edges = timed(lambda: knn_graph(points, knn_k))
    return km_s, knn_s, labels, edges


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="200,1000,5000",
                        help="comma-separated point counts")
    parser.add_argument("--kmeans-k", type=int, default=5)
    parser.add_argument("--knn-k", type=int, default=8)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    os.environ["ICON_NUMBA"] = "1"
    start = time.perf_counter()
    kmeans(make_points(16), 2)
    knn_graph(make_points(16), 2)
    print(f"numba warm-up (compile): {time.perf_counter() - start:.2f}s\n")

    header = (f"{'n':>6}  {'kmeans jit':>11}  {'kmeans np':>11}  "
              f"{'speedup':>7}  {'knn jit':>11}  {'knn np':>11}  {'speedup':>7}")
    print(header)
    print("-" * len(header))
    for n in sizes:
        points = make_points(n)
        km_j, knn_j, labels_j, edges_j = run_path(
            "numba", points, args.kmeans_k, args.knn_k)
        km_n, knn_n, labels_n, edges_n = run_path(
            "numpy", points, args.kmeans_k, args.knn_k)
        assert labels_j == labels_n, "paths disagree on kmeans labels"
        assert edges_j == edges_n, "paths disagree on knn edges"
        print(f"{n:>6}  {km_j:>10.4f}s  {km_n:>10.4f}s  {km_n / km_j:>6.1f}x"
              f"  {knn_j:>10.4f}s  {knn_n:>10.4f}s  {knn_n / knn_j:>6.1f}x")
    print("\nboth paths produced identical labels and edge lists")


if __name__ == "__main__":
    main()
