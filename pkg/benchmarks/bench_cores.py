#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python twin.

Usage: python benchmarks/bench_cores.py [--quick]

Times per-set feasibility checks, receiver saturation, and full
branch-and-bound solves on generated topologies, for whichever backends are
importable.
"""

import argparse
import time

import numpy as np

from linkact import _core_py
from linkact.instance import TopologySpec, generate
from linkact.units import db_to_linear

try:
    from linkact import _core_cy
except ImportError:
    _core_cy = None


def build_problem(K, seed, gamma_db=-6.0):
    topo = generate(TopologySpec(dataset="N", density="sparse", K=K, seed=seed))
    inst = topo.with_thresholds(db_to_linear(gamma_db)).with_weights(1.0)
    recv = inst.received_power().tolist()
    gamma = inst.thresholds.tolist()
    return inst, recv, gamma, inst.noise


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_feasibility(backend, recv, gamma, eta, K, n_checks, scheme, cap):
    prep = backend.prepare(recv, gamma, eta)
    rng = np.random.default_rng(1)
    sets = [sorted(rng.choice(K, size=rng.integers(2, K), replace=False).tolist()) for _ in range(n_checks)]

    def run():
        for act in sets:
            backend.feasible(prep, act, scheme, cap)

    return time_call(run)


def bench_saturation(backend, n_receivers):
    rng = np.random.default_rng(2)
    cases = []
    for _ in range(n_receivers):
        n = int(rng.integers(5, 25))
        cases.append(
            (rng.lognormal(0, 2, n).tolist(), rng.lognormal(0, 1, n).tolist(), float(rng.lognormal(0, 1)))
        )

    def run():
        for powers, thrs, base in cases:
            backend.sic_receiver(powers, thrs, base, len(powers))

    return time_call(run)


def bench_solve(backend, recv, gamma, eta, weights, K, scheme, cap):
    prep = backend.prepare(recv, gamma, eta, weights)
    order = list(range(K))

    def run():
        backend.solve(prep, order, scheme, cap, None)

    return time_call(run, repeats=1)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    backends = [("python", _core_py)]
    if _core_cy is not None:
        backends.append(("cython", _core_cy))
    else:
        print("compiled backend not importable; benchmarking the fallback only")

    K = 20 if args.quick else 30
    n_checks = 2_000 if args.quick else 20_000
    n_receivers = 200 if args.quick else 2_000
    inst, recv, gamma, eta = build_problem(K, seed=1)
    weights = [1.0] * K

    rows = []
    for label, scheme, cap in (
        ("feasible SUD", _core_py.SCHEME_SUD, 0),
        ("feasible PIC", _core_py.SCHEME_PIC, 0),
        ("feasible SIC", _core_py.SCHEME_SIC, K - 1),
    ):
        times = {
            name: bench_feasibility(mod, recv, gamma, eta, K, n_checks, scheme, cap)
            for name, mod in backends
        }
        rows.append((f"{label} x{n_checks}", times))
    rows.append(
        (f"saturation x{n_receivers}", {name: bench_saturation(mod, n_receivers) for name, mod in backends})
    )
    for label, scheme in (("solve SUD", _core_py.SCHEME_SUD), ("solve PIC", _core_py.SCHEME_PIC), ("solve SIC", _core_py.SCHEME_SIC)):
        cap = 0 if scheme == _core_py.SCHEME_SUD else K - 1
        times = {
            name: bench_solve(mod, recv, gamma, eta, weights, K, scheme, cap)
            for name, mod in backends
        }
        rows.append((f"{label} K={K}", times))

    names = [name for name, _ in backends]
    width = max(len(r[0]) for r in rows)
    header = f"{'workload'.ljust(width)}  " + "  ".join(f"{n:>10}" for n in names)
    if len(names) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, times in rows:
        line = label.ljust(width) + "  " + "  ".join(f"{times[n]:10.4f}" for n in names)
        if len(names) == 2:
            line += f"  {times['python'] / times['cython']:7.1f}x"
        print(line)

    # the two backends must agree exactly on a spot solve
    if len(backends) == 2:
        pp = _core_py.prepare(recv, gamma, eta, weights)
        pc = _core_cy.prepare(recv, gamma, eta, weights)
        for scheme in (0, 2, 3):
            cap = 0 if scheme == 0 else K - 1
            a = _core_py.solve(pp, list(range(K)), scheme, cap, None)
            b = _core_cy.solve(pc, list(range(K)), scheme, cap, None)
            assert a == b, f"backend divergence: {a} != {b}"
        print("\nbackends agree bitwise on solve results")


if __name__ == "__main__":
    main()
