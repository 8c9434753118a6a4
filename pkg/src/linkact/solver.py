"""Exact maximum-weight activation-set optimization.

``solve_exact`` runs a depth-first branch-and-bound over the links: at every
node a link is in, out, or undecided, subtrees are cut when the undecided
weight cannot beat the incumbent, and -- because feasibility is hereditary
under every scheme -- as soon as the in-set itself is infeasible.
``brute_force`` is the independent enumeration oracle used by the acceptance
suite. ``reduce_sud_to_pic`` is the power-raising transform that embeds any
SUD instance into a cancellation-free PIC instance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import core
from .feasibility import SchemeConfig, Solution, Verdict, check, verify_solution
from .instance import Instance

BRUTE_FORCE_MAX_K = 20


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    TIME_LIMIT = "time_limit"
    INFEASIBLE_EMPTY_ONLY = "infeasible_empty_only"


@dataclass
class SolveReport:
    solution: Solution
    nodes_explored: int
    wall_time_s: float
    status: SolveStatus


def canonical_weight(weights: np.ndarray, members) -> float:
    """Weight of a set, summed over values sorted ascending. Equal weight
    multisets then always yield the identical float, which keeps optimum
    comparisons across solvers exact."""
    total = 0.0
    for v in sorted(float(weights[i]) for i in members):
        total += v
    return total


def _solver_prep(inst: Instance):
    from .feasibility import _prep

    inst.require_weights()
    return _prep(inst)


def branch_order(inst: Instance) -> list[int]:
    """Descending weight, then descending single-link SNR, then index."""
    w = inst.require_weights()
    snr = inst.snr()
    return sorted(range(inst.K), key=lambda k: (-w[k], -snr[k], k))


def _cancels_for(inst: Instance, cfg: SchemeConfig, active: list[int]) -> Verdict:
    verdict = check(inst, active, cfg)
    if not verdict.feasible:
        raise AssertionError("solver returned a set the feasibility checker rejects")
    return verdict


def solve_exact(
    inst: Instance, cfg: SchemeConfig, budget_s: Optional[float] = None
) -> SolveReport:
    """Maximum-weight feasible activation set for the scheme in ``cfg``.

    Deterministic for a given instance and config. With a budget, returns
    the best (still verified) incumbent and TIME_LIMIT status on expiry.
    """
    if budget_s is not None and budget_s <= 0:
        raise ValueError("budget must be positive")
    inst.require_weights()
    t0 = time.monotonic()
    if inst.K == 0:
        sol = Solution(active=(), cancels={}, weight=0.0)
        return SolveReport(sol, 0, time.monotonic() - t0, SolveStatus.INFEASIBLE_EMPTY_ONLY)
    prep = _solver_prep(inst)
    order = branch_order(inst)
    cap = cfg.cap_for(inst.K)
    mask, weight, nodes, timed_out = core.solve(prep, order, cfg.scheme.code, cap, budget_s)
    active = [i for i in range(inst.K) if mask >> i & 1]
    verdict = _cancels_for(inst, cfg, active)
    sol = Solution(active=tuple(active), cancels=dict(verdict.cancels), weight=float(weight))
    ok, violation = verify_solution(inst, cfg, sol)
    if not ok:
        raise AssertionError(f"solver solution failed verification: {violation}")
    if timed_out:
        status = SolveStatus.TIME_LIMIT
    elif not active:
        status = SolveStatus.INFEASIBLE_EMPTY_ONLY
    else:
        status = SolveStatus.OPTIMAL
    return SolveReport(sol, nodes, time.monotonic() - t0, status)


def brute_force(inst: Instance, cfg: SchemeConfig) -> Solution:
    """Enumerate all 2^K subsets and keep the maximum-weight feasible one
    (ties: lexicographically smallest index tuple). Oracle for the exact
    solver; refuses K beyond the guard."""
    if inst.K > BRUTE_FORCE_MAX_K:
        raise ValueError(f"brute force is guarded to K <= {BRUTE_FORCE_MAX_K}")
    weights = inst.require_weights()
    if inst.K == 0:
        return Solution(active=(), cancels={}, weight=0.0)
    prep = _solver_prep(inst)
    cap = cfg.cap_for(inst.K)
    scheme_code = cfg.scheme.code

    K = inst.K
    # Approximate subset weights, used only to scan in descending order and
    # stop early; contenders are re-scored canonically.
    approx = np.zeros(1 << K)
    for i in range(K):
        bit = 1 << i
        approx[bit : bit << 1] = approx[:bit] + weights[i]
    scan = np.argsort(-approx, kind="stable")

    best_weight = -1.0
    best_set: Optional[tuple[int, ...]] = None
    slack = 1e-9 * max(1.0, float(np.max(weights))) * K
    for mask in scan:
        mask = int(mask)
        if best_set is not None and approx[mask] < best_weight - slack:
            break
        members = [i for i in range(K) if mask >> i & 1]
        if not core.feasible(prep, members, scheme_code, cap):
            continue
        w = canonical_weight(weights, members)
        tup = tuple(members)
        if w > best_weight or (w == best_weight and (best_set is None or tup < best_set)):
            best_weight = w
            best_set = tup
    if best_set is None or not best_set:
        return Solution(active=(), cancels={}, weight=0.0)
    verdict = _cancels_for(inst, cfg, list(best_set))
    return Solution(active=best_set, cancels=dict(verdict.cancels), weight=best_weight)


def reduce_sud_to_pic(inst: Instance, epsilon: Optional[float] = None) -> Instance:
    """Embed an SUD instance into a PIC instance where no cancellation
    condition can ever hold, preserving feasibility of every activation set.

    Per receiver k, the transmit power is raised just far enough that no
    interfering signal m clears gamma_m - epsilon against k's own signal
    alone; k's outgoing gains are scaled down by the same factor so every
    other receiver sees unchanged received powers, and k's threshold is
    scaled up by the factor so its own SINR condition is unchanged.
    """
    gamma = inst.require_thresholds()
    if epsilon is None:
        epsilon = 1e-3 * float(np.min(gamma))
    if not 0.0 < epsilon < float(np.min(gamma)):
        raise ValueError("epsilon must lie in (0, min threshold)")

    recv = inst.received_power()
    K = inst.K
    new_powers = inst.powers.copy()
    for k in range(K):
        bound = inst.powers[k]
        for m in range(K):
            if m == k:
                continue
            cand = (recv[m, k] / (gamma[m] - epsilon) - inst.noise) / inst.gains[k, k]
            if cand > bound:
                bound = cand
        new_powers[k] = bound

    scale = inst.powers / new_powers  # <= 1
    new_gains = inst.gains.copy()
    for k in range(K):
        for m in range(K):
            if m != k:
                new_gains[k, m] = inst.gains[k, m] * scale[k]
    new_thresholds = gamma / scale

    meta = dict(inst.metadata)
    meta["reduction"] = {"epsilon": epsilon}
    out = Instance(
        K=K,
        gains=new_gains,
        powers=new_powers,
        noise=inst.noise,
        thresholds=new_thresholds,
        weights=None if inst.weights is None else inst.weights.copy(),
        metadata=meta,
    )
    return out
