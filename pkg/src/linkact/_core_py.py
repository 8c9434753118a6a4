"""Pure-Python twin of the compiled kernels in ``_core_cy.pyx``.

Both backends must stay in lockstep: same arithmetic, same summation order,
same tie-breaking, so that verdicts and optima agree bit for bit.
``tests/test_core_parity.py`` enforces this. Keep edits mirrored.

Conventions shared by both backends:
  * link indices are 0-based;
  * ``recv`` is the K*K received-power table, flat C order,
    recv[m*K + k] = power[m] * gain[m][k] (transmitter m at receiver k);
  * every threshold comparison ``num / den >= thr`` is evaluated as
    ``num >= thr * den * (1 - 1e-9)`` (one-sided relative tolerance).
"""

from __future__ import annotations

import time

REL_TOL = 1e-9
_OMT = 1.0 - REL_TOL

SCHEME_SUD = 0
SCHEME_SLIC = 1
SCHEME_PIC = 2
SCHEME_SIC = 3

_TIME_CHECK_MASK = 0x7FF  # poll the clock every 2048 nodes


class Prep:
    """Per-instance arrays unpacked into plain lists for fast scalar access."""

    __slots__ = ("K", "recv", "gamma", "eta", "weights")

    def __init__(self, K, recv_flat, gamma, eta, weights):
        self.K = K
        self.recv = recv_flat
        self.gamma = gamma
        self.eta = eta
        self.weights = weights


def prepare(recv2d, gamma, eta, weights=None):
    """recv2d: K x K nested sequence; gamma: length-K sequence."""
    K = len(gamma)
    flat = []
    for m in range(K):
        row = recv2d[m]
        for k in range(K):
            flat.append(float(row[k]))
    w = [float(x) for x in weights] if weights is not None else None
    return Prep(K, flat, [float(g) for g in gamma], float(eta), w)


def _canonical_weight(weights, members):
    """Sum of the members' weights, values sorted ascending first.

    Identical multisets of weights then always produce the identical float,
    which is what makes optimum-weight comparisons across search strategies
    exact.
    """
    vals = sorted(weights[i] for i in members)
    total = 0.0
    for v in vals:
        total += v
    return total


def feasible(prep, active, scheme, cap):
    """Is the activation set feasible under the given decoding scheme?

    ``active`` must be sorted ascending. ``cap`` is the per-receiver stage
    budget (SIC only; pass 0 for SUD semantics).
    """
    if scheme == SCHEME_SUD:
        return _feasible_sud(prep, active)
    if scheme == SCHEME_PIC or scheme == SCHEME_SLIC:
        return _feasible_pic(prep, active, scheme == SCHEME_SLIC)
    if scheme == SCHEME_SIC:
        return _feasible_sic(prep, active, cap)
    raise ValueError(f"unknown scheme code {scheme}")


def _feasible_sud(prep, active):
    recv = prep.recv
    gamma = prep.gamma
    K = prep.K
    for k in active:
        tot = prep.eta
        for m in active:
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if own < gamma[k] * (tot - own) * _OMT:
            return False
    return True


def _feasible_pic(prep, active, slic):
    recv = prep.recv
    gamma = prep.gamma
    K = prep.K
    for k in active:
        tot = prep.eta
        for m in active:
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if slic:
            best = -1
            best_pow = 0.0
            for m in active:
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT and pmk > best_pow:
                    best = m
                    best_pow = pmk
            removed = best_pow if best >= 0 else 0.0
        else:
            removed = 0.0
            for m in active:
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT:
                    removed += pmk
        if own < gamma[k] * (tot - own - removed) * _OMT:
            return False
    return True


def _feasible_sic(prep, active, cap):
    recv = prep.recv
    gamma = prep.gamma
    K = prep.K
    for k in active:
        tot = prep.eta
        for m in active:
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if own >= gamma[k] * (tot - own) * _OMT:
            continue  # decodes without any cancellation
        powers = []
        thrs = []
        for m in active:
            if m != k:
                powers.append(recv[m * K + k])
                thrs.append(gamma[m])
        if not _sic_receiver_verdict(powers, thrs, own + prep.eta, cap, own, gamma[k], prep.eta):
            return False
    return True


def _sic_receiver_verdict(powers, thrs, base, cap, own_num, own_thr, eta):
    """True iff some cancellation sequence of length <= cap leaves residual
    interference R with own_num >= own_thr * (R + eta) * (1 - tol)."""
    n = len(powers)
    rest = 0.0
    for p in powers:
        rest += p
    if own_num >= own_thr * (rest + eta) * _OMT:
        return True
    if cap <= 0:
        return False
    # Greedy fixpoint pass: highest margin decodable first. For cap >= |S*|
    # this settles the verdict outright.
    margins = [powers[i] / thrs[i] for i in range(n)]
    alive = [True] * n
    order = []
    r = rest
    while True:
        best = -1
        best_u = 0.0
        for i in range(n):
            if alive[i]:
                p = powers[i]
                if p >= thrs[i] * (base + (r - p)) * _OMT and (best < 0 or margins[i] > best_u):
                    best = i
                    best_u = margins[i]
        if best < 0:
            break
        alive[best] = False
        r -= powers[best]
        order.append(best)
        if len(order) <= cap and own_num >= own_thr * (r + eta) * _OMT:
            return True
    if len(order) <= cap:
        return False  # full saturation fits inside the cap and still fails
    # Individual thresholds with a binding cap: exact search over sequences
    # restricted to the saturation set (every reachable set is a subset of it).
    star = sorted(order)
    found = _capped_search(powers, thrs, base, cap, star, rest, own_num, own_thr, eta)
    return found[2]


def _capped_search(powers, thrs, base, cap, star, rest, own_num, own_thr, eta):
    """Memoized DFS over cancellable subsets of the saturation set ``star``.

    Returns (best_cancelled_power, best_path, early_hit). Candidates are
    tried in descending margin order (ties by input position) so the first
    optimum found is canonical. When own_num < 0 the own-condition early
    exit is disabled and the true minimum-residual path is produced.
    """
    ns = len(star)
    margins = [(powers[i] / thrs[i], i) for i in star]
    margins.sort(key=lambda t: (-t[0], t[1]))
    cand = [i for _, i in margins]
    pos = {i: b for b, i in enumerate(star)}
    pow_desc = sorted((powers[i] for i in star), reverse=True)
    prefix = [0.0]
    for p in pow_desc:
        prefix.append(prefix[-1] + p)

    best_sum = -1.0
    best_path: list[int] = []
    visited = set()
    path: list[int] = []

    def dfs(mask, r, csum, depth):
        nonlocal best_sum, best_path
        if csum > best_sum:
            best_sum = csum
            best_path = path.copy()
        if own_num >= 0.0 and own_num >= own_thr * (r + eta) * _OMT:
            return True
        if depth == cap:
            return False
        if csum + prefix[cap - depth] <= best_sum:
            return False
        for i in cand:
            b = 1 << pos[i]
            if mask & b:
                continue
            p = powers[i]
            if p < thrs[i] * (base + (r - p)) * _OMT:
                continue
            nmask = mask | b
            if nmask in visited:
                continue
            visited.add(nmask)
            path.append(i)
            hit = dfs(nmask, r - p, csum + p, depth + 1)
            path.pop()
            if hit:
                return True
        return False

    hit = dfs(0, rest, 0.0, 0)
    return best_sum, best_path, hit


def sic_receiver(powers, thrs, base, cap):
    """Cancellation order for one receiver.

    Uncapped (cap >= len(powers)): saturation to the fixpoint, cancelling the
    highest-margin decodable interferer at every stage (ties by input
    position). Capped: the sequence of length <= cap minimizing residual
    interference, by exact memoized search over the saturation set.

    Returns (order, residual): input positions in cancellation order and the
    total power of the uncancelled interferers.
    """
    n = len(powers)
    powers = [float(p) for p in powers]
    thrs = [float(t) for t in thrs]
    base = float(base)
    rest = 0.0
    for p in powers:
        rest += p
    margins = [powers[i] / thrs[i] for i in range(n)]
    alive = [True] * n
    order = []
    r = rest
    while True:
        best = -1
        best_u = 0.0
        for i in range(n):
            if alive[i]:
                p = powers[i]
                if p >= thrs[i] * (base + (r - p)) * _OMT and (best < 0 or margins[i] > best_u):
                    best = i
                    best_u = margins[i]
        if best < 0:
            break
        alive[best] = False
        r -= powers[best]
        order.append(best)
    if cap >= len(order):
        return order, r
    star = sorted(order)
    _, best_path, _ = _capped_search(powers, thrs, base, cap, star, rest, -1.0, 0.0, 0.0)
    r = rest
    for i in best_path:
        r -= powers[i]
    return best_path, r


def pic_cancels(prep, active, slic):
    """(feasible, cancels) with cancels parallel to ``active``; each entry is
    the ascending list of interferers the receiver decodes and removes."""
    recv = prep.recv
    gamma = prep.gamma
    K = prep.K
    feas = True
    cancels = []
    for k in active:
        tot = prep.eta
        for m in active:
            tot += recv[m * K + k]
        own = recv[k * K + k]
        ck = []
        removed = 0.0
        if slic:
            best = -1
            best_pow = 0.0
            for m in active:
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT and pmk > best_pow:
                    best = m
                    best_pow = pmk
            if best >= 0:
                ck.append(best)
                removed = best_pow
        else:
            for m in active:
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT:
                    ck.append(m)
                    removed += pmk
        if own < gamma[k] * (tot - own - removed) * _OMT:
            feas = False
        cancels.append(ck)
    return feas, cancels


def sic_cancels(prep, active, cap):
    """(feasible, cancels) for SIC; cancels entries are link indices in
    cancellation order, parallel to ``active``."""
    recv = prep.recv
    gamma = prep.gamma
    K = prep.K
    feas = True
    cancels = []
    for k in active:
        others = [m for m in active if m != k]
        powers = [recv[m * K + k] for m in others]
        thrs = [gamma[m] for m in others]
        own = recv[k * K + k]
        order, residual = sic_receiver(powers, thrs, own + prep.eta, cap)
        if own < gamma[k] * (residual + prep.eta) * _OMT:
            feas = False
        cancels.append([others[i] for i in order])
    return feas, cancels


def pair_conflicts(prep, scheme, cap):
    """Bitmask per link of the partners it can never be active with."""
    K = prep.K
    masks = [0] * K
    for i in range(K):
        for j in range(i + 1, K):
            if not feasible(prep, [i, j], scheme, cap):
                masks[i] |= 1 << j
                masks[j] |= 1 << i
    return masks


def solve(prep, order, scheme, cap, budget_s):
    """Depth-first branch-and-bound for the maximum-weight feasible set.

    ``order`` is the branch order (link indices). Returns
    (best_mask, best_weight, nodes, timed_out). Pruning uses the hereditary
    property (an infeasible partial set never extends to a feasible one) and
    the remaining-weight bound.
    """
    K = prep.K
    if K > 63:
        raise ValueError("solver core supports at most 63 links")
    weights = prep.weights
    if weights is None:
        raise ValueError("weights not set")
    recv = prep.recv
    eta = prep.eta

    conflict = pair_conflicts(prep, scheme, cap)
    singles = [c for c in order if feasible(prep, [c], scheme, cap)]

    deadline = None if budget_s is None else time.monotonic() + budget_s
    state = {"best_w": 0.0, "best_mask": 0, "nodes": 0, "timed_out": False}
    sud = scheme == SCHEME_SUD

    def expired():
        state["nodes"] += 1
        if deadline is not None and (state["nodes"] & _TIME_CHECK_MASK) == 0:
            if time.monotonic() > deadline:
                state["timed_out"] = True
        return state["timed_out"]

    def dfs(in_list, in_mask, w_in, cand, interf):
        if expired():
            return
        n = len(cand)
        rem = [0.0] * (n + 1)
        for i in range(n - 1, -1, -1):
            rem[i] = rem[i + 1] + weights[cand[i]]
        for i in range(n):
            if state["timed_out"]:
                return
            if w_in + rem[i] <= state["best_w"]:
                break
            c = cand[i]
            if conflict[c] & in_mask:
                continue
            if sud:
                new_interf = [interf[k] + recv[c * K + k] for k in range(K)]
                ok = recv[c * K + c] >= prep.gamma[c] * (new_interf[c] - recv[c * K + c]) * _OMT
                if ok:
                    for k in in_list:
                        own = recv[k * K + k]
                        if own < prep.gamma[k] * (new_interf[k] - own) * _OMT:
                            ok = False
                            break
                if not ok:
                    continue
            else:
                new_interf = None
                new_in_sorted = sorted(in_list + [c])
                if not feasible(prep, new_in_sorted, scheme, cap):
                    continue
            new_in = in_list + [c]
            new_mask = in_mask | (1 << c)
            w_new = w_in + weights[c]
            if w_new > state["best_w"]:
                cw = _canonical_weight(weights, new_in)
                if cw > state["best_w"]:
                    state["best_w"] = cw
                    state["best_mask"] = new_mask
            # one-step lookahead: drop candidates that cannot join the new
            # in-set (hereditary, so they can never join deeper either);
            # shrinking the candidate list is what gives the weight bound
            # its pruning power
            new_cand = []
            if sud:
                for j in range(i + 1, n):
                    u = cand[j]
                    if conflict[u] & new_mask:
                        continue
                    tot_u = new_interf[u] + recv[u * K + u]
                    if recv[u * K + u] < prep.gamma[u] * (tot_u - recv[u * K + u]) * _OMT:
                        continue
                    ok = True
                    for k in new_in:
                        own = recv[k * K + k]
                        if own < prep.gamma[k] * (new_interf[k] + recv[u * K + k] - own) * _OMT:
                            ok = False
                            break
                    if ok:
                        new_cand.append(u)
            elif scheme != SCHEME_SIC:
                for j in range(i + 1, n):
                    u = cand[j]
                    if conflict[u] & new_mask:
                        continue
                    if feasible(prep, sorted(new_in + [u]), scheme, cap):
                        new_cand.append(u)
            else:
                # measured: full lookahead prunes almost nothing for SIC at
                # desk scale (strong interferers stay cancellable) while
                # costing a saturation sweep per candidate; pairwise masks
                # only
                for j in range(i + 1, n):
                    u = cand[j]
                    if not (conflict[u] & new_mask):
                        new_cand.append(u)
            if new_cand:
                dfs(new_in, new_mask, w_new, new_cand, new_interf)
                if state["timed_out"]:
                    return

    interf0 = [eta] * K if sud else None
    dfs([], 0, 0.0, singles, interf0)
    return state["best_mask"], state["best_w"], state["nodes"], state["timed_out"]
