# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_core_py``. Same arithmetic, same iteration order, same
tie-breaking; the build disables floating-point contraction so results match
the pure-Python kernels bit for bit. Keep edits mirrored with _core_py.py."""

import time

from libc.stdlib cimport free, malloc

REL_TOL = 1e-9
cdef double _OMT = 1.0 - 1e-9

SCHEME_SUD = 0
SCHEME_SLIC = 1
SCHEME_PIC = 2
SCHEME_SIC = 3

cdef int _SUD = 0
cdef int _SLIC = 1
cdef int _PIC = 2
cdef int _SIC = 3

cdef long _TIME_CHECK_MASK = 0x7FF


cdef class Prep:
    cdef public int K
    cdef double* recv
    cdef double* gamma
    cdef double* weights
    cdef public double eta
    cdef bint has_weights

    def __cinit__(self, int K):
        cdef int kk = K if K else 1
        self.K = K
        self.recv = <double*> malloc(sizeof(double) * kk * kk)
        self.gamma = <double*> malloc(sizeof(double) * kk)
        self.weights = <double*> malloc(sizeof(double) * kk)
        if self.recv == NULL or self.gamma == NULL or self.weights == NULL:
            raise MemoryError()
        self.has_weights = False

    def __dealloc__(self):
        free(self.recv)
        free(self.gamma)
        free(self.weights)


def prepare(recv2d, gamma, eta, weights=None):
    """recv2d: K x K nested sequence; gamma: length-K sequence."""
    cdef int K = len(gamma)
    cdef Prep prep = Prep(K)
    cdef int m, k
    for m in range(K):
        row = recv2d[m]
        for k in range(K):
            prep.recv[m * K + k] = <double> row[k]
    for k in range(K):
        prep.gamma[k] = <double> gamma[k]
    prep.eta = <double> eta
    if weights is not None:
        for k in range(K):
            prep.weights[k] = <double> weights[k]
        prep.has_weights = True
    return prep


cdef void _insertion_sort_int(int* arr, int n):
    cdef int i, j, v
    for i in range(1, n):
        v = arr[i]
        j = i - 1
        while j >= 0 and arr[j] > v:
            arr[j + 1] = arr[j]
            j -= 1
        arr[j + 1] = v


cdef double _canonical_weight_c(double* weights, int* members, int n, double* scratch):
    cdef int i, j
    cdef double v, total
    for i in range(n):
        scratch[i] = weights[members[i]]
    for i in range(1, n):
        v = scratch[i]
        j = i - 1
        while j >= 0 and scratch[j] > v:
            scratch[j + 1] = scratch[j]
            j -= 1
        scratch[j + 1] = v
    total = 0.0
    for i in range(n):
        total += scratch[i]
    return total


cdef bint _c_feasible_sud(int K, double* recv, double* gamma, double eta,
                          int* active, int n):
    cdef int i, j, k, m
    cdef double tot, own
    for i in range(n):
        k = active[i]
        tot = eta
        for j in range(n):
            m = active[j]
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if own < gamma[k] * (tot - own) * _OMT:
            return False
    return True


cdef bint _c_feasible_pic(int K, double* recv, double* gamma, double eta,
                          int* active, int n, bint slic):
    cdef int i, j, k, m, best
    cdef double tot, own, pmk, removed, best_pow
    for i in range(n):
        k = active[i]
        tot = eta
        for j in range(n):
            m = active[j]
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if slic:
            best = -1
            best_pow = 0.0
            for j in range(n):
                m = active[j]
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT and pmk > best_pow:
                    best = m
                    best_pow = pmk
            removed = best_pow if best >= 0 else 0.0
        else:
            removed = 0.0
            for j in range(n):
                m = active[j]
                if m == k:
                    continue
                pmk = recv[m * K + k]
                if pmk >= gamma[m] * (tot - pmk) * _OMT:
                    removed += pmk
        if own < gamma[k] * (tot - own - removed) * _OMT:
            return False
    return True


def _margin_key(t):
    return (-t[0], t[1])


cdef object _capped_search_c(double* powers, double* thrs, double base,
                             int cap, list star, double rest,
                             double own_num, double own_thr, double eta):
    """Mirror of _core_py._capped_search. Returns (best_sum, best_path, hit)."""
    margins = [(powers[<int> i] / thrs[<int> i], i) for i in star]
    margins.sort(key=_margin_key)
    cand = [i for _, i in margins]
    pos = {}
    cdef int b = 0
    for i in star:
        pos[i] = b
        b += 1
    pow_desc = sorted([powers[<int> i] for i in star], reverse=True)
    prefix = [0.0]
    for p in pow_desc:
        prefix.append(prefix[len(prefix) - 1] + p)
    state = {"best_sum": -1.0, "best_path": [], "visited": set(), "path": []}
    hit = _capped_dfs(powers, thrs, base, cap, cand, pos, prefix, state,
                      0, rest, 0.0, 0, own_num, own_thr, eta)
    return state["best_sum"], state["best_path"], hit


cdef bint _capped_dfs(double* powers, double* thrs, double base, int cap,
                      list cand, dict pos, list prefix, dict state,
                      unsigned long long mask, double r, double csum, int depth,
                      double own_num, double own_thr, double eta):
    cdef double p
    cdef int i
    cdef unsigned long long bbit, nmask
    if csum > <double> state["best_sum"]:
        state["best_sum"] = csum
        state["best_path"] = list(state["path"])
    if own_num >= 0.0 and own_num >= own_thr * (r + eta) * _OMT:
        return True
    if depth == cap:
        return False
    if csum + <double> prefix[cap - depth] <= <double> state["best_sum"]:
        return False
    visited = <set> state["visited"]
    path = <list> state["path"]
    for obj in cand:
        i = <int> obj
        bbit = (<unsigned long long> 1) << (<int> pos[obj])
        if mask & bbit:
            continue
        p = powers[i]
        if p < thrs[i] * (base + (r - p)) * _OMT:
            continue
        nmask = mask | bbit
        if nmask in visited:
            continue
        visited.add(nmask)
        path.append(obj)
        hit = _capped_dfs(powers, thrs, base, cap, cand, pos, prefix, state,
                          nmask, r - p, csum + p, depth + 1, own_num, own_thr, eta)
        path.pop()
        if hit:
            return True
    return False


cdef bint _c_sic_receiver_verdict(double* powers, double* thrs, int n, double base,
                                  int cap, double own_num, double own_thr, double eta,
                                  double* margins, unsigned char* alive):
    cdef double rest = 0.0
    cdef int i, best, n_order
    cdef double r, p, best_u
    for i in range(n):
        rest += powers[i]
    if own_num >= own_thr * (rest + eta) * _OMT:
        return True
    if cap <= 0:
        return False
    for i in range(n):
        margins[i] = powers[i] / thrs[i]
        alive[i] = 1
    order = []
    r = rest
    n_order = 0
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
        alive[best] = 0
        r -= powers[best]
        order.append(best)
        n_order += 1
        if n_order <= cap and own_num >= own_thr * (r + eta) * _OMT:
            return True
    if n_order <= cap:
        return False
    star = sorted(order)
    result = _capped_search_c(powers, thrs, base, cap, star, rest, own_num, own_thr, eta)
    return <bint> result[2]


cdef bint _c_feasible_sic(int K, double* recv, double* gamma, double eta,
                          int* active, int n, int cap,
                          double* powers, double* thrs, double* margins,
                          unsigned char* alive):
    cdef int i, j, k, m, cnt
    cdef double tot, own
    for i in range(n):
        k = active[i]
        tot = eta
        for j in range(n):
            m = active[j]
            tot += recv[m * K + k]
        own = recv[k * K + k]
        if own >= gamma[k] * (tot - own) * _OMT:
            continue
        cnt = 0
        for j in range(n):
            m = active[j]
            if m != k:
                powers[cnt] = recv[m * K + k]
                thrs[cnt] = gamma[m]
                cnt += 1
        if not _c_sic_receiver_verdict(powers, thrs, cnt, own + eta, cap,
                                       own, gamma[k], eta, margins, alive):
            return False
    return True


cdef bint _c_feasible(int K, double* recv, double* gamma, double eta,
                      int* active, int n, int scheme, int cap,
                      double* powers, double* thrs, double* margins,
                      unsigned char* alive) except? False:
    if scheme == _SUD:
        return _c_feasible_sud(K, recv, gamma, eta, active, n)
    elif scheme == _PIC:
        return _c_feasible_pic(K, recv, gamma, eta, active, n, False)
    elif scheme == _SLIC:
        return _c_feasible_pic(K, recv, gamma, eta, active, n, True)
    elif scheme == _SIC:
        return _c_feasible_sic(K, recv, gamma, eta, active, n, cap,
                               powers, thrs, margins, alive)
    raise ValueError(f"unknown scheme code {scheme}")


def feasible(Prep prep, active, int scheme, int cap):
    """Is the activation set feasible under the given decoding scheme?

    ``active`` must be sorted ascending."""
    cdef int n = len(active)
    cdef int Kx = prep.K if prep.K else 1
    cdef int nx = n if n else 1
    cdef int* act = <int*> malloc(sizeof(int) * nx)
    cdef double* powers = <double*> malloc(sizeof(double) * Kx)
    cdef double* thrs = <double*> malloc(sizeof(double) * Kx)
    cdef double* margins = <double*> malloc(sizeof(double) * Kx)
    cdef unsigned char* alive = <unsigned char*> malloc(Kx)
    if act == NULL or powers == NULL or thrs == NULL or margins == NULL or alive == NULL:
        free(act); free(powers); free(thrs); free(margins); free(alive)
        raise MemoryError()
    cdef int i
    try:
        for i in range(n):
            act[i] = <int> active[i]
        return _c_feasible(prep.K, prep.recv, prep.gamma, prep.eta, act, n,
                           scheme, cap, powers, thrs, margins, alive)
    finally:
        free(act); free(powers); free(thrs); free(margins); free(alive)


def sic_receiver(powers_in, thrs_in, double base, int cap):
    """See _core_py.sic_receiver: saturation order (uncapped) or the exact
    minimum-residual capped sequence, plus the residual interference."""
    cdef int n = len(powers_in)
    cdef int nx = n if n else 1
    cdef double* powers = <double*> malloc(sizeof(double) * nx)
    cdef double* thrs = <double*> malloc(sizeof(double) * nx)
    cdef double* margins = <double*> malloc(sizeof(double) * nx)
    cdef unsigned char* alive = <unsigned char*> malloc(nx)
    if powers == NULL or thrs == NULL or margins == NULL or alive == NULL:
        free(powers); free(thrs); free(margins); free(alive)
        raise MemoryError()
    cdef int i, best
    cdef double rest, r, p, best_u
    try:
        for i in range(n):
            powers[i] = <double> powers_in[i]
            thrs[i] = <double> thrs_in[i]
            margins[i] = powers[i] / thrs[i]
            alive[i] = 1
        rest = 0.0
        for i in range(n):
            rest += powers[i]
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
            alive[best] = 0
            r -= powers[best]
            order.append(best)
        if cap >= len(order):
            return order, r
        star = sorted(order)
        result = _capped_search_c(powers, thrs, base, cap, star, rest, -1.0, 0.0, 0.0)
        best_path = result[1]
        r = rest
        for obj in best_path:
            r -= powers[<int> obj]
        return best_path, r
    finally:
        free(powers); free(thrs); free(margins); free(alive)


def pic_cancels(Prep prep, active, bint slic):
    """(feasible, cancels) with cancels parallel to ``active``."""
    cdef int K = prep.K
    cdef int n = len(active)
    cdef int i, j, k, m, best
    cdef double tot, own, pmk, removed, best_pow
    cdef bint feas = True
    cancels = []
    act = [int(a) for a in active]
    for i in range(n):
        k = act[i]
        tot = prep.eta
        for j in range(n):
            m = act[j]
            tot += prep.recv[m * K + k]
        own = prep.recv[k * K + k]
        ck = []
        removed = 0.0
        if slic:
            best = -1
            best_pow = 0.0
            for j in range(n):
                m = act[j]
                if m == k:
                    continue
                pmk = prep.recv[m * K + k]
                if pmk >= prep.gamma[m] * (tot - pmk) * _OMT and pmk > best_pow:
                    best = m
                    best_pow = pmk
            if best >= 0:
                ck.append(best)
                removed = best_pow
        else:
            for j in range(n):
                m = act[j]
                if m == k:
                    continue
                pmk = prep.recv[m * K + k]
                if pmk >= prep.gamma[m] * (tot - pmk) * _OMT:
                    ck.append(m)
                    removed += pmk
        if own < prep.gamma[k] * (tot - own - removed) * _OMT:
            feas = False
        cancels.append(ck)
    return feas, cancels


def sic_cancels(Prep prep, active, int cap):
    """(feasible, cancels) for SIC; cancels entries in cancellation order."""
    cdef int K = prep.K
    cdef bint feas = True
    cdef double own
    cdef int k, m
    cancels = []
    act = [int(a) for a in active]
    for k in act:
        others = [m for m in act if m != k]
        powers = [prep.recv[m * K + k] for m in others]
        thrs = [prep.gamma[m] for m in others]
        own = prep.recv[k * K + k]
        order, residual = sic_receiver(powers, thrs, own + prep.eta, cap)
        if own < prep.gamma[k] * (<double> residual + prep.eta) * _OMT:
            feas = False
        cancels.append([others[<int> i] for i in order])
    return feas, cancels


def pair_conflicts(Prep prep, int scheme, int cap):
    """Bitmask per link of the partners it can never be active with."""
    cdef int K = prep.K
    masks = [0] * K
    cdef int i, j
    cdef int pair_arr[2]
    cdef int Kx = K if K else 1
    cdef double* powers = <double*> malloc(sizeof(double) * Kx)
    cdef double* thrs = <double*> malloc(sizeof(double) * Kx)
    cdef double* margins = <double*> malloc(sizeof(double) * Kx)
    cdef unsigned char* alive = <unsigned char*> malloc(Kx)
    if powers == NULL or thrs == NULL or margins == NULL or alive == NULL:
        free(powers); free(thrs); free(margins); free(alive)
        raise MemoryError()
    try:
        for i in range(K):
            for j in range(i + 1, K):
                pair_arr[0] = i
                pair_arr[1] = j
                if not _c_feasible(K, prep.recv, prep.gamma, prep.eta, pair_arr, 2,
                                   scheme, cap, powers, thrs, margins, alive):
                    masks[i] |= 1 << j
                    masks[j] |= 1 << i
    finally:
        free(powers); free(thrs); free(margins); free(alive)
    return masks


cdef struct Ctx:
    int K
    int scheme
    int cap
    double* recv
    double* gamma
    double* weights
    double eta
    unsigned long long* conflict
    double best_w
    unsigned long long best_mask
    long nodes
    bint timed_out
    double deadline        # monotonic seconds; negative = no budget
    int* in_buf            # K
    int* cand_buf          # (K+1) * K
    double* interf_buf     # (K+1) * K
    double* rem_buf        # (K+1) * (K+1), per-depth rows
    int* sort_buf          # K + 1
    double* val_buf        # K
    double* powers_buf     # K
    double* thrs_buf       # K
    double* margins_buf    # K
    unsigned char* alive_buf  # K


cdef bint _expired(Ctx* ctx):
    ctx.nodes += 1
    if ctx.deadline >= 0.0 and (ctx.nodes & _TIME_CHECK_MASK) == 0:
        if time.monotonic() > ctx.deadline:
            ctx.timed_out = True
    return ctx.timed_out


cdef void _c_dfs(Ctx* ctx, int depth, int n_in, int n_cand, double w_in,
                 unsigned long long in_mask) except *:
    cdef int K = ctx.K
    cdef int* cand = ctx.cand_buf + depth * K
    cdef int* next_cand = ctx.cand_buf + (depth + 1) * K
    cdef double* interf = ctx.interf_buf + depth * K
    cdef double* new_interf = ctx.interf_buf + (depth + 1) * K
    cdef double* rem = ctx.rem_buf + depth * (K + 1)
    cdef int i, j, k, c, u, n_new, idx
    cdef double w_new, cw, own, tot_u
    cdef unsigned long long cbit, new_mask
    cdef bint ok, sud = ctx.scheme == _SUD

    if _expired(ctx):
        return
    rem[n_cand] = 0.0
    for i in range(n_cand - 1, -1, -1):
        rem[i] = rem[i + 1] + ctx.weights[cand[i]]
    for i in range(n_cand):
        if ctx.timed_out:
            return
        if w_in + rem[i] <= ctx.best_w:
            break
        c = cand[i]
        cbit = (<unsigned long long> 1) << c
        if ctx.conflict[c] & in_mask:
            continue
        if sud:
            for k in range(K):
                new_interf[k] = interf[k] + ctx.recv[c * K + k]
            ok = ctx.recv[c * K + c] >= ctx.gamma[c] * (new_interf[c] - ctx.recv[c * K + c]) * _OMT
            if ok:
                for j in range(n_in):
                    k = ctx.in_buf[j]
                    own = ctx.recv[k * K + k]
                    if own < ctx.gamma[k] * (new_interf[k] - own) * _OMT:
                        ok = False
                        break
            if not ok:
                continue
        else:
            for j in range(n_in):
                ctx.sort_buf[j] = ctx.in_buf[j]
            ctx.sort_buf[n_in] = c
            _insertion_sort_int(ctx.sort_buf, n_in + 1)
            if not _c_feasible(K, ctx.recv, ctx.gamma, ctx.eta, ctx.sort_buf, n_in + 1,
                               ctx.scheme, ctx.cap, ctx.powers_buf, ctx.thrs_buf,
                               ctx.margins_buf, ctx.alive_buf):
                continue
        ctx.in_buf[n_in] = c
        new_mask = in_mask | cbit
        w_new = w_in + ctx.weights[c]
        if w_new > ctx.best_w:
            cw = _canonical_weight_c(ctx.weights, ctx.in_buf, n_in + 1, ctx.val_buf)
            if cw > ctx.best_w:
                ctx.best_w = cw
                ctx.best_mask = new_mask
        # one-step lookahead: drop candidates that cannot join the new
        # in-set (hereditary, so they can never join deeper either);
        # shrinking the candidate list is what gives the weight bound its
        # pruning power
        n_new = 0
        if sud:
            for j in range(i + 1, n_cand):
                u = cand[j]
                if ctx.conflict[u] & new_mask:
                    continue
                tot_u = new_interf[u] + ctx.recv[u * K + u]
                if ctx.recv[u * K + u] < ctx.gamma[u] * (tot_u - ctx.recv[u * K + u]) * _OMT:
                    continue
                ok = True
                for idx in range(n_in + 1):
                    k = ctx.in_buf[idx]
                    own = ctx.recv[k * K + k]
                    if own < ctx.gamma[k] * (new_interf[k] + ctx.recv[u * K + k] - own) * _OMT:
                        ok = False
                        break
                if ok:
                    next_cand[n_new] = u
                    n_new += 1
        elif ctx.scheme != _SIC:
            for j in range(i + 1, n_cand):
                u = cand[j]
                if ctx.conflict[u] & new_mask:
                    continue
                for idx in range(n_in + 1):
                    ctx.sort_buf[idx] = ctx.in_buf[idx]
                ctx.sort_buf[n_in + 1] = u
                _insertion_sort_int(ctx.sort_buf, n_in + 2)
                if _c_feasible(K, ctx.recv, ctx.gamma, ctx.eta, ctx.sort_buf, n_in + 2,
                               ctx.scheme, ctx.cap, ctx.powers_buf, ctx.thrs_buf,
                               ctx.margins_buf, ctx.alive_buf):
                    next_cand[n_new] = u
                    n_new += 1
        else:
            # measured: full lookahead prunes almost nothing for SIC at desk
            # scale (strong interferers stay cancellable) while costing a
            # saturation sweep per candidate; pairwise masks only
            for j in range(i + 1, n_cand):
                u = cand[j]
                if not (ctx.conflict[u] & new_mask):
                    next_cand[n_new] = u
                    n_new += 1
        if n_new:
            _c_dfs(ctx, depth + 1, n_in + 1, n_new, w_new, new_mask)
            if ctx.timed_out:
                return


cdef void _free_ctx(Ctx* ctx):
    free(ctx.conflict)
    free(ctx.in_buf)
    free(ctx.cand_buf)
    free(ctx.interf_buf)
    free(ctx.rem_buf)
    free(ctx.sort_buf)
    free(ctx.val_buf)
    free(ctx.powers_buf)
    free(ctx.thrs_buf)
    free(ctx.margins_buf)
    free(ctx.alive_buf)


def solve(Prep prep, order, int scheme, int cap, budget_s):
    """Depth-first branch-and-bound; see _core_py.solve."""
    cdef int K = prep.K
    if K > 63:
        raise ValueError("solver core supports at most 63 links")
    if not prep.has_weights:
        raise ValueError("weights not set")

    conflict_py = pair_conflicts(prep, scheme, cap)

    cdef Ctx ctx
    ctx.K = K
    ctx.scheme = scheme
    ctx.cap = cap
    ctx.recv = prep.recv
    ctx.gamma = prep.gamma
    ctx.weights = prep.weights
    ctx.eta = prep.eta
    ctx.best_w = 0.0
    ctx.best_mask = 0
    ctx.nodes = 0
    ctx.timed_out = False
    ctx.deadline = -1.0 if budget_s is None else time.monotonic() + <double> budget_s

    cdef int Kx = K if K else 1
    ctx.conflict = <unsigned long long*> malloc(sizeof(unsigned long long) * Kx)
    ctx.in_buf = <int*> malloc(sizeof(int) * Kx)
    ctx.cand_buf = <int*> malloc(sizeof(int) * (Kx + 1) * Kx)
    ctx.interf_buf = <double*> malloc(sizeof(double) * (Kx + 1) * Kx)
    ctx.rem_buf = <double*> malloc(sizeof(double) * (Kx + 1) * (Kx + 1))
    ctx.sort_buf = <int*> malloc(sizeof(int) * (Kx + 1))
    ctx.val_buf = <double*> malloc(sizeof(double) * Kx)
    ctx.powers_buf = <double*> malloc(sizeof(double) * Kx)
    ctx.thrs_buf = <double*> malloc(sizeof(double) * Kx)
    ctx.margins_buf = <double*> malloc(sizeof(double) * Kx)
    ctx.alive_buf = <unsigned char*> malloc(Kx)
    if (ctx.conflict == NULL or ctx.in_buf == NULL or ctx.cand_buf == NULL
            or ctx.interf_buf == NULL or ctx.rem_buf == NULL or ctx.sort_buf == NULL
            or ctx.val_buf == NULL or ctx.powers_buf == NULL or ctx.thrs_buf == NULL
            or ctx.margins_buf == NULL or ctx.alive_buf == NULL):
        _free_ctx(&ctx)
        raise MemoryError()

    cdef int i, c, n_singles
    cdef int single[1]
    try:
        for i in range(K):
            ctx.conflict[i] = <unsigned long long> conflict_py[i]
        n_singles = 0
        for obj in order:
            c = <int> obj
            single[0] = c
            if _c_feasible(K, prep.recv, prep.gamma, prep.eta, single, 1, scheme, cap,
                           ctx.powers_buf, ctx.thrs_buf, ctx.margins_buf, ctx.alive_buf):
                ctx.cand_buf[n_singles] = c
                n_singles += 1
        if scheme == _SUD:
            for i in range(K):
                ctx.interf_buf[i] = prep.eta
        _c_dfs(&ctx, 0, 0, n_singles, 0.0, 0)
        return int(ctx.best_mask), float(ctx.best_w), int(ctx.nodes), bool(ctx.timed_out)
    finally:
        _free_ctx(&ctx)
