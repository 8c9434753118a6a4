"""Integer-linear-model emission for the four activation formulations.

Models are emitted denominator-cleared (fully linear) with big-M relaxation
constants, in the CPLEX LP text dialect (see docs/formats.md and the golden
files under docs/golden/). All SINR rows are scaled by 1/noise so
coefficients land near 1..1e6 instead of 1e-13; this is pure row scaling and
does not change the solution set.

Variables are named ``x_<k>``, ``y_<m>_<k>`` and ``y_<m>_<k>_<t>`` with
1-based link indices; ``y_m_k`` means "receiver of link k cancels link m"
and ``t`` is the cancellation stage. External solver assignments come back
as ``name value`` lines and are re-imported with ``read_assignment`` /
``assignment_to_solution``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ParseError
from .feasibility import Scheme, SchemeConfig, Solution, meets
from .instance import Instance

FORMULATIONS = ("sud", "slic", "pic", "sic-common", "sic-general")

ROW_TOL = 1e-9


@dataclass
class Row:
    name: str
    coeffs: dict[str, float]
    sense: str  # "<=" or ">="
    rhs: float

    def satisfied(self, assign: dict[str, int]) -> bool:
        lhs = 0.0
        scale = max(1.0, abs(self.rhs))
        for var, c in self.coeffs.items():
            lhs += c * assign.get(var, 0)
            ac = abs(c)
            if ac > scale:
                scale = ac
        slack = ROW_TOL * scale
        if self.sense == "<=":
            return lhs <= self.rhs + slack
        return lhs >= self.rhs - slack


@dataclass
class IlpModel:
    formulation: str
    K: int
    variables: list[str]
    objective: dict[str, float]
    rows: list[Row]
    fixings: list[str]
    big_m_k: np.ndarray
    big_m_mk: np.ndarray
    stage_cap: Optional[int] = None
    sort_orders: dict[int, list[int]] = field(default_factory=dict)

    def satisfied(self, assign: dict[str, int]) -> bool:
        if any(assign.get(v, 0) for v in self.fixings):
            return False
        return all(row.satisfied(assign) for row in self.rows)

    def weight(self, assign: dict[str, int]) -> float:
        return sum(c * assign.get(v, 0) for v, c in self.objective.items())

    def lp_text(self) -> str:
        return render_lp(self)


def big_m(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Relaxation constants, used as-is even when negative.

    M_k  deactivates link k's own SINR row: total received interference
         times gamma_k, plus noise times gamma_k, minus the own signal.
    M_mk deactivates the row allowing receiver k to decode link m: total
         other received power times gamma_m, plus noise times gamma_m,
         minus m's received power.
    """
    gamma = inst.require_thresholds()
    recv = inst.received_power()
    K = inst.K
    m_k = np.empty(K)
    m_mk = np.zeros((K, K))
    for k in range(K):
        interf = sum(recv[m, k] for m in range(K) if m != k)
        m_k[k] = interf * gamma[k] + inst.noise * gamma[k] - recv[k, k]
    for m in range(K):
        for k in range(K):
            if m == k:
                continue
            others = sum(recv[n, k] for n in range(K) if n != m)
            m_mk[m, k] = others * gamma[m] + inst.noise * gamma[m] - recv[m, k]
    return m_k, m_mk


def preprocess(inst: Instance, formulation: str) -> list[str]:
    """Lossless variable fixings.

    A link whose noise-only SNR misses its threshold can never activate
    (x_k = 0); a decoding whose signal cannot clear its threshold even
    against just the receiver's own signal plus noise can never happen
    (y_mk = 0, all stages for the staged formulation).
    """
    _check_formulation(formulation)
    gamma = inst.require_thresholds()
    recv = inst.received_power()
    K = inst.K
    fixed = []
    for k in range(K):
        if not meets(recv[k, k], gamma[k], inst.noise):
            fixed.append(f"x_{k + 1}")
    if formulation != "sud":
        for k in range(K):
            for m in range(K):
                if m == k:
                    continue
                if not meets(recv[m, k], gamma[m], recv[k, k] + inst.noise):
                    fixed.append(f"y_{m + 1}_{k + 1}")
    return fixed


def _check_formulation(formulation: str) -> None:
    if formulation not in FORMULATIONS:
        raise ValueError(f"unknown formulation {formulation!r}; expected one of {FORMULATIONS}")


def margin_sort_order(inst: Instance, k: int) -> list[int]:
    """Receiver k's pre-ordering for the common-threshold staged model:
    all other links by descending received power (equivalently descending
    cancellation margin), ties by ascending index."""
    recv = inst.received_power()
    others = [m for m in range(inst.K) if m != k]
    return sorted(others, key=lambda m: (-recv[m, k], m))


def emit_model(
    inst: Instance,
    formulation: str,
    stage_cap: Optional[int] = None,
    apply_preprocess: bool = True,
) -> IlpModel:
    _check_formulation(formulation)
    gamma = inst.require_thresholds()
    weights = inst.require_weights()
    recv = inst.received_power()
    eta = inst.noise
    K = inst.K
    m_k, m_mk = big_m(inst)

    if formulation == "sic-common":
        if np.min(gamma) != np.max(gamma):
            raise ValueError("the common-threshold staged formulation requires uniform thresholds")
    if formulation == "sic-general":
        stage_cap = K - 1 if stage_cap is None else int(stage_cap)
        if not 0 <= stage_cap <= K - 1:
            raise ValueError("stage cap must lie in 0..K-1")
    stages = range(1, (stage_cap or 0) + 1)

    def x(k):
        return f"x_{k + 1}"

    def y(m, k, t=None):
        return f"y_{m + 1}_{k + 1}" if t is None else f"y_{m + 1}_{k + 1}_{t}"

    variables = [x(k) for k in range(K)]
    rows: list[Row] = []
    sort_orders: dict[int, list[int]] = {}

    def own_sinr_row(k, cancel_terms):
        # p_k G_kk + M_k (1 - x_k) >= gamma_k (sum_m R_mk (x_m - y_mk) + eta)
        coeffs = {x(k): -m_k[k] / eta}
        for m in range(K):
            if m == k:
                continue
            coeffs[x(m)] = -gamma[k] * recv[m, k] / eta
        for var, m in cancel_terms:
            coeffs[var] = coeffs.get(var, 0.0) + gamma[k] * recv[m, k] / eta
        rhs = gamma[k] - recv[k, k] / eta - m_k[k] / eta
        return Row(f"sinr_{k + 1}", coeffs, ">=", rhs)

    if formulation == "sud":
        for k in range(K):
            rows.append(own_sinr_row(k, []))
    elif formulation in ("pic", "slic"):
        for k in range(K):
            for m in range(K):
                if m == k:
                    continue
                variables.append(y(m, k))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                rows.append(Row(f"actm_{m + 1}_{k + 1}", {y(m, k): 1.0, x(m): -1.0}, "<=", 0.0))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                rows.append(Row(f"actk_{m + 1}_{k + 1}", {y(m, k): 1.0, x(k): -1.0}, "<=", 0.0))
        for k in range(K):
            rows.append(own_sinr_row(k, [(y(m, k), m) for m in range(K) if m != k]))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                # p_m G_mk + M_mk (1 - y_mk) >= gamma_m (sum_{n != m} R_nk x_n + eta)
                coeffs = {y(m, k): -m_mk[m, k] / eta}
                for n in range(K):
                    if n == m:
                        continue
                    coeffs[x(n)] = -gamma[m] * recv[n, k] / eta
                rhs = gamma[m] - recv[m, k] / eta - m_mk[m, k] / eta
                rows.append(Row(f"isnr_{m + 1}_{k + 1}", coeffs, ">=", rhs))
        if formulation == "slic":
            for k in range(K):
                coeffs = {y(m, k): 1.0 for m in range(K) if m != k}
                rows.append(Row(f"slic_{k + 1}", coeffs, "<=", 1.0))
    elif formulation == "sic-common":
        g = float(gamma[0])
        for k in range(K):
            sort_orders[k] = margin_sort_order(inst, k)
        for k in range(K):
            for m in range(K):
                if m == k:
                    continue
                variables.append(y(m, k))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                rows.append(Row(f"actm_{m + 1}_{k + 1}", {y(m, k): 1.0, x(m): -1.0}, "<=", 0.0))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                rows.append(Row(f"actk_{m + 1}_{k + 1}", {y(m, k): 1.0, x(k): -1.0}, "<=", 0.0))
        for k in range(K):
            rows.append(own_sinr_row(k, [(y(m, k), m) for m in range(K) if m != k]))
        for k in range(K):
            order = sort_orders[k]
            for pos, m in enumerate(order):
                after = order[pos + 1 :]
                # p_m G_mk + M_mk (1 - y_mk) >= gamma (sum_{later n} R_nk x_n
                #                                      + p_k G_kk + eta)
                coeffs = {y(m, k): -m_mk[m, k] / eta}
                for n in after:
                    coeffs[x(n)] = -g * recv[n, k] / eta
                rhs = g * (recv[k, k] / eta + 1.0) - recv[m, k] / eta - m_mk[m, k] / eta
                rows.append(Row(f"isnr_{m + 1}_{k + 1}", coeffs, ">=", rhs))
                # ordering: later cancellations only if m itself is cancelled
                # whenever active
                c_mk = float(len(after))
                coeffs = {y(n, k): 1.0 for n in after}
                coeffs[x(m)] = c_mk
                coeffs[y(m, k)] = coeffs.get(y(m, k), 0.0) - c_mk
                rows.append(Row(f"ord_{m + 1}_{k + 1}", coeffs, "<=", c_mk))
    else:  # sic-general
        for k in range(K):
            for m in range(K):
                if m == k:
                    continue
                for t in stages:
                    variables.append(y(m, k, t))
        for m in range(K):
            for k in range(K):
                if m == k:
                    continue
                coeffs = {y(m, k, t): 1.0 for t in stages}
                coeffs[x(m)] = -1.0
                rows.append(Row(f"once_{m + 1}_{k + 1}", coeffs, "<=", 0.0))
        for k in range(K):
            for t in stages:
                coeffs = {y(m, k, t): 1.0 for m in range(K) if m != k}
                coeffs[x(k)] = -1.0
                rows.append(Row(f"stage_{k + 1}_t{t}", coeffs, "<=", 0.0))
        for k in range(K):
            terms = [(y(m, k, t), m) for m in range(K) if m != k for t in stages]
            rows.append(own_sinr_row(k, terms))
        for k in range(K):
            for m in range(K):
                if m == k:
                    continue
                for t in stages:
                    # p_m G_mk + M_mk (1 - y^t_mk) >= gamma_m (
                    #   sum_{n != m,k} R_nk (x_n - sum_{t'<t} y^{t'}_nk)
                    #   + p_k G_kk + eta)
                    coeffs = {y(m, k, t): -m_mk[m, k] / eta}
                    for n in range(K):
                        if n == m or n == k:
                            continue
                        coeffs[x(n)] = -gamma[m] * recv[n, k] / eta
                        for tp in range(1, t):
                            var = y(n, k, tp)
                            coeffs[var] = coeffs.get(var, 0.0) + gamma[m] * recv[n, k] / eta
                    rhs = (
                        gamma[m] * (recv[k, k] / eta + 1.0)
                        - recv[m, k] / eta
                        - m_mk[m, k] / eta
                    )
                    rows.append(Row(f"isnr_{m + 1}_{k + 1}_t{t}", coeffs, ">=", rhs))
        for k in range(K):
            for t in stages:
                if t == 1:
                    continue
                coeffs = {y(m, k, t): 1.0 for m in range(K) if m != k}
                for m in range(K):
                    if m != k:
                        coeffs[y(m, k, t - 1)] = -1.0
                rows.append(Row(f"noidle_{k + 1}_t{t}", coeffs, "<=", 0.0))

    fixings: list[str] = []
    if apply_preprocess:
        base = preprocess(inst, formulation)
        for name in base:
            if name.startswith("x_"):
                fixings.append(name)
            elif formulation in ("pic", "slic", "sic-common"):
                fixings.append(name)
            elif formulation == "sic-general":
                fixings.extend(f"{name}_{t}" for t in stages)

    objective = {x(k): float(weights[k]) for k in range(K)}
    return IlpModel(
        formulation=formulation,
        K=K,
        variables=variables,
        objective=objective,
        rows=rows,
        fixings=fixings,
        big_m_k=m_k,
        big_m_mk=m_mk,
        stage_cap=stage_cap if formulation == "sic-general" else None,
        sort_orders=sort_orders,
    )


def _coef(v: float) -> str:
    return format(v, ".17g")


def render_lp(model: IlpModel) -> str:
    """CPLEX LP text. One constraint per line; coefficients with 17
    significant digits; fixings as `var = 0` bounds; all variables binary."""
    out = [f"\\ linkact {model.formulation} model, K={model.K}", "Maximize"]
    terms = []
    for var in model.variables:
        c = model.objective.get(var)
        if c:
            terms.append(f"{'+ ' if terms else ''}{_coef(c)} {var}")
    out.append(" obj: " + " ".join(terms) if terms else " obj: 0 x_1")
    out.append("Subject To")
    for row in model.rows:
        parts = []
        for var in sorted(row.coeffs):
            c = row.coeffs[var]
            if c == 0.0:
                continue
            if not parts:
                parts.append(f"{_coef(c)} {var}")
            elif c < 0:
                parts.append(f"- {_coef(-c)} {var}")
            else:
                parts.append(f"+ {_coef(c)} {var}")
        if not parts:
            parts.append("0 " + model.variables[0])
        out.append(f" {row.name}: {' '.join(parts)} {row.sense} {_coef(row.rhs)}")
    if model.fixings:
        out.append("Bounds")
        for var in model.fixings:
            out.append(f" {var} = 0")
    out.append("Binaries")
    for i in range(0, len(model.variables), 8):
        out.append(" " + " ".join(model.variables[i : i + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# External assignment import
# ---------------------------------------------------------------------------


def read_assignment(text: str) -> dict[str, int]:
    """Parse `name value` lines (values 0/1, blank lines and # comments
    allowed)."""
    assign: dict[str, int] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {ln}: expected 'name value'")
        name, sval = parts
        try:
            val = round(float(sval))
        except ValueError as exc:
            raise ParseError(f"line {ln}: bad value {sval!r}") from exc
        if val not in (0, 1):
            raise ParseError(f"line {ln}: value must be 0 or 1")
        assign[name] = int(val)
    return assign


def _parse_y(name: str):
    parts = name.split("_")
    if len(parts) == 3:
        return int(parts[1]) - 1, int(parts[2]) - 1, None
    if len(parts) == 4:
        return int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3])
    raise ParseError(f"malformed variable name {name!r}")


def assignment_to_solution(inst: Instance, formulation: str, assign: dict[str, int]) -> Solution:
    """Project a 0/1 assignment onto an explicit solution.

    Cancellation order: staged variables order by stage; common-threshold
    staged models order by the receiver's margin sort; single-stage models
    order by descending received power (the order is semantically
    irrelevant there but kept deterministic).
    """
    _check_formulation(formulation)
    weights = inst.weights
    active = []
    for k in range(inst.K):
        if assign.get(f"x_{k + 1}", 0):
            active.append(k)
    staged: dict[int, list[tuple[int, int]]] = {}
    flat: dict[int, list[int]] = {}
    for name, val in assign.items():
        if not val or not name.startswith("y_"):
            continue
        m, k, t = _parse_y(name)
        if not (0 <= m < inst.K and 0 <= k < inst.K):
            raise ParseError(f"variable {name!r} out of range")
        if t is None:
            flat.setdefault(k, []).append(m)
        else:
            staged.setdefault(k, []).append((t, m))
    cancels: dict[int, tuple[int, ...]] = {}
    recv = inst.received_power()
    for k, pairs in staged.items():
        cancels[k] = tuple(m for _, m in sorted(pairs))
    for k, ms in flat.items():
        if formulation == "sic-common":
            order = margin_sort_order(inst, k)
            cancels[k] = tuple(m for m in order if m in set(ms))
        else:
            cancels[k] = tuple(sorted(ms, key=lambda m: (-recv[m, k], m)))
    total = 0.0
    if weights is not None:
        for v in sorted(float(weights[i]) for i in active):
            total += v
    return Solution(active=tuple(active), cancels=cancels, weight=total)


def formulation_config(formulation: str, stage_cap: Optional[int] = None) -> SchemeConfig:
    _check_formulation(formulation)
    if formulation == "sud":
        return SchemeConfig(Scheme.SUD)
    if formulation == "slic":
        return SchemeConfig(Scheme.SLIC)
    if formulation == "pic":
        return SchemeConfig(Scheme.PIC)
    return SchemeConfig(Scheme.SIC, stage_cap=stage_cap)
