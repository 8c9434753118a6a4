"""Feasibility semantics for the four decoding regimes.

A receiver decodes its own link if the post-cancellation SINR clears the
link's threshold. What it may cancel depends on the scheme:

  SUD   nothing; all interference is noise.
  SLIC  at most one interferer, decodable treating everything else as noise.
  PIC   any set of interferers, each decodable treating everything else
        (including the other cancellation candidates) as noise.
  SIC   interferers one at a time; each stage sees only the not-yet-cancelled
        interference. The per-receiver stage budget T caps the sequence
        length (T = 0 degenerates to SUD).

Every threshold comparison ``num/den >= thr`` is evaluated as
``num >= thr * den * (1 - REL_TOL)`` with REL_TOL = 1e-9, one-sided, so
verdicts are stable under float noise. The same rule is used everywhere,
including the brute-force oracles in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import core
from .errors import StructuralError
from .instance import Instance

REL_TOL = core.REL_TOL
_OMT = 1.0 - REL_TOL


class Scheme(str, Enum):
    SUD = "SUD"
    SLIC = "SLIC"
    PIC = "PIC"
    SIC = "SIC"

    @property
    def code(self) -> int:
        return {
            Scheme.SUD: core.SCHEME_SUD,
            Scheme.SLIC: core.SCHEME_SLIC,
            Scheme.PIC: core.SCHEME_PIC,
            Scheme.SIC: core.SCHEME_SIC,
        }[self]


@dataclass(frozen=True)
class SchemeConfig:
    """Decoding regime plus the per-receiver stage cap T.

    ``stage_cap=None`` means the scheme's natural cap: 0 for SUD, 1 for
    SLIC, unrestricted (K-1, i.e. "all interferers") for PIC and SIC.
    """

    scheme: Scheme
    stage_cap: Optional[int] = None

    def __post_init__(self):
        if self.stage_cap is not None:
            if self.stage_cap < 0:
                raise ValueError("stage cap must be nonnegative")
            if self.scheme is Scheme.SUD and self.stage_cap != 0:
                raise ValueError("SUD admits no cancellations (T must be 0)")
            if self.scheme is Scheme.SLIC and self.stage_cap > 1:
                raise ValueError("SLIC admits at most one cancellation (T <= 1)")

    def cap_for(self, K: int) -> int:
        if self.scheme is Scheme.SUD:
            return 0
        if self.scheme is Scheme.SLIC:
            return self.stage_cap if self.stage_cap is not None else 1
        if self.stage_cap is None:
            return max(K - 1, 0)
        return min(self.stage_cap, max(K - 1, 0))


@dataclass
class MarginTable:
    """Interference margins: the most interference-plus-noise power a
    decoding can tolerate while still meeting its threshold.

    ``own[k]``   = p_k G_kk / gamma_k  (decoding link k at its own receiver)
    ``cross[m, k]`` = p_m G_mk / gamma_m (decoding link m at receiver k);
    the diagonal is unused.
    """

    own: np.ndarray
    cross: np.ndarray


@dataclass
class Solution:
    """An activation set with per-receiver ordered cancellation lists."""

    active: tuple[int, ...]
    cancels: dict[int, tuple[int, ...]] = field(default_factory=dict)
    weight: float = 0.0


@dataclass
class Verdict:
    feasible: bool
    cancels: dict[int, tuple[int, ...]]

    def __bool__(self) -> bool:
        return self.feasible


@dataclass
class Violation:
    """First failed check when validating an explicit solution."""

    kind: str  # "own-sinr" or "cancel"
    link: int
    interferer: Optional[int] = None
    stage: Optional[int] = None


def meets(num: float, thr: float, den: float) -> bool:
    """The package-wide comparison rule for num/den >= thr."""
    return num >= thr * den * _OMT


def margins(inst: Instance) -> MarginTable:
    gamma = inst.require_thresholds()
    recv = inst.received_power()
    own = np.diag(recv) / gamma
    cross = recv / gamma[:, None]
    return MarginTable(own=own, cross=cross)


def _prep(inst: Instance):
    # Instances are immutable by convention, so the kernel arrays are built
    # once and cached on the object (with_* helpers return fresh objects).
    handle = getattr(inst, "_prep_handle", None)
    if handle is None:
        weights = inst.weights.tolist() if inst.weights is not None else None
        handle = core.prepare(
            inst.received_power().tolist(),
            inst.require_thresholds().tolist(),
            inst.noise,
            weights,
        )
        inst._prep_handle = handle
    return handle


def _as_sorted(active: Sequence[int], K: int) -> list[int]:
    out = sorted(set(int(a) for a in active))
    if out and (out[0] < 0 or out[-1] >= K):
        raise ValueError(f"link index out of range 0..{K - 1}")
    return out


def check_sud(inst: Instance, active: Sequence[int]) -> bool:
    """True iff every link in the set meets its SINR threshold with all
    interference treated as noise."""
    act = _as_sorted(active, inst.K)
    return bool(core.feasible(_prep(inst), act, core.SCHEME_SUD, 0))


def pic_cancel_sets(inst: Instance, active: Sequence[int]) -> dict[int, tuple[int, ...]]:
    """Single-stage decodable interferers per active receiver: m is in C_k
    when its signal clears gamma_m against all other active signals (own
    included) plus noise."""
    act = _as_sorted(active, inst.K)
    _, cancels = core.pic_cancels(_prep(inst), act, False)
    return {k: tuple(ck) for k, ck in zip(act, cancels)}


def check_pic(inst: Instance, active: Sequence[int]) -> Verdict:
    """PIC feasibility; cancels every decodable interferer (removal only ever
    shrinks the residual, so the full set is optimal)."""
    act = _as_sorted(active, inst.K)
    feas, cancels = core.pic_cancels(_prep(inst), act, False)
    return Verdict(bool(feas), {k: tuple(ck) for k, ck in zip(act, cancels) if ck})


def check_slic(inst: Instance, active: Sequence[int]) -> Verdict:
    """Like PIC but each receiver cancels at most one interferer: the
    decodable one with the largest received power (ties to the lowest
    index)."""
    act = _as_sorted(active, inst.K)
    feas, cancels = core.pic_cancels(_prep(inst), act, True)
    return Verdict(bool(feas), {k: tuple(ck) for k, ck in zip(act, cancels) if ck})


def sic_saturate_receiver(
    base: float,
    interferers: Sequence[tuple[float, float]],
    cap: Optional[int] = None,
) -> tuple[list[int], float]:
    """Successive cancellation at a single receiver.

    ``base`` is the fixed denominator floor (own signal + noise + any
    uncancellable interference); ``interferers`` are (received_power,
    threshold) pairs. Uncapped, iterates to the saturation fixpoint,
    cancelling the highest-margin decodable signal at each stage (ties by
    input position). With a binding cap, returns the sequence of length
    <= cap that minimizes the residual interference (exact memoized search;
    with a common threshold the greedy order is already exact).

    Returns (cancelled input positions in order, residual interference).
    """
    if base < 0.0:
        raise ValueError("base must be nonnegative")
    powers = [float(p) for p, _ in interferers]
    thrs = [float(t) for _, t in interferers]
    if any(p < 0.0 for p in powers):
        raise ValueError("received powers must be nonnegative")
    if any(t <= 0.0 for t in thrs):
        raise ValueError("thresholds must be positive")
    n = len(powers)
    cap = n if cap is None else int(cap)
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    order, residual = core.sic_receiver(powers, thrs, float(base), cap)
    return list(order), max(float(residual), 0.0)


def check_sic(inst: Instance, active: Sequence[int], cfg: SchemeConfig) -> Verdict:
    """SIC feasibility under the stage cap of ``cfg``. Receivers are
    independent: each saturates (or searches, if capped) its own
    cancellation sequence."""
    if cfg.scheme is not Scheme.SIC:
        raise ValueError("check_sic requires a SIC config")
    act = _as_sorted(active, inst.K)
    cap = cfg.cap_for(inst.K)
    feas, cancels = core.sic_cancels(_prep(inst), act, cap)
    return Verdict(bool(feas), {k: tuple(ck) for k, ck in zip(act, cancels) if ck})


def check(inst: Instance, active: Sequence[int], cfg: SchemeConfig) -> Verdict:
    """Scheme-dispatching feasibility check."""
    if cfg.scheme is Scheme.SUD:
        return Verdict(check_sud(inst, active), {})
    if cfg.scheme is Scheme.SLIC:
        return check_slic(inst, active)
    if cfg.scheme is Scheme.PIC:
        return check_pic(inst, active)
    return check_sic(inst, active, cfg)


def _structural_check(inst: Instance, sol: Solution) -> list[int]:
    act = [int(a) for a in sol.active]
    if len(set(act)) != len(act):
        raise StructuralError("duplicate link in activation set")
    if act and (min(act) < 0 or max(act) >= inst.K):
        raise StructuralError("activation index out of range")
    act_set = set(act)
    for k, ck in sol.cancels.items():
        if k not in act_set:
            raise StructuralError(f"receiver {k} cancels but is not active")
        seen = set()
        for m in ck:
            if m == k:
                raise StructuralError(f"receiver {k} cancels its own link")
            if m not in act_set:
                raise StructuralError(f"receiver {k} cancels inactive link {m}")
            if m in seen:
                raise StructuralError(f"receiver {k} cancels link {m} twice")
            seen.add(m)
    return sorted(act)


def verify_solution(
    inst: Instance, cfg: SchemeConfig, sol: Solution
) -> tuple[bool, Optional[Violation]]:
    """Validate an explicit solution: the given sets and, for SIC, the given
    order. Structural problems raise StructuralError; SINR failures return
    (False, first violation). Evaluated directly from the definitions, so
    this is independent of the solver kernels.
    """
    act = _structural_check(inst, sol)
    gamma = inst.require_thresholds()
    recv = inst.received_power()
    eta = inst.noise
    cap = cfg.cap_for(inst.K)
    for k, ck in sol.cancels.items():
        if cfg.scheme is Scheme.SUD and ck:
            raise StructuralError("SUD solutions cannot cancel")
        if cfg.scheme is Scheme.SLIC and len(ck) > 1:
            raise StructuralError(f"receiver {k} exceeds the SLIC single-cancellation limit")
        if cfg.scheme is Scheme.SIC and len(ck) > cap:
            raise StructuralError(f"receiver {k} exceeds the stage cap {cap}")

    for k in act:
        ck = list(sol.cancels.get(k, ()))
        if cfg.scheme in (Scheme.PIC, Scheme.SLIC):
            for m in ck:
                den = eta + sum(recv[n, k] for n in act if n != m)
                if not meets(recv[m, k], gamma[m], den):
                    return False, Violation("cancel", link=k, interferer=m)
        elif cfg.scheme is Scheme.SIC:
            done: set[int] = set()
            for stage, m in enumerate(ck, start=1):
                den = eta + sum(recv[n, k] for n in act if n != m and n not in done)
                if not meets(recv[m, k], gamma[m], den):
                    return False, Violation("cancel", link=k, interferer=m, stage=stage)
                done.add(m)
        cancelled = set(ck)
        den = eta + sum(recv[m, k] for m in act if m != k and m not in cancelled)
        if not meets(recv[k, k], gamma[k], den):
            return False, Violation("own-sinr", link=k)
    return True, None
