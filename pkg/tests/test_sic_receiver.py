"""Per-receiver successive-cancellation behavior, cross-checked against
exhaustive enumeration over every cancellation order."""

import pytest

from linkact.feasibility import sic_saturate_receiver

OMT = 1.0 - 1e-9


def decodable(powers, thrs, base, cancelled, i):
    rest = sum(p for j, p in enumerate(powers) if j != i and j not in cancelled)
    return powers[i] >= thrs[i] * (base + rest) * OMT


def every_reachable_set(powers, thrs, base, max_len=None):
    """All cancellable sets, by exhaustive search over orders."""
    n = len(powers)
    cap = n if max_len is None else max_len
    seen = set()

    def walk(cancelled):
        seen.add(frozenset(cancelled))
        if len(cancelled) == cap:
            return
        for i in range(n):
            if i in cancelled:
                continue
            if decodable(powers, thrs, base, cancelled, i):
                nxt = cancelled | {i}
                if frozenset(nxt) not in seen:
                    walk(nxt)

    walk(frozenset())
    return seen


def maximal_sets(sets):
    return {s for s in sets if not any(s < t for t in sets)}


class TestOrderSensitivity:
    def test_strong_margin_must_go_first(self):
        # margins 3 and 1: both cancellable only when the margin-3 signal is
        # decoded first; the reverse order stalls immediately
        order, residual = sic_saturate_receiver(0.5, [(1.0, 1.0 / 3.0), (2.0, 2.0)])
        assert order == [0, 1]
        assert residual == 0.0
        assert not decodable([1.0, 2.0], [1.0 / 3.0, 2.0], 0.5, frozenset(), 1)

    def test_opposite_order_for_second_parameter_set(self):
        # margins 2 and 1, but the weaker-margin signal must be decoded first
        order, residual = sic_saturate_receiver(0.5, [(0.5, 0.25), (2.0, 2.0)])
        assert order == [1, 0]
        assert residual == 0.0
        assert not decodable([0.5, 2.0], [0.25, 2.0], 0.5, frozenset(), 0)

    def test_empty_input(self):
        assert sic_saturate_receiver(3.0, []) == ([], 0.0)


class TestSaturation:
    def test_fixpoint_set_matches_exhaustive_maximal_set(self, rng):
        for _ in range(150):
            n = int(rng.integers(0, 7))
            powers = rng.lognormal(0, 1.5, n).tolist()
            thrs = rng.lognormal(0, 1.0, n).tolist()
            base = float(rng.lognormal(0, 1.0))
            order, residual = sic_saturate_receiver(base, list(zip(powers, thrs)))
            reach = maximal_sets(every_reachable_set(powers, thrs, base))
            assert len(reach) == 1, "saturation fixpoint must be unique"
            assert frozenset(order) == next(iter(reach))
            expect = sum(p for i, p in enumerate(powers) if i not in set(order))
            assert residual == pytest.approx(expect, rel=1e-12, abs=1e-12 * (sum(powers) + 1.0))

    def test_canonical_order_is_descending_margin_at_each_stage(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 7))
            powers = rng.lognormal(0, 1.5, n).tolist()
            thrs = rng.lognormal(0, 1.0, n).tolist()
            base = float(rng.lognormal(0, 1.0))
            order, _ = sic_saturate_receiver(base, list(zip(powers, thrs)))
            cancelled = set()
            for step in order:
                best = None
                for i in range(n):
                    if i in cancelled or not decodable(powers, thrs, base, cancelled, i):
                        continue
                    if best is None or powers[i] / thrs[i] > powers[best] / thrs[best]:
                        best = i
                assert step == best
                cancelled.add(step)

    def test_uniform_threshold_orders_by_power(self, rng):
        for _ in range(60):
            n = int(rng.integers(1, 8))
            powers = rng.lognormal(0, 1.5, n).tolist()
            thr = float(rng.lognormal(0, 0.7))
            base = float(rng.lognormal(0, 1.0))
            order, _ = sic_saturate_receiver(base, [(p, thr) for p in powers])
            cancelled_powers = [powers[i] for i in order]
            assert cancelled_powers == sorted(cancelled_powers, reverse=True)


class TestCapped:
    def test_capped_residual_matches_exhaustive(self, rng):
        for _ in range(120):
            n = int(rng.integers(1, 7))
            powers = rng.lognormal(0, 1.5, n).tolist()
            thrs = rng.lognormal(0, 1.0, n).tolist()
            base = float(rng.lognormal(0, 1.0))
            for cap in range(n + 1):
                order, residual = sic_saturate_receiver(base, list(zip(powers, thrs)), cap)
                assert len(order) <= cap
                reach = every_reachable_set(powers, thrs, base, max_len=cap)
                best = max(sum(powers[i] for i in s) for s in reach)
                assert sum(powers[i] for i in order) == pytest.approx(best, rel=1e-12, abs=1e-300)

    def test_capped_sequence_is_executable(self, rng):
        for _ in range(80):
            n = int(rng.integers(1, 7))
            powers = rng.lognormal(0, 1.5, n).tolist()
            thrs = rng.lognormal(0, 1.0, n).tolist()
            base = float(rng.lognormal(0, 1.0))
            cap = int(rng.integers(0, n + 1))
            order, _ = sic_saturate_receiver(base, list(zip(powers, thrs)), cap)
            cancelled = set()
            for i in order:
                assert decodable(powers, thrs, base, cancelled, i)
                cancelled.add(i)

    def test_cap_zero(self):
        order, residual = sic_saturate_receiver(1.0, [(5.0, 0.1), (1.0, 4.0)], 0)
        assert order == [] and residual == 6.0


class TestValidation:
    def test_rejects_negative_base(self):
        with pytest.raises(ValueError):
            sic_saturate_receiver(-1.0, [])

    def test_rejects_bad_interferers(self):
        with pytest.raises(ValueError):
            sic_saturate_receiver(1.0, [(-1.0, 0.5)])
        with pytest.raises(ValueError):
            sic_saturate_receiver(1.0, [(1.0, 0.0)])
        with pytest.raises(ValueError):
            sic_saturate_receiver(1.0, [(1.0, 1.0)], -2)
