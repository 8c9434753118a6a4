from pathlib import Path

import numpy as np
import pytest

from conftest import random_instance
from ilp_reference import (
    exhaustive_xy_feasible_sets,
    model_feasible_sets,
    model_optimum,
    module_feasible_sets,
)
from linkact.errors import ParseError
from linkact.feasibility import Scheme, SchemeConfig, verify_solution
from linkact.ilpgen import (
    assignment_to_solution,
    big_m,
    emit_model,
    formulation_config,
    preprocess,
    read_assignment,
)
from linkact.solver import solve_exact

GOLDEN = Path(__file__).resolve().parent.parent / "docs" / "golden"


class TestBigM:
    def test_e2_own_constant(self, e2):
        m_k, m_mk = big_m(e2)
        assert m_k[0] == pytest.approx(4.00000005e-8, rel=1e-12)

    def test_e2_cancel_constant_negative(self, e2):
        _, m_mk = big_m(e2)
        # decoding link 2 at receiver 1
        assert m_mk[1, 0] == pytest.approx(-9.49999995e-8, rel=1e-12)

    def test_single_link_empty_sum(self):
        from linkact.instance import Instance

        inst = Instance(
            K=1,
            gains=np.array([[1e-8]]),
            powers=np.array([1.0]),
            noise=1e-13,
            thresholds=np.array([0.5]),
            weights=np.array([1.0]),
        )
        m_k, _ = big_m(inst)
        assert m_k[0] == pytest.approx(1e-13 * 0.5 - 1e-8, rel=1e-12)


class TestPreprocess:
    def test_weak_cross_fixes_cancellations_only(self, e2_weak):
        fixed = preprocess(e2_weak, "pic")
        assert set(fixed) == {"y_1_2", "y_2_1"}

    def test_strong_cross_fixes_nothing(self, e2):
        assert preprocess(e2, "pic") == []

    def test_hopeless_link_fixed(self):
        from linkact.instance import Instance

        inst = Instance(
            K=2,
            gains=np.array([[1e-15, 1e-7], [1e-7, 1e-8]]),  # link 1 SNR 0.01 < 0.5
            powers=np.ones(2),
            noise=1e-13,
            thresholds=np.full(2, 0.5),
            weights=np.ones(2),
        )
        fixed = preprocess(inst, "sud")
        assert fixed == ["x_1"]


class TestModelShapes:
    def test_sud_sizes(self, e2):
        model = emit_model(e2, "sud")
        assert model.variables == ["x_1", "x_2"]
        assert len(model.rows) == 2

    def test_pic_sizes(self, e2):
        model = emit_model(e2, "pic")
        assert len(model.variables) == 4
        # 2 activation pairs x2 + 2 own-SINR + 2 decode rows
        assert len(model.rows) == 8

    def test_slic_adds_budget_rows(self, e2):
        model = emit_model(e2, "slic")
        assert len(model.rows) == 10

    def test_general_sizes(self, rng):
        inst = random_instance(rng, 3, gamma_db=-3.0)
        model = emit_model(inst, "sic-general", stage_cap=2)
        y = [v for v in model.variables if v.startswith("y_")]
        assert len(y) == 3 * 2 * 2
        assert len([v for v in model.variables if v.startswith("x_")]) == 3

    def test_uniform_threshold_guard(self, rng):
        inst = random_instance(rng, 3)  # individual thresholds
        with pytest.raises(ValueError):
            emit_model(inst, "sic-common")

    def test_unknown_formulation(self, e2):
        with pytest.raises(ValueError):
            emit_model(e2, "milp")


class TestGoldenFiles:
    @pytest.mark.parametrize("name,formulation", [("e2_sud.lp", "sud"), ("e2_pic.lp", "pic")])
    def test_lp_text_matches_golden(self, name, formulation, e2):
        text = emit_model(e2, formulation).lp_text()
        assert text == (GOLDEN / name).read_text()


class TestParityTinyExhaustive:
    """Full 0/1 enumeration over every variable: the emitted rows accept
    exactly the activation sets the feasibility module accepts."""

    @pytest.mark.parametrize("formulation", ["sud", "pic", "slic"])
    def test_single_stage(self, rng, formulation):
        for _ in range(6):
            inst = random_instance(rng, 3)
            model = emit_model(inst, formulation)
            assert exhaustive_xy_feasible_sets(inst, model) == module_feasible_sets(
                inst, formulation
            )

    def test_common_staged(self, rng):
        for _ in range(6):
            inst = random_instance(rng, 3, gamma_db=float(rng.uniform(-9, 3)))
            model = emit_model(inst, "sic-common")
            assert exhaustive_xy_feasible_sets(inst, model) == module_feasible_sets(
                inst, "sic-common"
            )

    def test_general_staged(self, rng):
        for _ in range(4):
            inst = random_instance(rng, 3)
            for cap in (1, 2):
                model = emit_model(inst, "sic-general", stage_cap=cap)
                assert exhaustive_xy_feasible_sets(inst, model) == module_feasible_sets(
                    inst, "sic-general", cap
                )


class TestParityProjected:
    @pytest.mark.parametrize("formulation", ["sud", "pic", "slic", "sic-common", "sic-general"])
    def test_projected_sets_and_optimum(self, rng, formulation):
        for _ in range(4):
            K = int(rng.integers(2, 6))
            gamma_db = float(rng.uniform(-9, 6)) if formulation == "sic-common" else None
            inst = random_instance(rng, K, gamma_db=gamma_db)
            cap = K - 1 if formulation == "sic-general" else None
            model = emit_model(inst, formulation, stage_cap=cap)
            assert model_feasible_sets(inst, model) == module_feasible_sets(
                inst, formulation, cap
            )
            w_model, _ = model_optimum(inst, model)
            cfg = formulation_config(formulation, cap)
            assert w_model == pytest.approx(
                solve_exact(inst, cfg).solution.weight, rel=1e-12, abs=1e-12
            )

    def test_fixings_change_no_optimum(self, rng):
        for _ in range(4):
            K = int(rng.integers(2, 6))
            inst = random_instance(rng, K)
            for formulation in ("sud", "pic", "slic"):
                with_fix = emit_model(inst, formulation, apply_preprocess=True)
                without = emit_model(inst, formulation, apply_preprocess=False)
                assert model_optimum(inst, with_fix)[0] == pytest.approx(
                    model_optimum(inst, without)[0], rel=1e-12, abs=1e-12
                )

    def test_common_vs_general_parity(self, rng):
        # uniform thresholds, unrestricted stages: both staged formulations
        # have equal optima
        for _ in range(4):
            K = int(rng.integers(2, 5))
            inst = random_instance(rng, K, gamma_db=float(rng.uniform(-9, 3)))
            common = emit_model(inst, "sic-common")
            general = emit_model(inst, "sic-general", stage_cap=K - 1)
            assert model_optimum(inst, common)[0] == pytest.approx(
                model_optimum(inst, general)[0], rel=1e-12, abs=1e-12
            )


class TestAssignmentImport:
    def test_round_trip_via_solution(self, e2):
        lines = "x_1 1\nx_2 1\ny_2_1 1\ny_1_2 1\n"
        assign = read_assignment(lines)
        sol = assignment_to_solution(e2, "pic", assign)
        assert sol.active == (0, 1)
        assert sol.cancels == {0: (1,), 1: (0,)}
        ok, _ = verify_solution(e2, SchemeConfig(Scheme.PIC), sol)
        assert ok

    def test_staged_order(self, rng):
        inst = random_instance(rng, 3)
        assign = read_assignment("x_1 1\nx_2 1\nx_3 1\ny_2_1_2 1\ny_3_1_1 1\n")
        sol = assignment_to_solution(inst, "sic-general", assign)
        assert sol.cancels[0] == (2, 1)  # stage order, 0-based links

    def test_bad_lines(self):
        with pytest.raises(ParseError):
            read_assignment("x_1\n")
        with pytest.raises(ParseError):
            read_assignment("x_1 2\n")
        with pytest.raises(ParseError):
            read_assignment("x_1 frue\n")

    def test_comments_and_blanks(self):
        assert read_assignment("# solver output\n\nx_1 1\n") == {"x_1": 1}
