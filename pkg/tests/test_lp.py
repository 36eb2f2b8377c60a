from __future__ import annotations

import numpy as np
import pytest

from mutualcover.errors import LpError
from mutualcover.lp import (
    FEASIBILITY_TOL,
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    STATUS_UNBOUNDED,
    LinearProgram,
    dump_lp,
    solve_lp,
)

from .lp_oracle import oracle_solve


def random_lp(rng: np.random.Generator, max_vars: int = 5, max_cons: int = 5) -> LinearProgram:
    """Random small LP with integer coefficients in [-5, 5]."""
    n = int(rng.integers(1, max_vars + 1))
    n_eq = int(rng.integers(0, 3))
    n_ub = int(rng.integers(0 if n_eq else 1, max_cons + 1 - n_eq))
    coef = lambda shape: rng.integers(-5, 6, size=shape).astype(float)
    return LinearProgram(
        objective=coef(n),
        a_eq=coef((n_eq, n)) if n_eq else None,
        b_eq=coef(n_eq) if n_eq else None,
        a_ub=coef((n_ub, n)) if n_ub else None,
        b_ub=coef(n_ub) if n_ub else None,
    )


class TestBasicInstances:
    def test_forced_equality(self):
        sol = solve_lp(LinearProgram(objective=[1.0], a_eq=[[1.0]], b_eq=[1.0]))
        assert sol.status == STATUS_OPTIMAL
        assert sol.x == pytest.approx([1.0])
        assert sol.objective_value == pytest.approx(1.0)

    def test_objective_constant_on_feasible_set(self):
        sol = solve_lp(LinearProgram(objective=[1.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[1.0]))
        assert sol.status == STATUS_OPTIMAL
        assert sol.objective_value == pytest.approx(1.0)

    def test_one_dimensional_bounded(self):
        sol = solve_lp(LinearProgram(objective=[-1.0], a_ub=[[1.0]], b_ub=[5.0]))
        assert sol.status == STATUS_OPTIMAL
        assert sol.x == pytest.approx([5.0])
        assert sol.objective_value == pytest.approx(-5.0)

    def test_one_dimensional_unbounded(self):
        sol = solve_lp(LinearProgram(objective=[-1.0]))
        assert sol.status == STATUS_UNBOUNDED

    def test_infeasible_sign(self):
        sol = solve_lp(LinearProgram(objective=[1.0], a_eq=[[1.0]], b_eq=[-1.0]))
        assert sol.status == STATUS_INFEASIBLE

    def test_infeasible_conflicting_rows(self):
        lp = LinearProgram(objective=[0.0, 0.0],
                           a_eq=[[1.0, 1.0], [1.0, 1.0]], b_eq=[1.0, 2.0])
        assert solve_lp(lp).status == STATUS_INFEASIBLE

    def test_redundant_equality_rows(self):
        lp = LinearProgram(objective=[1.0, 2.0],
                           a_eq=[[1.0, 1.0], [2.0, 2.0]], b_eq=[1.0, 2.0])
        sol = solve_lp(lp)
        assert sol.status == STATUS_OPTIMAL
        assert sol.objective_value == pytest.approx(1.0)

    def test_negative_rhs_inequality(self):
        # x1 - x2 <= -1 with x >= 0: minimum of x1 + x2 is at (0, 1)
        lp = LinearProgram(objective=[1.0, 1.0], a_ub=[[1.0, -1.0]], b_ub=[-1.0])
        sol = solve_lp(lp)
        assert sol.status == STATUS_OPTIMAL
        assert sol.objective_value == pytest.approx(1.0)


class TestValidation:
    def test_dimension_mismatch(self):
        with pytest.raises(LpError):
            LinearProgram(objective=[1.0, 2.0], a_eq=[[1.0]], b_eq=[1.0])

    def test_rhs_length_mismatch(self):
        with pytest.raises(LpError):
            LinearProgram(objective=[1.0], a_ub=[[1.0]], b_ub=[1.0, 2.0])

    def test_non_finite_coefficient(self):
        with pytest.raises(LpError):
            LinearProgram(objective=[np.nan])
        with pytest.raises(LpError):
            LinearProgram(objective=[1.0], a_ub=[[np.inf]], b_ub=[1.0])

    def test_empty_objective(self):
        with pytest.raises(LpError):
            LinearProgram(objective=[])


class TestSolutionContracts:
    def test_feasibility_asserted_on_every_solve(self):
        rng = np.random.default_rng(21)
        checked = 0
        while checked < 40:
            lp = random_lp(rng)
            sol = solve_lp(lp)
            if sol.status != STATUS_OPTIMAL:
                continue
            checked += 1
            x = sol.x
            assert x.min(initial=0.0) >= -FEASIBILITY_TOL
            if lp.b_eq.size:
                assert np.abs(lp.a_eq @ x - lp.b_eq).max() <= FEASIBILITY_TOL
            if lp.b_ub.size:
                assert (lp.a_ub @ x - lp.b_ub).max() <= FEASIBILITY_TOL

    def test_bitwise_determinism(self):
        rng = np.random.default_rng(33)
        for _ in range(25):
            lp = random_lp(rng)
            first = solve_lp(lp)
            second = solve_lp(lp)
            assert first.status == second.status
            if first.status == STATUS_OPTIMAL:
                assert first.objective_value == second.objective_value
                assert np.array_equal(first.x, second.x)

    def test_degenerate_zero_rhs_columns(self):
        # Mimics delta constraints: many rows with zero right-hand side and
        # a whole column forced to zero.
        lp = LinearProgram(
            objective=[1.0, 2.0, 3.0],
            a_eq=[[1.0, 1.0, 1.0]],
            b_eq=[1.0],
            a_ub=[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [1.0, -1.0, 0.0]],
            b_ub=[0.0, 0.0, 0.0],
        )
        sol = solve_lp(lp)
        assert sol.status == STATUS_OPTIMAL
        assert sol.x[2] == pytest.approx(0.0, abs=1e-12)
        assert sol.objective_value == pytest.approx(1.5)


class TestOracleEquivalence:
    def test_fifty_random_lps_match_vertex_enumeration(self):
        rng = np.random.default_rng(seed=424242)
        solved = 0
        attempts = 0
        while solved < 50:
            attempts += 1
            assert attempts < 500, "random LP generator starved"
            lp = random_lp(rng)
            status, objective = oracle_solve(
                lp.objective,
                lp.a_eq if lp.b_eq.size else None,
                lp.b_eq if lp.b_eq.size else None,
                lp.a_ub if lp.b_ub.size else None,
                lp.b_ub if lp.b_ub.size else None,
            )
            sol = solve_lp(lp)
            assert sol.status == status, dump_lp(lp)
            if status == STATUS_OPTIMAL:
                assert sol.objective_value == pytest.approx(objective, abs=1e-6), dump_lp(lp)
            solved += 1

    def test_larger_variable_count_against_oracle(self):
        rng = np.random.default_rng(seed=77)
        done = 0
        while done < 5:
            lp = random_lp(rng, max_vars=8, max_cons=3)
            if lp.num_vars < 7:
                continue
            status, objective = oracle_solve(
                lp.objective,
                lp.a_eq if lp.b_eq.size else None,
                lp.b_eq if lp.b_eq.size else None,
                lp.a_ub if lp.b_ub.size else None,
                lp.b_ub if lp.b_ub.size else None,
            )
            sol = solve_lp(lp)
            assert sol.status == status, dump_lp(lp)
            if status == STATUS_OPTIMAL:
                assert sol.objective_value == pytest.approx(objective, abs=1e-6)
            done += 1


class TestDump:
    def test_dump_layout(self):
        lp = LinearProgram(objective=[1.0, -2.0], a_eq=[[1.0, 1.0]], b_eq=[3.0],
                           a_ub=[[0.0, 1.0]], b_ub=[4.0])
        text = dump_lp(lp)
        lines = text.strip().split("\n")
        assert lines[0].startswith("min ")
        assert lines[1].endswith("= 3")
        assert lines[2].endswith("<= 4")
