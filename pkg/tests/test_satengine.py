import itertools
import random

import pytest

from ltlfsat.errors import SolverBudgetExceeded
from ltlfsat.satengine import SatSolver


def _fresh(n):
    s = SatSolver()
    return s, [s.new_var() for _ in range(n)]


def test_single_positive_unit():
    s, (x,) = _fresh(1)
    s.add_clause([x])
    r = s.solve()
    assert r.sat and r.model[x] is True


def test_contradiction_is_unsat():
    s, (x,) = _fresh(1)
    s.add_clause([x])
    s.add_clause([-x])
    r = s.solve()
    assert not r.sat
    assert r.failed == frozenset()


def test_failed_assumptions_are_a_subset():
    s, (x, y) = _fresh(2)
    s.add_clause([x, y])
    r = s.solve([-x, -y])
    assert not r.sat
    assert r.failed <= {-x, -y}
    assert r.failed


def test_clauses_persist_across_solves():
    s, (x, y) = _fresh(2)
    s.add_clause([x, y])
    assert s.solve([-x]).model[y] is True
    s.add_clause([-y])
    r = s.solve([-x])
    assert not r.sat


def test_duplicate_clauses_are_harmless():
    s, (x, y) = _fresh(2)
    for _ in range(3):
        s.add_clause([x, y])
        s.add_clause([x, y, y])
    assert s.solve([-x]).model[y] is True


def test_verdict_is_stable_across_repeat_solves():
    s, (x, y, z) = _fresh(3)
    s.add_clause([x, y, z])
    s.add_clause([-x, -y])
    first = s.solve([z])
    second = s.solve([z])
    assert first.sat and second.sat


def test_failed_assumptions_unsat_as_units():
    """The failed set, asserted as unit clauses, contradicts the database."""
    rng = random.Random(5)
    for _ in range(40):
        nvars = rng.randrange(3, 9)
        s, vs = _fresh(nvars)
        clauses = []
        for _ in range(rng.randrange(2, 14)):
            clause = [
                v if rng.randrange(2) else -v
                for v in rng.sample(vs, rng.randrange(1, min(4, nvars) + 1))
            ]
            clauses.append(clause)
            s.add_clause(clause)
        assumptions = [v if rng.randrange(2) else -v for v in rng.sample(vs, nvars // 2 + 1)]
        r = s.solve(assumptions)
        if r.sat:
            continue
        assert r.failed <= set(assumptions)
        again = SatSolver()
        for _ in vs:
            again.new_var()
        for clause in clauses:
            again.add_clause(clause)
        for lit in r.failed:
            again.add_clause([lit])
        assert not again.solve().sat


def _truth_table_sat(nvars, clauses, assumptions=()):
    for bits in itertools.product([False, True], repeat=nvars):
        def val(lit):
            v = bits[abs(lit) - 1]
            return v if lit > 0 else not v

        if all(val(a) for a in assumptions) and all(
            any(val(l) for l in clause) for clause in clauses
        ):
            return True
    return False


def test_verdicts_match_truth_tables():
    rng = random.Random(99)
    for round_ in range(80):
        nvars = rng.randrange(1, 13)
        s, vs = _fresh(nvars)
        clauses = []
        for _ in range(rng.randrange(1, 2 * nvars + 2)):
            width = rng.randrange(1, min(4, nvars) + 1)
            clause = [v if rng.randrange(2) else -v for v in rng.sample(vs, width)]
            clauses.append(clause)
            s.add_clause(clause)
        assumptions = [
            v if rng.randrange(2) else -v for v in rng.sample(vs, rng.randrange(0, nvars + 1))
        ]
        expected = _truth_table_sat(nvars, clauses, assumptions)
        got = s.solve(assumptions)
        assert got.sat == expected, (clauses, assumptions)
        if got.sat:
            def val(lit):
                v = got.model[abs(lit)]
                return v if lit > 0 else not v

            assert all(val(a) for a in assumptions)
            assert all(any(val(l) for l in clause) for clause in clauses)


def test_model_is_total():
    s, vs = _fresh(5)
    s.add_clause([vs[0]])
    r = s.solve()
    assert set(r.model) == set(vs)


def test_assumption_pair_conflict():
    s, (x,) = _fresh(1)
    r = s.solve([x, -x])
    assert not r.sat
    assert r.failed == {x, -x}


def test_conflict_budget_aborts_without_verdict():
    rng = random.Random(1)
    s = SatSolver(conflict_budget=1)
    vs = [s.new_var() for _ in range(12)]
    # a small pigeonhole-flavoured instance to force some conflicts
    for i in range(0, 12, 3):
        s.add_clause([vs[i], vs[i + 1], vs[i + 2]])
    for _ in range(40):
        s.add_clause([rng.choice([v, -v]) for v in rng.sample(vs, 3)])
    with pytest.raises(SolverBudgetExceeded):
        for _ in range(50):
            s.solve([rng.choice([v, -v]) for v in rng.sample(vs, 6)])


def test_phase_hint_controls_free_variables():
    s = SatSolver(phase_hint=False)
    x = s.new_var()
    y = s.new_var()
    s.add_clause([x, y])
    r = s.solve()
    # x is decided false by phase, which forces y
    assert r.model[x] is False and r.model[y] is True
    s2 = SatSolver(phase_hint=True)
    a = s2.new_var()
    b = s2.new_var()
    s2.add_clause([a, b])
    r2 = s2.solve()
    assert r2.model[a] is True and r2.model[b] is True
