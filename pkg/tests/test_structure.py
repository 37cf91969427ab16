import itertools

import pytest

from finmodel.corpus import random_formula, random_structure
from finmodel.formula import parse, relativize
from finmodel.structure import (
    BudgetExceededError,
    EvalError,
    FinStructure,
    eval_formula,
    eval_relativized,
    induced_substructure,
    is_absolute,
    is_sigma_elementary,
)
from finmodel.formula import FormulaPack, subformula_closure
from finmodel.universe import build_hierarchy

from conftest import seeded

V2 = build_hierarchy(2).structure
V3 = build_hierarchy(3).structure


def test_eval_empty_set_exists_in_v2():
    assert eval_formula(V2, parse("Ex Ay ~(y in x)")) is True


def test_eval_reflexive_point():
    N = FinStructure(1, frozenset({(0, 0)}))
    assert eval_formula(N, parse("Ex (x in x)")) is True


def test_eval_empty_relation_scan():
    # brute scan over the three candidate witnesses, all fail
    N = FinStructure(3, frozenset())
    phi = parse("Ex (x in #0)")
    assert not any((a, 0) in N.pairs for a in range(3))
    assert eval_formula(N, phi) is False


def test_eval_errors():
    with pytest.raises(EvalError):
        eval_formula(V2, parse("x in y"), {"x": 0})  # y unbound
    with pytest.raises(EvalError):
        eval_formula(V2, parse("Ex (x in #9)"))  # dangling constant
    with pytest.raises(EvalError):
        eval_formula(V2, relativize(parse("Ex (x = x)")))  # relativized node
    with pytest.raises(EvalError):
        eval_formula(V2, parse("x = x"), {"x": 7})  # value outside universe


def test_eval_budget_guard():
    deep = parse("Ex Ey Ez Eu ((x in y | y in z) | (z in u))")
    with pytest.raises(BudgetExceededError):
        eval_formula(V3, deep, budget=10)


def test_eval_relativized_known_cases():
    assert eval_relativized(V2, [1], relativize(parse("Ex (x = x)"))) is True
    # within {1} the element {empty} has no member inside the subset
    assert eval_relativized(V2, [1], relativize(parse("Ex Ay ~(y in x)"))) is True
    assert eval_relativized(V2, [], relativize(parse("Ex (x = x)"))) is False


def test_eval_relativized_entry_checks():
    with pytest.raises(EvalError):
        eval_relativized(V2, [1], relativize(parse("x = x")), {"x": 0})
    with pytest.raises(EvalError):
        eval_relativized(V2, [1], relativize(parse("Ex (x in #0)")))


def test_eval_relativized_mixed_quantifiers():
    # unbounded part still sees the whole structure
    phi = relativize(parse("Ey (y in x)"))  # bounded
    assert eval_relativized(V2, [1], phi, {"x": 1}) is False
    unbounded = parse("Ey (y in x)")
    assert eval_relativized(V2, [1], unbounded, {"x": 1}) is True


def test_induced_substructure():
    sub, remap = induced_substructure(V3, range(V3.size))
    assert sub.size == V3.size and sub.pairs == V3.pairs

    # V3 is codes 0..3; restrict to {0, 1}: only 0 E 1 survives
    sub2, remap2 = induced_substructure(V3, [0, 1])
    assert sub2.size == 2 and sub2.pairs == frozenset({(0, 1)})
    assert remap2 == {0: 0, 1: 1}

    empty, _ = induced_substructure(V3, [])
    assert empty.size == 0


def test_induced_substructure_remap_and_errors():
    sub, remap = induced_substructure(V3, [1, 3])
    assert remap == {1: 0, 3: 1}
    assert sub.pairs == frozenset({(0, 1)})  # 1 E 3 in the hierarchy
    with pytest.raises(ValueError):
        induced_substructure(V3, [9])


def test_is_absolute_known_cases():
    assert is_absolute([0], V3, parse("x in y")).ok  # quantifier-free
    check = is_absolute([1], V2, parse("Ey (y in x)"))
    assert not check.ok and check.counterexample == {"x": 1}
    assert is_absolute(range(V3.size), V3, parse("Ey (y in x)")).ok


def test_is_sigma_elementary_known_cases():
    empty_pack = subformula_closure(FormulaPack("none", ()))
    assert is_sigma_elementary([1], V2, empty_pack).ok
    pack = subformula_closure(FormulaPack("p", (parse("Ey (y in x)"),)))
    assert is_sigma_elementary(range(V2.size), V2, pack).ok
    check = is_sigma_elementary([1], V2, pack)
    assert not check.ok
    assert check.formula == parse("Ey (y in x)")
    assert check.counterexample == {"x": 1}


def test_sigma_elementary_consistent_with_parts():
    rng = seeded(7)
    for _ in range(20):
        N = random_structure(rng.randint(2, 6), rng)
        pack = subformula_closure(
            FormulaPack("r", tuple(random_formula(rng, 2) for _ in range(3)))
        )
        M = [e for e in range(N.size) if rng.random() < 0.6]
        agg = is_sigma_elementary(M, N, pack)
        parts = [is_absolute(M, N, phi).ok for phi in pack.formulas]
        assert agg.ok == all(parts)


def test_relativization_theorem_small_corpus():
    # eval_relativized over N equals plain eval over the induced substructure
    rng = seeded(11)
    for _ in range(40):
        N = random_structure(rng.randint(2, 6), rng)
        phi = random_formula(rng, rng.randint(0, 3))
        rel = relativize(phi)
        members = sorted(e for e in range(N.size) if rng.random() < 0.7)
        sub, remap = induced_substructure(N, members)
        names = sorted({v for v in _free(phi)})
        for combo in itertools.product(members, repeat=len(names)):
            v_host = dict(zip(names, combo))
            v_sub = {k: remap[val] for k, val in v_host.items()}
            assert eval_relativized(N, members, rel, v_host) == eval_formula(
                sub, phi, v_sub
            )


def _free(phi):
    from finmodel.formula import free_vars

    return free_vars(phi)


def test_substitution_agrees_with_valuation():
    # plugging constants in syntactically matches evaluating under the
    # corresponding valuation
    from finmodel.formula import substitute

    rng = seeded(47)
    for _ in range(60):
        N = random_structure(rng.randint(2, 6), rng)
        phi = random_formula(rng, rng.randint(0, 2))
        valuation = {v: rng.randrange(N.size) for v in _free(phi)}
        closed = substitute(phi, valuation)
        assert _free(closed) == []
        assert eval_formula(N, closed) == eval_formula(N, phi, valuation)


def test_is_absolute_remaps_constants():
    phi = parse("Ey (y in #1)")
    # the constant keeps naming element 1 after the substructure renames
    check = is_absolute([1, 3], V3, phi)
    assert not check.ok or check.counterexample is None
    sub, remap = induced_substructure(V3, [1, 3])
    direct = eval_formula(sub, parse(f"Ey (y in #{remap[1]})"))
    assert check.ok == (eval_formula(V3, phi) == direct)
    with pytest.raises(EvalError):
        is_absolute([0], V3, phi)  # constant outside the subset
