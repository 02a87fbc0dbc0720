import json
import random

import pytest

from fincount.engine import (
    BudgetExceededError, EvalError, Structure, count_models, count_models_mod,
    enumerate_models, evaluate,
)
from fincount.logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, ForallRel, Implies, Not, Or, Top, Var, Vocabulary,
)

from conftest import all_structures, brute_force_count, random_formula

BINARY = Vocabulary((("E", 2),), 0)
MIXED = Vocabulary((("U", 1), ("E", 2)), 0)


def _graph(universe_size, edges):
    return Structure.make(BINARY, universe_size, {"E": set(edges)})


def test_evaluate_irreflexive_on_empty_relation():
    s = _graph(3, [])
    f = Forall("x", Not(Atom("E", (Var("x"), Var("x")))))
    assert evaluate(s, f) is True


def test_evaluate_modular_count_of_neighbors():
    s = _graph(3, [(1, 2), (2, 1)])
    f = Count(0, 2, "x", Exists("y", Atom("E", (Var("x"), Var("y")))))
    # Elements 1 and 2 have neighbors; 2 is congruent to 0 mod 2.
    witnesses = sum(
        1 for v in (1, 2, 3)
        if evaluate(s, Exists("y", Atom("E", (Var("x"), Var("y")))), {"x": v})
    )
    assert witnesses == 2
    assert evaluate(s, f) is True


def test_evaluate_top_and_constants():
    vocab = Vocabulary((("E", 2),), 1)
    s = Structure.make(vocab, 3, {"E": {(1, 3)}})
    assert evaluate(s, Top()) is True
    # Constant 1 of 1 denotes the top element 3.
    assert evaluate(s, Atom("E", (Var("x"), Const(1))), {"x": 1}) is True
    assert evaluate(s, Eq(Var("x"), Const(1)), {"x": 3}) is True


def test_evaluate_errors():
    s = _graph(2, [])
    with pytest.raises(EvalError):
        evaluate(s, Atom("E", (Var("x"), Var("y"))), {"x": 1})
    with pytest.raises(EvalError):
        evaluate(s, Atom("missing", ()))


def test_evaluate_second_order_limit():
    s = _graph(3, [(1, 2)])
    f = ExistsRel("W", 2, Top())
    with pytest.raises(BudgetExceededError):
        evaluate(s, f, so_tuple_limit=8)
    assert evaluate(s, f, so_tuple_limit=9) is True


def test_evaluate_guarded_subsets():
    s = _graph(2, [(1, 2), (2, 1)])
    # Some subset of E is nonempty and symmetric: E itself.
    f = ExistsRelSub(
        "S", "E",
        And(
            Exists("x", Exists("y", Atom("S", (Var("x"), Var("y"))))),
            Forall("x", Forall("y", Implies(
                Atom("S", (Var("x"), Var("y"))), Atom("S", (Var("y"), Var("x")))
            ))),
        ),
    )
    assert evaluate(s, f) is True


def test_count_true_sentence_powers():
    for vocab, exponent in [
        (BINARY, lambda N: N * N),
        (MIXED, lambda N: N + N * N),
        (Vocabulary((("Z", 0), ("T", 3)), 0), lambda N: 1 + N ** 3),
    ]:
        spec = ClassSpec(vocab, Top())
        for n in range(0, 4):
            assert count_models(spec, n).count == 2 ** exponent(n)


def test_count_models_mod_examples():
    spec = ClassSpec(BINARY, Top())
    assert count_models(spec, 2).count == 16
    assert count_models_mod(spec, 2, 10) == 6
    from fincount.builtins import builtin_class

    assert count_models_mod(builtin_class("equivalence"), 4, 7) == 1  # 15 mod 7


def test_count_against_brute_force_on_random_formulas():
    rng = random.Random(99)
    vocab = Vocabulary((("U", 1), ("E", 2)), 1)
    for _ in range(25):
        f = random_formula(rng, vocab, depth=3, scope=())
        spec = ClassSpec(vocab, f)
        for n in (0, 1, 2):
            assert count_models(spec, n).count == brute_force_count(spec, n)


def test_complement_property():
    rng = random.Random(4242)
    for _ in range(15):
        f = random_formula(rng, MIXED, depth=3, scope=())
        spec = ClassSpec(MIXED, f)
        co_spec = ClassSpec(MIXED, Not(f))
        for n in (0, 1, 2, 3):
            bits = n + n * n
            assert count_models(spec, n).count + count_models(co_spec, n).count == 2 ** bits


def test_quantifier_and_demorgan_duality():
    rng = random.Random(5)
    for _ in range(30):
        body = random_formula(rng, MIXED, depth=2, scope=("w",))
        forall = Forall("w", body)
        not_exists_not = Not(Exists("w", Not(body)))
        for structure in all_structures(MIXED, 2):
            assert evaluate(structure, forall) == evaluate(structure, not_exists_not)
        a = random_formula(rng, MIXED, depth=2, scope=())
        b = random_formula(rng, MIXED, depth=2, scope=())
        for structure in all_structures(MIXED, 2):
            assert evaluate(structure, Not(And(a, b))) == evaluate(structure, Or(Not(a), Not(b)))


def test_count_quantifier_matches_cardinality():
    rng = random.Random(77)
    for _ in range(20):
        body = random_formula(rng, MIXED, depth=2, scope=("w",))
        for m in (2, 3):
            for r in range(m):
                f = Count(r, m, "w", body)
                for size in (0, 1, 2, 3):
                    for structure in all_structures(MIXED, size):
                        hits = sum(
                            1 for v in range(1, size + 1)
                            if evaluate(structure, body, {"w": v})
                        )
                        assert evaluate(structure, f) == (hits % m == r)
                    if size == 3:
                        break  # 2^12 structures is enough at size 3; skip duplicates


def test_sharding_is_count_invariant():
    from fincount.builtins import builtin_class

    spec = builtin_class("equivalence")
    counts = {w: count_models(spec, 4, workers=w).count for w in (1, 2, 8)}
    assert set(counts.values()) == {15}
    phi_true = ClassSpec(MIXED, Top())
    assert count_models(phi_true, 3, workers=8).count == 2 ** 12


def test_budget_exceeded():
    from fincount.builtins import builtin_class

    spec = builtin_class("equivalence")
    with pytest.raises(BudgetExceededError):
        count_models(spec, 4, budget_bits=3)


def test_empty_universe_semantics():
    spec = ClassSpec(BINARY, Forall("x", Bottom()))
    assert count_models(spec, 0).count == 1
    spec = ClassSpec(BINARY, Exists("x", Top()))
    assert count_models(spec, 0).count == 0
    nullary = Vocabulary((("Z", 0),), 0)
    spec = ClassSpec(nullary, Atom("Z", ()))
    assert count_models(spec, 0).count == 1  # of the two nullary interpretations


def test_count_result_json():
    spec = ClassSpec(BINARY, Top())
    result = count_models(spec, 2, label="true-binary")
    data = json.loads(result.to_json())
    assert data["class"] == "true-binary"
    assert data["n"] == 2
    assert data["universe"] == 2
    assert data["count"] == "16"
    assert data["method"] == "enumeration"
    assert isinstance(data["elapsedMs"], int)


def test_count_validates_input():
    bad = ClassSpec(BINARY, Atom("E", (Var("x"), Var("y"))))
    with pytest.raises(ValueError):
        count_models(bad, 2)
    with pytest.raises(ValueError):
        count_models(ClassSpec(BINARY, Top()), -1)


def test_enumerate_models_equivalences():
    from fincount.builtins import builtin_class

    spec = builtin_class("equivalence")
    models = list(enumerate_models(spec, 3))
    assert len(models) == 5
    assert len(set(models)) == 5
    for s in models:
        assert evaluate(s, spec.sentence)


def test_second_order_conjunct_counts():
    # The second-order conjunct holds in every structure, so only the
    # first-order reflexivity conjunct constrains the count.
    f = And(
        ExistsRel("W", 1, Forall("x", Atom("W", (Var("x"),)))),
        Forall("x", Atom("E", (Var("x"), Var("x")))),
    )
    spec = ClassSpec(BINARY, f)
    assert count_models(spec, 2).count == 2 ** (4 - 2)
