import pytest

from fincount.builtins import builtin_class
from fincount.eliminate import (
    UnsupportedNodeError, eliminate_higher_arity, eliminate_many_one,
    eliminate_one_sum, embed_structure, project_structure, simulate_nullary,
    transform_formula,
)
from fincount.engine import count_models, evaluate
from fincount.logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, Implies, Not, Or, Top, Var, Vocabulary,
    formula_features, free_variables, validate_class_spec,
)
from fincount.witness import build_phi_m

from conftest import all_structures

UE1 = Vocabulary((("U", 1), ("E", 2)), 1)


def _spec(vocab, sentence):
    return ClassSpec(vocab, sentence)


# --- Atomic transformation cases ---------------------------------------------


def test_unary_atom_on_removed_element_sum_mode():
    base = _spec(UE1, Top())
    out, _ = transform_formula(
        Atom("U", (Var("x1"),)), base, "sum",
        sent_to_removed=frozenset({"x1"}), unaries_holding=frozenset({"U"}),
    )
    assert out == Top()
    out, _ = transform_formula(
        Atom("U", (Var("x1"),)), base, "sum",
        sent_to_removed=frozenset({"x1"}), unaries_holding=frozenset(),
    )
    assert out == Bottom()


def test_equality_with_removed_constant_is_false():
    base = _spec(UE1, Top())
    out, _ = transform_formula(Eq(Var("x1"), Const(1)), base, "sum")
    assert out == Bottom()
    out, _ = transform_formula(Eq(Var("x1"), Const(1)), base, "sum",
                               sent_to_removed=frozenset({"x1"}))
    assert out == Top()


def test_binary_atom_cases_many_one():
    base = _spec(UE1, Top())
    out, prov = transform_formula(Atom("E", (Var("x1"), Const(1))), base, "manyOne")
    assert out == Atom("E_in", (Var("x1"),))
    assert prov["E_in"] == "in:E"
    out, _ = transform_formula(Atom("E", (Const(1), Var("x1"))), base, "manyOne")
    assert out == Atom("E_out", (Var("x1"),))
    out, _ = transform_formula(Atom("E", (Const(1), Const(1))), base, "manyOne")
    assert out == Atom("E_loop", ())
    out, _ = transform_formula(Atom("U", (Const(1),)), base, "manyOne")
    assert out == Atom("U_at", ())
    out, _ = transform_formula(Atom("E", (Var("x1"), Var("x2"))), base, "manyOne")
    assert out == Atom("E", (Var("x1"), Var("x2")))


def test_lower_constants_pass_through():
    vocab = Vocabulary((("E", 2),), 2)
    base = _spec(vocab, Top())
    out, _ = transform_formula(Atom("E", (Const(1), Const(2))), base, "manyOne")
    assert out == Atom("E_in", (Const(1),))
    out, _ = transform_formula(Eq(Var("x1"), Const(1)), base, "manyOne")
    assert out == Eq(Var("x1"), Const(1))


def test_higher_arity_atom_projection():
    vocab = Vocabulary((("T", 3),), 1)
    base = _spec(vocab, Top())
    out, prov = transform_formula(
        Atom("T", (Var("x1"), Const(1), Var("x2"))), base, "higherArity",
        sent_to_removed=frozenset({"x2"}),
    )
    assert out == Atom("T_23", (Var("x1"),))
    assert prov["T_23"] == "proj:T:23"


# --- Sum mode -----------------------------------------------------------------


def test_sum_output_cardinality():
    only_binary = _spec(Vocabulary((("E", 2),), 1), Top())
    assert len(eliminate_one_sum(only_binary).outputs) == 2
    assert len(eliminate_one_sum(_spec(UE1, Top())).outputs) == 4


def test_sum_preserves_counts_restricted_bell():
    spec = builtin_class("restrictedBell", (1,))
    result = eliminate_one_sum(spec)
    for n in range(0, 4):
        want = count_models(spec, n).count
        got = sum(count_models(s, n).count for s in result.outputs)
        assert want == got
    assert [count_models(spec, n).count for n in (1, 2, 3)] == [2, 5, 15]


def test_sum_of_false_counts_zero():
    result = eliminate_one_sum(_spec(UE1, Bottom()))
    for s in result.outputs:
        assert count_models(s, 2).count == 0


def test_sum_rejects_bad_vocabularies():
    with pytest.raises(ValueError):
        eliminate_one_sum(_spec(Vocabulary((("E", 2),), 0), Top()))
    with pytest.raises(UnsupportedNodeError):
        eliminate_one_sum(_spec(Vocabulary((("T", 3),), 1), Top()))
    with pytest.raises(UnsupportedNodeError):
        eliminate_one_sum(_spec(Vocabulary((("Z", 0), ("E", 2)), 1), Top()))


# --- Many-one mode -------------------------------------------------------------


def test_many_one_identity_without_constants():
    spec = builtin_class("equivalence")
    result = eliminate_many_one(spec)
    assert result.outputs == (spec,)


def test_many_one_rejects_ternary():
    with pytest.raises(UnsupportedNodeError):
        eliminate_many_one(build_phi_m())


def test_many_one_vocabulary_inventory():
    result = eliminate_many_one(_spec(UE1, Top()))
    out = result.output.vocab
    # One nullary per unary, one per binary (the loop), in/out unaries per binary.
    assert out.by_arity(0) == ("U_at", "E_loop")
    assert out.by_arity(1) == ("U", "E_in", "E_out")
    assert out.by_arity(2) == ("E",)
    assert out.num_constants == 0
    roles = sorted(result.provenance.values())
    assert roles == ["at:U", "in:E", "loop:E", "out:E"]


def test_many_one_preserves_counts_restricted_bell_2():
    spec = builtin_class("restrictedBell", (2,))
    result = eliminate_many_one(spec)
    for n in range(0, 4):
        assert count_models(spec, n).count == count_models(result.output, n).count
    assert [count_models(spec, n).count for n in (1, 2, 3)] == [3, 10, 37]


def test_iterated_many_one_removes_all_constants():
    spec = builtin_class("restrictedBell", (2,))
    step1 = eliminate_many_one(spec).output
    assert step1.vocab.num_constants == 1
    step2 = eliminate_many_one(step1).output
    assert step2.vocab.num_constants == 0
    assert validate_class_spec(step2) == []
    for n in range(0, 3):
        assert count_models(spec, n).count == count_models(step2, n).count


def test_iterated_many_one_on_counting_sentence():
    vocab = Vocabulary((("E", 2),), 2)
    sentence = Forall("x", Count(0, 2, "y", Or(
        Atom("E", (Var("x"), Var("y"))), Eq(Var("y"), Const(2)),
    )))
    spec = _spec(vocab, sentence)
    step2 = eliminate_many_one(eliminate_many_one(spec).output).output
    assert step2.vocab.num_constants == 0
    for n in range(0, 3):
        assert count_models(spec, n).count == count_models(step2, n).count


def test_iterated_sum_removes_all_constants():
    # Applying the sum split to every branch again multiplies the family;
    # the grand total still matches the input at every n.
    spec = builtin_class("restrictedBell", (2,))
    first = eliminate_one_sum(spec)
    second: list = []
    for branch in first.outputs:
        second.extend(eliminate_one_sum(branch).outputs)
    assert len(first.outputs) == 2 and len(second) == 2 * 8
    for n in range(0, 3):
        want = count_models(spec, n).count
        assert sum(count_models(s, n).count for s in second) == want


# --- Higher-arity mode ----------------------------------------------------------


def test_higher_arity_projects_ternary_into_eight():
    result = eliminate_higher_arity(build_phi_m())
    out = result.output.vocab
    assert out.relations == (
        ("R", 3), ("R_1", 2), ("R_2", 2), ("R_3", 2),
        ("R_12", 1), ("R_13", 1), ("R_23", 1), ("R_123", 0),
    )
    assert count_models(result.output, 1, budget_bits=26).count == 1


def test_higher_arity_agrees_with_many_one_on_binary_vocab():
    spec = builtin_class("restrictedBell", (1,))
    mo = eliminate_many_one(spec).output
    ha = eliminate_higher_arity(spec).output
    for n in range(0, 4):
        assert count_models(mo, n).count == count_models(ha, n).count


def test_higher_arity_never_adds_maximum_arity():
    spec = _spec(Vocabulary((("T", 3), ("E", 2)), 1), Top())
    out = eliminate_higher_arity(spec).output.vocab
    assert max(ar for _, ar in out.relations) == 3
    assert sum(1 for _, ar in out.relations if ar == 3) == 1


# --- Quantifier handling ---------------------------------------------------------


def test_second_order_sum_mode_preserves_counts():
    f = ExistsRel("W", 1, Forall("x", Implies(
        Atom("W", (Var("x"),)), Atom("E", (Var("x"), Const(1)))
    )))
    spec = _spec(Vocabulary((("E", 2),), 1), f)
    result = eliminate_one_sum(spec)
    for n in range(0, 3):
        want = count_models(spec, n).count
        got = sum(count_models(s, n).count for s in result.outputs)
        assert want == got


def test_second_order_sum_mode_branches_bind_fresh_symbols():
    f = ExistsRel("W", 1, Forall("x", Implies(
        Atom("W", (Var("x"),)), Atom("E", (Var("x"), Const(1)))
    )))
    spec = _spec(Vocabulary((("E", 2),), 1), f)
    out, _ = transform_formula(f, spec, "sum")
    # The quantifier splits into a branch where the new relation misses the
    # removed element and one where it holds it; the second binds a renamed
    # symbol so no symbol is bound twice.
    assert isinstance(out, Or)
    assert isinstance(out.left, ExistsRel) and isinstance(out.right, ExistsRel)
    assert out.left.rel == "W"
    assert out.right.rel != "W"


def test_count_quantifier_preserved_in_all_modes():
    f = Forall("x", Count(0, 2, "y", Or(Atom("E", (Var("x"), Var("y"))), Eq(Var("y"), Const(1)))))
    spec = _spec(Vocabulary((("E", 2),), 1), f)
    runs = [
        eliminate_one_sum(spec).outputs,
        eliminate_many_one(spec).outputs,
        eliminate_higher_arity(spec).outputs,
    ]
    for outputs in runs:
        for n in range(0, 3):
            want = count_models(spec, n).count
            got = sum(count_models(s, n).count for s in outputs)
            assert want == got


def test_guarded_quantifier_requires_higher_arity_mode():
    f = ExistsRelSub("S", "E", Top())
    spec = _spec(Vocabulary((("E", 2),), 1), f)
    with pytest.raises(UnsupportedNodeError):
        eliminate_many_one(spec)
    with pytest.raises(UnsupportedNodeError):
        eliminate_one_sum(spec)
    result = eliminate_higher_arity(spec)
    for n in range(0, 3):
        assert count_models(spec, n).count == count_models(result.output, n).count


def test_logic_features_preserved(corpus):
    for label, spec in corpus:
        in_feats = formula_features(spec.sentence)
        for result in (eliminate_many_one(spec), eliminate_higher_arity(spec)):
            for out in result.outputs:
                extra = formula_features(out.sentence) - in_feats
                # Second-order machinery is never introduced for FO inputs.
                assert not (extra & {"so1", "so2", "guarded"}), (label, extra)
                assert "count" in in_feats or "count" not in extra, label


def test_outputs_are_closed_and_valid(corpus):
    for label, spec in corpus:
        for result in (
            eliminate_one_sum(spec),
            eliminate_many_one(spec),
            eliminate_higher_arity(spec),
        ):
            for out in result.outputs:
                assert validate_class_spec(out) == [], label
                assert free_variables(out.sentence) == frozenset(), label


# --- Structure-level correspondence ---------------------------------------------


def _formula_probes():
    x, y = Var("x"), Var("y")
    return [
        Forall("x", Implies(Atom("E", (x, Const(1))), Atom("U", (x,)))),
        Exists("x", And(Atom("U", (x,)), Not(Eq(x, Const(1))))),
        Count(1, 2, "x", Atom("E", (x, x))),
        Exists("x", Exists("y", And(Atom("E", (x, y)), Atom("E", (y, Const(1)))))),
        Atom("E", (Const(1), Const(1))),
    ]


def test_correspondence_bijection_and_satisfaction():
    spec = _spec(UE1, Top())
    probes = _formula_probes()
    for mode, run in (
        ("sum", eliminate_one_sum),
        ("manyOne", eliminate_many_one),
        ("higherArity", eliminate_higher_arity),
    ):
        result = run(spec)
        for size in (1, 2, 3):
            images = set()
            total = 0
            for m in all_structures(UE1, size):
                projected = project_structure(result, m)
                if mode == "sum":
                    image, holding, looped = projected
                    back = embed_structure(result, image, holding, looped)
                else:
                    image = projected
                    back = embed_structure(result, image)
                assert back == m
                images.add(projected if mode != "sum" else (image, holding, looped))
                total += 1
                for probe in probes:
                    transformed, _ = transform_formula(
                        probe, spec, mode,
                        unaries_holding=holding if mode == "sum" else frozenset(),
                        binaries_looped=looped if mode == "sum" else frozenset(),
                    )
                    assert evaluate(m, probe) == evaluate(image, transformed), (mode, probe)
            assert len(images) == total


def test_correspondence_with_nullary_relations():
    vocab = Vocabulary((("Z", 0), ("U", 1), ("E", 2)), 1)
    sentence = Implies(Atom("Z", ()), Exists("x", Atom("E", (Var("x"), Const(1)))))
    spec = _spec(vocab, sentence)
    for mode, run in (("manyOne", eliminate_many_one), ("higherArity", eliminate_higher_arity)):
        result = run(spec)
        out, _ = transform_formula(sentence, spec, mode)
        for size in (1, 2):
            images = set()
            total = 0
            for m in all_structures(vocab, size):
                image = project_structure(result, m)
                assert embed_structure(result, image) == m
                images.add(image)
                total += 1
                assert evaluate(m, sentence) == evaluate(image, out), mode
            assert len(images) == total
        for n in range(0, 3):
            assert count_models(spec, n).count == count_models(result.output, n).count


# --- Nullary simulation -----------------------------------------------------------


def test_simulate_nullary_identity_without_nullaries():
    spec = builtin_class("equivalence")
    assert simulate_nullary(spec) is spec


def test_simulate_nullary_preserves_counts():
    vocab = Vocabulary((("Z", 0), ("E", 2)), 0)
    spec = _spec(vocab, Implies(Atom("Z", ()), Forall("x", Atom("E", (Var("x"), Var("x"))))))
    sim = simulate_nullary(spec)
    assert sim.vocab.by_arity(0) == ()
    assert validate_class_spec(sim) == []
    for n in (1, 2, 3):
        assert count_models(spec, n).count == count_models(sim, n).count


def test_simulate_nullary_on_projected_witness():
    stage8 = eliminate_higher_arity(build_phi_m()).output
    sim = simulate_nullary(stage8)
    assert sim.vocab.by_arity(0) == ()
    for size in (1, 2):
        assert count_models(stage8, size, budget_bits=30).count == \
            count_models(sim, size, budget_bits=30).count


# --- Memoization keeps deep towers tractable ---------------------------------------


def test_deep_quantifier_tower_transforms_quickly():
    f = Atom("E", (Var("v0"), Const(1)))
    body = f
    for i in range(14):
        body = Forall(f"w{i}", Or(body, Atom("E", (Var(f"w{i}"), Var("v0")))))
    sentence = Forall("v0", body)
    spec = _spec(Vocabulary((("E", 2),), 1), sentence)
    result = eliminate_many_one(spec)  # would be ~2^14 blowup without sharing
    assert validate_class_spec(result.output) == []
