"""Shared helpers: an independent brute-force counter, a seeded random-formula
generator, and the elimination corpus used across tests."""
from __future__ import annotations

import random
from itertools import product

import pytest

from fincount.builtins import builtin_class
from fincount.engine import Structure, evaluate
from fincount.logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, Forall, Iff,
    Implies, Not, Or, Top, Var, Vocabulary,
)


def brute_force_count(spec: ClassSpec, n: int) -> int:
    """Slow reference counter: materialize every interpretation and evaluate.

    Deliberately bypasses the search-based counter; only the tree-walking
    evaluator is shared.
    """
    vocab = spec.vocab
    N = n + vocab.num_constants
    universe = list(range(1, N + 1))
    slots: list[tuple[str, tuple[int, ...]]] = []
    for name, arity in vocab.relations:
        for tup in product(universe, repeat=arity):
            slots.append((name, tup))
    total = 0
    for mask in range(1 << len(slots)):
        interps: dict[str, set] = {name: set() for name, _ in vocab.relations}
        for i, (name, tup) in enumerate(slots):
            if mask >> i & 1:
                interps[name].add(tup)
        structure = Structure.make(vocab, N, interps)
        if evaluate(structure, spec.sentence):
            total += 1
    return total


def all_structures(vocab: Vocabulary, universe_size: int):
    universe = list(range(1, universe_size + 1))
    slots: list[tuple[str, tuple[int, ...]]] = []
    for name, arity in vocab.relations:
        for tup in product(universe, repeat=arity):
            slots.append((name, tup))
    for mask in range(1 << len(slots)):
        interps: dict[str, set] = {name: set() for name, _ in vocab.relations}
        for i, (name, tup) in enumerate(slots):
            if mask >> i & 1:
                interps[name].add(tup)
        yield Structure.make(vocab, universe_size, interps)


def random_formula(rng: random.Random, vocab: Vocabulary, depth: int, scope: tuple[str, ...]):
    """Closed-when-scope-is-empty random formula of bounded depth."""

    def term():
        choices = []
        if scope:
            choices.append(lambda: Var(rng.choice(scope)))
        if vocab.num_constants:
            choices.append(lambda: Const(rng.randint(1, vocab.num_constants)))
        if not choices:
            choices.append(lambda: Var("x0"))  # only if caller allows free vars
        return rng.choice(choices)()

    def leaf():
        kind = rng.randrange(10)
        if kind == 0:
            return Top()
        if kind == 1:
            return Bottom()
        if kind in (2, 3) and (scope or vocab.num_constants):
            return Eq(term(), term())
        name, arity = rng.choice(vocab.relations)
        if arity > 0 and not scope and not vocab.num_constants:
            return Top()
        return Atom(name, tuple(term() for _ in range(arity)))

    if depth == 0 or (rng.random() < 0.2 and scope):
        return leaf()
    kind = rng.randrange(8)
    if kind == 0:
        return Not(random_formula(rng, vocab, depth - 1, scope))
    if kind in (1, 2):
        ctor = And if kind == 1 else Or
        return ctor(
            random_formula(rng, vocab, depth - 1, scope),
            random_formula(rng, vocab, depth - 1, scope),
        )
    if kind == 3:
        return Implies(
            random_formula(rng, vocab, depth - 1, scope),
            random_formula(rng, vocab, depth - 1, scope),
        )
    if kind == 4:
        return Iff(
            random_formula(rng, vocab, depth - 1, scope),
            random_formula(rng, vocab, depth - 1, scope),
        )
    var = f"v{len(scope)}"
    if kind == 5:
        return Exists(var, random_formula(rng, vocab, depth - 1, scope + (var,)))
    if kind == 6:
        return Forall(var, random_formula(rng, vocab, depth - 1, scope + (var,)))
    m = rng.choice((2, 3))
    return Count(rng.randrange(m), m, var,
                 random_formula(rng, vocab, depth - 1, scope + (var,)))


def elimination_corpus() -> list[tuple[str, ClassSpec]]:
    """At least 20 sentences with hard-wired constants, arity <= 2, no nullary:
    valid inputs for all three elimination modes."""
    vocab1 = Vocabulary((("U", 1), ("E", 2)), 1)
    vocab2 = Vocabulary((("U", 1), ("E", 2)), 2)
    x, y = Var("x"), Var("y")
    a1 = Const(1)

    corpus: list[tuple[str, ClassSpec]] = [
        ("restrictedBell(1)", builtin_class("restrictedBell", (1,))),
        ("restrictedBell(2)", builtin_class("restrictedBell", (2,))),
        # Modular counting with a constant in play.
        ("cmsol-even-links", ClassSpec(
            vocab1,
            Forall("x", Count(0, 2, "y", Or(Atom("E", (x, y)), Eq(y, a1)))),
        )),
        # Equality-with-constant edge cases.
        ("exists-is-constant", ClassSpec(vocab1, Exists("x", Eq(x, a1)))),
        ("all-marked-but-constant", ClassSpec(
            vocab1,
            Forall("x", Or(Eq(x, a1), Atom("U", (x,)))),
        )),
        ("constant-loop", ClassSpec(vocab1, Atom("E", (a1, a1)))),
        ("constant-mark-implies-link", ClassSpec(
            vocab1,
            Implies(Atom("U", (a1,)), Exists("x", Atom("E", (x, a1)))),
        )),
        ("false", ClassSpec(vocab1, Bottom())),
        ("two-constants-linked", ClassSpec(
            vocab2, And(Atom("E", (Const(1), Const(2))), Not(Eq(Const(1), Const(2)))),
        )),
        # Single wide-support conjunct: worst case for search pruning.
        ("weak-pruning", ClassSpec(
            vocab1,
            Exists("x", Forall("y", Implies(
                Atom("E", (Var("x"), Var("y"))), Atom("U", (Var("x"),)),
            ))),
        )),
    ]

    from fincount.engine import count_models

    rng = random.Random(20250808)
    made = 0
    while made < 13:
        vocab = vocab1 if made % 3 else vocab2
        f = random_formula(rng, vocab, depth=4, scope=())
        spec = ClassSpec(vocab, f)
        # Keep the corpus honest: most random members should be nontrivial,
        # counting strictly between zero and the whole space at n = 1.
        count = count_models(spec, 1).count
        bits = sum((1 + vocab.num_constants) ** ar for _, ar in vocab.relations)
        if made >= 4 and not (0 < count < 2 ** bits):
            continue
        corpus.append((f"random-{made}", spec))
        made += 1
    return corpus


@pytest.fixture(scope="session")
def corpus() -> list[tuple[str, ClassSpec]]:
    return elimination_corpus()
