"""Built-in class specs (equivalence, orders, restricted Bell, even-degree graphs)
and the named combinatorial oracles the CLI and sequence analysis can draw from.
"""
from __future__ import annotations

from typing import Callable

from . import combinatorics
from .logic import (
    And, Atom, ClassSpec, Const, Count, Eq, Forall, Implies, Not, Var,
    Vocabulary, conj,
)

_x, _y, _z = Var("x"), Var("y"), Var("z")


def _reflexive(rel: str):
    return Forall("x", Atom(rel, (_x, _x)))


def _symmetric(rel: str):
    return Forall("x", Forall("y", Implies(Atom(rel, (_x, _y)), Atom(rel, (_y, _x)))))


def _antisymmetric(rel: str):
    return Forall(
        "x",
        Forall(
            "y",
            Implies(And(Atom(rel, (_x, _y)), Atom(rel, (_y, _x))), Eq(_x, _y)),
        ),
    )


def _transitive(rel: str):
    return Forall(
        "x",
        Forall(
            "y",
            Forall(
                "z",
                Implies(
                    And(Atom(rel, (_x, _y)), Atom(rel, (_y, _z))),
                    Atom(rel, (_x, _z)),
                ),
            ),
        ),
    )


def equivalence_spec() -> ClassSpec:
    vocab = Vocabulary((("E", 2),), 0)
    return ClassSpec(vocab, conj([_reflexive("E"), _symmetric("E"), _transitive("E")]))


def partial_order_spec() -> ClassSpec:
    vocab = Vocabulary((("E", 2),), 0)
    return ClassSpec(
        vocab, conj([_reflexive("E"), _antisymmetric("E"), _transitive("E")])
    )


def quasi_order_spec() -> ClassSpec:
    vocab = Vocabulary((("E", 2),), 0)
    return ClassSpec(vocab, conj([_reflexive("E"), _transitive("E")]))


def transitive_spec() -> ClassSpec:
    vocab = Vocabulary((("E", 2),), 0)
    return ClassSpec(vocab, _transitive("E"))


def restricted_bell_spec(r: int) -> ClassSpec:
    """Equivalence relations with r hard-wired constants kept pairwise inequivalent."""
    if r < 1:
        raise ValueError("restrictedBell needs r >= 1")
    vocab = Vocabulary((("E", 2),), r)
    parts = [_reflexive("E"), _symmetric("E"), _transitive("E")]
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            parts.append(Not(Atom("E", (Const(i), Const(j)))))
    return ClassSpec(vocab, conj(parts))


def even_degree_graph_spec() -> ClassSpec:
    """Graphs (symmetric, loop-free) in which every vertex has even degree."""
    vocab = Vocabulary((("E", 2),), 0)
    graph = Forall(
        "x",
        Forall(
            "y",
            Implies(Atom("E", (_x, _y)), And(Atom("E", (_y, _x)), Not(Eq(_x, _y)))),
        ),
    )
    even = Forall("x", Count(0, 2, "y", Atom("E", (_x, _y))))
    return ClassSpec(vocab, And(graph, even))


def builtin_class(name: str, params: tuple[int, ...] = ()) -> ClassSpec:
    """Look up a named class spec; restrictedBell takes one integer parameter."""
    if name == "restrictedBell":
        if len(params) != 1:
            raise ValueError("restrictedBell takes exactly one parameter r")
        return restricted_bell_spec(params[0])
    if params:
        raise ValueError(f"builtin {name!r} takes no parameters")
    try:
        return _BUILTIN_CLASSES[name]()
    except KeyError:
        raise ValueError(f"unknown builtin class {name!r}") from None


_BUILTIN_CLASSES: dict[str, Callable[[], ClassSpec]] = {
    "equivalence": equivalence_spec,
    "partialOrder": partial_order_spec,
    "quasiOrder": quasi_order_spec,
    "transitive": transitive_spec,
    "evenDegreeGraph": even_degree_graph_spec,
}

BUILTIN_CLASS_NAMES = tuple(sorted(_BUILTIN_CLASSES)) + ("restrictedBell",)


def oracle_value(name: str, n: int, params: tuple[int, ...] = ()) -> int:
    """Named counting oracles usable wherever a spec would be counted.

    matchings takes the prime p as its parameter; eq2 counts equivalence
    relations with exactly two classes of the same size.
    """
    from .witness import oracle_iterated_matchings

    if name == "bell":
        return combinatorics.bell_number(n)
    if name == "eq2":
        return combinatorics.equal_bipartition_count(n)
    if name == "fibonacci":
        return combinatorics.fibonacci_prefix(n)[-1]
    if name == "matchings":
        p = params[0] if params else 2
        return oracle_iterated_matchings(n, p)
    raise ValueError(f"unknown oracle {name!r}")


ORACLE_NAMES = ("bell", "eq2", "fibonacci", "matchings")
