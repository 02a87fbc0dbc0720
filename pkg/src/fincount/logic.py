"""Vocabularies and the sentence tree: terms, formula nodes, validation, hygiene."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Union


@dataclass(frozen=True)
class Vocabulary:
    """Named relation symbols with arities plus a count of hard-wired constants.

    Constant i (1-based, i <= num_constants) always denotes universe element
    n + i when the universe is [n + num_constants].
    """

    relations: tuple[tuple[str, int], ...]
    num_constants: int = 0

    def arity(self, name: str) -> int:
        for rel, ar in self.relations:
            if rel == name:
                return ar
        raise KeyError(name)

    def has_relation(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    def relation_names(self) -> tuple[str, ...]:
        return tuple(rel for rel, _ in self.relations)

    def by_arity(self, arity: int) -> tuple[str, ...]:
        return tuple(rel for rel, ar in self.relations if ar == arity)


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    index: int  # 1-based; eliminations always strip the highest index


Term = Union[Var, Const]


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Atom:
    rel: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Count:
    """Modular counting quantifier: the number of witnesses is == residue (mod modulus)."""

    residue: int
    modulus: int
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsRel:
    rel: str
    arity: int
    body: "Formula"


@dataclass(frozen=True)
class ForallRel:
    rel: str
    arity: int
    body: "Formula"


@dataclass(frozen=True)
class ExistsRelSub:
    """Existential quantification over subsets of the guard relation's interpretation."""

    rel: str
    guard: str
    body: "Formula"


@dataclass(frozen=True)
class ForallRelSub:
    rel: str
    guard: str
    body: "Formula"


Formula = Union[
    Top, Bottom, Atom, Eq, Not, And, Or, Implies, Iff,
    Exists, Forall, Count, ExistsRel, ForallRel, ExistsRelSub, ForallRelSub,
]

BINARY_NODES = (And, Or, Implies, Iff)
VAR_BINDERS = (Exists, Forall, Count)
REL_BINDERS = (ExistsRel, ForallRel, ExistsRelSub, ForallRelSub)


@dataclass(frozen=True)
class ClassSpec:
    """A vocabulary paired with a closed sentence; the unit counting consumes."""

    vocab: Vocabulary
    sentence: Formula


def conj(parts: Iterable[Formula]) -> Formula:
    """Right-fold a sequence into nested And; empty sequence gives Top."""
    items = list(parts)
    if not items:
        return Top()
    out = items[-1]
    for f in reversed(items[:-1]):
        out = And(f, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    items = list(parts)
    if not items:
        return Bottom()
    out = items[-1]
    for f in reversed(items[:-1]):
        out = Or(f, out)
    return out


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, BINARY_NODES):
        return (f.left, f.right)
    if isinstance(f, VAR_BINDERS) or isinstance(f, REL_BINDERS):
        return (f.body,)
    return ()


def free_variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset(t.name for t in f.args if isinstance(t, Var))
    if isinstance(f, Eq):
        return frozenset(t.name for t in (f.left, f.right) if isinstance(t, Var))
    if isinstance(f, VAR_BINDERS):
        return free_variables(f.body) - {f.var}
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_variables(c)
    return out


def free_relations(f: Formula) -> frozenset[str]:
    """Relation symbols used but not bound by a second-order quantifier in f."""
    if isinstance(f, Atom):
        return frozenset({f.rel})
    if isinstance(f, REL_BINDERS):
        inner = free_relations(f.body) - {f.rel}
        if isinstance(f, (ExistsRelSub, ForallRelSub)):
            inner |= {f.guard}
        return inner
    out: frozenset[str] = frozenset()
    for c in children(f):
        out |= free_relations(c)
    return out


def all_names(f: Formula) -> set[str]:
    """Every variable and relation name occurring anywhere in f."""
    names: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Atom):
            names.add(g.rel)
            names.update(t.name for t in g.args if isinstance(t, Var))
        elif isinstance(g, Eq):
            names.update(t.name for t in (g.left, g.right) if isinstance(t, Var))
        elif isinstance(g, VAR_BINDERS):
            names.add(g.var)
            walk(g.body)
        elif isinstance(g, REL_BINDERS):
            names.add(g.rel)
            if isinstance(g, (ExistsRelSub, ForallRelSub)):
                names.add(g.guard)
            walk(g.body)
        else:
            for c in children(g):
                walk(c)

    walk(f)
    return names


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*$")
_CONST_RE = re.compile(r"a[0-9]+$")


def is_safe_name(name: str) -> bool:
    """Names must survive a text round trip and not collide with constant tokens."""
    return bool(_NAME_RE.match(name)) and not _CONST_RE.match(name)


def fresh_name(base: str, used: set[str]) -> str:
    """Pick a name derived from base that is not in used; records the pick."""
    if base not in used and is_safe_name(base):
        used.add(base)
        return base
    k = 2
    while f"{base}_{k}" in used:
        k += 1
    name = f"{base}_{k}"
    used.add(name)
    return name


def validate_vocabulary(vocab: Vocabulary) -> list[str]:
    """Every duplicate-name, bad-name, or negative-arity violation; empty list means valid."""
    problems = []
    seen: set[str] = set()
    for name, arity in vocab.relations:
        if name in seen:
            problems.append(f"duplicate relation name {name!r}")
        seen.add(name)
        if not is_safe_name(name):
            problems.append(f"relation name {name!r} is not printable")
        if arity < 0:
            problems.append(f"relation {name!r} has negative arity {arity}")
    if vocab.num_constants < 0:
        problems.append(f"negative constant count {vocab.num_constants}")
    return problems


def validate_formula(f: Formula, vocab: Vocabulary, closed: bool = False) -> list[str]:
    """Arity agreement, constant ranges, counting-quantifier sanity, optional closedness."""
    problems: list[str] = []

    def check_term(t: Term) -> None:
        if isinstance(t, Const) and not (1 <= t.index <= vocab.num_constants):
            problems.append(
                f"constant index {t.index} out of range 1..{vocab.num_constants}"
            )

    def walk(g: Formula, rel_scope: dict[str, int]) -> None:
        if isinstance(g, Atom):
            if g.rel in rel_scope:
                expected = rel_scope[g.rel]
            elif vocab.has_relation(g.rel):
                expected = vocab.arity(g.rel)
            else:
                problems.append(f"unknown relation {g.rel!r}")
                expected = None
            if expected is not None and len(g.args) != expected:
                problems.append(
                    f"arity mismatch: {g.rel!r} expects {expected} args, got {len(g.args)}"
                )
            for t in g.args:
                check_term(t)
        elif isinstance(g, Eq):
            check_term(g.left)
            check_term(g.right)
        elif isinstance(g, Count):
            if g.modulus < 2:
                problems.append(f"counting modulus must be >= 2, got {g.modulus}")
            elif not (0 <= g.residue < g.modulus):
                problems.append(
                    f"counting residue {g.residue} not in 0..{g.modulus - 1}"
                )
            walk(g.body, rel_scope)
        elif isinstance(g, (ExistsRel, ForallRel)):
            if g.arity < 0:
                problems.append(f"quantified relation {g.rel!r} has negative arity")
            walk(g.body, {**rel_scope, g.rel: g.arity})
        elif isinstance(g, (ExistsRelSub, ForallRelSub)):
            if g.guard in rel_scope:
                guard_arity = rel_scope[g.guard]
            elif vocab.has_relation(g.guard):
                guard_arity = vocab.arity(g.guard)
            else:
                problems.append(f"unknown guard relation {g.guard!r}")
                guard_arity = 0
            walk(g.body, {**rel_scope, g.rel: guard_arity})
        else:
            for c in children(g):
                walk(c, rel_scope)

    walk(f, {})
    if closed:
        for v in sorted(free_variables(f)):
            problems.append(f"free variable {v!r} in sentence")
    return problems


def validate_class_spec(spec: ClassSpec) -> list[str]:
    return validate_vocabulary(spec.vocab) + validate_formula(
        spec.sentence, spec.vocab, closed=True
    )


def normalize_hygiene(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Rename bound symbols so each is bound exactly once and never escapes its scope.

    Equivalent under evaluation; free variables and free relations keep their names.
    Pass vocabulary relation names in avoid so generated binders cannot shadow them.
    """
    # Free occurrences keep their names, so claim them up front; binders keep
    # theirs when unclaimed and get a fresh suffix otherwise.
    claimed: set[str] = set(free_variables(f)) | set(free_relations(f)) | set(avoid)

    def claim(name: str) -> str:
        if name in claimed:
            return fresh_name(name, claimed)
        claimed.add(name)
        return name

    def walk(g: Formula, venv: dict[str, str], renv: dict[str, str]) -> Formula:
        if isinstance(g, Atom):
            args = tuple(
                Var(venv.get(t.name, t.name)) if isinstance(t, Var) else t
                for t in g.args
            )
            return Atom(renv.get(g.rel, g.rel), args)
        if isinstance(g, Eq):
            def sub(t: Term) -> Term:
                return Var(venv.get(t.name, t.name)) if isinstance(t, Var) else t
            return Eq(sub(g.left), sub(g.right))
        if isinstance(g, (Top, Bottom)):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body, venv, renv))
        if isinstance(g, BINARY_NODES):
            return type(g)(walk(g.left, venv, renv), walk(g.right, venv, renv))
        if isinstance(g, VAR_BINDERS):
            new = claim(g.var)
            body = walk(g.body, {**venv, g.var: new}, renv)
            if isinstance(g, Count):
                return Count(g.residue, g.modulus, new, body)
            return type(g)(new, body)
        if isinstance(g, (ExistsRel, ForallRel)):
            new = claim(g.rel)
            return type(g)(new, g.arity, walk(g.body, venv, {**renv, g.rel: new}))
        if isinstance(g, (ExistsRelSub, ForallRelSub)):
            new = claim(g.rel)
            guard = renv.get(g.guard, g.guard)
            return type(g)(new, guard, walk(g.body, venv, {**renv, g.rel: new}))
        raise TypeError(f"unexpected node {g!r}")

    return walk(f, {}, {})


def is_hygienic(f: Formula) -> bool:
    bound: set[str] = set()
    ok = True

    def walk(g: Formula) -> None:
        nonlocal ok
        if isinstance(g, VAR_BINDERS):
            if g.var in bound:
                ok = False
            bound.add(g.var)
        elif isinstance(g, REL_BINDERS):
            if g.rel in bound:
                ok = False
            bound.add(g.rel)
        for c in children(g):
            walk(c)

    walk(f)
    return ok


def fold_constants(f: Formula) -> Formula:
    """Collapse Top/Bottom through connectives and decide ground equalities.

    Quantifier nodes are kept even over constant bodies: dropping them would
    change truth values on the empty universe.
    """
    memo: dict[int, Formula] = {}

    def fold(g: Formula) -> Formula:
        got = memo.get(id(g))
        if got is not None:
            return got
        out = fold_inner(g)
        memo[id(g)] = out
        return out

    def fold_inner(g: Formula) -> Formula:
        if isinstance(g, Eq):
            if g.left == g.right:
                return Top()
            if isinstance(g.left, Const) and isinstance(g.right, Const):
                return Bottom()
            return g
        if isinstance(g, Not):
            b = fold(g.body)
            if isinstance(b, Top):
                return Bottom()
            if isinstance(b, Bottom):
                return Top()
            return Not(b)
        if isinstance(g, And):
            l, r = fold(g.left), fold(g.right)
            if isinstance(l, Bottom) or isinstance(r, Bottom):
                return Bottom()
            if isinstance(l, Top):
                return r
            if isinstance(r, Top):
                return l
            return And(l, r)
        if isinstance(g, Or):
            l, r = fold(g.left), fold(g.right)
            if isinstance(l, Top) or isinstance(r, Top):
                return Top()
            if isinstance(l, Bottom):
                return r
            if isinstance(r, Bottom):
                return l
            return Or(l, r)
        if isinstance(g, Implies):
            l, r = fold(g.left), fold(g.right)
            if isinstance(l, Bottom) or isinstance(r, Top):
                return Top()
            if isinstance(l, Top):
                return r
            if isinstance(r, Bottom):
                return Not(l)
            return Implies(l, r)
        if isinstance(g, Iff):
            l, r = fold(g.left), fold(g.right)
            if isinstance(l, Top):
                return r
            if isinstance(r, Top):
                return l
            if isinstance(l, Bottom):
                return Top() if isinstance(r, Bottom) else Not(r)
            if isinstance(r, Bottom):
                return Not(l)
            return Iff(l, r)
        if isinstance(g, VAR_BINDERS):
            body = fold(g.body)
            if isinstance(g, Count):
                return Count(g.residue, g.modulus, g.var, body)
            return type(g)(g.var, body)
        if isinstance(g, (ExistsRel, ForallRel)):
            return type(g)(g.rel, g.arity, fold(g.body))
        if isinstance(g, (ExistsRelSub, ForallRelSub)):
            return type(g)(g.rel, g.guard, fold(g.body))
        return g

    return fold(f)


def substitute_atoms(f: Formula, rewrite: Callable[[Atom], Formula]) -> Formula:
    """Rebuild f with every Atom replaced by rewrite(atom); preserves sharing."""
    memo: dict[int, Formula] = {}

    def walk(g: Formula) -> Formula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, Atom):
            out: Formula = rewrite(g)
        elif isinstance(g, Not):
            out = Not(walk(g.body))
        elif isinstance(g, BINARY_NODES):
            out = type(g)(walk(g.left), walk(g.right))
        elif isinstance(g, Count):
            out = Count(g.residue, g.modulus, g.var, walk(g.body))
        elif isinstance(g, (Exists, Forall)):
            out = type(g)(g.var, walk(g.body))
        elif isinstance(g, (ExistsRel, ForallRel)):
            out = type(g)(g.rel, g.arity, walk(g.body))
        elif isinstance(g, (ExistsRelSub, ForallRelSub)):
            out = type(g)(g.rel, g.guard, walk(g.body))
        else:
            out = g
        memo[id(g)] = out
        return out

    return walk(f)


def rename_variable(f: Formula, old: str, new: str) -> Formula:
    """Plain variable rename; intended for hygienic formulas where old is bound once."""
    memo: dict[int, Formula] = {}

    def sub(t: Term) -> Term:
        if isinstance(t, Var) and t.name == old:
            return Var(new)
        return t

    def walk(g: Formula) -> Formula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, Atom):
            out: Formula = Atom(g.rel, tuple(sub(t) for t in g.args))
        elif isinstance(g, Eq):
            out = Eq(sub(g.left), sub(g.right))
        elif isinstance(g, Not):
            out = Not(walk(g.body))
        elif isinstance(g, BINARY_NODES):
            out = type(g)(walk(g.left), walk(g.right))
        elif isinstance(g, Count):
            var = new if g.var == old else g.var
            out = Count(g.residue, g.modulus, var, walk(g.body))
        elif isinstance(g, (Exists, Forall)):
            var = new if g.var == old else g.var
            out = type(g)(var, walk(g.body))
        elif isinstance(g, (ExistsRel, ForallRel)):
            out = type(g)(g.rel, g.arity, walk(g.body))
        elif isinstance(g, (ExistsRelSub, ForallRelSub)):
            out = type(g)(g.rel, g.guard, walk(g.body))
        else:
            out = g
        memo[id(g)] = out
        return out

    return walk(f)


def rename_relation(f: Formula, old: str, new: str) -> Formula:
    memo: dict[int, Formula] = {}

    def walk(g: Formula) -> Formula:
        got = memo.get(id(g))
        if got is not None:
            return got
        if isinstance(g, Atom):
            out: Formula = Atom(new if g.rel == old else g.rel, g.args)
        elif isinstance(g, Not):
            out = Not(walk(g.body))
        elif isinstance(g, BINARY_NODES):
            out = type(g)(walk(g.left), walk(g.right))
        elif isinstance(g, Count):
            out = Count(g.residue, g.modulus, g.var, walk(g.body))
        elif isinstance(g, (Exists, Forall)):
            out = type(g)(g.var, walk(g.body))
        elif isinstance(g, (ExistsRel, ForallRel)):
            out = type(g)(new if g.rel == old else g.rel, g.arity, walk(g.body))
        elif isinstance(g, (ExistsRelSub, ForallRelSub)):
            rel = new if g.rel == old else g.rel
            guard = new if g.guard == old else g.guard
            out = type(g)(rel, guard, walk(g.body))
        else:
            out = g
        memo[id(g)] = out
        return out

    return walk(f)


def formula_features(f: Formula) -> frozenset[str]:
    """Syntactic logic features: which quantifier classes the formula uses.

    'count' marks modular counting, 'so1' monadic (arity <= 1) second-order
    quantification, 'so2' second-order quantification of arity >= 2, and
    'guarded' subset-guarded quantification.
    """
    feats: set[str] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, Count):
            feats.add("count")
        elif isinstance(g, (ExistsRel, ForallRel)):
            feats.add("so1" if g.arity <= 1 else "so2")
        elif isinstance(g, (ExistsRelSub, ForallRelSub)):
            feats.add("guarded")
        for c in children(g):
            walk(c)

    walk(f)
    return frozenset(feats)
