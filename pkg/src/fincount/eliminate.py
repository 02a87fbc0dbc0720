"""Constant-elimination transformations: formula compilers that remove the
highest-indexed hard-wired constant while preserving model counts exactly.

Three modes:
  sum         - one output spec per choice of which unary relations hold the
                removed element and which binary relations loop on it
                (2^(unaries + binaries) outputs whose counts sum to the input's)
  manyOne     - a single output spec; the choices move into fresh nullary
                relations
  higherArity - a single output spec for vocabularies of any arity; each
                relation of arity r expands into 2^r projections indexed by
                the argument positions pinned to the removed element
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

from .engine import Structure
from .logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, ForallRel, ForallRelSub, Formula, Iff, Implies,
    Not, Or, Term, Top, Var, Vocabulary, all_names, fold_constants,
    fresh_name, normalize_hygiene, rename_relation, validate_class_spec,
)

MODES = ("sum", "manyOne", "higherArity")


class UnsupportedNodeError(ValueError):
    """The formula uses a construct the selected mode cannot translate."""


@dataclass(frozen=True)
class CorrespondenceContext:
    """Branch bookkeeping for the transformation recursion.

    sent_to_removed: variables currently standing for the removed element.
    unaries_holding / binaries_looped: the sum-mode branch choice; empty in
    the other modes, where nullary relations carry that information instead.
    """

    sent_to_removed: frozenset[str] = frozenset()
    unaries_holding: frozenset[str] = frozenset()
    binaries_looped: frozenset[str] = frozenset()

    def with_var(self, name: str) -> "CorrespondenceContext":
        return CorrespondenceContext(
            self.sent_to_removed | {name}, self.unaries_holding, self.binaries_looped
        )

    def with_unary(self, name: str) -> "CorrespondenceContext":
        return CorrespondenceContext(
            self.sent_to_removed, self.unaries_holding | {name}, self.binaries_looped
        )


def _subset_order(arity: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for size in range(arity + 1):
        out.extend(combinations(range(1, arity + 1), size))
    return out


def _proj_suffix(positions: tuple[int, ...]) -> str:
    return "".join(str(p) for p in positions)


@dataclass
class _Plan:
    mode: str
    removed: int  # constant index being eliminated (the highest)
    arities: dict[str, int]
    at_name: dict[str, str] = field(default_factory=dict)  # unary -> nullary companion
    in_name: dict[str, str] = field(default_factory=dict)  # binary -> unary for (x, a)
    out_name: dict[str, str] = field(default_factory=dict)  # binary -> unary for (a, x)
    loop_name: dict[str, str] = field(default_factory=dict)  # binary -> nullary for (a, a)
    proj: dict[str, dict[tuple[int, ...], str]] = field(default_factory=dict)
    used_names: set[str] = field(default_factory=set)


@dataclass
class EliminationResult:
    mode: str
    input: ClassSpec
    outputs: tuple[ClassSpec, ...]
    provenance: dict[str, str]  # generated relation name -> role tag
    branch_labels: Optional[tuple[tuple[frozenset, frozenset], ...]] = None
    projections: Optional[dict[str, dict[tuple[int, ...], str]]] = None

    @property
    def output(self) -> ClassSpec:
        if len(self.outputs) != 1:
            raise ValueError(f"{self.mode} elimination produced {len(self.outputs)} outputs")
        return self.outputs[0]


class _Transformer:
    def __init__(self, plan: _Plan):
        self.plan = plan
        self._free: dict[int, frozenset[str]] = {}

    def free(self, f: Formula) -> frozenset[str]:
        got = self._free.get(id(f))
        if got is None:
            from .logic import free_variables

            got = free_variables(f)
            self._free[id(f)] = got
        return got

    def transform(
        self,
        f: Formula,
        ctx: CorrespondenceContext,
        scope: dict[str, tuple],
        memo: dict,
    ) -> Formula:
        key = (id(f), tuple(sorted(ctx.sent_to_removed & self.free(f))))
        got = memo.get(key)
        if got is None:
            got = self._transform(f, ctx, scope, memo)
            memo[key] = got
        return got

    def _is_removed(self, t: Term, ctx: CorrespondenceContext) -> bool:
        if isinstance(t, Var):
            return t.name in ctx.sent_to_removed
        return t.index == self.plan.removed

    def _transform(
        self,
        f: Formula,
        ctx: CorrespondenceContext,
        scope: dict[str, tuple],
        memo: dict,
    ) -> Formula:
        plan = self.plan
        if isinstance(f, (Top, Bottom)):
            return f
        if isinstance(f, Eq):
            left_a = self._is_removed(f.left, ctx)
            right_a = self._is_removed(f.right, ctx)
            if left_a and right_a:
                return Top()
            if left_a or right_a:
                # The surviving side ranges over the reduced universe (or is a
                # lower constant), so it can never equal the removed element.
                return Bottom()
            if isinstance(f.left, Const) and isinstance(f.right, Const):
                return Top() if f.left.index == f.right.index else Bottom()
            return f
        if isinstance(f, Atom):
            return self._atom(f, ctx, scope)
        if isinstance(f, Not):
            return Not(self.transform(f.body, ctx, scope, memo))
        if isinstance(f, (And, Or, Implies, Iff)):
            return type(f)(
                self.transform(f.left, ctx, scope, memo),
                self.transform(f.right, ctx, scope, memo),
            )
        if isinstance(f, (Exists, Forall)):
            in_universe = self.transform(f.body, ctx, scope, memo)
            at_removed = self.transform(f.body, ctx.with_var(f.var), scope, memo)
            if isinstance(f, Exists):
                return Or(Exists(f.var, in_universe), at_removed)
            return And(Forall(f.var, in_universe), at_removed)
        if isinstance(f, Count):
            in_universe = self.transform(f.body, ctx, scope, memo)
            at_removed = self.transform(f.body, ctx.with_var(f.var), scope, memo)
            m = f.modulus
            return Or(
                And(Count((f.residue - 1) % m, m, f.var, in_universe), at_removed),
                And(Count(f.residue % m, m, f.var, in_universe), Not(at_removed)),
            )
        if isinstance(f, (ExistsRel, ForallRel)):
            return self._rel_quantifier(f, ctx, scope)
        if isinstance(f, (ExistsRelSub, ForallRelSub)):
            return self._guarded_quantifier(f, ctx, scope)
        raise TypeError(f"unexpected node {f!r}")

    def _atom(self, f: Atom, ctx: CorrespondenceContext, scope: dict[str, tuple]) -> Formula:
        plan = self.plan
        a_positions = tuple(
            i for i, t in enumerate(f.args, start=1) if self._is_removed(t, ctx)
        )
        kept = tuple(
            t for i, t in enumerate(f.args, start=1) if i not in a_positions
        )

        entry = scope.get(f.rel)
        if plan.mode == "higherArity":
            table = entry[1] if entry else plan.proj[f.rel]
            return Atom(table[a_positions], kept)

        arity = entry[1] if entry else plan.arities[f.rel]
        if arity == 0 or not a_positions:
            return f
        if arity == 1:
            if plan.mode == "sum":
                return Top() if f.rel in ctx.unaries_holding else Bottom()
            companion = entry[2] if entry else plan.at_name[f.rel]
            return Atom(companion, ())
        if arity == 2:
            if a_positions == (1, 2):
                if plan.mode == "sum":
                    return Top() if f.rel in ctx.binaries_looped else Bottom()
                return Atom(plan.loop_name[f.rel], ())
            if a_positions == (2,):
                return Atom(plan.in_name[f.rel], kept)
            return Atom(plan.out_name[f.rel], kept)
        raise UnsupportedNodeError(
            f"relation {f.rel!r} of arity {arity} requires higherArity mode"
        )

    def _rel_quantifier(self, f, ctx: CorrespondenceContext, scope: dict[str, tuple]) -> Formula:
        plan = self.plan
        exists = isinstance(f, ExistsRel)

        if plan.mode == "higherArity":
            order = _subset_order(f.arity)
            names = {(): f.rel}
            for a_set in order[1:]:
                names[a_set] = fresh_name(
                    f"{f.rel}_{_proj_suffix(a_set)}", plan.used_names
                )
            body = self.transform(
                f.body, ctx, {**scope, f.rel: ("proj", names)}, {}
            )
            for a_set in reversed(order):
                ctor = ExistsRel if exists else ForallRel
                body = ctor(names[a_set], f.arity - len(a_set), body)
            return body

        if f.arity == 0:
            body = self.transform(
                f.body, ctx, {**scope, f.rel: ("plain", 0)}, {}
            )
            return (ExistsRel if exists else ForallRel)(f.rel, 0, body)
        if f.arity > 1:
            raise UnsupportedNodeError(
                f"quantified relation {f.rel!r} of arity {f.arity} requires "
                "higherArity mode"
            )

        if plan.mode == "manyOne":
            companion = fresh_name(f"{f.rel}_at", plan.used_names)
            body = self.transform(
                f.body, ctx, {**scope, f.rel: ("unary", 1, companion)}, {}
            )
            if exists:
                return ExistsRel(f.rel, 1, ExistsRel(companion, 0, body))
            return ForallRel(f.rel, 1, ForallRel(companion, 0, body))

        # Sum mode: one branch where the quantified relation misses the removed
        # element, one where it holds it; the second branch gets a fresh symbol.
        scope2 = {**scope, f.rel: ("unary", 1)}
        missing = self.transform(f.body, ctx, scope2, {})
        holding = self.transform(f.body, ctx.with_unary(f.rel), scope2, {})
        other = fresh_name(f.rel, plan.used_names)
        holding = rename_relation(holding, f.rel, other)
        if exists:
            return Or(ExistsRel(f.rel, 1, missing), ExistsRel(other, 1, holding))
        return And(ForallRel(f.rel, 1, missing), ForallRel(other, 1, holding))

    def _guarded_quantifier(self, f, ctx: CorrespondenceContext, scope: dict[str, tuple]) -> Formula:
        plan = self.plan
        if plan.mode != "higherArity":
            raise UnsupportedNodeError(
                "guarded second-order quantification requires higherArity mode"
            )
        guard_entry = scope.get(f.guard)
        guard_table = guard_entry[1] if guard_entry else plan.proj[f.guard]
        arity = plan.arities.get(f.guard)
        if arity is None:
            arity = len(max(guard_table, key=len))
        order = _subset_order(arity)
        names = {(): f.rel}
        for a_set in order[1:]:
            names[a_set] = fresh_name(f"{f.rel}_{_proj_suffix(a_set)}", plan.used_names)
        body = self.transform(f.body, ctx, {**scope, f.rel: ("proj", names)}, {})
        ctor = ExistsRelSub if isinstance(f, ExistsRelSub) else ForallRelSub
        for a_set in reversed(order):
            body = ctor(names[a_set], guard_table[a_set], body)
        return body


def _prepared_sentence(spec: ClassSpec, used: set[str]) -> Formula:
    return normalize_hygiene(fold_constants(spec.sentence), avoid=used)


def _check_input(spec: ClassSpec, mode: str, max_arity: Optional[int], allow_nullary: bool) -> None:
    problems = validate_class_spec(spec)
    if problems:
        raise ValueError("invalid spec: " + "; ".join(problems))
    if spec.vocab.num_constants < 1:
        raise ValueError("no constant to eliminate")
    for name, arity in spec.vocab.relations:
        if max_arity is not None and arity > max_arity:
            raise UnsupportedNodeError(
                f"relation {name!r} has arity {arity}; {mode} mode handles arity <= {max_arity}"
            )
        if arity == 0 and not allow_nullary:
            raise UnsupportedNodeError(
                f"nullary relation {name!r} is not part of the {mode} mode language"
            )


def eliminate_one_sum(spec: ClassSpec) -> EliminationResult:
    """Remove the highest constant, producing 2^(unaries + binaries) specs whose
    counts sum to the input's count at every n.
    """
    _check_input(spec, "sum", max_arity=2, allow_nullary=False)
    vocab = spec.vocab
    used = set(vocab.relation_names()) | all_names(spec.sentence)
    unaries = vocab.by_arity(1)
    binaries = vocab.by_arity(2)

    plan = _Plan(mode="sum", removed=vocab.num_constants,
                 arities={name: ar for name, ar in vocab.relations}, used_names=used)
    provenance: dict[str, str] = {}
    for rel in binaries:
        plan.in_name[rel] = fresh_name(f"{rel}_in", used)
        provenance[plan.in_name[rel]] = f"in:{rel}"
    for rel in binaries:
        plan.out_name[rel] = fresh_name(f"{rel}_out", used)
        provenance[plan.out_name[rel]] = f"out:{rel}"

    out_relations = tuple((u, 1) for u in unaries)
    out_relations += tuple((plan.in_name[r], 1) for r in binaries)
    out_relations += tuple((plan.out_name[r], 1) for r in binaries)
    out_relations += tuple((b, 2) for b in binaries)
    out_vocab = Vocabulary(out_relations, vocab.num_constants - 1)

    sentence = _prepared_sentence(spec, used)
    transformer = _Transformer(plan)
    outputs = []
    labels = []
    for u_mask in range(1 << len(unaries)):
        holding = frozenset(u for i, u in enumerate(unaries) if u_mask >> i & 1)
        for b_mask in range(1 << len(binaries)):
            looped = frozenset(b for i, b in enumerate(binaries) if b_mask >> i & 1)
            ctx = CorrespondenceContext(frozenset(), holding, looped)
            out = fold_constants(transformer.transform(sentence, ctx, {}, {}))
            outputs.append(ClassSpec(out_vocab, out))
            labels.append((holding, looped))
    return EliminationResult(
        mode="sum",
        input=spec,
        outputs=tuple(outputs),
        provenance=provenance,
        branch_labels=tuple(labels),
    )


def eliminate_many_one(spec: ClassSpec) -> EliminationResult:
    """Remove the highest constant into a single spec over an enlarged vocabulary
    with fresh nullary and unary relations; the count function is unchanged.
    """
    if spec.vocab.num_constants == 0:
        return EliminationResult(
            mode="manyOne", input=spec, outputs=(spec,), provenance={}
        )
    _check_input(spec, "manyOne", max_arity=2, allow_nullary=True)
    vocab = spec.vocab
    used = set(vocab.relation_names()) | all_names(spec.sentence)
    nullaries = vocab.by_arity(0)
    unaries = vocab.by_arity(1)
    binaries = vocab.by_arity(2)

    plan = _Plan(mode="manyOne", removed=vocab.num_constants,
                 arities={name: ar for name, ar in vocab.relations}, used_names=used)
    provenance: dict[str, str] = {}
    for rel in unaries:
        plan.at_name[rel] = fresh_name(f"{rel}_at", used)
        provenance[plan.at_name[rel]] = f"at:{rel}"
    for rel in binaries:
        plan.loop_name[rel] = fresh_name(f"{rel}_loop", used)
        provenance[plan.loop_name[rel]] = f"loop:{rel}"
    for rel in binaries:
        plan.in_name[rel] = fresh_name(f"{rel}_in", used)
        provenance[plan.in_name[rel]] = f"in:{rel}"
    for rel in binaries:
        plan.out_name[rel] = fresh_name(f"{rel}_out", used)
        provenance[plan.out_name[rel]] = f"out:{rel}"

    out_relations = tuple((z, 0) for z in nullaries)
    out_relations += tuple((plan.at_name[u], 0) for u in unaries)
    out_relations += tuple((plan.loop_name[b], 0) for b in binaries)
    out_relations += tuple((u, 1) for u in unaries)
    out_relations += tuple((plan.in_name[b], 1) for b in binaries)
    out_relations += tuple((plan.out_name[b], 1) for b in binaries)
    out_relations += tuple((b, 2) for b in binaries)
    out_vocab = Vocabulary(out_relations, vocab.num_constants - 1)

    sentence = _prepared_sentence(spec, used)
    transformer = _Transformer(plan)
    out = fold_constants(transformer.transform(sentence, CorrespondenceContext(), {}, {}))
    return EliminationResult(
        mode="manyOne",
        input=spec,
        outputs=(ClassSpec(out_vocab, out),),
        provenance=provenance,
    )


def eliminate_higher_arity(spec: ClassSpec) -> EliminationResult:
    """Remove the highest constant for vocabularies of any arity: each relation
    of arity r splits into 2^r projections, none of maximum arity is new.
    """
    _check_input(spec, "higherArity", max_arity=None, allow_nullary=True)
    vocab = spec.vocab
    used = set(vocab.relation_names()) | all_names(spec.sentence)

    plan = _Plan(mode="higherArity", removed=vocab.num_constants,
                 arities={name: ar for name, ar in vocab.relations}, used_names=used)
    provenance: dict[str, str] = {}
    out_relations: list[tuple[str, int]] = []
    for rel, arity in vocab.relations:
        table: dict[tuple[int, ...], str] = {(): rel}
        out_relations.append((rel, arity))
        for a_set in _subset_order(arity)[1:]:
            name = fresh_name(f"{rel}_{_proj_suffix(a_set)}", used)
            table[a_set] = name
            provenance[name] = f"proj:{rel}:{_proj_suffix(a_set)}"
            out_relations.append((name, arity - len(a_set)))
        plan.proj[rel] = table
    out_vocab = Vocabulary(tuple(out_relations), vocab.num_constants - 1)

    sentence = _prepared_sentence(spec, used)
    transformer = _Transformer(plan)
    out = fold_constants(transformer.transform(sentence, CorrespondenceContext(), {}, {}))
    return EliminationResult(
        mode="higherArity",
        input=spec,
        outputs=(ClassSpec(out_vocab, out),),
        provenance=provenance,
        projections=dict(plan.proj),
    )


def transform_formula(
    f: Formula,
    spec: ClassSpec,
    mode: str,
    sent_to_removed: frozenset[str] = frozenset(),
    unaries_holding: frozenset[str] = frozenset(),
    binaries_looped: frozenset[str] = frozenset(),
) -> tuple[Formula, dict[str, str]]:
    """Transform one (possibly open) formula the way the eliminators would.

    The formula must be hygienic (each symbol bound at most once); the
    eliminators normalize their sentences before calling into this machinery.
    Exposed for inspecting individual cases; returns the rewritten formula and
    the generated-name provenance map.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    vocab = spec.vocab
    if vocab.num_constants < 1:
        raise ValueError("no constant to eliminate")
    used = set(vocab.relation_names()) | all_names(f)
    plan = _Plan(mode=mode, removed=vocab.num_constants,
                 arities={name: ar for name, ar in vocab.relations}, used_names=used)
    provenance: dict[str, str] = {}
    if mode in ("sum", "manyOne"):
        for rel in vocab.by_arity(1):
            if mode == "manyOne":
                plan.at_name[rel] = fresh_name(f"{rel}_at", used)
                provenance[plan.at_name[rel]] = f"at:{rel}"
        for rel in vocab.by_arity(2):
            if mode == "manyOne":
                plan.loop_name[rel] = fresh_name(f"{rel}_loop", used)
                provenance[plan.loop_name[rel]] = f"loop:{rel}"
            plan.in_name[rel] = fresh_name(f"{rel}_in", used)
            provenance[plan.in_name[rel]] = f"in:{rel}"
            plan.out_name[rel] = fresh_name(f"{rel}_out", used)
            provenance[plan.out_name[rel]] = f"out:{rel}"
    else:
        for rel, arity in vocab.relations:
            table: dict[tuple[int, ...], str] = {(): rel}
            for a_set in _subset_order(arity)[1:]:
                name = fresh_name(f"{rel}_{_proj_suffix(a_set)}", used)
                table[a_set] = name
                provenance[name] = f"proj:{rel}:{_proj_suffix(a_set)}"
            plan.proj[rel] = table
    ctx = CorrespondenceContext(sent_to_removed, unaries_holding, binaries_looped)
    out = _Transformer(plan).transform(f, ctx, {}, {})
    return out, provenance


def simulate_nullary(spec: ClassSpec) -> ClassSpec:
    """Replace each nullary relation with a constant-valued unary relation.

    Conjoins the constancy axiom and rewrites Z() to an existence check; model
    counts agree with the input for every universe of size >= 1.
    """
    nullaries = spec.vocab.by_arity(0)
    if not nullaries:
        return spec
    used = set(spec.vocab.relation_names()) | all_names(spec.sentence)
    mapping = {z: fresh_name(f"{z}_u", used) for z in nullaries}

    out_relations = tuple(
        (mapping.get(name, name), 1 if name in mapping else arity)
        for name, arity in spec.vocab.relations
    )
    from .logic import substitute_atoms

    def rewrite(atom: Atom) -> Formula:
        if atom.rel in mapping:
            v = fresh_name("w", used)
            return Exists(v, Atom(mapping[atom.rel], (Var(v),)))
        return atom

    body = substitute_atoms(spec.sentence, rewrite)
    axioms = []
    for z in nullaries:
        vx = fresh_name("w", used)
        vy = fresh_name("w", used)
        axioms.append(
            Forall(vx, Forall(vy, Iff(
                Atom(mapping[z], (Var(vx),)), Atom(mapping[z], (Var(vy),))
            )))
        )
    sentence = body
    for ax in reversed(axioms):
        sentence = And(ax, sentence)
    return ClassSpec(Vocabulary(out_relations, spec.vocab.num_constants), sentence)


# --- Structure-level correspondence maps -----------------------------------
#
# These implement, per mode, the bijection between interpretations over
# [n + k] with the top element distinguished and interpretations of the output
# vocabulary over [n + k - 1]; project_structure and embed_structure are
# mutually inverse, and satisfaction transfers formula by formula.


def project_structure(result: EliminationResult, structure: Structure):
    """Map an input-vocabulary structure to its image under the correspondence.

    Returns (image, unaries_holding, binaries_looped) in sum mode and just the
    image structure otherwise.
    """
    in_vocab = result.input.vocab
    out_vocab = result.outputs[0].vocab
    N = structure.universe_size
    a = N
    if N < 1:
        raise ValueError("structure has no element to project away")

    interps: dict[str, set] = {name: set() for name, _ in out_vocab.relations}
    holding: set[str] = set()
    looped: set[str] = set()

    if result.mode == "higherArity":
        for rel, _arity in in_vocab.relations:
            table = result.projections[rel]
            for tup in structure.interp(rel):
                a_set = tuple(i for i, v in enumerate(tup, start=1) if v == a)
                kept = tuple(v for v in tup if v != a)
                interps[table[a_set]].add(kept)
    else:
        find = {role: name for name, role in result.provenance.items()}
        for rel, arity in in_vocab.relations:
            tuples = structure.interp(rel)
            if arity == 0:
                interps[rel] = set(tuples)
            elif arity == 1:
                interps[rel] = {t for t in tuples if t[0] != a}
                if (a,) in tuples:
                    if result.mode == "sum":
                        holding.add(rel)
                    else:
                        interps[find[f"at:{rel}"]].add(())
            else:
                interps[rel] = {t for t in tuples if a not in t}
                interps[find[f"in:{rel}"]] = {
                    (x,) for x, y in tuples if y == a and x != a
                }
                interps[find[f"out:{rel}"]] = {
                    (y,) for x, y in tuples if x == a and y != a
                }
                if (a, a) in tuples:
                    if result.mode == "sum":
                        looped.add(rel)
                    else:
                        interps[find[f"loop:{rel}"]].add(())

    image = Structure.make(out_vocab, N - 1, interps)
    if result.mode == "sum":
        return image, frozenset(holding), frozenset(looped)
    return image


def embed_structure(
    result: EliminationResult,
    image: Structure,
    unaries_holding: frozenset[str] = frozenset(),
    binaries_looped: frozenset[str] = frozenset(),
) -> Structure:
    """Inverse of project_structure: rebuild the input-vocabulary structure."""
    in_vocab = result.input.vocab
    N = image.universe_size + 1
    a = N
    interps: dict[str, set] = {name: set() for name, _ in in_vocab.relations}

    if result.mode == "higherArity":
        for rel, arity in in_vocab.relations:
            table = result.projections[rel]
            for a_set, name in table.items():
                for kept in image.interp(name):
                    tup = list(kept)
                    for pos in a_set:
                        tup.insert(pos - 1, a)
                    interps[rel].add(tuple(tup))
    else:
        find = {role: name for name, role in result.provenance.items()}
        for rel, arity in in_vocab.relations:
            if arity == 0:
                interps[rel] = set(image.interp(rel))
            elif arity == 1:
                interps[rel] = set(image.interp(rel))
                held = (
                    rel in unaries_holding
                    if result.mode == "sum"
                    else bool(image.interp(find[f"at:{rel}"]))
                )
                if held:
                    interps[rel].add((a,))
            else:
                interps[rel] = set(image.interp(rel))
                for (x,) in image.interp(find[f"in:{rel}"]):
                    interps[rel].add((x, a))
                for (y,) in image.interp(find[f"out:{rel}"]):
                    interps[rel].add((a, y))
                has_loop = (
                    rel in binaries_looped
                    if result.mode == "sum"
                    else bool(image.interp(find[f"loop:{rel}"]))
                )
                if has_loop:
                    interps[rel].add((a, a))

    return Structure.make(in_vocab, N, interps)
