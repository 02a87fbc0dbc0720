"""Ternary-relation witness sentences, the iterated matching oracle, canonical
encodings, and the staged trimming down to a single ternary relation.

The sentences pin a ranking of vertex pairs (the set of third coordinates a
pair carries) so that satisfying structures correspond one-to-one with full
iterated p-matching sequences; their model counts are therefore nonzero only
at universe sizes that are powers of p.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .combinatorics import count_perfect_p_matchings, is_prime, perfect_p_matchings
from .eliminate import EliminationResult
from .engine import Structure
from .logic import (
    And, Atom, Bottom, ClassSpec, Const, Eq, Exists, Forall, Formula, Iff,
    Implies, Not, Or, Term, Top, Var, Vocabulary, conj, fold_constants,
    substitute_atoms, validate_class_spec,
)

MAX_WITNESS_PRIME = 5  # the block-partition sentence quantifies p + 1 variables


def build_phi_mp(p: int) -> ClassSpec:
    """The witness sentence for prime p: one ternary relation, one constant.

    Satisfying structures over universe [s] are exactly the canonical encodings
    of full iterated p-matching sequences on s vertices.
    """
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if p > MAX_WITNESS_PRIME:
        raise ValueError(f"p must be at most {MAX_WITNESS_PRIME}")

    a = Const(1)
    counter = [0]

    def fresh(base: str) -> str:
        counter[0] += 1
        return f"{base}{counter[0]}"

    def R(t1: Term, t2: Term, t3: Term) -> Formula:
        return Atom("R", (t1, t2, t3))

    def rank_eq(x1: Term, y1: Term, x2: Term, y2: Term) -> Formula:
        q = fresh("q")
        return Forall(q, Iff(R(x1, y1, Var(q)), R(x2, y2, Var(q))))

    def rank_le(x1: Term, y1: Term, x2: Term, y2: Term) -> Formula:
        q = fresh("q")
        return Forall(q, Implies(R(x1, y1, Var(q)), R(x2, y2, Var(q))))

    def rank_lt(x1: Term, y1: Term, x2: Term, y2: Term) -> Formula:
        return And(rank_le(x1, y1, x2, y2), Not(rank_eq(x1, y1, x2, y2)))

    x, y, z, w = Var("x"), Var("y"), Var("z"), Var("w")

    graph = Forall("x", Forall("y", Forall("z",
        Implies(R(x, y, z), And(Not(Eq(x, y)), R(y, x, z))))))

    comparable = Forall("x1", Forall("y1", Forall("x2", Forall("y2",
        Not(Exists("z1", Exists("z2", conj([
            R(Var("x1"), Var("y1"), Var("z1")),
            Not(R(Var("x2"), Var("y2"), Var("z1"))),
            R(Var("x2"), Var("y2"), Var("z2")),
            Not(R(Var("x1"), Var("y1"), Var("z2"))),
        ]))))))))

    full = Forall("x", Forall("y", Implies(Not(Eq(x, y)), R(x, y, a))))

    transitive = Forall("x", Forall("y", Forall("z",
        Or(rank_le(x, z, x, y), rank_le(x, z, y, z)))))

    # Every vertex joins a p-clique of edges sharing any realized rank.
    zs = [Var(f"z{i}") for i in range(1, p + 1)]
    cover_body: Formula = conj([
        rank_eq(x, y, zs[i], zs[j])
        for i in range(p) for j in range(i + 1, p)
    ])
    for i in range(p, 1, -1):
        cover_body = Exists(f"z{i}", cover_body)
    cover = Forall("x", Forall("y", Forall("z1", cover_body)))

    # No p+1 vertices may be pairwise joined at one rank.
    ws = [Var(f"z{i}") for i in range(1, p + 2)]
    clique = conj([
        rank_eq(ws[0], ws[1], ws[i], ws[j])
        for i in range(p + 1) for j in range(i + 1, p + 1)
        if (i, j) != (0, 1)
    ])
    part_body: Formula = Implies(Not(Eq(ws[0], ws[1])), Not(clique))
    for i in range(p + 1, 0, -1):
        part_body = Forall(f"z{i}", part_body)
    part = part_body

    anchor = Forall("x", Forall("y", Forall("z",
        Implies(R(x, y, z), And(
            rank_lt(z, a, x, y),
            Forall("w", Implies(rank_lt(z, w, x, y), R(x, y, w))),
        )))))

    rank = conj([graph, comparable, full])
    sentence = conj([rank, transitive, cover, part, anchor])
    return ClassSpec(Vocabulary((("R", 3),), 1), sentence)


def build_phi_m() -> ClassSpec:
    return build_phi_mp(2)


@dataclass(frozen=True)
class IteratedMatchingSequence:
    """Edge-set levels over [n]; level i perfectly groups the components left
    by levels below it into complete p-partite blocks."""

    n: int
    p: int
    levels: tuple[frozenset[frozenset[int]], ...]


def _merge(blocks: list[frozenset[int]], groups: list[tuple[int, ...]]) -> list[frozenset[int]]:
    out = []
    for group in groups:
        merged: frozenset[int] = frozenset()
        for idx in group:
            merged |= blocks[idx]
        out.append(merged)
    return out


def _cross_edges(blocks: list[frozenset[int]], group: tuple[int, ...]) -> set[frozenset[int]]:
    edges: set[frozenset[int]] = set()
    for i, j in combinations(group, 2):
        for u in blocks[i]:
            for v in blocks[j]:
                edges.add(frozenset({u, v}))
    return edges


def enumerate_full_sequences(n: int, p: int = 2) -> Iterator[IteratedMatchingSequence]:
    """Explicitly enumerate every full iterated p-matching sequence over [n]."""
    if n < 1:
        raise ValueError("n must be >= 1")

    def rec(blocks: list[frozenset[int]], levels: list[frozenset[frozenset[int]]]):
        if len(blocks) == 1:
            yield IteratedMatchingSequence(n, p, tuple(levels))
            return
        if len(blocks) % p != 0:
            return
        for grouping in perfect_p_matchings(range(len(blocks)), p):
            edges: set[frozenset[int]] = set()
            for group in grouping:
                edges |= _cross_edges(blocks, group)
            levels.append(frozenset(edges))
            yield from rec(_merge(blocks, grouping), levels)
            levels.pop()

    yield from rec([frozenset({v}) for v in range(1, n + 1)], [])


def oracle_iterated_matchings(n: int, p: int = 2, workers: int = 1) -> int:
    """Exact number of full iterated p-matching sequences over [n].

    Level by level: the components left so far must be perfectly grouped into
    blocks of p, and the grouping count at each level multiplies. Zero unless
    n is a power of p.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    total = 1
    m = n
    while m > 1:
        if m % p != 0:
            return 0
        total *= _count_groupings(m, p, workers)
        m //= p
    return total


def _count_groupings(m: int, p: int, workers: int) -> int:
    if workers <= 1 or m <= p:
        return count_perfect_p_matchings(m, p)
    # Shard on the first element's block; every branch leaves m - p points.
    from concurrent.futures import ProcessPoolExecutor

    branches = list(combinations(range(m - 1), p - 1))
    chunks = [branches[w::workers] for w in range(workers)]
    tasks = [(m - p, p, len(chunk)) for chunk in chunks if chunk]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_grouping_task, tasks))
    return sum(parts)


def _grouping_task(args) -> int:
    remaining, p, branch_count = args
    return branch_count * count_perfect_p_matchings(remaining, p)


def validate_sequence(seq: IteratedMatchingSequence) -> list[str]:
    """Check the level conditions and fullness; empty list means valid."""
    problems: list[str] = []
    blocks = [frozenset({v}) for v in range(1, seq.n + 1)]
    seen_pairs: set[frozenset[int]] = set()
    for level_no, edges in enumerate(seq.levels, start=1):
        block_of = {v: i for i, block in enumerate(blocks) for v in block}
        for edge in edges:
            u, v = sorted(edge)
            if block_of[u] == block_of[v]:
                problems.append(f"level {level_no}: edge {{{u},{v}}} stays inside a component")
        # Group blocks connected by this level's edges.
        parent = list(range(len(blocks)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for edge in edges:
            u, v = tuple(edge)
            ru, rv = find(block_of[u]), find(block_of[v])
            if ru != rv:
                parent[ru] = rv
        groups: dict[int, list[int]] = {}
        for i in range(len(blocks)):
            groups.setdefault(find(i), []).append(i)
        for members in groups.values():
            if len(members) == 1:
                problems.append(f"level {level_no}: a component is left ungrouped")
                continue
            if len(members) != seq.p:
                problems.append(
                    f"level {level_no}: {len(members)} components grouped, expected {seq.p}"
                )
            expected = set()
            for i, j in combinations(members, 2):
                for u in blocks[i]:
                    for v in blocks[j]:
                        expected.add(frozenset({u, v}))
            group_vertices = set().union(*(blocks[i] for i in members))
            actual = {e for e in edges if all(v in group_vertices for v in e)}
            if actual != expected:
                problems.append(f"level {level_no}: block is not complete p-partite")
        seen_pairs |= set(edges)
        blocks = [frozenset().union(*(blocks[i] for i in members)) for members in groups.values()]
    all_pairs = {frozenset({u, v}) for u, v in combinations(range(1, seq.n + 1), 2)}
    if seen_pairs != all_pairs:
        problems.append("sequence is not full: some vertex pair appears in no level")
    return problems


def encode_canonical(seq: IteratedMatchingSequence, with_constant: bool = True) -> Structure:
    """The unique witness-sentence model for a full sequence.

    Pair {x, y} of level i carries exactly the component of the anchor vertex
    (element n, the hard-wired constant) among the components formed by the
    lower levels; level-1 pairs carry just the anchor itself.
    """
    problems = validate_sequence(seq)
    if problems:
        raise ValueError("not a full iterated matching sequence: " + problems[0])
    anchor = seq.n
    triples: set[tuple[int, int, int]] = set()
    blocks = [frozenset({v}) for v in range(1, seq.n + 1)]
    for edges in seq.levels:
        anchor_block = next(b for b in blocks if anchor in b)
        for edge in edges:
            u, v = tuple(edge)
            for zv in anchor_block:
                triples.add((u, v, zv))
                triples.add((v, u, zv))
        # Merge for the next level.
        block_of = {w: i for i, block in enumerate(blocks) for w in block}
        parent = list(range(len(blocks)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for edge in edges:
            u, v = tuple(edge)
            ru, rv = find(block_of[u]), find(block_of[v])
            if ru != rv:
                parent[ru] = rv
        groups: dict[int, list[int]] = {}
        for i in range(len(blocks)):
            groups.setdefault(find(i), []).append(i)
        blocks = [frozenset().union(*(blocks[i] for i in members)) for members in groups.values()]
    vocab = Vocabulary((("R", 3),), 1 if with_constant else 0)
    return Structure.make(vocab, seq.n, {"R": triples})


@dataclass(frozen=True)
class TrimStage:
    stage: int
    spec: ClassSpec


def trim_pipeline(elimination: EliminationResult) -> list[TrimStage]:
    """Substitute away the seven auxiliary relations of the constant-free
    witness spec, stage by stage, ending with a single ternary relation.

    Model counts are identical at every stage for every universe size.
    """
    if elimination.mode != "higherArity" or elimination.projections is None:
        raise ValueError("trim pipeline needs a higherArity elimination result")
    in_vocab = elimination.input.vocab
    ternaries = [name for name, ar in in_vocab.relations if ar == 3]
    if len(in_vocab.relations) != 1 or len(ternaries) != 1:
        raise ValueError("trim pipeline expects a single-ternary-relation input")
    table = elimination.projections[ternaries[0]]
    n0 = table[()]
    n1, n2, n3 = table[(1,)], table[(2,)], table[(3,)]
    n12, n13, n23 = table[(1, 2)], table[(1, 3)], table[(2, 3)]
    n123 = table[(1, 2, 3)]

    spec8 = elimination.output
    stages = [TrimStage(8, spec8)]

    def restrict(spec: ClassSpec, dropped: set[str], sentence: Formula) -> ClassSpec:
        vocab = Vocabulary(
            tuple((r, ar) for r, ar in spec.vocab.relations if r not in dropped),
            spec.vocab.num_constants,
        )
        out = ClassSpec(vocab, fold_constants(sentence))
        problems = validate_class_spec(out)
        if problems:
            raise ValueError("trim stage produced an invalid spec: " + "; ".join(problems))
        return out

    # The nullary and the (1,2)-projection can never hold: the pair positions
    # of a triple never both sat on the removed anchor.
    def sub6(atom: Atom) -> Formula:
        if atom.rel in (n123, n12):
            return Bottom()
        return atom

    spec6 = restrict(spec8, {n123, n12}, substitute_atoms(spec8.sentence, sub6))
    stages.append(TrimStage(6, spec6))

    # Pairs with the anchor always ranked at least the anchor itself.
    def sub4(atom: Atom) -> Formula:
        if atom.rel in (n13, n23):
            return Top()
        return atom

    spec4 = restrict(spec6, {n13, n23}, substitute_atoms(spec6.sentence, sub4))
    stages.append(TrimStage(4, spec4))

    # The (3)-projection held exactly the non-loop pairs.
    def sub3(atom: Atom) -> Formula:
        if atom.rel == n3:
            return Not(Eq(atom.args[0], atom.args[1]))
        return atom

    spec3 = restrict(spec4, {n3}, substitute_atoms(spec4.sentence, sub3))
    stages.append(TrimStage(3, spec3))

    # The (1)- and (2)-projections always carried identical interpretations.
    def sub2(atom: Atom) -> Formula:
        if atom.rel == n2:
            return Atom(n1, atom.args)
        return atom

    spec2 = restrict(spec3, {n2}, substitute_atoms(spec3.sentence, sub2))
    stages.append(TrimStage(2, spec2))

    # Repurpose the diagonal of the ternary relation to carry the last
    # binary projection.
    def sub1(atom: Atom) -> Formula:
        if atom.rel == n0:
            t1, t2, t3 = atom.args
            return And(Not(Eq(t1, t2)), Atom(n0, (t1, t2, t3)))
        if atom.rel == n1:
            t1, t2 = atom.args
            return Atom(n0, (t1, t1, t2))
        return atom

    spec1 = restrict(spec2, {n1}, substitute_atoms(spec2.sentence, sub1))
    stages.append(TrimStage(1, spec1))
    return stages
