"""Finite structures, formula evaluation, and exact model counting.

Counting enumerates interpretations as bitmask assignments over the tuple
space (lexicographic tuple order per relation), but walks them as a
backtracking search: first-order conjuncts of the sentence are grounded into
per-instantiation constraints that are checked as soon as their last bit is
assigned, so heavily constrained sentences prune the 2^bits space to a small
tree. Runs of bits no constraint touches are counted in one step.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from .logic import (
    And, Atom, Bottom, ClassSpec, Count, Vocabulary, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, ForallRel, ForallRelSub, Formula, Iff, Implies,
    Not, Or, REL_BINDERS, Term, Top, Var, VAR_BINDERS, children,
    free_relations, validate_class_spec,
)

DEFAULT_BUDGET_BITS = 28
DEFAULT_SO_TUPLE_LIMIT = 16
_GROUND_NODE_CAP = 4_000_000


class EvalError(Exception):
    """Unbound variable or unknown relation during evaluation."""


class BudgetExceededError(Exception):
    """The requested count is too large for brute force under the given budget."""


@dataclass(frozen=True)
class Structure:
    """Finite interpretation of a vocabulary over universe [1..universe_size].

    With k hard-wired constants, constant i denotes element universe_size - k + i.
    A nullary relation holds the empty tuple when true.
    """

    vocab: "Vocabulary"
    universe_size: int
    interps: tuple[tuple[str, frozenset[tuple[int, ...]]], ...]

    @staticmethod
    def make(vocab, universe_size: int, interps: dict) -> "Structure":
        fixed = []
        for name, _arity in vocab.relations:
            tuples = frozenset(tuple(t) for t in interps.get(name, ()))
            fixed.append((name, tuples))
        return Structure(vocab, universe_size, tuple(fixed))

    def interp(self, name: str) -> frozenset[tuple[int, ...]]:
        for rel, tuples in self.interps:
            if rel == name:
                return tuples
        raise KeyError(name)

    def universe(self) -> range:
        return range(1, self.universe_size + 1)

    def constant_value(self, index: int) -> int:
        k = self.vocab.num_constants
        if not (1 <= index <= k):
            raise EvalError(f"constant index {index} out of range 1..{k}")
        value = self.universe_size - k + index
        if value < 1:
            raise EvalError(
                f"universe of size {self.universe_size} cannot host {k} constants"
            )
        return value


def evaluate(
    structure: Structure,
    f: Formula,
    assignment: Optional[dict[str, int]] = None,
    rel_env: Optional[dict[str, frozenset[tuple[int, ...]]]] = None,
    so_tuple_limit: int = DEFAULT_SO_TUPLE_LIMIT,
) -> bool:
    """Tarskian truth of f in structure under the given assignment.

    Count(r, m, x, body) holds iff the number of witnesses for x is congruent
    to r mod m. Second-order quantifiers range over every interpretation of
    their tuple space, guarded ones over subsets of the guard's interpretation;
    both are refused when universe_size ** arity exceeds so_tuple_limit.
    """
    asg = dict(assignment) if assignment else {}
    rels = dict(rel_env) if rel_env else {}
    universe = list(structure.universe())

    def term_value(t: Term) -> int:
        if isinstance(t, Var):
            try:
                return asg[t.name]
            except KeyError:
                raise EvalError(f"unbound variable {t.name!r}") from None
        return structure.constant_value(t.index)

    def lookup(rel: str) -> frozenset[tuple[int, ...]]:
        if rel in rels:
            return rels[rel]
        try:
            return structure.interp(rel)
        except KeyError:
            raise EvalError(f"unknown relation {rel!r}") from None

    def so_space(arity: int) -> list[tuple[int, ...]]:
        size = structure.universe_size ** arity
        if size > so_tuple_limit:
            raise BudgetExceededError(
                f"second-order quantification over {size} tuples exceeds "
                f"limit {so_tuple_limit}"
            )
        return list(product(universe, repeat=arity))

    def subsets(space: Sequence[tuple[int, ...]]) -> Iterator[frozenset]:
        for mask in range(1 << len(space)):
            yield frozenset(t for i, t in enumerate(space) if mask >> i & 1)

    def ev(g: Formula) -> bool:
        if isinstance(g, Top):
            return True
        if isinstance(g, Bottom):
            return False
        if isinstance(g, Atom):
            return tuple(term_value(t) for t in g.args) in lookup(g.rel)
        if isinstance(g, Eq):
            return term_value(g.left) == term_value(g.right)
        if isinstance(g, Not):
            return not ev(g.body)
        if isinstance(g, And):
            return ev(g.left) and ev(g.right)
        if isinstance(g, Or):
            return ev(g.left) or ev(g.right)
        if isinstance(g, Implies):
            return (not ev(g.left)) or ev(g.right)
        if isinstance(g, Iff):
            return ev(g.left) == ev(g.right)
        if isinstance(g, Exists):
            old = asg.get(g.var)
            try:
                for v in universe:
                    asg[g.var] = v
                    if ev(g.body):
                        return True
                return False
            finally:
                _restore(asg, g.var, old)
        if isinstance(g, Forall):
            old = asg.get(g.var)
            try:
                for v in universe:
                    asg[g.var] = v
                    if not ev(g.body):
                        return False
                return True
            finally:
                _restore(asg, g.var, old)
        if isinstance(g, Count):
            old = asg.get(g.var)
            try:
                hits = 0
                for v in universe:
                    asg[g.var] = v
                    if ev(g.body):
                        hits += 1
                return hits % g.modulus == g.residue % g.modulus
            finally:
                _restore(asg, g.var, old)
        if isinstance(g, (ExistsRel, ForallRel)):
            space = so_space(g.arity)
            old = rels.get(g.rel)
            try:
                if isinstance(g, ExistsRel):
                    for s in subsets(space):
                        rels[g.rel] = s
                        if ev(g.body):
                            return True
                    return False
                for s in subsets(space):
                    rels[g.rel] = s
                    if not ev(g.body):
                        return False
                return True
            finally:
                _restore(rels, g.rel, old)
        if isinstance(g, (ExistsRelSub, ForallRelSub)):
            guard = sorted(lookup(g.guard))
            size = structure.universe_size ** len(guard[0]) if guard else 0
            if size > so_tuple_limit:
                raise BudgetExceededError(
                    f"guarded quantification over {size} tuples exceeds "
                    f"limit {so_tuple_limit}"
                )
            old = rels.get(g.rel)
            try:
                if isinstance(g, ExistsRelSub):
                    for s in subsets(guard):
                        rels[g.rel] = s
                        if ev(g.body):
                            return True
                    return False
                for s in subsets(guard):
                    rels[g.rel] = s
                    if not ev(g.body):
                        return False
                return True
            finally:
                _restore(rels, g.rel, old)
        raise TypeError(f"unexpected node {g!r}")

    return ev(f)


def _restore(mapping: dict, key, old) -> None:
    if old is None:
        mapping.pop(key, None)
    else:
        mapping[key] = old


@dataclass(frozen=True)
class CountResult:
    spec: ClassSpec
    label: str
    n: int
    universe: int
    count: int
    method: str
    elapsed_s: float

    def to_json_dict(self) -> dict:
        return {
            "class": self.label,
            "n": self.n,
            "universe": self.universe,
            "count": str(self.count),
            "method": self.method,
            "elapsedMs": int(self.elapsed_s * 1000),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


class _GroundTooBig(Exception):
    pass


class _Grounder:
    """Compiles first-order formulas over a fixed universe to bit constraints.

    Node kinds: ('c', bool), ('l', bit, negated), ('!', x), ('&', kids),
    ('|', kids), ('=', a, b), ('cnt', residue, modulus, kids).
    """

    def __init__(self, universe, bit_index, const_value, node_cap=_GROUND_NODE_CAP):
        self.universe = universe
        self.bit_index = bit_index
        self.const_value = const_value
        self.node_cap = node_cap
        self.nodes = 0
        self.memo: dict[tuple, tuple] = {}
        self._free_cache: dict[int, tuple[str, ...]] = {}

    def _free(self, f: Formula) -> tuple[str, ...]:
        got = self._free_cache.get(id(f))
        if got is None:
            if isinstance(f, Atom):
                names = frozenset(t.name for t in f.args if isinstance(t, Var))
            elif isinstance(f, Eq):
                names = frozenset(
                    t.name for t in (f.left, f.right) if isinstance(t, Var)
                )
            elif isinstance(f, VAR_BINDERS):
                names = frozenset(self._free(f.body)) - {f.var}
            else:
                names = frozenset()
                for c in children(f):
                    names |= frozenset(self._free(c))
            got = tuple(sorted(names))
            self._free_cache[id(f)] = got
        return got

    def _bump(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_cap:
            raise _GroundTooBig()

    def ground(self, f: Formula, env: dict[str, int]) -> tuple:
        key = (id(f), tuple(env[v] for v in self._free(f)))
        got = self.memo.get(key)
        if got is None:
            got = self._ground(f, env)
            self.memo[key] = got
        return got

    def _term(self, t: Term, env: dict[str, int]) -> int:
        if isinstance(t, Var):
            return env[t.name]
        return self.const_value(t.index)

    def _ground(self, f: Formula, env: dict[str, int]) -> tuple:
        self._bump()
        if isinstance(f, Top):
            return ("c", True)
        if isinstance(f, Bottom):
            return ("c", False)
        if isinstance(f, Atom):
            tup = tuple(self._term(t, env) for t in f.args)
            return ("l", self.bit_index[(f.rel, tup)], False)
        if isinstance(f, Eq):
            return ("c", self._term(f.left, env) == self._term(f.right, env))
        if isinstance(f, Not):
            g = self.ground(f.body, env)
            return _g_not(g)
        if isinstance(f, And):
            return _g_and([self.ground(f.left, env), self.ground(f.right, env)])
        if isinstance(f, Or):
            return _g_or([self.ground(f.left, env), self.ground(f.right, env)])
        if isinstance(f, Implies):
            return _g_or([_g_not(self.ground(f.left, env)), self.ground(f.right, env)])
        if isinstance(f, Iff):
            a, b = self.ground(f.left, env), self.ground(f.right, env)
            if a[0] == "c":
                return b if a[1] else _g_not(b)
            if b[0] == "c":
                return a if b[1] else _g_not(a)
            return ("=", a, b)
        if isinstance(f, Exists):
            return _g_or(self._instances(f.var, f.body, env))
        if isinstance(f, Forall):
            return _g_and(self._instances(f.var, f.body, env))
        if isinstance(f, Count):
            kids = self._instances(f.var, f.body, env)
            fixed = sum(1 for k in kids if k == ("c", True))
            rest = tuple(k for k in kids if k[0] != "c")
            residue = (f.residue - fixed) % f.modulus
            if not rest:
                return ("c", residue == 0)
            return ("cnt", residue, f.modulus, rest)
        raise TypeError(f"cannot ground {f!r}")

    def _instances(self, var: str, body: Formula, env: dict[str, int]) -> list[tuple]:
        out = []
        for v in self.universe:
            out.append(self.ground(body, {**env, var: v}))
        return out


def _g_not(g: tuple) -> tuple:
    if g[0] == "c":
        return ("c", not g[1])
    if g[0] == "l":
        return ("l", g[1], not g[2])
    if g[0] == "!":
        return g[1]
    return ("!", g)


def _g_and(kids: list[tuple]) -> tuple:
    flat = []
    for k in kids:
        if k[0] == "c":
            if not k[1]:
                return ("c", False)
        elif k[0] == "&":
            flat.extend(k[1])
        else:
            flat.append(k)
    if not flat:
        return ("c", True)
    if len(flat) == 1:
        return flat[0]
    return ("&", tuple(flat))


def _g_or(kids: list[tuple]) -> tuple:
    flat = []
    for k in kids:
        if k[0] == "c":
            if k[1]:
                return ("c", True)
        elif k[0] == "|":
            flat.extend(k[1])
        else:
            flat.append(k)
    if not flat:
        return ("c", False)
    if len(flat) == 1:
        return flat[0]
    return ("|", tuple(flat))


def _g_eval(g: tuple, assign: bytearray) -> bool:
    kind = g[0]
    if kind == "l":
        return bool(assign[g[1]]) ^ g[2]
    if kind == "c":
        return g[1]
    if kind == "&":
        for k in g[1]:
            if not _g_eval(k, assign):
                return False
        return True
    if kind == "|":
        for k in g[1]:
            if _g_eval(k, assign):
                return True
        return False
    if kind == "!":
        return not _g_eval(g[1], assign)
    if kind == "=":
        return _g_eval(g[1], assign) == _g_eval(g[2], assign)
    if kind == "cnt":
        hits = 0
        for k in g[3]:
            if _g_eval(k, assign):
                hits += 1
        return hits % g[2] == g[1]
    raise TypeError(f"unexpected ground node {g!r}")


def _g_support(g: tuple, seen: set[int], bits: set[int]) -> None:
    if id(g) in seen:
        return
    seen.add(id(g))
    kind = g[0]
    if kind == "l":
        bits.add(g[1])
    elif kind in ("&", "|"):
        for k in g[1]:
            _g_support(k, seen, bits)
    elif kind == "!":
        _g_support(g[1], seen, bits)
    elif kind == "=":
        _g_support(g[1], seen, bits)
        _g_support(g[2], seen, bits)
    elif kind == "cnt":
        for k in g[3]:
            _g_support(k, seen, bits)


def _constraint_clustered_order(
    num_bits: int, supports: list[set[int]], constrained: set[int]
) -> list[int]:
    """Bit order for the search: place each constraint's support contiguously,
    always finishing the constraint that needs the fewest further bits, so
    pruning checks fire as early as possible. Unconstrained bits go last and
    are counted in bulk rather than enumerated.
    """
    import heapq

    bit_to_constraints: dict[int, list[int]] = {}
    for i, s in enumerate(supports):
        for b in s:
            bit_to_constraints.setdefault(b, []).append(i)

    missing = [len(s) for s in supports]
    unplaced = [set(s) for s in supports]
    done = [False] * len(supports)
    heap = [(missing[i], i) for i in range(len(supports))]
    heapq.heapify(heap)
    order: list[int] = []
    placed: set[int] = set()
    while heap:
        count, i = heapq.heappop(heap)
        if done[i]:
            continue
        if count != missing[i]:
            heapq.heappush(heap, (missing[i], i))
            continue
        done[i] = True
        for b in sorted(unplaced[i]):
            order.append(b)
            placed.add(b)
            for j in bit_to_constraints[b]:
                if not done[j]:
                    unplaced[j].discard(b)
                    missing[j] -= 1
                    heapq.heappush(heap, (missing[j], j))
    for b in range(num_bits):
        if b in constrained and b not in placed:
            order.append(b)
            placed.add(b)
    order += [b for b in range(num_bits) if b not in constrained]
    return order


@dataclass
class _Problem:
    vocab: Vocabulary
    universe_size: int
    bits: list[tuple[str, tuple[int, ...]]]  # raw layout, lex tuple order per relation
    order: list[int]  # DFS order as raw bit ids; constrained bits first
    fire: list[list[tuple]]  # ground constraints checked at each DFS depth
    check_end: int  # depth at which all constraints have fired
    opaque: tuple[tuple[Formula, dict[str, int]], ...]
    unsat: bool
    so_tuple_limit: int


def _split_conjuncts(f: Formula, env: dict[str, int], universe, out: list) -> None:
    """Distribute top-level conjunctions and universals into instances."""
    if isinstance(f, Top):
        return
    if isinstance(f, And):
        _split_conjuncts(f.left, env, universe, out)
        _split_conjuncts(f.right, env, universe, out)
        return
    if isinstance(f, Forall):
        for v in universe:
            _split_conjuncts(f.body, {**env, f.var: v}, universe, out)
        return
    out.append((f, env))


def _has_rel_binder(f: Formula) -> bool:
    if isinstance(f, REL_BINDERS):
        return True
    return any(_has_rel_binder(c) for c in children(f))


def _build_problem(spec: ClassSpec, n: int, so_tuple_limit: int) -> _Problem:
    vocab = spec.vocab
    N = n + vocab.num_constants
    universe = list(range(1, N + 1))

    bits: list[tuple[str, tuple[int, ...]]] = []
    bit_index: dict[tuple[str, tuple[int, ...]], int] = {}
    for name, arity in vocab.relations:
        for tup in product(universe, repeat=arity):
            bit_index[(name, tup)] = len(bits)
            bits.append((name, tup))

    def const_value(index: int) -> int:
        return N - vocab.num_constants + index

    pieces: list[tuple[Formula, dict[str, int]]] = []
    _split_conjuncts(spec.sentence, {}, universe, pieces)

    grounder = _Grounder(universe, bit_index, const_value)
    constraints: list[tuple] = []
    opaque: list[tuple[Formula, dict[str, int]]] = []
    unsat = False
    for piece, env in pieces:
        if _has_rel_binder(piece):
            opaque.append((piece, env))
            continue
        try:
            g = grounder.ground(piece, env)
        except _GroundTooBig:
            opaque.append((piece, env))
            continue
        if g[0] == "c":
            if not g[1]:
                unsat = True
        else:
            constraints.append(g)

    constrained: set[int] = set()
    supports: list[set[int]] = []
    grounded: list[tuple] = []
    for g in constraints:
        s: set[int] = set()
        _g_support(g, set(), s)
        if not s:
            # No literals (e.g. fully folded modular count): decide it now.
            if not _g_eval(g, bytearray(0)):
                unsat = True
            continue
        grounded.append(g)
        supports.append(s)
        constrained |= s
    constraints = grounded
    opaque_rels: set[str] = set()
    for f, _env in opaque:
        opaque_rels |= set(free_relations(f)) & set(vocab.relation_names())
    for i, (name, _tup) in enumerate(bits):
        if name in opaque_rels:
            constrained.add(i)

    order = _constraint_clustered_order(len(bits), supports, constrained)
    depth_of = {raw: d for d, raw in enumerate(order)}
    check_end = len(constrained)

    fire: list[list[tuple]] = [[] for _ in range(len(bits))]
    for g, s in zip(constraints, supports):
        fire[max(depth_of[b] for b in s)].append(g)

    return _Problem(
        vocab=vocab,
        universe_size=N,
        bits=bits,
        order=order,
        fire=fire,
        check_end=check_end,
        opaque=tuple(opaque),
        unsat=unsat,
        so_tuple_limit=so_tuple_limit,
    )


def _ensure_recursion_depth(num_bits: int) -> None:
    import sys

    needed = num_bits + 200
    if sys.getrecursionlimit() < needed:
        sys.setrecursionlimit(needed)


def _structure_from_assign(problem: _Problem, assign: bytearray) -> Structure:
    interps: dict[str, set] = {name: set() for name, _ in problem.vocab.relations}
    for i, (name, tup) in enumerate(problem.bits):
        if assign[i]:
            interps[name].add(tup)
    return Structure.make(problem.vocab, problem.universe_size, interps)


def _run_dfs(
    problem: _Problem,
    prefixes: Sequence[int],
    prefix_len: int,
    node_budget: int,
    modulus: Optional[int],
) -> int:
    """Count (optionally mod modulus) over the subtrees rooted at the prefixes."""
    B = len(problem.bits)
    _ensure_recursion_depth(B)
    order = problem.order
    fire = problem.fire
    check_end = problem.check_end
    opaque = problem.opaque
    assign = bytearray(B)
    total = 0
    visits = 0

    def leaf_value(depth: int) -> int:
        if modulus is None:
            return 1 << (B - depth)
        return pow(2, B - depth, modulus)

    def passes_opaque() -> bool:
        if not opaque:
            return True
        structure = _structure_from_assign(problem, assign)
        return all(
            evaluate(structure, f, assignment=env, so_tuple_limit=problem.so_tuple_limit)
            for f, env in opaque
        )

    def dfs(d: int) -> int:
        nonlocal visits
        visits += 1
        if visits > node_budget:
            raise BudgetExceededError(
                f"enumeration visited more than {node_budget} search nodes"
            )
        if d == check_end:
            if not passes_opaque():
                return 0
            return leaf_value(d)
        raw = order[d]
        sub = 0
        for v in (0, 1):
            assign[raw] = v
            ok = True
            for c in fire[d]:
                if not _g_eval(c, assign):
                    ok = False
                    break
            if ok:
                sub += dfs(d + 1)
        assign[raw] = 0
        return sub

    if problem.unsat:
        return 0

    for prefix in prefixes:
        ok = True
        for d in range(prefix_len):
            assign[order[d]] = prefix >> d & 1
        for d in range(prefix_len):
            for c in fire[d]:
                if not _g_eval(c, assign):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            if prefix_len >= check_end:
                if passes_opaque():
                    total += leaf_value(prefix_len)
            else:
                total += dfs(prefix_len)
        for d in range(prefix_len):
            assign[order[d]] = 0
        if modulus is not None:
            total %= modulus
    return total


def _count_task(args) -> int:
    problem, prefixes, prefix_len, node_budget, modulus = args
    return _run_dfs(problem, prefixes, prefix_len, node_budget, modulus)


def _count(
    spec: ClassSpec,
    n: int,
    workers: int,
    budget_bits: int,
    so_tuple_limit: int,
    modulus: Optional[int],
) -> int:
    problems = validate_class_spec(spec)
    if problems:
        raise ValueError("invalid spec: " + "; ".join(problems))
    if n < 0:
        raise ValueError("n must be non-negative")
    problem = _build_problem(spec, n, so_tuple_limit)
    node_budget = 1 << budget_bits
    B = len(problem.bits)

    if workers <= 1 or B == 0:
        return _run_dfs(problem, [0], 0, node_budget, modulus)

    prefix_len = min(B, problem.check_end, max(1, (4 * workers - 1).bit_length()))
    all_prefixes = list(range(1 << prefix_len))
    chunks = [all_prefixes[w::workers] for w in range(workers)]
    chunks = [c for c in chunks if c]
    tasks = [(problem, c, prefix_len, node_budget, modulus) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_count_task, tasks))
    total = sum(parts)
    if modulus is not None:
        total %= modulus
    return total


def count_models(
    spec: ClassSpec,
    n: int,
    workers: int = 1,
    budget_bits: int = DEFAULT_BUDGET_BITS,
    so_tuple_limit: int = DEFAULT_SO_TUPLE_LIMIT,
    label: str = "spec",
) -> CountResult:
    """Exact number of interpretations over universe [n + num_constants]
    satisfying the sentence, with constants hard-wired to the top elements.
    """
    start = time.monotonic()
    count = _count(spec, n, workers, budget_bits, so_tuple_limit, modulus=None)
    return CountResult(
        spec=spec,
        label=label,
        n=n,
        universe=n + spec.vocab.num_constants,
        count=count,
        method="enumeration",
        elapsed_s=time.monotonic() - start,
    )


def count_models_mod(
    spec: ClassSpec,
    n: int,
    m: int,
    workers: int = 1,
    budget_bits: int = DEFAULT_BUDGET_BITS,
    so_tuple_limit: int = DEFAULT_SO_TUPLE_LIMIT,
) -> int:
    """count_models(spec, n) mod m with modular accumulation throughout."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    return _count(spec, n, workers, budget_bits, so_tuple_limit, modulus=m)


def enumerate_models(
    spec: ClassSpec,
    n: int,
    budget_bits: int = DEFAULT_BUDGET_BITS,
    so_tuple_limit: int = DEFAULT_SO_TUPLE_LIMIT,
) -> Iterator[Structure]:
    """Yield every satisfying structure; intended for small universes."""
    problems = validate_class_spec(spec)
    if problems:
        raise ValueError("invalid spec: " + "; ".join(problems))
    problem = _build_problem(spec, n, so_tuple_limit)
    if problem.unsat:
        return
    B = len(problem.bits)
    _ensure_recursion_depth(B)
    node_budget = 1 << budget_bits
    assign = bytearray(B)
    visits = 0

    def dfs(d: int) -> Iterator[Structure]:
        nonlocal visits
        visits += 1
        if visits > node_budget:
            raise BudgetExceededError(
                f"enumeration visited more than {node_budget} search nodes"
            )
        if d == B:
            structure = _structure_from_assign(problem, assign)
            if all(
                evaluate(structure, f, assignment=env, so_tuple_limit=problem.so_tuple_limit)
                for f, env in problem.opaque
            ):
                yield structure
            return
        raw = problem.order[d]
        for v in (0, 1):
            assign[raw] = v
            ok = True
            for c in problem.fire[d]:
                if not _g_eval(c, assign):
                    ok = False
                    break
            if ok:
                yield from dfs(d + 1)
        assign[raw] = 0

    yield from dfs(0)
