"""Residue sequences of counting functions and empirical periodicity analysis.

A counting function that satisfies a linear recurrence mod m has an ultimately
periodic residue sequence, so a long-enough prefix either exhibits a period or
stays honestly inconclusive; a finite prefix can never prove aperiodicity on
its own.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .builtins import oracle_value
from .engine import BudgetExceededError, DEFAULT_BUDGET_BITS, count_models_mod
from .logic import ClassSpec

DEFAULT_WITNESS_THRESHOLD = 2


@dataclass(frozen=True)
class ResidueSequence:
    values: tuple[int, ...]
    modulus: int
    start_index: int = 0
    source: str = ""
    truncated_at: Optional[int] = None  # first n whose count exceeded the budget

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        if any(not (0 <= v < self.modulus) for v in self.values):
            raise ValueError("residues must lie in [0, modulus)")


@dataclass(frozen=True)
class PeriodicityVerdict:
    kind: str  # periodic | aperiodicWitness | inconclusive
    preperiod: Optional[int] = None
    period: Optional[int] = None
    witness_repeats: int = 0

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "preperiod": self.preperiod,
            "period": self.period,
            "witnessRepeats": self.witness_repeats,
        }


def residue_series(
    source: Union[ClassSpec, str],
    n_range: Sequence[int],
    m: int,
    params: tuple[int, ...] = (),
    workers: int = 1,
    budget_bits: int = DEFAULT_BUDGET_BITS,
) -> ResidueSequence:
    """Exact residues of the counting function over the given n values.

    source is either a ClassSpec (counted with hard-wired constants) or the
    name of a combinatorial oracle. On a budget failure the prefix computed so
    far is returned with truncated_at marking the first unreachable n.
    """
    ns = list(n_range)
    if not ns:
        raise ValueError("empty n range")
    if ns != list(range(ns[0], ns[0] + len(ns))):
        raise ValueError("n values must be contiguous")
    values: list[int] = []
    label = source if isinstance(source, str) else "spec"
    for n in ns:
        try:
            if isinstance(source, str):
                values.append(oracle_value(source, n, params) % m)
            else:
                values.append(count_models_mod(source, n, m, workers=workers,
                                               budget_bits=budget_bits))
        except BudgetExceededError:
            return ResidueSequence(
                tuple(values), m, start_index=ns[0], source=label, truncated_at=n
            )
    return ResidueSequence(tuple(values), m, start_index=ns[0], source=label)


def detect_ultimate_periodicity(
    seq: ResidueSequence,
    witness_threshold: int = DEFAULT_WITNESS_THRESHOLD,
    required_bound: Optional[tuple[int, int]] = None,
) -> PeriodicityVerdict:
    """Smallest (period, then preperiod) consistent with the whole prefix.

    A period counts only when it is witnessed at least witness_threshold full
    times after the preperiod. With no qualifying pair the verdict is
    inconclusive, unless required_bound = (max_preperiod, max_period) was
    promised by the caller, in which case the failure is an aperiodicity
    witness.
    """
    values = seq.values
    L = len(values)
    if L < 4:
        raise ValueError("sequence too short: need at least 4 values")
    for period in range(1, L // max(witness_threshold, 1) + 1):
        mismatch = -1
        for i in range(L - period - 1, -1, -1):
            if values[i] != values[i + period]:
                mismatch = i
                break
        preperiod = mismatch + 1
        if preperiod + witness_threshold * period <= L:
            return PeriodicityVerdict(
                kind="periodic",
                preperiod=preperiod,
                period=period,
                witness_repeats=(L - preperiod) // period,
            )
    if required_bound is not None:
        max_pre, max_per = required_bound
        all_falsified = all(
            any(
                values[i] != values[i + period]
                for i in range(preperiod, L - period)
            )
            for preperiod in range(max_pre + 1)
            for period in range(1, max_per + 1)
        )
        if all_falsified:
            return PeriodicityVerdict(kind="aperiodicWitness")
    return PeriodicityVerdict(kind="inconclusive")


def _solve_mod_prime(rows: list[list[int]], rhs: list[int], p: int) -> Optional[list[int]]:
    """One solution of rows * x = rhs over GF(p), or None if inconsistent."""
    m = [row[:] + [b % p] for row, b in zip(rows, rhs)]
    n_rows = len(m)
    n_cols = len(rows[0]) if rows else 0
    pivot_cols = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][c] % p != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [(v * inv) % p for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] % p != 0:
                factor = m[i][c]
                m[i] = [(a - factor * b) % p for a, b in zip(m[i], m[r])]
        pivot_cols.append(c)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if m[i][n_cols] % p != 0:
            return None
    solution = [0] * n_cols
    for row_idx, c in enumerate(pivot_cols):
        solution[c] = m[row_idx][n_cols]
    return solution


def find_linear_recurrence_mod_prime(
    seq: ResidueSequence, max_order: int
) -> Optional[tuple[int, tuple[int, ...]]]:
    """Least-order homogeneous linear recurrence fitting the whole prefix.

    Returns (order k, coefficients c_1..c_k) with
    s(n+k) = c_1 s(n+k-1) + ... + c_k s(n) mod p, or None if no order up to
    max_order fits. The modulus must be prime; orders the prefix cannot
    witness at least twice over are not considered.
    """
    p = seq.modulus
    from .combinatorics import is_prime

    if not is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    values = seq.values
    L = len(values)
    for k in range(1, max_order + 1):
        if L < 2 * k:
            break
        rows = []
        rhs = []
        for i in range(L - k):
            rows.append([values[i + k - j] % p for j in range(1, k + 1)])
            rhs.append(values[i + k])
        coeffs = _solve_mod_prime(rows, rhs, p)
        if coeffs is None:
            continue
        if all(
            sum(c * values[i + k - j] for j, c in enumerate(coeffs, start=1)) % p
            == values[i + k] % p
            for i in range(L - k)
        ):
            return k, tuple(coeffs)
    return None


def decompose_modulus(m: int) -> list[int]:
    """Maximal prime-power divisors of m in ascending prime order, e.g. 360 -> [8, 9, 5]."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    out = []
    rest = m
    d = 2
    while d * d <= rest:
        if rest % d == 0:
            power = 1
            while rest % d == 0:
                power *= d
                rest //= d
            out.append(power)
        d += 1
    if rest > 1:
        out.append(rest)
    return out
