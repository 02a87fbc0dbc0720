"""HTTP service wrapping the toolkit: counting, elimination, witnesses,
sequence analysis, and oracles as JSON endpoints. The CLI is a thin client of
this app; long counting jobs can also be hosted standalone via uvicorn.
"""
from __future__ import annotations

import time
from typing import Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import builtins as builtin_lib
from . import sequences as seq_lib
from .eliminate import (
    EliminationResult, UnsupportedNodeError, eliminate_higher_arity,
    eliminate_many_one, eliminate_one_sum,
)
from .engine import (
    BudgetExceededError, DEFAULT_BUDGET_BITS, DEFAULT_SO_TUPLE_LIMIT,
    count_models,
)
from .logic import ClassSpec
from .sexpr import ParseError, SpecValidationError, parse_class_spec, print_class_spec
from .witness import build_phi_mp, oracle_iterated_matchings, trim_pipeline

app = FastAPI(title="fincount", version="0.1.0")


def _bad_request(code: str, message: str, **extra) -> HTTPException:
    return HTTPException(status_code=400, detail={"code": code, "message": message, **extra})


def _load_spec(spec_text: Optional[str], builtin: Optional[str]) -> tuple[ClassSpec, str]:
    if (spec_text is None) == (builtin is None):
        raise _bad_request("bad_source", "provide exactly one of spec_text or builtin")
    if spec_text is not None:
        try:
            return parse_class_spec(spec_text), "spec"
        except ParseError as e:
            raise _bad_request("parse_error", e.message, line=e.line, col=e.col) from e
        except SpecValidationError as e:
            raise _bad_request("validation_error", str(e)) from e
    name, _, raw_params = builtin.partition(":")
    try:
        params = tuple(int(x) for x in raw_params.split(",")) if raw_params else ()
        return builtin_lib.builtin_class(name, params), builtin
    except ValueError as e:
        raise _bad_request("unknown_builtin", str(e)) from e


class CountRequest(BaseModel):
    spec_text: Optional[str] = None
    builtin: Optional[str] = None
    n_from: int = Field(ge=0)
    n_to: int = Field(ge=0)
    modulus: Optional[int] = Field(default=None, ge=2)
    workers: int = Field(default=1, ge=1)
    budget: int = Field(default=DEFAULT_BUDGET_BITS, ge=1, le=60)
    so_tuple_limit: int = Field(default=DEFAULT_SO_TUPLE_LIMIT, ge=1)


class CountRow(BaseModel):
    n: int
    universe: int
    count: str
    residue: Optional[int] = None


class CountResponse(BaseModel):
    label: str
    method: str = "enumeration"
    rows: list[CountRow]
    elapsed_ms: int


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/count", response_model=CountResponse)
def count(req: CountRequest) -> CountResponse:
    spec, label = _load_spec(req.spec_text, req.builtin)
    if req.n_to < req.n_from:
        raise _bad_request("bad_range", "n_to must be >= n_from")
    started = time.monotonic()
    rows = []
    for n in range(req.n_from, req.n_to + 1):
        try:
            result = count_models(
                spec, n, workers=req.workers, budget_bits=req.budget,
                so_tuple_limit=req.so_tuple_limit, label=label,
            )
            residue = result.count % req.modulus if req.modulus else None
            rows.append(CountRow(
                n=n, universe=result.universe, count=str(result.count), residue=residue,
            ))
        except BudgetExceededError as e:
            raise _bad_request("budget_exceeded", str(e), n=n) from e
    elapsed_ms = int((time.monotonic() - started) * 1000)
    return CountResponse(label=label, rows=rows, elapsed_ms=elapsed_ms)


class EliminateRequest(BaseModel):
    spec_text: str
    mode: Literal["sum", "manyOne", "higherArity"]
    verify_from: Optional[int] = Field(default=None, ge=0)
    verify_to: Optional[int] = Field(default=None, ge=0)
    verify: bool = True
    allow_noop: bool = False
    workers: int = Field(default=1, ge=1)
    budget: int = Field(default=DEFAULT_BUDGET_BITS, ge=1, le=60)


class VerificationRow(BaseModel):
    n: int
    input_count: str
    output_count: str
    equal: bool


class EliminateResponse(BaseModel):
    mode: str
    outputs: list[str]
    provenance: dict[str, str]
    verified: Optional[bool] = None
    checks: list[VerificationRow] = []
    elapsed_ms: int


def _run_elimination(spec: ClassSpec, mode: str) -> EliminationResult:
    try:
        if mode == "sum":
            return eliminate_one_sum(spec)
        if mode == "manyOne":
            return eliminate_many_one(spec)
        return eliminate_higher_arity(spec)
    except UnsupportedNodeError as e:
        raise _bad_request("unsupported", str(e)) from e
    except ValueError as e:
        raise _bad_request("bad_spec", str(e)) from e


def _default_verify_range(result: EliminationResult, budget: int) -> tuple[int, int]:
    """Largest n (capped at 3) whose input and output bit spaces fit the budget."""
    vocabs = [result.input.vocab] + [s.vocab for s in result.outputs]
    top = -1
    for n in range(0, 4):
        bits = max(
            sum((n + v.num_constants) ** ar for _, ar in v.relations) for v in vocabs
        )
        if bits <= min(budget, 24):
            top = n
    return (0, top)


@app.post("/eliminate", response_model=EliminateResponse)
def eliminate(req: EliminateRequest) -> EliminateResponse:
    started = time.monotonic()
    try:
        spec = parse_class_spec(req.spec_text)
    except ParseError as e:
        raise _bad_request("parse_error", e.message, line=e.line, col=e.col) from e
    except SpecValidationError as e:
        raise _bad_request("validation_error", str(e)) from e
    if spec.vocab.num_constants == 0 and not req.allow_noop:
        raise _bad_request("no_constants", "spec has no hard-wired constant to eliminate")
    result = _run_elimination(spec, req.mode)

    verified: Optional[bool] = None
    checks: list[VerificationRow] = []
    if req.verify:
        lo, hi = (req.verify_from, req.verify_to)
        if lo is None or hi is None:
            lo, hi = _default_verify_range(result, req.budget)
        if hi >= lo:
            verified = True
            for n in range(lo, hi + 1):
                try:
                    want = count_models(
                        result.input, n, workers=req.workers, budget_bits=req.budget
                    ).count
                    got = sum(
                        count_models(s, n, workers=req.workers, budget_bits=req.budget).count
                        for s in result.outputs
                    )
                except BudgetExceededError as e:
                    raise _bad_request("budget_exceeded", str(e), n=n) from e
                equal = want == got
                verified = verified and equal
                checks.append(VerificationRow(
                    n=n, input_count=str(want), output_count=str(got), equal=equal,
                ))
    elapsed_ms = int((time.monotonic() - started) * 1000)
    return EliminateResponse(
        mode=req.mode,
        outputs=[print_class_spec(s) for s in result.outputs],
        provenance=dict(result.provenance),
        verified=verified,
        checks=checks,
        elapsed_ms=elapsed_ms,
    )


class WitnessRequest(BaseModel):
    p: int = Field(default=2, ge=2)
    max_n: int = Field(default=8, ge=1, le=24)
    include_stages: bool = True
    workers: int = Field(default=1, ge=1)


class WitnessTableRow(BaseModel):
    universe_size: int
    count: str
    residue: int


class WitnessStage(BaseModel):
    stage: int
    spec: str


class WitnessResponse(BaseModel):
    p: int
    phi: str
    stages: list[WitnessStage]
    table: list[WitnessTableRow]
    elapsed_ms: int


@app.post("/witness", response_model=WitnessResponse)
def witness(req: WitnessRequest) -> WitnessResponse:
    started = time.monotonic()
    try:
        phi = build_phi_mp(req.p)
    except ValueError as e:
        raise _bad_request("bad_prime", str(e)) from e
    stages: list[WitnessStage] = []
    if req.include_stages:
        stage_specs = trim_pipeline(eliminate_higher_arity(phi))
        stages = [
            WitnessStage(stage=s.stage, spec=print_class_spec(s.spec))
            for s in stage_specs
        ]
    table = []
    for n in range(1, req.max_n + 1):
        value = oracle_iterated_matchings(n, req.p, workers=req.workers)
        table.append(WitnessTableRow(
            universe_size=n, count=str(value), residue=value % req.p,
        ))
    elapsed_ms = int((time.monotonic() - started) * 1000)
    return WitnessResponse(
        p=req.p, phi=print_class_spec(phi), stages=stages, table=table,
        elapsed_ms=elapsed_ms,
    )


class AnalyzeRequest(BaseModel):
    values: list[int]
    modulus: int = Field(ge=2)
    start_index: int = 0
    source: str = ""
    witness_threshold: int = Field(default=seq_lib.DEFAULT_WITNESS_THRESHOLD, ge=1)
    max_order: Optional[int] = Field(default=None, ge=1)


class RecurrenceOut(BaseModel):
    order: int
    coefficients: list[int]


class AnalyzeResponse(BaseModel):
    kind: str
    preperiod: Optional[int]
    period: Optional[int]
    witness_repeats: int
    recurrence: Optional[RecurrenceOut] = None


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    try:
        seq = seq_lib.ResidueSequence(
            tuple(v % req.modulus for v in req.values),
            req.modulus,
            start_index=req.start_index,
            source=req.source,
        )
        verdict = seq_lib.detect_ultimate_periodicity(
            seq, witness_threshold=req.witness_threshold
        )
    except ValueError as e:
        raise _bad_request("bad_sequence", str(e)) from e
    recurrence = None
    if req.max_order is not None:
        try:
            found = seq_lib.find_linear_recurrence_mod_prime(seq, req.max_order)
        except ValueError as e:
            raise _bad_request("bad_modulus", str(e)) from e
        if found is not None:
            order, coeffs = found
            recurrence = RecurrenceOut(order=order, coefficients=list(coeffs))
    return AnalyzeResponse(
        kind=verdict.kind,
        preperiod=verdict.preperiod,
        period=verdict.period,
        witness_repeats=verdict.witness_repeats,
        recurrence=recurrence,
    )


class OracleRequest(BaseModel):
    name: str
    params: list[int] = []
    n_from: int = Field(ge=0)
    n_to: int = Field(ge=0)
    modulus: Optional[int] = Field(default=None, ge=2)


class OracleRow(BaseModel):
    n: int
    count: str
    residue: Optional[int] = None


class OracleResponse(BaseModel):
    name: str
    method: str = "oracle"
    rows: list[OracleRow]


@app.post("/oracle", response_model=OracleResponse)
def oracle(req: OracleRequest) -> OracleResponse:
    if req.n_to < req.n_from:
        raise _bad_request("bad_range", "n_to must be >= n_from")
    rows = []
    for n in range(req.n_from, req.n_to + 1):
        try:
            value = builtin_lib.oracle_value(req.name, n, tuple(req.params))
        except ValueError as e:
            raise _bad_request("unknown_oracle", str(e)) from e
        rows.append(OracleRow(
            n=n, count=str(value),
            residue=value % req.modulus if req.modulus else None,
        ))
    return OracleResponse(name=req.name, rows=rows)
