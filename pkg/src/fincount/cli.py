"""Command-line client for the counting service.

All computation happens behind the HTTP API in service.py; by default the CLI
drives that app in-process (no network), while --server points it at a
running instance instead. Primary output files never embed timings, so equal
invocations produce byte-identical files; elapsed times go to a sidecar.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional

import click
import httpx

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_BUDGET = 2
EXIT_MISMATCH = 3


def _request(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)
    import asyncio

    from .service import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://fincount.local", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _post(server: Optional[str], path: str, payload: dict) -> dict:
    response = _request(server, path, payload)
    if response.status_code == 200:
        return response.json()
    detail = {}
    try:
        detail = response.json().get("detail", {})
    except Exception:
        pass
    code = detail.get("code", "error") if isinstance(detail, dict) else "error"
    message = detail.get("message", response.text) if isinstance(detail, dict) else str(detail)
    click.echo(f"error [{code}]: {message}", err=True)
    raise SystemExit(EXIT_BUDGET if code == "budget_exceeded" else EXIT_USER_ERROR)


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition("..")
        return (int(lo), int(hi)) if hi else (int(lo), int(lo))
    except ValueError:
        click.echo(f"error: bad range {text!r}, expected A..B", err=True)
        raise SystemExit(EXIT_USER_ERROR) from None


def _read_spec(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        click.echo(f"error: cannot read spec file: {e}", err=True)
        raise SystemExit(EXIT_USER_ERROR) from None


def _emit(text: str, out: Optional[str], meta: Optional[dict] = None) -> None:
    if out:
        Path(out).write_text(text)
        if meta is not None:
            Path(out + ".meta.json").write_text(json.dumps(meta, sort_keys=True) + "\n")
    else:
        click.echo(text, nl=False)
        if meta is not None:
            click.echo(f"elapsed: {meta.get('elapsed_ms', '?')} ms", err=True)


def _rows_text(rows: list[dict], columns: list[str]) -> str:
    widths = [
        max(len(col), *(len(str(r.get(col, ""))) for r in rows)) if rows else len(col)
        for col in columns
    ]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths)).rstrip()]
    for r in rows:
        lines.append(
            "  ".join(str(r.get(col, "")).ljust(w) for col, w in zip(columns, widths)).rstrip()
        )
    return "\n".join(lines) + "\n"


def _rows_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([r.get(col, "") for col in columns])
    return buf.getvalue()


def _format_rows(rows: list[dict], columns: list[str], fmt: str, label: str) -> str:
    if fmt == "json":
        return json.dumps({"label": label, "rows": rows}, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return _rows_csv(rows, columns)
    return _rows_text(rows, columns)


@click.group()
def main() -> None:
    """Count finite models, eliminate hard-wired constants, and analyze residues."""


@main.command()
@click.option("--builtin", default=None, help="Builtin class NAME or NAME:params.")
@click.option("--spec", "spec_path", default=None, type=str, help="Spec file to count.")
@click.option("--n", "n_range", required=True, help="Range A..B of n values.")
@click.option("--mod", "modulus", default=None, type=int, help="Also report counts mod M.")
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--budget", default=28, type=int, show_default=True,
              help="Search budget in bits (caps explored nodes at 2^budget).")
@click.option("--so-limit", default=16, type=int, show_default=True,
              help="Largest tuple space a second-order quantifier may range over.")
@click.option("--out", default=None, type=str, help="Write the table to this file.")
@click.option("--format", "fmt", default="text",
              type=click.Choice(["json", "csv", "text"]), show_default=True)
@click.option("--server", default=None, help="URL of a running service instance.")
def count(builtin, spec_path, n_range, modulus, workers, budget, so_limit, out, fmt, server) -> None:
    """Count models of a builtin or spec file over a range of n."""
    if (builtin is None) == (spec_path is None):
        click.echo("error: provide exactly one of --builtin or --spec", err=True)
        raise SystemExit(EXIT_USER_ERROR)
    lo, hi = _parse_range(n_range)
    payload = {
        "builtin": builtin,
        "spec_text": _read_spec(spec_path) if spec_path else None,
        "n_from": lo,
        "n_to": hi,
        "modulus": modulus,
        "workers": workers,
        "budget": budget,
        "so_tuple_limit": so_limit,
    }
    data = _post(server, "/count", payload)
    columns = ["n", "universe", "count"] + (["residue"] if modulus else [])
    rows = [{k: row[k] for k in columns} for row in data["rows"]]
    text = _format_rows(rows, columns, fmt, data["label"])
    _emit(text, out, meta={"elapsed_ms": data["elapsed_ms"]})


@main.command()
@click.option("--spec", "spec_path", required=True, type=str)
@click.option("--mode", default="manyOne", show_default=True,
              type=click.Choice(["sum", "manyOne", "higherArity"]))
@click.option("--verify", "verify_range", default=None,
              help="Range A..B of n values to verify counts over (default: auto).")
@click.option("--no-verify", is_flag=True, default=False,
              help="Skip the count-preservation self-check.")
@click.option("--allow-noop", is_flag=True, default=False,
              help="Accept specs with no constants (identity result).")
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--budget", default=28, type=int, show_default=True)
@click.option("--out", "out_dir", default=None, type=str,
              help="Directory for output specs and the manifest.")
@click.option("--server", default=None)
def eliminate(spec_path, mode, verify_range, no_verify, allow_noop, workers,
              budget, out_dir, server) -> None:
    """Eliminate the highest hard-wired constant from a spec file."""
    payload = {
        "spec_text": _read_spec(spec_path),
        "mode": mode,
        "verify": not no_verify,
        "allow_noop": allow_noop,
        "workers": workers,
        "budget": budget,
    }
    if verify_range:
        lo, hi = _parse_range(verify_range)
        payload["verify_from"] = lo
        payload["verify_to"] = hi
    data = _post(server, "/eliminate", payload)

    stem = Path(spec_path).stem
    out_files = []
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(data["outputs"], start=1):
            name = f"{stem}_{mode}_{i:03d}.sexp"
            (base / name).write_text(text)
            out_files.append(name)
    manifest = {
        "mode": data["mode"],
        "input": spec_path,
        "outputs": out_files if out_dir else len(data["outputs"]),
        "provenance": data["provenance"],
        "verified": data["verified"],
        "checks": data["checks"],
    }
    manifest_text = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
    if out_dir:
        (Path(out_dir) / f"{stem}_{mode}_manifest.json").write_text(manifest_text)
        (Path(out_dir) / f"{stem}_{mode}_manifest.meta.json").write_text(
            json.dumps({"elapsed_ms": data["elapsed_ms"]}, sort_keys=True) + "\n"
        )
    else:
        click.echo(manifest_text, nl=False)
    if data["verified"] is False:
        click.echo("error: output counts do not match the input", err=True)
        raise SystemExit(EXIT_MISMATCH)
    if not data["provenance"] and data["mode"] == "manyOne":
        click.echo("note: spec has no constants; output is the input unchanged", err=True)


@main.command()
@click.option("--p", "prime", default=2, type=int, show_default=True)
@click.option("--max-n", default=8, type=int, show_default=True,
              help="Largest universe size for the oracle count table.")
@click.option("--no-stages", is_flag=True, default=False,
              help="Skip emitting the trimmed stage specs.")
@click.option("--workers", default=1, type=int, show_default=True)
@click.option("--out", "out_dir", default=None, type=str,
              help="Directory for the sentence, stage specs, and count table.")
@click.option("--server", default=None)
def witness(prime, max_n, no_stages, workers, out_dir, server) -> None:
    """Emit the ternary witness sentence, its trim stages, and oracle parities."""
    payload = {
        "p": prime,
        "max_n": max_n,
        "include_stages": not no_stages,
        "workers": workers,
    }
    data = _post(server, "/witness", payload)
    columns = ["universeSize", "count", f"countMod{prime}"]
    rows = [
        {"universeSize": r["universe_size"], "count": r["count"],
         f"countMod{prime}": r["residue"]}
        for r in data["table"]
    ]
    table = _rows_csv(rows, columns)
    if out_dir:
        base = Path(out_dir)
        base.mkdir(parents=True, exist_ok=True)
        (base / f"witness_p{prime}.sexp").write_text(data["phi"])
        for stage in data["stages"]:
            (base / f"stage_{stage['stage']}.sexp").write_text(stage["spec"])
        (base / "counts.csv").write_text(table)
        (base / "counts.csv.meta.json").write_text(
            json.dumps({"elapsed_ms": data["elapsed_ms"]}, sort_keys=True) + "\n"
        )
    else:
        click.echo(table, nl=False)


@main.command()
@click.option("--csv", "csv_path", required=True, type=str,
              help="CSV of n,residue rows to analyze.")
@click.option("--mod", "modulus", required=True, type=int)
@click.option("--max-order", default=None, type=int,
              help="Also search for a linear recurrence up to this order (prime moduli).")
@click.option("--witness-threshold", default=2, type=int, show_default=True)
@click.option("--out", default=None, type=str)
@click.option("--server", default=None)
def analyze(csv_path, modulus, max_order, witness_threshold, out, server) -> None:
    """Detect ultimate periodicity (and optionally a recurrence) in a residue CSV."""
    try:
        raw = Path(csv_path).read_text()
    except OSError as e:
        click.echo(f"error: cannot read CSV: {e}", err=True)
        raise SystemExit(EXIT_USER_ERROR) from None
    values: list[int] = []
    start_index = 0
    rows = [r for r in csv.reader(raw.splitlines()) if r]
    for i, row in enumerate(rows):
        if i == 0 and not row[-1].strip().lstrip("-").isdigit():
            continue  # header
        try:
            values.append(int(row[-1]))
            if len(values) == 1 and len(row) > 1:
                start_index = int(row[0])
        except ValueError:
            click.echo(f"error: malformed CSV row {row!r}", err=True)
            raise SystemExit(EXIT_USER_ERROR) from None
    payload = {
        "values": values,
        "modulus": modulus,
        "start_index": start_index,
        "witness_threshold": witness_threshold,
        "max_order": max_order,
    }
    data = _post(server, "/analyze", payload)
    _emit(json.dumps(data, sort_keys=True, indent=2) + "\n", out)


@main.command()
@click.argument("name")
@click.option("--p", "prime", default=None, type=int,
              help="Prime parameter for the matchings oracle.")
@click.option("--n", "n_range", required=True, help="Range A..B.")
@click.option("--mod", "modulus", default=None, type=int)
@click.option("--out", default=None, type=str)
@click.option("--format", "fmt", default="text",
              type=click.Choice(["json", "csv", "text"]), show_default=True)
@click.option("--server", default=None)
def oracle(name, prime, n_range, modulus, out, fmt, server) -> None:
    """Evaluate a named combinatorial oracle (bell, eq2, fibonacci, matchings)."""
    lo, hi = _parse_range(n_range)
    payload = {
        "name": name,
        "params": [prime] if prime is not None else [],
        "n_from": lo,
        "n_to": hi,
        "modulus": modulus,
    }
    data = _post(server, "/oracle", payload)
    columns = ["n", "count"] + (["residue"] if modulus else [])
    rows = [{k: r[k] for k in columns} for r in data["rows"]]
    _emit(_format_rows(rows, columns, fmt, data["name"]), out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
