"""``sparo`` command line: transpile, layout, compile, allocate, sweep, verify.

Exit codes: 0 success, 1 input error, 2 infeasible layout or routing.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

from . import __version__
from .allocator import allocate, quantify, sweep
from .benchmarks import resolve_circuit
from .circuit import CircuitParseError
from .errors import ErrorModelParams
from .layout import LayoutInfeasible, build_layout
from .mapping import AnnealParams
from .pipeline import CompileResult, Compiler
from .refsim import verify
from .scheduler import FactoryParams
from .transpile import PbcProgram, transpile

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2
TVD_THRESHOLD = 0.05


class InputError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SPARO_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"SPARO_SEED must be an integer, got {env!r}") from None


def load_program(path: str) -> tuple[PbcProgram, object | None]:
    """A PBC program from a ``.qc`` circuit, a bundled name or program JSON."""
    p = Path(path)
    if p.suffix == ".json":
        if not p.exists():
            raise InputError(f"no such file: {path}")
        try:
            return PbcProgram.from_json(json.loads(p.read_text(encoding="utf-8"))), None
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"{path}: malformed program JSON: {exc}") from exc
    try:
        circuit = resolve_circuit(path)
    except FileNotFoundError:
        raise InputError(f"no such file or bundled circuit: {path}") from None
    return transpile(circuit), circuit


def _write(text: str, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _error_params(args) -> ErrorModelParams:
    params = ErrorModelParams()
    if getattr(args, "params", None):
        try:
            params = ErrorModelParams.load(args.params)
        except FileNotFoundError:
            raise InputError(f"no such file: {args.params}") from None
        except (json.JSONDecodeError, TypeError) as exc:
            raise InputError(f"{args.params}: {exc}") from exc
    over = {}
    if getattr(args, "distance", None) is not None:
        over["d"] = args.distance
    if getattr(args, "perr", None) is not None:
        over["p"] = args.perr
    if over:
        params = ErrorModelParams(**{**params.to_json(), **over})
    return params


def _compiler(args, program: PbcProgram) -> Compiler:
    seed = args.map_seed if args.map_seed is not None else _seed(args)
    anneal = AnnealParams(iters=args.anneal_iters, seed=seed, lam=args.anneal_lambda)
    factory = FactoryParams(args.factory_cycles, args.factory_success, args.factory_error)
    return Compiler(program, _error_params(args), factory, anneal=anneal)


def compile_report(
    comp: Compiler, res: CompileResult, name: str, seconds: float | None
) -> dict:
    base = comp.at(1, 0)
    out = {
        "kind": "compile",
        "circuit": name,
        "layout": res.layout.summary(),
        "stats": comp.program.stats,
        "totals": res.trace.totals(),
        "rotations": res.trace.meta.get("rotations", 0),
        "magic_consumed": res.trace.magic_consumed,
        "errors": res.breakdown.to_json(baseline=base.breakdown),
        "bottleneck": quantify(res.trace, res.breakdown),
        "error_params": comp.errors.to_json(),
        "map": comp.qmap.to_json(res.layout),
        "plan_origin": res.origin,
    }
    if seconds is not None:
        out["seconds"] = round(seconds, 6)
    return out


# ------------------------------------------------------------ commands


def cmd_transpile(args) -> int:
    program, _ = load_program(args.circuit)
    _write(_dump(program.to_json()), args.out)
    return EXIT_OK


def cmd_layout(args) -> int:
    lay = build_layout(args.qubits, args.factories, args.routing_rows, args.routing_cols, args.distance)
    _write(_dump(lay.to_json()), args.emit)
    return EXIT_OK


def cmd_compile(args) -> int:
    t0 = time.perf_counter()
    program, _ = load_program(args.circuit)
    comp = _compiler(args, program)
    res = comp.at(args.factories, args.routing_rows)
    seconds = None if args.omit_timing else time.perf_counter() - t0
    report = compile_report(comp, res, program.name, seconds)
    if args.trace:
        trace = res.trace.to_json()
        trace["errors"] = res.breakdown.to_json(records=True)
        _write(_dump(trace), args.trace)
    _write(_dump(report), args.report)
    return EXIT_OK


def cmd_allocate(args) -> int:
    t0 = time.perf_counter()
    program, _ = load_program(args.circuit)
    comp = _compiler(args, program)
    minimal = comp.minimal.total_tiles
    if args.budget_tiles is not None:
        budget = args.budget_tiles
    else:
        budget = int(math.floor(args.budget_pct / 100 * minimal))
    if budget < 0:
        raise InputError("budget must be non-negative")
    state, res = allocate(comp, budget, fast=args.fast_gain)
    seconds = None if args.omit_timing else time.perf_counter() - t0
    report = compile_report(comp, res, program.name, seconds)
    report["kind"] = "allocate"
    report["allocation"] = {
        **state.to_json(),
        "minimal_tiles": minimal,
        "footprint_tiles": minimal + budget,
        "fast_gain": bool(args.fast_gain),
    }
    _write(_dump(report), args.report)
    return EXIT_OK


def cmd_sweep(args) -> int:
    program, _ = load_program(args.circuit)
    comp = _compiler(args, program)
    if args.max_extra <= 0 or args.step <= 0:
        raise InputError("--max-extra and --step must be positive")
    res = sweep(comp, args.max_extra * 100, args.step * 100, jobs=args.jobs)
    _write(res.to_csv(), args.out)
    if args.matrix:
        lines = ["# rows: extra factory %, columns: extra routing %"]
        lines.append("pct " + " ".join(f"{p:g}" for p in res.routing_pcts))
        for fp, row in zip(res.factory_pcts, res.grid):
            vals = ["nan" if v is None else repr(v) for v in row]
            lines.append(f"{fp:g} " + " ".join(vals))
        Path(args.matrix).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_verify(args) -> int:
    path = Path(args.circuit)
    try:
        circuit = resolve_circuit(args.circuit)
    except FileNotFoundError:
        raise InputError(f"no such file or bundled circuit: {path}") from None
    dist = verify(circuit, shots=args.shots, seed=_seed(args))
    ok = dist < TVD_THRESHOLD
    print(f"TVD {dist:.6f} {'PASS' if ok else 'FAIL'} (threshold {TVD_THRESHOLD})")
    return EXIT_OK if ok else EXIT_INPUT


# ------------------------------------------------------------- parser


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (fallback: $SPARO_SEED, then 0)")


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="ErrorModelParams JSON file")
    p.add_argument("--distance", type=int, default=None, help="code distance (overrides --params)")
    p.add_argument("--perr", type=float, default=None, help="physical error rate (overrides --params)")
    p.add_argument("--factory-cycles", type=int, default=11, help="cycles per magic state")
    p.add_argument("--factory-success", type=float, default=1.0)
    p.add_argument("--factory-error", type=float, default=0.0, help="magic-state infidelity")
    p.add_argument("--map-seed", type=int, default=None, help="annealing seed (default: --seed)")
    p.add_argument("--anneal-iters", type=int, default=None)
    p.add_argument("--anneal-lambda", type=float, default=1.0, help="port-distance weight")
    p.add_argument("--omit-timing", action="store_true", help="drop wall-clock fields for byte-stable output")
    _add_seed(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sparo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"sparo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transpile", help="Clifford+T circuit to PBC program JSON")
    p.add_argument("circuit")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("layout", help="emit a layout as JSON")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--factories", type=int, default=1)
    p.add_argument("--routing-rows", type=int, default=0)
    p.add_argument("--routing-cols", type=int, default=0)
    p.add_argument("--distance", type=int, default=9)
    p.add_argument("--emit", default=None)
    p.set_defaults(func=cmd_layout)

    p = sub.add_parser("compile", help="map, route, schedule and estimate p_L")
    p.add_argument("circuit")
    p.add_argument("--factories", type=int, default=1)
    p.add_argument("--routing-rows", type=int, default=0)
    p.add_argument("--trace", default=None, help="write the schedule trace JSON here")
    p.add_argument("--report", default=None, help="report destination (default stdout)")
    _add_model(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("allocate", help="greedy factory/routing allocation for a tile budget")
    p.add_argument("circuit")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--budget-tiles", type=int)
    g.add_argument("--budget-pct", type=float, help="budget as a percentage of the minimal layout")
    p.add_argument("--fast-gain", action="store_true", help="estimate gains instead of recompiling")
    p.add_argument("--report", default=None)
    _add_model(p)
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("sweep", help="relative p_L over a factory x routing grid (CSV)")
    p.add_argument("circuit")
    p.add_argument("--max-extra", type=float, default=0.5, help="largest extra area as a fraction")
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.add_argument("--matrix", default=None, help="also write a gnuplot matrix file")
    p.add_argument("--jobs", type=int, default=1)
    _add_model(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="compare circuit and PBC sampling (TVD)")
    p.add_argument("circuit")
    p.add_argument("--shots", type=int, default=10_000)
    _add_seed(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LayoutInfeasible as exc:
        print(f"sparo: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InputError, CircuitParseError, OSError, ValueError) as exc:
        print(f"sparo: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
