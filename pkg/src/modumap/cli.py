"""Command-line front end.

Exit codes: 0 success, 1 circuit or report parse failure, 2 configuration
failure, 3 pipeline failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .circuit import Circuit, parse_qasm
from .config import RunConfig, load_config
from .errors import ConfigError, ModumapError, PipelineError, QasmParseError
from .partition import ALGORITHMS
from .pipeline import MODES, compile_circuit, partition_stage, to_canonical_json
from .scheduler import ScheduleReport

EXIT_OK, EXIT_PARSE, EXIT_CONFIG, EXIT_PIPELINE = 0, 1, 2, 3

_SCHEDULE_FIELDS = tuple(ScheduleReport.__dataclass_fields__)


class _ReportParseError(ModumapError):
    pass


def _read_circuit(path: str) -> Circuit:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise QasmParseError(f"cannot read circuit file {path}: {exc}") from None
    return parse_qasm(text)


def _emit(payload: dict, out: Optional[str]) -> None:
    text = to_canonical_json(payload)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(report) -> str:
    lines = [f"mode: {report.mode}",
             f"partition: {report.partition}",
             f"objective J: {report.objective.total:.6g}",
             f"swaps: {sum(report.swap_counts)}",
             f"remote events: {report.n_remote}",
             f"C_total: {report.costs['C_total']:.6g}"]
    if report.schedule is not None:
        s = report.schedule
        lines.append(f"makespan: {s.makespan:.6g} over {s.num_layers} layers, {s.num_rounds} rounds")
    return "\n".join(lines)


def cmd_compile(args) -> int:
    cfg = load_config(args.config)
    circuit = _read_circuit(args.circuit)
    report = compile_circuit(circuit, cfg, args.mode)
    _emit(report.to_dict(), args.out)
    if args.summary:
        print(_summary(report), file=sys.stderr)
    return EXIT_OK


def cmd_partition(args) -> int:
    cfg = load_config(args.config)
    if args.algorithm is not None:
        if args.algorithm not in ALGORITHMS:
            raise ConfigError("partitioner.algorithm",
                              f"expected one of {list(ALGORITHMS)}, got {args.algorithm!r}")
        cfg = replace(cfg, partitioner=replace(cfg.partitioner, algorithm=args.algorithm))
    circuit = _read_circuit(args.circuit)
    _, _, pi, terms = partition_stage(circuit, cfg)
    _emit({"algorithm": cfg.partitioner.algorithm, "num_qubits": circuit.num_qubits,
           "partition": pi, "objective": terms.as_dict(), "seed": cfg.partitioner.seed,
           "parameters": cfg.to_dict()}, args.out)
    return EXIT_OK


def _schedule_from_report(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _ReportParseError(f"cannot read report {path}: {exc}") from None
    sched = data.get("schedule") if isinstance(data, dict) else None
    if not isinstance(sched, dict) or set(sched) != set(_SCHEDULE_FIELDS):
        raise _ReportParseError(f"{path} does not contain a distributed schedule")
    return sched


def cmd_schedule(args) -> int:
    if args.report:
        sched = _schedule_from_report(args.report)
    else:
        if not (args.circuit and args.config):
            raise ConfigError("", "schedule needs --report or both a circuit and a config")
        cfg = load_config(args.config)
        circuit = _read_circuit(args.circuit)
        sched = compile_circuit(circuit, cfg, "distributed").schedule.as_dict()
    _emit({name: sched[name] for name in _SCHEDULE_FIELDS}, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modumap",
                                     description="Modular quantum circuit compiler.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="run the full pipeline and write a JSON report")
    p.add_argument("circuit")
    p.add_argument("config")
    p.add_argument("--mode", choices=MODES, default="distributed")
    p.add_argument("--out")
    p.add_argument("--summary", action="store_true", help="print a short summary to stderr")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("partition", help="run weight extraction and the partitioner only")
    p.add_argument("circuit")
    p.add_argument("config")
    p.add_argument("--algorithm", help=f"one of {', '.join(ALGORITHMS)}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("schedule", help="emit only the schedule of a distributed compilation")
    p.add_argument("circuit", nargs="?")
    p.add_argument("config", nargs="?")
    p.add_argument("--report", help="read the schedule from an existing report instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_schedule)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QasmParseError, _ReportParseError) as exc:
        print(f"modumap: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConfigError as exc:
        print(f"modumap: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PipelineError as exc:
        print(f"modumap: pipeline error {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except ModumapError as exc:
        print(f"modumap: pipeline error [{args.command}] {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
