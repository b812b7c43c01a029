"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from . import experiments as ex
from .errors import ArgumentError, CapacityError, QBMError
from .imaging import load_pgm, preprocess, save_pgm

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAPACITY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser):
    g = p.add_argument_group("experiment settings (override --config)")
    g.add_argument("--config", help="flat key = value file mirroring these flags")
    g.add_argument("--shots", type=int)
    g.add_argument("--runs", type=int)
    g.add_argument("--fidelity-1q", type=float)
    g.add_argument("--fidelity-2q", type=float)
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qblockmatch", description="Quantum block-matching experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("swap-exp", help="swap-test distance over the 17-pair set")
    _common(p)
    p.add_argument("--noisy", action="store_true", default=None,
                   help="depolarizing noise from --fidelity-1q/--fidelity-2q")

    p = sub.add_parser("qft-sweep", help="QFT subtraction success versus CNOT fidelity")
    _common(p)
    p.add_argument("--fidelities", help="comma-separated CNOT fidelities")
    p.add_argument("--bits", type=int)

    p = sub.add_parser("block-match", help="preprocess two PGMs and search a block")
    _common(p)
    p.add_argument("reference")
    p.add_argument("target")
    p.add_argument("--method", choices=["full", "hier"])
    p.add_argument("--distance", choices=["classical", "swap", "qft"])
    p.add_argument("--sigma", type=float)
    p.add_argument("--search-k", type=int)
    p.add_argument("--block-n", type=int)
    p.add_argument("--block-x", type=int)
    p.add_argument("--block-y", type=int)
    p.add_argument("--factor", type=int)
    p.add_argument("--smooth", action="store_true", default=None)
    p.add_argument("--noisy", action="store_true", default=None)
    p.add_argument("--timing", action="store_true", default=None,
                   help="fill the wall_time column (output is then not byte-stable)")

    p = sub.add_parser("gate-report", help="resource counts after decomposition")
    _common(p)
    p.add_argument("circuit", help="swap or qft_subtract")
    p.add_argument("--dim", type=int, help="vector dimension M for swap")
    p.add_argument("--bits", type=int)

    p = sub.add_parser("preprocess", help="noise, downsample and 4-bit reduction of a PGM")
    _common(p)
    p.add_argument("input")
    p.add_argument("--sigma", type=float)
    p.add_argument("--factor", type=int)
    p.add_argument("--smooth", action="store_true", default=None)
    p.add_argument("--ascii", action="store_true", help="write P2 instead of P5")
    return parser


_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes equal underscores."""
    types = {f.name: f.type for f in fields(ex.ExperimentConfig)}
    defaults = ex.ExperimentConfig()
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("-", "_")
            if key not in types:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            current = getattr(defaults, key)
            try:
                if isinstance(current, bool):
                    values[key] = _BOOL[value.lower()]
                elif isinstance(current, int) or key in ("block_x", "block_y"):
                    values[key] = int(value)
                elif isinstance(current, float):
                    values[key] = float(value)
                else:
                    values[key] = value
            except (KeyError, ValueError):
                raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return values


def make_config(args: argparse.Namespace, mode: str) -> ex.ExperimentConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    names = ex.ExperimentConfig.field_names()
    for name in names:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    values["mode"] = mode
    try:
        return ex.ExperimentConfig(**values)
    except ArgumentError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out):
    if out:
        ex.write_csv(text, out)
    else:
        sys.stdout.write(text)


def _run(args) -> None:
    cmd = args.command
    if cmd == "swap-exp":
        cfg = make_config(args, "swap_noiseless")
        if cfg.noisy:
            cfg = cfg.updated(mode="swap_noisy")
        _emit(ex.format_csv(cmd, ex.SWAP_COLUMNS, ex.run_swap_experiment(cfg)), cfg.out)
    elif cmd == "qft-sweep":
        cfg = make_config(args, "qft_sweep")
        fids = ex.SWEEP_FIDELITIES
        if args.fidelities:
            try:
                fids = tuple(float(f) for f in args.fidelities.split(","))
            except ValueError:
                raise UsageError(f"bad --fidelities {args.fidelities!r}") from None
        _emit(ex.format_csv(cmd, ex.SWEEP_COLUMNS, ex.run_qft_sweep(cfg, fids)), cfg.out)
    elif cmd == "block-match":
        cfg = make_config(args, "block_match")
        rows = ex.run_block_match(cfg, args.reference, args.target)
        _emit(ex.format_csv(cmd, ex.MATCH_COLUMNS, rows), cfg.out)
    elif cmd == "gate-report":
        cfg = make_config(args, "swap_noiseless")
        if args.circuit not in ("swap", "qft_subtract"):
            raise UsageError(f"unknown circuit {args.circuit!r}; expected swap or qft_subtract")
        rows = ex.gate_report_rows(args.circuit, cfg.dim, cfg.bits)
        r = rows[0]
        print(f"{r['circuit']}: {r['total_qubits']} qubits, {r['cnot_count']} CNOTs, "
              f"{r['single_qubit_count']} single-qubit gates, depth {r['depth']}")
        _emit(ex.format_csv(cmd, ex.GATE_COLUMNS, rows), cfg.out)
    elif cmd == "preprocess":
        cfg = make_config(args, "block_match")
        if not cfg.out:
            raise UsageError("preprocess needs --out")
        image = preprocess(load_pgm(args.input), cfg.sigma, cfg.seed, cfg.factor, cfg.smooth)
        save_pgm(image, cfg.out, binary=not args.ascii)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (QBMError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
