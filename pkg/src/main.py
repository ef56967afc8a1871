"""
Toric Principal Bundles - Command-Line Entry Point

Subcommands read JSON artifacts, run one check or construction and write
a JSON artifact to stdout (or --output):
1. fan validate / complete
2. onepar equiv / flag
3. plmap validate / candidate, psi from-plmap, chern
4. psi rays
5. moduli check / census / reconstruct
6. klyachko import / export, samples

Exit codes: 0 valid/ACCEPTED, 1 invalid/REJECTED, 2 INDETERMINATE, 3 input error.
"""

import argparse
import logging
import re
import sys
from pathlib import Path
from typing import Callable, Optional

from pydantic import ValidationError

from src.building import flags as building
from src.building.onepar import laurent_limit, parabolic_flag, product_laurent
from src.bundles import charclass, moduli, plmap
from src.errors import (
    InputFormatError,
    NonLinearChart,
    NonPrimitiveRay,
    NotAFan,
    NotStronglyConvex,
    ReconstructionInconsistent,
    ToricBundleError,
)
from src.fan import is_complete, is_simplicial, ray_vectors
from src.models import RunConfig, VerdictStatus
from src.utils import corpus
from src.utils import serialization as io
from src.utils.config import load_env, load_settings, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INDETERMINATE = 2
EXIT_INPUT = 3

VERDICT_EXIT = {
    VerdictStatus.ACCEPTED: EXIT_OK,
    VerdictStatus.REJECTED: EXIT_INVALID,
    VerdictStatus.INDETERMINATE: EXIT_INDETERMINATE,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 3), not argparse's exit 2."""

    def error(self, message):
        raise InputFormatError("arguments", "argv", message)


# =========================================
# Input helpers
# =========================================

def _load(config: RunConfig, name: str):
    path = config.inputs.get(name)
    if path is None:
        raise InputFormatError("arguments", f"--{name}", "this subcommand needs the file")
    return io.read_json(path), str(path)


def _fan(config: RunConfig):
    data, file = _load(config, "fan")
    return io.fan_from_json(data, file)


def _plmap(config: RunConfig, fan):
    data, file = _load(config, "plmap")
    return io.plmap_from_json(data, fan, file)


def _psi(config: RunConfig, fan):
    data, file = _load(config, "psi")
    return io.psi_from_json(data, fan, file)


def _candidate(config: RunConfig, fan):
    data, file = _load(config, "cand")
    return io.candidate_from_json(data, fan, file)


# =========================================
# Handlers: each returns (document, exit code)
# =========================================

def run_fan_validate(config: RunConfig):
    try:
        fan = _fan(config)
    except (NotAFan, NonPrimitiveRay, NotStronglyConvex) as e:
        print(f"[INVALID] {e}", file=sys.stderr)
        return {"valid": False, "error": str(e)}, EXIT_INVALID
    document = {
        "valid": True,
        "lattice_rank": fan.lattice_rank,
        "maximal_cones": len(fan.maximal_cones),
        "cones": len(fan.cones),
        "simplicial": all(is_simplicial(ray_vectors(fan, c)) for c in fan.maximal()),
        "complete": is_complete(fan),
    }
    return document, EXIT_OK


def run_fan_complete(config: RunConfig):
    fan = _fan(config)
    complete = is_complete(fan)
    return {"complete": complete}, EXIT_OK if complete else EXIT_INVALID


def run_onepar_equiv(config: RunConfig):
    first_data, first_file = _load(config, "first")
    second_data, second_file = _load(config, "second")
    lam1 = io.onepar_from_json(first_data, first_file)
    lam2 = io.onepar_from_json(second_data, second_file)
    if lam1.rank != lam2.rank:
        raise InputFormatError(second_file, "$.weights", f"rank {lam2.rank} differs from {lam1.rank}")
    limit = laurent_limit(product_laurent(lam1, lam2))
    document = {
        "equivalent": limit is not None,
        "limit": io.dump_matrix(limit) if limit is not None else None,
    }
    return document, EXIT_OK if limit is not None else EXIT_INVALID


def run_onepar_flag(config: RunConfig):
    data, file = _load(config, "input")
    lam = io.onepar_from_json(data, file)
    return io.weighted_flags_to_json(lam.rank, [parabolic_flag(lam)]), EXIT_OK


def run_plmap_validate(config: RunConfig):
    fan = _fan(config)
    try:
        phi = _plmap(config, fan)
    except NonLinearChart as e:
        problems = [{"kind": "LinearityViolation", "cone": list(e.cone), "detail": e.detail, "cell": None}]
        return {"valid": False, "violations": problems}, EXIT_INVALID
    violations = plmap.validate(phi, parallel=config.parallel)
    document = {
        "valid": not violations,
        "violations": [
            {"kind": v.kind, "cone": list(v.cone), "detail": v.detail, "cell": list(v.cell) if v.cell else None}
            for v in violations
        ],
    }
    return document, EXIT_INVALID if violations else EXIT_OK


def run_plmap_candidate(config: RunConfig):
    fan = _fan(config)
    return io.candidate_to_json(moduli.candidate_from_plmap(_plmap(config, fan))), EXIT_OK


def run_psi_from_plmap(config: RunConfig):
    fan = _fan(config)
    return io.psi_to_json(charclass.psi_from_plmap(_plmap(config, fan))), EXIT_OK


GENERATOR = re.compile(r"^([ep])([1-9][0-9]*)$")


def run_chern(config: RunConfig):
    fan = _fan(config)
    phi = _plmap(config, fan)
    name = config.options.get("generator", "e1")
    match = GENERATOR.match(name)
    if not match:
        raise InputFormatError("arguments", "--generator", "expected e<k> or p<k> with k >= 1")
    k = int(match.group(2))
    q = charclass.elementary_symmetric(phi.rank, k) if match.group(1) == "e" else charclass.power_sum(phi.rank, k)
    return io.class_to_json(charclass.chern_weil(phi, q), name), EXIT_OK


def run_psi_rays(config: RunConfig):
    fan = _fan(config)
    psi = _psi(config, fan)
    rays = []
    for i in range(len(fan.rays)):
        dominant = charclass.psi_ray_weights(psi, i)
        rays.append({
            "ray": i,
            "coefficients": io.dump_vector(charclass.ray_coefficients(psi, i)),
            "dominant": list(dominant.weights),
            "type": list(charclass.psi_ray_parabolic(psi, i).blocks),
        })
    return {"rank": psi.rank, "rays": rays}, EXIT_OK


def _verdict(config: RunConfig, fan, psi, cand):
    if config.options.get("all_cones"):
        return moduli.check_all_cones(fan, psi, cand, parallel=config.parallel)
    return moduli.check_membership(fan, psi, cand, parallel=config.parallel, strict=config.options.get("strict", False))


def run_moduli_check(config: RunConfig):
    fan = _fan(config)
    psi = _psi(config, fan)
    verdict = _verdict(config, fan, psi, _candidate(config, fan))
    return io.verdict_to_json(verdict, witnesses=config.witnesses), VERDICT_EXIT[verdict.status]


def run_moduli_census(config: RunConfig):
    fan = _fan(config)
    psi = _psi(config, fan)
    points = moduli.census(
        fan, psi,
        limit=config.census_limit,
        parallel=config.parallel,
        strict=config.options.get("strict", False),
    )
    return io.census_to_json(points), EXIT_OK


def run_moduli_reconstruct(config: RunConfig):
    fan = _fan(config)
    psi = _psi(config, fan)
    cand = _candidate(config, fan)
    verdict = moduli.check_membership(fan, psi, cand, parallel=config.parallel, strict=True)
    return io.plmap_to_json(moduli.reconstruct_plmap(fan, psi, cand, verdict)), EXIT_OK


def run_klyachko_import(config: RunConfig):
    data, file = _load(config, "input")
    rank, filtrations = io.klyachko_from_json(data, file)
    return io.weighted_flags_to_json(rank, [building.klyachko_convert(f) for f in filtrations]), EXIT_OK


def run_klyachko_export(config: RunConfig):
    data, file = _load(config, "input")
    rank, flags = io.weighted_flags_from_json(data, file)
    filtrations = []
    for i, wf in enumerate(flags):
        try:
            filtrations.append(building.klyachko_from_flag(wf))
        except ValueError as e:
            raise InputFormatError(file, f"$.flags[{i}].weights", str(e)) from e
    return io.klyachko_to_json(rank, filtrations), EXIT_OK


def run_samples(config: RunConfig):
    """Write the example corpus, one directory per example."""
    target = Path(config.options.get("dir") or "samples")
    files = {}
    for name, sample in corpus.samples().items():
        files[f"{name}/fan.json"] = io.fan_to_json(sample["fan"])
        files[f"{name}/plmap.json"] = io.plmap_to_json(sample["plmap"])
        files[f"{name}/psi.json"] = io.psi_to_json(sample["psi"])
        files[f"{name}/candidate.json"] = io.candidate_to_json(moduli.candidate_from_plmap(sample["plmap"]))
    non_split = corpus.non_split_psi()
    files["non_split/fan.json"] = io.fan_to_json(non_split.fan)
    files["non_split/psi.json"] = io.psi_to_json(non_split)

    for relative, document in files.items():
        path = target / relative
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(io.dumps(document, config.indent), encoding="utf-8")
    logger.info(f"[SAMPLES] wrote {len(files)} files under {target}")
    return {"directory": str(target), "written": sorted(files)}, EXIT_OK


HANDLERS: dict[str, Callable[[RunConfig], tuple]] = {
    "fan validate": run_fan_validate,
    "fan complete": run_fan_complete,
    "onepar equiv": run_onepar_equiv,
    "onepar flag": run_onepar_flag,
    "plmap validate": run_plmap_validate,
    "plmap candidate": run_plmap_candidate,
    "chern": run_chern,
    "psi rays": run_psi_rays,
    "psi from-plmap": run_psi_from_plmap,
    "moduli check": run_moduli_check,
    "moduli census": run_moduli_census,
    "moduli reconstruct": run_moduli_reconstruct,
    "klyachko import": run_klyachko_import,
    "klyachko export": run_klyachko_export,
    "samples": run_samples,
}


def run(config: RunConfig) -> int:
    """Dispatch one subcommand and write its artifact; returns the exit code."""
    document, code = HANDLERS[config.subcommand](config)
    text = io.dumps(document, config.indent)
    if config.output is not None:
        config.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


# =========================================
# Argument parsing
# =========================================

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="python -m src.main",
        description="Framed toric principal GL(r)-bundles: exact checks and constructions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m src.main samples --dir samples
  python -m src.main fan validate samples/p2/fan.json
  python -m src.main plmap validate --fan samples/p2/fan.json --plmap samples/p2/plmap.json
  python -m src.main psi rays --fan samples/non_split/fan.json --psi samples/non_split/psi.json
  python -m src.main moduli check --fan samples/p2/fan.json --psi samples/p2/psi.json --cand samples/p2/candidate.json
  python -m src.main moduli census --fan samples/p2/fan.json --psi samples/p2/psi.json
  python -m src.main --schema verdict
        """
    )
    parser.add_argument("--schema", metavar="NAME", help=f"Print a JSON schema ({', '.join(sorted(io.SCHEMAS))})")
    parser.add_argument("--output", type=Path, help="Write the artifact here instead of stdout")
    parser.add_argument("--settings", type=Path, help="Settings file (default: config/settings.yaml)")
    parser.add_argument("--log-level", help="Logging level for stderr diagnostics")
    parser.add_argument("--parallel", type=int, help="Worker threads for per-cone checks")
    parser.add_argument("--census-limit", type=int, help="Largest census to enumerate")
    parser.add_argument(
        "--witnesses",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Include bases and cocharacters in verdicts",
    )

    commands = parser.add_subparsers(dest="command")

    fan = commands.add_parser("fan", help="Fan checks").add_subparsers(dest="action", required=True)
    for action in ("validate", "complete"):
        sub = fan.add_parser(action)
        sub.add_argument("fan", type=Path, help="Fan JSON file")

    onepar = commands.add_parser("onepar", help="One-parameter subgroups").add_subparsers(dest="action", required=True)
    equiv = onepar.add_parser("equiv")
    equiv.add_argument("--first", type=Path, required=True)
    equiv.add_argument("--second", type=Path, required=True)
    onepar.add_parser("flag").add_argument("--input", type=Path, required=True)

    pl = commands.add_parser("plmap", help="Piecewise linear maps").add_subparsers(dest="action", required=True)
    for action in ("validate", "candidate"):
        sub = pl.add_parser(action)
        sub.add_argument("--fan", type=Path, required=True)
        sub.add_argument("--plmap", type=Path, required=True)

    chern = commands.add_parser("chern", help="Chern-Weil class of a generator")
    chern.add_argument("--fan", type=Path, required=True)
    chern.add_argument("--plmap", type=Path, required=True)
    chern.add_argument("--generator", default="e1", help="e<k> (elementary symmetric) or p<k> (power sum)")

    psi = commands.add_parser("psi", help="Characteristic class data").add_subparsers(dest="action", required=True)
    rays = psi.add_parser("rays")
    rays.add_argument("--fan", type=Path, required=True)
    rays.add_argument("--psi", type=Path, required=True)
    from_plmap = psi.add_parser("from-plmap")
    from_plmap.add_argument("--fan", type=Path, required=True)
    from_plmap.add_argument("--plmap", type=Path, required=True)

    mod = commands.add_parser("moduli", help="Moduli membership").add_subparsers(dest="action", required=True)
    for action in ("check", "census", "reconstruct"):
        sub = mod.add_parser(action)
        sub.add_argument("--fan", type=Path, required=True)
        sub.add_argument("--psi", type=Path, required=True)
        if action != "census":
            sub.add_argument("--cand", type=Path, required=True)
        if action != "reconstruct":
            sub.add_argument("--strict", action="store_true", help="Require Ψ to match cone by cone, not only at rays")
        if action == "check":
            sub.add_argument("--all-cones", action="store_true", help="Check every nonzero cone, faces included")

    kly = commands.add_parser("klyachko", help="Filtration conversions").add_subparsers(dest="action", required=True)
    for action in ("import", "export"):
        kly.add_parser(action).add_argument("--input", type=Path, required=True)

    commands.add_parser("samples", help="Write the example corpus").add_argument("--dir", default="samples")
    return parser


INPUT_NAMES = ("fan", "plmap", "psi", "cand", "input", "first", "second")


def make_config(args: argparse.Namespace) -> RunConfig:
    """Merge command-line flags over settings."""
    settings = load_settings(args.settings)
    setup_logging(args.log_level or settings.logging.get("level", "WARNING"))

    subcommand = args.command if getattr(args, "action", None) is None else f"{args.command} {args.action}"
    inputs = {name: getattr(args, name) for name in INPUT_NAMES if getattr(args, name, None) is not None}
    options = {
        key: getattr(args, key)
        for key in ("strict", "all_cones", "generator", "dir")
        if getattr(args, key, None) is not None
    }
    return RunConfig(
        subcommand=subcommand,
        inputs=inputs,
        output=args.output,
        witnesses=args.witnesses if args.witnesses is not None else settings.output.get("witnesses", True),
        parallel=args.parallel if args.parallel is not None else settings.runtime.get("parallel", 1),
        census_limit=args.census_limit if args.census_limit is not None else settings.runtime.get("census_limit", 20000),
        indent=settings.output.get("indent", 2),
        options=options,
    )


def main(argv: Optional[list[str]] = None) -> int:
    """CLI entry point."""
    load_env()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.schema:
            sys.stdout.write(io.schema_text(args.schema))
            return EXIT_OK
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_INPUT
        return run(make_config(args))
    except ReconstructionInconsistent as e:
        print(f"[REJECTED] {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        print(f"[INPUT ERROR] {e.errors()[0].get('msg', str(e))}", file=sys.stderr)
        return EXIT_INPUT
    except ToricBundleError as e:
        print(f"[ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT
    except KeyError as e:
        print(f"[INPUT ERROR] {e.args[0] if e.args else e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"[INPUT ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"[INPUT ERROR] {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
