import argparse
import logging
import sys

from riccati_lab import __version__
from riccati_lab.cli.assumptions import cmd_assumptions
from riccati_lab.cli.gen import cmd_gen
from riccati_lab.cli.solve import cmd_solve
from riccati_lab.cli.verify import cmd_verify
from riccati_lab.core.errors import LabError
from riccati_lab.core.logging import setup_logging
from riccati_lab.schemas.config import load_run_config

logger = logging.getLogger("riccati_lab")

# flag -> (section, key) in the run configuration
SHORTCUTS = {
    "model_kind": ("model", "source"),
    "model_file": ("model", "path"),
    "n": ("model", "n"),
    "beta": ("model", "beta"),
    "n_h": ("model", "n_h"),
    "n_p": ("model", "n_p"),
    "kappa": ("model", "kappa"),
    "damping": ("model", "damping"),
    "m": ("model", "m"),
    "p": ("model", "p"),
    "seed": ("model", "seed"),
    "horizon": ("model", "horizon"),
    "T": ("grid", "T"),
    "steps": ("grid", "steps"),
    "integrator": ("grid", "integrator"),
    "method": ("solve", "method"),
    "solution": ("verify", "solution"),
    "checks": ("verify", "checks"),
    "csv": ("assumptions", "csv"),
    "out": ("output", "dir"),
}


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="run configuration (ini)")
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one configuration key",
    )
    parser.add_argument("--model-file", dest="model_file", help="model file to load")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riccati-lab", description="Riccati equations for LQ boundary control"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a model file")
    _common(gen)
    gen.add_argument(
        "--kind", dest="model_kind", choices=["heat", "composite", "random", "scalar"]
    )
    gen.add_argument("--n", type=int)
    gen.add_argument("--beta", type=float)
    gen.add_argument("--n-h", dest="n_h", type=int)
    gen.add_argument("--n-p", dest="n_p", type=int)
    gen.add_argument("--kappa", type=float)
    gen.add_argument("--damping", type=float)
    gen.add_argument("--m", type=int)
    gen.add_argument("--p", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--horizon", type=float)

    solve = sub.add_parser("solve", help="solve the DRE or the ARE")
    _common(solve)
    solve.add_argument("kind", choices=["dre", "are"])
    solve.add_argument("--T", type=float)
    solve.add_argument("--steps", type=int)
    solve.add_argument("--integrator", choices=["rk4", "midpoint"])
    solve.add_argument("--method", choices=["newton", "spectral"])

    verify = sub.add_parser("verify", help="run the verification suite on a solution")
    _common(verify)
    verify.add_argument("--solution")
    verify.add_argument("--checks", help="comma separated check names (empty for none)")

    assumptions = sub.add_parser("assumptions", help="measure the assumption constants")
    _common(assumptions)
    assumptions.add_argument("--csv", action="store_const", const="true")
    return parser


def shortcuts_from(args: argparse.Namespace) -> dict[str, dict[str, str]]:
    mapped: dict[str, dict[str, str]] = {}
    for flag, (section, key) in SHORTCUTS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        mapped.setdefault(section, {})[key] = str(value)
    if getattr(args, "model_file", None):
        mapped["model"]["source"] = "file"
    return mapped


def run(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, args.overrides, shortcuts_from(args))
    if args.command == "gen":
        return cmd_gen(config)
    if args.command == "solve":
        return cmd_solve(config, args.kind)
    if args.command == "verify":
        return cmd_verify(config)
    return cmd_assumptions(config)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        return run(args)
    except LabError as exc:
        logger.error("%s failed: %s", args.command, exc.detail)
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
