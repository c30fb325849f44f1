"""Command-line surface: certification sweeps, problem generation, solving.

Four subcommands: certify-lemma (inequality sweep to CSV), certify-convexity
(chord-inequality grid to CSV plus the derivative cross-check), generate
(seeded rotation-averaging problem files), solve (branch-and-bound with a
printed certificate line). All outputs are byte-stable for fixed seeds and
flags; `-` means stdin/stdout.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import (
    SLACK_TOL,
    certification_sweep,
    second_derivative_check,
    write_convexity_csv,
    write_sweep_csv,
)
from .rotations import (
    RotationParseError,
    _random_unit_vectors,
    log_map,
    random_rotation,
    _exp_matrices,
    RotationMatrix,
)
from .solver import (
    AGGREGATORS,
    DEFAULT_MAX_CUBES,
    averaging_problem,
    format_result_line,
    read_problem_file,
    solve,
    write_problem_file,
)


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    """Validated invocation parameters for one subcommand run."""

    command: str
    seed: int = 0
    samples: int = 100_000
    epsilon: float = 1e-3
    input_path: str = "-"
    output_path: str = "-"
    cost: Optional[str] = "linf"
    noise: float = 0.1
    grid: int = 101
    max_cubes: int = DEFAULT_MAX_CUBES
    threads: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls(command=args.command)
        for name in ("seed", "samples", "epsilon", "cost", "noise", "grid", "max_cubes", "threads"):
            if hasattr(args, name):
                setattr(cfg, name, getattr(args, name))
        if hasattr(args, "input"):
            cfg.input_path = args.input
        if hasattr(args, "output"):
            cfg.output_path = args.output
        return cfg

    def validate(self) -> None:
        if self.samples < 1:
            raise CliError(f"--samples must be at least 1, got {self.samples}")
        if self.epsilon <= 0.0:
            raise CliError(f"--epsilon must be positive, got {self.epsilon}")
        if self.grid < 2:
            raise CliError(f"--grid must be at least 2, got {self.grid}")
        if self.max_cubes < 1:
            raise CliError(f"--max-cubes must be at least 1, got {self.max_cubes}")
        if self.threads < 1:
            raise CliError(f"--threads must be at least 1, got {self.threads}")
        if not 0.0 <= self.noise <= np.pi:
            raise CliError(f"--noise must be in [0, pi], got {self.noise}")
        if self.cost is not None and self.cost not in AGGREGATORS:
            raise CliError(f"--cost must be one of {AGGREGATORS}, got {self.cost}")
        # Path checks run before any computation so a doomed run fails fast
        # and never leaves partial output.
        if self.input_path != "-" and not os.path.isfile(self.input_path):
            raise CliError(f"input file not found: {self.input_path}")
        if self.output_path != "-":
            if os.path.isdir(self.output_path):
                raise CliError(f"output path is a directory: {self.output_path}")
            directory = os.path.dirname(os.path.abspath(self.output_path))
            if not os.path.isdir(directory):
                raise CliError(f"output directory does not exist: {directory}")
            if not os.access(directory, os.W_OK):
                raise CliError(f"output directory is not writable: {directory}")


def _write_output(path: str, writer) -> None:
    # Atomic for real paths: write a sibling temp file, rename over the target.
    if path == "-":
        writer(sys.stdout)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rotbound-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            writer(f)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def cmd_certify_lemma(cfg: RunConfig) -> int:
    merged, _ = certification_sweep(cfg.samples, cfg.seed, threads=cfg.threads)
    _write_output(cfg.output_path, lambda f: write_sweep_csv(merged, f))
    print(f"min_slack={merged.min_slack:.17g}")
    return 0 if merged.min_slack >= -SLACK_TOL else 1


def cmd_certify_convexity(cfg: RunConfig) -> int:
    fd_report = second_derivative_check()
    reports = {}

    def writer(f):
        reports["grid"] = write_convexity_csv(cfg.grid, f)

    _write_output(cfg.output_path, writer)
    print(f"max_violation={reports['grid'].max_violation:.17g}")
    print(f"fd_max_deviation={fd_report.max_fd_deviation:.17g}")
    return 0 if reports["grid"].passed and fd_report.passed else 1


def cmd_generate(cfg: RunConfig) -> int:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    truth = random_rotation(rng)
    axes = _random_unit_vectors(cfg.samples, rng)
    angles = rng.uniform(0.0, cfg.noise, cfg.samples)
    perturbs = _exp_matrices(axes * angles[:, None])
    measured = np.matmul(truth.m, perturbs)
    rotations = [log_map(RotationMatrix._from_trusted(m)) for m in measured]
    cost = cfg.cost or "linf"
    _write_output(
        cfg.output_path,
        lambda f: write_problem_file(f, rotations, cost, truth=log_map(truth)),
    )
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    text = _read_input(cfg.input_path)
    pf = read_problem_file(text)
    if not pf.rotations:
        raise CliError("no rotations in input")
    cost = cfg.cost or pf.cost or "linf"
    problem = averaging_problem(pf.rotations, cost)
    result = solve(problem, cfg.epsilon, cfg.max_cubes, threads=cfg.threads)
    _write_output(cfg.output_path, lambda f: f.write(format_result_line(result) + "\n"))
    if not result.converged:
        print(
            f"error: cube budget exhausted after {result.cubes_explored} evaluations "
            f"(gap {result.gap:.17g} > epsilon {cfg.epsilon:.17g})",
            file=sys.stderr,
        )
        return 1
    return 0


_DISPATCH = {
    "certify-lemma": cmd_certify_lemma,
    "certify-convexity": cmd_certify_convexity,
    "generate": cmd_generate,
    "solve": cmd_solve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotbound",
        description="Angular-distance bound certification and certified rotation averaging.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify-lemma", help="sweep the distance bound over random and boundary pairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--output", default="-", help="CSV destination, - for stdout")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("certify-convexity", help="grid-certify arccos-squared convexity")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--output", default="-", help="CSV destination, - for stdout")

    p = sub.add_parser("generate", help="write a seeded rotation-averaging problem file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--noise", type=float, default=0.1, help="max perturbation angle in radians")
    p.add_argument("--cost", choices=AGGREGATORS, default="linf")
    p.add_argument("--output", default="-")

    p = sub.add_parser("solve", help="branch-and-bound solve of a problem file")
    p.add_argument("--input", default="-", help="problem file, - for stdin")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--cost", choices=AGGREGATORS, default=None, help="override the file's cost header")
    p.add_argument("--max-cubes", type=int, default=DEFAULT_MAX_CUBES, dest="max_cubes")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--output", default="-", help="result line destination, - for stdout")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    try:
        cfg.validate()
        return _DISPATCH[cfg.command](cfg)
    except (CliError, RotationParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main(sys.argv[1:]))
