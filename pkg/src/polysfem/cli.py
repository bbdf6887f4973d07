"""Command-line entry point: ``polysfem <benchmark> [options]``.

Each benchmark writes ``<name>.csv`` (and, for convergence ladders, a
log-log ``<name>.svg``) into ``--out`` and prints a short report.

Exit codes: 0 success, 2 configuration error, 3 numerical failure. On a
nonzero exit a single line ``error code=<n> type=<Exception> message="..."``
is printed to stderr.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import benchmarks as bm
from .benchmarks import BenchmarkReport, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class NumericalFailure(ArithmeticError):
    """A benchmark ran but its built-in check failed."""


@dataclass(frozen=True)
class _Entry:
    driver: str
    formulation: str | None  # None: the benchmark takes no formulation
    levels: bool = False
    meshes: bool = False


BENCHMARKS = {
    "mesh-info": _Entry("mesh_info", None, meshes=True),
    "golden-matrices": _Entry("golden_matrices", None),
    "cantilever2d": _Entry("cantilever2d", "stab", levels=True, meshes=True),
    "plate-hole": _Entry("plate_hole", "stab", levels=True, meshes=True),
    "l-shape": _Entry("l_shape", "stab", levels=True, meshes=True),
    "patch2d": _Entry("patch2d", "stab", meshes=True),
    "patch3d": _Entry("patch3d", "stab", meshes=True),
    "beam3d": _Entry("beam3d", "stab", levels=True),
    "stability-spectrum": _Entry("stability_spectrum", None),
    "edge-crack": _Entry("edge_crack", "sbfem", levels=True, meshes=True),
    "inclined-crack": _Entry("inclined_crack", "sbfem", meshes=True),
    "alpha-study": _Entry("alpha_study", "stab", meshes=True),
}


@dataclass(frozen=True)
class RunConfig:
    benchmark: str
    formulation: str | None = None
    alpha: tuple = (0.1,)
    levels: int | None = None
    meshes: tuple = ()
    out: Path | None = Path("results")
    seed: int = 42

    def validate(self) -> RunConfig:
        if self.benchmark not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {self.benchmark!r}; choose from {', '.join(BENCHMARKS)}")
        entry = BENCHMARKS[self.benchmark]
        if not self.alpha:
            raise ConfigError("--alpha needs at least one value")
        if any(not np.isfinite(a) or a < 0 for a in self.alpha):
            raise ConfigError("alpha* must be finite and non-negative")
        if self.benchmark == "alpha-study":
            if any(a <= 0 for a in self.alpha):
                raise ConfigError("alpha-study grid entries must be positive")
            if len(self.meshes) > 1:
                raise ConfigError("alpha-study runs on a single mesh")
        elif len(self.alpha) != 1:
            raise ConfigError(f"{self.benchmark} takes a single --alpha value")
        if self.levels is not None:
            if not entry.levels:
                raise ConfigError(f"{self.benchmark} has no mesh ladder; --levels does not apply")
            if self.levels < 1:
                raise ConfigError("--levels must be at least 1")
        if self.meshes and not entry.meshes:
            raise ConfigError(f"{self.benchmark} does not read mesh files")
        if self.benchmark == "mesh-info" and not self.meshes:
            raise ConfigError("mesh-info needs --mesh")
        if self.formulation is not None and entry.formulation is None:
            raise ConfigError(f"{self.benchmark} does not take --formulation")
        # every referenced mesh must exist before any work starts
        bm._resolve_meshes(self.meshes)
        return self


def run_benchmark(config: RunConfig) -> tuple[BenchmarkReport, list]:
    """Run one benchmark; returns the report and the files written (none if ``out`` is None)."""
    config.validate()
    entry = BENCHMARKS[config.benchmark]
    driver = getattr(bm, entry.driver)
    kw = {}
    if entry.formulation is not None:
        kw["formulation"] = config.formulation or entry.formulation
    meshes = list(config.meshes) or None
    name = config.benchmark
    if name == "alpha-study":
        kw["alpha_grid"] = tuple(config.alpha)
        if meshes:
            kw["mesh"] = meshes[0]
    elif name == "mesh-info":
        kw["meshes"] = meshes
    elif name == "golden-matrices":
        kw["seed"] = config.seed
    else:
        kw["alpha_star"] = config.alpha[0]
        if entry.meshes and meshes:
            kw["meshes"] = meshes
        if entry.levels and config.levels is not None:
            kw["levels"] = config.levels
    report = driver(**kw)
    files = report.write(config.out) if config.out is not None else []
    return report, files


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="polysfem", description="Polygonal smoothed/virtual/scaled-boundary element benchmarks.")
    ap.add_argument("benchmark", choices=list(BENCHMARKS), metavar="benchmark",
                    help="one of: " + ", ".join(BENCHMARKS))
    ap.add_argument("--formulation", help="fem, sfem[N], vem, stab or sbfem (default depends on the benchmark)")
    ap.add_argument("--alpha", type=float, nargs="+", default=None,
                    help="stabilization factor alpha*; alpha-study takes a grid")
    ap.add_argument("--levels", type=int, help="number of meshes taken from the ladder")
    ap.add_argument("--mesh", nargs="+", default=[], help="mesh files or fixture names")
    ap.add_argument("--out", type=Path, default=Path("results"), help="output directory (default: results)")
    ap.add_argument("--seed", type=int, default=42, help="seed for randomized checks (default: 42)")
    return ap


def _config_from_args(args) -> RunConfig:
    alpha = args.alpha
    if alpha is None:
        alpha = bm.ALPHA_GRID if args.benchmark == "alpha-study" else (0.1,)
    return RunConfig(args.benchmark, args.formulation, tuple(alpha), args.levels, tuple(args.mesh),
                     args.out, args.seed)


def _fail(code, exc) -> int:
    msg = str(exc).replace('"', "'").replace("\n", " ")
    print(f'error code={code} type={type(exc).__name__} message="{msg}"', file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report, files = run_benchmark(_config_from_args(args))
        for line in report.lines:
            print(line)
        for f in files:
            print(f"wrote {f}")
        if not report.passed:
            raise NumericalFailure(f"{report.name} check failed")
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except (ValueError, OSError) as exc:
        return _fail(EXIT_CONFIG, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
