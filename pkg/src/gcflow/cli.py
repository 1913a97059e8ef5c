"""Batch experiment front end: scenario configs, catalog, CSV/snapshot output.

Scenario files are plain ``key = value`` documents with three sections::

    [scenario]   name, n, N, initial, expect, seed
    [flow]       alpha, f, f_even, mode, phi0_rule, phi0_value, cfl, t_max,
                 residual_tol, blowup_ratio, min_u_floor, record_every, conserve
    [output]     directory, snapshot_every

``#`` starts a comment; keys are case-sensitive.  Unknown keys, malformed
numbers and inconsistent combinations are reported with their line number.

Initial bodies: ``sphere RHO`` | ``ellipse A B`` | ``shifted_disk C`` |
``fourier C0 A1 B1 A2 B2 ...`` | ``random-fourier AMP KMAX`` |
``from-file PATH``.  Weights: ``constant C`` | ``cosine C0 A1 B1 ...`` |
``spike CENTER WIDTH MASS_FRACTION``.

Commands: ``run CONFIG``, ``catalog``, ``run-all [--jobs K]``,
``check CONFIG``.  Exit codes: 0 success / expected outcome, 1 unexpected
outcome, 2 usage or parse error, 3 I/O error.  The environment variable
``GCFLOW_OUT_ROOT`` overrides the root under which relative output
directories are created.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, ConvexityLost
from .flow import DiagnosticsRecord, FlowConfig, Outcome, run
from .functionals import AnisotropyF, constant_f, cosine_f, spike_f
from .geometry import SupportFn, body_snapshot, read_snapshot, write_snapshot
from .grid import SphericalGrid, circle_grid, polar_grid

__all__ = ["ScenarioSpec", "parse_config", "run_scenario", "catalog", "main"]

OUTPUT_ROOT_ENV = "GCFLOW_OUT_ROOT"

CATALOG = (
    "thm_A_isotropic",
    "thm_A_alpha_gt",
    "thm_B_anisotropic",
    "thm_C_aleksandrov",
    "thm_Da_symmetric",
    "thm_D_counterexample",
    "lemma_2_2_monotonicity",
    "duality_identities",
    "aleksandrov_checker_demo",
)

_SCENARIO_KEYS = {"name", "n", "N", "initial", "expect", "seed"}
_FLOW_KEYS = {"alpha", "f", "f_even", "mode", "phi0_rule", "phi0_value", "cfl",
              "t_max", "residual_tol", "blowup_ratio", "min_u_floor",
              "record_every", "conserve"}
_OUTPUT_KEYS = {"directory", "snapshot_every"}


@dataclass
class ScenarioSpec:
    """One experiment: initial body, flow configuration, output plan."""

    name: str = "scenario"
    n: int = 1
    N: int = 512
    initial: tuple = ("sphere", [1.0])
    expect: str = ""
    seed: int = 0
    alpha: float = 2.0
    f_kind: tuple = ("constant", [1.0])
    f_even: bool = False
    mode: str = "normalized"
    phi0_rule: str = ""
    phi0_value: float | None = None
    cfl: float = 0.2
    t_max: float = 10.0
    residual_tol: float = 1e-6
    blowup_ratio: float = 1e3
    min_u_floor: float = 1e-6
    record_every: int = 100
    conserve: str = "auto"
    directory: str = ""
    snapshot_every: int = 0
    source: str = field(default="", repr=False)

    def grid(self) -> SphericalGrid:
        return circle_grid(self.N) if self.n == 1 else polar_grid(self.N)

    def anisotropy(self, grid: SphericalGrid) -> AnisotropyF:
        kind, params = self.f_kind
        if kind == "constant":
            f = constant_f(params[0])
            return f if not self.f_even else f
        if kind == "cosine":
            c0, rest = params[0], params[1:]
            return cosine_f(c0, rest[0::2], rest[1::2], even=self.f_even)
        if kind == "spike":
            return spike_f(grid, *params)
        raise ConfigError(f"unknown anisotropy kind '{kind}'")

    def initial_body(self, grid: SphericalGrid) -> SupportFn:
        kind, params = self.initial
        t = grid.nodes
        if kind == "sphere":
            return SupportFn(grid, np.full(grid.size, params[0]))
        if kind == "ellipse":
            a, b = params
            if grid.n == 1:
                return SupportFn(grid, np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2))
            return SupportFn(grid, np.sqrt(a * a * np.sin(t) ** 2 + b * b * np.cos(t) ** 2))
        if kind == "shifted_disk":
            return SupportFn(grid, 1.0 + params[0] * np.cos(t))
        if kind == "fourier":
            u = np.full(grid.size, params[0])
            coeffs = params[1:]
            for k in range(len(coeffs) // 2):
                u += coeffs[2 * k] * np.cos((k + 1) * t)
                u += coeffs[2 * k + 1] * np.sin((k + 1) * t)
            return SupportFn(grid, u)
        if kind == "random-fourier":
            amp, kmax = params[0], int(params[1])
            rng = np.random.default_rng(self.seed)
            u = np.ones(grid.size)
            for k in range(2, kmax + 1):
                scale = amp / (k * k)
                u += scale * rng.uniform(-1, 1) * np.cos(k * t)
                if grid.n == 1:
                    u += scale * rng.uniform(-1, 1) * np.sin(k * t)
            return SupportFn(grid, u)
        if kind == "from-file":
            body, _ = read_snapshot(params[0])
            return body.u
        raise ConfigError(f"unknown initial body kind '{kind}'")

    def flow_config(self, grid: SphericalGrid) -> FlowConfig:
        rule = self.phi0_rule
        if not rule:
            q = self.n + 1 - self.alpha
            rule = "aleksandrov" if q == 0 else ("bracket" if q < 0 else "iq_matching")
        return FlowConfig(
            alpha=self.alpha, f=self.anisotropy(grid), mode=self.mode,
            phi0_rule=rule, phi0_value=self.phi0_value, cfl=self.cfl,
            t_max=self.t_max, residual_tol=self.residual_tol,
            blowup_ratio=self.blowup_ratio, min_u_floor=self.min_u_floor,
            record_every=self.record_every, conserve=self.conserve,
        )


def _parse_number(text: str, line: int, integer: bool = False):
    try:
        return int(text) if integer else float(text)
    except ValueError:
        raise ConfigError(f"malformed number '{text}'", line=line) from None


def _parse_value_list(text: str, line: int) -> tuple[str, list[float]]:
    parts = text.split()
    if not parts:
        raise ConfigError("empty value", line=line)
    return parts[0], [_parse_number(p, line) for p in parts[1:]]


def parse_config(text: str) -> ScenarioSpec:
    """Parse a scenario document; raises ConfigError naming the bad line."""
    spec = ScenarioSpec(source=text)
    section = None
    directory_set = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            if section not in ("scenario", "flow", "output"):
                raise ConfigError(f"unknown section '[{section}]'", line=lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got '{line}'", line=lineno)
        if section is None:
            raise ConfigError("key outside of any section", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))

        if section == "scenario":
            if key not in _SCENARIO_KEYS:
                raise ConfigError(f"unknown key '{key}' in [scenario]", line=lineno)
            if key == "name":
                spec.name = value
            elif key == "n":
                spec.n = _parse_number(value, lineno, integer=True)
                if spec.n not in (1, 2):
                    raise ConfigError("n must be 1 or 2", line=lineno)
            elif key == "N":
                spec.N = _parse_number(value, lineno, integer=True)
            elif key == "initial":
                parts = value.split()
                if not parts:
                    raise ConfigError("empty initial body", line=lineno)
                if parts[0] == "from-file":
                    spec.initial = ("from-file", parts[1:])
                else:
                    spec.initial = _parse_value_list(value, lineno)
            elif key == "expect":
                if value not in ("converged", "timeout", "blowup", "extinct"):
                    raise ConfigError(f"unknown expect value '{value}'", line=lineno)
                spec.expect = value
            elif key == "seed":
                spec.seed = _parse_number(value, lineno, integer=True)
        elif section == "flow":
            if key not in _FLOW_KEYS:
                raise ConfigError(f"unknown key '{key}' in [flow]", line=lineno)
            if key == "f":
                spec.f_kind = _parse_value_list(value, lineno)
            elif key == "f_even":
                if value not in ("true", "false"):
                    raise ConfigError("f_even must be true or false", line=lineno)
                spec.f_even = value == "true"
            elif key in ("mode", "phi0_rule", "conserve"):
                setattr(spec, key, value)
            elif key == "record_every":
                spec.record_every = _parse_number(value, lineno, integer=True)
            else:
                setattr(spec, key, _parse_number(value, lineno))
        else:
            if key not in _OUTPUT_KEYS:
                raise ConfigError(f"unknown key '{key}' in [output]", line=lineno)
            if key == "directory":
                spec.directory = value
                directory_set = True
            else:
                spec.snapshot_every = _parse_number(value, lineno, integer=True)

    if not directory_set:
        spec.directory = spec.name
    _validate(spec)
    return spec


def _validate(spec: ScenarioSpec) -> None:
    q = spec.n + 1 - spec.alpha
    if spec.phi0_rule == "iq_matching" and q == 0:
        raise ConfigError("iq_matching requires alpha != n+1")
    if spec.phi0_rule == "explicit" and (spec.phi0_value is None or spec.phi0_value <= 0):
        raise ConfigError("explicit phi0 rule needs phi0_value > 0")
    if spec.mode not in ("normalized", "raw"):
        raise ConfigError(f"unknown mode '{spec.mode}'")
    if spec.N < 16:
        raise ConfigError("N must be at least 16")
    kind, params = spec.initial
    arity = {"sphere": 1, "ellipse": 2, "shifted_disk": 1, "from-file": 1,
             "random-fourier": 2}
    if kind not in arity and kind != "fourier":
        raise ConfigError(f"unknown initial body kind '{kind}'")
    if kind in arity and len(params) != arity[kind]:
        raise ConfigError(f"initial '{kind}' takes {arity[kind]} parameter(s)")
    if kind == "fourier" and spec.n == 2:
        coeffs = params[1:]
        if any(c != 0.0 for c in coeffs[1::2]):
            raise ConfigError("axisymmetric fourier bodies allow cosine terms only")
    if kind == "from-file" and not Path(params[0]).exists():
        raise ConfigError(f"initial body file not found: {params[0]}")
    f_kind, f_params = spec.f_kind
    f_arity = {"constant": 1, "spike": 3}
    if f_kind not in f_arity and f_kind != "cosine":
        raise ConfigError(f"unknown anisotropy kind '{f_kind}'")
    if f_kind in f_arity and len(f_params) != f_arity[f_kind]:
        raise ConfigError(f"anisotropy '{f_kind}' takes {f_arity[f_kind]} parameter(s)")
    if f_kind == "cosine" and not f_params:
        raise ConfigError("anisotropy 'cosine' needs at least the constant term")


def _write_diagnostics(history, path: Path) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(DiagnosticsRecord.CSV_FIELDS) + "\n")
        for rec in history:
            fh.write(rec.csv_row() + "\n")


def run_scenario(spec: ScenarioSpec, output_root: str | None = None) -> int:
    """Execute one scenario; writes diagnostics.csv, snapshots and summary.txt.

    Returns the process exit code (0 expected outcome, 1 unexpected, 3 I/O).
    """
    root = Path(output_root or os.environ.get(OUTPUT_ROOT_ENV, "."))
    outdir = Path(spec.directory)
    if not outdir.is_absolute():
        outdir = root / outdir
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        probe = outdir / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        print(f"error: cannot write to output directory {outdir}: {exc}", file=sys.stderr)
        return 3

    grid = spec.grid()
    u0 = spec.initial_body(grid)
    config = spec.flow_config(grid)

    snapshots = []

    def on_step(state):
        if spec.snapshot_every and state.step_index % spec.snapshot_every == 0:
            body = body_snapshot(state.u)
            path = outdir / f"snapshot_{state.step_index}.txt"
            write_snapshot(body, path, t=state.t)
            snapshots.append(path)

    started = time.monotonic()
    collapse_note = ""
    try:
        result = run(u0, config, on_step=on_step if spec.snapshot_every else None)
    except ConvexityLost as exc:
        print(f"error: initial body invalid: {exc}", file=sys.stderr)
        return 1
    wall = time.monotonic() - started
    if result.collapsed:
        collapse_note = " (step collapse)"

    try:
        _write_diagnostics(result.history, outdir / "diagnostics.csv")
        final_path = outdir / f"snapshot_{result.final.step_index}.txt"
        if final_path not in snapshots:
            write_snapshot(body_snapshot(result.final.u), final_path, t=result.final.t)
        last = result.history[-1]
        with open(outdir / "summary.txt", "w") as fh:
            fh.write(f"scenario: {spec.name}\n")
            fh.write(f"outcome: {result.outcome.value}{collapse_note}\n")
            fh.write(f"final_residual: {last.residual_max:.17g}\n")
            fh.write(f"final_ratio: {last.ratio_R:.17g}\n")
            fh.write(f"wall_time_s: {wall:.3f}\n")
            fh.write(f"steps: {result.final.step_index}\n")
    except OSError as exc:
        print(f"error: cannot write results under {outdir}: {exc}", file=sys.stderr)
        return 3

    if spec.expect:
        ok = result.outcome.value == spec.expect
    else:
        ok = result.outcome in (Outcome.CONVERGED, Outcome.TIMEOUT)
    if not ok:
        print(f"{spec.name}: outcome {result.outcome.value}"
              + (f" (expected {spec.expect})" if spec.expect else ""), file=sys.stderr)
    return 0 if ok else 1


def catalog() -> list[str]:
    """Names of the built-in scenarios shipped with the package."""
    return list(CATALOG)


def catalog_text(name: str) -> str:
    if name not in CATALOG:
        raise KeyError(f"unknown catalog scenario '{name}'")
    return (resources.files("gcflow") / "scenarios" / f"{name}.cfg").read_text()


def _run_catalog_entry(name: str, output_root: str | None) -> tuple[str, int]:
    spec = parse_config(catalog_text(name))
    return name, run_scenario(spec, output_root=output_root)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gcflow",
        description="Contracting curvature-flow experiments on convex bodies.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one scenario config file")
    p_run.add_argument("config")
    p_run.add_argument("--output-root", default=None)
    sub.add_parser("catalog", help="list built-in scenarios")
    p_all = sub.add_parser("run-all", help="run every catalog scenario")
    p_all.add_argument("--jobs", type=int, default=1)
    p_all.add_argument("--output-root", default=None)
    p_check = sub.add_parser("check", help="parse a config without running it")
    p_check.add_argument("config")

    args = parser.parse_args(argv)

    if args.command == "catalog":
        for name in catalog():
            print(name)
        return 0

    if args.command in ("run", "check"):
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
            return 3
        try:
            spec = parse_config(text)
        except ConfigError as exc:
            print(f"error: {args.config}: {exc}", file=sys.stderr)
            return 2
        if args.command == "check":
            print(f"{spec.name}: n={spec.n} N={spec.N} alpha={spec.alpha} "
                  f"mode={spec.mode} initial={spec.initial[0]} "
                  f"expect={spec.expect or '(converged-or-timeout)'}")
            return 0
        return run_scenario(spec, output_root=args.output_root)

    # run-all
    codes = {}
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_catalog_entry, name, args.output_root)
                       for name in catalog()]
            for fut in concurrent.futures.as_completed(futures):
                name, code = fut.result()
                codes[name] = code
    else:
        for name in catalog():
            codes[name] = _run_catalog_entry(name, args.output_root)[1]
    for name in catalog():
        print(f"{name}: {'ok' if codes[name] == 0 else f'FAILED ({codes[name]})'}")
    return max(codes.values())


if __name__ == "__main__":
    sys.exit(main())
