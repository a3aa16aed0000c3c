"""Command-line runner: configure experiments, emit CSV and SVG artifacts.

`coadea run --problem <1-4|file> --seed 42,43 [...]` runs one experiment per
seed and writes, per seed, the frontier, the per-iteration history, quality
metrics against a grid reference front, and a scatter plot of the frontier
over that reference front. Identical configuration and seed reproduce the
artifact bytes exactly.

Config files are UTF-8 `key = value` lines mirroring the flags (dashes or
underscores); a file may also define a custom bi-objective problem through
expression strings:

    name = widget
    objective1 = 2*x1 - x2
    objective2 = -x1
    constraint1 = (x1 - 1)^3 + x2 <= 0
    lower = 0, 0
    upper = 1, 1

Flags override file values; unknown keys are errors.
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from coadea import engine, pareto
from coadea.engine import CoaConfig
from coadea.problems import ProblemSpec, builtin, from_expressions, is_feasible


class ConfigError(ValueError):
    """Bad flags or config file contents."""


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    coa: CoaConfig
    seeds: tuple[int, ...]
    grid: int = 200
    out_dir: Path = Path("out")
    formats: tuple[str, ...] = ("csv", "svg")

    def validate(self) -> None:
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.grid < 10:
            raise ConfigError("grid density must be at least 10")
        self.coa.validate()


# flag/file keys that map straight onto CoaConfig fields
_COA_KEYS = {
    "pop": "initial_population",
    "min_eggs": "min_eggs",
    "max_eggs": "max_eggs",
    "iters": "max_iterations",
    "max_iterations": "max_iterations",
    "clusters": "num_clusters",
    "max_pop": "max_population",
    "alpha": "elr_alpha",
    "motion": "motion_coefficient",
    "final_iteration_only": "final_iteration_only",
}
_INT_COA = {"initial_population", "max_iterations", "min_eggs", "max_eggs",
            "num_clusters", "max_population"}
_PROBLEM_KEYS = {"problem", "name", "lower", "upper"}
_OTHER_KEYS = {"seed", "grid", "out"}
_EXPR_KEY = re.compile(r"^(objective|constraint)(\d+)$")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coadea", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run an experiment and write CSV/SVG artifacts")
    run_p.add_argument("--problem", required=True,
                       help="builtin problem id (1-4) or path to a config file")
    run_p.add_argument("--seed", default=None, help="comma-separated seed list")
    run_p.add_argument("--pop", type=int, default=None, help="initial population")
    run_p.add_argument("--min-eggs", type=int, default=None)
    run_p.add_argument("--max-eggs", type=int, default=None)
    run_p.add_argument("--iters", "--max-iterations", dest="iters", type=int, default=None,
                       help="iteration count")
    run_p.add_argument("--clusters", type=int, default=None)
    run_p.add_argument("--max-pop", type=int, default=None, help="population cap")
    run_p.add_argument("--alpha", type=float, default=None, help="egg-laying radius coefficient")
    run_p.add_argument("--motion", type=float, default=None, help="migration coefficient")
    run_p.add_argument("--grid", type=int, default=None, help="reference front grid density")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--final-iteration-only", action="store_true", default=None,
                       help="archive only the last iteration's efficient habitats")
    return parser


def parse_config(argv: list[str]) -> ExperimentConfig:
    """Flags (plus an optional config file named by --problem) to a validated config."""
    args = build_parser().parse_args(argv)
    if args.command != "run":  # pragma: no cover - argparse enforces the choice
        raise ConfigError(f"unknown command {args.command!r}")

    file_values: dict[str, str] = {}
    problem_token = args.problem.strip()
    if problem_token.isdigit():
        problem = _builtin_from_token(problem_token)
    else:
        path = Path(problem_token)
        if not path.is_file():
            raise ConfigError(
                f"unknown builtin problem {problem_token!r} and no such config file"
            )
        file_values = _read_key_value_file(path)
        problem = _problem_from_file(file_values, path)

    merged: dict[str, object] = {}
    for key, value in file_values.items():
        norm = key.replace("-", "_")
        if norm in _COA_KEYS:
            field_name = _COA_KEYS[norm]
            if field_name == "final_iteration_only":
                merged[field_name] = _parse_bool(value, key)
            elif field_name in _INT_COA:
                merged[field_name] = _parse_int(value, key)
            else:
                merged[field_name] = _parse_float(value, key)
        elif norm == "seed":
            merged["seeds"] = _parse_seed_list(value)
        elif norm == "grid":
            merged["grid"] = _parse_int(value, key)
        elif norm == "out":
            merged["out_dir"] = Path(value)
        elif norm in _PROBLEM_KEYS or _EXPR_KEY.match(norm):
            continue  # consumed by _problem_from_file
        else:
            raise ConfigError(f"unknown key {key!r} in config file")

    # explicit flags win over file values
    flag_map = {
        "initial_population": args.pop,
        "min_eggs": args.min_eggs,
        "max_eggs": args.max_eggs,
        "max_iterations": args.iters,
        "num_clusters": args.clusters,
        "max_population": args.max_pop,
        "elr_alpha": args.alpha,
        "motion_coefficient": args.motion,
        "final_iteration_only": args.final_iteration_only,
    }
    for field_name, value in flag_map.items():
        if value is not None:
            merged[field_name] = value
    if args.seed is not None:
        merged["seeds"] = _parse_seed_list(args.seed)
    if args.grid is not None:
        merged["grid"] = args.grid
    if args.out is not None:
        merged["out_dir"] = Path(args.out)

    seeds = tuple(merged.pop("seeds", (0,)))
    grid = int(merged.pop("grid", 200))
    out_dir = merged.pop("out_dir", Path("out"))
    coa_fields = {f.name for f in fields(CoaConfig)}
    coa = CoaConfig(**{k: v for k, v in merged.items() if k in coa_fields})
    cfg = ExperimentConfig(problem=problem, coa=coa, seeds=seeds, grid=grid, out_dir=Path(out_dir))
    cfg.validate()
    return cfg


def _builtin_from_token(token: str) -> ProblemSpec:
    try:
        return builtin(int(token))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _read_key_value_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _problem_from_file(values: dict[str, str], path: Path) -> ProblemSpec:
    objectives = {int(m.group(2)): v for k, v in values.items()
                  if (m := _EXPR_KEY.match(k.replace("-", "_"))) and m.group(1) == "objective"}
    constraints = {int(m.group(2)): v for k, v in values.items()
                   if (m := _EXPR_KEY.match(k.replace("-", "_"))) and m.group(1) == "constraint"}
    has_builtin = "problem" in values
    if has_builtin and objectives:
        raise ConfigError(f"{path}: give either 'problem = <1-4>' or objective expressions, not both")
    if has_builtin:
        return _builtin_from_token(values["problem"])
    if not objectives:
        raise ConfigError(f"{path}: missing problem selector (no 'problem' key, no objectives)")
    if "lower" not in values or "upper" not in values:
        raise ConfigError(f"{path}: custom problems need 'lower' and 'upper' bounds")
    lower = _parse_float_list(values["lower"], "lower")
    upper = _parse_float_list(values["upper"], "upper")
    if len(lower) != len(upper):
        raise ConfigError(f"{path}: lower and upper bounds differ in length")
    if any(lo > up for lo, up in zip(lower, upper)):
        raise ConfigError(f"{path}: conflicting bounds (lower > upper)")
    name = values.get("name", path.stem)
    try:
        return from_expressions(
            name=name,
            objectives=[objectives[i] for i in sorted(objectives)],
            constraints=[constraints[i] for i in sorted(constraints)],
            lower=lower,
            upper=upper,
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _parse_int(value: str, key: str) -> int:
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from exc


def _parse_float(value: str, key: str) -> float:
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from exc


def _parse_bool(value: str, key: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_float_list(value: str, key: str) -> list[float]:
    try:
        return [float(part) for part in value.split(",")]
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {value!r}") from exc


def _parse_seed_list(value: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(part) for part in str(value).split(","))
    except ValueError as exc:
        raise ConfigError(f"seed: expected comma-separated integers, got {value!r}") from exc
    if not seeds:
        raise ConfigError("seed list is empty")
    return seeds


# ---------------------------------------------------------------------------
# Artifact writers


def _fmt(value) -> str:
    """12 significant digits, LF-safe, no negative zero."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v == 0.0:
        v = 0.0
    return f"{v:.12g}"


def export_csv(header, rows) -> str:
    """Comma-separated text: header then rows, LF newlines, 12 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def export_svg(frontier_f, reference_f, axis_labels=("f1", "f2"),
               width: int = 640, height: int = 480) -> str:
    """Standalone SVG: reference front as a polyline, frontier as circles.

    Axes auto-scale to the union of both point sets with a 5% margin. Output
    bytes are a pure function of the inputs.
    """
    frontier_f = np.asarray(frontier_f, dtype=np.float64).reshape(-1, 2) if len(frontier_f) else np.empty((0, 2))
    reference_f = np.asarray(reference_f, dtype=np.float64).reshape(-1, 2) if len(reference_f) else np.empty((0, 2))
    if frontier_f.size == 0 and reference_f.size == 0:
        raise ValueError("nothing to plot: frontier and reference are both empty")
    allpts = np.vstack([p for p in (frontier_f, reference_f) if p.size])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    lo = lo - 0.05 * span
    hi = hi + 0.05 * span
    span = hi - lo

    margin = 50.0
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    def px(p):
        return (margin + (p[0] - lo[0]) / span[0] * plot_w,
                height - margin - (p[1] - lo[1]) / span[1] * plot_h)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin:.1f}" y="{margin:.1f}" width="{plot_w:.1f}" height="{plot_h:.1f}" '
        'fill="none" stroke="black" stroke-width="1"/>',
        f'<text x="{width / 2:.1f}" y="{height - 12:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{axis_labels[0]}</text>',
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 14 {height / 2:.1f})">{axis_labels[1]}</text>',
    ]
    for j, (value, anchor) in enumerate(((lo, "start"), (hi, "end"))):
        x_lab = margin if j == 0 else margin + plot_w
        y_lab = height - margin if j == 0 else margin
        parts.append(
            f'<text x="{x_lab:.1f}" y="{height - margin + 16:.1f}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="10">{_fmt(value[0])}</text>'
        )
        parts.append(
            f'<text x="{margin - 4:.1f}" y="{y_lab:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(value[1])}</text>'
        )
    if reference_f.size:
        ordered = reference_f[np.lexsort((reference_f[:, 1], reference_f[:, 0]))]
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (px(p) for p in ordered))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="#888888" stroke-width="1.5"/>')
    for p in frontier_f:
        x, y = px(p)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="none" stroke="#c0392b" stroke-width="1.5"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run_experiment(cfg: ExperimentConfig) -> int:
    """Run every seed, write artifacts, print one summary line per seed.

    Returns a process exit status. On any failure the files written by this
    invocation are removed, so a nonzero exit leaves no partial outputs.
    """
    written: list[Path] = []
    try:
        cfg.validate()
        if cfg.problem.k != 2:
            raise ConfigError("the experiment runner handles bi-objective problems only")
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        reference = pareto.reference_front(cfg.problem, cfg.grid)
        ref_span = reference.max(axis=0) - reference.min(axis=0)
        ref_point = reference.max(axis=0) + 0.1 * np.where(ref_span > 0, ref_span, 1.0)

        for seed in cfg.seeds:
            result = engine.run(cfg.problem, cfg.coa, seed=seed)
            front_f = result.frontier_objectives()
            tag = f"{cfg.problem.name}_{seed}"

            if "csv" in cfg.formats:
                _write(cfg.out_dir / f"frontier_{tag}.csv", _frontier_csv(cfg.problem, result), written)
                _write(cfg.out_dir / f"history_{tag}.csv", _history_csv(result), written)
            metrics = [
                ("gd", pareto.generational_distance(front_f, reference)),
                ("hypervolume", pareto.hypervolume_2d(front_f, ref_point)),
                ("spacing", pareto.spacing(front_f)),
                ("ref_point_f1", float(ref_point[0])),
                ("ref_point_f2", float(ref_point[1])),
                ("frontier_size", len(result.frontier)),
            ]
            if "csv" in cfg.formats:
                _write(cfg.out_dir / f"metrics_{tag}.csv",
                       export_csv(("metric", "value"), metrics), written)
            if "svg" in cfg.formats:
                _write(cfg.out_dir / f"front_{tag}.svg",
                       export_svg(front_f, reference), written)
            summary = " ".join(f"{name}={_fmt(value)}" for name, value in metrics)
            print(f"{cfg.problem.name} seed={seed} {summary}")
        return 0
    except Exception as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _write(path: Path, text: str, written: list[Path]) -> None:
    path.write_bytes(text.encode("utf-8"))
    written.append(path)


def _frontier_csv(problem: ProblemSpec, result: engine.RunResult) -> str:
    header = tuple(f"x{i + 1}" for i in range(problem.n_var)) + \
        tuple(f"f{i + 1}" for i in range(problem.k)) + ("efficiency", "iteration")
    rows = [
        tuple(p.x) + tuple(p.objectives) + (p.efficiency, p.iteration)
        for p in result.frontier
    ]
    return export_csv(header, rows)


def _history_csv(result: engine.RunResult) -> str:
    header = ("iteration", "pool_size", "population_size", "efficient_count",
              "best_efficiency", "mean_efficiency", "archive_size", "archive_hypervolume")
    rows = [
        (h.iteration, h.pool_size, h.population_size, h.efficient_count,
         h.best_efficiency, h.mean_efficiency, h.archive_size, h.archive_hypervolume)
        for h in result.history
    ]
    return export_csv(header, rows)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else list(argv))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
