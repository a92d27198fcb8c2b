"""Command-line entry point.

    identity-evo simulate --config run.cfg --out results/ --seed 42 --threads 4
    identity-evo analyze-game --phi 0.5
    identity-evo phi --b 0.1 --samples 1000000
    identity-evo plot-data results/median.csv --out panels/

Config files are flat ``key = value`` lines; ``#`` starts a comment. Values
given on the command line override the file, which overrides the defaults.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import game_analysis, harness
from .harness import SimConfig, SimulationError

SCHEMA_VERSION = 1
RAW_CSV = "raw.csv"
MEDIAN_CSV = "median.csv"
MANIFEST = "manifest.json"

# config-file key -> SimConfig field
CONFIG_KEYS = {
    "agents": "N",
    "segment_length": "l",
    "periods": "periods",
    "replications": "replications",
    "p_mut": "p_mut",
    "p_cross": "p_cross",
    "bin_size": "b",
    "eps_class": "eps_class",
    "classification": "classification",
    "rounds": "R",
    "init_policy": "init_policy",
    "seed": "master_seed",
    "mode": "mode",
}
_MODE_ALIASES = {"analytic": "analytic_binary", "montecarlo": "monte_carlo"}

PANELS = {
    "shares": ("panel_identity_shares.csv", ("gen", "prop_zero", "prop_one", "prop_nonbinary")),
    "matching": ("panel_matching_probability.csv", ("gen", "match_prob")),
    "unmatched": ("panel_unmatched.csv", ("gen", "unmatched")),
}


class ConfigError(ValueError):
    pass


def tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _field_types():
    return {f.name: f.type for f in fields(SimConfig)}


def _coerce(key: str, raw: str):
    name = CONFIG_KEYS[key]
    kind = _field_types()[name]
    text = raw.strip()
    if name == "mode":
        return _MODE_ALIASES.get(text, text)
    try:
        if kind == "int":
            return int(text, 0)
        if kind == "float":
            return float(text)
    except ValueError:
        raise ConfigError(f"config key '{key}': cannot parse {raw!r} as {kind}") from None
    return text


def parse_config_text(text: str, origin: str = "<config>") -> dict:
    """Parse ``key = value`` lines into config-key -> typed value."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{origin}:{lineno}: unknown config key '{key}'")
        values[key] = _coerce(key, raw)
    return values


def resolve_config(file_values: dict, overrides: dict):
    """Merge defaults, file values and overrides; returns (SimConfig, sources)."""
    defaults = SimConfig()
    merged, sources = {}, {}
    for key, name in CONFIG_KEYS.items():
        if overrides.get(key) is not None:
            merged[name], sources[key] = overrides[key], "cli"
        elif key in file_values:
            merged[name], sources[key] = file_values[key], "file"
        else:
            merged[name], sources[key] = getattr(defaults, name), "default"
    try:
        config = SimConfig(**merged)
    except ValueError as exc:
        raise ConfigError(_name_offender(str(exc))) from None
    return config, sources


def _name_offender(message: str) -> str:
    # SimConfig reports field names; translate them back to config keys
    for key, name in CONFIG_KEYS.items():
        if f"{name}=" in message or message.startswith(f"{name} "):
            return f"invalid value for '{key}' ({name}): {message}"
    return message


def config_as_keys(config: SimConfig) -> dict:
    values = asdict(config)
    return {key: values[name] for key, name in CONFIG_KEYS.items()}


@dataclass
class RunManifest:
    config: dict
    sources: dict
    tool_version: str
    master_seed: int
    started_at: str
    finished_at: str
    schema_version: int = SCHEMA_VERSION
    threads: int = 1
    outputs: tuple = (RAW_CSV, MEDIAN_CSV)

    def to_json(self) -> str:
        data = asdict(self)
        data["outputs"] = list(self.outputs)
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        data = json.loads(text)
        data["outputs"] = tuple(data["outputs"])
        return cls(**data)

    def sim_config(self) -> SimConfig:
        return SimConfig(**{CONFIG_KEYS[k]: v for k, v in self.config.items()})


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def cmd_simulate(args) -> int:
    file_values = {}
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            print(f"error: cannot read config {path}: {exc}", file=sys.stderr)
            return 2
        file_values = parse_config_text(text, str(path))
    overrides = {
        "seed": args.seed,
        "periods": args.periods,
        "agents": args.agents,
        "replications": args.replications,
        "bin_size": args.bin_size,
        "p_mut": args.pmut,
        "p_cross": args.pcross,
        "mode": _MODE_ALIASES.get(args.mode, args.mode) if args.mode else None,
        "classification": args.classification,
        "eps_class": args.eps_class,
        "rounds": args.rounds,
        "init_policy": args.init_policy,
    }
    config, sources = resolve_config(file_values, overrides)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    started = _now()
    try:
        results = harness.run_replications(config, threads=args.threads)
    except SimulationError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3
    harness.write_raw_csv(out / RAW_CSV, results.raw)
    harness.write_median_csv(out / MEDIAN_CSV, results.median)
    manifest = RunManifest(
        config=config_as_keys(config),
        sources=sources,
        tool_version=tool_version(),
        master_seed=config.master_seed,
        started_at=started,
        finished_at=_now(),
        threads=args.threads,
    )
    (out / MANIFEST).write_text(manifest.to_json())
    print(f"wrote {out / RAW_CSV}, {out / MEDIAN_CSV}, {out / MANIFEST}")
    return 0


def cmd_analyze_game(args) -> int:
    if not 0.0 <= args.phi <= 1.0:
        print(f"error: phi must lie in [0, 1], got {args.phi}", file=sys.stderr)
        return 2
    summary = game_analysis.analysis_summary(args.phi, args.k_max)
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
    else:
        print(game_analysis.format_report(summary))
    return 0


def cmd_phi(args) -> int:
    if not 0.0 <= args.b <= 1.0:
        print(f"error: bin size must lie in [0, 1], got {args.b}", file=sys.stderr)
        return 2
    if args.samples < 1:
        print(f"error: samples must be >= 1, got {args.samples}", file=sys.stderr)
        return 2
    rng = np.random.default_rng(args.seed)
    est, se = game_analysis.compute_phi_with_error(args.b, args.samples, rng)
    print(f"phi({args.b!r}) = {est!r} +/- {se!r}  (closed form 2b - b^2 = {game_analysis.phi_closed_form(args.b)!r})")
    return 0


def cmd_plot_data(args) -> int:
    src = Path(args.median_csv)
    try:
        with src.open(newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            rows = list(reader)
    except OSError as exc:
        print(f"error: cannot read {src}: {exc}", file=sys.stderr)
        return 2
    missing = [c for c in harness.MEDIAN_COLUMNS if c not in header]
    if missing:
        print(
            f"error: {src} is missing columns {', '.join(missing)}; "
            f"expected schema: {','.join(harness.MEDIAN_COLUMNS)}",
            file=sys.stderr,
        )
        return 2
    wanted = [p.strip() for p in args.panels.split(",") if p.strip()]
    unknown = [p for p in wanted if p not in PANELS]
    if unknown:
        print(f"error: unknown panels {unknown}; choose from {sorted(PANELS)}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in wanted:
        filename, columns = PANELS[name]
        with (out / filename).open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([row[c] for c in columns])
    print(f"wrote {len(wanted)} panel files to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="identity-evo", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run replications and write raw/median CSV plus a manifest")
    sim.add_argument("--config", help="key = value config file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    sim.add_argument("--threads", type=int, default=1, help="worker threads; results do not depend on it")
    sim.add_argument("--periods", type=int)
    sim.add_argument("--agents", type=int, help="population size N (even)")
    sim.add_argument("--replications", type=int)
    sim.add_argument("--bin-size", type=float, help="nonbinary preference bin b")
    sim.add_argument("--pmut", type=float)
    sim.add_argument("--pcross", type=float)
    sim.add_argument("--mode", choices=["analytic", "montecarlo"], help="fitness backend")
    sim.add_argument("--classification", choices=["support", "threshold"])
    sim.add_argument("--eps-class", type=float)
    sim.add_argument("--rounds", type=int, help="Monte Carlo matching rounds per generation")
    sim.add_argument("--init-policy", choices=["binary_origin", "uniform_random"])
    sim.set_defaults(func=cmd_simulate)

    game = sub.add_parser("analyze-game", help="equilibrium report for the 2x2 stage game")
    game.add_argument("--phi", type=float, required=True)
    game.add_argument("--k-max", type=int, default=1000)
    game.add_argument("--json", action="store_true", help="print the structured summary instead")
    game.set_defaults(func=cmd_analyze_game)

    phi = sub.add_parser("phi", help="Monte Carlo estimate of the nonbinary match probability")
    phi.add_argument("--b", type=float, required=True)
    phi.add_argument("--samples", type=int, default=1_000_000)
    phi.add_argument("--seed", type=int, default=0)
    phi.set_defaults(func=cmd_phi)

    plot = sub.add_parser("plot-data", help="split a median CSV into per-panel series")
    plot.add_argument("median_csv")
    plot.add_argument("--out", required=True)
    plot.add_argument("--panels", default="shares,matching,unmatched")
    plot.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
