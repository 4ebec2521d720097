"""Command-line front end: scenario configs, execution, artifact emission.

Scenarios: simulate, gauge-check, verify-inequalities, imethod-study,
gwp-budget, threshold-sweep.  Configs are flat ``key = value`` text files
(dotted keys, ``#`` comments, whitespace-separated lists) or JSON files
with the same keys, possibly nested.  Every run emits a manifest echoing
the resolved config, the tool version, the seed, and per-table digests;
rerunning a config with the same seed reproduces each CSV byte for byte.

Exit codes: 0 success, 2 config error, 3 precondition violation,
4 drift/blowup abort (partial artifacts are still written).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .apriori import (
    check_gn_interp,
    check_gn_sextic,
    h1_bound,
    kinetic_l4_bound,
    l4_bound,
    momentum_lower_bound,
    phase_modulation_residual,
)
from .datum import parse_datum, random_decaying_field, probe_field_suite, save_field
from .errors import AbortError, ConfigError, PreconditionError
from .evolution import DIAGNOSTIC_COLUMNS, SimConfig, evolve
from .functionals import conserved_set, mass
from .gauge import gauge_forward, gauge_inverse
from .imethod import (
    gwp_budget,
    make_multiplier,
    modified_energy_drift_study,
    momentum_commutator_study,
    operator_norm_study,
)
from .reporting import write_csv, write_manifest
from .spectral import Field, GaugeFrame, derivative, lp_norm, make_grid

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_ABORT = 4

SCENARIOS = (
    "simulate",
    "gauge-check",
    "verify-inequalities",
    "imethod-study",
    "gwp-budget",
    "threshold-sweep",
)

FOUR_PI = 4.0 * math.pi

_MISSING = object()


@dataclass
class ScenarioConfig:
    """Resolved scenario configuration (flat dotted keys)."""

    scenario: str
    options: dict
    out_dir: Path
    seed: int
    workers: int
    base_dir: Path

    def get(self, key: str, default=_MISSING):
        if key in self.options:
            return self.options[key]
        if default is _MISSING:
            raise ConfigError(f"scenario {self.scenario!r} requires config key {key!r}")
        return default

    def group(self, prefix: str) -> dict:
        cut = len(prefix) + 1
        return {k[cut:]: v for k, v in self.options.items() if k.startswith(prefix + ".")}

    def echo(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "workers": self.workers,
            "out_dir": str(self.out_dir),
            "options": {k: _jsonable(v) for k, v in sorted(self.options.items())},
        }


def _jsonable(value):
    if isinstance(value, complex):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _parse_scalar(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def _flatten(prefix: str, value, into: dict) -> None:
    if isinstance(value, dict):
        for key, sub in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), sub, into)
    else:
        into[prefix] = value


def load_config_file(path: str | Path) -> dict:
    """Parse a key = value or JSON config into a flat dotted-key dict."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.lstrip()
    options: dict = {}
    if stripped.startswith("{"):
        try:
            _flatten("", json.loads(text), options)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config {path}: {exc}") from exc
        return options
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = body.partition("=")
        tokens = raw.split()
        if not tokens:
            raise ConfigError(f"{path}:{lineno}: missing value for {key.strip()!r}")
        parsed = [_parse_scalar(tok) for tok in tokens]
        options[key.strip()] = parsed[0] if len(parsed) == 1 else parsed
    return options


def _as_list(value) -> list:
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _grid_from(cfg: ScenarioConfig):
    return make_grid(float(cfg.get("grid.L")), int(cfg.get("grid.n")))


def _sim_config(cfg: ScenarioConfig, frame: GaugeFrame) -> SimConfig:
    return SimConfig(
        dt=float(cfg.get("sim.dt")),
        t_end=float(cfg.get("sim.t_end")),
        frame=frame,
        dealias=bool(cfg.get("sim.dealias", True)),
        record_stride=int(cfg.get("sim.record_stride", 1)),
        drift_tol=float(cfg.get("sim.drift_tol", 1e-6)),
        max_amplitude=float(cfg.get("sim.max_amplitude", 1e6)),
    )


def _datum_spec(cfg: ScenarioConfig) -> dict:
    spec = cfg.group("datum")
    if "family" not in spec:
        raise ConfigError("missing datum.family")
    if spec["family"] == "file":
        spec["path"] = str((cfg.base_dir / str(spec["path"])).resolve())
    return spec


def _trajectory_rows(traj) -> list[tuple]:
    d = traj.diagnostics
    return [
        (traj.times[i], *[d[c][i] for c in DIAGNOSTIC_COLUMNS])
        for i in range(len(traj.times))
    ]


# ---------------------------------------------------------------------------
# scenario: simulate


def run_simulate(cfg: ScenarioConfig) -> int:
    grid = _grid_from(cfg)
    frame = GaugeFrame(str(cfg.get("sim.frame", "gauged")))
    datum = parse_datum(grid, _datum_spec(cfg))
    if frame is GaugeFrame.GAUGED and datum.frame is GaugeFrame.ORIGINAL:
        datum = gauge_forward(datum)
    elif frame is GaugeFrame.ORIGINAL and datum.frame is GaugeFrame.GAUGED:
        datum = gauge_inverse(datum)
    sim = _sim_config(cfg, frame)
    monitor = None
    monitor_cutoff = cfg.get("sim.monitor_cutoff", None)
    if monitor_cutoff is not None:
        monitor = make_multiplier(float(monitor_cutoff), grid)
    traj = evolve(datum, sim, monitor=monitor)

    table = write_csv(
        cfg.out_dir / "diagnostics.csv", ("t",) + DIAGNOSTIC_COLUMNS, _trajectory_rows(traj)
    )
    if traj.snapshots:
        save_field(cfg.out_dir / "field_final.npz", traj.final_field)
    write_manifest(
        cfg.out_dir,
        cfg.scenario,
        cfg.echo(),
        [table],
        __version__,
        extra={"abort_reason": traj.abort_reason, "records": len(traj.times)},
    )
    return EXIT_ABORT if traj.aborted else EXIT_OK


# ---------------------------------------------------------------------------
# scenario: gauge-check


def _gauge_check_chunk(payload) -> list[tuple]:
    grid_l, grid_n, seed, start, stop = payload
    grid = make_grid(grid_l, grid_n)
    rows = []
    for trial in range(start, stop):
        rng = np.random.default_rng([seed, trial])
        u = random_decaying_field(grid, rng, frame=GaugeFrame.ORIGINAL)
        v = gauge_forward(u)
        back = gauge_inverse(v)
        scale = max(1.0, float(np.max(np.abs(u.samples))))
        roundtrip = float(np.max(np.abs(back.samples - u.samples))) / scale
        modulus = float(np.max(np.abs(np.abs(v.samples) - np.abs(u.samples)))) / scale
        a = conserved_set(u)
        b = conserved_set(v)
        rows.append(
            (
                trial,
                roundtrip,
                modulus,
                abs(a.mass - b.mass) / max(1.0, abs(a.mass)),
                abs(a.momentum - b.momentum) / max(1.0, abs(a.momentum)),
                abs(a.energy - b.energy) / max(1.0, abs(a.energy)),
            )
        )
    return rows


def run_gauge_check(cfg: ScenarioConfig) -> int:
    trials = int(cfg.get("trials", 1000))
    payloads = [
        (float(cfg.get("grid.L")), int(cfg.get("grid.n")), cfg.seed, start, stop)
        for start, stop in _chunks(trials, cfg.workers)
    ]
    rows = _fan_out(_gauge_check_chunk, payloads, cfg.workers)

    columns = ("roundtrip", "modulus", "mass_corr", "momentum_corr", "energy_corr")
    tolerances = (1e-12, 1e-13, 1e-8, 1e-8, 1e-8)
    worst = [max(row[i + 1] for row in rows) for i in range(len(columns))]
    summary = write_csv(
        cfg.out_dir / "gauge_summary.csv",
        ("check", "trials", "worst", "tolerance", "pass"),
        [
            (name, trials, worst[i], tolerances[i], worst[i] <= tolerances[i])
            for i, name in enumerate(columns)
        ],
    )
    detail = write_csv(cfg.out_dir / "gauge_trials.csv", ("trial",) + columns, rows)
    write_manifest(cfg.out_dir, cfg.scenario, cfg.echo(), [summary, detail], __version__)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenario: verify-inequalities


def _inequality_chunk(payload) -> list[tuple]:
    grid_l, grid_n, seed, start, stop = payload
    grid = make_grid(grid_l, grid_n)
    rows = []
    for trial in range(start, stop):
        rng = np.random.default_rng([seed, trial])
        free = random_decaying_field(grid, rng, target_mass=rng.uniform(0.1, 8.0 * math.pi))
        for rep in (
            check_gn_sextic(free),
            check_gn_interp(free),
            momentum_lower_bound(free),
            kinetic_l4_bound(free),
        ):
            rows.append((trial, rep.label, rep.lhs, rep.rhs, rep.slack, rep.satisfied))

        sub = random_decaying_field(grid, rng, target_mass=rng.uniform(0.1, 0.95 * FOUR_PI))
        l2 = lp_norm(sub, 2.0)
        cs = conserved_set(sub)
        quartic = lp_norm(sub, 4.0) ** 8
        l4b = l4_bound(l2, cs.momentum, cs.energy)
        rows.append((trial, "l4-bound", quartic, l4b, l4b - quartic, quartic <= l4b + 1e-9))
        kin = lp_norm(derivative(sub), 2.0) ** 2
        h1b = h1_bound(l2, cs.momentum, cs.energy)
        rows.append((trial, "h1-bound", kin, h1b, h1b - kin, kin <= h1b + 1e-9))

        step = math.pi / grid.half_length
        alpha = float(rng.integers(-200, 201)) * step
        residual = phase_modulation_residual(sub, alpha)
        rows.append((trial, "modulation-identity", residual, 1e-10, 1e-10 - residual, residual <= 1e-10))
    return rows


def run_verify_inequalities(cfg: ScenarioConfig) -> int:
    trials = int(cfg.get("trials", 10000))
    payloads = [
        (float(cfg.get("grid.L")), int(cfg.get("grid.n")), cfg.seed, start, stop)
        for start, stop in _chunks(trials, cfg.workers)
    ]
    rows = _fan_out(_inequality_chunk, payloads, cfg.workers)

    slacks = write_csv(
        cfg.out_dir / "slacks.csv",
        ("trial", "label", "lhs", "rhs", "slack", "satisfied"),
        rows,
    )
    labels = sorted({row[1] for row in rows})
    summary_rows = []
    for label in labels:
        mine = [row for row in rows if row[1] == label]
        violations = sum(1 for row in mine if not row[5])
        worst = min(row[4] for row in mine)
        worst_trial = min(mine, key=lambda row: row[4])[0]
        summary_rows.append((label, len(mine), violations, worst, worst_trial))
    summary = write_csv(
        cfg.out_dir / "summary.csv",
        ("label", "trials", "violations", "worst_slack", "worst_trial"),
        summary_rows,
    )
    write_manifest(
        cfg.out_dir,
        cfg.scenario,
        cfg.echo(),
        [slacks, summary],
        __version__,
        extra={"total_violations": int(sum(r[2] for r in summary_rows))},
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenario: imethod-study


def run_imethod_study(cfg: ScenarioConfig) -> int:
    studies = [str(s) for s in _as_list(cfg.get("studies", ["operator-norm", "commutator"]))]
    tables = []
    extra: dict = {}
    if "operator-norm" in studies or "commutator" in studies:
        grid = _grid_from(cfg)
        cutoffs = [float(c) for c in _as_list(cfg.get("sweep.cutoffs", [16, 64, 256, 1024]))]
        count = int(cfg.get("sweep.fields", 100))
        fields = probe_field_suite(grid, np.random.default_rng(cfg.seed), count)
        if "operator-norm" in studies:
            study = operator_norm_study(fields, cutoffs)
            tables.append(
                write_csv(
                    cfg.out_dir / "opnorm_rows.csv",
                    ("field", "cutoff", "lower_ratio", "upper_ratio"),
                    [(r.field_index, r.cutoff, r.lower_ratio, r.upper_ratio) for r in study.rows],
                )
            )
            tables.append(
                write_csv(
                    cfg.out_dir / "opnorm_summary.csv",
                    ("cutoff", "sup_lower_ratio", "sup_upper_ratio"),
                    [(c, study.sup_lower[c], study.sup_upper[c]) for c in cutoffs],
                )
            )
            extra["opnorm_slope_lower"] = study.slope_lower
            extra["opnorm_slope_upper"] = study.slope_upper
        if "commutator" in studies:
            study = momentum_commutator_study(fields, cutoffs)
            tables.append(
                write_csv(
                    cfg.out_dir / "commutator_rows.csv",
                    ("field", "cutoff", "lhs", "rhs", "ratio", "term_quadratic", "term_quartic"),
                    [
                        (r.field_index, r.cutoff, r.lhs, r.rhs, r.ratio, r.term_quadratic, r.term_quartic)
                        for r in study.rows
                    ],
                )
            )
            tables.append(
                write_csv(
                    cfg.out_dir / "commutator_summary.csv",
                    ("cutoff", "sup_ratio"),
                    [(c, study.sup_ratio[c]) for c in cutoffs],
                )
            )
            extra["commutator_slope"] = study.slope
            extra["commutator_recombination_error"] = study.recombination_error
    if "energy-drift" in studies:
        grid = _grid_from(cfg)
        datum = parse_datum(grid, _datum_spec(cfg))
        if datum.frame is GaugeFrame.ORIGINAL:
            datum = gauge_forward(datum)
        sim = _sim_config(cfg, GaugeFrame.GAUGED)
        cutoffs = [float(c) for c in _as_list(cfg.get("sweep.drift_cutoffs", [64, 128, 256]))]
        study = modified_energy_drift_study(
            datum,
            cutoffs,
            float(cfg.get("drift.horizon", cfg.get("sim.t_end"))),
            sim,
            lambda_scale=float(cfg.get("drift.lambda_scale", 1.0 / 64.0)),
            local_mu=float(cfg.get("imethod.mu", 2.0)),
            local_alpha=float(cfg.get("imethod.alpha", 0.5)),
        )
        tables.append(
            write_csv(
                cfg.out_dir / "drift.csv",
                ("cutoff", "lam", "grid_points", "drift", "ei_initial", "engagement", "lifetime_hint"),
                [
                    (r.cutoff, r.lam, r.grid_points, r.drift, r.ei_initial, r.engagement, r.lifetime_hint)
                    for r in study.rows
                ],
            )
        )
        extra["local_mu"] = study.local_mu
        extra["local_alpha"] = study.local_alpha
    if not tables:
        raise ConfigError(f"no recognized studies in {studies!r}")
    write_manifest(cfg.out_dir, cfg.scenario, cfg.echo(), tables, __version__, extra=extra)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenario: gwp-budget


def run_gwp_budget(cfg: ScenarioConfig) -> int:
    if "budget.mass" in cfg.options:
        mass_sqrt = math.sqrt(float(cfg.get("budget.mass")))
    else:
        mass_sqrt = float(cfg.get("budget.mass_sqrt"))
    hhalf = float(cfg.get("budget.hhalf"))
    epsilon = float(cfg.get("budget.epsilon", 0.125))
    times = [float(t) for t in _as_list(cfg.get("budget.T"))]

    budgets = [gwp_budget(mass_sqrt, hhalf, t, epsilon) for t in times]
    payload = cfg.echo()
    payload_out = {
        "inputs": {
            "mass": mass_sqrt**2,
            "mass_sqrt": mass_sqrt,
            "hhalf": hhalf,
            "epsilon": epsilon,
            "T": times if len(times) > 1 else times[0],
        },
        "gamma0": budgets[0].gamma0,
        "eps0": budgets[0].eps0,
        "hundred_gamma0_eps0": 100.0 * budgets[0].gamma0 * budgets[0].eps0,
        "c_lambda": budgets[0].c_lambda,
        "h1_constant": budgets[0].h1_constant,
        "budgets": [
            {
                "T": b.target_time,
                "cutoff_log2": int(math.log2(b.cutoff)),
                "lam": b.lam,
                "t0": b.t0,
                "guaranteed_time": b.guaranteed_time,
            }
            for b in budgets
        ],
        "config": payload,
    }
    path = cfg.out_dir / "budget.json"
    path.write_text(json.dumps(payload_out, indent=2, sort_keys=True) + "\n")
    table = write_csv(
        cfg.out_dir / "budget_sweep.csv",
        ("T", "cutoff_log2", "lam", "t0", "guaranteed_time"),
        [
            (b.target_time, int(math.log2(b.cutoff)), b.lam, b.t0, b.guaranteed_time)
            for b in budgets
        ],
    )
    write_manifest(cfg.out_dir, cfg.scenario, cfg.echo(), [table], __version__)
    return EXIT_OK


# ---------------------------------------------------------------------------
# scenario: threshold-sweep


def _threshold_one(payload) -> tuple:
    options, seed, amplitude = payload
    grid = make_grid(float(options["grid.L"]), int(options["grid.n"]))
    datum_spec = {
        "family": "gaussian",
        "amplitude": amplitude,
        "width": float(options.get("datum.width", 1.0)),
        "center": float(options.get("datum.center", 0.0)),
        "chirp": float(options.get("datum.chirp", 0.0)),
    }
    u = parse_datum(grid, datum_spec)
    m = mass(u)
    ratio = m / FOUR_PI
    sim = SimConfig(
        dt=float(options["sim.dt"]),
        t_end=float(options["sim.t_end"]),
        frame=GaugeFrame.GAUGED,
        dealias=bool(options.get("sim.dealias", True)),
        record_stride=int(options.get("sim.record_stride", 1)),
        drift_tol=float(options.get("sim.drift_tol", 1e-6)),
        max_amplitude=float(options.get("sim.max_amplitude", 1e6)),
    )
    traj = evolve(gauge_forward(u), sim)
    d = traj.diagnostics
    ceiling_ratio = math.nan
    if m < FOUR_PI:
        ceiling_ratio = 0.0
        for i in range(len(traj.times)):
            bound = h1_bound(math.sqrt(d["mass"][i]), d["momentum"][i], d["energy"][i])
            if bound > 0:
                ceiling_ratio = max(ceiling_ratio, d["h1_seminorm"][i] ** 2 / bound)
    sup_amp = max((float(np.max(np.abs(s.samples))) for s in traj.snapshots), default=math.nan)
    if not traj.aborted:
        outcome = "completed"
    elif "blowup" in traj.abort_reason:
        outcome = "aborted-blowup"
    elif "drift" in traj.abort_reason:
        outcome = "aborted-drift"
    else:
        outcome = "aborted-nonfinite"
    t_reached = float(traj.times[-1]) if len(traj.times) else 0.0
    return (amplitude, m, ratio, outcome, t_reached, ceiling_ratio, sup_amp)


def run_threshold_sweep(cfg: ScenarioConfig) -> int:
    amplitudes = [float(a) for a in _as_list(cfg.get("sweep.amplitudes"))]
    cfg.get("sim.dt")
    cfg.get("sim.t_end")
    payloads = [(cfg.options, cfg.seed, a) for a in amplitudes]
    rows = _fan_out(_threshold_one, payloads, cfg.workers, flat=False)
    table = write_csv(
        cfg.out_dir / "threshold.csv",
        ("amplitude", "mass", "mass_over_4pi", "outcome", "t_reached", "h1_ceiling_ratio", "sup_amplitude"),
        rows,
    )
    write_manifest(cfg.out_dir, cfg.scenario, cfg.echo(), [table], __version__)
    return EXIT_OK


# ---------------------------------------------------------------------------
# worker pool


def _chunks(total: int, workers: int) -> list[tuple[int, int]]:
    pieces = max(1, min(total, workers * 4))
    size = math.ceil(total / pieces)
    return [(start, min(start + size, total)) for start in range(0, total, size)]


def _fan_out(fn, payloads, workers: int, flat: bool = True) -> list:
    """Run payloads across a process pool; results merge in payload order,
    never completion order, so the artifact stream is deterministic."""
    if workers <= 1 or len(payloads) <= 1:
        results = [fn(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, payloads))
    if flat:
        return [row for chunk in results for row in chunk]
    return results


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnls-lab",
        description="Simulation and verification lab for the derivative NLS equation",
    )
    parser.add_argument("--version", action="version", version=f"dnls-lab {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key = value or JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
    return parser


RUNNERS = {
    "simulate": run_simulate,
    "gauge-check": run_gauge_check,
    "verify-inequalities": run_verify_inequalities,
    "imethod-study": run_imethod_study,
    "gwp-budget": run_gwp_budget,
    "threshold-sweep": run_threshold_sweep,
}


def resolve_config(scenario: str, args) -> ScenarioConfig:
    options = load_config_file(args.config)
    seed = args.seed if args.seed is not None else int(options.get("seed", 0))
    out_root = os.environ.get("DNLS_LAB_OUT", "dnls-lab-runs")
    out_dir = Path(args.out) if args.out else Path(out_root) / scenario
    return ScenarioConfig(
        scenario=scenario,
        options=options,
        out_dir=out_dir,
        seed=seed,
        workers=max(1, args.workers),
        base_dir=Path(args.config).resolve().parent,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.scenario, args)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        return RUNNERS[args.scenario](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except AbortError as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
