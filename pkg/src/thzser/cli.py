"""Experiment runner: config parsing, sweeps, CSV output and plots.

Config files are flat ``key = value`` text with ``#`` comments.  Recognized
keys and their defaults:

    mode            independent | fgm | frank | hardware   (required)
    alpha, mu, z_hat            fading shape               (required)
    distance_m                  link distance [m]          (required)
    snr_min_db, snr_max_db, snr_step_db                    (required)
    freq_hz         0.142e12    carrier frequency [Hz]
    bandwidth_hz    4e9         noise bandwidth [Hz]
    temperature_k   300         ambient temperature [K]
    g_t_dbi         0           transmit antenna gain [dBi]
    g_r_dbi         19          receive antenna gain [dBi]
    k_abs           0           molecular absorption [1/m]
    varrho          2           path-loss exponent
    theta                       FGM parameter   (fgm mode)
    lambda                      Frank parameter (frank mode)
    kappa_t, kappa_r            distortion levels (hardware mode)
    delta, beta     1/sqrt(2)   symbol coordinates
    trials          1000000     Monte Carlo trials per SNR point
    seed            1           master seed
    emit_asymptotic false       also tabulate the high-SNR approximation

The CSV written by ``run`` always carries the header

    snr_db,ser_theory,ser_theory_independent_assumption,ser_sim,ci_low,ci_high,ser_asymptotic

with unused columns left empty.  Multi-series outputs (the five-curve
``fig4`` preset) repeat blocks of rows separated by ``# series: <label>``
comment lines under the single header.

The environment variable ``THZ_SER_THREADS`` caps the simulator's worker
threads (default: available parallelism); it never changes the results,
which depend only on the seed and the fixed stream count.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .channel import (AlphaMuParams, LinkBudget, NoiseConfig,
                      alpha_mu_moment, nu_for_avg_snr, pathloss_hp)
from .copula import CopulaSpec
from .effective_noise import EffNoiseScenario, HardwareImpairments
from .montecarlo import TrialConfig, run_trials
from .quadrature import NonConvergenceError
from .ser_analytic import (ConstellationGeometry, SerMethod,
                           ser_hardware_asymptotic, sweep)
from .montecarlo import _splitmix64

__all__ = [
    "ExperimentConfig",
    "load_config",
    "write_config",
    "run_experiment",
    "emit_plot",
    "main",
    "CSV_HEADER",
    "PRESETS",
]

CSV_HEADER = ("snr_db,ser_theory,ser_theory_independent_assumption,"
              "ser_sim,ci_low,ci_high,ser_asymptotic")

MODES = ("independent", "fgm", "frank", "hardware")

N_STREAMS = 8


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a mode, a fading row, a link, and an SNR grid."""

    mode: str
    alpha: float
    mu: float
    z_hat: float
    distance_m: float
    snr_min_db: float
    snr_max_db: float
    snr_step_db: float
    freq_hz: float = 0.142e12
    bandwidth_hz: float = 4e9
    temperature_k: float = 300.0
    g_t_dbi: float = 0.0
    g_r_dbi: float = 19.0
    k_abs: float = 0.0
    varrho: float = 2.0
    theta: float | None = None
    lam: float | None = None
    kappa_t: float | None = None
    kappa_r: float | None = None
    delta: float = 1.0 / math.sqrt(2.0)
    beta: float = 1.0 / math.sqrt(2.0)
    trials: int = 1_000_000
    seed: int = 1
    emit_asymptotic: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"config key 'mode': must be one of {MODES}, "
                             f"got {self.mode!r}")
        if self.snr_step_db <= 0.0:
            raise ValueError("config key 'snr_step_db': must be positive")
        if self.trials < 1:
            raise ValueError("config key 'trials': must be >= 1")
        if self.mode == "fgm":
            if self.theta is None:
                raise ValueError("config key 'theta': required for fgm mode")
            if not -1.0 <= self.theta <= 1.0:
                raise ValueError("config key 'theta': must lie in [-1, 1], "
                                 f"got {self.theta}")
        if self.mode == "frank":
            if self.lam is None:
                raise ValueError("config key 'lambda': required for frank mode")
            if self.lam == 0.0:
                raise ValueError("config key 'lambda': must be nonzero")
        if self.mode == "hardware" and (self.kappa_t is None or self.kappa_r is None):
            raise ValueError("config keys 'kappa_t'/'kappa_r': required for "
                             "hardware mode")

    def snr_grid(self) -> list[float]:
        n = int(math.floor((self.snr_max_db - self.snr_min_db)
                           / self.snr_step_db + 1e-9)) + 1
        return [self.snr_min_db + i * self.snr_step_db for i in range(n)]

    def fading(self) -> AlphaMuParams:
        return AlphaMuParams(alpha=self.alpha, mu=self.mu, z_hat=self.z_hat)

    def noise(self) -> NoiseConfig:
        return NoiseConfig.from_thermal(self.temperature_k, self.bandwidth_hz)

    def geometry(self) -> ConstellationGeometry:
        return ConstellationGeometry(delta=self.delta, beta=self.beta)

    def copula(self) -> CopulaSpec:
        if self.mode == "fgm":
            return CopulaSpec.fgm(self.theta)
        if self.mode == "frank":
            return CopulaSpec.frank(self.lam)
        return CopulaSpec.independent()

    def hardware(self) -> HardwareImpairments | None:
        if self.mode == "hardware":
            return HardwareImpairments(kappa_t=self.kappa_t, kappa_r=self.kappa_r)
        return None

    def scenario(self, nu: float = 1.0) -> EffNoiseScenario:
        return EffNoiseScenario(alpha_mu=self.fading(), nu=nu,
                                sigma2=self.noise().sigma2,
                                copula=self.copula(), hardware=self.hardware())


# Config-file key -> dataclass field (only 'lambda' differs, being a keyword).
_KEY_TO_FIELD = {f.name: f.name for f in fields(ExperimentConfig)}
_KEY_TO_FIELD["lambda"] = "lam"
del _KEY_TO_FIELD["lam"]
_REQUIRED = ("mode", "alpha", "mu", "z_hat", "distance_m",
             "snr_min_db", "snr_max_db", "snr_step_db")
_FLOAT_OPTIONAL = ("theta", "lam", "kappa_t", "kappa_r")


def _parse_value(key: str, field_name: str, raw: str):
    if field_name == "mode":
        return raw
    if field_name in ("trials", "seed"):
        try:
            return int(float(raw))
        except ValueError as exc:
            raise ValueError(f"config key '{key}': expected integer, "
                             f"got {raw!r}") from exc
    if field_name == "emit_asymptotic":
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"config key '{key}': expected boolean, got {raw!r}")
    try:
        return float(raw)
    except ValueError as exc:
        raise ValueError(f"config key '{key}': expected number, got {raw!r}") from exc


def load_config(path) -> ExperimentConfig:
    """Parse and validate a flat key = value config file."""
    path = Path(path)
    text = path.read_text()
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _KEY_TO_FIELD:
            raise ValueError(f"{path}:{lineno}: unknown config key '{key}'")
        field_name = _KEY_TO_FIELD[key]
        if field_name in values:
            raise ValueError(f"{path}:{lineno}: duplicate config key '{key}'")
        values[field_name] = _parse_value(key, field_name, raw)
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ValueError(f"{path}: missing required config keys: "
                         + ", ".join(f"'{k}'" for k in missing))
    return ExperimentConfig(**values)


def write_config(cfg: ExperimentConfig, path) -> None:
    """Serialize a config so load_config reads back an equal object."""
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        key = "lambda" if f.name == "lam" else f.name
        if isinstance(value, bool):
            lines.append(f"{key} = {'true' if value else 'false'}")
        elif isinstance(value, float):
            lines.append(f"{key} = {value!r}")
        else:
            lines.append(f"{key} = {value}")
    Path(path).write_text("\n".join(lines) + "\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    return "%.9g" % x


def _theory_methods(mode: str):
    if mode == "independent":
        return SerMethod.INDEPENDENT, None
    if mode in ("fgm", "frank"):
        return SerMethod.COPULA, SerMethod.INDEPENDENT
    return SerMethod.HARDWARE, None


@dataclass
class _SeriesResult:
    label: str
    rows: list[list[str]]
    failures: list[str] = field(default_factory=list)


def _run_series(cfg: ExperimentConfig, label: str, progress=None) -> _SeriesResult:
    """Compute theory + simulation for one config; one CSV row per SNR point."""
    grid = cfg.snr_grid()
    geometry = cfg.geometry()
    scenario = cfg.scenario(nu=1.0)
    method, mismatch = _theory_methods(cfg.mode)

    theory = sweep(scenario, geometry, grid, method)
    mism = None
    if mismatch is not None:
        indep_scenario = replace(scenario, copula=CopulaSpec.independent())
        mism = sweep(indep_scenario, geometry, grid, mismatch)

    failures = [f"snr {pt.snr_db:g} dB: {pt.error}"
                for pt in theory if pt.error is not None]
    if mism:
        failures += [f"snr {pt.snr_db:g} dB (independent overlay): {pt.error}"
                     for pt in mism if pt.error is not None]

    rows = []
    sigma2 = cfg.noise().sigma2
    for idx, (snr_db, th) in enumerate(zip(grid, theory)):
        nu = nu_for_avg_snr(snr_db, cfg.fading(), sigma2)
        scen = replace(scenario, nu=nu)
        trial_cfg = TrialConfig(
            scenario=scen, geometry=geometry, n_trials=cfg.trials,
            master_seed=_splitmix64(cfg.seed ^ (0x5E50 + idx)),
            n_streams=N_STREAMS,
        )
        sim = run_trials(trial_cfg)
        asym = None
        if cfg.emit_asymptotic and cfg.mode == "hardware":
            asym = ser_hardware_asymptotic(scen, geometry)
        row = [
            _fmt(snr_db),
            _fmt(th.ser) if not math.isnan(th.ser) else "",
            _fmt(mism[idx].ser) if mism and not math.isnan(mism[idx].ser) else "",
            _fmt(sim.ser_hat),
            _fmt(sim.ci_low),
            _fmt(sim.ci_high),
            _fmt(asym),
        ]
        rows.append(row)
        if progress is not None:
            progress(label, row)
    return _SeriesResult(label=label, rows=rows, failures=failures)


def _write_csv(series: list[_SeriesResult], out_path) -> None:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    multi = len(series) > 1
    for sr in series:
        if multi:
            buf.write(f"# series: {sr.label}\n")
        for row in sr.rows:
            buf.write(",".join(row) + "\n")
    Path(out_path).write_text(buf.getvalue())


def _print_summary(cfg: ExperimentConfig, series: list[_SeriesResult]) -> None:
    lb_pt = transmit_power_for_snr(cfg, cfg.snr_min_db)
    print(f"mode={cfg.mode}  alpha={cfg.alpha:g} mu={cfg.mu:g} "
          f"z_hat={cfg.z_hat:g}  d={cfg.distance_m:g} m  "
          f"(p_t at {cfg.snr_min_db:g} dB: {lb_pt:.3e} W)")
    head = f"{'snr_db':>8} {'theory':>12} {'indep.':>12} {'sim':>12} {'ci_low':>12} {'ci_high':>12} {'asym':>12}"
    for sr in series:
        if len(series) > 1:
            print(f"-- series {sr.label}")
        print(head)
        for row in sr.rows:
            cells = [c if c else "-" for c in row]
            print(f"{cells[0]:>8} {cells[1]:>12} {cells[2]:>12} {cells[3]:>12} "
                  f"{cells[4]:>12} {cells[5]:>12} {cells[6]:>12}")


def transmit_power_for_snr(cfg: ExperimentConfig, snr_db: float) -> float:
    """Transmit power that realizes the requested average SNR on this link."""
    sigma2 = cfg.noise().sigma2
    nu = nu_for_avg_snr(snr_db, cfg.fading(), sigma2)
    probe = LinkBudget(p_t=1.0, g_t_dbi=cfg.g_t_dbi, g_r_dbi=cfg.g_r_dbi,
                       f_hz=cfg.freq_hz, d_m=cfg.distance_m, k_abs=cfg.k_abs,
                       varrho=cfg.varrho)
    return (nu / (math.sqrt(probe.g_t * probe.g_r) * pathloss_hp(probe))) ** 2


def run_experiment(cfg: ExperimentConfig, out_path, quiet: bool = False) -> int:
    """Run one experiment and write its CSV; nonzero on any failed point."""
    series = [_run_series(cfg, label=_series_label(cfg))]
    _write_csv(series, out_path)
    if not quiet:
        _print_summary(cfg, series)
    return _report_failures(series)


def _report_failures(series: list[_SeriesResult]) -> int:
    status = 0
    for sr in series:
        for msg in sr.failures:
            print(f"error: series {sr.label}: {msg}", file=sys.stderr)
            status = 1
    return status


def _series_label(cfg: ExperimentConfig) -> str:
    return f"alpha={cfg.alpha:g} mu={cfg.mu:g}"


def emit_plot(csv_path, out_path) -> int:
    """Render a CSV as log-SER vs SNR; one line per populated column."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    blocks = _read_blocks(csv_path)
    if not blocks:
        raise ValueError(f"{csv_path}: no data rows found")

    column_labels = {
        "ser_theory": "theory",
        "ser_theory_independent_assumption": "theory (independent assumption)",
        "ser_sim": "simulation",
        "ser_asymptotic": "asymptotic",
    }
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for label, rows in blocks:
        snr = [float(r["snr_db"]) for r in rows]
        for col, col_label in column_labels.items():
            ys, xs = [], []
            for x, r in zip(snr, rows):
                value = r.get(col, "")
                if value:
                    v = float(value)
                    if v > 0.0:
                        xs.append(x)
                        ys.append(v)
            if xs:
                name = col_label if not label else f"{col_label} [{label}]"
                style = "--" if col == "ser_asymptotic" else \
                    ("o" if col == "ser_sim" else "-")
                ax.semilogy(xs, ys, style, label=name, markersize=4)
    ax.set_xlabel("SNR [dB]")
    ax.set_ylabel("SER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return 0


def _read_blocks(csv_path):
    """Split a results CSV into (label, rows) blocks on '# series:' comments."""
    text = Path(csv_path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ValueError(f"{csv_path}: empty file")
    header = lines[0].split(",")
    if "snr_db" not in header:
        raise ValueError(f"{csv_path}: missing snr_db column")
    blocks: list[tuple[str, list[dict]]] = []
    current_label = ""
    current_rows: list[dict] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#"):
            if current_rows:
                blocks.append((current_label, current_rows))
                current_rows = []
            current_label = line.lstrip("#").strip()
            if current_label.startswith("series:"):
                current_label = current_label[len("series:"):].strip()
            continue
        cells = next(csv.reader([line]))
        current_rows.append(dict(zip(header, cells)))
    if current_rows:
        blocks.append((current_label, current_rows))
    return blocks


PRESETS = {
    "fig1": ["fig1.cfg"],
    "fig2": ["fig2.cfg"],
    "fig3": ["fig3.cfg"],
    "fig4": ["fig4_1.cfg", "fig4_2.cfg", "fig4_3.cfg", "fig4_4.cfg",
             "fig4_5.cfg"],
}


def preset_configs(name: str) -> list[ExperimentConfig]:
    """Load the bundled config(s) behind a preset name."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfgs = []
    for fname in PRESETS[name]:
        ref = resources.files("thzser.presets").joinpath(fname)
        with resources.as_file(ref) as p:
            cfgs.append(load_config(p))
    return cfgs


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.trials is not None:
        updates["trials"] = args.trials
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.snr is not None:
        try:
            lo, step, hi = (float(p) for p in args.snr.split(":"))
        except ValueError as exc:
            raise ValueError("--snr expects min:step:max") from exc
        updates.update(snr_min_db=lo, snr_step_db=step, snr_max_db=hi)
    return replace(cfg, **updates) if updates else cfg


def run_preset(name: str, out_path, args=None, quiet: bool = False) -> int:
    cfgs = preset_configs(name)
    if args is not None:
        cfgs = [_apply_overrides(c, args) for c in cfgs]
    series = []
    for cfg in cfgs:
        series.append(_run_series(cfg, label=_series_label(cfg)))
        if not quiet:
            _print_summary(cfg, series[-1:])
    _write_csv(series, out_path)
    return _report_failures(series)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="thz-ser",
        description="Symbol-error rates for zero-forcing detection over "
                    "alpha-mu fading: analytic sweeps plus Monte Carlo "
                    "validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a config and write a CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    _add_overrides(p_run)

    p_plot = sub.add_parser("plot", help="plot a results CSV")
    p_plot.add_argument("--in", dest="csv_in", required=True)
    p_plot.add_argument("--out", required=True)

    p_preset = sub.add_parser("preset", help="run a bundled figure preset")
    p_preset.add_argument("--name", required=True, choices=sorted(PRESETS))
    p_preset.add_argument("--out", required=True)
    _add_overrides(p_preset)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = _apply_overrides(load_config(args.config), args)
            return run_experiment(cfg, args.out)
        if args.command == "plot":
            return emit_plot(args.csv_in, args.out)
        if args.command == "preset":
            return run_preset(args.name, args.out, args)
    except (ValueError, OSError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _add_overrides(p) -> None:
    p.add_argument("--trials", type=int, default=None,
                   help="override Monte Carlo trials per SNR point")
    p.add_argument("--seed", type=int, default=None,
                   help="override the master seed")
    p.add_argument("--snr", default=None,
                   help="override the SNR grid as min:step:max [dB]")


if __name__ == "__main__":
    sys.exit(main())
