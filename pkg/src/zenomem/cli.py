"""Experiment runner: config-file driven condition checks and sweeps.

Usage: zenomem run check|fig2|fig3|ising|custom <config.toml>
           [--output DIR] [--workers K] [--seed S]

All outputs are deterministic: CSV headers carry the tool version, the
sha256 of the raw config file and the effective seed (never a timestamp),
floats are written with 9 significant digits, and per-sample seeds are
derived as seed XOR sample index so the worker count cannot change a byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .conditions import EncodingSpec, ErrorSet, check_conditions
from .ising import (
    CouplingDistribution,
    find_pulse_time,
    realize_parity_projection,
)
from .memory import (
    MemoryProtocol,
    compute_lifetime,
    sweep_error_probabilities,
    three_qubit_protocol,
)
from .pauli import parse_pauli
from .simulator import MeasurementSchedule, NoiseModel, measurement_channel

FIG2_COLUMNS = (
    "f", "tau",
    "p_X", "p_X_stderr", "p_Y", "p_Y_stderr", "p_Z", "p_Z_stderr",
    "F",
)
FIG3_COLUMNS = ("zeta", "f", "lifetime", "crossed_flag")

_DEFAULT_FREQUENCIES = (0.0, 10.0, 100.0, 1000.0)
_DEFAULT_TIMES = tuple(np.linspace(0.05, 1.0, 20))


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


def _expect(table: dict, key: str, types, where: str, default=None, required=False):
    if key not in table:
        if required:
            raise ConfigError(f"missing required key {key!r} in [{where}]")
        return default
    value = table[key]
    if not isinstance(value, types):
        raise ConfigError(
            f"[{where}] {key} has type {type(value).__name__}, expected "
            f"{getattr(types, '__name__', types)}"
        )
    return value


def _number_list(table: dict, key: str, where: str, default=None):
    if key not in table:
        return default
    raw = table[key]
    if not isinstance(raw, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
    ):
        raise ConfigError(f"[{where}] {key} must be a list of numbers")
    return tuple(float(v) for v in raw)


def _time_grid(table: dict, where: str):
    if "times" not in table:
        return _DEFAULT_TIMES
    raw = table["times"]
    if isinstance(raw, list):
        return _number_list(table, "times", where)
    if isinstance(raw, dict):
        start = _expect(raw, "start", (int, float), f"{where}.times", required=True)
        stop = _expect(raw, "stop", (int, float), f"{where}.times", required=True)
        points = _expect(raw, "points", int, f"{where}.times", required=True)
        if points < 1:
            raise ConfigError(f"[{where}.times] points must be >= 1")
        return tuple(np.linspace(float(start), float(stop), points))
    raise ConfigError(f"[{where}] times must be a list or a start/stop/points table")


@dataclass
class ExperimentConfig:
    """Parsed and validated experiment description."""

    mode: str
    n: int = 3
    encoding: tuple[str, ...] = ("Z1*Z2", "X2*X3")
    measurements: tuple[tuple[str, ...], ...] = (("Z1", "Z2*Z3"), ("X3", "X1*X2"))
    zeta: float = 0.0
    noise_kind: str = "one_local_random"
    noise_a: float = 1.0
    noise_sampling: str = "ball"
    noise_terms: tuple[tuple[str, float], ...] = ()
    frequencies: tuple[float, ...] = _DEFAULT_FREQUENCIES
    times: tuple[float, ...] = _DEFAULT_TIMES
    zetas: tuple[float, ...] = (0.0,)
    samples: int = 200
    tau_cap: float = 500.0
    rel_tol: float = 1e-3
    ising_kind: str = "gaussian"
    ising_j0: float = 1.0
    ising_width: float = 0.05
    ising_lo: Optional[float] = None
    ising_hi: Optional[float] = None
    ising_table: tuple[tuple[float, float], ...] = ()
    sigma_pair: str = "Z1*Z2"
    window: Optional[tuple[float, float]] = None
    seed: int = 0
    workers: Optional[int] = None
    output: str = "."
    config_sha256: str = ""

    @classmethod
    def from_file(cls, path: Path, mode: str) -> "ExperimentConfig":
        raw_bytes = path.read_bytes()
        try:
            data = tomllib.loads(raw_bytes.decode("utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        cfg = cls(mode=mode, config_sha256=hashlib.sha256(raw_bytes).hexdigest())

        declared = data.get("mode")
        if declared is not None and declared != mode:
            raise ConfigError(
                f"config declares mode {declared!r} but {mode!r} was requested"
            )

        system = data.get("system", {})
        cfg.n = _expect(system, "n", int, "system", default=cfg.n)
        if cfg.n < 1:
            raise ConfigError("[system] n must be >= 1")
        if "encoding" in system:
            enc = system["encoding"]
            if not isinstance(enc, list) or not all(isinstance(s, str) for s in enc):
                raise ConfigError("[system] encoding must be a list of Pauli strings")
            cfg.encoding = tuple(enc)
        if "measurements" in system:
            meas = system["measurements"]
            if not isinstance(meas, list) or not all(
                isinstance(r, list) and all(isinstance(s, str) for s in r) for r in meas
            ):
                raise ConfigError(
                    "[system] measurements must be a list of rounds, each a list "
                    "of Pauli strings"
                )
            cfg.measurements = tuple(tuple(r) for r in meas)
        cfg.zeta = float(_expect(system, "zeta", (int, float), "system", default=cfg.zeta))

        noise = data.get("noise", {})
        cfg.noise_kind = _expect(noise, "kind", str, "noise", default=cfg.noise_kind)
        if cfg.noise_kind not in ("one_local_random", "explicit_terms"):
            raise ConfigError(f"[noise] unknown kind {cfg.noise_kind!r}")
        cfg.noise_a = float(_expect(noise, "a", (int, float), "noise", default=cfg.noise_a))
        cfg.noise_sampling = _expect(
            noise, "sampling", str, "noise", default=cfg.noise_sampling
        )
        if "terms" in noise:
            terms = noise["terms"]
            ok = isinstance(terms, list) and all(
                isinstance(t, list) and len(t) == 2 and isinstance(t[0], str)
                and isinstance(t[1], (int, float)) for t in terms
            )
            if not ok:
                raise ConfigError('[noise] terms must look like [["X2", 0.37], ...]')
            cfg.noise_terms = tuple((t[0], float(t[1])) for t in terms)

        sweep = data.get("sweep", {})
        cfg.frequencies = _number_list(sweep, "frequencies", "sweep", cfg.frequencies)
        cfg.times = _time_grid(sweep, "sweep")
        cfg.zetas = _number_list(sweep, "zetas", "sweep", cfg.zetas)
        cfg.samples = _expect(sweep, "samples", int, "sweep", default=cfg.samples)
        cfg.tau_cap = float(
            _expect(sweep, "tau_cap", (int, float), "sweep", default=cfg.tau_cap)
        )
        cfg.rel_tol = float(
            _expect(sweep, "rel_tol", (int, float), "sweep", default=cfg.rel_tol)
        )

        ising = data.get("ising", {})
        cfg.ising_kind = _expect(ising, "distribution", str, "ising", default=cfg.ising_kind)
        cfg.ising_j0 = float(_expect(ising, "j0", (int, float), "ising", default=cfg.ising_j0))
        cfg.ising_width = float(
            _expect(ising, "width", (int, float), "ising", default=cfg.ising_width)
        )
        if "lo" in ising:
            cfg.ising_lo = float(_expect(ising, "lo", (int, float), "ising"))
        if "hi" in ising:
            cfg.ising_hi = float(_expect(ising, "hi", (int, float), "ising"))
        if "table" in ising:
            table = ising["table"]
            ok = isinstance(table, list) and all(
                isinstance(p, list) and len(p) == 2
                and all(isinstance(v, (int, float)) for v in p) for p in table
            )
            if not ok:
                raise ConfigError("[ising] table must be a list of [J, weight] pairs")
            cfg.ising_table = tuple((float(j), float(w)) for j, w in table)
        cfg.sigma_pair = _expect(ising, "sigma_pair", str, "ising", default=cfg.sigma_pair)
        window = _number_list(ising, "window", "ising", None)
        if window is not None:
            if len(window) != 2:
                raise ConfigError("[ising] window must be [t_min, t_max]")
            cfg.window = (window[0], window[1])

        run = data.get("run", {})
        cfg.seed = _expect(run, "seed", int, "run", default=cfg.seed)
        if "workers" in run:
            cfg.workers = _expect(run, "workers", int, "run")
        cfg.output = _expect(run, "output", str, "run", default=cfg.output)
        return cfg

    def validate(self):
        if self.samples < 1:
            raise ConfigError("[sweep] samples must be >= 1")
        if self.mode in ("fig2", "fig3", "custom"):
            if not self.frequencies:
                raise ConfigError("[sweep] frequencies grid must be nonempty")
            if any(f < 0 for f in self.frequencies):
                raise ConfigError("[sweep] frequencies must be nonnegative")
        if self.mode in ("fig2", "custom"):
            if not self.times:
                raise ConfigError("[sweep] times grid must be nonempty")
            if any(t < 0 for t in self.times):
                raise ConfigError("[sweep] times must be nonnegative")
            if not 0.0 <= self.zeta < 1.0:
                raise ConfigError(
                    f"[system] zeta={self.zeta} gives no protection; need 0 <= zeta < 1"
                )
        if self.mode == "fig3":
            if not self.zetas:
                raise ConfigError("[sweep] zetas grid must be nonempty")
            for z in self.zetas:
                if not 0.0 <= z < 1.0:
                    raise ConfigError(
                        f"[sweep] zeta={z} gives no protection; need 0 <= zeta < 1"
                    )
        if self.noise_kind == "explicit_terms" and not self.noise_terms:
            raise ConfigError("[noise] explicit_terms needs a nonempty terms list")

    def noise_model(self, seed: int) -> NoiseModel:
        if self.noise_kind == "explicit_terms":
            terms = tuple(
                (parse_pauli(s, self.n), c) for s, c in self.noise_terms
            )
            return NoiseModel.explicit(terms)
        return NoiseModel.one_local(a=self.noise_a, seed=seed, sampling=self.noise_sampling)

    def encoding_spec(self) -> EncodingSpec:
        return EncodingSpec(self.n, tuple(parse_pauli(s, self.n) for s in self.encoding))

    def schedule(self, zeta: Optional[float] = None) -> MeasurementSchedule:
        z = self.zeta if zeta is None else zeta
        rounds = tuple(
            tuple(parse_pauli(s, self.n) for s in r) for r in self.measurements
        )
        return MeasurementSchedule(rounds=rounds, zeta=z)

    def coupling_distribution(self) -> CouplingDistribution:
        if self.ising_kind == "delta":
            return CouplingDistribution.delta(self.ising_j0)
        if self.ising_kind == "gaussian":
            return CouplingDistribution.gaussian(self.ising_j0, self.ising_width)
        if self.ising_kind == "uniform":
            if self.ising_lo is None or self.ising_hi is None:
                raise ConfigError("[ising] uniform distribution needs lo and hi")
            return CouplingDistribution.uniform(self.ising_lo, self.ising_hi)
        if self.ising_kind == "tabulated":
            if not self.ising_table:
                raise ConfigError("[ising] tabulated distribution needs a table")
            return CouplingDistribution.tabulated(self.ising_table)
        raise ConfigError(f"[ising] unknown distribution {self.ising_kind!r}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def _csv_text(mode: str, columns: Sequence[str], rows, sha: str, seed: int) -> str:
    lines = [
        f"# zenomem {__version__}",
        f"# mode: {mode}",
        f"# config_sha256: {sha}",
        f"# seed: {seed}",
        ",".join(columns),
    ]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _report_text(title: str, record: dict, sha: str, seed: int) -> str:
    lines = [
        f"zenomem {__version__} - {title}",
        f"config_sha256: {sha}",
        f"seed: {seed}",
        "",
    ]
    lines.extend(
        f"{k}: {_fmt(v) if isinstance(v, float) else v}" for k, v in record.items()
    )
    return "\n".join(lines) + "\n"


def _json_report(mode: str, record: dict, sha: str, seed: int) -> str:
    payload = {
        "tool": f"zenomem {__version__}",
        "mode": mode,
        "config_sha256": sha,
        "seed": seed,
    }
    for k, v in record.items():
        payload[k] = _fmt(v) if isinstance(v, float) else v
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _run_check(cfg: ExperimentConfig, outdir: Path, seed: int) -> list[Path]:
    enc = cfg.encoding_spec()
    measured = [parse_pauli(s, cfg.n) for r in cfg.measurements for s in r]
    if cfg.noise_kind == "explicit_terms":
        errors = ErrorSet.from_ops(
            [parse_pauli(s, cfg.n) for s, _ in cfg.noise_terms], cfg.n
        )
    else:
        errors = ErrorSet.one_local(cfg.n)
    report = check_conditions(enc, measured, errors)
    text = report.to_text()
    print(text)
    txt_path = outdir / "check_report.txt"
    json_path = outdir / "check_report.json"
    header = [
        f"zenomem {__version__} - protection condition check",
        f"config_sha256: {cfg.config_sha256}",
        f"seed: {seed}",
        "",
    ]
    txt_path.write_text("\n".join(header) + text + "\n", encoding="utf-8")
    json_path.write_text(
        _json_report("check", report.to_record(), cfg.config_sha256, seed),
        encoding="utf-8",
    )
    return [txt_path, json_path]


def _run_fig2(cfg: ExperimentConfig, outdir: Path, seed: int, workers: int) -> list[Path]:
    protocol = three_qubit_protocol(zeta=cfg.zeta)
    rows = sweep_error_probabilities(
        protocol,
        cfg.noise_model(seed),
        cfg.frequencies,
        cfg.times,
        samples=cfg.samples,
        workers=workers,
    )
    path = outdir / "fig2.csv"
    path.write_text(
        _csv_text("fig2", FIG2_COLUMNS, rows, cfg.config_sha256, seed), encoding="utf-8"
    )
    return [path]


def _run_custom(cfg: ExperimentConfig, outdir: Path, seed: int, workers: int) -> list[Path]:
    protocol = MemoryProtocol(cfg.encoding_spec(), cfg.schedule())
    rows = sweep_error_probabilities(
        protocol,
        cfg.noise_model(seed),
        cfg.frequencies,
        cfg.times,
        samples=cfg.samples,
        workers=workers,
    )
    path = outdir / "custom.csv"
    path.write_text(
        _csv_text("custom", FIG2_COLUMNS, rows, cfg.config_sha256, seed), encoding="utf-8"
    )
    return [path]


def _run_fig3(cfg: ExperimentConfig, outdir: Path, seed: int, workers: int) -> list[Path]:
    protocol = three_qubit_protocol()
    noise = cfg.noise_model(seed)
    rows = []
    for zeta in cfg.zetas:
        for f in cfg.frequencies:
            res = compute_lifetime(
                protocol,
                noise,
                zeta=zeta,
                f=f,
                samples=cfg.samples,
                tau_cap=cfg.tau_cap,
                rel_tol=cfg.rel_tol,
                workers=workers,
            )
            rows.append(
                {
                    "zeta": zeta,
                    "f": f,
                    "lifetime": res.lifetime,
                    "crossed_flag": 1 if res.crossed else 0,
                }
            )
    path = outdir / "fig3.csv"
    path.write_text(
        _csv_text("fig3", FIG3_COLUMNS, rows, cfg.config_sha256, seed), encoding="utf-8"
    )
    return [path]


def _run_ising(cfg: ExperimentConfig, outdir: Path, seed: int) -> list[Path]:
    dist = cfg.coupling_distribution()
    realization = find_pulse_time(dist, cfg.window)
    sigma = parse_pauli(cfg.sigma_pair, cfg.n)
    realized = realize_parity_projection(dist, sigma, realization=realization)
    target = measurement_channel(sigma, 0.0)
    deviation = float(np.max(np.abs(realized.liouville() - target.liouville())))
    record = {
        "distribution": cfg.ising_kind,
        "sigma_pair": cfg.sigma_pair,
        "t": realization.t,
        "p_sigma_sigma": realization.p_sigma_sigma,
        "apply_probability": realization.apply_probability,
        "residual_cross_term": realization.residual_cross_term,
        "max_channel_deviation": deviation,
    }
    for k, v in record.items():
        print(f"{k}: {_fmt(v) if isinstance(v, float) else v}")
    txt_path = outdir / "ising_report.txt"
    json_path = outdir / "ising_report.json"
    txt_path.write_text(
        _report_text("noisy Ising parity projection", record, cfg.config_sha256, seed),
        encoding="utf-8",
    )
    json_path.write_text(
        _json_report("ising", record, cfg.config_sha256, seed), encoding="utf-8"
    )
    return [txt_path, json_path]


def run(cfg: ExperimentConfig, output: Optional[str] = None,
        workers: Optional[int] = None, seed: Optional[int] = None) -> list[Path]:
    """Execute a validated config; returns the list of files written."""
    cfg.validate()
    effective_seed = cfg.seed if seed is None else seed
    effective_workers = workers if workers is not None else cfg.workers
    if effective_workers is None:
        effective_workers = os.cpu_count() or 1
    if effective_workers < 1:
        raise ConfigError(f"workers must be >= 1, got {effective_workers}")
    outdir = Path(output if output is not None else cfg.output)
    outdir.mkdir(parents=True, exist_ok=True)

    if cfg.mode == "check":
        return _run_check(cfg, outdir, effective_seed)
    if cfg.mode == "fig2":
        return _run_fig2(cfg, outdir, effective_seed, effective_workers)
    if cfg.mode == "fig3":
        return _run_fig3(cfg, outdir, effective_seed, effective_workers)
    if cfg.mode == "ising":
        return _run_ising(cfg, outdir, effective_seed)
    if cfg.mode == "custom":
        return _run_custom(cfg, outdir, effective_seed, effective_workers)
    raise ConfigError(f"unknown mode {cfg.mode!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="zenomem",
        description="Measurement-protected quantum memory experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run an experiment from a config file")
    runp.add_argument(
        "mode", choices=["check", "fig2", "fig3", "ising", "custom"],
        help="experiment kind",
    )
    runp.add_argument("config", type=Path, help="TOML config file")
    runp.add_argument("--output", type=str, default=None, help="output directory")
    runp.add_argument("--workers", type=int, default=None, help="parallel workers")
    runp.add_argument("--seed", type=int, default=None, help="override the config seed")
    args = parser.parse_args(argv)

    try:
        cfg = ExperimentConfig.from_file(args.config, args.mode)
        written = run(cfg, output=args.output, workers=args.workers, seed=args.seed)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
