"""Parameter sweeps over bath coupling and annealing schedule.

Per grid point ``(s, alpha)``:

1. build ``H(s)`` and a uniform Ohmic bath,
2. find the stopping cutoff ``omega0*``,
3. flow ``H`` to ``H_eff(omega0*)``,
4. diagonalize both,
5. dephase the effective ground state to get the measurable ``rho_r``,
6. compare against the ideal ground state.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .channels import dephase_all, pure_density
from .flow import (
    DEFAULT_ETA,
    BathSpec,
    FullyLocalized,
    flow_closed_form,
    flow_trajectories,
    stopping_frequency,
)
from .metrics import entropy, fidelity_pure_mixed, purity, state_fidelity, trace_distance
from .models import (
    VARIANT_SEED,
    AFMInstance,
    afm_hamiltonian,
    default_instance,
    parse_edges,
    random_afm_instance,
)
from .pauli import PauliOperator, format_number, parse_pauli_text
from .spectral import GroundState, ground_state

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

WORKERS_ENV = "BATHFLOW_WORKERS"
DEFAULT_OMEGA_C = 1.0e4
DEFAULT_THRESHOLDS = (0.3, 1.0)
CSV_COLUMNS = (
    "s", "alpha", "omega0_star", "E0_ideal", "E0_eff", "fidelity_sb", "fidelity_reduced",
    "purity", "entropy", "trace_distance", "regime", "flags",
)
TRAJECTORY_COLUMNS = ("c", "omega0", "delta", "ratio")


class ConfigError(ValueError):
    pass


def default_alpha_grid() -> tuple[float, ...]:
    return (0.0, *np.geomspace(1e-3, 0.25, 40).tolist())


def extended_alpha_grid() -> tuple[float, ...]:
    return (*default_alpha_grid(), *np.geomspace(0.3, 2.0, 8).tolist())


@dataclass(frozen=True)
class SweepConfig:
    instance: AFMInstance | None = None
    hamiltonian: PauliOperator | None = None
    omega_c: float = DEFAULT_OMEGA_C
    alphas: tuple[float, ...] = field(default_factory=default_alpha_grid)
    s_values: tuple[float, ...] = (0.8,)
    eta: float = DEFAULT_ETA
    ode_steps: int = 1000
    entropy_base: float | str = 2
    fidelity: str = "squared"
    thresholds: tuple[float, float] = DEFAULT_THRESHOLDS
    mode: str = "pipeline"
    exponents: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5)
    delta: float = 1.0
    omega_min: float = 0.3
    csv_path: Path | None = None
    json_path: Path | None = None
    workers: int | None = None

    def __post_init__(self):
        if self.mode not in ("pipeline", "trajectories"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "pipeline" and (self.instance is None) == (self.hamiltonian is None):
            raise ConfigError("give exactly one of an AFM instance or an inline hamiltonian")
        if not self.omega_c > 0:
            raise ConfigError("omega_c must be positive")
        if not self.eta > 1:
            raise ConfigError("eta must exceed 1")
        if not self.alphas or not self.s_values:
            raise ConfigError("alpha and s grids must be nonempty")
        if any(a < 0 for a in self.alphas):
            raise ConfigError("alpha values must be non-negative")
        if any(not 0 <= s <= 1 for s in self.s_values):
            raise ConfigError("s values must lie in [0, 1]")
        if self.ode_steps < 1:
            raise ConfigError("ode_steps must be positive")
        if self.fidelity not in ("squared", "root"):
            raise ConfigError(f"unknown fidelity convention {self.fidelity!r}")
        if str(self.entropy_base) not in ("2", "e", "bits", "nats"):
            raise ConfigError(f"unsupported entropy base {self.entropy_base!r}")
        small, large = self.thresholds
        if not 0 < small < large:
            raise ConfigError("regime thresholds must satisfy 0 < small < large")
        if self.mode == "trajectories" and not 0 < self.omega_min < self.omega_c:
            raise ConfigError("omega_min must lie in (0, omega_c)")

    def hamiltonian_at(self, s: float) -> PauliOperator:
        if self.hamiltonian is not None:
            return self.hamiltonian
        return afm_hamiltonian(self.instance.with_s(s))

    @property
    def n(self) -> int:
        return self.hamiltonian.n if self.hamiltonian is not None else self.instance.n

    def grid(self) -> list[tuple[float, float]]:
        return [(s, a) for s in sorted(set(self.s_values)) for a in sorted(set(self.alphas))]

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, int(self.workers))
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))


@dataclass(frozen=True)
class SweepRecord:
    s: float
    alpha: float
    omega0_star: float
    E0_ideal: float
    E0_eff: float
    fidelity_sb: float
    fidelity_reduced: float
    purity: float
    entropy: float
    trace_distance: float
    regime: str
    flags: tuple[str, ...] = ()

    def row(self) -> list[str]:
        out = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if name == "flags":
                out.append(";".join(value))
            elif isinstance(value, str):
                out.append(value)
            else:
                out.append(format_number(value))
        return out

    def as_dict(self) -> dict[str, Any]:
        d = {}
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if name == "flags":
                d[name] = list(value)
            elif isinstance(value, str):
                d[name] = value
            else:
                d[name] = float(format_number(value))
        return d


def classify_regime(
    n: int, k: int, alpha: float, thresholds: tuple[float, float] = DEFAULT_THRESHOLDS
) -> str:
    """Coupling regime from the locality ``k`` and size ``n`` of the Hamiltonian.

    ``small``/``large`` split ``k alpha`` (how hard the physical terms are
    suppressed) and ``n alpha`` (how hard global coherences are):

    - ``alpha >= large``: even single-qubit flips are fully suppressed -> "classical"
    - ``k alpha >= large`` -> "localized"
    - ``small <= k alpha < large`` -> "partially localized"
    - ``k alpha < small <= n alpha`` -> "LCGD"
    - otherwise -> "weak coupling"
    """
    small, large = thresholds
    if alpha >= large:
        return "classical"
    if k * alpha >= large:
        return "localized"
    if k * alpha >= small:
        return "partially localized"
    if n * alpha >= small:
        return "LCGD"
    return "weak coupling"


def _error_record(s: float, alpha: float, message: str) -> SweepRecord:
    nan = math.nan
    return SweepRecord(s, alpha, nan, nan, nan, nan, nan, nan, nan, nan, "error", (f"error:{message}",))


def run_point(
    cfg: SweepConfig, s: float, alpha: float, ideal: GroundState | None = None
) -> SweepRecord:
    h = cfg.hamiltonian_at(s)
    bath = BathSpec.uniform(h.n, alpha, cfg.omega_c)
    flags: list[str] = []

    try:
        omega0 = stopping_frequency(h, bath, cfg.eta) if len(h) else cfg.omega_c
    except FullyLocalized as exc:
        omega0 = exc.floor
        flags.append("localized")
    if omega0 == cfg.omega_c:
        flags.append("boundary")

    h_eff = flow_closed_form(h, bath, omega0)
    if ideal is None:
        ideal = ground_state(h)
    eff = ground_state(h_eff)
    for tag, gs in (("ideal", ideal), ("eff", eff)):
        if gs.degenerate:
            flags.append(f"degenerate_{tag}")
            warnings.warn(f"degenerate {tag} ground state at s={s}, alpha={alpha}", stacklevel=2)

    rho_ideal = pure_density(ideal.vector)
    rho_r = dephase_all(pure_density(eff.vector), bath, omega0)
    return SweepRecord(
        s=float(s),
        alpha=float(alpha),
        omega0_star=float(omega0),
        E0_ideal=ideal.energy,
        E0_eff=eff.energy,
        fidelity_sb=float(state_fidelity(ideal.vector, eff.vector, cfg.fidelity)),
        fidelity_reduced=fidelity_pure_mixed(ideal.vector, rho_r, cfg.fidelity),
        purity=purity(rho_r),
        entropy=entropy(rho_r, cfg.entropy_base),
        trace_distance=trace_distance(rho_ideal, rho_r),
        regime=classify_regime(h.n, h.locality, alpha, cfg.thresholds),
        flags=tuple(flags),
    )


def _safe_point(args) -> SweepRecord:
    cfg, s, alpha, ideal = args
    try:
        return run_point(cfg, s, alpha, ideal)
    except Exception as exc:  # recorded inline; the sweep continues
        return _error_record(s, alpha, f"{type(exc).__name__}: {exc}")


def run_sweep(cfg: SweepConfig, *, write: bool = True) -> list[SweepRecord]:
    """Evaluate every grid point, ordered by ``(s, alpha)``; optionally write outputs."""
    if cfg.mode != "pipeline":
        raise ConfigError("run_sweep needs pipeline mode; use run_trajectories")
    ideals: dict[float, GroundState | None] = {}
    for s in sorted(set(cfg.s_values)):
        try:
            ideals[s] = ground_state(cfg.hamiltonian_at(s))
        except Exception:
            ideals[s] = None
    tasks = [(cfg, s, a, ideals[s]) for s, a in cfg.grid()]
    workers = cfg.resolved_workers()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_safe_point, tasks))
    else:
        records = [_safe_point(t) for t in tasks]
    if write:
        write_records(records, cfg.csv_path, cfg.json_path)
    return records


def records_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.row())
    return buf.getvalue()


def records_json(records: Iterable[SweepRecord]) -> str:
    return json.dumps([r.as_dict() for r in records], indent=2, sort_keys=False) + "\n"


def write_records(records: Sequence[SweepRecord], csv_path: Path | None, json_path: Path | None):
    if csv_path is not None:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        Path(csv_path).write_text(records_csv(records))
    if json_path is not None:
        Path(json_path).parent.mkdir(parents=True, exist_ok=True)
        Path(json_path).write_text(records_json(records))


# -- flow-only mode ------------------------------------------------------------

def trajectory_rows(cfg: SweepConfig) -> list[tuple[float, float, float, float]]:
    """``(c, omega0, delta, delta / omega0)`` along each single-string flow."""
    flows = flow_trajectories(
        cfg.exponents, delta=cfg.delta, omega_c=cfg.omega_c, omega_min=cfg.omega_min, steps=cfg.ode_steps
    )
    rows = []
    for c, result in flows.items():
        path = result.coefficient_path("X")
        for w, d in zip(result.omegas(), path):
            rows.append((c, float(w), float(d), float(d / w)))
    return rows


def trajectories_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def run_trajectories(cfg: SweepConfig, *, write: bool = True):
    rows = trajectory_rows(cfg)
    if write:
        if cfg.csv_path is not None:
            Path(cfg.csv_path).parent.mkdir(parents=True, exist_ok=True)
            Path(cfg.csv_path).write_text(trajectories_csv(rows))
        if cfg.json_path is not None:
            Path(cfg.json_path).parent.mkdir(parents=True, exist_ok=True)
            payload = [dict(zip(TRAJECTORY_COLUMNS, (float(format_number(v)) for v in row))) for row in rows]
            Path(cfg.json_path).write_text(json.dumps(payload, indent=2) + "\n")
    return rows


# -- presets and config files ------------------------------------------------

FIGURES = ("s1", "2", "s2", "s3", "s4")


def figure_config(name: str, out_dir: Path | str = ".") -> SweepConfig:
    """Named preset configurations on the seeded benchmark instance."""
    out_dir = Path(out_dir)
    paths = dict(csv_path=out_dir / f"fig_{name}.csv", json_path=out_dir / f"fig_{name}.json")
    if name == "s1":
        return SweepConfig(mode="trajectories", omega_c=30.0, delta=1.0, omega_min=0.3, **paths)
    if name in ("2", "s2"):
        return SweepConfig(instance=default_instance(0.8), s_values=(0.8,), **paths)
    if name == "s3":
        return SweepConfig(instance=default_instance(0.8), s_values=(0.8,), alphas=extended_alpha_grid(), **paths)
    if name == "s4":
        return SweepConfig(
            instance=random_afm_instance(12, 2, VARIANT_SEED, 0.7),
            s_values=(0.7,),
            alphas=extended_alpha_grid(),
            **paths,
        )
    raise ConfigError(f"unknown figure preset {name!r}; choose from {', '.join(FIGURES)}")


_SCHEMA = {
    "instance": {"n", "degree", "seed", "edges", "s", "hamiltonian"},
    "bath": {"omega_c", "eta"},
    "grid": {"alpha", "s"},
    "output": {"csv", "json"},
    "options": {"entropy_base", "fidelity", "ode_steps", "workers", "regime_thresholds", "mode"},
    "trajectories": {"exponents", "delta", "omega_min"},
}


def _number(value, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}")
    return float(value)


def _grid_values(spec, what: str) -> tuple[float, ...]:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return (float(spec),)
    if isinstance(spec, list):
        return tuple(_number(v, what) for v in spec)
    if isinstance(spec, dict):
        unknown = set(spec) - {"start", "stop", "num", "spacing", "include_zero"}
        if unknown:
            raise ConfigError(f"unknown {what} range keys: {sorted(unknown)}")
        try:
            start, stop, num = _number(spec["start"], what), _number(spec["stop"], what), int(spec["num"])
        except KeyError as exc:
            raise ConfigError(f"{what} range needs {exc.args[0]!r}") from None
        spacing = spec.get("spacing", "linear")
        if spacing == "linear":
            values = np.linspace(start, stop, num)
        elif spacing == "log":
            if start <= 0:
                raise ConfigError(f"log-spaced {what} range needs start > 0")
            values = np.geomspace(start, stop, num)
        else:
            raise ConfigError(f"unknown spacing {spacing!r}")
        values = [float(v) for v in values]
        if spec.get("include_zero", False):
            values = [0.0, *values]
        return tuple(values)
    raise ConfigError(f"cannot interpret {what} grid {spec!r}")


def config_from_mapping(data: dict, base_dir: Path | str = ".", overrides: dict | None = None) -> SweepConfig:
    """Build a SweepConfig from parsed TOML tables plus flat CLI overrides."""
    for table, body in data.items():
        if table not in _SCHEMA:
            raise ConfigError(f"unknown config table [{table}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{table}] must be a table")
        unknown = set(body) - _SCHEMA[table]
        if unknown:
            raise ConfigError(f"unknown keys in [{table}]: {sorted(unknown)}")
    inst = dict(data.get("instance", {}))
    bath = data.get("bath", {})
    grid = data.get("grid", {})
    out = data.get("output", {})
    opts = data.get("options", {})
    traj = data.get("trajectories", {})
    overrides = dict(overrides or {})
    base_dir = Path(base_dir)

    kwargs: dict[str, Any] = {}
    mode = overrides.pop("mode", None) or opts.get("mode", "pipeline")
    kwargs["mode"] = mode
    s_default = inst.get("s", 0.8)
    if "s" in grid:
        kwargs["s_values"] = _grid_values(grid["s"], "s")
    else:
        kwargs["s_values"] = (_number(s_default, "instance.s"),)
    if "hamiltonian" in inst:
        extra = set(inst) - {"hamiltonian", "s"}
        if extra:
            raise ConfigError(f"inline hamiltonian cannot be combined with {sorted(extra)}")
        try:
            kwargs["hamiltonian"] = parse_pauli_text(inst["hamiltonian"])
        except ValueError as exc:
            raise ConfigError(f"instance.hamiltonian: {exc}") from None
    elif mode == "pipeline":
        s0 = kwargs["s_values"][0]
        if "edges" in inst:
            if "n" not in inst:
                raise ConfigError("instance.edges needs instance.n")
            try:
                kwargs["instance"] = AFMInstance(int(inst["n"]), parse_edges(inst["edges"]), s0)
            except ValueError as exc:
                raise ConfigError(f"instance: {exc}") from None
        else:
            try:
                kwargs["instance"] = random_afm_instance(
                    int(inst.get("n", 12)), int(inst.get("degree", 2)), int(inst.get("seed", 1)), s0
                )
            except ValueError as exc:
                raise ConfigError(f"instance: {exc}") from None

    if "omega_c" in bath:
        kwargs["omega_c"] = _number(bath["omega_c"], "bath.omega_c")
    if "eta" in bath:
        kwargs["eta"] = _number(bath["eta"], "bath.eta")
    if "alpha" in grid:
        kwargs["alphas"] = _grid_values(grid["alpha"], "alpha")
    if "entropy_base" in opts:
        kwargs["entropy_base"] = opts["entropy_base"]
    if "fidelity" in opts:
        kwargs["fidelity"] = opts["fidelity"]
    if "ode_steps" in opts:
        kwargs["ode_steps"] = int(opts["ode_steps"])
    if "workers" in opts:
        kwargs["workers"] = int(opts["workers"])
    if "regime_thresholds" in opts:
        small, large = opts["regime_thresholds"]
        kwargs["thresholds"] = (_number(small, "threshold"), _number(large, "threshold"))
    if "exponents" in traj:
        kwargs["exponents"] = tuple(_number(c, "exponent") for c in traj["exponents"])
    if "delta" in traj:
        kwargs["delta"] = _number(traj["delta"], "trajectories.delta")
    if "omega_min" in traj:
        kwargs["omega_min"] = _number(traj["omega_min"], "trajectories.omega_min")
    if "csv" in out:
        kwargs["csv_path"] = base_dir / out["csv"]
    if "json" in out:
        kwargs["json_path"] = base_dir / out["json"]

    valid = {f.name for f in dataclasses.fields(SweepConfig)}
    for key, value in overrides.items():
        if key not in valid:
            raise ConfigError(f"unknown override {key!r}")
        if value is not None:
            kwargs[key] = value
    if kwargs.get("instance") is not None and "s_values" in overrides and overrides["s_values"]:
        kwargs["instance"] = kwargs["instance"].with_s(kwargs["s_values"][0])
    try:
        return SweepConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: Path | str, out_dir: Path | str | None = None, overrides: dict | None = None) -> SweepConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = Path(out_dir) if out_dir is not None else path.parent
    return config_from_mapping(data, base, overrides)
