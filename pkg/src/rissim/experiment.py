"""Scenario presets, Monte Carlo driver and result statistics.

A sweep enumerates RIS placements (z heights or an x/y grid) and element
counts. Every (sweep point, trial) pair derives its own RNG streams from the
master seed by counter-based key derivation, so results are bit-identical
regardless of execution order or parallelism.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from io import StringIO
from typing import Optional

import numpy as np

from .array_response import ElementPattern
from .channel import (
    ChannelRealization,
    FieldRegime,
    ris_rx_farfield,
    ris_rx_nearfield,
    select_field_regime,
    siso_channel,
    tx_ris_channel,
)
from .geometry import CarrierConfig, PanelGeometry, Point3
from .largescale import Environment
from .link import LinkBudget, evaluate_link

CSV_COLUMNS = (
    "preset",
    "ris_x",
    "ris_y",
    "ris_z",
    "p_t_dbm",
    "n_elements",
    "mean_rate_bps_hz",
    "std_rate",
    "mean_snr_db",
    "los_fraction_txris",
    "los_fraction_txrx",
    "regime",
    "trials",
    "seed",
)


@dataclass(frozen=True)
class SweepPoint:
    """One evaluated configuration: RIS placement, size and transmit power."""

    ris_x: float
    ris_y: float
    ris_z: float
    n_elements: int
    p_t_dbm: float


@dataclass(frozen=True)
class SweepResult:
    """Aggregated Monte Carlo statistics for one sweep point."""

    index: int
    point: SweepPoint
    mean_rate_bps_hz: float
    std_rate: float
    mean_snr_db: float
    los_fraction_txris: float
    los_fraction_txrx: float
    regime: str
    trials: int
    seed: int
    error: Optional[str] = None


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment.

    The RIS placement sweeps default to the single base position; element
    counts are always a sweep list. An entry of 0 elements (or the no-RIS
    baseline) evaluates the direct link alone.
    """

    name: str
    environment: Environment
    f_c_ghz: float
    tx: Point3
    rx: Point3
    ris_center: Point3
    n_elements: tuple = (256,)
    ris_x_sweep: Optional[tuple] = None
    ris_y_sweep: Optional[tuple] = None
    ris_z_sweep: Optional[tuple] = None
    spacing_m: Optional[float] = None
    boresight: str = "+y"
    p_t_dbm: float = 20.0
    n_0_dbm: float = -130.0
    trials: int = 2000
    master_seed: int = 2024
    regime_override: Optional[FieldRegime] = None
    no_ris_baseline_extra_db: Optional[float] = None
    element_pattern_q: float = 0.285
    steering_convention: str = "reference"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.n_elements) == 0:
            raise ValueError("n_elements sweep must be non-empty")
        for axis in (self.ris_x_sweep, self.ris_y_sweep, self.ris_z_sweep):
            if axis is not None and len(axis) == 0:
                raise ValueError("sweep axes must be non-empty when given")

    def spacing(self) -> float:
        """Inter-element spacing: configured value or half a wavelength."""
        if self.spacing_m is not None:
            return self.spacing_m
        return CarrierConfig(self.f_c_ghz).wavelength_m / 2.0

    def sweep_points(self) -> list[SweepPoint]:
        xs = self.ris_x_sweep or (self.ris_center.x,)
        ys = self.ris_y_sweep or (self.ris_center.y,)
        zs = self.ris_z_sweep or (self.ris_center.z,)
        points = [
            SweepPoint(x, y, z, n, self.p_t_dbm)
            for z in zs
            for y in ys
            for x in xs
            for n in self.n_elements
        ]
        if self.no_ris_baseline_extra_db is not None:
            points.append(
                SweepPoint(
                    self.ris_center.x,
                    self.ris_center.y,
                    self.ris_center.z,
                    0,
                    self.p_t_dbm + self.no_ris_baseline_extra_db,
                )
            )
        return points

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "environment": self.environment.value,
            "f_c_ghz": self.f_c_ghz,
            "tx": [self.tx.x, self.tx.y, self.tx.z],
            "rx": [self.rx.x, self.rx.y, self.rx.z],
            "ris_center": [self.ris_center.x, self.ris_center.y, self.ris_center.z],
            "n_elements": list(self.n_elements),
            "ris_x_sweep": list(self.ris_x_sweep) if self.ris_x_sweep else None,
            "ris_y_sweep": list(self.ris_y_sweep) if self.ris_y_sweep else None,
            "ris_z_sweep": list(self.ris_z_sweep) if self.ris_z_sweep else None,
            "spacing_m": self.spacing_m,
            "boresight": self.boresight,
            "p_t_dbm": self.p_t_dbm,
            "n_0_dbm": self.n_0_dbm,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "regime_override": self.regime_override.value if self.regime_override else None,
            "no_ris_baseline_extra_db": self.no_ris_baseline_extra_db,
            "element_pattern_q": self.element_pattern_q,
            "steering_convention": self.steering_convention,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        def point(key):
            x, y, z = raw[key]
            return Point3(float(x), float(y), float(z))

        def axis(key):
            value = raw.get(key)
            return tuple(float(v) for v in value) if value else None

        override = raw.get("regime_override")
        return cls(
            name=str(raw["name"]),
            environment=Environment(raw["environment"]),
            f_c_ghz=float(raw["f_c_ghz"]),
            tx=point("tx"),
            rx=point("rx"),
            ris_center=point("ris_center"),
            n_elements=tuple(int(n) for n in raw["n_elements"]),
            ris_x_sweep=axis("ris_x_sweep"),
            ris_y_sweep=axis("ris_y_sweep"),
            ris_z_sweep=axis("ris_z_sweep"),
            spacing_m=float(raw["spacing_m"]) if raw.get("spacing_m") is not None else None,
            boresight=raw.get("boresight", "+y"),
            p_t_dbm=float(raw.get("p_t_dbm", 20.0)),
            n_0_dbm=float(raw.get("n_0_dbm", -130.0)),
            trials=int(raw.get("trials", 2000)),
            master_seed=int(raw.get("master_seed", 2024)),
            regime_override=FieldRegime(override) if override else None,
            no_ris_baseline_extra_db=(
                float(raw["no_ris_baseline_extra_db"])
                if raw.get("no_ris_baseline_extra_db") is not None
                else None
            ),
            element_pattern_q=float(raw.get("element_pattern_q", 0.285)),
            steering_convention=raw.get("steering_convention", "reference"),
        )


@dataclass
class RateStats:
    """Result table of one experiment run."""

    preset: str
    rows: list = field(default_factory=list)

    @staticmethod
    def _fmt(value) -> str:
        if isinstance(value, float):
            return format(value, ".9g")
        return str(value)

    def to_csv_text(self) -> str:
        out = StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows:
            values = (
                self.preset,
                row.point.ris_x,
                row.point.ris_y,
                row.point.ris_z,
                row.point.p_t_dbm,
                row.point.n_elements,
                row.mean_rate_bps_hz,
                row.std_rate,
                row.mean_snr_db,
                row.los_fraction_txris,
                row.los_fraction_txrx,
                row.regime,
                row.trials,
                row.seed,
            )
            out.write(",".join(self._fmt(v) for v in values) + "\n")
        return out.getvalue()

    def to_json_text(self) -> str:
        def encode(value):
            if isinstance(value, float) and math.isnan(value):
                return None
            return value

        rows = []
        for row in self.rows:
            rows.append(
                {
                    "preset": self.preset,
                    "ris_x": row.point.ris_x,
                    "ris_y": row.point.ris_y,
                    "ris_z": row.point.ris_z,
                    "p_t_dbm": row.point.p_t_dbm,
                    "n_elements": row.point.n_elements,
                    "mean_rate_bps_hz": encode(row.mean_rate_bps_hz),
                    "std_rate": encode(row.std_rate),
                    "mean_snr_db": encode(row.mean_snr_db),
                    "los_fraction_txris": encode(row.los_fraction_txris),
                    "los_fraction_txrx": encode(row.los_fraction_txrx),
                    "regime": row.regime,
                    "trials": row.trials,
                    "seed": row.seed,
                    "error": row.error,
                }
            )
        return json.dumps({"preset": self.preset, "rows": rows}, indent=2) + "\n"

    def write(self, path, fmt: str = "csv") -> None:
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        with open(path, "w", newline="") as f:
            f.write(text)


def _trial_rngs(master_seed: int, sweep_index: int, trial: int):
    """Three independent generators (h, direct, g) for one trial."""
    base = np.random.SeedSequence(entropy=master_seed, spawn_key=(sweep_index, trial))
    return tuple(np.random.default_rng(s) for s in base.spawn(3))


def generate_realization(
    config: ExperimentConfig,
    point: SweepPoint,
    sweep_index: int,
    trial: int,
) -> ChannelRealization:
    """Generate the full channel realization for one (sweep point, trial)."""
    carrier = CarrierConfig(config.f_c_ghz)
    rng_h, rng_siso, rng_g = _trial_rngs(config.master_seed, sweep_index, trial)
    pattern = ElementPattern(config.element_pattern_q)

    if point.n_elements > 0:
        panel = PanelGeometry.centered(
            Point3(point.ris_x, point.ris_y, point.ris_z),
            point.n_elements,
            config.spacing(),
            config.boresight,
        )
        regime = select_field_regime(panel, config.rx, carrier, config.regime_override)
        h, meta_h = tx_ris_channel(
            config.environment,
            config.tx,
            panel,
            carrier,
            rng_h,
            pattern=pattern,
            convention=config.steering_convention,
        )
        if regime is FieldRegime.NEAR_FIELD:
            g, meta_g = ris_rx_nearfield(panel, config.rx, carrier)
        else:
            g, meta_g = ris_rx_farfield(
                config.environment,
                panel,
                config.rx,
                carrier,
                rng_g,
                pattern=pattern,
                convention=config.steering_convention,
            )
    else:
        regime = FieldRegime.FAR_FIELD
        h = np.zeros(0, dtype=complex)
        g = np.zeros(0, dtype=complex)
        meta_h = None
        meta_g = None

    h_siso, meta_siso = siso_channel(
        config.environment, config.tx, config.rx, carrier, rng_siso
    )
    return ChannelRealization(
        h=h,
        g=g,
        g_regime=regime,
        h_siso=h_siso,
        metadata={"tx_ris": meta_h, "ris_rx": meta_g, "tx_rx": meta_siso},
    )


def _run_sweep_point(config: ExperimentConfig, index: int, point: SweepPoint) -> SweepResult:
    carrier = CarrierConfig(config.f_c_ghz)
    budget = LinkBudget.from_dbm(point.p_t_dbm, config.n_0_dbm)
    pattern = ElementPattern(config.element_pattern_q)
    trials = config.trials

    rates = np.empty(trials)
    snrs = np.empty(trials)
    los_h = 0
    los_siso = 0
    regime_name = "none"

    try:
        panel = None
        g_near = None
        if point.n_elements > 0:
            panel = PanelGeometry.centered(
                Point3(point.ris_x, point.ris_y, point.ris_z),
                point.n_elements,
                config.spacing(),
                config.boresight,
            )
            regime = select_field_regime(panel, config.rx, carrier, config.regime_override)
            regime_name = regime.value
            if regime is FieldRegime.NEAR_FIELD:
                g_near, _ = ris_rx_nearfield(panel, config.rx, carrier)

        for t in range(trials):
            rng_h, rng_siso, rng_g = _trial_rngs(config.master_seed, index, t)
            if panel is not None:
                h, meta_h = tx_ris_channel(
                    config.environment,
                    config.tx,
                    panel,
                    carrier,
                    rng_h,
                    pattern=pattern,
                    convention=config.steering_convention,
                )
                los_h += meta_h.state.los
                if g_near is not None:
                    g = g_near
                else:
                    g, _ = ris_rx_farfield(
                        config.environment,
                        panel,
                        config.rx,
                        carrier,
                        rng_g,
                        pattern=pattern,
                        convention=config.steering_convention,
                    )
            else:
                h = np.zeros(0, dtype=complex)
                g = np.zeros(0, dtype=complex)
            h_siso, meta_siso = siso_channel(
                config.environment, config.tx, config.rx, carrier, rng_siso
            )
            los_siso += meta_siso.state.los
            result = evaluate_link(h, g, h_siso, budget)
            rates[t] = result.rate_bps_hz
            snrs[t] = result.snr_linear
    except ValueError as exc:
        nan = float("nan")
        return SweepResult(
            index, point, nan, nan, nan, nan, nan, regime_name, trials,
            config.master_seed, error=str(exc),
        )

    mean_snr = float(np.mean(snrs))
    return SweepResult(
        index=index,
        point=point,
        mean_rate_bps_hz=float(np.mean(rates)),
        std_rate=float(np.std(rates, ddof=1)) if trials > 1 else 0.0,
        mean_snr_db=10.0 * math.log10(mean_snr) if mean_snr > 0 else float("-inf"),
        los_fraction_txris=los_h / trials if point.n_elements > 0 else float("nan"),
        los_fraction_txrx=los_siso / trials,
        regime=regime_name,
        trials=trials,
        seed=config.master_seed,
    )


def _run_sweep_point_args(args) -> SweepResult:
    return _run_sweep_point(*args)


def run_experiment(config: ExperimentConfig, workers: int = 1) -> RateStats:
    """Run the full sweep.

    Sweep points are independent units of work; with ``workers`` > 1 they are
    distributed over processes. Results are merged in sweep-index order, so
    the output is identical for any worker count.
    """
    points = config.sweep_points()
    tasks = [(config, i, p) for i, p in enumerate(points)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_sweep_point_args, tasks))
    else:
        rows = [_run_sweep_point(*task) for task in tasks]
    rows.sort(key=lambda r: r.index)
    return RateStats(preset=config.name, rows=rows)


def _grid(start: float, stop: float, step: float) -> tuple:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))


def figure_presets() -> dict:
    """Built-in scenario presets reproducing the reference experiments.

    Indoor presets place the RIS in the near field of the Rx; the outdoor
    element-count sweep selects the regime automatically and adds a no-RIS
    baseline consuming 10 dB more transmit power; the outdoor placement
    sweeps run at 5.8 GHz with N = 1024 in forced far-field (fig5a) and
    forced near-field (fig5b) regimes.
    """
    common = dict(p_t_dbm=20.0, n_0_dbm=-130.0, trials=2000, master_seed=2024)
    presets = {
        "fig3a": ExperimentConfig(
            name="fig3a",
            environment=Environment.INH,
            f_c_ghz=2.4,
            tx=Point3(0, 25, 3),
            rx=Point3(40, 48, 1.5),
            ris_center=Point3(38, 50, 3),
            ris_z_sweep=(2.0, 3.0),
            n_elements=(64, 256, 1024),
            boresight="-y",
            regime_override=FieldRegime.NEAR_FIELD,
            **common,
        ),
        "fig3b": ExperimentConfig(
            name="fig3b",
            environment=Environment.INH,
            f_c_ghz=2.4,
            tx=Point3(0, 25, 3),
            rx=Point3(67, 45, 1.5),
            ris_center=Point3(70, 50, 3),
            ris_z_sweep=(2.0, 3.0),
            n_elements=(64, 256, 1024),
            boresight="-y",
            regime_override=FieldRegime.NEAR_FIELD,
            **common,
        ),
        "fig4": ExperimentConfig(
            name="fig4",
            environment=Environment.UMI,
            f_c_ghz=2.4,
            tx=Point3(0, 25, 10),
            rx=Point3(65, 52, 1),
            ris_center=Point3(62, 55, 7),
            n_elements=(16, 64, 256, 1024, 4096),
            boresight="-y",
            no_ris_baseline_extra_db=10.0,
            **common,
        ),
        "fig5a": ExperimentConfig(
            name="fig5a",
            environment=Environment.UMI,
            f_c_ghz=5.8,
            tx=Point3(0, 25, 10),
            rx=Point3(100, 50, 1),
            ris_center=Point3(70, 60, 7),
            ris_x_sweep=_grid(40.0, 98.0, 2.0),
            ris_y_sweep=_grid(52.0, 73.0, 2.0),
            n_elements=(1024,),
            boresight="-y",
            regime_override=FieldRegime.FAR_FIELD,
            **common,
        ),
        "fig5b": ExperimentConfig(
            name="fig5b",
            environment=Environment.UMI,
            f_c_ghz=5.8,
            tx=Point3(0, 25, 10),
            rx=Point3(100, 50, 1),
            ris_center=Point3(96, 56, 7),
            ris_x_sweep=_grid(90.0, 100.0, 2.0),
            ris_y_sweep=_grid(52.0, 60.0, 2.0),
            n_elements=(1024,),
            boresight="-y",
            regime_override=FieldRegime.NEAR_FIELD,
            **common,
        ),
    }
    return presets
