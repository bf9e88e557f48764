"""Per-field analysis rows, h sweeps, CSV persistence and SVG figures."""

from __future__ import annotations

import csv
import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .chain import GroundState, solve_ground_state
from .errors import ConfigError, InvariantViolation
from .linalg import partial_trace
from .protocol import ProtocolRun, closed_form_EB, run_protocol
from .thermo import (
    BETA_DEFAULT,
    BlockSpectrum,
    EffectiveHamiltonian,
    EntropyDecomposition,
    EntropyLedger,
    block_spectrum,
    effective_hamiltonian,
    entropy_decomposition,
    entropy_ledger,
)

DEFAULT_OUT = "qet_out"
SUM_RULE_TOL = 1e-9
SPLIT_TOL = 1e-10


def default_output_dir() -> Path:
    return Path(os.environ.get("QET_OUT", DEFAULT_OUT))


@dataclass(frozen=True)
class SweepRow:
    h: float
    E_A: float
    E12_int: float
    E_B_max: float
    theta_star: float
    E4_h: float
    E34_int: float
    S34_g: float
    I_QC: float
    dS34: float
    dS4: float
    J0_g: float
    J1_g: float
    J2_g: float
    Bp_g: float
    Bm_g: float
    C_g: float
    J0_f: float
    J1_f: float
    J2_f: float
    Bp_f: float
    Bm_f: float
    C_f: float
    ds_00: float
    ds_01: float
    ds_10: float
    ds_11: float
    dJ0: float
    dJ1: float
    dJ2: float
    dBp: float
    dBm: float
    dC: float
    dC0: float
    dC1: float
    dJ0_0: float
    dJ0_1: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def as_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class PointAnalysis:
    gs: GroundState
    run: ProtocolRun
    ledger: EntropyLedger
    eff_g: EffectiveHamiltonian
    eff_f: EffectiveHamiltonian
    spect_g: BlockSpectrum
    spect_f: BlockSpectrum
    decomposition: EntropyDecomposition
    row: SweepRow


def check_row(row: SweepRow, run: ProtocolRun) -> None:
    """Sum rules every row must satisfy before it is written."""
    checks = [
        ("sum ds_ji = dS34", row.ds_00 + row.ds_01 + row.ds_10 + row.ds_11, row.dS34, SUM_RULE_TOL),
        ("operator decomposition = dS34", row.dJ0 + row.dJ1 + row.dJ2 + row.dBp + row.dBm + row.dC,
         row.dS34, SUM_RULE_TOL),
        ("dC0 + dC1 = dC", row.dC0 + row.dC1, row.dC, SPLIT_TOL),
        ("dJ0_0 + dJ0_1 = dJ0", row.dJ0_0 + row.dJ0_1, row.dJ0, SPLIT_TOL),
        ("E4_h + E34_int = E_B", row.E4_h + row.E34_int, run.E_B, SPLIT_TOL),
    ]
    for name, lhs, rhs, tol in checks:
        if not abs(lhs - rhs) <= tol:
            raise InvariantViolation(f"row h={row.h!r}: {name} violated ({lhs!r} vs {rhs!r})")


def analyze_point(h: float, theta: float | None = None, beta: float = BETA_DEFAULT) -> PointAnalysis:
    """Everything reported for one field value, at ``theta*`` unless given."""
    gs = solve_ground_state(h)
    run = run_protocol(gs, theta)
    ledger = entropy_ledger(gs.rho, run.outcomes, run.rho_f)
    rho34_g = partial_trace(gs.rho, (3, 4))
    rho34_f = partial_trace(run.rho_f, (3, 4))
    eff_g = effective_hamiltonian(rho34_g, beta)
    eff_f = effective_hamiltonian(rho34_f, beta)
    spect_g = block_spectrum(eff_g)
    spect_f = block_spectrum(eff_f)
    dec = entropy_decomposition(eff_g, eff_f, spect_g, spect_f, rho34_g, rho34_f)

    values = {
        "h": gs.h,
        "E_A": run.E_A,
        "E12_int": run.breakdown.E12_int,
        "E_B_max": run.E_B_max,
        "theta_star": run.theta_star,
        "E4_h": run.breakdown.E4_h,
        "E34_int": run.breakdown.E34_int,
        "S34_g": ledger.S34_g,
        "I_QC": ledger.I_QC,
        "dS34": ledger.dS34,
        "dS4": ledger.dS4,
    }
    for tag, eff in (("g", eff_g), ("f", eff_f)):
        for name, value in eff.coefficients().items():
            values[f"{name}_{tag}"] = value
    for j in (0, 1):
        for i in (0, 1):
            values[f"ds_{j}{i}"] = float(dec.ds[j, i])
    values.update(dJ0=dec.dJ0, dJ1=dec.dJ1, dJ2=dec.dJ2, dBp=dec.dBp, dBm=dec.dBm, dC=dec.dC,
                  dC0=dec.dC_j[0], dC1=dec.dC_j[1], dJ0_0=dec.dJ0_j[0], dJ0_1=dec.dJ0_j[1])
    row = SweepRow(**{k: float(v) for k, v in values.items()})
    check_row(row, run)
    return PointAnalysis(gs, run, ledger, eff_g, eff_f, spect_g, spect_f, dec, row)


@dataclass(frozen=True)
class SweepConfig:
    h_min: float = 0.0
    h_max: float = 0.99
    steps: int = 100
    theta_grid_resolution: int = 1000
    output_dir: Path = dataclasses.field(default_factory=default_output_dir)
    emit_svg: bool = False

    def __post_init__(self):
        if not (0.0 <= self.h_min < self.h_max < 1.0):
            raise ConfigError(f"need 0 <= h_min < h_max < 1, got [{self.h_min}, {self.h_max}]")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError(f"steps must be an integer >= 2, got {self.steps}")
        if self.theta_grid_resolution < 1:
            raise ConfigError("theta_grid_resolution must be positive")

    def grid(self) -> np.ndarray:
        return np.linspace(self.h_min, self.h_max, int(self.steps))


def verify_theta_star(analysis: PointAnalysis, resolution: int, tol: float = 1e-8) -> None:
    """Dense-grid check that no feedback angle beats ``E_B^max``."""
    thetas = np.linspace(0.0, np.pi, resolution, endpoint=False)
    best = float(np.max(closed_form_EB(analysis.gs, thetas)))
    if best > analysis.run.E_B_max + tol:
        raise InvariantViolation(
            f"row h={analysis.row.h!r}: theta grid reaches {best!r} above E_B_max {analysis.run.E_B_max!r}"
        )


def run_sweep(config: SweepConfig) -> list[PointAnalysis]:
    out = []
    for h in config.grid():
        analysis = analyze_point(float(h))
        verify_theta_star(analysis, config.theta_grid_resolution)
        out.append(analysis)
    return out


def format_value(x: float) -> str:
    return format(float(x), "#.17g")


def write_csv(path: Path, rows: Sequence[SweepRow]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = SweepRow.columns()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(getattr(row, c)) for c in columns])
    return path


def read_csv(path: Path) -> list[SweepRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SweepRow.columns():
            raise InvariantViolation(f"{path}: unexpected header {reader.fieldnames}")
        return [SweepRow(**{k: float(v) for k, v in rec.items()}) for rec in reader]


def write_table(path: Path, columns: dict[str, Iterable[float]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [list(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for values in zip(*data):
            writer.writerow([format_value(v) for v in values])
    return path


FIGURES = {
    "fig1": ("S34_g", "I_QC"),
    "fig2": ("E_A", "E12_int"),
    "fig3": ("E_B_max", ("0.446 dS34", 0.446, "dS34")),
    "fig4": ("E_B_max", "E4_h", "E34_int"),
    "fig5": ("E_B_max", ("-0.334 dS4", -0.334, "dS4")),
    "fig6": ("J0_g", "J1_g", "J2_g", "Bp_g", "Bm_g", "C_g", "J0_f", "J1_f", "J2_f", "Bp_f", "Bm_f", "C_f"),
    "fig7": ("ds_00", "ds_01", "ds_10", "ds_11"),
    "fig8a": ("dJ0", "dJ1", "dJ2", "dBp", "dBm", "dC"),
    "fig8b": ("dC0", "dC1", "dJ0_0", "dJ0_1"),
}


def _series(rows: Sequence[SweepRow], spec) -> tuple[str, np.ndarray]:
    if isinstance(spec, tuple):
        label, scale, col = spec
        return label, scale * np.array([getattr(r, col) for r in rows])
    return spec, np.array([getattr(r, spec) for r in rows])


def plot_lines(path: Path, x: np.ndarray, series: dict[str, np.ndarray], xlabel: str = "h") -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y in series.items():
        ax.plot(x, y, label=label)
    ax.set_xlim(float(np.min(x)), float(np.max(x)))
    ax.set_xlabel(xlabel)
    ax.axhline(0.0, color="0.8", lw=0.5)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return Path(path)


def write_figures(out_dir: Path, rows: Sequence[SweepRow]) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    x = np.array([r.h for r in rows])
    paths = []
    for name, specs in FIGURES.items():
        series = dict(_series(rows, s) for s in specs)
        paths.append(plot_lines(out_dir / f"{name}.svg", x, series))
    return paths
