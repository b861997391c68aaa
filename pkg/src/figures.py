"""
Parameter sweeps behind each figure, and their CSV / JSON writers.

Every figure is a FigureSpec: a figure id, one or more grid axes and a flat
parameter dict. Rows are produced in a fixed order (the first axis is the
outer loop) and numbers are written with 9 significant digits, so the same
spec always produces byte-identical files.
"""
import csv
import io
import itertools
import json
import logging
import math
import numbers
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterator, Union

import numpy as np

from src import __version__
from src.biophoto_models import (
    MEMORY_PANELS,
    GrowthParams,
    SaturationParams,
    concentration_degraded,
    concentration_growth,
    error_vs_time,
    growth_gains,
    memory_readout,
    memory_transmissivity,
    transmissivity_at,
)
from src.errors import DomainError
from src.transmitters import (
    BROADBAND,
    TransmitterConfig,
    TransmitterKind,
    coherent_error,
    coherent_qhb,
    epr_qcb,
    epr_qcb_broadband,
    epr_qhb_closed_form,
    error_exponents,
    qhb_ratio,
    qhb_thresholds,
    rate_ratio,
)


logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 9
GRID_SCALES = ("linear", "log", "int")

Cell = Union[float, int, str]


# -------- TYPES --------

@dataclass(frozen=True)
class GridAxis:
    name: str
    start: float
    stop: float
    num: int
    scale: str = "linear"

    def __post_init__(self) -> None:
        if self.scale not in GRID_SCALES:
            raise DomainError(f"unknown grid scale {self.scale!r}")
        if self.num < 2:
            raise DomainError(f"grid {self.name} needs at least 2 points, got {self.num}")
        if not self.stop > self.start:
            raise DomainError(f"grid {self.name} is empty: [{self.start}, {self.stop}]")
        if self.scale == "log" and self.start <= 0:
            raise DomainError(f"log grid {self.name} must start above 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.num)
        if self.scale == "int":
            return np.unique(np.round(np.linspace(self.start, self.stop, self.num)).astype(int))
        return np.linspace(self.start, self.stop, self.num)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "num": self.num, "scale": self.scale}


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    axes: tuple[GridAxis, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.figure_id not in FIGURES:
            raise DomainError(f"unknown figure id {self.figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
        expected = [axis.name for axis in FIGURES[self.figure_id].axes]
        if [axis.name for axis in self.axes] != expected:
            raise DomainError(f"figure {self.figure_id} sweeps {expected}")

    @property
    def columns(self) -> list[str]:
        return FIGURES[self.figure_id].columns

    def with_params(self, overrides: dict[str, str]) -> "FigureSpec":
        """
        Override parameters from KEY=VALUE strings, converted to the type of
        the default value.
        """
        params = dict(self.params)
        for key, raw in overrides.items():
            if key not in params:
                raise DomainError(f"figure {self.figure_id} has no parameter {key!r}; known: {', '.join(sorted(params))}")
            params[key] = _coerce(raw, params[key])

        # a panel choice fills in its thetas unless they were given explicitly
        if "panel" in overrides:
            if params["panel"] not in MEMORY_PANELS:
                raise DomainError(f"unknown memory panel {params['panel']!r}")
            panel = MEMORY_PANELS[params["panel"]]
            if "theta1" not in overrides:
                params["theta1"] = panel.theta1
            if "theta2" not in overrides:
                params["theta2"] = panel.theta2
        return replace(self, params=params)

    def with_grid(self, name: str, start: float, stop: float, num: int) -> "FigureSpec":
        axes = []
        for axis in self.axes:
            if axis.name == name:
                axis = GridAxis(name, start, stop, num, axis.scale)
            axes.append(axis)
        if all(axis.name != name for axis in self.axes):
            raise DomainError(f"figure {self.figure_id} has no grid axis {name!r}")
        return replace(self, axes=tuple(axes))

    def header(self) -> dict:
        return {
            "figure_id": self.figure_id,
            "version": __version__,
            "params": self.params,
            "grids": {axis.name: axis.to_dict() for axis in self.axes},
        }


@dataclass(frozen=True)
class _FigureDef:
    axes: tuple[GridAxis, ...]
    params: dict
    columns: list[str]
    rows: Callable[[FigureSpec], Iterator[list[Cell]]]


def _coerce(raw: str, default: Any) -> Any:
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("true", "false", "1", "0"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError as e:
        raise DomainError(f"cannot read {raw!r} as {type(default).__name__}") from e
    return raw


# -------- SWEEPS --------

def _grid(spec: FigureSpec) -> Iterator[tuple]:
    return itertools.product(*(axis.values().tolist() for axis in spec.axes))


def _gain_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    m = spec.params["m_copies"]
    for nbar, tau in _grid(spec):
        p_coh = coherent_error(m * nbar, tau)
        p_quant = epr_qcb(nbar, tau, m)
        yield [nbar, tau, p_coh, p_quant, p_coh - p_quant]


def _rate_ratio_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    for nbar, tau in _grid(spec):
        kappa_coh, kappa_quant = error_exponents(nbar, tau)
        yield [nbar, tau, kappa_coh, kappa_quant, rate_ratio(nbar, tau)]


def _qhb_ratio_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    r_at = spec.params["r_at"]
    if r_at not in ("coh", "quant"):
        raise DomainError(f"r_at must be 'coh' or 'quant', got {r_at!r}")
    for nbar, tau in _grid(spec):
        r_coh, r_quant = qhb_thresholds(nbar, tau)
        r = r_coh if r_at == "coh" else r_quant
        ratio = qhb_ratio(nbar, tau, r)
        yield [
            nbar,
            tau,
            r_coh,
            r_quant,
            coherent_qhb(nbar, tau, r).h_value,
            epr_qhb_closed_form(nbar, tau, r).h_value,
            ratio.serialize(),
            int(r_coh < r_quant),
        ]


def _qcb_vs_copies_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    total = spec.params["total_nbar"]
    for tau, m in _grid(spec):
        yield [tau, m, epr_qcb(total / m, tau, m), epr_qcb_broadband(total, tau), coherent_error(total, tau)]


def _optimal_gain_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    for total, tau in _grid(spec):
        p_coh = coherent_error(total, tau)
        p_broadband = epr_qcb_broadband(total, tau)
        yield [total, tau, p_coh, p_broadband, p_coh - p_broadband]


def _growth_params(spec: FigureSpec) -> GrowthParams:
    p = spec.params
    return GrowthParams(c0=p["c0"], g=p["g"], gamma=p["gamma"], epsilon_l=p["epsilon_l"])


def _growth_gain_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    growth = _growth_params(spec)
    degraded = spec.params["degraded"]
    for total, t in _grid(spec):
        delta_1, delta_opt = growth_gains(t, total, growth, degraded)
        yield [total, t, transmissivity_at(t, total, growth, degraded), delta_1, delta_opt]


def _time_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    growth = _growth_params(spec)
    total = spec.params["total_nbar"]
    degraded = spec.params["degraded"]
    times = spec.axes[0].values().tolist()

    curves = [
        error_vs_time(times, total, TransmitterConfig.with_total(kind, total, m), growth, degraded)
        for kind, m in (
            (TransmitterKind.COHERENT, 1),
            (TransmitterKind.EPR, 1),
            (TransmitterKind.EPR, BROADBAND),
        )
    ]
    for i, t in enumerate(times):
        if degraded:
            c = concentration_degraded(t, total, growth)
        else:
            c = concentration_growth(t, growth)
        yield [t, c] + [curve[i][1] for curve in curves]


def _memory_rows(spec: FigureSpec) -> Iterator[list[Cell]]:
    sp = SaturationParams(spec.params["theta1"], spec.params["theta2"])
    configs = [
        TransmitterConfig.with_total(TransmitterKind.COHERENT, 0.0),
        TransmitterConfig.with_total(TransmitterKind.EPR, 0.0, 1),
        TransmitterConfig.with_total(TransmitterKind.EPR, 0.0, BROADBAND),
    ]
    for (total,) in _grid(spec):
        yield [total, memory_transmissivity(total, sp)] + [memory_readout(total, sp, cfg) for cfg in configs]


_NBAR = GridAxis("nbar", 0.1, 10.0, 100)
_TAU = GridAxis("tau", 0.0, 0.99, 100)
_TIME = GridAxis("t", 0.0, 1.0, 201)
_GAIN_COLUMNS = ["nbar", "tau", "p_coh", "p_quant_qcb", "delta"]
_TIME_COLUMNS = ["t", "concentration", "p_coh", "p_epr_m1", "p_epr_broadband"]

FIGURES: dict[str, _FigureDef] = {
    "gain-m1": _FigureDef((_NBAR, _TAU), {"m_copies": 1}, _GAIN_COLUMNS, _gain_rows),
    "gain-m20": _FigureDef((_NBAR, _TAU), {"m_copies": 20}, _GAIN_COLUMNS, _gain_rows),
    "rate-ratio": _FigureDef(
        (_NBAR, _TAU), {}, ["nbar", "tau", "kappa_coh", "kappa_quant", "rate_ratio"], _rate_ratio_rows
    ),
    "qhb-ratio": _FigureDef(
        (_NBAR, _TAU),
        {"r_at": "coh"},
        ["nbar", "tau", "r_coh", "r_quant", "h_coh", "h_quant", "qhb_ratio", "coh_below_quant"],
        _qhb_ratio_rows,
    ),
    "qcb-vs-copies": _FigureDef(
        (_TAU, GridAxis("m_copies", 1, 50, 50, "int")),
        {"total_nbar": 1.0},
        ["tau", "m_copies", "p_quant_qcb", "p_quant_broadband", "p_coh"],
        _qcb_vs_copies_rows,
    ),
    "optimal-gain": _FigureDef(
        (GridAxis("total_nbar", 0.5, 50.0, 100), _TAU),
        {},
        ["total_nbar", "tau", "p_coh", "p_quant_broadband", "delta_opt"],
        _optimal_gain_rows,
    ),
    "growth-gain": _FigureDef(
        (GridAxis("total_nbar", 1.0, 1000.0, 61, "log"), GridAxis("t", 0.005, 1.0, 200)),
        {"c0": 1.0, "g": 0.2, "gamma": 0.0, "epsilon_l": 1.0, "degraded": False},
        ["total_nbar", "t", "tau", "delta_1", "delta_opt"],
        _growth_gain_rows,
    ),
    "growth-time": _FigureDef(
        (_TIME,),
        {"c0": 1.0, "g": 0.2, "gamma": 0.0, "epsilon_l": 1.0, "total_nbar": 500.0, "degraded": False},
        _TIME_COLUMNS,
        _time_rows,
    ),
    "degrade-time": _FigureDef(
        (_TIME,),
        {"c0": 1.0, "g": 10.0, "gamma": 1.0, "epsilon_l": 1.0, "total_nbar": 100.0, "degraded": True},
        _TIME_COLUMNS,
        _time_rows,
    ),
    "memory": _FigureDef(
        (GridAxis("total_nbar", 1.0, 1e5, 101, "log"),),
        {"panel": "a", "theta1": MEMORY_PANELS["a"].theta1, "theta2": MEMORY_PANELS["a"].theta2},
        ["total_nbar", "tau", "i_coh", "i_quant_m1", "i_quant_broadband"],
        _memory_rows,
    ),
}

FIGURE_IDS = tuple(FIGURES)


def default_spec(figure_id: str) -> FigureSpec:
    if figure_id not in FIGURES:
        raise DomainError(f"unknown figure id {figure_id!r}; choose from {', '.join(FIGURE_IDS)}")
    definition = FIGURES[figure_id]
    return FigureSpec(figure_id, definition.axes, dict(definition.params))


def figure_rows(spec: FigureSpec) -> list[list[Cell]]:
    rows = list(FIGURES[spec.figure_id].rows(spec))
    logger.info("figure %s: %d rows", spec.figure_id, len(rows))
    return rows


# -------- SERIALIZATION --------

def format_cell(value: Cell) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, numbers.Integral):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, f".{SIGNIFICANT_DIGITS}g")


def _json_cell(value: Cell) -> Cell:
    text = format_cell(value)
    if isinstance(value, str) or text in ("inf", "-inf", "nan"):
        return text
    if isinstance(value, numbers.Integral):
        return int(value)
    return float(text)


def render_csv(spec: FigureSpec, rows: list[list[Cell]]) -> str:
    buffer = io.StringIO()
    buffer.write("# " + json.dumps(spec.header(), sort_keys=True) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(spec.columns)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def render_json(spec: FigureSpec, rows: list[list[Cell]]) -> str:
    document = dict(spec.header())
    document["columns"] = spec.columns
    document["rows"] = [[_json_cell(v) for v in row] for row in rows]
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def write_figure(spec: FigureSpec, out_path: Path, fmt: str = "csv") -> Path:
    if fmt not in ("csv", "json"):
        raise DomainError(f"unknown output format {fmt!r}")
    rows = figure_rows(spec)
    text = render_csv(spec, rows) if fmt == "csv" else render_json(spec, rows)

    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="") as f:
        f.write(text)
    return out_path
