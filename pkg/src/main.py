import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from src import __version__
from src.biophoto_models import MEMORY_PANELS, SaturationParams, memory_readout, memory_transmissivity
from src.discrimination_bounds import (
    DIVERGENCE_CAP,
    discrimination_bounds,
    fidelity_lower_bound,
    gaussian_fidelity_pure_mixed,
    qbb,
    qcb,
    s_overlap,
)
from src.errors import DomainError, NumericError
from src.figures import FIGURE_IDS, FigureSpec, default_spec, write_figure
from src.fock_oracle import (
    DEFAULT_CUTOFF,
    apply_loss_kraus,
    coherent_fock,
    density_matrix,
    fidelity_fock,
    helstrom_fock,
    s_overlap_fock,
    tmsv_fock,
)
from src.gaussian_core import loss_on_signal, tmsv_state
from src.optimize import S_GRID_POINTS
from src.transmitters import BROADBAND, TransmitterConfig, TransmitterKind, coherent_error, compare


logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "data/output"

VALIDATE_NBARS = (0.5, 1.0, 2.0)
VALIDATE_TAUS = (0.25, 0.5, 0.9)
VALIDATE_S = tuple(round(0.1 * k, 1) for k in range(1, 10))

S_OVERLAP_TOL = 1e-6
FIDELITY_TOL = 1e-8
SANDWICH_SLACK = 1e-9
HELSTROM_TOL = 1e-8


# -------------------------------
# BOUNDS AT ONE POINT
# -------------------------------

def run_bounds(args: argparse.Namespace) -> dict:
    """
    Both transmitters at one (nbar, tau, M[, r]) point, plus the full
    Gaussian bound chain for the EPR pair.
    """
    copies = args.copies
    if args.total_nbar is not None:
        nbar = args.total_nbar / copies
    else:
        nbar = args.nbar

    point = compare(
        nbar,
        args.tau,
        copies,
        r=args.r,
        n_grid=args.s_grid,
        divergence_cap=args.divergence_cap,
    )
    tmsv = tmsv_state(nbar)
    chain = discrimination_bounds(tmsv, loss_on_signal(tmsv, args.tau), copies)

    record = point.to_dict()
    record["total_nbar"] = nbar * copies
    record["epr_bounds"] = chain.to_dict()
    record["version"] = __version__
    return record


# -------------------------------
# FIGURE SWEEPS
# -------------------------------

def _parse_assignments(items: list[str], flag: str) -> dict[str, str]:
    parsed = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise DomainError(f"{flag} expects NAME=VALUE, got {item!r}")
        parsed[key.strip().replace("-", "_")] = value.strip()
    return parsed


def _apply_grids(spec: FigureSpec, items: list[str]) -> FigureSpec:
    for name, value in _parse_assignments(items, "--grid").items():
        parts = value.split(":")
        if len(parts) != 3:
            raise DomainError(f"--grid expects NAME=START:STOP:NUM, got {name}={value}")
        try:
            start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as e:
            raise DomainError(f"bad grid {name}={value}: {e}") from e
        spec = spec.with_grid(name, start, stop, num)
    return spec


def build_figure_spec(figure_id: str, params: dict[str, str], grids: list[str]) -> FigureSpec:
    spec = default_spec(figure_id)
    if params:
        spec = spec.with_params(params)
    return _apply_grids(spec, grids)


def run_figure(spec: FigureSpec, out_path: Path, fmt: str = "csv") -> Path:
    written = write_figure(spec, out_path, fmt)
    print(f"📈 Figure {spec.figure_id} written to: {written}")
    return written


def _default_out(figure_id: str, fmt: str) -> Path:
    return Path(DEFAULT_OUTPUT_DIR) / f"{figure_id}.{fmt}"


def _shortcut_params(args: argparse.Namespace, names: dict[str, str]) -> dict[str, str]:
    """
    Map dedicated flags (--total-nbar, --c0, ...) onto figure parameters.
    """
    params = {}
    for attr, key in names.items():
        value = getattr(args, attr, None)
        if value is not None and value is not False:
            params[key] = str(value)
    return params


def cmd_figure(args: argparse.Namespace) -> int:
    params = _shortcut_params(args, {"total_nbar": "total_nbar", "copies": "m_copies", "panel": "panel"})
    params.update(_parse_assignments(args.param, "--param"))
    spec = build_figure_spec(args.figure_id, params, args.grid)
    run_figure(spec, Path(args.out) if args.out else _default_out(args.figure_id, args.format), args.format)
    return 0


def cmd_growth(args: argparse.Namespace) -> int:
    figure_id = "degrade-time" if args.degraded else "growth-time"
    params = _shortcut_params(
        args,
        {"c0": "c0", "g": "g", "gamma": "gamma", "epsilon_l": "epsilon_l", "total_nbar": "total_nbar"},
    )
    spec = build_figure_spec(figure_id, params, args.grid)
    run_figure(spec, Path(args.out) if args.out else _default_out(figure_id, args.format), args.format)
    return 0


def cmd_memory(args: argparse.Namespace) -> int:
    panel = MEMORY_PANELS[args.panel]
    theta1 = args.theta1 if args.theta1 is not None else panel.theta1
    theta2 = args.theta2 if args.theta2 is not None else panel.theta2

    if args.total_nbar is not None:
        sp = SaturationParams(theta1, theta2)
        record = {
            "total_nbar": args.total_nbar,
            "theta1": theta1,
            "theta2": theta2,
            "tau": memory_transmissivity(args.total_nbar, sp),
        }
        for label, config in (
            ("i_coh", TransmitterConfig.with_total(TransmitterKind.COHERENT, 0.0)),
            ("i_quant_m1", TransmitterConfig.with_total(TransmitterKind.EPR, 0.0, 1)),
            ("i_quant_broadband", TransmitterConfig.with_total(TransmitterKind.EPR, 0.0, BROADBAND)),
        ):
            record[label] = memory_readout(args.total_nbar, sp, config)
        _emit_json(record, args.out)
        return 0

    params = {"panel": args.panel, "theta1": str(theta1), "theta2": str(theta2)}
    spec = build_figure_spec("memory", params, args.grid)
    run_figure(spec, Path(args.out) if args.out else _default_out("memory", args.format), args.format)
    return 0


# -------------------------------
# ORACLE VALIDATION
# -------------------------------

@dataclass
class ValidationCase:
    nbar: float
    tau: float
    s_overlap_dev: float
    fidelity_dev: float
    fidelity_tol: float
    sandwich_violation: float
    coherent_helstrom_dev: float
    tail_mass: float

    @property
    def failures(self) -> list[str]:
        failed = []
        if not self.s_overlap_dev < S_OVERLAP_TOL:
            failed.append("s_overlap")
        if not self.fidelity_dev < self.fidelity_tol:
            failed.append("fidelity")
        if not self.sandwich_violation <= SANDWICH_SLACK:
            failed.append("sandwich")
        if not self.coherent_helstrom_dev < HELSTROM_TOL:
            failed.append("coherent_helstrom")
        return failed


@dataclass
class ValidationReport:
    cutoff: int
    cases: list[ValidationCase] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(not case.failures for case in self.cases)

    def max_deviation(self, attr: str) -> float:
        return max((getattr(case, attr) for case in self.cases), default=0.0)


def validate_case(nbar: float, tau: float, cutoff: int) -> ValidationCase:
    """
    Compare the Gaussian closed forms with the Fock-space oracle for the
    TMSV / lossy-TMSV pair and for the coherent pair with |alpha|^2 = nbar.
    """
    tmsv = tmsv_state(nbar)
    lossy = loss_on_signal(tmsv, tau)
    rho0 = density_matrix(tmsv_fock(nbar, cutoff), cutoff, 2)
    rho1 = apply_loss_kraus(rho0, tau, mode=0)

    s_dev = max(abs(s_overlap_fock(rho0, rho1, s) - s_overlap(tmsv, lossy, s)) for s in VALIDATE_S)

    fidelity = gaussian_fidelity_pure_mixed(tmsv, lossy)
    fid_dev = abs(fidelity_fock(rho0, rho1) - fidelity)

    helstrom = helstrom_fock(rho0, rho1)
    chain = [fidelity_lower_bound(fidelity, 1), helstrom, qcb(tmsv, lossy, 1), qbb(tmsv, lossy, 1)]
    violation = max([lo - hi for lo, hi in zip(chain, chain[1:])] + [0.0])

    alpha = math.sqrt(nbar)
    coh0 = density_matrix(coherent_fock(alpha, cutoff), cutoff, 1)
    coh1 = density_matrix(coherent_fock(math.sqrt(tau) * alpha, cutoff), cutoff, 1)
    coh_dev = abs(helstrom_fock(coh0, coh1) - coherent_error(nbar, tau))

    # truncation alone shifts the normalized fidelity by about twice the tail
    tail = max(rho0.tail_mass, 0.0)
    return ValidationCase(
        nbar=nbar,
        tau=tau,
        s_overlap_dev=s_dev,
        fidelity_dev=fid_dev,
        fidelity_tol=FIDELITY_TOL + 2.0 * tail,
        sandwich_violation=violation,
        coherent_helstrom_dev=coh_dev,
        tail_mass=tail,
    )


def run_validate(args: argparse.Namespace) -> tuple[ValidationReport, int]:
    nbars = args.nbar or list(VALIDATE_NBARS)
    taus = args.tau or list(VALIDATE_TAUS)
    report = ValidationReport(cutoff=args.cutoff)

    for nbar in nbars:
        for tau in taus:
            logger.info("validating nbar=%g tau=%g at cutoff %d", nbar, tau, args.cutoff)
            report.cases.append(validate_case(nbar, tau, args.cutoff))

    print(f"🔬 Oracle validation at cutoff {report.cutoff} ({len(report.cases)} cases)")
    print(f"   max |dC_s|        : {report.max_deviation('s_overlap_dev'):.3e}  (tol {S_OVERLAP_TOL:.0e})")
    print(f"   max |dF|          : {report.max_deviation('fidelity_dev'):.3e}  (tol {FIDELITY_TOL:.0e} + 2*tail)")
    print(f"   max sandwich gap  : {report.max_deviation('sandwich_violation'):.3e}  (slack {SANDWICH_SLACK:.0e})")
    print(f"   max |dP_coh|      : {report.max_deviation('coherent_helstrom_dev'):.3e}  (tol {HELSTROM_TOL:.0e})")
    print(f"   max tail mass     : {report.max_deviation('tail_mass'):.3e}")

    if report.passed:
        print("✅ All oracle checks within tolerance")
        return report, 0

    print("❌ Tolerance breached:")
    print(f"   {'nbar':>6} {'tau':>6} {'|dC_s|':>10} {'|dF|':>10} {'sandwich':>10} {'|dP_coh|':>10}  failed")
    for case in report.cases:
        if case.failures:
            print(
                f"   {case.nbar:>6g} {case.tau:>6g} {case.s_overlap_dev:>10.3e} {case.fidelity_dev:>10.3e} "
                f"{case.sandwich_violation:>10.3e} {case.coherent_helstrom_dev:>10.3e}  {','.join(case.failures)}"
            )
    return report, 1


# -------------------------------
# ARGUMENTS
# -------------------------------

def _emit_json(record: dict, out: Optional[str]) -> None:
    text = json.dumps(record, indent=2, sort_keys=True)
    if out:
        out_path = Path(out)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8") as f:
            f.write(text + "\n")
        print(f"📦 Report saved to: {out_path}")
    else:
        print(text)


def _add_grid_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--grid",
        action="append",
        default=[],
        metavar="NAME=START:STOP:NUM",
        help="Override one grid axis (repeatable)",
    )


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", type=str, default=None, help=f"Output file (default: {DEFAULT_OUTPUT_DIR}/<figure>.<format>)")
    parser.add_argument("--format", choices=["csv", "json"], default="csv", help="Output format (default: csv)")


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Quantum bounds for detecting loss with coherent and EPR transmitters."
    )
    parser.add_argument("--verbose", action="store_true", help="Enable INFO-level logging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    bounds = sub.add_parser("bounds", help="Evaluate every bound at one parameter point")
    energy = bounds.add_mutually_exclusive_group(required=True)
    energy.add_argument("--nbar", type=float, help="Mean photons per signal mode")
    energy.add_argument("--total-nbar", type=float, help="Total mean photons, spread over --copies")
    bounds.add_argument("--tau", type=float, required=True, help="Channel transmissivity")
    bounds.add_argument("--copies", type=int, default=1, help="Number of probings M (default: 1)")
    bounds.add_argument("--r", type=float, default=None, help="False-positive exponent for the Hoeffding bounds")
    bounds.add_argument("--s-grid", type=int, default=S_GRID_POINTS, help=f"Grid points over s (default: {S_GRID_POINTS})")
    bounds.add_argument("--divergence-cap", type=float, default=DIVERGENCE_CAP, help=f"Hoeffding divergence cap (default: {DIVERGENCE_CAP:g})")
    bounds.add_argument("--format", choices=["json"], default="json", help="Output format")
    bounds.add_argument("--out", type=str, default=None, help="Write the JSON report here instead of stdout")

    figure = sub.add_parser("figure", help="Sweep a parameter grid for one figure")
    figure.add_argument("--figure-id", choices=FIGURE_IDS, required=True)
    _add_output_flags(figure)
    figure.add_argument("--total-nbar", type=float, default=None, help="Total photon budget, where the figure has one")
    figure.add_argument("--copies", type=int, default=None, help="Number of copies M, where the figure has one")
    figure.add_argument("--panel", choices=sorted(MEMORY_PANELS), default=None, help="Memory panel (memory figure)")
    figure.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="Override a model parameter (repeatable)")
    _add_grid_flag(figure)

    growth = sub.add_parser("growth", help="Error probability versus time for a growing sample")
    growth.add_argument("--c0", type=float, default=None, help="Asymptotic concentration")
    growth.add_argument("--g", type=float, default=None, help="Growth rate")
    growth.add_argument("--gamma", type=float, default=None, help="Photo-degradability")
    growth.add_argument("--epsilon-l", type=float, default=None, help="Beer-Lambert product (default: 1)")
    growth.add_argument("--total-nbar", type=float, default=None, help="Photons per readout")
    growth.add_argument("--degraded", action="store_true", help="Use the photo-degradable model")
    _add_output_flags(growth)
    _add_grid_flag(growth)

    memory = sub.add_parser("memory", help="Bits per cell read from a photo-degradable memory")
    memory.add_argument("--panel", choices=sorted(MEMORY_PANELS), default="a")
    memory.add_argument("--theta1", type=float, default=None)
    memory.add_argument("--theta2", type=float, default=None)
    memory.add_argument("--total-nbar", type=float, default=None, help="Evaluate a single point instead of a sweep")
    _add_output_flags(memory)
    _add_grid_flag(memory)

    validate = sub.add_parser("validate", help="Check the Gaussian formulas against the Fock-space oracle")
    validate.add_argument("--nbar", type=float, action="append", default=None, help="Photon number (repeatable)")
    validate.add_argument("--tau", type=float, action="append", default=None, help="Transmissivity (repeatable)")
    validate.add_argument("--cutoff", type=int, default=DEFAULT_CUTOFF, help=f"Fock cutoff per mode (default: {DEFAULT_CUTOFF})")

    return parser.parse_args(argv)


def main(argv: Optional[list[str]] = None) -> int:
    args = parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        if args.command == "bounds":
            _emit_json(run_bounds(args), args.out)
            return 0
        if args.command == "figure":
            return cmd_figure(args)
        if args.command == "growth":
            return cmd_growth(args)
        if args.command == "memory":
            return cmd_memory(args)
        _, code = run_validate(args)
        return code
    except (DomainError, NumericError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"❌ Cannot write output: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
