"""Command-line sweeps producing CSV (or JSON) tables with provenance.

Subcommands::

    purity        purity of the epsilon -> 1 state versus sigma*tau_bar
    fi-curves     qfi_max, qfi, cfi_tcspc and cfi_wl on an (epsilon, sigma) grid
    borderline    Fisher informations scaled by the TCSPC value at one sigma
    hom           Hong-Ou-Mandel coincidence analysis and scheme verdict
    oracle-check  WL-basis QFI against the time-grid reference

Grids are either comma lists (``1.05,1.2``) or ``start:stop:count[:spacing]``
with spacing ``lin``, ``log`` or ``logoffset`` (logarithmic in ``epsilon - 1``).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import NumericsError
from .fisher import cfi_tcspc, fisher_point, limit_point, qfi_at, qfi_max_delta, sld_measurement
from .model import LifetimeModel, NumericsConfig, SpectralModel
from .oracle import TimeGrid, qfi_time_grid
from .state import purity_limit
from .two_photon import LossModel, hom_result, scheme_compare

logger = logging.getLogger("lifetime_qfi")

DEFAULT_EPSILON_GRID = "1.001:2:60:logoffset"
SIG_DIGITS = 12


class GridError(ValueError):
    pass


def parse_grid(text: str) -> list[float]:
    """Parse a comma list or a ``start:stop:count[:spacing]`` range."""
    text = text.strip()
    if ":" not in text:
        try:
            values = [float(v) for v in text.split(",") if v.strip()]
        except ValueError as exc:
            raise GridError(f"bad grid {text!r}: {exc}") from None
    else:
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise GridError(f"bad grid {text!r}: expected start:stop:count[:spacing]")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise GridError(f"bad grid {text!r}: {exc}") from None
        spacing = parts[3] if len(parts) == 4 else "lin"
        if count < 1:
            raise GridError("grid count must be >= 1")
        if spacing == "lin":
            values = np.linspace(start, stop, count)
        elif spacing == "log":
            if start <= 0 or stop <= 0:
                raise GridError("log grid needs positive bounds")
            values = np.geomspace(start, stop, count)
        elif spacing == "logoffset":
            if start <= 1 or stop <= 1:
                raise GridError("logoffset grid needs bounds above 1")
            values = 1.0 + np.geomspace(start - 1.0, stop - 1.0, count)
        else:
            raise GridError(f"unknown spacing {spacing!r}")
        values = [float(v) for v in values]
    if not values:
        raise GridError("grid is empty")
    return values


@dataclass
class SweepSpec:
    epsilon_grid: list[float]
    sigma_tau_bar_list: list[float]
    numerics: NumericsConfig = NumericsConfig()
    outputs: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.epsilon_grid or not self.sigma_tau_bar_list:
            raise GridError("grids must be nonempty")
        if any(e <= 0 for e in self.epsilon_grid):
            raise GridError("epsilon values must be positive")
        if any(s < 0 for s in self.sigma_tau_bar_list):
            raise GridError("sigma_tau_bar values must be >= 0")


def spectral_for(sigma_tau_bar: float) -> SpectralModel:
    if sigma_tau_bar == 0:
        return SpectralModel.delta()
    return SpectralModel.gaussian(sigma_tau_bar)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    return format(float(value), f".{SIG_DIGITS}g")


@dataclass
class Table:
    command: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    provenance: list[str] = field(default_factory=list)
    summary: list[str] = field(default_factory=list)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {
                "command": self.command,
                "provenance": self.provenance,
                "columns": self.columns,
                "rows": [[float(_fmt(v)) if not isinstance(v, str) else v for v in row]
                         for row in self.rows],
                "summary": self.summary,
            }
            return json.dumps(doc, indent=1, sort_keys=True) + "\n"
        lines = [f"# {line}" for line in self.provenance]
        lines.append(",".join(self.columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in self.rows)
        lines.extend(f"# {line}" for line in self.summary)
        return "\n".join(lines) + "\n"


def _provenance(command: str, numerics: NumericsConfig | None, spectra=()) -> list[str]:
    lines = [f"lifetime-qfi {__version__} {command}"]
    if numerics is not None:
        kv = " ".join(line.replace(" = ", "=") for line in numerics.to_kv().splitlines())
        lines.append(f"numerics: {kv}")
    for sp in spectra:
        lines.append(f"spectral: {sp.describe()}")
    lines.append("units: times in tau_bar, frequencies in 1/tau_bar; Fisher information per photon")
    return lines


# ---------------------------------------------------------------------------
# commands

def cmd_purity(sweep: SweepSpec) -> Table:
    table = Table("purity", ["sigma_tau_bar", "purity"],
                  provenance=_provenance("purity", None))
    for s in sweep.sigma_tau_bar_list:
        table.rows.append([s, purity_limit(s)])
    return table


def cmd_fi_curves(sweep: SweepSpec) -> tuple[Table, list[str]]:
    """Rows ordered by sigma, then epsilon.  Failing sigmas are skipped and reported."""
    spectra = [spectral_for(s) for s in sweep.sigma_tau_bar_list]
    table = Table("fi-curves",
                  ["epsilon", "sigma_tau_bar", "qfi_max", "qfi", "cfi_tcspc", "cfi_wl"],
                  provenance=_provenance("fi-curves", sweep.numerics, spectra))
    bounds = {e: (qfi_max_delta(e), cfi_tcspc(limit_point(e))) for e in sweep.epsilon_grid}
    failures = []
    for sigma, spectral in zip(sweep.sigma_tau_bar_list, spectra):
        try:
            rows = []
            for eps in sweep.epsilon_grid:
                point = fisher_point(eps, spectral, sweep.numerics)
                qmax, tcspc = bounds[eps]
                rows.append([eps, sigma, qmax, point.qfi, tcspc, point.cfi_wl])
        except NumericsError as exc:
            failures.append(f"sigma_tau_bar={sigma:g}: {exc}")
            continue
        table.rows.extend(rows)
    table.summary.extend(f"aborted {msg}" for msg in failures)
    return table, failures


def cmd_borderline(design_eps: float, sweep: SweepSpec) -> Table:
    sigma = sweep.sigma_tau_bar_list[0]
    spectral = spectral_for(sigma)
    table = Table("borderline",
                  ["epsilon", "qfi_over_tcspc", "cfi_wl_over_tcspc", "cfi_sld_over_tcspc"],
                  provenance=_provenance("borderline", sweep.numerics, [spectral])
                  + [f"design_eps: {design_eps!r}"])
    measurement = sld_measurement(design_eps, spectral, sweep.numerics)
    for eps in sweep.epsilon_grid:
        point = fisher_point(eps, spectral, sweep.numerics)
        tcspc = cfi_tcspc(point.epsilon)
        sld_cfi = measurement.cfi(point.epsilon, spectral, sweep.numerics)
        table.rows.append([eps, point.qfi / tcspc, point.cfi_wl / tcspc, sld_cfi / tcspc])
    return table


def cmd_hom(sweep: SweepSpec, loss: LossModel) -> Table:
    table = Table("hom", ["epsilon", "overlap", "p_coincidence", "hom_cfi", "info_fraction"],
                  provenance=_provenance("hom", None, [SpectralModel.delta()]))
    for eps in sweep.epsilon_grid:
        r = hom_result(eps)
        table.rows.append([eps, r.overlap, r.coincidence_prob, r.cfi, r.info_fraction])
    verdict = scheme_compare(loss)
    table.summary.append(f"scheme_compare p={loss.p!r} xi={loss.xi!r} verdict={verdict.value}")
    return table


def cmd_oracle_check(sweep: SweepSpec, grid: TimeGrid, tol: float) -> tuple[Table, list[str]]:
    spectra = [spectral_for(s) for s in sweep.sigma_tau_bar_list]
    table = Table("oracle-check",
                  ["epsilon", "sigma_tau_bar", "qfi_wl", "qfi_time_grid", "rel_diff"],
                  provenance=_provenance("oracle-check", sweep.numerics, spectra)
                  + [f"time grid: t_max={grid.t_max!r} n_points={grid.n_points}"])
    failures = []
    for sigma, spectral in zip(sweep.sigma_tau_bar_list, spectra):
        for eps in sweep.epsilon_grid:
            wl = qfi_at(eps, spectral, sweep.numerics)
            tg = qfi_time_grid(LifetimeModel(eps), spectral, grid, sweep.numerics.fd_step,
                               sweep.numerics.eig_clamp, sweep.numerics.neg_tol)
            rel = abs(tg - wl) / wl
            table.rows.append([eps, sigma, wl, tg, rel])
            if rel > tol:
                failures.append(f"epsilon={eps:g} sigma_tau_bar={sigma:g}: relative difference "
                                f"{rel:.3e} > {tol:g}")
    table.summary.extend(f"mismatch {msg}" for msg in failures)
    return table, failures


# ---------------------------------------------------------------------------
# argument handling

def _common(p: argparse.ArgumentParser, eps_default: str | None, sigma_default: str) -> None:
    if eps_default is not None:
        p.add_argument("--epsilon-grid", default=eps_default,
                       help=f"epsilon values (default {eps_default})")
    p.add_argument("--sigma-tau-bar", default=sigma_default,
                   help=f"dimensionless spectral widths (default {sigma_default})")
    p.add_argument("--nmax", type=int, default=None, help="WL truncation order (default 100)")
    p.add_argument("--config", default=None, help="numerics file of 'key = value' lines")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifetime-qfi",
        description="Fisher-information bounds for resolving two emission lifetimes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("purity", help="purity of the limiting state versus sigma*tau_bar")
    _common(p, None, "0.01:10:50:log")

    p = sub.add_parser("fi-curves", help="QFI and CFI curves over epsilon and sigma")
    _common(p, DEFAULT_EPSILON_GRID, "0.01,0.1,1")

    p = sub.add_parser("borderline", help="Fisher information scaled by TCSPC at one sigma")
    _common(p, "1.001:1.5:40:logoffset", "0.25")
    p.add_argument("--design-eps", type=float, required=True,
                   help="epsilon at which the SLD measurement is built")

    p = sub.add_parser("hom", help="Hong-Ou-Mandel coincidence analysis")
    _common(p, "1," + DEFAULT_EPSILON_GRID, "0")
    p.add_argument("--p", type=float, default=1.0, help="collection probability (default 1)")
    p.add_argument("--xi", type=float, default=0.5,
                   help="one-photon information fraction (default 0.5)")

    p = sub.add_parser("oracle-check", help="compare WL-basis QFI with the time-grid oracle")
    _common(p, "1.05,1.2,1.5", "0.01,0.1,0.25")
    p.add_argument("--t-max", type=float, default=40.0)
    p.add_argument("--n-points", type=int, default=4000)
    p.add_argument("--tol", type=float, default=5e-3, help="relative tolerance (default 5e-3)")
    return parser


def _epsilon_grid(text: str) -> list[float]:
    # allow a leading explicit value in front of a range, e.g. "1,1.001:2:60:logoffset"
    if ":" in text and "," in text:
        head, _, tail = text.rpartition(",")
        return parse_grid(head) + parse_grid(tail)
    return parse_grid(text)


def _numerics(args) -> NumericsConfig:
    numerics = NumericsConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                numerics = NumericsConfig.from_kv(fh.read())
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc.strerror}") from exc
    if args.nmax is not None:
        numerics = numerics.replace(n_max=args.nmax)
    return numerics


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    failures: list[str] = []
    try:
        numerics = _numerics(args)
        eps_grid = _epsilon_grid(args.epsilon_grid) if hasattr(args, "epsilon_grid") else [1.0]
        sweep = SweepSpec(eps_grid, parse_grid(args.sigma_tau_bar), numerics)
        if args.command == "purity":
            table = cmd_purity(sweep)
        elif args.command == "fi-curves":
            table, failures = cmd_fi_curves(sweep)
        elif args.command == "borderline":
            table = cmd_borderline(args.design_eps, sweep)
        elif args.command == "hom":
            table = cmd_hom(sweep, LossModel(args.p, args.xi))
        else:
            table, failures = cmd_oracle_check(sweep, TimeGrid(args.t_max, args.n_points),
                                               args.tol)
        _write(table.render(args.format), args.out)
    except (GridError, ValueError) as exc:
        print(f"lifetime-qfi: error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"lifetime-qfi: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"lifetime-qfi: {exc}", file=sys.stderr)
        return 1
    for msg in failures:
        print(f"lifetime-qfi: numerical failure: {msg}", file=sys.stderr)
    if args.command == "hom":
        print(table.summary[-1], file=sys.stderr)
    return 3 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
