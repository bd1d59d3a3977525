"""Command line: catalog inspection, witness curves, T_E tables, figure data,
and the dense-route self-verification suite.

Exit codes: 0 success, 1 verification failure, 2 usage/parse error,
3 unusable ion, 4 I/O failure.  All output is machine-readable; numbers are
formatted with 6 significant digits so identical invocations produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import dense
from .angular import Convention, HalfInt, SpinOrbitSystem, multiplets
from .ions import (
    CATALOG,
    CatalogError,
    IonRecord,
    UnknownIonError,
    hund_rules,
    ion_record,
    load_catalog,
)
from .thermal import entanglement_temperature, mean_energy, witness_curve

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_ION = 3
EXIT_IO = 4

_CONVENTIONS = {
    "level": Convention.LEVEL_UNIFORM,
    "multiplet": Convention.MULTIPLET_DEGENERATE,
}

CURVE_HEADER = "T_K,mean_energy_K,witness_K"


class _CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code
        self.message = message


def _fmt(value: float) -> str:
    return format(value, ".6g")


def _fmt_halfint(h: HalfInt) -> str:
    return str(h.twice // 2) if h.is_integer else str(h.twice / 2)


def _fmt_optional(value: float | None) -> str:
    return "" if value is None else _fmt(value)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sowitness",
        description="Spin-orbit thermal entanglement witnesses for rare-earth ions.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def catalog_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument("--catalog", metavar="PATH",
                       help="JSON ion catalog replacing the embedded one")

    def output_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", metavar="PATH",
                       help="write to this file instead of standard output")

    def convention_flag(p: argparse.ArgumentParser, default: str) -> None:
        p.add_argument("--convention", choices=sorted(_CONVENTIONS), default=default,
                       help=f"thermal weighting convention (default: {default})")

    def range_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tmin", type=float, default=1.0, help="grid start in K (default 1)")
        p.add_argument("--tmax", type=float, default=6000.0, help="grid end in K (default 6000)")
        p.add_argument("--steps", type=int, default=600, help="grid points (default 600)")

    def tolerance_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tolerance", type=float, default=1e-3,
                       help="bisection width for the zero of the witness, in K")

    ions = commands.add_parser("ions", help="list the active catalog")
    ions.add_argument("--format", choices=("csv", "json"), default="csv")
    catalog_flag(ions)
    output_flag(ions)

    witness = commands.add_parser("witness", help="witness curve for one ion")
    witness.add_argument("--ion", required=True, metavar="SYMBOL")
    convention_flag(witness, "level")
    range_flags(witness)
    catalog_flag(witness)
    output_flag(witness)

    te = commands.add_parser("te", help="entanglement temperatures")
    te.add_argument("--ion", default="all", metavar="SYMBOL",
                    help='one symbol, or "all" for the whole catalog')
    convention_flag(te, "level")
    tolerance_flag(te)
    catalog_flag(te)
    output_flag(te)

    figure1 = commands.add_parser(
        "figure1", help="witness curves for all light ions plus a plotting script"
    )
    figure1.add_argument("--outdir", default=".", metavar="DIR")
    convention_flag(figure1, "level")
    range_flags(figure1)
    catalog_flag(figure1)

    verify = commands.add_parser("verify", help="run the dense-route cross-checks")
    verify.add_argument("--seed", type=int, default=1)
    verify.add_argument("--samples", type=int, default=1000,
                        help="product states sampled per ion (default 1000)")
    catalog_flag(verify)

    custom = commands.add_parser("custom", help="ad-hoc system from quantum numbers")
    custom.add_argument("--two-s", type=int, required=True, metavar="INT",
                        help="doubled spin quantum number 2s")
    custom.add_argument("--two-l", type=int, required=True, metavar="INT",
                        help="doubled orbital quantum number 2l")
    custom.add_argument("--zeta", type=float, required=True, metavar="KELVIN")
    actions = custom.add_subparsers(dest="action", required=True)
    custom_witness = actions.add_parser("witness", help="witness curve")
    convention_flag(custom_witness, "multiplet")
    range_flags(custom_witness)
    output_flag(custom_witness)
    custom_te = actions.add_parser("te", help="entanglement temperature")
    convention_flag(custom_te, "multiplet")
    tolerance_flag(custom_te)
    output_flag(custom_te)

    return parser


def _active_catalog(args: argparse.Namespace) -> tuple[IonRecord, ...]:
    path = getattr(args, "catalog", None)
    if path is None:
        return CATALOG
    try:
        with open(path, "rb") as handle:
            loaded = load_catalog(handle)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot read catalog: {exc}") from exc
    except CatalogError as exc:
        raise _CliError(EXIT_USAGE, f"invalid catalog: {exc}") from exc
    # an empty (but well-formed) catalog falls back to the embedded data
    return loaded or CATALOG


def _emit(args: argparse.Namespace, text: str) -> None:
    path = getattr(args, "output", None)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write output: {exc}") from exc


def _curve_csv(system: SpinOrbitSystem, args: argparse.Namespace) -> str:
    try:
        curve = witness_curve(system, args.tmin, args.tmax, args.steps)
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    lines = [CURVE_HEADER]
    for point in curve.points:
        lines.append(f"{_fmt(point.temperature)},{_fmt(point.mean_energy)},{_fmt(point.witness)}")
    return "\n".join(lines) + "\n"


def parse_witness_csv(text: str) -> list[tuple[float, float, float]]:
    """Parse a curve CSV back into (T, mean energy, witness) rows."""
    lines = text.splitlines()
    if not lines or lines[0] != CURVE_HEADER:
        raise ValueError(f"expected header {CURVE_HEADER!r}")
    rows = []
    for line in lines[1:]:
        t_k, mean_k, witness_k = line.split(",")
        rows.append((float(t_k), float(mean_k), float(witness_k)))
    return rows


def _witness_system(record: IonRecord, convention: Convention) -> SpinOrbitSystem:
    """System for the witness command; rejects ions the witness cannot probe."""
    if record.zeta is None or record.s.twice == 0 or record.l.twice == 0:
        if record.l.twice == 0:
            detail = "witness degenerate (l = 0)"
        elif record.s.twice == 0:
            detail = "witness degenerate (s = 0)"
        else:
            detail = "no coupling constant in the catalog"
        raise _CliError(EXIT_ION, f"{record.symbol}: {detail}")
    return record.system(convention)


def _run_ions(args: argparse.Namespace) -> int:
    catalog = _active_catalog(args)
    if args.format == "json":
        document = {
            "ions": [
                {
                    "symbol": record.symbol,
                    "n4f": record.n4f,
                    "deltaE_K": record.delta_e,
                    "zeta_K": record.zeta,
                    "te_paper_K": record.te_reference,
                }
                for record in catalog
            ]
        }
        _emit(args, json.dumps(document, indent=2) + "\n")
        return EXIT_OK
    lines = ["symbol,n4f,s,l,j0,deltaE_K,zeta_K,dim"]
    for record in catalog:
        dim = (record.s.twice + 1) * (record.l.twice + 1)
        lines.append(",".join((
            record.symbol,
            str(record.n4f),
            _fmt_halfint(record.s),
            _fmt_halfint(record.l),
            _fmt_halfint(record.j0),
            _fmt_optional(record.delta_e),
            _fmt_optional(record.zeta),
            str(dim),
        )))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _run_witness(args: argparse.Namespace) -> int:
    catalog = _active_catalog(args)
    try:
        record = ion_record(args.ion, catalog)
    except UnknownIonError as exc:
        raise _CliError(EXIT_ION, str(exc)) from exc
    system = _witness_system(record, _CONVENTIONS[args.convention])
    _emit(args, _curve_csv(system, args))
    return EXIT_OK


def _te_rows(records: Sequence[tuple[str, SpinOrbitSystem]], convention_name: str,
             tolerance: float) -> str:
    lines = ["symbol,convention,te_K,reason"]
    for name, system in records:
        result = entanglement_temperature(system, tolerance)
        te_text = "none" if result.temperature is None else _fmt(result.temperature)
        lines.append(f"{name},{convention_name},{te_text},{result.status.value}")
    return "\n".join(lines) + "\n"


def _run_te(args: argparse.Namespace) -> int:
    catalog = _active_catalog(args)
    if not args.tolerance > 0:
        raise _CliError(EXIT_USAGE, "tolerance must be positive")
    convention = _CONVENTIONS[args.convention]
    if args.ion.strip().lower() == "all":
        records = list(catalog)
    else:
        try:
            records = [ion_record(args.ion, catalog)]
        except UnknownIonError as exc:
            raise _CliError(EXIT_ION, str(exc)) from exc
    pairs = []
    for record in records:
        if record.zeta is None and record.s.twice != 0 and record.l.twice != 0:
            raise _CliError(EXIT_ION, f"{record.symbol}: no coupling constant in the catalog")
        pairs.append((record.symbol, record.system(convention)))
    _emit(args, _te_rows(pairs, args.convention, args.tolerance))
    return EXIT_OK


_PLOT_PROLOGUE = '''#!/usr/bin/env python3
"""Render the witness curves emitted alongside this script."""
import csv
import os.path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
'''

_PLOT_BODY = '''
fig, ax = plt.subplots(figsize=(7.5, 5.0))
for symbol, filename in CURVES:
    temperatures, values = [], []
    with open(os.path.join(HERE, filename), newline="") as handle:
        for row in csv.DictReader(handle):
            temperatures.append(float(row["T_K"]))
            values.append(float(row["witness_K"]))
    ax.plot(temperatures, values, label=symbol)
ax.axhline(0.0, color="black", linewidth=0.8, linestyle="--")
ax.set_xlabel("T (K)")
ax.set_ylabel("witness (K)")
ax.set_title("Thermal spin-orbit entanglement witness")
ax.legend(loc="lower right")
fig.tight_layout()
target = os.path.join(HERE, "figure1.png")
fig.savefig(target, dpi=200)
print(target)
'''


def _run_figure1(args: argparse.Namespace) -> int:
    catalog = _active_catalog(args)
    convention = _CONVENTIONS[args.convention]
    light = [r for r in catalog if r.light and r.zeta is not None]
    try:
        os.makedirs(args.outdir, exist_ok=True)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot create output directory: {exc}") from exc
    written = []
    for record in light:
        filename = f"figure1_{record.symbol}.csv"
        path = os.path.join(args.outdir, filename)
        csv_text = _curve_csv(record.system(convention), args)
        try:
            with open(path, "w", encoding="utf-8", newline="") as handle:
                handle.write(csv_text)
        except OSError as exc:
            raise _CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc
        written.append((record.symbol, filename))
    script = _PLOT_PROLOGUE + f"CURVES = {written!r}\n" + _PLOT_BODY
    script_path = os.path.join(args.outdir, "plot_figure1.py")
    try:
        with open(script_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(script)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {script_path}: {exc}") from exc
    for _, filename in written:
        sys.stdout.write(os.path.join(args.outdir, filename) + "\n")
    sys.stdout.write(script_path + "\n")
    return EXIT_OK


def _run_custom(args: argparse.Namespace) -> int:
    if args.two_s < 0 or args.two_l < 0:
        raise _CliError(EXIT_USAGE, "doubled quantum numbers must be non-negative")
    if not math.isfinite(args.zeta):
        raise _CliError(EXIT_USAGE, "coupling must be finite")
    try:
        system = SpinOrbitSystem(
            HalfInt(args.two_s), HalfInt(args.two_l), args.zeta,
            _CONVENTIONS[args.convention],
        )
    except ValueError as exc:
        raise _CliError(EXIT_USAGE, str(exc)) from exc
    if args.action == "witness":
        _emit(args, _curve_csv(system, args))
        return EXIT_OK
    if not args.tolerance > 0:
        raise _CliError(EXIT_USAGE, "tolerance must be positive")
    _emit(args, _te_rows([("custom", system)], args.convention, args.tolerance))
    return EXIT_OK


def _check_line(name: str, ok: bool, detail: str) -> str:
    return f"{name}: {'pass' if ok else 'fail'} {detail}"


def _run_verify(args: argparse.Namespace) -> int:
    catalog = _active_catalog(args)
    if args.samples < 1:
        raise _CliError(EXIT_USAGE, "samples must be at least 1")
    rng = np.random.default_rng(args.seed)
    coupled = [r for r in catalog if r.zeta is not None]
    lines = []
    all_ok = True

    def record_check(name: str, ok: bool, detail: str) -> None:
        nonlocal all_ok
        all_ok = all_ok and ok
        lines.append(_check_line(name, ok, detail))

    mismatches = sum(
        1 for r in catalog if hund_rules(r.n4f) != (r.s, r.l, r.j0)
    )
    record_check("hund-rules", mismatches == 0, f"mismatches={mismatches}")

    spectrum_worst = 0.0
    for record in coupled:
        system = record.system(Convention.MULTIPLET_DEGENERATE)
        computed = dense.eigen_spectrum(dense.build_hamiltonian(system))
        expected = np.sort(np.concatenate([
            np.full(level.degeneracy, level.energy) for level in multiplets(system)
        ]))
        deviation = np.max(np.abs(computed - expected) / np.maximum(np.abs(expected), 1.0))
        spectrum_worst = max(spectrum_worst, float(deviation))
    record_check("spectrum-equivalence", spectrum_worst <= 1e-9,
                 f"max_rel_dev={_fmt(spectrum_worst)}")

    trace_worst = 0.0
    grid = np.geomspace(1.0, 1e6, 50)
    for record in coupled:
        system = record.system(Convention.MULTIPLET_DEGENERATE)
        for temperature in grid:
            a = dense.thermal_mean_energy(system, float(temperature))
            b = mean_energy(system, float(temperature))
            trace_worst = max(trace_worst, abs(a - b) / max(abs(a), abs(b), 1e-300))
    record_check("trace-equivalence", trace_worst <= 1e-10,
                 f"max_rel_dev={_fmt(trace_worst)}")

    identity_worst = 0.0
    bound_margin = math.inf
    for record in coupled:
        system = record.system(Convention.MULTIPLET_DEGENERATE)
        floor = -system.separable_bound
        for _ in range(args.samples):
            sample = dense.sample_product_state(system, rng)
            factored = system.zeta * float(
                np.dot(sample.spin_vector, sample.orbital_vector)
            )
            identity_worst = max(
                identity_worst,
                abs(sample.energy - factored) / (1.0 + abs(sample.energy)),
            )
            bound_margin = min(bound_margin, sample.energy - floor)
    record_check("product-energy-identity", identity_worst <= 1e-9,
                 f"max_rel_dev={_fmt(identity_worst)}")
    record_check("separable-bound", bound_margin >= -1e-9,
                 f"min_margin_K={_fmt(bound_margin)}")

    te_worst = 0.0
    for record in coupled:
        if record.te_reference is None:
            continue
        system = record.system(Convention.LEVEL_UNIFORM)
        result = entanglement_temperature(system)
        if result.temperature is None:
            te_worst = math.inf
            continue
        te_worst = max(te_worst, abs(result.temperature - record.te_reference))
    record_check("reference-te", te_worst <= 1.0, f"max_abs_dev_K={_fmt(te_worst)}")

    lines.append(f"verify: {'pass' if all_ok else 'fail'}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if all_ok else EXIT_VERIFY


_RUNNERS = {
    "ions": _run_ions,
    "witness": _run_witness,
    "te": _run_te,
    "figure1": _run_figure1,
    "verify": _run_verify,
    "custom": _run_custom,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except _CliError as error:
        print(f"error: {error.message}", file=sys.stderr)
        return error.code
    except RuntimeError as error:
        # bracket-cap and eigensolver-convergence failures surface as
        # verification failures rather than tracebacks
        print(f"error: {error}", file=sys.stderr)
        return EXIT_VERIFY


def run() -> None:
    sys.exit(main())
