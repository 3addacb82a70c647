"""Command-line front end.

Exit codes: 0 success, 1 usage or file-format error, 2 the spectrum admits no
perfect-transfer window, 3 numerical failure or violated invariant.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from pstchain import __version__
from pstchain.chainfile import ChainFileError, read_chain, chain_to_dict, write_chain
from pstchain.core import (
    GapSequence,
    Spectrum,
    optimal_chain,
    spectrum_from_gaps,
    validate_pst_spectrum,
    wrap_phase,
)
from pstchain.dynamics import fidelity_curve, transfer_amplitude
from pstchain.engineer import reconstruct_chain
from pstchain.errors import NoTransferWindowError, NumericalError, SpinChainError
from pstchain.metrics import efficiency, ml_bound
from pstchain.spectral import eigendecompose

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_PST = 2
EXIT_NUMERICAL = 3

BENCH_GAP_ALPHABET = (1, 3, 5, 7)
BENCH_ETA_TOL = 1e-9
BENCH_FIDELITY_TOL = 1e-8
RANGE_BOUND_RTOL = 1e-9


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _open_text_out(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _parse_time(text: str) -> float | None:
    if text == "auto":
        return None
    try:
        t = float(text)
    except ValueError:
        raise UsageError(f"--time must be 'auto' or a number, got {text!r}") from None
    if not (math.isfinite(t) and t >= 0.0):
        raise UsageError("--time must be a finite non-negative number")
    return t


def _auto_time(dec) -> float:
    return validate_pst_spectrum(dec.values).tau


def cmd_optimal(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    write_chain(args.out, optimal_chain(args.n), {"source": f"optimal n={args.n}"})
    return EXIT_OK


def cmd_engineer(args) -> int:
    try:
        gaps = GapSequence.parse(args.gaps, args.center)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    spectrum = spectrum_from_gaps(gaps)
    window = validate_pst_spectrum(spectrum)
    chain = reconstruct_chain(spectrum)
    report = efficiency(chain, window.tau)
    meta = {"source": "engineer", "gaps": ",".join(map(str, gaps.gaps)), "center": repr(gaps.center)}
    out = {
        "n": chain.n,
        "gaps": list(gaps.gaps),
        "center": gaps.center,
        "tau": window.tau,
        "phi": window.phi,
        "eta": report.eta,
        "omega_max": report.omega_max,
    }
    if args.out == "-":
        out["chain"] = chain_to_dict(chain, meta)
    else:
        write_chain(args.out, chain, meta)
    _emit_json(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    chain, _ = read_chain(args.chain)
    if not 1 <= args.from_site <= chain.n:
        raise UsageError(f"--from-site must lie in 1..{chain.n}")
    t = _parse_time(args.time)
    dec = eigendecompose(chain)
    if t is None:
        t = _auto_time(dec)
    amp = transfer_amplitude(chain, args.from_site, t, dec)
    _emit_json(
        {
            "time": t,
            "from_site": args.from_site,
            "to_site": chain.n + 1 - args.from_site,
            "magnitude": abs(amp),
            "phase": wrap_phase(float(np.angle(amp))),
        }
    )
    return EXIT_OK


def cmd_curve(args) -> int:
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if not (math.isfinite(args.t_max) and args.t_max > 0.0):
        raise UsageError("--t-max must be positive")
    chain, _ = read_chain(args.chain)
    curve = fidelity_curve(chain, args.t_max, args.steps)
    fh, close = _open_text_out(args.out)
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "magnitude", "phase"])
        for row in zip(curve.times, curve.magnitudes, curve.phases):
            writer.writerow([_fmt(v) for v in row])
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_report(args) -> int:
    chain, _ = read_chain(args.chain)
    t = _parse_time(args.time)
    dec = eigendecompose(chain)
    if t is None:
        t = _auto_time(dec)
    if t <= 0.0:
        raise UsageError("efficiency needs a positive time")
    amp = transfer_amplitude(chain, 1, t, dec)
    eff = efficiency(chain, t, dec)
    ml = ml_bound(chain, dec)
    _emit_json(
        {
            "time": t,
            "magnitude": abs(amp),
            "phase": wrap_phase(float(np.angle(amp))),
            "eta": eff.eta,
            "omega_max": eff.omega_max,
            "ref_omega_max": eff.ref_omega_max,
            "tau": eff.tau,
            "ref_tau": eff.ref_tau,
            "delta_lambda": eff.delta_lambda,
            "range_bound_residual": eff.range_bound_residual,
            "ml_mean_energy": ml.mean_energy_above_ground,
            "ml_uncertainty": ml.energy_uncertainty,
            "ml_min_time": ml.min_orthogonal_time,
        }
    )
    if eff.range_bound_residual < -RANGE_BOUND_RTOL * (dec.values.range + 1.0):
        raise InvariantViolation(
            f"spectral range bound violated: residual {eff.range_bound_residual!r}"
        )
    return EXIT_OK


def bench_gap_sequences(n_min: int, n_max: int, samples: int, seed: int):
    """All (n, sample, gaps) draws of a bench run, in output order."""
    rng = np.random.default_rng(seed)
    draws = []
    for n in range(n_min, n_max + 1):
        for i in range(samples):
            gaps = tuple(int(g) for g in rng.choice(BENCH_GAP_ALPHABET, size=n - 1))
            draws.append((n, i, gaps))
    return draws


def bench_row(gaps: tuple[int, ...]) -> dict:
    spectrum = spectrum_from_gaps(GapSequence(gaps))
    window = validate_pst_spectrum(spectrum)
    chain = reconstruct_chain(spectrum)
    dec = eigendecompose(chain)
    fidelity = abs(transfer_amplitude(chain, 1, window.tau, dec))
    report = efficiency(chain, window.tau, dec)
    return {
        "n": chain.n,
        "gaps": ",".join(map(str, gaps)),
        "omega_max": report.omega_max,
        "tau": window.tau,
        "eta": report.eta,
        "fidelity": fidelity,
    }


def cmd_bench(args) -> int:
    if args.n_min < 2 or args.n_max < args.n_min:
        raise UsageError("need 2 <= --n-min <= --n-max")
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    draws = bench_gap_sequences(args.n_min, args.n_max, args.samples, args.seed)
    gap_list = [g for _, _, g in draws]
    if args.workers == 1:
        rows = [bench_row(g) for g in gap_list]
    else:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(bench_row, gap_list, chunksize=16))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "gaps", "omega_max", "tau", "eta", "fidelity"])
    for row in rows:
        writer.writerow(
            [row["n"], row["gaps"], _fmt(row["omega_max"]), _fmt(row["tau"]), _fmt(row["eta"]), _fmt(row["fidelity"])]
        )
    fh, close = _open_text_out(args.out)
    try:
        fh.write(buf.getvalue())
    finally:
        if close:
            fh.close()

    min_eta = min(r["eta"] for r in rows)
    min_fid = min(r["fidelity"] for r in rows)
    ok = min_eta >= 1.0 - BENCH_ETA_TOL and min_fid >= 1.0 - BENCH_FIDELITY_TOL
    summary = {"rows": len(rows), "min_eta": min_eta, "min_fidelity": min_fid, "passed": ok}
    sys.stderr.write(json.dumps(summary) + "\n")
    return EXIT_OK if ok else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pstchain", description="Engineer spin chains for perfect state transfer.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimal", help="write the linear-spectrum reference chain")
    p.add_argument("--n", type=int, required=True, help="number of sites (>= 2)")
    p.add_argument("--out", default="-", help="chain file path, '-' for stdout")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("engineer", help="reconstruct a chain from integer spectral gaps")
    p.add_argument("--gaps", required=True, help="comma-separated positive integers, top gap first")
    p.add_argument("--center", type=float, default=0.0, help="midpoint of the spectrum")
    p.add_argument("--out", default="-", help="chain file path; '-' embeds the chain in the JSON output")
    p.set_defaults(func=cmd_engineer)

    p = sub.add_parser("verify", help="transfer amplitude from a site to its mirror site")
    p.add_argument("chain", help="chain file, '-' for stdin")
    p.add_argument("--time", default="auto", help="evaluation time or 'auto' for the first transfer time")
    p.add_argument("--from-site", type=int, default=1, help="1-based source site")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curve", help="sample the end-to-end amplitude as CSV")
    p.add_argument("chain", help="chain file, '-' for stdin")
    p.add_argument("--t-max", type=float, required=True, help="last sample time (> 0)")
    p.add_argument("--steps", type=int, required=True, help="number of evenly spaced samples (>= 2)")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("report", help="efficiency, range bound and Margolus-Levitin figures")
    p.add_argument("chain", help="chain file, '-' for stdin")
    p.add_argument("--time", default="auto", help="evaluation time or 'auto' for the first transfer time")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("bench", help="random odd-gap sweep checking eta >= 1 and perfect transfer")
    p.add_argument("--n-min", type=int, required=True, help="smallest chain size (>= 2)")
    p.add_argument("--n-max", type=int, required=True, help="largest chain size")
    p.add_argument("--samples", type=int, required=True, help="gap sequences drawn per size")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--workers", type=int, default=1, help="worker processes; output is identical for any value")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ChainFileError) as exc:
        sys.stderr.write(f"pstchain {args.command}: {exc}\n")
        return EXIT_USAGE
    except NoTransferWindowError as exc:
        sys.stderr.write(f"pstchain {args.command}: no perfect-transfer window: {exc}\n")
        return EXIT_NO_PST
    except (NumericalError, InvariantViolation) as exc:
        sys.stderr.write(f"pstchain {args.command}: numerical failure: {exc}\n")
        return EXIT_NUMERICAL
    except SpinChainError as exc:
        sys.stderr.write(f"pstchain {args.command}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
