"""Command-line front end: experiment drivers and machine-readable reports.

Every subcommand prints a JSON run report to stdout and optionally writes
CSV/SVG files.  Exit codes: 0 success, 2 input or contract errors, 3
numerical instability.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bounds as bounds_mod
from .disk_families import FamilySpec, make_family, witness_psi2
from .errors import (
    CapacityDegeneracyError,
    ContractViolation,
    ConvergenceError,
    CrouzeixError,
    DomainError,
    InstabilityError,
    NonSmoothBoundaryError,
    PoleError,
    SpectralDomainError,
)
from .extremal import optimize_sector, optimize_strip
from .numrange import (
    boundary,
    cardioid_boundary,
    cardioid_matrix,
    hausdorff,
    circle_boundary,
    numerical_radius,
    transform_sample,
)
from .psi import psi, psi_disk, psi_from_sample

_INPUT_ERRORS = (
    ContractViolation,
    DomainError,
    SpectralDomainError,
    NonSmoothBoundaryError,
    json.JSONDecodeError,
    OSError,
    KeyError,
    TypeError,
)
_NUMERIC_ERRORS = (
    ConvergenceError,
    PoleError,
    CapacityDegeneracyError,
    InstabilityError,
)


def load_matrix(path: str) -> np.ndarray:
    """Parse the {"dim": d, "entries": [[{"re", "im"}, ...], ...]} format."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    d = int(doc["dim"])
    entries = doc["entries"]
    if len(entries) != d:
        raise ContractViolation(f"matrix file: {len(entries)} rows, dim says {d}")
    mat = np.zeros((d, d), dtype=complex)
    for i, row in enumerate(entries):
        if len(row) != d:
            raise ContractViolation(f"matrix file: ragged row {i}")
        for j, cell in enumerate(row):
            mat[i, j] = float(cell["re"]) + 1j * float(cell["im"])
    if not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
        raise ContractViolation("matrix file contains non-finite values")
    return mat


def dump_matrix(mat: np.ndarray) -> dict:
    return {
        "dim": int(mat.shape[0]),
        "entries": [
            [{"re": float(z.real), "im": float(z.imag)} for z in row] for row in mat
        ],
    }


def _digest(payload) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, default=str).encode()
    ).hexdigest()[:16]


def _encode(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isnan(obj):
        return None
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _report(command: str, inputs: dict, seed, results: dict, started: float,
            diagnostics: dict | None = None) -> dict:
    return {
        "command": command,
        "inputs_digest": _digest(inputs),
        "seed": seed,
        "results": results,
        "diagnostics": diagnostics or {},
        "wall_time_s": round(time.monotonic() - started, 3),
    }


def _emit(report: dict) -> None:
    json.dump(report, sys.stdout, indent=2, default=_encode)
    sys.stdout.write("\n")


def write_boundary_csv(path: str, angles: np.ndarray, points: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("theta,re,im\n")
        for theta, z in zip(angles, points):
            fh.write(f"{theta:.17g},{z.real:.17g},{z.imag:.17g}\n")


def write_boundary_svg(path: str, points: np.ndarray, size: int = 640) -> None:
    """Closed polyline through exactly the given vertices, 5% margin."""
    xs, ys = points.real, points.imag
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    span = max(x1 - x0, y1 - y0, 1e-12)
    pad = 0.05 * span
    x0, y0, span = x0 - pad, y0 - pad, span + 2 * pad

    def to_px(z):
        # y axis flipped: SVG grows downward
        return (
            (z.real - x0) / span * size,
            size - (z.imag - y0) / span * size,
        )

    coords = " ".join(f"{px:.3f},{py:.3f}" for px, py in map(to_px, points))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}">\n'
            f'  <polygon points="{coords}" fill="none" stroke="black" '
            f'stroke-width="1.5"/>\n</svg>\n'
        )


def _cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def table1_cell(a: float, b: float, n: int = 64, restarts: int = 24, seed: int = 0) -> dict:
    """psi(A(a,b)) for one cardioid-family cell.

    The matrix is shifted by trace/3 so that 0 is interior; when the
    support sample is flagged non-smooth (the family always has a straight
    boundary segment) the closed-form cardioid parameterization replaces
    it, with midpoint curve samples supplying the off-node error estimate.
    """
    started = time.monotonic()
    mat = cardioid_matrix(a, b)
    shift = complex(np.trace(mat)) / 3.0
    mat0 = mat - shift * np.eye(3)
    sample = boundary(mat0, n)
    count = 2 * n + 1
    if sample.smooth:
        result = psi_from_sample(mat0, sample, restarts=restarts, seed=seed)
    else:
        raw = cardioid_boundary(a, b, n)
        shifted = transform_sample(raw, shift=shift)
        mid = cardioid_boundary(a, b, n, offset=0.5)
        offnode = (raw.angles + math.pi / count, mid.points - shift)
        result = psi_from_sample(
            mat0, shifted, restarts=restarts, seed=seed, offnode=offnode
        )
    return {
        "a": a,
        "b": b,
        "psi": result.value,
        "uncert": result.uncertainty,
        "restarts": restarts,
        "seconds": round(time.monotonic() - started, 3),
    }


def run_table1(cells, n: int = 64, restarts: int = 24, seed: int = 0,
               workers: int | None = None) -> list[dict]:
    """One row per (a, b) cell; degenerate cells are skipped with a note."""
    if workers is None:
        workers = min(len(cells), os.cpu_count() or 1)
    env_cap = os.environ.get("CROUZEIX_THREADS")
    if env_cap:
        workers = max(1, min(workers, int(env_cap)))

    rows: list = [None] * len(cells)

    def run(idx):
        a, b = cells[idx]
        if a <= 0.0 or b <= 0.0:
            rows[idx] = {
                "a": a, "b": b, "psi": None, "uncert": None,
                "restarts": 0, "seconds": 0.0,
                "note": "skipped: degenerate (psi = 1 when b = 0, reducible when a = 0)",
            }
            return
        rows[idx] = table1_cell(a, b, n=n, restarts=restarts, seed=_cell_seed(seed, idx))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(cells))))
    else:
        for i in range(len(cells)):
            run(i)
    return rows


def write_table1_csv(path: str, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("a,b,psi,uncert,restarts,seconds\n")
        for row in rows:
            psi_s = "" if row["psi"] is None else f"{row['psi']:.6f}"
            unc = row["uncert"]
            unc_s = "" if unc is None or (isinstance(unc, float) and math.isnan(unc)) else f"{unc:.3e}"
            fh.write(
                f"{row['a']},{row['b']},{psi_s},{unc_s},{row['restarts']},{row['seconds']}\n"
            )


def _parse_cells(args) -> list[tuple[float, float]]:
    if args.cells:
        out = []
        for token in args.cells.split(","):
            a_s, b_s = token.split(":")
            out.append((float(a_s), float(b_s)))
        return out
    if args.grid:
        vals = [float(v) for v in args.grid.split(",")]
        return [(a, b) for a in vals for b in vals]
    raise ContractViolation("table1 needs --cells or --grid")


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_boundary(args) -> dict:
    started = time.monotonic()
    mat = load_matrix(args.matrix)
    sample = boundary(mat, args.n)
    if args.csv:
        write_boundary_csv(args.csv, sample.angles, sample.points)
    if args.svg:
        write_boundary_svg(args.svg, sample.points)
    results = {
        "count": sample.size,
        "numerical_radius": numerical_radius(mat, args.n),
        "smooth": sample.smooth,
        "min_gap": sample.min_gap,
    }
    return _report("boundary", dump_matrix(mat) | {"n": args.n}, None, results, started)


def _cmd_psi(args) -> dict:
    started = time.monotonic()
    mat = load_matrix(args.matrix)
    result = psi(mat, n=args.n, restarts=args.restarts, seed=args.seed)
    results = {
        "value": result.value,
        "uncertainty": result.uncertainty,
        "converged": result.converged,
        "zeros": [complex(z) for z in result.zeros.zeros],
    }
    inputs = dump_matrix(mat) | {"n": args.n, "restarts": args.restarts}
    return _report("psi", inputs, args.seed, results, started)


def _cmd_table1(args) -> dict:
    started = time.monotonic()
    cells = _parse_cells(args)
    rows = run_table1(cells, n=args.n, restarts=args.restarts, seed=args.seed)
    if args.csv:
        write_table1_csv(args.csv, rows)
    inputs = {"cells": cells, "n": args.n, "restarts": args.restarts}
    return _report("table1", inputs, args.seed, {"rows": rows}, started)


def _cmd_strip(args) -> dict:
    started = time.monotonic()
    res = optimize_strip(
        args.d, restarts=args.restarts, seed=args.seed, symmetric=args.symmetric
    )
    cand = res.candidate
    results = {
        "best_found": res.value,
        "k": cand.k,
        "d1": list(cand.d1),
        "d2": list(cand.d2),
        "e": [complex(v) for v in np.ravel(cand.e)],
        "gammas": [complex(g) for g in cand.gammas],
        "note": "best-found value: a lower bound for the strip constant",
    }
    inputs = {"d": args.d, "restarts": args.restarts, "symmetric": args.symmetric}
    return _report("strip", inputs, args.seed, results, started,
                   diagnostics={"per_restart": res.per_restart})


def _cmd_sector(args) -> dict:
    started = time.monotonic()
    res = optimize_sector(
        args.alpha,
        args.d,
        restarts=args.restarts,
        seed=args.seed,
        continuation=args.continuation,
        alpha_start=args.alpha_start,
        steps=args.steps,
    )
    cand = res.candidate
    results = {
        "best_found": res.value,
        "alpha": args.alpha,
        "k": cand.k if cand else None,
        "gammas": [complex(g) for g in cand.gammas] if cand else None,
        "trace": res.trace,
        "note": "best-found value: a lower bound for the sector constant",
    }
    inputs = {"alpha": args.alpha, "d": args.d, "restarts": args.restarts,
              "continuation": args.continuation}
    return _report("sector", inputs, args.seed, results, started)


def _cmd_bounds(args) -> dict:
    started = time.monotonic()
    if args.matrix:
        mat = load_matrix(args.matrix)
        report = bounds_mod.report_from_sample(boundary(mat, args.n))
        inputs = dump_matrix(mat) | {"n": args.n}
    elif args.domain == "sector":
        report = bounds_mod.report_sector(args.alpha)
        inputs = {"domain": "sector", "alpha": args.alpha}
    elif args.domain == "strip":
        report = bounds_mod.report_strip()
        inputs = {"domain": "strip"}
    elif args.domain == "polygon":
        report = bounds_mod.report_polygon(args.sides)
        inputs = {"domain": "polygon", "sides": args.sides}
    elif args.domain == "ellipse":
        report = bounds_mod.report_ellipse(args.ecc)
        inputs = {"domain": "ellipse", "ecc": args.ecc}
    elif args.domain == "parabola":
        report = bounds_mod.report_parabola()
        inputs = {"domain": "parabola"}
    else:
        raise ContractViolation("bounds needs --domain or --matrix")
    results = {
        "domain": report.domain,
        "lower": report.lower,
        "upper": report.upper,
        "consistent": report.consistent,
        "witness_residuals": report.witness_residuals,
    }
    return _report("bounds", inputs, None, results, started)


def _cmd_diskfam(args) -> dict:
    started = time.monotonic()
    rng = np.random.default_rng(args.seed)
    circle = circle_boundary(0.0, 1.0, args.n)
    worst = {"hausdorff": 0.0, "witness_residual": 0.0}
    values = []
    specs = []
    for _ in range(args.count):
        spec = FamilySpec.family2(
            phi=float(rng.uniform(0.0, 1.45)),
            phase=float(rng.uniform(0.0, 2.0 * math.pi)),
        )
        specs.append({"phi": spec.phi, "phase": spec.phase})
        mat = make_family(spec)
        h = hausdorff(boundary(mat, args.n), circle)
        _, residual = witness_psi2(spec)
        value = psi_disk(mat, restarts=args.restarts, seed=args.seed).value
        worst["hausdorff"] = max(worst["hausdorff"], h)
        worst["witness_residual"] = max(worst["witness_residual"], residual)
        values.append(value)
    results = {
        "count": args.count,
        "worst": worst,
        "psi_min": min(values),
        "psi_max": max(values),
        "specs": specs,
    }
    inputs = {"count": args.count, "n": args.n, "restarts": args.restarts}
    return _report("diskfam", inputs, args.seed, results, started)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crouzeix",
        description="Numerical ranges, spectral-set constants and their bounds",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("boundary", help="sample the boundary of W(A)")
    p.add_argument("--matrix", required=True)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--svg")
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_boundary)

    p = sub.add_parser("psi", help="compute psi(A) through the full pipeline")
    p.add_argument("--matrix", required=True)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--restarts", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_psi)

    p = sub.add_parser("table1", help="psi over the cardioid family grid")
    p.add_argument("--cells", help="comma list of a:b pairs")
    p.add_argument("--grid", help="comma list of values; runs the full grid")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--restarts", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_table1)

    p = sub.add_parser("strip", help="maximize the strip objective")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--restarts", type=int, default=24)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--symmetric", action="store_true")
    p.set_defaults(func=_cmd_strip)

    p = sub.add_parser("sector", help="maximize the sector objective")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--continuation", action="store_true")
    p.add_argument("--alpha-start", type=float, default=None)
    p.add_argument("--steps", type=int, default=12)
    p.set_defaults(func=_cmd_sector)

    p = sub.add_parser("bounds", help="closed-form bounds for a domain")
    p.add_argument("--domain", choices=["sector", "strip", "polygon", "ellipse", "parabola"])
    p.add_argument("--alpha", type=float, default=math.pi / 4)
    p.add_argument("--sides", type=int, default=3)
    p.add_argument("--ecc", type=float, default=0.5)
    p.add_argument("--matrix", help="report for the sampled W(A) instead")
    p.add_argument("--n", type=int, default=64)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("diskfam", help="verify the disk-extremal families")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--restarts", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_diskfam)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CrouzeixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
