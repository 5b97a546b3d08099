"""Command-line entry point.

Every subcommand prints one JSON document with the keys ``command``,
``input_digest``, ``parameters`` and ``results`` in that order.  Floats are
rounded to 12 significant digits and infinities are written as the string
``"inf"`` so the output is byte-stable and parses back with :func:`load_document`.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 unreliable
Betti estimate.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .complex import DistanceMatrix, critical_scales, enumerate_k_simplices, pairwise_distances, validate_distance_matrix
from .errors import InvalidInputError, NumericalError
from .homology import Barcode, barcode, betti_numbers
from .qtda import QtdaConfig, betti_via_quantum, counterexample_demo, error_threshold, proportion_monte_carlo, three_point_demo

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_UNRELIABLE = 4

SVG_WIDTH, SVG_HEIGHT = 800, 400
METRICS = ("euclidean", "manhattan", "chebyshev")


class InputFormatError(InvalidInputError):
    """Malformed input file; the message carries the line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class InputDocument:
    matrix: list[list[float]] | None = None
    points: list[list[float]] | None = None
    metric: str = "euclidean"
    labels: list[str] | None = None

    def __post_init__(self):
        if (self.matrix is None) == (self.points is None):
            raise InvalidInputError("input needs exactly one of 'matrix' or 'points'")

    def distances(self) -> DistanceMatrix:
        if self.matrix is not None:
            return validate_distance_matrix(self.matrix)
        return pairwise_distances(self.points, self.metric)


def _check_matrix(rows: list[list[float]], fail) -> None:
    """Call ``fail(i, j, message)`` for the first entry that breaks a distance-matrix rule."""
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            fail(i, 0, f"row has {len(row)} entries, expected {n}")
    for i in range(n):
        for j in range(n):
            x = rows[i][j]
            if not math.isfinite(x):
                fail(i, j, f"non-finite entry {x}")
            if x < 0:
                fail(i, j, f"negative distance {x}")
            if i == j and x != 0:
                fail(i, j, f"diagonal entry must be 0, got {x}")
            if j > i and abs(x - rows[j][i]) > 1e-12:
                fail(j, i, f"asymmetric: {rows[j][i]} here but {x} at the mirrored entry")


def _parse_csv(text: str) -> InputDocument:
    rows: list[list[float]] = []
    columns: list[list[int]] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        fields = next(csv.reader([raw]))
        row, cols, pos = [], [], 1
        for field in fields:
            try:
                row.append(float(field))
            except ValueError:
                raise InputFormatError(lineno, pos, f"not a number: {field.strip()!r}") from None
            cols.append(pos)
            pos += len(field) + 1
        rows.append(row)
        columns.append(cols)
        lines.append(lineno)
    if not rows:
        raise InputFormatError(1, 1, "empty matrix")

    def fail(i, j, message):
        raise InputFormatError(lines[i], columns[i][j] if j < len(columns[i]) else 1, message)

    _check_matrix(rows, fail)
    return InputDocument(matrix=rows)


def _number_grid(value, key: str) -> list[list[float]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise InvalidInputError(f"'{key}' must be a list of lists of numbers")
    out = []
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InvalidInputError(f"{key} row {i + 1}, column {j + 1}: not a number: {x!r}")
        out.append([float(x) for x in row])
    return out


def _parse_json(text: str) -> InputDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputFormatError(exc.lineno, exc.colno, exc.msg) from None
    if not isinstance(data, dict):
        raise InputFormatError(1, 1, "top level must be an object")
    unknown = set(data) - {"matrix", "points", "metric", "labels"}
    if unknown:
        raise InvalidInputError(f"unknown keys: {sorted(unknown)}")
    labels = data.get("labels")
    if labels is not None and not (isinstance(labels, list) and all(isinstance(s, str) for s in labels)):
        raise InvalidInputError("'labels' must be a list of strings")
    if ("matrix" in data) == ("points" in data):
        raise InvalidInputError("input needs exactly one of 'matrix' or 'points'")
    if "matrix" in data:
        rows = _number_grid(data["matrix"], "matrix")
        if not rows:
            raise InvalidInputError("empty matrix")

        def fail(i, j, message):
            raise InvalidInputError(f"matrix row {i + 1}, column {j + 1}: {message}")

        _check_matrix(rows, fail)
        doc = InputDocument(matrix=rows, labels=labels)
    else:
        metric = data.get("metric", "euclidean")
        if metric not in METRICS:
            raise InvalidInputError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
        doc = InputDocument(points=_number_grid(data["points"], "points"), metric=metric, labels=labels)
    n = len(doc.matrix if doc.matrix is not None else doc.points)
    if labels is not None and len(labels) != n:
        raise InvalidInputError(f"{len(labels)} labels for {n} points")
    return doc


def parse_input(path: str | Path, format: str | None = None) -> InputDocument:
    """Read a ``csv-matrix`` or ``json`` input file.  The format defaults to
    json for ``.json`` files and csv-matrix otherwise."""
    path = Path(path)
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv-matrix"
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    if format == "csv-matrix":
        doc = _parse_csv(text)
    elif format == "json":
        doc = _parse_json(text)
    else:
        raise InvalidInputError(f"unknown input format {format!r}")
    doc.distances()  # surfaces metric or shape errors at parse time
    return doc


def input_digest(D: DistanceMatrix) -> str:
    canonical = json.dumps([[float(x) for x in row] for row in D.tolist()], separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _plain(value):
    """Convert results to JSON-ready values with 12-significant-digit floats."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.12g}")
        return 0.0 if x == 0 else x
    return value


def dump_document(doc: dict) -> str:
    return json.dumps(_plain(doc), indent=2, ensure_ascii=False) + "\n"


def _restore(value):
    if isinstance(value, dict):
        return {k: _restore(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_restore(v) for v in value]
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def load_document(text: str) -> dict:
    """Parse a document written by :func:`dump_document`; ``"inf"`` comes back as a float."""
    return _restore(json.loads(text))


def make_document(command: str, D: DistanceMatrix | None, parameters: dict, results: dict) -> dict:
    return {
        "command": command,
        "input_digest": None if D is None else input_digest(D),
        "parameters": parameters,
        "results": results,
    }


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def barcode_svg(bars: Barcode, ticks: Sequence[float]) -> str:
    """Fixed 800x400 plot, one row per interval, ticks at the given scales.

    Essential classes run to the right edge and carry the extra class
    ``essential``.
    """
    left, right, top, bottom = 50.0, 20.0, 20.0, 40.0
    width = SVG_WIDTH - left - right
    height = SVG_HEIGHT - top - bottom
    finite = [x for x in ticks if math.isfinite(x)]
    finite += [d for v in bars.intervals.values() for _, d in v if math.isfinite(d)]
    x_max = max(finite, default=0.0)
    x_max = x_max * 1.1 if x_max > 0 else 1.0
    rows = [(k, b, d) for k in bars.dimensions() for b, d in bars.intervals[k]]
    step = height / max(1, len(rows))
    bar_h = step * 0.6

    def x_of(v: float) -> float:
        return left + width * min(v, x_max) / x_max

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line class="axis" x1="{_fmt(left)}" y1="{_fmt(top + height)}" x2="{_fmt(left + width)}" '
        f'y2="{_fmt(top + height)}" stroke="black"/>',
    ]
    for v in ticks:
        x = x_of(v)
        out.append(
            f'<line class="tick" x1="{_fmt(x)}" y1="{_fmt(top + height)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(top + height + 6)}" stroke="black"/>'
        )
        out.append(
            f'<text class="tick-label" x="{_fmt(x)}" y="{_fmt(top + height + 20)}" '
            f'font-size="11" text-anchor="middle">{v:.6g}</text>'
        )
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    for i, (k, b, d) in enumerate(rows):
        y = top + i * step + (step - bar_h) / 2
        x0, x1 = x_of(b), x_of(d)
        cls = f"bar h{k}" + (" essential" if math.isinf(d) else "")
        out.append(
            f'<rect class="{cls}" x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(max(x1 - x0, 1.0))}" '
            f'height="{_fmt(bar_h)}" fill="{colors[k % len(colors)]}"/>'
        )
    for k in bars.dimensions():
        first = next((i for i, r in enumerate(rows) if r[0] == k), None)
        if first is not None:
            out.append(
                f'<text class="dim-label" x="{_fmt(left - 8)}" y="{_fmt(top + first * step + step / 2 + 4)}" '
                f'font-size="12" text-anchor="end">H{k}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _load(args) -> DistanceMatrix:
    return parse_input(args.input, args.format).distances()


def cmd_betti(args) -> tuple[dict, int]:
    D = _load(args)
    betti = betti_numbers(D, args.scale, args.max_dim)
    counts = [len(enumerate_k_simplices(D, args.scale, k)) for k in range(min(args.max_dim + 1, D.n - 1) + 1)]
    params = {"scale": args.scale, "max_dim": args.max_dim}
    return make_document("betti", D, params, {"betti": betti, "simplex_counts": counts}), EXIT_OK


def cmd_barcode(args) -> tuple[dict, int]:
    D = _load(args)
    bars = barcode(D, args.max_dim)
    ticks = [c for c in critical_scales(D) if c > 0]
    if args.svg:
        Path(args.svg).write_text(barcode_svg(bars, ticks))
    results = {
        "intervals": {str(k): [[b, d] for b, d in bars.intervals[k]] for k in bars.dimensions()},
        "critical_scales": ticks,
    }
    return make_document("barcode", D, {"max_dim": args.max_dim}, results), EXIT_OK


def _kernel_report(est) -> dict:
    return {
        "eta": est.eta,
        "simplex_count": est.simplex_count,
        "kernel_dim_raw": est.kernel_dim_raw,
        "kernel_dim": est.kernel_dim,
        "reliable": est.reliable,
        "register_qubits": est.register_qubits,
    }


def cmd_qbetti(args) -> tuple[dict, int]:
    D = _load(args)
    config = QtdaConfig(
        t=args.qpe_bits,
        grover="exact_iterations" if args.grover else "off",
        readout=args.readout,
        qpe_accuracy=args.qpe_accuracy,
        shots=args.shots,
        rng_seed=args.seed,
    )
    q = betti_via_quantum(D, args.scale, args.dim, config)
    params = {
        "scale": args.scale,
        "dim": args.dim,
        "qpe_bits": args.qpe_bits,
        "grover": args.grover,
        "readout": args.readout,
        "qpe_accuracy": args.qpe_accuracy,
        "shots": args.shots,
        "seed": args.seed,
    }
    results = {
        "betti": q.betti,
        "reliable": q.reliable,
        "simplex_counts": list(q.simplex_counts),
        "kernel_k": _kernel_report(q.kernel_k),
        "kernel_k_plus_1": _kernel_report(q.kernel_k1),
        "grover_success": {str(k): v for k, v in sorted(q.grover_success.items())},
    }
    return make_document("qbetti", D, params, results), EXIT_OK if q.reliable else EXIT_UNRELIABLE


def cmd_demo(args) -> tuple[dict, int]:
    report = three_point_demo() if args.name == "three-point" else counterexample_demo()
    return make_document(f"demo {args.name}", None, {"name": args.name}, report), EXIT_OK


def proportion_scales(grid: int) -> np.ndarray:
    """``grid`` evenly spaced scales ending at 1, the largest possible distance."""
    return np.arange(1, grid + 1) / grid


def cmd_proportions(args) -> tuple[dict, int]:
    if args.n_min > args.n_max:
        raise InvalidInputError("--n-min exceeds --n-max")
    if args.grid < 1:
        raise InvalidInputError("--grid must be positive")
    eps = proportion_scales(args.grid)
    result = proportion_monte_carlo(range(args.n_min, args.n_max + 1), args.dim, eps, args.trials, args.seed, args.workers)
    mean = result.mean()[:, 0, :]
    flags = result.efficient()[:, 0, :]
    rows = {
        str(n): {
            "mean_zeta": mean[i],
            "mean_zeta_exact": [str(result.mean_exact(i, 0, e)) for e in range(len(eps))],
            "efficient": flags[i],
        }
        for i, n in enumerate(result.ns)
    }
    params = {
        "n_min": args.n_min,
        "n_max": args.n_max,
        "dim": args.dim,
        "grid": args.grid,
        "trials": args.trials,
        "seed": args.seed,
    }
    return make_document("proportions", None, params, {"scales": eps, "by_n": rows}), EXIT_OK


def cmd_threshold(args) -> tuple[dict, int]:
    if args.max_simplices < 1:
        raise InvalidInputError("--max-simplices must be positive")
    rows = []
    for m in range(1, args.max_simplices + 1):
        e = error_threshold(m)
        rows.append({"simplices": m, "threshold": str(e), "value": float(e)})
    return make_document("threshold", None, {"max_simplices": args.max_simplices}, {"thresholds": rows}), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="also write the document to this file")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("input", help="distance matrix (csv) or json points/matrix file")
    source.add_argument("--format", choices=("csv-matrix", "json"), help="default: from the file extension")

    parser = argparse.ArgumentParser(prog="qtda", description="Betti numbers, barcodes and simulated quantum TDA.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("betti", parents=[common, source], help="exact Betti numbers at one scale")
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--max-dim", type=int, default=1)
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("barcode", parents=[common, source], help="persistence intervals")
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--svg", help="write an 800x400 barcode plot here")
    p.set_defaults(func=cmd_barcode)

    p = sub.add_parser("qbetti", parents=[common, source], help="Betti number from the simulated quantum pipeline")
    p.add_argument("--scale", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--qpe-bits", type=int, default=None, help="register qubits (default: chosen from the spectrum)")
    p.add_argument("--grover", action="store_true", help="prepare the simplex state by amplitude amplification")
    p.add_argument("--readout", choices=("qpe", "exact"), default="qpe")
    p.add_argument("--qpe-accuracy", type=float, default=1e-6)
    p.add_argument("--shots", type=int, default=None, help="sample the register instead of exact probabilities")
    p.add_argument("--seed", type=int, default=0, help="seed for shot sampling")
    p.set_defaults(func=cmd_qbetti)

    p = sub.add_parser("demo", parents=[common], help="worked examples")
    p.add_argument("name", choices=("three-point", "counterexample"))
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("proportions", parents=[common], help="simplex-proportion Monte Carlo")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--grid", type=int, required=True, help="number of scales in (0, 1]")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_proportions)

    p = sub.add_parser("threshold", parents=[common], help="kernel-dimension error thresholds")
    p.add_argument("--max-simplices", type=int, required=True)
    p.set_defaults(func=cmd_threshold)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        doc, code = args.func(args)
    except InvalidInputError as exc:
        print(f"qtda: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, np.linalg.LinAlgError, OverflowError) as exc:
        print(f"qtda: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = dump_document(doc)
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text)
    if code == EXIT_UNRELIABLE:
        print("qtda: warning: kernel estimate too close to a rounding boundary", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
