"""Command-line front end.

Reads a CSV data table (condition attributes plus a decision column, or a
decision column alongside a precomputed relation matrix), optionally
fuzzifies the decision through empirical quantiles, validates the relation as
a T-preorder, runs the requested solves and emits CSV or JSON results.

Exit codes: 0 success, 2 usage, 3 I/O, 4 parse, 5 validation, 6 solver.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import DEFAULT_TOL, membership_vector
from .approx import granular_approx_mse, quantile_band, quantile_sweep
from .errors import (
    GranapproxError,
    ParseError,
    RelationError,
    SolverError,
    ValidationError,
)
from .estimator import make_triplet
from .relation import Dataset, load_relation, triangular_similarity

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_VALIDATION = 5
EXIT_SOLVER = 6


@dataclass
class RunConfig:
    input_path: str
    relation_matrix: str | None = None
    ranges: list[float] | None = None
    tnorm: str = "lukasiewicz"
    phi: object = None
    p_values: list[float] = field(default_factory=lambda: [0.5])
    loss: str = "quantile"
    fuzzify: tuple[float, float] | None = None
    band: float | None = None
    output: str | None = None
    fmt: str = "csv"
    tol: float = DEFAULT_TOL
    relation_tol: float = 0.005
    exact: bool = False

    def __post_init__(self):
        if self.fuzzify is not None:
            q_low, q_high = self.fuzzify
            if not (0.0 <= q_low < q_high <= 1.0):
                raise ValidationError("fuzzify quantiles need 0 <= q_low < q_high <= 1")
        for p in self.p_values:
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"p must lie in [0, 1], got {p}")


def fuzzify_decision(values, q_low: float, q_high: float) -> np.ndarray:
    """Map raw decision values onto [0, 1] through empirical quantiles.

    The quantile convention is the lower one, Q(p) = inf{y : F(y) >= p}.
    Values at or below Q(q_low) map to 0 and values at or above Q(q_high)
    map to 1, which tames outliers when the cut levels are interior.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size < 2 or np.unique(arr).size < 2:
        raise ValidationError("fuzzification needs at least two distinct values")
    lo = float(np.quantile(arr, q_low, method="inverted_cdf"))
    hi = float(np.quantile(arr, q_high, method="inverted_cdf"))
    if hi <= lo:
        raise ValidationError("degenerate quantile spread; widen (q_low, q_high)")
    return np.clip((arr - lo) / (hi - lo), 0.0, 1.0)


def _read_table(path: str) -> np.ndarray:
    """Read a numeric CSV table, auto-detecting an optional header row."""
    text = Path(path).read_text()
    rows = [record for record in csv.reader(io.StringIO(text)) if record]
    if not rows:
        raise ParseError(f"{path} is empty")
    start = 0
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        start = 1
    data = []
    width = None
    for record in rows[start:]:
        try:
            parsed = [float(cell) for cell in record]
        except ValueError as exc:
            raise ParseError(f"{path}: non-numeric cell ({exc})") from exc
        if width is None:
            width = len(parsed)
        elif len(parsed) != width:
            raise ParseError(f"{path}: ragged rows")
        data.append(parsed)
    if not data:
        raise ParseError(f"{path} holds no data rows")
    return np.asarray(data, dtype=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="granapprox",
        description="Granular approximation of fuzzy sets over a T-preorder relation.",
    )
    parser.add_argument("--input", required=True,
                        help="CSV table; the last column is the decision")
    parser.add_argument("--relation-matrix",
                        help="precomputed relation (CSV or JSON) instead of attributes")
    parser.add_argument("--ranges",
                        help="comma-separated attribute ranges for the similarity relation")
    parser.add_argument("--tnorm", choices=("lukasiewicz", "product"),
                        default="lukasiewicz")
    parser.add_argument("--phi", default="identity",
                        help="identity or power:GAMMA")
    parser.add_argument("--p", default="0.5",
                        help="comma-separated probability parameters")
    parser.add_argument("--loss", choices=("quantile", "mse"), default="quantile")
    parser.add_argument("--fuzzify", metavar="QLOW,QHIGH",
                        help="fuzzify the decision column between two quantile levels")
    parser.add_argument("--band", type=float,
                        help="also report the p-band solutions at p +/- EPS")
    parser.add_argument("--output", help="output file (stdout when omitted)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="comparison tolerance for degrees")
    parser.add_argument("--relation-tol", type=float, default=0.005,
                        help="transitivity validation tolerance; the default "
                             "absorbs 3-decimal rounding of published tables")
    parser.add_argument("--exact-rational", action="store_true", dest="exact",
                        help="run the flow engines in exact rational arithmetic")
    return parser


def _config_from_args(args) -> RunConfig:
    phi = args.phi
    if isinstance(phi, str) and phi.startswith("power:"):
        phi = ("power", float(phi.split(":", 1)[1]))
    elif phi == "identity":
        phi = None
    try:
        p_values = [float(tok) for tok in str(args.p).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ParseError(f"bad --p list: {exc}") from exc
    fuzzify = None
    if args.fuzzify:
        try:
            q_low, q_high = (float(tok) for tok in args.fuzzify.split(","))
        except ValueError as exc:
            raise ParseError(f"bad --fuzzify levels: {exc}") from exc
        fuzzify = (q_low, q_high)
    ranges = None
    if args.ranges:
        try:
            ranges = [float(tok) for tok in args.ranges.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad --ranges list: {exc}") from exc
    return RunConfig(
        input_path=args.input,
        relation_matrix=args.relation_matrix,
        ranges=ranges,
        tnorm=args.tnorm,
        phi=phi,
        p_values=sorted(set(p_values)),
        loss=args.loss,
        fuzzify=fuzzify,
        band=args.band,
        output=args.output,
        fmt=args.fmt,
        tol=args.tol,
        relation_tol=args.relation_tol,
        exact=args.exact,
    )


def _label(entry: dict) -> str:
    return "mse" if entry["p"] == "mse" else f"p={entry['p']:g}"


def _render_csv(n: int, observed, entries) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["instance", "input"]
    for entry in entries:
        label = _label(entry)
        header.append(label)
        if "band_lower" in entry:
            header.extend([f"{label}_band_lower", f"{label}_band_upper"])
    writer.writerow(header)
    for i in range(n):
        row = [str(i + 1), f"{observed[i]:.6f}"]
        for entry in entries:
            row.append(f"{entry['memberships'][i]:.6f}")
            if "band_lower" in entry:
                row.append(f"{entry['band_lower'][i]:.6f}")
                row.append(f"{entry['band_upper'][i]:.6f}")
        writer.writerow(row)
    return buf.getvalue()


def _render_json(n: int, observed, entries) -> str:
    payload = {
        "n": n,
        "input": [round(float(x), 6) for x in observed],
        "results": entries,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def run(config: RunConfig) -> str:
    """Execute the pipeline and return the rendered output text."""
    table = _read_table(config.input_path)
    decision = table[:, -1]
    if config.fuzzify is not None:
        decision = fuzzify_decision(decision, *config.fuzzify)
    decision = membership_vector(decision, tol=config.tol, name="decision")

    if config.relation_matrix:
        rel = load_relation(config.relation_matrix, tol=config.tol)
        if rel.shape[0] != decision.shape[0]:
            raise ValidationError("relation size does not match the input rows")
    else:
        if table.shape[1] < 2:
            raise ValidationError("need attribute columns to build a relation")
        dataset = Dataset(table[:, :-1], decision,
                          None if config.ranges is None else np.asarray(config.ranges))
        rel = triangular_similarity(dataset.attributes, dataset.ranges, tol=config.tol)

    triplet = make_triplet(config.tnorm, config.phi)
    entries = []
    if config.loss == "mse":
        result = granular_approx_mse(rel, decision, triplet, tol=config.tol,
                                     transitivity_tol=config.relation_tol)
        entries.append(_entry("mse", result))
    else:
        results = quantile_sweep(rel, decision, triplet, config.p_values,
                                 tol=config.tol, exact=config.exact,
                                 transitivity_tol=config.relation_tol)
        for p, result in zip(config.p_values, results):
            entry = _entry(round(p, 12), result)
            if config.band is not None and 0.0 < p < 1.0:
                lower, upper = quantile_band(rel, decision, triplet, p, config.band,
                                             tol=config.tol, exact=config.exact,
                                             validate=False)
                entry["band_lower"] = [round(float(x), 6) for x in lower.memberships]
                entry["band_upper"] = [round(float(x), 6) for x in upper.memberships]
            entries.append(entry)

    n = decision.shape[0]
    if config.fmt == "json":
        return _render_json(n, decision, entries)
    return _render_csv(n, decision, entries)


def _entry(tag, result) -> dict:
    return {
        "p": tag,
        "memberships": [round(float(x), 6) for x in result.memberships],
        "phi_values": [round(float(x), 6) for x in result.phi_values],
        "objective": round(float(result.objective), 6),
        "feasibility_residual": float(f"{result.feasibility_residual:.3e}"),
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        text = run(config)
    except OSError as exc:
        print(f"granapprox: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"granapprox: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RelationError as exc:
        report = {"error": "validation", "message": str(exc),
                  "violations": exc.violations[:50]}
        print(json.dumps(report, sort_keys=True), file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print(f"granapprox: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"granapprox: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except GranapproxError as exc:
        print(f"granapprox: error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if config.output:
        try:
            Path(config.output).write_text(text)
        except OSError as exc:
            print(f"granapprox: i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
