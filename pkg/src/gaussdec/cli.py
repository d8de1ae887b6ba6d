"""Command-line front end.

Subcommands: ``analyze`` (decoupling report), ``region`` (admissible
intervals), ``bounds`` (dominance/determinant diagnostics), ``verify``
(Monte Carlo inequality check), ``sweep`` (CSV table over a parameter and a
p grid), ``gen`` (covariance generation).

Matrix documents are JSON objects {"n": int, "rows": [[...], ...]} or plain
CSV (n comma-separated lines).  Structured reports are JSON; sweeps are CSV.
Every command is deterministic given its arguments (and seed).

Exit codes: 0 success; 2 invalid input; 3 covariance not positive definite
(or numerically unusable); 4 verification inequality failed; 5 exponent not
admissible for the requested constant.  Set GAUSSDEC_LOG=debug|info|... for
diagnostics on standard error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import covgen, decouple, matcore
from . import verify as verify_mod
from .errors import (
    DegenerateBeta,
    InvalidParameter,
    NonConvergence,
    NonPositiveVariance,
    NotAdmissibleClassical,
    NotInRegion,
    NotPositiveDefinite,
    NotSymmetric,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NOT_SPD = 3
EXIT_CHECK_FAILED = 4
EXIT_NOT_ADMISSIBLE = 5

log = logging.getLogger("gaussdec")


def read_matrix_document(path: str) -> np.ndarray:
    """Load a matrix from a JSON document or a CSV file of n rows."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameter(f"cannot read {path}: {exc}") from exc
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidParameter(f"{path}: malformed JSON: {exc}") from exc
        if not isinstance(doc, dict) or "n" not in doc or "rows" not in doc:
            raise InvalidParameter(f"{path}: expected an object with 'n' and 'rows'")
        try:
            n = int(doc["n"])
            rows = [[float(v) for v in row] for row in doc["rows"]]
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f"{path}: malformed matrix document: {exc}") from exc
        if len(rows) != n or any(len(row) != n for row in rows):
            raise InvalidParameter(f"{path}: rows do not form an {n}x{n} matrix")
    else:
        try:
            rows = [
                [float(tok) for tok in line.split(",")]
                for line in text.splitlines()
                if line.strip()
            ]
        except ValueError as exc:
            raise InvalidParameter(f"{path}: malformed CSV matrix: {exc}") from exc
        if not rows:
            raise InvalidParameter(f"{path}: empty matrix document")
    m = matcore.as_matrix(rows)
    log.debug("loaded %dx%d matrix from %s", m.shape[0], m.shape[1], path)
    return m


def matrix_to_document(m: np.ndarray) -> dict:
    return {"n": int(m.shape[0]), "rows": [[float(v) for v in row] for row in m]}


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _emit_json(obj, output: str | None) -> None:
    _write(json.dumps(obj, indent=2, sort_keys=True) + "\n", output)


def _fmt12(v: float) -> str:
    return "inf" if math.isinf(v) else format(v, ".12g")


def _load_vector(path: str) -> decouple.GaussianVector:
    return decouple.from_covariance(read_matrix_document(path))


def cmd_analyze(args: argparse.Namespace) -> int:
    x = _load_vector(args.input)
    rep = decouple.analyze(x, args.p, beta=args.beta, use_optimal_beta=args.optimal_beta)
    _emit_json(rep.to_json_dict(), args.output)
    return EXIT_OK


def cmd_region(args: argparse.Namespace) -> int:
    x = _load_vector(args.input)
    region = decouple.region_of(x)
    if args.format == "json":
        _emit_json(region.to_json_dict(), args.output)
    else:
        lines = [
            f"({_fmt12(iv.lo)}, {_fmt12(iv.hi)}) "
            + ("admissible" if iv.admissible else "excluded")
            for iv in region.intervals
        ]
        _write("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    x = _load_vector(args.input)
    rep = bounds_mod.report(x, args.p, beta=args.beta)
    _emit_json(rep.to_json_dict(), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    x = _load_vector(args.input)
    try:
        doc = json.loads(Path(args.functions).read_text())
    except OSError as exc:
        raise InvalidParameter(f"cannot read {args.functions}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"{args.functions}: malformed JSON: {exc}") from exc
    fs = verify_mod.parse_test_functions(doc)
    result = verify_mod.check_inequality(
        x,
        fs,
        args.p,
        samples=args.samples,
        seed=args.seed,
        constant=args.constant,
        beta=args.beta,
        nodes=args.nodes,
    )
    _emit_json(result.to_json_dict(), args.output)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


SWEEP_HEADER = [
    "param",
    "p",
    "in_region_new",
    "q_new",
    "classical_ok",
    "q_old",
    "max_inv_xi",
    "beta_bar_pX",
    "det_identity_residual",
]


def _parse_grid(text: str) -> list[float]:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise InvalidParameter(f"grid must be 'start:stop:step', got {text!r}")
    try:
        start, stop, step = (float(v) for v in parts)
    except ValueError as exc:
        raise InvalidParameter(f"malformed grid {text!r}: {exc}") from exc
    if not (step > 0.0 and start < stop and math.isfinite(start) and math.isfinite(stop)):
        raise InvalidParameter(f"grid needs step > 0 and start < stop, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(count)]


def _is_grid(value) -> bool:
    return isinstance(value, str) and value.count(":") == 2


def _sweep_rows(spec: dict):
    if not isinstance(spec, dict) or "family" not in spec or "p_grid" not in spec:
        raise InvalidParameter("sweep spec must contain 'family' and 'p_grid'")
    family_doc = spec["family"]
    if not isinstance(family_doc, dict):
        raise InvalidParameter("sweep 'family' must be a family descriptor object")
    swept = [k for k, v in family_doc.items() if _is_grid(v)]
    if len(swept) != 1:
        raise InvalidParameter(
            f"exactly one family parameter must be a 'start:stop:step' grid, found {swept}"
        )
    key = swept[0]
    param_values = _parse_grid(family_doc[key])
    p_values = _parse_grid(spec["p_grid"])
    beta = spec.get("beta")
    if beta is not None:
        beta = float(beta)

    log.debug("sweeping %s over %d values, %d exponents", key, len(param_values), len(p_values))
    for param in param_values:
        doc = dict(family_doc)
        doc[key] = int(round(param)) if key in ("n", "seed") else param
        x = decouple.from_covariance(covgen.generate(covgen.family_from_json(doc)))
        px = decouple.decoupling_coefficient(x)
        xi = decouple.simultaneous_diagonalization(x).xi
        region = decouple.region_of(x)
        max_inv_xi = float(1.0 / xi[0])
        if beta is not None:
            try:
                bb = decouple.beta_bar(x, beta)
            except DegenerateBeta:
                bb = None
        else:
            bb = None  # optimal route, threshold reported from the feasibility floor
        floor = max(decouple.variance_ratio(x), 1.0 + decouple.EPS_BETA)
        threshold = (bb if bb is not None else floor) * px
        for p in p_values:
            in_new = region.contains(p)
            qn = decouple.q_new(x, p) if in_new else None
            if beta is not None:
                classical_ok = bb is not None and p >= bb * px
                qo = decouple.q_old(x, p, bb) if classical_ok else None
            else:
                try:
                    qo = decouple.q_old(x, p, decouple.optimal_beta_bar(x, p))
                    classical_ok = True
                except (NotAdmissibleClassical, InvalidParameter):
                    qo = None
                    classical_ok = False
            yield {
                "param": param,
                "p": p,
                "in_region_new": in_new,
                "q_new": qn,
                "classical_ok": classical_ok,
                "q_old": qo,
                "max_inv_xi": max_inv_xi,
                "beta_bar_pX": threshold,
                "det_identity_residual": decouple.det_identity_residual(x, p),
            }


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text())
    except OSError as exc:
        raise InvalidParameter(f"cannot read {args.spec}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"{args.spec}: malformed JSON: {exc}") from exc
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for row in _sweep_rows(spec):
        writer.writerow([_csv_cell(row[col]) for col in SWEEP_HEADER])
    _write(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    text = args.family
    if text.startswith("@"):
        try:
            text = Path(text[1:]).read_text()
        except OSError as exc:
            raise InvalidParameter(f"cannot read {text[1:]}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"malformed family JSON: {exc}") from exc
    m = covgen.generate(covgen.family_from_json(doc))
    _emit_json(matrix_to_document(m), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussdec",
        description="Decoupling constants, admissible exponent regions and "
        "determinant bounds for finite Gaussian vectors.",
    )
    sub = parser.add_subparsers(dest="command")

    def add_input(p):
        p.add_argument("--input", required=True, help="matrix document (JSON or CSV)")

    def add_output(p):
        p.add_argument("--output", default=None, help="output path (default: stdout)")

    p_analyze = sub.add_parser("analyze", help="decoupling report at one exponent")
    add_input(p_analyze)
    p_analyze.add_argument("--p", type=float, required=True)
    p_analyze.add_argument("--beta", type=float, default=1.0)
    p_analyze.add_argument(
        "--optimal-beta",
        action="store_true",
        help="use the constant-minimizing beta_bar instead of max(ratio, beta)",
    )
    add_output(p_analyze)
    p_analyze.set_defaults(func=cmd_analyze)

    p_region = sub.add_parser("region", help="admissible intervals of (1, inf)")
    add_input(p_region)
    p_region.add_argument("--format", choices=("json", "text"), default="text")
    add_output(p_region)
    p_region.set_defaults(func=cmd_region)

    p_bounds = sub.add_parser("bounds", help="determinant bounds for p*diag(gamma) - C")
    add_input(p_bounds)
    p_bounds.add_argument("--p", type=float, required=True)
    p_bounds.add_argument("--beta", type=float, default=1.0)
    add_output(p_bounds)
    p_bounds.set_defaults(func=cmd_bounds)

    p_verify = sub.add_parser("verify", help="Monte Carlo inequality check")
    add_input(p_verify)
    p_verify.add_argument("--p", type=float, required=True)
    p_verify.add_argument("--functions", required=True, help="JSON array of test functions")
    p_verify.add_argument("--samples", type=int, default=1_000_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--nodes", type=int, default=64)
    p_verify.add_argument("--constant", choices=("new", "old"), default="new")
    p_verify.add_argument(
        "--beta",
        type=float,
        default=None,
        help="fix beta for the classical constant (default: optimal beta_bar)",
    )
    add_output(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="CSV table over a family parameter and a p grid")
    p_sweep.add_argument("--spec", required=True, help="sweep spec JSON")
    add_output(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_gen = sub.add_parser("gen", help="generate a covariance matrix document")
    p_gen.add_argument(
        "--family", required=True, help="family descriptor JSON (or @path to a file)"
    )
    add_output(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    return parser


def _configure_logging() -> None:
    level_name = os.environ.get("GAUSSDEC_LOG", "").strip().upper()
    if not level_name:
        return
    level = getattr(logging, level_name, None)
    if isinstance(level, int):
        logging.basicConfig(stream=sys.stderr, level=level)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INVALID_INPUT
        return EXIT_OK if code == 0 else EXIT_INVALID_INPUT
    _configure_logging()
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_INVALID_INPUT
    try:
        return args.func(args)
    except (NotInRegion, NotAdmissibleClassical, DegenerateBeta) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (NotPositiveDefinite, NonPositiveVariance, NonConvergence) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_SPD
    except (InvalidParameter, NotSymmetric, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
