"""Command-line surface: poly, bounds, qmax, classify, table1.

Exit codes: 0 success, 2 usage, 3 resource limit, 4 data/parse problem,
5 numerical-integrity failure.  Structured output is a single JSON document
per invocation with a schema_version field; identical command and seed give
byte-identical structured output.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from typing import Sequence

from . import classify, models, polynomial, quantum
from .errors import (
    DataFormatError,
    IncompleteDataError,
    InconsistentInputError,
    InvalidArgumentError,
    NotTabulatedError,
    NumericalIntegrityError,
    ResourceLimitError,
)
from .polynomial import CorrelationVector, Polynomial, Term

DEFAULT_SEED = 0x5EED
SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_DATA = 4
EXIT_INTEGRITY = 5

_KINDS = ("mk", "mk-prime", "svetlichny", "svetlichny-minus")


@dataclass(frozen=True)
class RunConfig:
    """Every tunable default in one place; print with --show-config."""

    seed: int = DEFAULT_SEED
    restarts: int = 16
    output_format: str = "text"
    local_cap: int = models.DEFAULT_LOCAL_CAP
    hybrid_block_cap: int = models.DEFAULT_HYBRID_BLOCK_CAP
    brute_settings_cap: int = models.DEFAULT_BRUTE_SETTINGS_CAP
    spectral_cap: int = quantum.DEFAULT_SPECTRAL_CAP
    seesaw_tol: float = quantum.DEFAULT_SEESAW_TOL
    seesaw_max_sweeps: int = quantum.DEFAULT_MAX_SWEEPS
    verify_tol: float = classify.QUANTUM_CHECK_TOL
    verdict_tol: float = classify.VERDICT_TOL

    def __post_init__(self) -> None:
        for name in ("restarts", "local_cap", "hybrid_block_cap", "brute_settings_cap",
                     "spectral_cap", "seesaw_max_sweeps"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be positive")
        for name in ("seesaw_tol", "verify_tol", "verdict_tol"):
            value = getattr(self, name)
            if not 0.0 < value < 1e-2:
                raise InvalidArgumentError(f"{name} must lie in (0, 1e-2), got {value}")
        if self.output_format not in ("text", "structured"):
            raise InvalidArgumentError(f"unknown output format {self.output_format!r}")


def build_polynomial(kind: str, n: int) -> Polynomial:
    if kind == "mk":
        return polynomial.mk(n)
    if kind == "mk-prime":
        return polynomial.prime_flip(polynomial.mk(n))
    if kind == "svetlichny":
        return polynomial.svetlichny(n)
    if kind == "svetlichny-minus":
        return polynomial.svetlichny_minus(n)
    raise InvalidArgumentError(f"unknown polynomial kind {kind!r}")


def parse_correlation_text(text: str) -> CorrelationVector:
    """Correlation data: header `n=<count>`, then `<settings> <value>` lines.

    Settings are an n-character string over {0,1}, leftmost character for
    party 1, with 1 marking the primed setting.  Duplicate settings are an
    error; values must lie in [-1, 1].
    """
    n: int | None = None
    values: dict[Term, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            if not line.startswith("n="):
                raise DataFormatError(
                    "correlation file must start with an n=<count> header", line=lineno
                )
            try:
                n = int(line[2:])
            except ValueError as exc:
                raise DataFormatError(f"bad header {line!r}", line=lineno) from exc
            if n < 1:
                raise DataFormatError("party count must be >= 1", line=lineno)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataFormatError(f"expected `<settings> <value>`, got {line!r}", line=lineno)
        settings, value_text = parts
        if len(settings) != n or any(ch not in "01" for ch in settings):
            raise DataFormatError(
                f"settings must be {n} characters over 0/1, got {settings!r}", line=lineno
            )
        mask = 0
        for i, ch in enumerate(settings):
            if ch == "1":
                mask |= 1 << i
        term = Term(n, mask)
        if term in values:
            raise DataFormatError(f"duplicate settings {settings!r}", line=lineno)
        try:
            value = float(value_text)
        except ValueError as exc:
            raise DataFormatError(f"bad value {value_text!r}", line=lineno) from exc
        if not -1.0 <= value <= 1.0:
            raise DataFormatError(
                f"correlation value {value} outside [-1, 1]", line=lineno
            )
        values[term] = value
    if n is None:
        raise DataFormatError("empty correlation file")
    return CorrelationVector(n, values)


def _read_file(path: str, what: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read {what} {path!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_poly(args: argparse.Namespace, config: RunConfig) -> tuple[dict, str]:
    poly = build_polynomial(args.kind, args.n)
    limit = polynomial.algebraic_limit(poly)
    doc = {
        "command": "poly",
        "kind": args.kind,
        "n": args.n,
        "polynomial": polynomial.to_dict(poly),
        "support_size": polynomial.support_size(poly),
        "algebraic_limit": {"value": float(limit), "exact": str(limit)},
    }
    text_lines = [polynomial.to_text(poly)] if poly.terms else []
    text_lines.append(f"# support size: {polynomial.support_size(poly)}")
    text_lines.append(f"# algebraic limit: {float(limit):g} ({limit})")
    return doc, "\n".join(text_lines)


def _local_witness_text(witness: models.LocalStrategy) -> str:
    return " ".join(
        f"A{j + 1}=({pair[0]:+d},{pair[1]:+d})" for j, pair in enumerate(witness.settings)
    )


def cmd_bounds(args: argparse.Namespace, config: RunConfig) -> tuple[dict, str]:
    poly = build_polynomial(args.kind, args.n)
    wanted = [m.strip() for m in args.models.split(",") if m.strip()]
    unknown = set(wanted) - {"local", "hybrid", "algebraic"}
    if unknown:
        raise InvalidArgumentError(
            f"unknown model(s) {sorted(unknown)}; choose from local, hybrid, algebraic"
        )
    if args.partition is not None and "hybrid" not in wanted:
        raise InvalidArgumentError("--partition only applies to the hybrid model")
    doc: dict = {"command": "bounds", "kind": args.kind, "n": args.n, "results": {}}
    lines = [f"polynomial: {args.kind} n={args.n}"]
    if "local" in wanted:
        result = models.local_bound(poly, cap=config.local_cap)
        doc["results"]["local"] = result.as_dict()
        lines.append(f"local bound: {result.value:g} ({result.value_exact})")
        lines.append(f"  witness: {_local_witness_text(result.witness)}")
    if "hybrid" in wanted:
        if args.partition is not None:
            partition = models.Bipartition.from_text(args.partition)
            if partition.n != poly.n:
                raise InvalidArgumentError(
                    f"partition covers {partition.n} parties, polynomial has {poly.n}"
                )
            result = models.hybrid_bound(
                poly, partition, max_block_size=config.hybrid_block_cap
            )
            doc["results"]["hybrid"] = {
                "per_partition": [
                    {"partition": partition.to_text(), **result.as_dict()}
                ],
                "max": result.as_dict(),
            }
            lines.append(
                f"hybrid bound ({partition.to_text()}): {result.value:g} "
                f"({result.value_exact})"
            )
        else:
            scan = models.hybrid_bound_all(poly, max_block_size=config.hybrid_block_cap)
            doc["results"]["hybrid"] = {
                "per_partition": [
                    {"partition": partition.to_text(), **result.as_dict()}
                    for partition, result in scan
                ],
                "max": scan.overall.as_dict(),
            }
            lines.append("hybrid bounds:")
            for partition, result in scan:
                lines.append(
                    f"  {partition.to_text()}: {result.value:g} ({result.value_exact})"
                )
            lines.append(
                f"  max: {scan.overall.value:g} "
                f"({scan.overall.witness.partition.to_text()})"
            )
    if "algebraic" in wanted:
        limit = polynomial.algebraic_limit(poly)
        doc["results"]["algebraic"] = {
            "model": "algebraic",
            "value": float(limit),
            "value_exact": str(limit),
            "witness": None,
        }
        lines.append(f"algebraic limit: {float(limit):g} ({limit})")
    return doc, "\n".join(lines)


def _state_doc(state: quantum.PureState) -> dict:
    return {
        "n": state.n,
        "amplitudes": [[float(amp.real), float(amp.imag)] for amp in state.amplitudes],
    }


def cmd_qmax(args: argparse.Namespace, config: RunConfig) -> tuple[dict, str]:
    poly = build_polynomial(args.kind, args.n)
    doc: dict = {
        "command": "qmax",
        "kind": args.kind,
        "n": args.n,
        "seed": config.seed,
        "restarts": config.restarts,
    }
    if args.state is not None:
        state = quantum.parse_state(args.state)
        if state.n != poly.n:
            raise InvalidArgumentError(
                f"state has {state.n} qubits, polynomial has {poly.n} parties"
            )
        result = quantum.seesaw(
            poly,
            state,
            restarts=config.restarts,
            seed=config.seed,
            tol=config.seesaw_tol,
            max_sweeps=config.seesaw_max_sweeps,
        )
        frame, value, state_doc = result.frame, result.value, None
    else:
        result = quantum.quantum_max(
            poly,
            restarts=config.restarts,
            seed=config.seed,
            cap=config.spectral_cap,
            tol=config.seesaw_tol,
            max_rounds=config.seesaw_max_sweeps,
        )
        frame, value, state_doc = result.frame, result.value, _state_doc(result.state)
    doc["value"] = value
    doc["frame"] = frame.as_dict()
    doc["state"] = state_doc
    lines = [f"quantum max: {value!r}", "frame:", quantum.frame_to_text(frame)]
    if state_doc is not None:
        lines.append("state amplitudes (re im):")
        lines.extend(
            f"{float(amp.real)!r} {float(amp.imag)!r}" for amp in result.state.amplitudes
        )
    return doc, "\n".join(lines)


def cmd_classify(args: argparse.Namespace, config: RunConfig) -> tuple[dict, str]:
    kind, n_text = args.poly
    if kind not in _KINDS:
        raise InvalidArgumentError(f"unknown polynomial kind {kind!r}")
    try:
        n = int(n_text)
    except ValueError as exc:
        raise InvalidArgumentError(f"bad party count {n_text!r}") from exc
    poly = build_polynomial(kind, n)
    sources = [
        args.value is not None,
        args.correlations is not None,
        args.state is not None or args.frame is not None,
    ]
    if sum(sources) != 1:
        raise InvalidArgumentError(
            "provide exactly one input source: --value, --correlations, "
            "or --state with --frame"
        )
    if args.value is not None:
        value = args.value
        source = {"type": "value"}
    elif args.correlations is not None:
        correlations = parse_correlation_text(_read_file(args.correlations, "correlation file"))
        if correlations.n != poly.n:
            raise DataFormatError(
                f"correlation file is for {correlations.n} parties, polynomial has {poly.n}"
            )
        value = polynomial.evaluate(poly, correlations)
        source = {"type": "correlations", "path": args.correlations}
    else:
        if args.state is None or args.frame is None:
            raise InvalidArgumentError("--state and --frame must be given together")
        state = quantum.parse_state(args.state)
        frame = quantum.frame_from_text(_read_file(args.frame, "frame file"))
        if state.n != poly.n or frame.n != poly.n:
            raise InvalidArgumentError(
                f"polynomial has {poly.n} parties, state has {state.n}, frame has {frame.n}"
            )
        value = quantum.expectation(quantum.bell_operator(poly, frame), state)
        source = {"type": "state", "state": args.state, "frame": args.frame}
    if kind in ("mk", "mk-prime"):
        verdict = classify.entanglement_depth_verdict(value, n, tol=config.verdict_tol)
        thresholds = [
            {"depth": m + 1, "value": float(classify.Root2Power(m - 1)),
             "exact": classify.Root2Power(m - 1).render()}
            for m in range(1, n)
        ]
    else:
        verdict = classify.nonseparability_verdict(value, n, tol=config.verdict_tol)
        threshold = verdict.threshold
        thresholds = [
            {"genuine": n, "value": float(threshold), "exact": threshold.render()}
        ]
    doc = {
        "command": "classify",
        "kind": kind,
        "n": n,
        "source": source,
        "value": value,
        "thresholds": thresholds,
        "verdict": verdict.as_dict(),
    }
    lines = [
        f"polynomial: {kind} n={n}",
        f"value: {value!r}",
    ]
    if verdict.threshold is not None:
        lines.append(
            f"threshold crossed: {verdict.threshold.render()} "
            f"(= {float(verdict.threshold)!r})"
        )
        lines.append(f"margin: {verdict.margin!r}")
    lines.append(f"conclusion: {verdict.conclusion}")
    return doc, "\n".join(lines)


def cmd_table1(args: argparse.Namespace, config: RunConfig) -> tuple[dict, str]:
    report = classify.table1(
        restarts=config.restarts,
        seed=config.seed,
        _corrupt_cell=args.inject_mismatch,
    )
    doc = {
        "command": "table1",
        "seed": config.seed,
        "restarts": config.restarts,
        **report.as_dict(),
    }
    return doc, report.render_text()


# ---------------------------------------------------------------------------
# Parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellpoly",
        description=(
            "Correlation polynomials for n two-setting parties: construction, "
            "separable-model bounds, quantum maxima, and classification."
        ),
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for all randomized searches (default 0x5EED)")
    parser.add_argument("--restarts", type=int, default=16,
                        help="random restarts for see-saw searches (default 16)")
    parser.add_argument("--format", choices=("text", "structured"), default="text",
                        help="output format (structured = one JSON document)")
    parser.add_argument("--show-config", action="store_true",
                        help="print the effective configuration and exit")
    parser.add_argument("--local-cap", type=int, default=models.DEFAULT_LOCAL_CAP,
                        help="max n for the 4^n local-script enumeration")
    parser.add_argument("--hybrid-block-cap", type=int,
                        default=models.DEFAULT_HYBRID_BLOCK_CAP,
                        help="max size of the enumerated hybrid block")
    parser.add_argument("--brute-settings-cap", type=int,
                        default=models.DEFAULT_BRUTE_SETTINGS_CAP,
                        help="max 2^|block| per side for the oracle enumeration")
    parser.add_argument("--spectral-cap", type=int, default=quantum.DEFAULT_SPECTRAL_CAP,
                        help="max qubit count for dense spectral computations")
    parser.add_argument("--seesaw-tol", type=float, default=quantum.DEFAULT_SEESAW_TOL,
                        help="see-saw convergence threshold")
    parser.add_argument("--seesaw-max-sweeps", type=int, default=quantum.DEFAULT_MAX_SWEEPS,
                        help="see-saw sweep limit")
    parser.add_argument("--verify-tol", type=float, default=classify.QUANTUM_CHECK_TOL,
                        help="tolerance for quantum cells in table checks")
    parser.add_argument("--verdict-tol", type=float, default=classify.VERDICT_TOL,
                        help="strict-inequality guard for verdicts")

    sub = parser.add_subparsers(dest="command")

    poly_p = sub.add_parser("poly", help="print one polynomial in canonical form")
    poly_p.add_argument("kind", choices=_KINDS)
    poly_p.add_argument("n", type=int)

    bounds_p = sub.add_parser("bounds", help="exact model bounds with witnesses")
    bounds_p.add_argument("kind", choices=_KINDS)
    bounds_p.add_argument("n", type=int)
    bounds_p.add_argument("--models", default="local,hybrid,algebraic",
                          help="comma list from local,hybrid,algebraic")
    bounds_p.add_argument("--partition", default=None,
                          help="restrict hybrid to one bipartition, e.g. A=3|B=1,2")

    qmax_p = sub.add_parser("qmax", help="quantum maximum by see-saw ascent")
    qmax_p.add_argument("kind", choices=_KINDS)
    qmax_p.add_argument("n", type=int)
    qmax_p.add_argument("--state", default=None,
                        help="fix the state: ghz:n, basis:n:index, or file:<path>")

    classify_p = sub.add_parser("classify", help="verdict from a value, data file, or state")
    classify_p.add_argument("--poly", nargs=2, metavar=("KIND", "N"), required=True)
    classify_p.add_argument("--value", type=float, default=None)
    classify_p.add_argument("--correlations", default=None,
                            help="correlation data file (header n=..., then settings/value lines)")
    classify_p.add_argument("--state", default=None,
                            help="state spec: ghz:n, basis:n:index, or file:<path>")
    classify_p.add_argument("--frame", default=None, help="measurement frame file")

    table_p = sub.add_parser("table1", help="recompute and verify the three-party bound table")
    table_p.add_argument("--inject-mismatch", default=None, help=argparse.SUPPRESS)

    return parser


_COMMANDS = {
    "poly": cmd_poly,
    "bounds": cmd_bounds,
    "qmax": cmd_qmax,
    "classify": cmd_classify,
    "table1": cmd_table1,
}


def _emit(doc: dict, text: str, config: RunConfig) -> None:
    if config.output_format == "structured":
        payload = {"schema_version": SCHEMA_VERSION, **doc}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            seed=args.seed,
            restarts=args.restarts,
            output_format=args.format,
            local_cap=args.local_cap,
            hybrid_block_cap=args.hybrid_block_cap,
            brute_settings_cap=args.brute_settings_cap,
            spectral_cap=args.spectral_cap,
            seesaw_tol=args.seesaw_tol,
            seesaw_max_sweeps=args.seesaw_max_sweeps,
            verify_tol=args.verify_tol,
            verdict_tol=args.verdict_tol,
        )
        if args.show_config:
            if args.format == "structured":
                print(json.dumps(
                    {"schema_version": SCHEMA_VERSION, "config": asdict(config)},
                    sort_keys=True, indent=2,
                ))
            else:
                for key, value in asdict(config).items():
                    print(f"{key} = {value}")
            return EXIT_OK
        if args.command is None:
            parser.error("a command is required (poly, bounds, qmax, classify, table1)")
        doc, text = _COMMANDS[args.command](args, config)
    except (InvalidArgumentError, NotTabulatedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DataFormatError, IncompleteDataError, InconsistentInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalIntegrityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    _emit(doc, text, config)
    return EXIT_OK


def run() -> None:
    """Console-script entry point."""
    raise SystemExit(main())
