"""
cli.py
------
Command-line front end for the rank library.

Usage:
    python src/cli.py rank    FILE [--kind {rrank,mrank,urank}] [--json]
    python src/cli.py recover FILE [--json]
    python src/cli.py genfun  FILE
    python src/cli.py verify  FILE [--csv PATH]
    python src/cli.py walks   MATRIX_FILE [--json]

Input files:
- Sequence files hold one scalar per line in the literal grammar (`3`, `-1/2`,
  `1+2i`, `3/4-i`). Lines starting with `#` are comments. A header line
  `@index 0` (moment-rank convention, the default) or `@index 1` (power sums)
  fixes the index of the first term.
- Matrix files hold whitespace-separated rows of scalars, `#` comments allowed.

Exit codes:
    0  certified / all conditions agree
    2  ErrorNotSimple
    3  NoFiniteRankWithinPrefix (also a characteristic root at 0)
    4  NonIntegerMasses
    5  TFAE disagreement, or a walk count that contradicts the elimination rank
    1  parse, IO or any other library error

Reports go to stdout, logs to stderr and `TEMP_DIR/LOG_FILE`.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

sys.path.insert(1, "./src")

from analytic import Convention, genfun, moments, numeric_moments, recover_measure
from exact_linalg import ExactMatrix, SequenceWindow, ShapeError, column_rank, trace
from exactnum import GaussianRational, SeqRankError
from ranks import RankFailure, mrank, rrank, scalar_to_dict, tfae_crosscheck, urank
from settings import config

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_DISAGREEMENT = 5

RANK_FUNCTIONS = {"rrank": rrank, "mrank": mrank, "urank": urank}


class InputFormatError(SeqRankError):
    """Raised for malformed sequence or matrix files."""


@dataclass(frozen=True)
class InputDocument:
    """A parsed input file: a sequence window or a square matrix."""

    kind: str
    convention: Convention
    payload: object
    source: str = ""


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def parse_sequence(text: str, source: str = "<text>") -> InputDocument:
    """
    Parse a sequence file.

    Raises:
        InputFormatError: For a bad `@index` header or a header after the first term.
        InvalidLiteral: For a malformed scalar.
        DegenerateInput: If the file holds no terms.
    """
    start_index = 0
    terms = []
    for number, line in _content_lines(text):
        if line.startswith("@"):
            fields = line.split()
            if fields[0] != "@index" or len(fields) != 2 or fields[1] not in ("0", "1"):
                raise InputFormatError(f"{source}:{number}: expected '@index 0' or '@index 1', got {line!r}")
            if terms:
                raise InputFormatError(f"{source}:{number}: @index must precede the terms")
            start_index = int(fields[1])
            continue
        terms.append(GaussianRational.parse(line))
    convention = Convention.MOMENT_RANK if start_index == 0 else Convention.UNITARY_RANK
    return InputDocument("sequence", convention, SequenceWindow(start_index, tuple(terms)), source)


def parse_matrix(text: str, source: str = "<text>") -> InputDocument:
    """
    Parse a square matrix file.

    Raises:
        ShapeError: If the rows are ragged or the matrix is not square.
        InputFormatError: If the file holds no rows.
    """
    rows = [[GaussianRational.parse(tok) for tok in line.split()] for _, line in _content_lines(text)]
    if not rows:
        raise InputFormatError(f"{source}: no matrix rows")
    matrix = ExactMatrix.from_rows(rows)
    if not matrix.is_square:
        raise ShapeError(f"{source}: walk counts need a square matrix, got {matrix.rows}x{matrix.cols}")
    return InputDocument("matrix", Convention.UNITARY_RANK, matrix, source)


def read_document(path, kind: str = "sequence") -> InputDocument:
    text = Path(path).read_text(encoding="utf-8")
    if kind == "matrix":
        return parse_matrix(text, str(path))
    return parse_sequence(text, str(path))


# --- reports -------------------------------------------------------------------


def _scalar(z) -> str:
    if isinstance(z, GaussianRational):
        return str(z)
    w = complex(z)
    if abs(w.imag) <= config("SEQRANK_TOL") * max(1.0, abs(w)):
        return format(w.real, ".17g")
    return f"{w.real:.17g}{w.imag:+.17g}i"


def _dump(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True)


def format_certificate(cert) -> str:
    lines = [
        f"kind:            {cert.kind.value}",
        f"status:          {cert.status.value}",
        f"rank:            {cert.rank if cert.rank is not None else '-'}",
    ]
    if cert.zero_sequence:
        lines.append("zero sequence:   yes")
    if cert.char_poly is not None:
        lines.append(f"char poly:       {cert.char_poly}")
    if cert.atoms:
        lines.append(f"path:            {'exact' if cert.exact else f'numeric (residual {cert.residual:.3e})'}")
        lines += [f"  atom {_scalar(a):<28} mass {_scalar(m)}" for a, m in zip(cert.atoms, cert.masses)]
    lines.append(f"verified shifts: {cert.verified_shifts} of {cert.term_count} terms")
    if cert.detail:
        lines.append(f"detail:          {cert.detail}")
    return "\n".join(lines)


def _failure_exit(e: RankFailure) -> int:
    print(format_certificate(e.certificate))
    return e.certificate.status.exit_code


# --- commands ------------------------------------------------------------------


def cmd_rank(doc: InputDocument, kind: str | None = None, as_json: bool = False) -> int:
    """Certify one rank; the default kind follows the file's index convention."""
    if kind is None:
        kind = "mrank" if doc.convention is Convention.MOMENT_RANK else "urank"
    cert = RANK_FUNCTIONS[kind](doc.payload)
    print(_dump(cert.to_dict()) if as_json else format_certificate(cert))
    return cert.status.exit_code


def _reconstruction_residual(mu, seq: SequenceWindow, convention: Convention) -> float:
    if mu.is_exact:
        rebuilt = moments(mu, len(seq), convention)
        if rebuilt.terms == seq.terms:
            return 0.0
        return float(np.max(np.abs(rebuilt.to_numpy() - seq.to_numpy())))
    target = seq.to_numpy()
    rebuilt = numeric_moments(mu, len(seq), convention)
    return float(np.max(np.abs(rebuilt - target) / np.maximum(1.0, np.abs(target))))


def cmd_recover(doc: InputDocument, as_json: bool = False) -> int:
    """Recover atoms and masses and re-verify them through the forward moments."""
    try:
        mu = recover_measure(doc.payload)
    except RankFailure as e:
        return _failure_exit(e)
    residual = _reconstruction_residual(mu, doc.payload, doc.convention)
    if as_json:
        print(
            _dump(
                {
                    "convention": doc.convention.value,
                    "rank": len(mu.support),
                    "exact": mu.is_exact,
                    "residual": residual,
                    **mu.to_dict(),
                }
            )
        )
    else:
        print(f"convention: {doc.convention.value}")
        print(f"rank:       {len(mu.support)}")
        for atom, mass in zip(mu.support, mu.masses):
            print(f"  atom {_scalar(atom):<28} mass {_scalar(mass)}")
        print(f"residual:   {residual:.3e}")
    return 0


def cmd_genfun(doc: InputDocument) -> int:
    """Print the rational generating function with its poles."""
    try:
        gf = genfun(doc.payload)
    except RankFailure as e:
        return _failure_exit(e)
    print(gf.format())
    print(f"numerator:   {gf.numerator.format('z', ascending=True)}")
    print(f"denominator: {gf.denominator.format('z', ascending=True)}")
    for pole, multiplicity in gf.poles:
        print(f"  pole {_scalar(pole):<28} multiplicity {multiplicity}")
    if not gf.simple:
        print("warning: poles are not simple (the minimal recurrence has a repeated root)")
    return 0


def cmd_verify(doc: InputDocument, csv_path=None) -> int:
    """Cross-check the equivalent characterisations; exit 5 on disagreement."""
    report = tfae_crosscheck(doc.payload)
    print(report.format())
    if csv_path is not None:
        report.to_frame().to_csv(csv_path, index=False)
        logger.info(f"Condition table written to {csv_path}")
    return 0 if report.agree else EXIT_DISAGREEMENT


def walk_traces(A: ExactMatrix, count: int) -> SequenceWindow:
    """tr(A^n) for n = 1..count, i.e. the power sums of the eigenvalues of A."""
    power = A
    traces = [trace(power)]
    for _ in range(count - 1):
        power = power @ A
        traces.append(trace(power))
    return SequenceWindow(1, tuple(traces))


def cmd_walks(doc: InputDocument, as_json: bool = False) -> int:
    """
    Count nonzero eigenvalues of an integer matrix from closed-walk counts.

    The unitary rank of tr(A^n), n = 1..2N, is the number of nonzero eigenvalues
    with algebraic multiplicity; N minus it is the algebraic multiplicity of 0.
    For symmetric matrices this must equal the elimination rank.
    """
    A = doc.payload
    n = A.rows
    traces = walk_traces(A, 2 * n)
    cert = urank(traces)
    if not cert.certified:
        print(format_certificate(cert))
        return cert.status.exit_code

    nonzero = cert.rank
    symmetric = A == A.transpose()
    elimination = column_rank(A) if symmetric else None
    consistent = elimination is None or elimination == nonzero
    if not consistent:
        logger.error(f"Walk count gives {nonzero} nonzero eigenvalues but elimination rank is {elimination}")

    if as_json:
        print(
            _dump(
                {
                    "size": n,
                    "traces": [scalar_to_dict(t) for t in traces.terms],
                    "nonzero_eigenvalues": nonzero,
                    "zero_multiplicity": n - nonzero,
                    "symmetric": symmetric,
                    "elimination_rank": elimination,
                    "consistent": consistent,
                    "certificate": cert.to_dict(),
                }
            )
        )
    else:
        print(f"size:                 {n}x{n}")
        print(f"traces:               {', '.join(str(t) for t in traces.terms)}")
        print(f"nonzero eigenvalues:  {nonzero} (algebraic multiplicity)")
        print(f"zero multiplicity:    {n - nonzero}")
        if symmetric:
            print(f"elimination rank:     {elimination} ({'consistent' if consistent else 'MISMATCH'})")
        else:
            print("elimination rank:     not compared (matrix is not symmetric; algebraic counts may differ)")
    return 0 if consistent else EXIT_DISAGREEMENT


# --- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cli.py", description="Exact sequence ranks and atomic measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    rank = sub.add_parser("rank", help="certify rrank, mrank or urank")
    rank.add_argument("file")
    rank.add_argument("--kind", choices=sorted(RANK_FUNCTIONS), default=None)
    rank.add_argument("--json", action="store_true")

    recover = sub.add_parser("recover", help="recover atoms and masses")
    recover.add_argument("file")
    recover.add_argument("--json", action="store_true")

    gf = sub.add_parser("genfun", help="rational generating function")
    gf.add_argument("file")

    verify = sub.add_parser("verify", help="cross-check equivalent characterisations")
    verify.add_argument("file")
    verify.add_argument("--csv", default=None, help="write the condition table to this CSV file")

    walks = sub.add_parser("walks", help="zero-eigenvalue multiplicity from closed-walk counts")
    walks.add_argument("file")
    walks.add_argument("--json", action="store_true")
    return parser


def configure_logging():
    temp_dir = config("TEMP_DIR")
    temp_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=config("LOG_LEVEL"),
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[
            logging.FileHandler(temp_dir / config("LOG_FILE")),
            logging.StreamHandler(sys.stderr),
        ],
    )


def run(args: argparse.Namespace) -> int:
    doc = read_document(args.file, "matrix" if args.command == "walks" else "sequence")
    logger.info(f"{args.command}: {doc.kind} from {doc.source}")
    if args.command == "rank":
        return cmd_rank(doc, args.kind, args.json)
    if args.command == "recover":
        return cmd_recover(doc, args.json)
    if args.command == "genfun":
        return cmd_genfun(doc)
    if args.command == "verify":
        return cmd_verify(doc, args.csv)
    return cmd_walks(doc, args.json)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    try:
        return run(args)
    except RankFailure as e:
        return _failure_exit(e)
    except (SeqRankError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
