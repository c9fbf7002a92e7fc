"""Text format for exact matrices.

Header line "m n", then m lines of n whitespace-separated entries, each an
integer or "p/q" rational with positive denominator. Lines starting with '#'
are ignored. Parsing is locale-independent.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Union

from gmpy2 import mpq

from .exactmat import Matrix

_ENTRY_RE = re.compile(r"^[+-]?\d+(?:/\d+)?$")


class MatrixFileError(ValueError):
    """Malformed matrix file."""


def _parse_entry(token: str) -> mpq:
    if not _ENTRY_RE.match(token):
        raise MatrixFileError(f"bad entry {token!r}")
    if "/" in token and int(token.split("/")[1]) == 0:
        raise MatrixFileError(f"zero denominator in {token!r}")
    return mpq(token)


def parse_matrix_text(text: str) -> Matrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFileError("missing header line")
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixFileError(f"header must be 'm n', got {lines[0]!r}")
    try:
        m, n = int(header[0]), int(header[1])
    except ValueError as exc:
        raise MatrixFileError(f"non-integer header {lines[0]!r}") from exc
    if m < 0 or n < 0:
        raise MatrixFileError("negative dimension in header")
    body = lines[1:]
    if len(body) != m:
        raise MatrixFileError(f"expected {m} rows, got {len(body)}")
    rows = []
    for ln in body:
        tokens = ln.split()
        if len(tokens) != n:
            raise MatrixFileError(f"expected {n} entries per row, got {len(tokens)}")
        rows.append([_parse_entry(tok) for tok in tokens])
    return Matrix(m, n, [x for r in rows for x in r])


def parse_matrix_file(path: Union[str, Path]) -> Matrix:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from exc
    return parse_matrix_text(text)


def format_matrix(a: Matrix) -> str:
    lines = [f"{a.rows} {a.cols}"]
    for i in range(a.rows):
        lines.append(" ".join(str(x) for x in a.row(i)))
    return "\n".join(lines) + "\n"


def write_matrix_file(path: Union[str, Path], a: Matrix) -> None:
    Path(path).write_text(format_matrix(a))
