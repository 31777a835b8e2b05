"""Versioned, line-oriented scan checkpoints.

A checkpoint captures the complete resumable state at a fully completed
n: the full-set row at n, the k = 1 omit-one column at n, and every
integer hit found so far.  The format is UTF-8 text so checkpoints are
human-auditable and diff-able:

    ESF-CKPT v1 n=<n> K=<stored row width>
    T <k> <num>/<den>        one line per row entry, k = 1..K
    S1 <i> <num>/<den>       one line per column entry, i = 1..n
    HIT <n> <i> <k> <num>/<den>

Files are written to a temporary name and atomically renamed, so a
half-written checkpoint can never replace a good one.  Loading validates
the version, line counts, canonical form of every rational (a value like
"6/4" is refused), and positivity of the row values; corruption fails
loudly instead of silently restarting the scan.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import List, Tuple

from .rational import format_rational, parse_rational
from .symfun import EsfRow, OmitFirstColumn

FORMAT_VERSION = 1
_HEADER_RE = re.compile(r"^ESF-CKPT v(\d+) n=(\d+) K=(\d+)$")


class CheckpointError(RuntimeError):
    """Raised when a checkpoint cannot be saved, parsed, or trusted."""


@dataclass(frozen=True)
class IntegerHit:
    n: int
    i: int
    k: int
    value: str  # canonical "num/den", e.g. "1/1"

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.n, self.i, self.k)


@dataclass(frozen=True)
class CheckpointRecord:
    n: int  # last fully completed n
    t_row: EsfRow
    s_col: OmitFirstColumn
    hits: Tuple[IntegerHit, ...]
    format_version: int = FORMAT_VERSION


def save_checkpoint(path: str, record: CheckpointRecord) -> None:
    row_vals = record.t_row.values
    if record.t_row.n != record.n or record.s_col.n != record.n:
        raise CheckpointError("checkpoint state not aligned to a single n")
    lines = [f"ESF-CKPT v{record.format_version} n={record.n} K={len(row_vals)}"]
    lines.extend(f"T {k} {format_rational(v)}" for k, v in enumerate(row_vals, 1))
    lines.extend(f"S1 {i} {format_rational(v)}" for i, v in enumerate(record.s_col.values, 1))
    lines.extend(
        f"HIT {h.n} {h.i} {h.k} {h.value}" for h in sorted(record.hits, key=IntegerHit.sort_key)
    )
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def load_checkpoint(path: str) -> CheckpointRecord:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    lines = raw.splitlines()
    if not lines:
        raise CheckpointError(f"checkpoint {path} is empty")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise CheckpointError(f"checkpoint {path}: bad header {lines[0]!r}")
    version, n, width = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"checkpoint {path}: format version {version} unsupported (expected {FORMAT_VERSION})"
        )
    if n < 1 or width < 1 or width > n:
        raise CheckpointError(f"checkpoint {path}: implausible header n={n} K={width}")

    body = lines[1:]
    expected = width + n
    if len(body) < expected:
        raise CheckpointError(
            f"checkpoint {path}: truncated ({len(body)} body lines, need >= {expected})"
        )

    def parse_value(text: str, where: str):
        try:
            return parse_rational(text, strict=True)
        except ValueError as exc:
            raise CheckpointError(f"checkpoint {path}: {where}: {exc}") from exc

    row_vals = []
    for idx in range(width):
        parts = body[idx].split()
        if len(parts) != 3 or parts[0] != "T" or parts[1] != str(idx + 1):
            raise CheckpointError(f"checkpoint {path}: expected 'T {idx + 1} ...', got {body[idx]!r}")
        v = parse_value(parts[2], f"T {idx + 1}")
        if v <= 0:
            raise CheckpointError(f"checkpoint {path}: T {idx + 1} not positive")
        row_vals.append(v)

    col_vals = []
    for idx in range(n):
        line = body[width + idx]
        parts = line.split()
        if len(parts) != 3 or parts[0] != "S1" or parts[1] != str(idx + 1):
            raise CheckpointError(f"checkpoint {path}: expected 'S1 {idx + 1} ...', got {line!r}")
        col_vals.append(parse_value(parts[2], f"S1 {idx + 1}"))

    hits: List[IntegerHit] = []
    for line in body[expected:]:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 5 or parts[0] != "HIT":
            raise CheckpointError(f"checkpoint {path}: unexpected line {line!r}")
        hn, hi, hk = int(parts[1]), int(parts[2]), int(parts[3])
        value = parse_value(parts[4], f"HIT {hn} {hi} {hk}")
        if not (2 <= hn <= n and 1 <= hi <= hn and 1 <= hk < hn):
            raise CheckpointError(f"checkpoint {path}: implausible hit {line!r}")
        hits.append(IntegerHit(n=hn, i=hi, k=hk, value=format_rational(value)))

    return CheckpointRecord(
        n=n,
        t_row=EsfRow(n=n, cap=width, values=tuple(row_vals)),
        s_col=OmitFirstColumn(n=n, values=tuple(col_vals)),
        hits=tuple(sorted(hits, key=IntegerHit.sort_key)),
        format_version=version,
    )
