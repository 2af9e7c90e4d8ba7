"""Dataset and ranked-results files."""

from __future__ import annotations

import csv
import io
import math

from .encoding import DescriptorTable, EncodingError, encode
from .regression import TrainingSet

RESULT_HEADER = ["rank", "sequence", "score", "bound", "optimal"]


class DatasetError(ValueError):
    pass


def _rows(text: str, what: str):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError(f"{what} is empty") from None
    return [h.strip() for h in header], reader


def parse_dataset(text: str, table: DescriptorTable) -> TrainingSet:
    """CSV with header ``sequence,activity``; one peptide per row."""
    header, reader = _rows(text, "dataset")
    if header[:2] != ["sequence", "activity"]:
        raise DatasetError("line 1: expected header 'sequence,activity'")
    seqs, acts = [], []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < 2:
            raise DatasetError(f"line {lineno}: expected 2 columns, got {len(row)}")
        raw = row[0].strip()
        if not raw:
            raise DatasetError(f"line {lineno}: empty sequence")
        try:
            seqs.append(encode(raw, table, context=f"line {lineno}"))
        except EncodingError as exc:
            raise DatasetError(str(exc)) from None
        try:
            value = float(row[1])
        except ValueError:
            raise DatasetError(f"line {lineno}: activity {row[1]!r} is not a number") from None
        if not math.isfinite(value):
            raise DatasetError(f"line {lineno}: activity must be finite")
        acts.append(value)
    if not seqs:
        raise DatasetError("dataset has no rows")
    return TrainingSet(seqs, acts)


def parse_sequences(text: str, table: DescriptorTable) -> list:
    """One sequence per line, or a CSV whose first column is ``sequence``."""
    lines = [ln.strip() for ln in text.splitlines()]
    out = []
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#"):
            continue
        raw = line.split(",", 1)[0].strip()
        if lineno == 1 and raw == "sequence":
            continue
        try:
            out.append(encode(raw, table, context=f"line {lineno}"))
        except EncodingError as exc:
            raise DatasetError(str(exc)) from None
    return out


def format_results(rows) -> str:
    """``rows``: iterable of (sequence string, score, bound, optimal)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for rank, (seq, score, bound, optimal) in enumerate(rows, start=1):
        writer.writerow([rank, seq, repr(float(score)), repr(float(bound)), str(bool(optimal)).lower()])
    return buf.getvalue()


def parse_results(text: str) -> list[str]:
    """Sequences of a ranked results file, in rank order."""
    header, reader = _rows(text, "results file")
    if header != RESULT_HEADER:
        raise DatasetError(f"line 1: expected header {','.join(RESULT_HEADER)}")
    ranked = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(RESULT_HEADER):
            raise DatasetError(f"line {reader.line_num}: expected {len(RESULT_HEADER)} columns")
        try:
            rank = int(row[0])
            float(row[2])
            float(row[3])
        except ValueError:
            raise DatasetError(f"line {reader.line_num}: malformed numeric field") from None
        if rank != len(ranked) + 1:
            raise DatasetError(f"line {reader.line_num}: ranks must be consecutive from 1")
        ranked.append(row[1])
    return ranked
