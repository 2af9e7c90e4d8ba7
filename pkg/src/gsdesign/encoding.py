"""Amino-acid alphabets, physicochemical descriptors and sequence encoding."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

Sequence = tuple  # tuple[int, ...] of alphabet indices


class FormatError(ValueError):
    """Raised when a descriptor file cannot be parsed."""


class EncodingError(ValueError):
    """Raised when a string contains a character outside the alphabet."""

    def __init__(self, char: str, position: int, context: str = ""):
        self.char = char
        self.position = position
        where = f" in {context}" if context else ""
        super().__init__(f"unknown character {char!r} at position {position}{where}")


@dataclass(frozen=True, eq=False)
class DescriptorTable:
    """Alphabet plus one real descriptor vector per symbol.

    ``sq_dist[a, b]`` is the squared Euclidean distance between the
    descriptors of symbols ``a`` and ``b``; ``max_sq_dist_to[b]`` is the
    largest squared distance any symbol can have to ``b``.
    """

    symbols: tuple[str, ...]
    vectors: np.ndarray
    sq_dist: np.ndarray = field(init=False, repr=False)
    max_sq_dist: float = field(init=False)
    max_sq_dist_to: np.ndarray = field(init=False, repr=False)
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[1] < 1:
            raise FormatError("descriptor vectors must form a 2-D array with d >= 1")
        if len(self.symbols) < 2:
            raise FormatError("alphabet needs at least two symbols")
        if len(self.symbols) != vectors.shape[0]:
            raise FormatError("one descriptor row is required per symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise FormatError("duplicate symbol in alphabet")
        if any(len(s) != 1 for s in self.symbols):
            raise FormatError("symbols must be single characters")
        if not np.all(np.isfinite(vectors)):
            raise FormatError("descriptor values must be finite")

        diff = vectors[:, None, :] - vectors[None, :, :]
        sq = np.einsum("abd,abd->ab", diff, diff)
        sq = 0.5 * (sq + sq.T)
        np.fill_diagonal(sq, 0.0)
        vectors.setflags(write=False)
        sq.setflags(write=False)
        to = sq.max(axis=0)
        to.setflags(write=False)

        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "sq_dist", sq)
        object.__setattr__(self, "max_sq_dist", float(sq.max()))
        object.__setattr__(self, "max_sq_dist_to", to)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.symbols)})

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def digest(self) -> str:
        """Content hash of symbols and descriptor values."""
        h = hashlib.sha256()
        h.update("".join(self.symbols).encode("utf-8"))
        h.update(np.ascontiguousarray(self.vectors, dtype="<f8").tobytes())
        return h.hexdigest()

    def to_text(self) -> str:
        lines = []
        for s, v in zip(self.symbols, self.vectors):
            lines.append(s + "\t" + "\t".join(repr(float(x)) for x in v))
        return "\n".join(lines) + "\n"


def load_descriptors(text: str, standardize: bool = False) -> DescriptorTable:
    """Parse a descriptor file.

    One row per symbol: the symbol, then ``d`` floats, separated by tabs or
    whitespace. Text after ``#`` is ignored. Row order defines symbol indices.
    With ``standardize`` each column is shifted to zero mean and scaled to
    unit variance (constant columns are only centered).
    """
    symbols: list[str] = []
    rows: list[list[float]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        sym, values = parts[0], parts[1:]
        if len(sym) != 1:
            raise FormatError(f"line {lineno}: symbol {sym!r} is not a single character")
        if sym in symbols:
            raise FormatError(f"line {lineno}: duplicate symbol {sym!r}")
        if not values:
            raise FormatError(f"line {lineno}: no descriptor values for {sym!r}")
        try:
            vec = [float(v) for v in values]
        except ValueError:
            raise FormatError(f"line {lineno}: non-numeric descriptor value") from None
        if rows and len(vec) != len(rows[0]):
            raise FormatError(
                f"line {lineno}: expected {len(rows[0])} values, got {len(vec)}"
            )
        symbols.append(sym)
        rows.append(vec)
    if not rows:
        raise FormatError("descriptor file is empty")
    if len(symbols) < 2:
        raise FormatError("alphabet needs at least two symbols")

    vectors = np.array(rows, dtype=np.float64)
    if standardize:
        vectors = vectors - vectors.mean(axis=0)
        std = vectors.std(axis=0)
        std[std == 0] = 1.0
        vectors = vectors / std
    return DescriptorTable(tuple(symbols), vectors)


_TOY = """\
# toy alphabet used by the test-suite
A   0.0  0.0
B   1.0  0.0
C   0.0  2.0
D   1.5  1.5
"""


def toy_table() -> DescriptorTable:
    """Four symbols A-D with 2-D descriptors; ``sq_dist[A, B] == 1``."""
    return load_descriptors(_TOY)


def encode(raw: str, table: DescriptorTable, context: str = "") -> Sequence:
    """Map a string to a tuple of alphabet indices.

    Positions in error messages are 1-based.
    """
    out = []
    for pos, ch in enumerate(raw, start=1):
        try:
            out.append(table.index[ch])
        except KeyError:
            raise EncodingError(ch, pos, context) from None
    return tuple(out)


def decode(seq, table: DescriptorTable) -> str:
    return "".join(table.symbols[i] for i in seq)
