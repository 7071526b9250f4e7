"""Alphabets, counting, smoothing and sequence preprocessing.

Counts are exact integers; reals only enter through :func:`smooth` and
:func:`normalize`. Probability vectors are plain read-only ``float64`` arrays
ordered by the alphabet.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

# Implementation choice: only I, i, II, III and bVI are attested for the
# fifteen-symbol scale-degree alphabet; the remaining ten are filled in with
# the diatonic degrees in both cases.
DEFAULT_SYMBOLS: tuple[str, ...] = (
    "I", "i", "II", "ii", "III", "iii", "IV", "iv",
    "V", "v", "VI", "vi", "VII", "vii", "bVI",
)

DEFAULT_ALPHA = 0.5
PROB_TOL = 1e-12


class DegenerateInputError(ValueError):
    """Input too short, too uniform or otherwise unusable for a metric."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbol labels."""

    symbols: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        symbols = tuple(str(s) for s in self.symbols)
        if len(symbols) < 2:
            raise ValueError(f"alphabet needs at least 2 symbols, got {len(symbols)}")
        if len(set(symbols)) != len(symbols):
            dupes = sorted({s for s in symbols if symbols.count(s) > 1})
            raise ValueError(f"alphabet symbols must be distinct; duplicated: {dupes}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    @classmethod
    def default(cls) -> Alphabet:
        return cls(DEFAULT_SYMBOLS)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol} not in alphabet") from None

    def encode(self, seq: Iterable[str]) -> np.ndarray:
        """Map symbols to their integer indices."""
        return np.array([self.index(s) for s in seq], dtype=np.int64)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def collapse_duplicates(seq: Sequence[str]) -> list[str]:
    """Replace each run of identical adjacent symbols by a single symbol."""
    if len(seq) == 0:
        raise DegenerateInputError("cannot collapse an empty sequence")
    out = [seq[0]]
    for item in seq[1:]:
        if item != out[-1]:
            out.append(item)
    return out


def counts_from_sequence(seq: Sequence[str], alphabet: Alphabet) -> np.ndarray:
    if len(seq) == 0:
        raise DegenerateInputError("cannot count an empty sequence")
    counts = np.bincount(alphabet.encode(seq), minlength=alphabet.size)
    return _frozen(counts.astype(np.int64))


def _check_counts(counts: Sequence[int] | np.ndarray, alphabet: Alphabet | None) -> np.ndarray:
    c = np.asarray(counts)
    if c.ndim != 1:
        raise ValueError("counts must be one-dimensional")
    if alphabet is not None and c.size != alphabet.size:
        raise ValueError(f"counts length {c.size} does not match alphabet size {alphabet.size}")
    if c.size < 2:
        raise ValueError("counts need at least 2 cells")
    if np.any(c < 0):
        raise ValueError("counts must be non-negative")
    return c


def smooth(
    counts: Sequence[int] | np.ndarray,
    alpha: float = DEFAULT_ALPHA,
    alphabet: Alphabet | None = None,
) -> np.ndarray:
    """Additive smoothing: ``(c_i + alpha) / (total + alpha * N)``."""
    if not alpha > 0:
        raise ValueError(f"smoothing alpha must be > 0, got {alpha}")
    c = _check_counts(counts, alphabet).astype(np.float64)
    probs = (c + alpha) / (c.sum() + alpha * c.size)
    return _frozen(probs)


def normalize(counts: Sequence[float] | np.ndarray) -> np.ndarray:
    """Plain normalisation without pseudo-counts."""
    c = _check_counts(counts, None).astype(np.float64)
    total = c.sum()
    if total <= 0:
        raise DegenerateInputError("cannot normalise an all-zero count vector")
    return _frozen(c / total)


def check_probabilities(p: Sequence[float] | np.ndarray) -> np.ndarray:
    """Validate a probability vector and return it as a float array."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("probability vector must be a non-empty 1-D array")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("probabilities must be finite and non-negative")
    if abs(arr.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"probabilities sum to {arr.sum()!r}, not 1")
    return arr


def sequence_distribution(
    seq: Sequence[str],
    alphabet: Alphabet,
    alpha: float = DEFAULT_ALPHA,
    collapse: bool = False,
) -> np.ndarray:
    """Smoothed marginal distribution of a symbol sequence."""
    if collapse:
        seq = collapse_duplicates(seq)
    return smooth(counts_from_sequence(seq, alphabet), alpha)


def bigram_counts(seq: Sequence[str], alphabet: Alphabet, collapse: bool = True) -> np.ndarray:
    """N x N matrix of adjacent-pair counts, rows are sources."""
    if collapse and len(seq) > 0:
        seq = collapse_duplicates(seq)
    if len(seq) < 2:
        raise DegenerateInputError("sequence too short for bigram counting (need >= 2 items)")
    idx = alphabet.encode(seq)
    n = alphabet.size
    flat = np.bincount(idx[:-1] * n + idx[1:], minlength=n * n)
    return _frozen(flat.reshape(n, n).astype(np.int64))
