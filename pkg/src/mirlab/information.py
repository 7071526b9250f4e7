"""Shannon entropy and Kullback-Leibler / Jensen-Shannon divergences, in bits."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from mirlab.distributions import (
    DEFAULT_ALPHA,
    Alphabet,
    DegenerateInputError,
    check_probabilities,
    counts_from_sequence,
    smooth,
)
from mirlab.resample import DEFAULT_BOOT, DEFAULT_SEED, make_rng, percentile_interval


@dataclass(frozen=True)
class DivergenceMatrix:
    labels: tuple[str, ...]
    values: np.ndarray
    symmetrized: bool

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": self.values.tolist(),
            "symmetrized": self.symmetrized,
        }

    def submatrix(self, labels: Sequence[str]) -> np.ndarray:
        pos = {lab: i for i, lab in enumerate(self.labels)}
        missing = [lab for lab in labels if lab not in pos]
        if missing:
            raise ValueError(f"labels missing from divergence matrix: {missing}")
        idx = [pos[lab] for lab in labels]
        return self.values[np.ix_(idx, idx)]


def shannon_entropy(p: Sequence[float] | np.ndarray) -> float:
    """Entropy in bits, with 0 log 0 taken as 0."""
    p = check_probabilities(p)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def kl_divergence(p: Sequence[float] | np.ndarray, q: Sequence[float] | np.ndarray) -> float:
    """D_KL(P || Q) in bits.

    Raises if Q has a zero where P has mass; smooth Q first rather than
    accepting an infinite divergence.
    """
    p = check_probabilities(p)
    q = check_probabilities(q)
    if p.shape != q.shape:
        raise ValueError(f"distributions differ in alphabet size: {p.size} vs {q.size}")
    support = p > 0
    if np.any(q[support] == 0):
        raise ValueError(
            "q has zero probability where p is positive; smooth the counts "
            "(e.g. alpha=0.5) before computing KL divergence"
        )
    ps, qs = p[support], q[support]
    return float(max(np.sum(ps * np.log2(ps / qs)), 0.0))


def js_divergence(p: Sequence[float] | np.ndarray, q: Sequence[float] | np.ndarray) -> float:
    p = check_probabilities(p)
    q = check_probabilities(q)
    if p.shape != q.shape:
        raise ValueError(f"distributions differ in alphabet size: {p.size} vs {q.size}")
    m = 0.5 * (p + q)
    # M is positive wherever p or q is, so both terms are finite.
    return 0.5 * kl_divergence(p, m) + 0.5 * kl_divergence(q, m)


def kl_pairwise_matrix(
    dists: Mapping[str, Sequence[float] | np.ndarray],
    symmetrize: bool = True,
) -> DivergenceMatrix:
    """All-pairs KL divergence between labelled distributions.

    With ``symmetrize`` each entry is ``0.5*D(Pi||Pj) + 0.5*D(Pj||Pi)``.
    """
    if len(dists) < 2:
        raise DegenerateInputError("need at least 2 distributions for a pairwise matrix")
    labels = tuple(dists)
    arrs = [check_probabilities(dists[lab]) for lab in labels]
    sizes = {a.size for a in arrs}
    if len(sizes) != 1:
        raise ValueError(f"distributions have mismatched alphabet sizes: {sorted(sizes)}")
    n = len(labels)
    raw = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                raw[i, j] = kl_divergence(arrs[i], arrs[j])
    values = 0.5 * (raw + raw.T) if symmetrize else raw
    return DivergenceMatrix(labels, values, symmetrize)


def divergence_bootstrap_ci(
    seq_p: Sequence[str],
    seq_q: Sequence[str],
    alphabet: Alphabet,
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    alpha: float = DEFAULT_ALPHA,
    level: float = 0.95,
) -> tuple[float, float, float]:
    """Smoothed KL(P||Q) with a percentile bootstrap interval.

    Each replicate resamples the symbols of both sequences with replacement.
    Returns ``(point, lo, hi)``.
    """
    if len(seq_p) == 0 or len(seq_q) == 0:
        raise DegenerateInputError("bootstrap needs two non-empty sequences")
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    ip = alphabet.encode(seq_p)
    iq = alphabet.encode(seq_q)
    point = kl_divergence(
        smooth(counts_from_sequence(seq_p, alphabet), alpha),
        smooth(counts_from_sequence(seq_q, alphabet), alpha),
    )
    rng = make_rng(seed)
    n = alphabet.size
    reps = np.empty(n_boot)
    for b in range(n_boot):
        cp = np.bincount(ip[rng.integers(0, ip.size, ip.size)], minlength=n)
        cq = np.bincount(iq[rng.integers(0, iq.size, iq.size)], minlength=n)
        reps[b] = kl_divergence(smooth(cp, alpha), smooth(cq, alpha))
    lo, hi = percentile_interval(reps, level)
    return point, lo, hi


def divergence_corpus_bootstrap_ci(
    pieces_p: Sequence[Sequence[str]],
    pieces_q: Sequence[Sequence[str]],
    alphabet: Alphabet,
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    alpha: float = DEFAULT_ALPHA,
    level: float = 0.95,
) -> tuple[float, float, float]:
    """Smoothed KL between two corpora with a percentile interval that
    resamples whole pieces.

    Each corpus distribution comes from the pooled counts of its pieces; a
    replicate redraws the pieces of each corpus with replacement and pools
    again. Returns ``(point, lo, hi)``.
    """
    if len(pieces_p) < 2 or len(pieces_q) < 2:
        raise DegenerateInputError("piece-level bootstrap needs at least 2 pieces per corpus")
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    cp = np.array([counts_from_sequence(s, alphabet) for s in pieces_p])
    cq = np.array([counts_from_sequence(s, alphabet) for s in pieces_q])
    point = kl_divergence(smooth(cp.sum(axis=0), alpha), smooth(cq.sum(axis=0), alpha))
    rng = make_rng(seed)
    reps = np.empty(n_boot)
    for b in range(n_boot):
        rp = cp[rng.integers(0, len(cp), len(cp))].sum(axis=0)
        rq = cq[rng.integers(0, len(cq), len(cq))].sum(axis=0)
        reps[b] = kl_divergence(smooth(rp, alpha), smooth(rq, alpha))
    lo, hi = percentile_interval(reps, level)
    return point, lo, hi
