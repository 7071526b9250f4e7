"""Chord-transition graphs and their network descriptors.

Graphs are held as dense weight matrices over the alphabet; every
descriptor here is written directly against those matrices.
"""

from __future__ import annotations

import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, fields

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from mirlab.distributions import Alphabet, DegenerateInputError

DEFAULT_THRESHOLD = 0.01
DEFAULT_DAMPING = 0.85
PAGERANK_TOL = 1e-10
SMALL_WORLD_CLUSTERING = 0.3
SMALL_WORLD_PATH = 3.0
# Relative spread below which a feature counts as constant across composers.
CONSTANT_FEATURE_TOL = 1e-12
FEATURES = ("density", "mean_clustering", "community_count", "avg_path", "gravity_pagerank")


@dataclass(frozen=True)
class ChordGraph:
    alphabet: Alphabet
    edges: tuple[tuple[int, int, float], ...]
    threshold: float = DEFAULT_THRESHOLD

    @property
    def n_nodes(self) -> int:
        return self.alphabet.size

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n_nodes, self.n_nodes))
        for s, t, p in self.edges:
            w[s, t] = p
        return w

    @classmethod
    def from_weights(cls, weights: np.ndarray, alphabet: Alphabet | None = None) -> ChordGraph:
        """Wrap an arbitrary non-negative weight matrix (no pruning applied)."""
        w = np.asarray(weights, dtype=np.float64)
        if alphabet is None:
            alphabet = Alphabet(tuple(f"n{i}" for i in range(w.shape[0])))
        if w.shape != (alphabet.size, alphabet.size):
            raise ValueError(f"weight matrix shape {w.shape} does not match alphabet size {alphabet.size}")
        if np.any(np.diag(w) != 0):
            raise ValueError("chord graphs have no self-loops")
        src, dst = np.nonzero(w > 0)
        edges = tuple((int(s), int(t), float(w[s, t])) for s, t in zip(src, dst))
        return cls(alphabet, edges, threshold=0.0)

    def to_dict(self) -> dict:
        sym = self.alphabet.symbols
        return {
            "alphabet": list(sym),
            "threshold": self.threshold,
            "edges": [{"source": sym[s], "target": sym[t], "weight": w} for s, t, w in self.edges],
        }


@dataclass(frozen=True)
class NetworkAnalysis:
    symbols: tuple[str, ...]
    pagerank: tuple[float, ...]
    in_degree: tuple[int, ...]
    out_degree: tuple[int, ...]
    in_strength: tuple[float, ...]
    local_clustering: tuple[float, ...]
    edge_count: int
    density: float
    mean_clustering: float
    community_count: int
    communities: tuple[tuple[str, ...], ...]
    modularity: float
    diameter: int | None
    avg_path: float | None
    small_world: bool
    gravity_centre: str
    gravity_pagerank: float

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = [list(c) if isinstance(c, tuple) else c for c in v]
            out[f.name] = v
        return out


@dataclass(frozen=True)
class NetworkFeatureVector:
    density: float
    mean_clustering: float
    community_count: float
    avg_path: float
    gravity_pagerank: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURES], dtype=np.float64)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURES}


@dataclass(frozen=True)
class NetworkDistance:
    labels: tuple[str, ...]
    values: np.ndarray
    features: tuple[str, ...]
    dropped: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "values": self.values.tolist(),
            "features": list(self.features),
            "dropped": list(self.dropped),
        }


def chord_graph(
    bigrams: Sequence[Sequence[int]] | np.ndarray,
    alphabet: Alphabet,
    threshold: float = DEFAULT_THRESHOLD,
) -> ChordGraph:
    """Row-normalise a bigram count matrix and prune weak transitions.

    An edge s -> t survives only when its transition probability is strictly
    greater than ``threshold``. Rows with no outgoing counts yield no edges.
    """
    c = np.asarray(bigrams, dtype=np.float64)
    n = alphabet.size
    if c.shape != (n, n):
        raise ValueError(f"bigram matrix shape {c.shape} does not match alphabet size {n}")
    if np.any(c < 0):
        raise ValueError("bigram counts must be non-negative")
    if np.any(np.diag(c) != 0):
        raise ValueError("bigram matrix must be hollow; collapse consecutive duplicates first")
    if not 0 <= threshold < 1:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")
    rows = c.sum(axis=1)
    if not np.any(rows > 0):
        raise DegenerateInputError("bigram matrix is all zero")
    probs = np.divide(c, rows[:, None], out=np.zeros_like(c), where=rows[:, None] > 0)
    keep = probs > threshold
    src, dst = np.nonzero(keep)
    edges = tuple((int(s), int(t), float(probs[s, t])) for s, t in zip(src, dst))
    return ChordGraph(alphabet, edges, threshold)


def transition_matrix(weights: np.ndarray) -> np.ndarray:
    """Row-stochastic matrix of a weighted digraph; dangling rows are uniform."""
    w = np.asarray(weights, dtype=np.float64)
    n = w.shape[0]
    out = w.sum(axis=1)
    p = np.full((n, n), 1.0 / n)
    live = out > 0
    p[live] = w[live] / out[live, None]
    return p


def pagerank(
    weights: np.ndarray,
    damping: float = DEFAULT_DAMPING,
    tol: float = PAGERANK_TOL,
    max_iter: int = 10_000,
) -> np.ndarray:
    """Weighted PageRank by power iteration, stopping on an L1 step below ``tol``."""
    if not 0 < damping < 1:
        raise ValueError(f"damping must lie in (0, 1), got {damping}")
    p = transition_matrix(weights)
    n = p.shape[0]
    pt = p.T
    teleport = (1.0 - damping) / n
    pr = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (pt @ pr) + teleport
        nxt /= nxt.sum()
        delta = np.abs(nxt - pr).sum()
        pr = nxt
        if delta < tol:
            return pr
    raise RuntimeError(f"pagerank did not converge in {max_iter} iterations")


def directed_clustering(adj: np.ndarray) -> np.ndarray:
    """Local clustering of an unweighted digraph, counting triangles of
    every orientation.

    ``c_v = [(A + A^T)^3]_vv / (2 * (d_tot (d_tot - 1) - 2 d_bidir))``
    with 0 where the denominator vanishes.
    """
    a = (np.asarray(adj) != 0).astype(np.float64)
    np.fill_diagonal(a, 0.0)
    s = a + a.T
    tri = np.einsum("ij,jk,ki->i", s, s, s)
    d_tot = a.sum(axis=0) + a.sum(axis=1)
    d_bi = np.einsum("ij,ji->i", a, a)
    denom = 2.0 * (d_tot * (d_tot - 1) - 2.0 * d_bi)
    return np.divide(tri, denom, out=np.zeros_like(tri), where=denom > 0)


def greedy_modularity(weights: np.ndarray) -> tuple[list[list[int]], float]:
    """Agglomerative (Clauset-Newman-Moore) modularity maximisation on a
    symmetric weight matrix.

    Pairs are merged while the best modularity gain is positive; equal gains
    go to the pair with the smallest (i, j) community indices. Returns the
    communities (sorted node lists, ordered by smallest member) and the
    final modularity.
    """
    w = np.asarray(weights, dtype=np.float64)
    if not np.allclose(w, w.T):
        raise ValueError("greedy_modularity expects a symmetric weight matrix")
    n = w.shape[0]
    total = w.sum()
    if total <= 0:
        raise DegenerateInputError("modularity is undefined for a graph without edges")
    e = w / total
    a = e.sum(axis=1)
    active = np.ones(n, dtype=bool)
    members: list[list[int]] = [[i] for i in range(n)]
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    while active.sum() > 1:
        gain = 2.0 * (e - np.outer(a, a))
        mask = upper & active[:, None] & active[None, :]
        gain = np.where(mask, gain, -np.inf)
        best = int(np.argmax(gain))
        i, j = divmod(best, n)
        if not gain[i, j] > 0:
            break
        e[i, :] += e[j, :]
        e[:, i] += e[:, j]
        e[j, :] = 0.0
        e[:, j] = 0.0
        a[i] += a[j]
        a[j] = 0.0
        active[j] = False
        members[i].extend(members[j])
        members[j] = []
    comms = sorted((sorted(m) for m in members if m), key=lambda m: m[0])
    q = float(np.sum(np.diag(e)[active] - a[active] ** 2))
    return comms, q


def modularity(weights: np.ndarray, communities: Sequence[Sequence[int]]) -> float:
    """Weighted modularity of a partition of an undirected graph."""
    w = np.asarray(weights, dtype=np.float64)
    total = w.sum()
    strength = w.sum(axis=1)
    q = 0.0
    for comm in communities:
        idx = np.asarray(comm, dtype=int)
        q += w[np.ix_(idx, idx)].sum() / total - (strength[idx].sum() / total) ** 2
    return float(q)


def largest_scc_hops(adj: np.ndarray) -> tuple[int | None, float | None]:
    """Unweighted diameter and mean shortest path on the largest strongly
    connected component; ``(None, None)`` when it has fewer than 2 nodes.

    Equal-sized components are resolved in favour of the one holding the
    lowest node index.
    """
    a = csr_matrix((np.asarray(adj) != 0).astype(np.float64))
    _, labels = csgraph.connected_components(a, directed=True, connection="strong")
    sizes = np.bincount(labels)
    biggest = sizes.max()
    if biggest < 2:
        return None, None
    comp = labels[np.argmax(sizes[labels] == biggest)]
    nodes = np.flatnonzero(labels == comp)
    sub = a[nodes][:, nodes]
    dist = csgraph.shortest_path(sub, directed=True, unweighted=True)
    off = ~np.eye(nodes.size, dtype=bool)
    return int(dist[off].max()), float(dist[off].mean())


def network_analysis(g: ChordGraph, damping: float = DEFAULT_DAMPING) -> NetworkAnalysis:
    """Node- and graph-level descriptors of a chord-transition graph."""
    if not g.edges:
        raise DegenerateInputError("network analysis needs at least one edge")
    n = g.n_nodes
    w = g.weight_matrix()
    adj = w > 0
    pr = pagerank(w, damping)
    clustering = directed_clustering(adj)
    mean_c = float(clustering.mean())
    edge_count = int(adj.sum())
    density = edge_count / (n * (n - 1))
    comms, q = greedy_modularity(w + w.T)
    diameter, avg_path = largest_scc_hops(adj)
    small_world = (
        mean_c > SMALL_WORLD_CLUSTERING
        and avg_path is not None
        and 0 < avg_path < SMALL_WORLD_PATH
    )
    # near-ties from floating round-off resolve to the earlier symbol
    top = int(np.flatnonzero(pr >= pr.max() - 1e-12)[0])
    sym = g.alphabet.symbols
    return NetworkAnalysis(
        symbols=sym,
        pagerank=tuple(pr.tolist()),
        in_degree=tuple(int(v) for v in adj.sum(axis=0)),
        out_degree=tuple(int(v) for v in adj.sum(axis=1)),
        in_strength=tuple(w.sum(axis=0).tolist()),
        local_clustering=tuple(clustering.tolist()),
        edge_count=edge_count,
        density=density,
        mean_clustering=mean_c,
        community_count=len(comms),
        communities=tuple(tuple(sym[i] for i in c) for c in comms),
        modularity=q,
        diameter=diameter,
        avg_path=avg_path,
        small_world=bool(small_world),
        gravity_centre=sym[top],
        gravity_pagerank=float(pr[top]),
    )


def feature_vector(na: NetworkAnalysis) -> NetworkFeatureVector:
    if na.avg_path is None:
        raise DegenerateInputError(
            "average path length is absent (largest strongly connected component has < 2 nodes)"
        )
    return NetworkFeatureVector(
        density=na.density,
        mean_clustering=na.mean_clustering,
        community_count=float(na.community_count),
        avg_path=na.avg_path,
        gravity_pagerank=na.gravity_pagerank,
    )


def pairwise_network_distance(
    vectors: Mapping[str, NetworkFeatureVector],
    features: Sequence[str] = FEATURES,
) -> NetworkDistance:
    """Euclidean distances between feature vectors after standardising each
    feature to zero mean and unit variance across the inputs.

    A feature that is constant across all inputs is dropped with a warning.
    """
    if len(vectors) < 3:
        raise DegenerateInputError(f"network distance needs at least 3 vectors, got {len(vectors)}")
    unknown = [f for f in features if f not in FEATURES]
    if unknown:
        raise ValueError(f"unknown network features: {unknown}")
    labels = tuple(vectors)
    x = np.array([[getattr(vectors[lab], f) for f in features] for lab in labels], dtype=np.float64)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    const = std <= CONSTANT_FEATURE_TOL * np.maximum(1.0, np.abs(mean))
    dropped = tuple(f for f, c in zip(features, const) if c)
    if dropped:
        warnings.warn(f"dropping constant network features: {', '.join(dropped)}", stacklevel=2)
    if const.all():
        raise DegenerateInputError("every selected network feature is constant across the inputs")
    z = (x[:, ~const] - mean[~const]) / std[~const]
    diff = z[:, None, :] - z[None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1))
    np.fill_diagonal(d, 0.0)
    used = tuple(f for f, c in zip(features, const) if not c)
    return NetworkDistance(labels, d, used, dropped)


def gravity_one_hot(centres: Sequence[str], alphabet: Alphabet) -> np.ndarray:
    """Euclidean distances between one-hot encodings of gravity centres."""
    if len(centres) < 2:
        raise DegenerateInputError("need at least 2 gravity centres")
    onehot = np.zeros((len(centres), alphabet.size))
    for row, c in enumerate(centres):
        onehot[row, alphabet.index(c)] = 1.0
    diff = onehot[:, None, :] - onehot[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))
