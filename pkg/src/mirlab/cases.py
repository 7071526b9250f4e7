"""Corpus-level pipelines: harmonic network signatures and rubato spectra."""

from __future__ import annotations

import warnings
from collections.abc import Mapping, Sequence

import numpy as np

from mirlab.chordnet import (
    DEFAULT_DAMPING,
    DEFAULT_THRESHOLD,
    FEATURES,
    NetworkFeatureVector,
    chord_graph,
    feature_vector,
    gravity_one_hot,
    network_analysis,
    pairwise_network_distance,
)
from mirlab.distributions import (
    DEFAULT_ALPHA,
    Alphabet,
    DegenerateInputError,
    bigram_counts,
    collapse_duplicates,
    counts_from_sequence,
    smooth,
)
from mirlab.information import DivergenceMatrix, kl_pairwise_matrix
from mirlab.resample import (
    DEFAULT_BOOT,
    DEFAULT_SEED,
    bootstrap_mean_ci,
    condensed,
    jackknife_spearman,
    spearman,
)
from mirlab.rubato import (
    CATEGORIES,
    MIN_SAMPLES,
    ClassifierThresholds,
    CurveProfile,
    tabulate_profiles,
    group_profiles,
    paired_delta_ci,
    profile_corpus,
    threshold_sensitivity,
)


def _quiet_distance(vectors: Mapping[str, NetworkFeatureVector], features: Sequence[str]):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return pairwise_network_distance(vectors, features)


def _correlate(units: list[str], dist_a, dist_b) -> dict:
    """Spearman over condensed pairs plus the unit-level jackknife; failures
    are reported in place rather than raised."""
    out: dict = {}
    try:
        rho, p = spearman(condensed(dist_a(units)), condensed(dist_b(units)))
        out.update(rho=rho, p_value=p, n_pairs=len(units) * (len(units) - 1) // 2)
    except ValueError as exc:
        return {"error": str(exc)}
    try:
        out["jackknife"] = jackknife_spearman(units, dist_a, dist_b).to_dict()
    except ValueError as exc:
        out["jackknife"] = {"error": str(exc)}
    return out


def feature_sets() -> list[tuple[str, tuple[str, ...]]]:
    sets = [("full", FEATURES)]
    sets += [(f"only:{f}", (f,)) for f in FEATURES]
    sets += [(f"without:{f}", tuple(g for g in FEATURES if g != f)) for f in FEATURES]
    return sets


def run_network_case(
    groups: Mapping[str, Sequence[Sequence[str]]],
    alphabet: Alphabet,
    threshold: float = DEFAULT_THRESHOLD,
    damping: float = DEFAULT_DAMPING,
    alpha: float = DEFAULT_ALPHA,
    reference: DivergenceMatrix | None = None,
) -> dict:
    """Per-label chord graphs, network distances, and their rank agreement
    with a marginal divergence matrix.

    Without ``reference`` the symmetrised KL matrix of the smoothed marginal
    distributions of the same corpus is used.
    """
    if len(groups) < 3:
        raise DegenerateInputError(f"network case needs at least 3 labels, got {len(groups)}")
    labels = list(groups)
    analyses = {}
    vectors: dict[str, NetworkFeatureVector] = {}
    marginals = {}
    for label in labels:
        seqs = [s for s in groups[label] if len(s) > 0]
        usable = [s for s in seqs if len(collapse_duplicates(s)) >= 2]
        if not usable:
            raise DegenerateInputError(f"label {label!r} has no valid sequences")
        bigrams = sum(bigram_counts(s, alphabet, collapse=True) for s in usable)
        na = network_analysis(chord_graph(bigrams, alphabet, threshold), damping)
        analyses[label] = na
        vectors[label] = feature_vector(na)
        marginals[label] = smooth(sum(counts_from_sequence(s, alphabet) for s in seqs), alpha)

    if reference is None:
        reference = kl_pairwise_matrix(marginals, symmetrize=True)
        source = "corpus_marginals"
    else:
        reference.submatrix(labels)
        source = "file"

    def ref_fn(subset):
        return reference.submatrix(subset)

    def net_fn_for(features):
        return lambda subset: _quiet_distance({u: vectors[u] for u in subset}, features).values

    def onehot_fn(subset):
        return gravity_one_hot([analyses[u].gravity_centre for u in subset], alphabet)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        full = pairwise_network_distance(vectors)
    ablation = []
    for name, feats in feature_sets():
        entry = {"name": name, "features": list(feats), **_correlate(labels, net_fn_for(feats), ref_fn)}
        ablation.append(entry)
    ablation.append(
        {"name": "gravity_one_hot", "features": ["gravity_centre"], **_correlate(labels, onehot_fn, ref_fn)}
    )

    centres: dict[str, list[str]] = {}
    for label in labels:
        centres.setdefault(analyses[label].gravity_centre, []).append(label)
    return {
        "labels": labels,
        "alphabet": list(alphabet.symbols),
        "analyses": {lab: analyses[lab].to_dict() for lab in labels},
        "features": {lab: vectors[lab].to_dict() for lab in labels},
        "network_distance": full.to_dict(),
        "warnings": [str(w.message) for w in caught],
        "reference": {"source": source, **reference.to_dict()},
        "correlation": ablation[0],
        "ablation": ablation,
        "gravity": {
            "per_label": {
                lab: {"centre": analyses[lab].gravity_centre, "pagerank": analyses[lab].gravity_pagerank}
                for lab in labels
            },
            "by_centre": [
                {"centre": c, "labels": labs, "count": len(labs)}
                for c, labs in sorted(centres.items(), key=lambda kv: (-len(kv[1]), kv[0]))
            ],
        },
    }


def _label_summary(profiles: list[CurveProfile], n_boot: int, seed: int) -> dict:
    ratios = [p.periodicity_ratio for p in profiles if p.periodicity_ratio is not None]
    tops = [p.dominant_periods[0].period_beats for p in profiles if p.dominant_periods]
    out: dict = {
        "n": len(profiles),
        "mean_sigma_bpm": float(np.mean([p.sigma_bpm for p in profiles])),
        "median_dominant_period": float(np.median(tops)) if tops else None,
    }
    if len(ratios) >= 3:
        mean, lo, hi = bootstrap_mean_ci(ratios, n_boot, seed)
        out["periodicity_ratio"] = {"mean": mean, "lo": lo, "hi": hi, "n": len(ratios)}
    else:
        out["periodicity_ratio"] = {
            "mean": float(np.mean(ratios)) if ratios else None,
            "lo": None,
            "hi": None,
            "n": len(ratios),
        }
    return out


def _paired(
    profiles: list[CurveProfile],
    pairing: Sequence[tuple[str, str, str]],
    thresholds: ClassifierThresholds,
    n_boot: int,
    seed: int,
) -> dict:
    by_id = {p.curve_id: p for p in profiles}
    missing = sorted({cid for _, b, a in pairing for cid in (b, a) if cid not in by_id})
    if missing:
        raise ValueError(f"pairing references curves that are missing or excluded: {missing}")
    if len(pairing) < 3:
        raise DegenerateInputError(f"paired comparison needs at least 3 pairs, got {len(pairing)}")
    before = [by_id[b] for _, b, _ in pairing]
    after = [by_id[a] for _, _, a in pairing]
    quantities = {
        "periodicity_ratio": lambda p: p.periodicity_ratio,
        "tempo_mean": lambda p: p.mean_bpm,
        "tempo_std": lambda p: p.sigma_bpm,
    }
    deltas = {}
    for q, (name, get) in enumerate(quantities.items()):
        pairs = [(get(b), get(a)) for b, a in zip(before, after) if get(b) is not None and get(a) is not None]
        try:
            mean, lo, hi = paired_delta_ci(pairs, n_boot, seed + q)
            deltas[name] = {"mean_delta": mean, "lo": lo, "hi": hi, "n_pairs": len(pairs)}
        except ValueError as exc:
            deltas[name] = {"error": str(exc), "n_pairs": len(pairs)}
    transitions: dict[str, int] = {}
    units = []
    for (unit, bid, aid), b, a in zip(pairing, before, after):
        cb = b.analysis(thresholds).category
        ca = a.analysis(thresholds).category
        transitions[f"{cb}->{ca}"] = transitions.get(f"{cb}->{ca}", 0) + 1
        units.append({"unit": unit, "before": bid, "after": aid, "category_before": cb, "category_after": ca})
    return {
        "deltas": deltas,
        "units": units,
        "same_category": sum(u["category_before"] == u["category_after"] for u in units),
        "transitions": dict(sorted(transitions.items())),
    }


def run_rubato_case(
    curves: Sequence[tuple[str, str, Sequence[float]]],
    thresholds: ClassifierThresholds | None = None,
    min_samples: int = MIN_SAMPLES,
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    pairing: Sequence[tuple[str, str, str]] | None = None,
    sensitivity: bool = False,
) -> dict:
    """Per-curve rubato analyses, label x category table, per-label mean
    periodicity ratio with bootstrap interval, and optional paired-delta and
    threshold-sensitivity sections.

    ``curves`` holds ``(label, curve_id, bpm)``; ``pairing`` holds
    ``(unit, before_curve_id, after_curve_id)``. Label ``i`` (in first-seen
    order) bootstraps with seed ``seed + i``.
    """
    thresholds = thresholds or ClassifierThresholds()
    profiles, excluded = profile_corpus(curves, min_samples)
    baseline = tabulate_profiles(profiles, excluded, thresholds)
    grouped = group_profiles(profiles)
    summary = {
        label: _label_summary(profs, n_boot, seed + i) for i, (label, profs) in enumerate(grouped.items())
    }
    totals = dict.fromkeys(CATEGORIES, 0)
    for row in baseline.table.values():
        for c, k in row.items():
            totals[c] += k
    out = {
        **baseline.to_dict(),
        "totals": totals,
        "labels": summary,
        "spectral": [
            {
                "label": p.label,
                "curve": p.curve_id,
                "n": p.n,
                "mean_bpm": p.mean_bpm,
                "sigma_bpm": p.sigma_bpm,
                "periodicity_ratio": p.periodicity_ratio,
            }
            for p in profiles
        ],
    }
    if pairing is not None:
        out["paired"] = _paired(profiles, pairing, thresholds, n_boot, seed)
    if sensitivity:
        out["sensitivity"] = [run.to_dict() for run in threshold_sensitivity(curves, thresholds, min_samples)]
    return out
