"""``mirlab`` command line: one subcommand per metric plus the two corpus
pipelines. Every run prints a JSON run report (or plot-ready CSV)."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np

from mirlab import __version__
from mirlab.cases import run_network_case, run_rubato_case
from mirlab.chordnet import DEFAULT_DAMPING, DEFAULT_THRESHOLD, chord_graph, network_analysis
from mirlab.distributions import (
    DEFAULT_ALPHA,
    Alphabet,
    bigram_counts,
    collapse_duplicates,
    counts_from_sequence,
    normalize,
    smooth,
)
from mirlab.dynamics import DEFAULT_SEGMENTS, higuchi_fractal_dimension, stationarity_test
from mirlab.formats import (
    InputFormatError,
    load_json,
    read_alphabet,
    read_divergence_matrix,
    read_manifest,
    read_matrix,
    read_numbers,
    read_sequence,
    read_tempo_curve,
)
from mirlab.information import (
    divergence_bootstrap_ci,
    divergence_corpus_bootstrap_ci,
    js_divergence,
    kl_divergence,
    kl_pairwise_matrix,
    shannon_entropy,
)
from mirlab.intervals import interval_analysis, interval_param_bootstrap, intervals_from_sequence
from mirlab.rankshape import gini, gini_multi, zipf_fit
from mirlab.resample import DEFAULT_BOOT, DEFAULT_SEED
from mirlab.rubato import MIN_SAMPLES, ClassifierThresholds, rubato_spectral

# options that shape the output rather than the result
_PRESENTATION = {"out", "format", "seed", "command", "handler"}


def _is_numeric_array(data: object) -> bool:
    return isinstance(data, list) and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
    )


def _counts_or_sequence(path: str, alphabet: Alphabet, collapse: bool) -> np.ndarray:
    """A JSON numeric array is taken as counts; anything else as a symbol sequence."""
    text = Path(path).read_text(encoding="utf-8") if Path(path).exists() else ""
    if text.lstrip().startswith("["):
        data = load_json(path)
        if _is_numeric_array(data):
            return np.asarray(data, dtype=np.float64)
    seq = read_sequence(path)
    if collapse:
        seq = collapse_duplicates(seq)
    return counts_from_sequence(seq, alphabet)


def _distribution(path: str, args: argparse.Namespace) -> np.ndarray:
    counts = _counts_or_sequence(path, read_alphabet(args.alphabet), args.collapse)
    return smooth(counts, args.alpha) if args.alpha > 0 else normalize(counts)


def _thresholds(args: argparse.Namespace) -> ClassifierThresholds:
    return ClassifierThresholds(
        metronomic_sigma=args.metronomic_sigma,
        free_sigma=args.free_sigma,
        quasi_ratio=args.quasi_ratio,
        periodic_ratio=args.periodic_ratio,
    )


def cmd_entropy(args: argparse.Namespace) -> dict:
    p = _distribution(args.input, args)
    return {"entropy_bits": shannon_entropy(p), "max_bits": math.log2(p.size), "n_symbols": int(p.size)}


def cmd_kl(args: argparse.Namespace) -> dict:
    if len(args.inputs) < 2:
        raise ValueError("kl needs at least two input files")
    if args.matrix or len(args.inputs) > 2:
        dists = {}
        for path in args.inputs:
            label = Path(path).stem
            if label in dists:
                raise ValueError(f"duplicate label {label!r}; input file stems must be distinct")
            dists[label] = _distribution(path, args)
        return kl_pairwise_matrix(dists, symmetrize=args.symmetrize).to_dict()
    p_path, q_path = args.inputs
    if args.bootstrap and args.resample == "pieces":
        alphabet = read_alphabet(args.alphabet)
        corpora = []
        for path in (p_path, q_path):
            pieces = [read_sequence(e.path) for e in read_manifest(path, "sequence")]
            corpora.append([collapse_duplicates(s) for s in pieces] if args.collapse else pieces)
        point, lo, hi = divergence_corpus_bootstrap_ci(
            corpora[0], corpora[1], alphabet, args.bootstrap, args.seed, alpha=args.alpha
        )
        return {"kl_bits": point, "ci_lo": lo, "ci_hi": hi, "n_boot": args.bootstrap, "resample": "pieces"}
    if args.bootstrap:
        alphabet = read_alphabet(args.alphabet)
        seq_p, seq_q = read_sequence(p_path), read_sequence(q_path)
        if args.collapse:
            seq_p, seq_q = collapse_duplicates(seq_p), collapse_duplicates(seq_q)
        point, lo, hi = divergence_bootstrap_ci(
            seq_p, seq_q, alphabet, args.bootstrap, args.seed, alpha=args.alpha
        )
        return {"kl_bits": point, "ci_lo": lo, "ci_hi": hi, "n_boot": args.bootstrap, "resample": "symbols"}
    p, q = _distribution(p_path, args), _distribution(q_path, args)
    if args.symmetrize:
        return {"kl_bits": 0.5 * kl_divergence(p, q) + 0.5 * kl_divergence(q, p), "symmetrized": True}
    return {"kl_bits": kl_divergence(p, q), "symmetrized": False}


def cmd_js(args: argparse.Namespace) -> dict:
    p, q = _distribution(args.inputs[0], args), _distribution(args.inputs[1], args)
    return {"js_bits": js_divergence(p, q)}


def cmd_zipf(args: argparse.Namespace) -> dict:
    alphabet = read_alphabet(args.alphabet)
    if args.joint:
        freqs = bigram_counts(read_sequence(args.input), alphabet, collapse=True).ravel()
    else:
        freqs = _counts_or_sequence(args.input, alphabet, args.collapse)
    return zipf_fit(freqs).to_dict()


def cmd_gini(args: argparse.Namespace) -> dict:
    data = load_json(args.input) if Path(args.input).read_text(encoding="utf-8").lstrip()[:1] in "[{" else None
    if isinstance(data, list) and data and all(isinstance(r, list) for r in data):
        data = {"rows": data}
    if isinstance(data, dict) and "rows" in data:
        rows = data["rows"]
        labels = data.get("labels") or [f"dim{j}" for j in range(len(rows[0]) if rows else 0)]
        return gini_multi(rows, labels).to_dict()
    counts = _counts_or_sequence(args.input, read_alphabet(args.alphabet), args.collapse)
    return {"gini": gini(counts), "n": int(counts.size)}


def cmd_network(args: argparse.Namespace) -> dict:
    alphabet = read_alphabet(args.alphabet)
    first = Path(args.inputs[0]).read_text(encoding="utf-8").lstrip()
    data = load_json(args.inputs[0]) if first.startswith(("[", "{")) else None
    if len(args.inputs) == 1 and data is not None and not _is_numeric_array(data) and not (
        isinstance(data, list) and all(isinstance(s, str) for s in data)
    ):
        bigrams = read_matrix(args.inputs[0])
    else:
        bigrams = sum(bigram_counts(read_sequence(p), alphabet, collapse=True) for p in args.inputs)
    g = chord_graph(bigrams, alphabet, args.threshold)
    return {"analysis": network_analysis(g, args.damping).to_dict(), "graph": g.to_dict()}


def cmd_stationarity(args: argparse.Namespace) -> dict:
    seq = read_sequence(args.input)
    return stationarity_test(seq, read_alphabet(args.alphabet), args.segments, args.collapse).to_dict()


def cmd_higuchi(args: argparse.Namespace) -> dict:
    return higuchi_fractal_dimension(read_numbers(args.input), args.k_max).to_dict()


def cmd_rubato(args: argparse.Namespace) -> dict:
    bpm = read_tempo_curve(args.input)
    return rubato_spectral(bpm, _thresholds(args), args.min_samples).to_dict()


def cmd_intervals(args: argparse.Namespace) -> dict:
    data = load_json(args.input) if Path(args.input).read_text(encoding="utf-8").lstrip()[:1] == "[" else None
    if args.from_sequence:
        if _is_numeric_array(data):
            codes = [int(v) for v in data]
        else:
            codes = read_alphabet(args.alphabet).encode(read_sequence(args.input)).tolist()
        values = intervals_from_sequence(codes)
    else:
        values = read_numbers(args.input)
    out = interval_analysis(values).to_dict()
    if args.bootstrap:
        cis = interval_param_bootstrap(values, args.bootstrap, args.seed)
        out["bootstrap"] = {
            name: {"estimate": est, "lo": lo, "hi": hi} for name, (est, lo, hi) in cis.items()
        }
        out["n_boot"] = args.bootstrap
    return out


def cmd_case_network(args: argparse.Namespace) -> dict:
    alphabet = read_alphabet(args.alphabet)
    groups: dict[str, list[list[str]]] = {}
    for entry in read_manifest(args.manifest, "sequence"):
        if entry.kind != "sequence":
            raise InputFormatError(f"{args.manifest}: case-network expects sequence entries, got {entry.kind}")
        groups.setdefault(entry.label, []).append(read_sequence(entry.path))
    reference = read_divergence_matrix(args.reference) if args.reference else None
    return run_network_case(groups, alphabet, args.threshold, args.damping, args.alpha, reference)


def _read_pairing(path: str) -> list[tuple[str, str, str]]:
    data = load_json(path)
    if not isinstance(data, list):
        raise InputFormatError(f"{path}: pairing must be a JSON array of {{unit, before, after}}")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or not {"before", "after"} <= item.keys():
            raise InputFormatError(f"{path}: pairing entry {i} needs 'before' and 'after'")
        out.append((str(item.get("unit", i)), str(item["before"]), str(item["after"])))
    return out


def cmd_case_rubato(args: argparse.Namespace) -> dict:
    curves = []
    for entry in read_manifest(args.manifest, "tempo_curve"):
        if entry.kind != "tempo_curve":
            raise InputFormatError(f"{args.manifest}: case-rubato expects tempo_curve entries, got {entry.kind}")
        curves.append((entry.label, entry.key, read_tempo_curve(entry.path)))
    pairing = _read_pairing(args.paired) if args.paired else None
    return run_rubato_case(
        curves,
        _thresholds(args),
        args.min_samples,
        args.bootstrap,
        args.seed,
        pairing=pairing,
        sensitivity=args.sensitivity,
    )


# ---------------------------------------------------------------------------
# output


def _clean(obj):
    """JSON-safe copy: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _quantiles(values: Sequence[float]) -> list:
    if not values:
        return [None] * 5
    return [float(q) for q in np.percentile(values, [0, 25, 50, 75, 100])]


def to_csv(command: str, results: dict) -> str:
    """Plot-ready tables: heatmap cells for matrices, scatter pairs for the
    network case, box-plot quantiles per label for the rubato case, and
    key/value rows otherwise."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "case-network":
        labels = results["labels"]
        net = results["network_distance"]["values"]
        ref = results["reference"]
        pos = {lab: i for i, lab in enumerate(ref["labels"])}
        w.writerow(["label_a", "label_b", "network_distance", "reference_distance"])
        for i in range(len(labels)):
            for j in range(i + 1, len(labels)):
                w.writerow([labels[i], labels[j], net[i][j], ref["values"][pos[labels[i]]][pos[labels[j]]]])
    elif command == "case-rubato":
        w.writerow(["label", "quantity", "n", "min", "q1", "median", "q3", "max"])
        by_label: dict[str, dict[str, list[float]]] = {}
        for c in results["curves"]:
            slot = by_label.setdefault(c["label"], {"periodicity_ratio": [], "dominant_period": [], "sigma_bpm": []})
            slot["sigma_bpm"].append(c["sigma_bpm"])
            if c["periodicity_ratio"] is not None:
                slot["periodicity_ratio"].append(c["periodicity_ratio"])
            if c["dominant_periods"]:
                slot["dominant_period"].append(c["dominant_periods"][0]["period_beats"])
        for label, quantities in by_label.items():
            for name, vals in quantities.items():
                w.writerow([label, name, len(vals), *_quantiles(vals)])
    elif "labels" in results and "values" in results:
        w.writerow(["row", "col", "value"])
        for i, a in enumerate(results["labels"]):
            for j, b in enumerate(results["labels"]):
                w.writerow([a, b, results["values"][i][j]])
    else:
        w.writerow(["key", "value"])
        for k, v in _flatten(results):
            w.writerow([k, v])
    return buf.getvalue()


def run_report(command: str, args: argparse.Namespace, results: dict) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _PRESENTATION}
    return _clean(
        {
            "tool_version": __version__,
            "command": command,
            "seed": args.seed,
            "parameters": params,
            "results": results,
        }
    )


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# parser


def _common(alphabet: bool = True, alpha: bool = True, collapse: bool = False) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write the report to FILE instead of stdout")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    if alpha:
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                       help="smoothing pseudo-count; 0 disables smoothing (default 0.5)")
    if alphabet:
        p.add_argument("--alphabet", help="JSON array of symbols (default: bundled 15-symbol alphabet)")
    if collapse:
        p.add_argument("--collapse", action="store_true", help="collapse consecutive duplicate symbols")
    return p


def _classifier_args(p: argparse.ArgumentParser) -> None:
    d = ClassifierThresholds()
    p.add_argument("--min-samples", type=int, default=MIN_SAMPLES)
    p.add_argument("--metronomic-sigma", type=float, default=d.metronomic_sigma)
    p.add_argument("--free-sigma", type=float, default=d.free_sigma)
    p.add_argument("--quasi-ratio", type=float, default=d.quasi_ratio)
    p.add_argument("--periodic-ratio", type=float, default=d.periodic_ratio)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mirlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, help: str, **common) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help, parents=[_common(**common)])
        p.set_defaults(handler=handler)
        return p

    p = add("entropy", cmd_entropy, "Shannon entropy of a count or sequence file", collapse=True)
    p.add_argument("input")

    p = add("kl", cmd_kl, "KL divergence between two inputs, or a pairwise matrix", collapse=True)
    p.add_argument("inputs", nargs="+")
    p.add_argument("--symmetrize", action="store_true")
    p.add_argument("--matrix", action="store_true", help="emit the pairwise matrix even for two inputs")
    p.add_argument("--bootstrap", type=int, default=0, metavar="B",
                   help="percentile CI from B resamples (sequence inputs, or manifests with --resample pieces)")
    p.add_argument("--resample", choices=("symbols", "pieces"), default="symbols",
                   help="bootstrap unit: symbols within each sequence, or whole pieces of two corpus manifests")

    p = add("js", cmd_js, "Jensen-Shannon divergence between two inputs", collapse=True)
    p.add_argument("inputs", nargs=2)

    p = add("zipf", cmd_zipf, "rank-frequency power-law fit", alpha=False, collapse=True)
    p.add_argument("input")
    p.add_argument("--joint", action="store_true", help="fit the bigram (transition) frequencies")

    p = add("gini", cmd_gini, "Gini coefficient of values or per matrix column", alpha=False, collapse=True)
    p.add_argument("input")

    p = add("network", cmd_network, "chord-transition graph descriptors", alpha=False)
    p.add_argument("inputs", nargs="+", help="a bigram count matrix, or one or more sequence files")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--damping", type=float, default=DEFAULT_DAMPING)

    p = add("stationarity", cmd_stationarity, "chi-squared stationarity across segments",
            alpha=False, collapse=True)
    p.add_argument("input")
    p.add_argument("--segments", type=int, default=DEFAULT_SEGMENTS)

    p = add("higuchi", cmd_higuchi, "Higuchi fractal dimension of a numeric series", alphabet=False, alpha=False)
    p.add_argument("input")
    p.add_argument("--k-max", type=int, default=None)

    p = add("rubato", cmd_rubato, "spectral rubato classification of a tempo curve", alphabet=False, alpha=False)
    p.add_argument("input")
    _classifier_args(p)

    p = add("intervals", cmd_intervals, "exponential / Laplace interval fit", alpha=False)
    p.add_argument("input")
    p.add_argument("--from-sequence", action="store_true",
                   help="input is a sequence (numeric codes or symbols); fit its successive differences")
    p.add_argument("--bootstrap", type=int, default=0, metavar="B")

    p = add("case-network", cmd_case_network, "harmonic network signatures over a corpus")
    p.add_argument("--manifest", required=True)
    p.add_argument("--reference", help="divergence matrix JSON {labels, values}")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--damping", type=float, default=DEFAULT_DAMPING)

    p = add("case-rubato", cmd_case_rubato, "rubato spectra over a corpus of tempo curves",
            alphabet=False, alpha=False)
    p.add_argument("--manifest", required=True)
    p.add_argument("--paired", help="JSON array of {unit, before, after} manifest paths")
    p.add_argument("--sensitivity", action="store_true", help="add the 17-run threshold sweep")
    p.add_argument("--bootstrap", type=int, default=DEFAULT_BOOT, metavar="B")
    _classifier_args(p)

    p = sub.add_parser("rerun", help="re-execute the run recorded in a JSON report")
    p.add_argument("report")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=None)
    return parser


def _replay_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> argparse.Namespace:
    report = load_json(args.report)
    try:
        command = report["command"]
        params = dict(report["parameters"])
        seed = report["seed"]
    except (KeyError, TypeError):
        raise InputFormatError(f"{args.report}: not a mirlab run report") from None
    # start from the subcommand defaults so older reports still replay
    base = parser.parse_args([command, *_placeholder_positionals(command)])
    ns = vars(base)
    ns.update(params)
    ns.update(seed=seed, out=args.out, format=args.format)
    return argparse.Namespace(**ns)


def _placeholder_positionals(command: str) -> list[str]:
    if command in ("case-network", "case-rubato"):
        return ["--manifest", "-"]
    if command == "js":
        return ["-", "-"]
    return ["-"]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            args = _replay_args(parser, args)
        results = args.handler(args)
        report = run_report(args.command, args, results)
        text = to_csv(args.command, report["results"]) if args.format == "csv" else dumps(report)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (ValueError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"mirlab: error: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
