import json

import numpy as np
import pytest

from mirlab.distributions import DEFAULT_SYMBOLS


def markov_sequence(rng, n, sparsity, length):
    """Random walk over the first ``n`` default symbols; each row keeps a
    random subset of successors so labels differ in density."""
    syms = DEFAULT_SYMBOLS[:n]
    p = rng.random((n, n)) * (rng.random((n, n)) > sparsity)
    np.fill_diagonal(p, 0)
    for i in range(n):
        if p[i].sum() == 0:
            p[i, (i + 1) % n] = 1
    p /= p.sum(axis=1, keepdims=True)
    state = 0
    out = []
    for _ in range(length):
        out.append(syms[state])
        state = int(rng.choice(n, p=p[state]))
    return out


def network_groups(seed=0, n_labels=6):
    rng = np.random.default_rng(seed)
    groups = {}
    for k in range(n_labels):
        sparsity = 0.2 + 0.1 * k
        groups[f"L{k}"] = [markov_sequence(rng, 15, sparsity, 300) for _ in range(3)]
    return groups


def tempo_corpus(seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(128)
    curves = []
    for i in range(5):
        curves.append(("sine", f"s{i}", (120 + 8 * np.sin(2 * np.pi * t / (8 + 4 * i))).tolist()))
        # a weak sinusoid over broadband noise needs enough bins to stay below the peak floor
        long_t = np.arange(1024)
        noise = 120 + 4 * np.sin(2 * np.pi * long_t / 16) + rng.normal(0, 6, 1024)
        curves.append(("noisy", f"n{i}", noise.tolist()))
        curves.append(("steady", f"m{i}", (100 + rng.normal(0, 0.1, 128)).tolist()))
    return curves


@pytest.fixture
def network_manifest(tmp_path):
    entries = []
    for label, seqs in network_groups().items():
        for j, seq in enumerate(seqs):
            name = f"{label}_{j}.json"
            (tmp_path / name).write_text(json.dumps(seq))
            entries.append({"label": label, "path": name})
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"entries": entries}))
    return path


@pytest.fixture
def tempo_manifest(tmp_path):
    entries = []
    for label, cid, bpm in tempo_corpus():
        name = f"{cid}.json"
        (tmp_path / name).write_text(json.dumps({"bpm": bpm}))
        entries.append({"label": label, "path": name, "kind": "tempo_curve"})
    path = tmp_path / "tempo_manifest.json"
    path.write_text(json.dumps(entries))
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
