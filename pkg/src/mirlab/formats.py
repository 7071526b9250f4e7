"""Readers for the on-disk formats used by the command line."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from mirlab.distributions import Alphabet
from mirlab.information import DivergenceMatrix

KINDS = ("sequence", "tempo_curve", "bigram_matrix")


class InputFormatError(ValueError):
    """A file could not be parsed; the message names the file and offset."""


def load_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot read file ({exc.strerror})") from None
    text = raw.decode("utf-8", errors="replace")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise InputFormatError(f"{path}: malformed JSON at byte offset {offset}: {exc.msg}") from None


def read_sequence(path: str | Path) -> list[str]:
    """JSON array of symbols, or one symbol per line of plain text."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"{path}: cannot read file ({exc.strerror})") from None
    if text.lstrip().startswith("["):
        data = load_json(path)
        if not isinstance(data, list):
            raise InputFormatError(f"{path}: expected a JSON array of symbols")
        return [str(s) for s in data]
    return [line.strip() for line in text.splitlines() if line.strip()]


def read_numbers(path: str | Path) -> list[float]:
    data = load_json(path)
    if isinstance(data, dict) and "values" in data:
        data = data["values"]
    if not isinstance(data, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
    ):
        raise InputFormatError(f"{path}: expected a JSON array of numbers")
    return [float(v) for v in data]


def read_alphabet(path: str | Path | None) -> Alphabet:
    if path is None:
        return Alphabet.default()
    data = load_json(path)
    if not isinstance(data, list) or not all(isinstance(s, str) for s in data):
        raise InputFormatError(f"{path}: alphabet must be a JSON array of strings")
    return Alphabet(tuple(data))


def read_tempo_curve(path: str | Path) -> list[float]:
    data = load_json(path)
    if isinstance(data, dict):
        data = data.get("bpm")
    if not isinstance(data, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
    ):
        raise InputFormatError(f'{path}: expected {{"bpm": [numbers]}}')
    return [float(v) for v in data]


def read_matrix(path: str | Path) -> np.ndarray:
    data = load_json(path)
    if isinstance(data, dict):
        data = data.get("values", data.get("counts"))
    try:
        m = np.asarray(data, dtype=np.float64)
    except (TypeError, ValueError):
        raise InputFormatError(f"{path}: expected a square numeric matrix") from None
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputFormatError(f"{path}: expected a square numeric matrix")
    return m


def read_divergence_matrix(path: str | Path) -> DivergenceMatrix:
    data = load_json(path)
    if not isinstance(data, dict) or "labels" not in data or "values" not in data:
        raise InputFormatError(f"{path}: expected {{labels: [...], values: [[...]]}}")
    values = read_matrix(path)
    labels = tuple(str(s) for s in data["labels"])
    if len(labels) != values.shape[0]:
        raise InputFormatError(f"{path}: {len(labels)} labels for a {values.shape[0]}x{values.shape[0]} matrix")
    return DivergenceMatrix(labels, values, bool(data.get("symmetrized", True)))


@dataclass(frozen=True)
class ManifestEntry:
    label: str
    path: Path
    kind: str
    key: str


def read_manifest(path: str | Path, default_kind: str) -> list[ManifestEntry]:
    """Entries of a corpus manifest, paths resolved against its directory.

    Accepted layouts: ``{"entries": [{"label", "path", "kind"?}, ...]}``, a
    bare list of such entries, or an object mapping file path to label.
    """
    path = Path(path)
    data = load_json(path)
    base = path.parent
    if isinstance(data, dict) and "entries" in data:
        data = data["entries"]
    if isinstance(data, dict):
        raw = [{"path": k, "label": v} for k, v in data.items()]
    elif isinstance(data, list):
        raw = data
    else:
        raise InputFormatError(f"{path}: manifest must be an object or a list of entries")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "path" not in item or "label" not in item:
            raise InputFormatError(f"{path}: entry {i} needs 'label' and 'path'")
        label = str(item["label"])
        if not label:
            raise InputFormatError(f"{path}: entry {i} has an empty label")
        kind = item.get("kind", default_kind)
        if kind not in KINDS:
            raise InputFormatError(f"{path}: entry {i} has unknown kind {kind!r}")
        target = base / str(item["path"])
        if not target.exists():
            raise InputFormatError(f"{path}: entry {i} points to missing file {target}")
        entries.append(ManifestEntry(label, target, kind, str(item["path"])))
    return entries
