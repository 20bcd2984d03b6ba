"""JSON frame files.

A frame file holds one pair of frames::

    {"format_version": 1, "d": 2, "n": 4, "t": 0.0,
     "weights": [0.25, ...],            # optional, uniform if absent
     "ordering": "wh-row-major",        # optional free-form note
     "exception": null,                 # or "design2" to allow n != d**2
     "vectors": {"x": [[[re, im], ...], ...], "y": [...]}}

Floats are written with ``repr`` precision, so a save/load round trip is
exact. A branch file wraps several frame documents under ``"points"``.
"""

import json
import math
from pathlib import Path

import numpy as np

from .frames import Frame, MufPair

FORMAT_VERSION = 1
UNIT_TOL = 1e-8
EXCEPTIONS = (None, "design2")


class FrameFileError(ValueError):
    """Malformed or inconsistent frame document."""


def _encode_vectors(V):
    return [[[float(z.real), float(z.imag)] for z in row] for row in V]


def pair_to_document(pair, ordering=None, exception=None, meta=None):
    doc = {
        "format_version": FORMAT_VERSION,
        "d": pair.d,
        "n": pair.n,
        "t": None if pair.t is None else float(pair.t),
        "weights": [float(w) for w in pair.weights],
        "ordering": ordering,
        "exception": exception,
        "vectors": {"x": _encode_vectors(pair.x.vectors), "y": _encode_vectors(pair.y.vectors)},
    }
    if meta:
        doc["meta"] = meta
    return doc


def _decode_vectors(raw, name, n, d):
    if not isinstance(raw, list) or len(raw) != n:
        got = len(raw) if isinstance(raw, list) else type(raw).__name__
        raise FrameFileError(f"{name}: expected n={n} vectors, got {got}")
    V = np.empty((n, d), dtype=complex)
    for i, vec in enumerate(raw):
        if not isinstance(vec, list) or len(vec) != d:
            raise FrameFileError(f"{name}[{i}]: expected {d} complex entries")
        for k, z in enumerate(vec):
            if not (isinstance(z, list) and len(z) == 2 and all(isinstance(c, (int, float)) for c in z)):
                raise FrameFileError(f"{name}[{i}][{k}]: complex entries are [re, im] pairs")
            V[i, k] = complex(z[0], z[1])
        norm = np.linalg.norm(V[i])
        if abs(norm - 1.0) > UNIT_TOL:
            raise FrameFileError(f"{name}[{i}]: vector has norm {norm!r}, expected 1")
    return V


def document_to_pair(doc):
    if not isinstance(doc, dict):
        raise FrameFileError("frame document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FrameFileError(f"unsupported format_version {version!r}")
    try:
        d, n = int(doc["d"]), int(doc["n"])
        vectors = doc["vectors"]
        raw_x, raw_y = vectors["x"], vectors["y"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FrameFileError(f"missing or invalid field: {exc}") from None
    exception = doc.get("exception")
    if exception not in EXCEPTIONS:
        raise FrameFileError(f"unknown exception flag {exception!r}")
    if d < 1:
        raise FrameFileError(f"d must be positive, got {d}")
    if n != d * d and exception is None:
        raise FrameFileError(f"dimension mismatch: expected n={d * d} (d**2) for d={d}, got n={n}")
    X = _decode_vectors(raw_x, "x", n, d)
    Y = _decode_vectors(raw_y, "y", n, d)
    weights = doc.get("weights")
    if weights is not None:
        if len(weights) != n:
            raise FrameFileError(f"weights: expected {n} entries, got {len(weights)}")
        w = np.array(weights, dtype=float)
        if np.any(w < 0) or not math.isclose(w.sum(), 1.0, abs_tol=1e-12):
            raise FrameFileError("weights must be nonnegative and sum to 1")
    t = doc.get("t")
    return MufPair(
        Frame(X, weights, check=False),
        Frame(Y, weights, check=False),
        None if t is None else float(t),
    )


def _read_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FrameFileError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameFileError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_frames(path):
    return document_to_pair(_read_json(path))


def load_document(path):
    return _read_json(path)


def save_frames(pair, path, **kwargs):
    write_json(pair_to_document(pair, **kwargs), path)


def write_json(doc, path):
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def save_branch(results, path, ordering=None):
    points = [pair_to_document(r.best_pair, ordering=ordering, meta={"loss": r.best_loss}) for r in results]
    doc = {"format_version": FORMAT_VERSION, "kind": "branch", "points": points}
    write_json(doc, path)


def load_branch(path):
    doc = _read_json(path)
    if not isinstance(doc, dict) or doc.get("kind") != "branch":
        raise FrameFileError(f"{path}: not a branch file")
    return [document_to_pair(p) for p in doc["points"]]
