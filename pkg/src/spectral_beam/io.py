"""Text formats: reduced-model export and CSV output with a metadata header.

Model files are plain text::

    # spectral-beam model v1
    # alpha = 6.0
    # f_ref = 18.91...
    # bc = CC
    M 15 15
    <15 lines of 15 floats>
    K 15 15
    ...

Floats are written with ``repr`` (shortest round-trip form), so a reload is
bit-exact.
"""

from __future__ import annotations

import hashlib
import io as _io

import numpy as np

from .assembly import ReducedModel
from .errors import ConfigError

FORMAT_TAG = "# spectral-beam v1"
MODEL_TAG = "# spectral-beam model v1"
MATRICES = ("M", "K", "B", "C")


def fmt(x):
    """Shortest round-trip text of a scalar."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(getattr(x, "value", x))


def model_to_text(model):
    out = _io.StringIO()
    out.write(MODEL_TAG + "\n")
    out.write(f"# alpha = {fmt(model.alpha)}\n")
    out.write(f"# f_ref = {fmt(model.f_ref)}\n")
    for k in sorted(model.provenance):
        out.write(f"# {k} = {fmt(model.provenance[k])}\n")
    for name in MATRICES:
        A = getattr(model, name)
        out.write(f"{name} {A.shape[0]} {A.shape[1]}\n")
        for row in A:
            out.write(" ".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def save_model(model, path):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write(model_to_text(model))


def load_model(path):
    """Read a model written by :func:`save_model` (matrices and scalars only)."""
    with open(path, encoding="ascii") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != MODEL_TAG:
        raise ConfigError(f"{path}: not a spectral-beam model file")
    meta, mats, i = {}, {}, 1
    while i < len(lines):
        line = lines[i]
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            meta[key.strip()] = value.strip()
            i += 1
            continue
        name, r, c = line.split()
        r, c = int(r), int(c)
        rows = [[float(v) for v in lines[i + 1 + k].split()] for k in range(r)]
        A = np.array(rows, dtype=float).reshape(r, c)
        A.setflags(write=False)
        mats[name] = A
        i += 1 + r
    missing = [m for m in MATRICES if m not in mats]
    if missing:
        raise ConfigError(f"{path}: missing matrices {missing}")
    provenance = {k: v for k, v in meta.items() if k not in ("alpha", "f_ref")}
    return ReducedModel(
        M=mats["M"], K=mats["K"], B=mats["B"], C=mats["C"],
        alpha=float(meta["alpha"]), f_ref=float(meta["f_ref"]),
        provenance=provenance,
    )


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def csv_text(columns, rows, meta):
    """CSV with the ``# spectral-beam v1`` header and ``# key = value`` metadata."""
    out = _io.StringIO()
    out.write(FORMAT_TAG + "\n")
    for k, v in meta.items():
        out.write(f"# {k} = {fmt(v)}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) for v in row) + "\n")
    return out.getvalue()


def write_csv(path, columns, rows, meta):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(csv_text(columns, rows, meta))


def read_csv(path):
    """Metadata dict, column names and rows (as strings) of an output CSV."""
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines or lines[0] != FORMAT_TAG:
        raise ConfigError(f"{path}: missing '{FORMAT_TAG}' header")
    meta, i = {}, 1
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][1:].partition("=")
        meta[key.strip()] = value.strip()
        i += 1
    columns = lines[i].split(",")
    rows = [line.split(",") for line in lines[i + 1 :] if line]
    return meta, columns, rows
