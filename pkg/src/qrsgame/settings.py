"""Measurement-direction families: construction, validation and file I/O.

Direction file format: plain text, ``#`` comment lines, one ``x y z`` triple
per line. Line order defines the setting index ``j = 1..n``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DirectionError

__all__ = ["DirectionSet", "FAMILIES", "builtin_directions", "load_directions", "save_directions"]

_PHI = (1.0 + 5.0 ** 0.5) / 2.0
_LOAD_NORM_TOL = 1e-6


@dataclass(frozen=True)
class DirectionSet:
    """An ordered set of ``n`` unit measurement axes, no two parallel."""

    vectors: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        vecs = tuple(tuple(float(c) for c in v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        _validate(np.array(vecs, dtype=float).reshape(-1, 3))

    @classmethod
    def from_array(cls, arr) -> "DirectionSet":
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise DirectionError(f"expected an (n, 3) array, got shape {arr.shape}")
        return cls(tuple(map(tuple, arr)))

    @property
    def n(self) -> int:
        return len(self.vectors)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.vectors, dtype=float)
        a.flags.writeable = False
        return a

    def __len__(self) -> int:
        return self.n


def _validate(arr: np.ndarray, lines: list[int] | None = None) -> None:
    def where(i):
        return f"line {lines[i]}" if lines is not None else f"direction {i + 1}"

    if arr.shape[0] < 1:
        raise DirectionError("direction set must contain at least one direction")
    if not np.all(np.isfinite(arr)):
        raise DirectionError("direction set contains non-finite components")
    norms = np.linalg.norm(arr, axis=1)
    for i, nrm in enumerate(norms):
        if abs(nrm - 1.0) > 1e-9:
            raise DirectionError(f"{where(i)}: norm {nrm:.12g} is not 1")
    for i in range(len(arr)):
        for k in range(i):
            if np.max(np.abs(arr[i] - arr[k])) <= 1e-9:
                raise DirectionError(f"{where(i)} duplicates {where(k)}")
            if np.max(np.abs(arr[i] + arr[k])) <= 1e-9:
                raise DirectionError(f"{where(i)} is antipodal to {where(k)}")


def _normalized(rows) -> np.ndarray:
    a = np.array(rows, dtype=float)
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def _icosahedron_axes() -> np.ndarray:
    p = _PHI
    return _normalized([(0, 1, p), (0, 1, -p), (1, p, 0), (1, -p, 0), (p, 0, 1), (-p, 0, 1)])


def _dodecahedron_axes() -> np.ndarray:
    p, q = _PHI, 1.0 / _PHI
    return _normalized(
        [
            (1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1),
            (0, q, p), (0, q, -p), (q, p, 0), (q, -p, 0), (p, 0, q), (p, 0, -q),
        ]
    )


FAMILIES = {
    "orthogonal-2": (2, lambda: np.array([[1.0, 0, 0], [0, 0, 1.0]])),
    "orthogonal-3": (3, lambda: np.eye(3)),
    "cube-4": (4, lambda: _normalized([(1, 1, 1), (1, 1, -1), (1, -1, 1), (-1, 1, 1)])),
    "icosahedron-6": (6, _icosahedron_axes),
    "dodecahedron-10": (10, _dodecahedron_axes),
}


def builtin_directions(family: str, n: int | None = None) -> DirectionSet:
    """Return a named direction family; ``n`` is checked against its size if given."""
    supported = ", ".join(f"{name} (n={size})" for name, (size, _) in FAMILIES.items())
    if family not in FAMILIES:
        raise DirectionError(f"unknown family {family!r}; supported: {supported}")
    size, build = FAMILIES[family]
    if n is not None and n != size:
        raise DirectionError(f"family {family!r} has n={size}, not {n}; supported: {supported}")
    return DirectionSet.from_array(build())


def parse_directions(text: str) -> DirectionSet:
    rows, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DirectionError(f"line {lineno}: expected 3 numbers, got {len(parts)}")
        try:
            v = np.array([float(p) for p in parts])
        except ValueError:
            raise DirectionError(f"line {lineno}: cannot parse {line!r}") from None
        nrm = np.linalg.norm(v)
        if not np.isfinite(nrm) or abs(nrm - 1.0) > _LOAD_NORM_TOL:
            raise DirectionError(f"line {lineno}: norm {nrm:.9g} deviates from 1 by more than {_LOAD_NORM_TOL}")
        rows.append(v / nrm)
        lines.append(lineno)
    if not rows:
        raise DirectionError("no directions found")
    arr = np.array(rows)
    _validate(arr, lines)
    return DirectionSet.from_array(arr)


def load_directions(path) -> DirectionSet:
    return parse_directions(Path(path).read_text())


def save_directions(ds: DirectionSet, path) -> None:
    lines = ["# x y z"] + [" ".join(repr(float(c)) for c in v) for v in ds.vectors]
    Path(path).write_text("\n".join(lines) + "\n")
