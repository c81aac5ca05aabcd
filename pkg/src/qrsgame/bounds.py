"""Heralding-dependent steering bound and the preparation correction factor.

``D_n(k)`` is the best average alignment an unsteerable strategy gets when it
answers on ``k`` of the ``n`` settings with free signs:

    D_n(k) = max_{|F| = k, A_j = +-1} |sum_{j in F} A_j b_j| / k

The bound ``C_n(eta)`` mixes such deterministic strategies so that the mean
fraction of answered settings equals ``eta``; it is the upper concave hull of
the points ``(k, k D_n(k))`` evaluated at ``n eta`` and divided by ``n eta``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import ContractError, DegeneratePreparationError, PreparationError, SearchTooLargeError
from .settings import DirectionSet

__all__ = [
    "MAX_BOUND_N",
    "MAX_RFACTOR_N",
    "BoundResult",
    "PreparationReport",
    "d_table",
    "d_nk",
    "steering_bound",
    "r_factor",
    "r_factor_argmax",
    "parse_preparation",
    "load_preparation",
    "save_preparation",
]

MAX_BOUND_N = 16
MAX_RFACTOR_N = 24
_CHUNK = 1 << 18
_TIE = 1e-14


@dataclass(frozen=True)
class BoundResult:
    n: int
    eta_h: float
    value: float
    d_table: dict[int, float]
    optimal_weights: dict[int, float]

    @property
    def k_support(self) -> tuple[int, ...]:
        return tuple(sorted(self.optimal_weights))


@lru_cache(maxsize=256)
def _d_table_cached(ds: DirectionSet) -> tuple[float, ...]:
    n = ds.n
    if n > MAX_BOUND_N:
        raise SearchTooLargeError(f"exhaustive D_n enumeration is capped at n <= {MAX_BOUND_N}, got n = {n}")
    vecs = ds.array
    table = [0.0]
    for k in range(1, n + 1):
        subsets = np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)
        # first sign fixed to +1: a global flip leaves |sum| unchanged
        tail = np.array(list(itertools.product((1.0, -1.0), repeat=k - 1)), dtype=float).reshape(2 ** (k - 1), k - 1)
        signs = np.hstack([np.ones((len(tail), 1)), tail])
        step = max(1, _CHUNK // len(signs))
        best = 0.0
        for start in range(0, len(subsets), step):
            chosen = vecs[subsets[start : start + step]]
            sums = np.einsum("pk,skc->spc", signs, chosen)
            best = max(best, float(np.sqrt(np.max(np.einsum("spc,spc->sp", sums, sums)))))
        table.append(best / k)
    return tuple(table)


def d_table(ds: DirectionSet) -> dict[int, float]:
    """``{k: D_n(k)}`` for ``k = 0..n`` by exhaustive enumeration (cached per set)."""
    return dict(enumerate(_d_table_cached(ds)))


def d_nk(ds: DirectionSet, k: int) -> float:
    if not 0 <= k <= ds.n:
        raise ContractError(f"k = {k} outside 0..{ds.n}")
    return _d_table_cached(ds)[k]


def steering_bound(ds: DirectionSet, eta_h: float) -> BoundResult:
    """Evaluate ``C_n(eta_h)`` and an optimal mixture over answer-set sizes.

    A linear objective under two equality constraints peaks on at most two
    support points, so scanning pairs ``k1 <= n eta_h <= k2`` is exact.
    """
    eta_h = float(eta_h)
    if not (0.0 < eta_h <= 1.0 + 1e-12) or not np.isfinite(eta_h):
        raise ContractError(f"eta_h must lie in (0, 1], got {eta_h}")
    eta_h = min(eta_h, 1.0)
    n = ds.n
    table = _d_table_cached(ds)
    f = [k * table[k] for k in range(n + 1)]
    x = n * eta_h
    if abs(x - round(x)) <= 1e-9:
        x = float(round(x))

    best_val, best_w = -np.inf, {}
    for k1 in range(n + 1):
        if k1 > x:
            break
        for k2 in range(k1, n + 1):
            if k2 < x:
                continue
            if k1 == k2:
                if k1 != x:
                    continue
                val, w = f[k1] / x, {k1: 1.0}
            else:
                w2 = (x - k1) / (k2 - k1)
                val = ((1.0 - w2) * f[k1] + w2 * f[k2]) / x
                w = {k: wk for k, wk in ((k1, 1.0 - w2), (k2, w2)) if wk > 0.0}
            if val > best_val + _TIE:
                best_val, best_w = val, w
    return BoundResult(n, eta_h, float(best_val), dict(enumerate(table)), best_w)


@dataclass(frozen=True)
class PreparationReport:
    """Bloch vectors ``n_{j,s}`` of the states the referee actually sends.

    ``vectors`` maps ``(j, s)`` with 1-based ``j`` and ``s in {+1, -1}`` to a
    3-tuple.
    """

    vectors: dict = field(hash=False)

    def __post_init__(self):
        clean = {}
        for (j, s), v in self.vectors.items():
            if int(s) not in (1, -1):
                raise PreparationError(f"sign s must be +1 or -1, got {s}")
            arr = np.asarray(v, dtype=float).reshape(3)
            nrm = float(np.linalg.norm(arr))
            if nrm > 1.0 + 1e-9:
                raise PreparationError(f"(j={j}, s={int(s):+d}): norm {nrm:.9g} outside the Bloch ball")
            clean[(int(j), int(s))] = tuple(float(c) for c in arr)
        object.__setattr__(self, "vectors", clean)

    @classmethod
    def from_array(cls, arr) -> "PreparationReport":
        """Build from an ``(n, 2, 3)`` array; axis 1 is ``s = +1, -1``."""
        arr = np.asarray(arr, dtype=float)
        return cls({(j + 1, s): arr[j, i] for j in range(arr.shape[0]) for i, s in enumerate((1, -1))})

    @property
    def n(self) -> int:
        return max((j for j, _ in self.vectors), default=0)

    def missing(self, n: int) -> list[tuple[int, int]]:
        return [(j, s) for j in range(1, n + 1) for s in (1, -1) if (j, s) not in self.vectors]

    def as_array(self, n: int) -> np.ndarray:
        gaps = self.missing(n)
        if gaps:
            j, s = gaps[0]
            raise PreparationError(f"preparation report has no entry for (j={j}, s={s:+d})")
        return np.array([[self.vectors[(j, s)] for s in (1, -1)] for j in range(1, n + 1)])


def r_factor_argmax(prep: PreparationReport, ds: DirectionSet, bound: BoundResult) -> tuple[float, tuple[int, ...]]:
    """Return ``r`` and the first sign assignment ``(a_1..a_n)`` attaining it.

    Assignments are scanned in binary order with bit ``j-1`` set meaning
    ``a_j = -1``, so the all-plus assignment comes first.
    """
    n = ds.n
    if n > MAX_RFACTOR_N:
        raise SearchTooLargeError(f"r-factor enumeration is capped at n <= {MAX_RFACTOR_N}, got n = {n}")
    if bound.value <= 0:
        raise ContractError("steering bound must be positive")
    nv = prep.as_array(n)
    half_diff = 0.5 * (nv[:, 0] - nv[:, 1])
    bvec = 0.5 * (nv[:, 0] + nv[:, 1]).sum(axis=0)
    bb = float(bvec @ bvec)
    gap = n * n - bb
    if gap <= 0.0:
        raise DegeneratePreparationError(f"<B,B> = {bb:.12g} >= n^2 = {n * n}; r-factor undefined")

    bits = np.arange(n, dtype=np.int64)
    best, best_t = -np.inf, 0
    total = 1 << n
    for start in range(0, total, _CHUNK):
        t = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        signs = 1.0 - 2.0 * ((t[:, None] >> bits) & 1)
        avec = signs @ half_diff
        ab = avec @ bvec
        aa = np.einsum("ic,ic->i", avec, avec)
        vals = (-ab + np.sqrt(ab * ab + aa * gap)) / (bound.value * gap)
        i = int(np.argmax(vals))
        if vals[i] > best + _TIE:
            best, best_t = float(vals[i]), int(t[i])
    signs = tuple(-1 if (best_t >> j) & 1 else 1 for j in range(n))
    return best, signs


def r_factor(prep: PreparationReport, ds: DirectionSet, bound: BoundResult) -> float:
    return r_factor_argmax(prep, ds, bound)[0]


def parse_preparation(text: str, n: int | None = None) -> PreparationReport:
    """Parse ``j s x y z`` lines; with ``n`` given, all ``2n`` pairs must appear."""
    vectors = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise PreparationError(f"line {lineno}: expected 'j s x y z', got {len(parts)} fields")
        try:
            j, s = int(parts[0]), int(parts[1])
            v = [float(p) for p in parts[2:]]
        except ValueError:
            raise PreparationError(f"line {lineno}: cannot parse {line!r}") from None
        if s not in (1, -1):
            raise PreparationError(f"line {lineno}: s must be +1 or -1")
        if j < 1 or (n is not None and j > n):
            raise PreparationError(f"line {lineno}: setting index j = {j} out of range")
        if (j, s) in vectors:
            raise PreparationError(f"line {lineno}: duplicate entry for (j={j}, s={s:+d})")
        if np.linalg.norm(v) > 1.0 + 1e-9:
            raise PreparationError(f"line {lineno}: vector outside the Bloch ball")
        vectors[(j, s)] = v
    report = PreparationReport(vectors)
    if n is not None:
        gaps = report.missing(n)
        if gaps:
            desc = ", ".join(f"(j={j}, s={s:+d})" for j, s in gaps)
            raise PreparationError(f"preparation report is missing {desc}")
    return report


def load_preparation(path, n: int | None = None) -> PreparationReport:
    return parse_preparation(Path(path).read_text(), n)


def save_preparation(report: PreparationReport, path) -> None:
    lines = ["# j s x y z"]
    for (j, s), v in sorted(report.vectors.items(), key=lambda kv: (kv[0][0], -kv[0][1])):
        lines.append(f"{j} {s:+d} " + " ".join(repr(c) for c in v))
    Path(path).write_text("\n".join(lines) + "\n")
