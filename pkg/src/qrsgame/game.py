"""The quantum-refereed steering game: preparation, payoff, exact scores.

Conventions
-----------
* Settings ``j`` are 1-based at the public surface; arrays are 0-based with
  axis order ``(j, s)`` and ``s`` index 0 meaning ``s = +1``.
* Every score is conditioned on Alice giving a non-null answer.
* Honest Bob projects his half of the shared pair together with the referee
  qubit onto ``(|00> + |11>)/sqrt(2)``; outcome ``b = 1`` on success. On his
  shared qubit this acts as the effective element ``omega^T / 2``.
* An adversarial strategy is scored against the bound evaluated at the
  heralding efficiency that strategy itself induces.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bounds import BoundResult, PreparationReport, d_table, r_factor, steering_bound
from .errors import ContractError, InvalidStateError, SearchTooLargeError
from .settings import DirectionSet

__all__ = [
    "PreparationModel",
    "Exact",
    "Visibility",
    "FixedState",
    "Reported",
    "ScoreSpec",
    "ScoreBreakdown",
    "CheatStrategy",
    "SearchGrid",
    "CheatSearchResult",
    "MAX_SEARCH_N",
    "EXHAUSTIVE_BUDGET",
    "search_size",
    "payoff",
    "referee_state",
    "honest_bob_effective_povm",
    "honest_outcome_probs",
    "exact_honest_score",
    "cheat_outcome_probs",
    "induced_heralding",
    "cheat_score",
    "cheat_search",
    "icosphere",
    "phi_plus_state",
    "product_state",
]

SIGNS = (1, -1)
MAX_SEARCH_N = 10


# -- referee preparation ---------------------------------------------------


class PreparationModel:
    """How the referee's states ``omega_{j,s}`` deviate from the ideal ones."""

    def bloch(self, ds: DirectionSet) -> np.ndarray:
        """Bloch vectors of the prepared states, shape ``(n, 2, 3)``."""
        raise NotImplementedError

    def report(self, ds: DirectionSet) -> PreparationReport:
        return PreparationReport.from_array(self.bloch(ds))

    def describe(self) -> str:
        return type(self).__name__.lower()


def _sign_axis() -> np.ndarray:
    return np.array(SIGNS, dtype=float)[None, :, None]


@dataclass(frozen=True)
class Exact(PreparationModel):
    def bloch(self, ds):
        return _sign_axis() * ds.array[:, None, :]

    def describe(self):
        return "exact"


@dataclass(frozen=True)
class Visibility(PreparationModel):
    v: float

    def __post_init__(self):
        if not 0.0 <= self.v <= 1.0:
            raise InvalidStateError(f"visibility must lie in [0, 1], got {self.v}")

    def bloch(self, ds):
        return self.v * _sign_axis() * ds.array[:, None, :]

    def describe(self):
        return f"visibility({self.v:g})"


@dataclass(frozen=True)
class FixedState(PreparationModel):
    """Every setting carries the same pair of states ``(I +- v.sigma)/2``."""

    v: tuple[float, float, float]

    def __post_init__(self):
        vec = linalg.as_bloch(self.v)
        if np.linalg.norm(vec) > 1.0 + 1e-12:
            raise InvalidStateError("fixed-state vector outside the Bloch ball")
        object.__setattr__(self, "v", tuple(float(c) for c in vec))

    def bloch(self, ds):
        out = np.empty((ds.n, 2, 3))
        out[:, 0] = self.v
        out[:, 1] = -np.asarray(self.v)
        return out

    def describe(self):
        return "fixed-state({:g},{:g},{:g})".format(*self.v)


@dataclass(frozen=True)
class Reported(PreparationModel):
    prep: PreparationReport

    def bloch(self, ds):
        return self.prep.as_array(ds.n)

    def report(self, ds):
        return self.prep

    def describe(self):
        return "report"


def referee_state(j: int, s: int, ds: DirectionSet, model: PreparationModel = Exact()) -> np.ndarray:
    if not 1 <= j <= ds.n:
        raise ContractError(f"setting j = {j} outside 1..{ds.n}")
    if s not in SIGNS:
        raise ContractError(f"s must be +1 or -1, got {s}")
    return linalg.state_from_bloch(model.bloch(ds)[j - 1, 0 if s == 1 else 1])


# -- score specification ---------------------------------------------------


@dataclass(frozen=True)
class ScoreSpec:
    """Game configuration: settings, declared heralding, ``r`` and ``C_n``.

    Build with :meth:`create` or :meth:`with_preparation`; the bound is always
    derived from ``(ds, eta_h)``.
    """

    ds: DirectionSet
    eta_h: float
    r: float
    bound_result: BoundResult = field(repr=False, compare=False)
    r_from_preparation: bool = False

    @classmethod
    def create(cls, ds: DirectionSet, eta_h: float, r: float = 1.0) -> "ScoreSpec":
        """``eta_h = 0`` is accepted and takes the plateau limit ``C_n = 1``."""
        if r < 0:
            raise ContractError(f"r must be non-negative, got {r}")
        if eta_h == 0:
            table = d_table(ds)
            return cls(ds, 0.0, float(r), BoundResult(ds.n, 0.0, 1.0, table, {0: 1.0}))
        return cls(ds, float(eta_h), float(r), steering_bound(ds, eta_h))

    @classmethod
    def with_preparation(cls, ds: DirectionSet, eta_h: float, model: PreparationModel) -> "ScoreSpec":
        """Score settings whose ``r`` is computed from the model's preparation vectors."""
        bound = steering_bound(ds, eta_h)
        return cls(ds, float(eta_h), r_factor(model.report(ds), ds, bound), bound, True)

    @property
    def n(self) -> int:
        return self.ds.n

    @property
    def bound(self) -> float:
        return self.bound_result.value


def payoff(a: int, b: int, s: int, r: float, c: float) -> float:
    """Per-round payoff ``(a s - r c) b``."""
    return (a * s - r * c) * b


# -- honest players --------------------------------------------------------


def honest_bob_effective_povm(omega: np.ndarray) -> np.ndarray:
    """Element of Bob's shared qubit selected by a successful Bell projection."""
    omega = linalg.check_density(omega)
    if omega.shape != (2, 2):
        raise ContractError("referee state must be a single-qubit density matrix")
    return omega.T / 2.0


@dataclass(frozen=True)
class ScoreBreakdown:
    per_js: dict[tuple[int, int], tuple[float, float]]
    total: float
    alice_herald: float
    r: float
    bound: float

    def rows(self):
        for (j, s), (corr, herald) in sorted(self.per_js.items(), key=lambda kv: (kv[0][0], -kv[0][1])):
            yield j, s, corr, herald


def phi_plus_state() -> np.ndarray:
    return linalg.phi_plus()


def product_state(alice, bob) -> np.ndarray:
    """``rho_A (x) rho_B`` from two Bloch vectors."""
    return linalg.tensor(linalg.state_from_bloch(alice), linalg.state_from_bloch(bob))


def _alice_projector(b: np.ndarray, a: int) -> np.ndarray:
    return 0.5 * (linalg.I2 + a * linalg.pauli_dot(b))


def honest_outcome_probs(rho_ab: np.ndarray, ds: DirectionSet, model: PreparationModel, eta_m: float) -> np.ndarray:
    """Joint ``P(a, b | j, s)`` given Alice answered, shape ``(n, 2, 2, 2)``.

    Axes: ``j``, ``s`` (+1, -1), ``a`` (+1, -1), ``b`` (0, 1).
    """
    rho_ab = linalg.check_density(rho_ab)
    if rho_ab.shape != (4, 4):
        raise ContractError("shared state must be a two-qubit density matrix")
    if not 0.0 <= eta_m <= 1.0:
        raise ContractError(f"eta_m must lie in [0, 1], got {eta_m}")
    nvec = model.bloch(ds)
    out = np.zeros((ds.n, 2, 2, 2))
    for j in range(ds.n):
        projs = [_alice_projector(ds.array[j], a) for a in SIGNS]
        for si in range(2):
            elem = honest_bob_effective_povm(linalg.state_from_bloch(nvec[j, si]))
            for ai, pa in enumerate(projs):
                p_a = np.trace(linalg.tensor(pa, linalg.I2) @ rho_ab).real
                p_a1 = eta_m * np.trace(linalg.tensor(pa, elem) @ rho_ab).real
                out[j, si, ai, 1] = p_a1
                out[j, si, ai, 0] = p_a - p_a1
    return np.clip(out, 0.0, 1.0)


def exact_honest_score(
    rho_ab: np.ndarray,
    spec: ScoreSpec,
    model: PreparationModel = Exact(),
    eta_m: float = 1.0,
) -> ScoreBreakdown:
    """Expected score of honest players sharing ``rho_ab``.

    Alice measures ``b_j . sigma`` and loses the outcome with probability
    ``1 - eta_h``; since her loss is independent of everything else, the
    conditional terms do not depend on it. Bob's failed measurements (rate
    ``1 - eta_m``) are reported as ``b = 0``.
    """
    probs = honest_outcome_probs(rho_ab, spec.ds, model, eta_m)
    a_vals = np.array(SIGNS, dtype=float)
    corr = np.einsum("jsa,a->js", probs[..., 1], a_vals)
    herald = probs[..., 1].sum(axis=-1)
    s_vals = np.array(SIGNS, dtype=float)
    total = float(np.sum(s_vals * corr - spec.r * spec.bound * herald) / (2 * spec.n))
    per_js = {
        (j + 1, s): (float(corr[j, si]), float(herald[j, si]))
        for j in range(spec.n)
        for si, s in enumerate(SIGNS)
    }
    return ScoreBreakdown(per_js, total, spec.eta_h, spec.r, spec.bound)


# -- adversarial players ---------------------------------------------------


@dataclass(frozen=True)
class CheatStrategy:
    """Local-hidden-state adversary with one-way Bob-to-Alice messages.

    Bob measures ``{mu (I + m.sigma), I - mu (I + m.sigma)}`` on the referee's
    state, forwards the guess ``sbar`` and reports ``b = 1`` with probability
    ``report_weight[sbar]``. On a setting in ``favorable_set`` Alice answers
    ``report_rule[j][sbar]`` (``None`` is a null answer); elsewhere she is
    silent. ``report_rule`` is either one ``{sbar: a}`` map shared by all
    favorable settings or ``{j: {sbar: a}}`` keyed by 1-based ``j``.
    """

    mu: float
    m: tuple[float, float, float]
    favorable_set: tuple[int, ...]
    report_rule: dict = field(hash=False)
    report_weight: dict = field(default_factory=lambda: {1: 1.0, -1: 1.0}, hash=False)

    def __post_init__(self):
        m = linalg.as_bloch(self.m)
        object.__setattr__(self, "m", tuple(float(c) for c in m))
        norm = float(np.linalg.norm(m))
        if norm > 1.0 + 1e-12:
            raise ContractError(f"POVM direction norm {norm:.12g} exceeds 1")
        if self.mu < 0 or self.mu * (1.0 + norm) > 1.0 + 1e-12:
            raise ContractError(f"mu = {self.mu} violates 0 <= mu <= 1/(1+|m|)")
        fav = tuple(sorted(int(j) for j in self.favorable_set))
        if len(set(fav)) != len(fav):
            raise ContractError("favorable set has repeated settings")
        object.__setattr__(self, "favorable_set", fav)
        per_setting = all(isinstance(v, dict) for v in self.report_rule.values())
        rule = {}
        for j in fav:
            entry = self.report_rule[j] if per_setting else self.report_rule
            rule[j] = {sb: entry[sb] for sb in SIGNS}
            for sb, a in rule[j].items():
                if a not in (1, -1, None):
                    raise ContractError(f"report for sbar={sb:+d} must be +1, -1 or None")
        object.__setattr__(self, "report_rule", rule)
        weight = {sb: float(self.report_weight[sb]) for sb in SIGNS}
        if any(not 0.0 <= g <= 1.0 for g in weight.values()):
            raise ContractError("report weights must lie in [0, 1]")
        object.__setattr__(self, "report_weight", weight)

    @classmethod
    def uniform(cls, mu, m, favorable_set, rule=None, weight=(1.0, 1.0)) -> "CheatStrategy":
        """Same answer rule on every favorable setting; ``rule``/``weight`` are (for +, for -)."""
        rule = (1, -1) if rule is None else rule
        return cls(mu, m, tuple(favorable_set), {1: rule[0], -1: rule[1]}, {1: weight[0], -1: weight[1]})

    def describe(self) -> dict:
        return {
            "mu": self.mu,
            "m": list(self.m),
            "favorable_set": list(self.favorable_set),
            "report_rule": {str(j): {f"{sb:+d}": a for sb, a in r.items()} for j, r in self.report_rule.items()},
            "report_weight": {f"{sb:+d}": g for sb, g in self.report_weight.items()},
        }


def _check_strategy(strategy: CheatStrategy, n: int) -> None:
    if any(not 1 <= j <= n for j in strategy.favorable_set):
        raise ContractError(f"favorable set {strategy.favorable_set} not within 1..{n}")
    if not strategy.favorable_set:
        raise ContractError("empty favorable set: Alice never answers")


def _guess_probs(strategy: CheatStrategy, nvec: np.ndarray) -> np.ndarray:
    """``p(sbar | j, s)``, shape ``(n, 2 [s], 2 [sbar])``."""
    p_plus = strategy.mu * (1.0 + nvec @ np.asarray(strategy.m))
    p_plus = np.clip(p_plus, 0.0, 1.0)
    return np.stack([p_plus, 1.0 - p_plus], axis=-1)


def cheat_outcome_probs(strategy: CheatStrategy, ds: DirectionSet, model: PreparationModel) -> np.ndarray:
    """Unconditional ``P(a, b | j, s)``, shape ``(n, 2, 3, 2)``.

    Axis 2 is ``a`` in ``(+1, -1, null)``; axis 3 is ``b`` in ``(0, 1)``.
    """
    _check_strategy(strategy, ds.n)
    guess = _guess_probs(strategy, model.bloch(ds))
    out = np.zeros((ds.n, 2, 3, 2))
    out[:, :, 2, 0] = 1.0
    for j in strategy.favorable_set:
        out[j - 1] = 0.0
        for si in range(2):
            for gi, sb in enumerate(SIGNS):
                p = guess[j - 1, si, gi]
                g = strategy.report_weight[sb]
                a = strategy.report_rule[j][sb]
                ai = 2 if a is None else (0 if a == 1 else 1)
                out[j - 1, si, ai, 1] += p * g
                out[j - 1, si, ai, 0] += p * (1.0 - g)
    return out


def induced_heralding(strategy: CheatStrategy, ds: DirectionSet, model: PreparationModel = Exact()) -> float:
    """Fraction of rounds in which the adversary's Alice answers."""
    probs = cheat_outcome_probs(strategy, ds, model)
    return float(probs[:, :, :2, :].sum() / (2 * ds.n))


def cheat_score(
    strategy: CheatStrategy,
    spec: ScoreSpec,
    model: PreparationModel = Exact(),
    bound: float | None = None,
) -> float:
    """Conditional score of an adversary, closed form.

    ``bound`` overrides the steering bound; by default it is ``C_n`` at the
    strategy's induced heralding. A strategy whose Alice never answers has
    no scored rounds and returns 0.
    """
    probs = cheat_outcome_probs(strategy, spec.ds, model)
    eta = float(probs[:, :, :2, :].sum() / (2 * spec.n))
    if eta <= 0.0:
        return 0.0
    c = steering_bound(spec.ds, eta).value if bound is None else bound
    s = np.array(SIGNS, dtype=float)[None, :, None]
    a = np.array(SIGNS, dtype=float)[None, None, :]
    p1 = probs[:, :, :2, 1]
    return float(np.sum(p1 * (a * s - spec.r * c)) / (2 * spec.n * eta))


# -- exhaustive adversary search -------------------------------------------


def icosphere(subdivisions: int = 3) -> np.ndarray:
    """Unit vectors of a subdivided icosahedron (12, 42, 162, 642, ... points)."""
    p = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        (-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0),
        (0, -1, p), (0, 1, p), (0, -1, -p), (0, 1, -p),
        (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    pts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache: dict[tuple[int, int], int] = {}

        def mid(i, k):
            key = (min(i, k), max(i, k))
            if key not in cache:
                v = pts[i] + pts[k]
                pts.append(v / np.linalg.norm(v))
                cache[key] = len(pts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return np.array(pts)


@dataclass(frozen=True)
class SearchGrid:
    """Discretisation of Bob's POVM for :func:`cheat_search`.

    ``informed`` adds directions built from the settings and the prepared
    states (signed subset sums, differences of state pairs) to the sphere
    grid, so that known maximisers are represented exactly.
    """

    subdivisions: int = 3
    mu_points: int = 101
    m_norms: tuple[float, ...] = (0.0, 0.5, 1.0)
    informed: bool = True

    def directions(self, ds: DirectionSet, nvec: np.ndarray) -> np.ndarray:
        dirs = [icosphere(self.subdivisions)]
        if self.informed:
            extra = [nvec.reshape(-1, 3), (nvec[:, 0] - nvec[:, 1])]
            if ds.n <= 6:
                for coeffs in itertools.product((-1.0, 0.0, 1.0), repeat=ds.n):
                    if any(coeffs):
                        extra.append((np.asarray(coeffs) @ ds.array)[None, :])
                        extra.append((np.asarray(coeffs) @ (nvec[:, 0] - nvec[:, 1]))[None, :])
            extra = np.concatenate(extra)
            norms = np.linalg.norm(extra, axis=1)
            extra = extra[norms > 1e-12] / norms[norms > 1e-12, None]
            dirs.append(extra)
        allv = np.concatenate(dirs)
        _, idx = np.unique(np.round(allv, 12), axis=0, return_index=True)
        return allv[np.sort(idx)]

    def points(self, ds: DirectionSet, nvec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Flattened ``(mu, m)`` grid: arrays of shape ``(G,)`` and ``(G, 3)``."""
        dirs = self.directions(ds, nvec)
        mus, ms = [], []
        for norm in self.m_norms:
            top = 1.0 / (1.0 + norm)
            mu = np.linspace(0.0, top, self.mu_points)
            if norm == 0.0:
                mus.append(mu)
                ms.append(np.zeros((len(mu), 3)))
                continue
            vecs = norm * dirs
            mus.append(np.tile(mu, len(vecs)))
            ms.append(np.repeat(vecs, len(mu), axis=0))
        return np.concatenate(mus), np.concatenate(ms)


@dataclass(frozen=True)
class CheatSearchResult:
    supremum: float
    strategy: CheatStrategy
    passed: bool
    tolerance: float
    induced_eta: float
    evaluated: int


_RULES = ((1, 1), (1, -1), (-1, 1), (-1, -1))
_WEIGHTS = ((1.0, 1.0), (1.0, 0.0), (0.0, 1.0))
_SEARCH_CHUNK = 1 << 22


EXHAUSTIVE_BUDGET = 2 * 10**9


def search_size(n: int, grid_points: int) -> int:
    """Number of strategies a literal enumeration visits."""
    return sum(math.comb(n, k) * 4**k for k in range(1, n + 1)) * len(_WEIGHTS) * grid_points


def cheat_search(
    spec: ScoreSpec,
    model: PreparationModel = Exact(),
    grid: SearchGrid = SearchGrid(),
    tolerance: float = 1e-9,
    exhaustive: bool = False,
) -> CheatSearchResult:
    """Maximise the adversary's score over deterministic strategies.

    Enumerates every nonempty favorable set, every per-setting answer rule
    ``sbar -> a`` with ``a = +-1``, Bob's report weights at the endpoints
    ``{0, 1}`` (the silent ``(0, 0)`` pair scores exactly 0 and is skipped)
    and the ``(mu, m)`` grid. Each strategy is scored against ``C_n`` at its
    induced heralding ``F/n``. The certificate passes iff the supremum is at
    most ``tolerance``.

    The score is a sum of per-setting terms, so by default the best answer
    rule is picked setting by setting. ``exhaustive=True`` instead visits
    every rule combination literally; it is refused when the strategy count
    exceeds ``EXHAUSTIVE_BUDGET``.
    """
    n = spec.n
    if n > MAX_SEARCH_N:
        raise SearchTooLargeError(
            f"cheat search enumerates 2^n - 1 favorable sets and 4^F answer rules; capped at n <= {MAX_SEARCH_N}, got {n}"
        )
    nvec = model.bloch(spec.ds)
    mu, m = grid.points(spec.ds, nvec)
    if exhaustive and search_size(n, len(mu)) > EXHAUSTIVE_BUDGET:
        raise SearchTooLargeError(
            f"literal enumeration would visit {search_size(n, len(mu)):.3g} strategies "
            f"(budget {EXHAUSTIVE_BUDGET:.0e}); drop exhaustive mode or coarsen the grid"
        )
    # p(sbar=+ | j, s) for every grid point: (G, n, 2)
    p_plus = np.clip(mu[:, None, None] * (1.0 + np.einsum("gc,jsc->gjs", m, nvec)), 0.0, 1.0)
    p_minus = 1.0 - p_plus
    s = np.array(SIGNS, dtype=float)
    c_of_k = {k: steering_bound(spec.ds, k / n).value for k in range(1, n + 1)}
    subsets_by_k = {k: list(itertools.combinations(range(n), k)) for k in range(1, n + 1)}

    best = (-np.inf, None)
    evaluated = 0
    for wi, (g_plus, g_minus) in enumerate(_WEIGHTS):
        # correlation part of each per-setting term, per rule: (R, G, n)
        corr = np.stack(
            [0.5 * ((g_plus * ap * p_plus + g_minus * am * p_minus) * s).sum(axis=-1) for ap, am in _RULES]
        )
        herald = 0.5 * (g_plus * p_plus + g_minus * p_minus).sum(axis=-1)
        if exhaustive:
            for k in range(1, n + 1):
                term = corr - spec.r * c_of_k[k] * herald  # (R, G, n)
                for si, subset in enumerate(subsets_by_k[k]):
                    for combo in itertools.product(range(len(_RULES)), repeat=k):
                        totals = sum(term[ri, :, j] for ri, j in zip(combo, subset)) / k
                        evaluated += totals.size
                        g = int(np.argmax(totals))
                        if totals[g] > best[0]:
                            best = (float(totals[g]), (wi, k, g, subset))
            continue
        best_rule_corr = corr.max(axis=0)
        for k in range(1, n + 1):
            term = best_rule_corr - spec.r * c_of_k[k] * herald
            subsets = subsets_by_k[k]
            idx = np.array(subsets, dtype=np.intp)
            step = max(1, _SEARCH_CHUNK // len(term))
            for start in range(0, len(idx), step):
                totals = term[:, idx[start : start + step]].sum(axis=-1) / k  # (G, S)
                evaluated += totals.size * 4 ** k
                flat = int(np.argmax(totals))
                val = float(totals.flat[flat])
                if val > best[0]:
                    g, si = np.unravel_index(flat, totals.shape)
                    best = (val, (wi, k, int(g), subsets[start + int(si)]))
    val, (wi, k, g, subset) = best
    g_plus, g_minus = _WEIGHTS[wi]
    rules = {}
    for j in subset:
        corr_idx = _rule_argmax(p_plus[g, j], p_minus[g, j], g_plus, g_minus)
        rules[j + 1] = dict(zip(SIGNS, _RULES[corr_idx]))
    strategy = CheatStrategy(
        float(mu[g]), tuple(m[g]), tuple(j + 1 for j in subset), rules, {1: g_plus, -1: g_minus}
    )
    return CheatSearchResult(val, strategy, val <= tolerance, tolerance, k / n, evaluated)


def _rule_argmax(pp, pm, g_plus, g_minus) -> int:
    s = np.array(SIGNS, dtype=float)
    vals = [0.5 * ((g_plus * ap * pp + g_minus * am * pm) * s).sum() for ap, am in _RULES]
    return int(np.argmax(vals))
