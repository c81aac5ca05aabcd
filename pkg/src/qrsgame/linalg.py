"""Dense complex linear algebra on one, two and three qubits.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)`` with
``d in {2, 4, 8}``; Bloch vectors are real arrays of shape ``(3,)``.
Three-qubit operators use the qubit order (Alice, Bob, Referee).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractError, InvalidStateError, UnsupportedDimensionError

__all__ = [
    "NumericPolicy",
    "policy",
    "set_policy",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "PAULIS",
    "I2",
    "as_bloch",
    "pauli_dot",
    "state_from_bloch",
    "check_hermitian",
    "check_density",
    "lambda_max",
    "tensor",
    "partial_trace",
    "phi_plus",
]


@dataclass(frozen=True)
class NumericPolicy:
    eig_residual: float = 1e-10
    psd_slack: float = 1e-10
    trace_tol: float = 1e-10
    algebra_tol: float = 1e-12
    ball_slack: float = 1e-12
    unit_tol: float = 1e-9


_POLICY = NumericPolicy()


def policy() -> NumericPolicy:
    return _POLICY


def set_policy(**overrides: float) -> NumericPolicy:
    """Replace fields of the global numeric policy; returns the previous one."""
    global _POLICY
    previous = _POLICY
    _POLICY = replace(_POLICY, **overrides)
    return previous


I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

for _m in (I2, SIGMA_X, SIGMA_Y, SIGMA_Z, PAULIS):
    _m.flags.writeable = False

_DIMS = (2, 4, 8)


def as_bloch(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ContractError(f"Bloch vector must have 3 components, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ContractError("Bloch vector has non-finite components")
    return arr


def pauli_dot(v) -> np.ndarray:
    """Return ``v_x X + v_y Y + v_z Z``."""
    v = as_bloch(v)
    return np.tensordot(v, PAULIS, axes=1)


def state_from_bloch(v) -> np.ndarray:
    """Qubit density matrix ``(I + v.sigma)/2``; rejects vectors outside the ball."""
    v = as_bloch(v)
    norm = float(np.linalg.norm(v))
    if norm > 1.0 + _POLICY.ball_slack:
        raise InvalidStateError(f"Bloch vector norm {norm:.12g} exceeds 1")
    return 0.5 * (I2 + pauli_dot(v))


def _check_square(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ContractError(f"operator must be square, got shape {h.shape}")
    if h.shape[0] not in _DIMS:
        raise UnsupportedDimensionError(f"dimension {h.shape[0]} not in {_DIMS}")
    return h


def check_hermitian(h: np.ndarray, tol: float | None = None) -> np.ndarray:
    h = _check_square(h)
    tol = _POLICY.algebra_tol if tol is None else tol
    if np.max(np.abs(h - h.conj().T)) > tol:
        raise ContractError("operator is not Hermitian")
    return h


def check_density(rho: np.ndarray) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, positive semidefinite."""
    rho = check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > _POLICY.trace_tol:
        raise InvalidStateError(f"trace {tr:.12g} != 1")
    evals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if evals[0] < -_POLICY.psd_slack:
        raise InvalidStateError(f"negative eigenvalue {evals[0]:.3e}")
    return rho


def lambda_max(h: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian operator.

    Qubit operators use the closed form ``a + |v|`` for ``h = a I + v.sigma``;
    larger operators go through ``eigh`` and the eigenpair residual is checked.
    """
    h = check_hermitian(h)
    if h.shape[0] == 2:
        a = 0.5 * np.trace(h).real
        v = np.array([0.5 * np.trace(h @ p).real for p in PAULIS])
        return float(a + np.linalg.norm(v))
    hs = 0.5 * (h + h.conj().T)
    evals, evecs = np.linalg.eigh(hs)
    lam, vec = evals[-1], evecs[:, -1]
    resid = np.linalg.norm(hs @ vec - lam * vec)
    if resid > _POLICY.eig_residual * max(1.0, np.abs(evals).max()):
        raise ContractError(f"eigensolver residual {resid:.3e} above tolerance")
    return float(lam)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    d = a.shape[0] * b.shape[0]
    if d > 8:
        raise UnsupportedDimensionError(f"tensor product dimension {d} exceeds 8")
    return np.kron(a, b)


def partial_trace(h: np.ndarray, keep) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    ``keep`` is either a boolean mask with one entry per qubit or an iterable
    of qubit indices (0 = leftmost factor). Kept qubits retain their order.
    """
    h = _check_square(h)
    nq = int(round(np.log2(h.shape[0])))
    keep = list(keep)
    if keep and all(isinstance(k, (bool, np.bool_)) for k in keep):
        if len(keep) != nq:
            raise ContractError(f"mask length {len(keep)} != {nq} qubits")
        kept = [i for i, k in enumerate(keep) if k]
    else:
        kept = [int(k) for k in keep]
        if len(set(kept)) != len(kept) or any(k < 0 or k >= nq for k in kept):
            raise ContractError(f"invalid qubit selection {keep} for {nq} qubits")
        kept = sorted(kept)
    if not kept:
        raise ContractError("must keep at least one qubit")
    t = h.reshape((2,) * (2 * nq))
    traced = [i for i in range(nq) if i not in kept]
    # trace highest index first so remaining axis numbers stay valid
    for q in sorted(traced, reverse=True):
        cur = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + cur)
    d = 2 ** len(kept)
    return t.reshape(d, d)


def phi_plus() -> np.ndarray:
    """Projector onto ``(|00> + |11>)/sqrt(2)``."""
    psi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    return np.outer(psi, psi.conj())
