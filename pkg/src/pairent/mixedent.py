"""Two-qubit mixed-state diagnostics: concurrence, CKW monogamy, PPT, Werner fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import PureState, partial_trace, qubit_index, reduced_density
from .spectra import check_hermitian, eigh

CKW_TOL = 1e-10

SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
# (|01> - |10>)/sqrt2; the projector is sign-independent
PHI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
PHI_MINUS_PROJ = np.outer(PHI_MINUS, PHI_MINUS.conj())


@dataclass(frozen=True)
class CkwReport:
    lhs: float
    rhs: float
    holds: bool


def _check_two_qubit(rho) -> np.ndarray:
    rho = check_hermitian(rho, tol=1e-10)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got {rho.shape}")
    return rho


def concurrence_2q(rho) -> float:
    """Wootters concurrence ``max(0, mu1 - mu2 - mu3 - mu4)``.

    The ``mu`` are square roots of the eigenvalues of the Hermitian matrix
    ``sqrt(rho) (sy sy) conj(rho) (sy sy) sqrt(rho)``, in decreasing order.
    """
    rho = _check_two_qubit(rho)
    root = eigh(rho).reconstruct(lambda lam: np.sqrt(np.clip(lam, 0.0, None)))
    flipped = SIGMA_YY @ rho.conj() @ SIGMA_YY
    r = root @ flipped @ root
    lam = np.linalg.eigvalsh(0.5 * (r + r.conj().T))
    mu = np.sqrt(np.clip(lam, 0.0, None))[::-1]
    return float(max(0.0, mu[0] - mu[1] - mu[2] - mu[3]))


def tangle_one_rest(state: PureState, qubit) -> float:
    """Concurrence of ``qubit`` against the rest, ``2 sqrt(det rho_q)``."""
    q = qubit_index(qubit, state.n_qubits)
    rho = reduced_density(state, [q])
    det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    return float(2.0 * np.sqrt(max(det, 0.0)))


def ckw_check(state: PureState, qubit=0) -> CkwReport:
    """``sum_Y C_qY^2 <= C_q(rest)^2`` for the given qubit."""
    q = qubit_index(qubit, state.n_qubits)
    lhs = sum(
        concurrence_2q(partial_trace(state, (q, y))) ** 2
        for y in range(state.n_qubits)
        if y != q
    )
    rhs = tangle_one_rest(state, q) ** 2
    return CkwReport(float(lhs), float(rhs), bool(lhs <= rhs + CKW_TOL))


def partial_transpose(rho) -> np.ndarray:
    """Transpose on the second qubit of a 4x4 matrix."""
    t = np.asarray(rho).reshape(2, 2, 2, 2)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def ppt_min_eigenvalue(rho) -> float:
    """Smallest eigenvalue of the partial transpose; negative iff entangled (2x2)."""
    return float(np.linalg.eigvalsh(partial_transpose(_check_two_qubit(rho)))[0])


def werner_state(x: float) -> np.ndarray:
    return (1.0 - x) / 4.0 * np.eye(4) + x * PHI_MINUS_PROJ


def werner_fit(rho) -> tuple[float, float]:
    """Least-squares ``x`` for ``rho ~ (1 - x) I/4 + x |Phi-><Phi-|``.

    Returns ``(x, residual)`` with the Frobenius residual. The direction
    ``|Phi-><Phi-| - I/4`` has squared norm 3/4.
    """
    rho = _check_two_qubit(rho)
    direction = PHI_MINUS_PROJ - np.eye(4) / 4.0
    x = float(np.real(np.vdot(direction, rho - np.eye(4) / 4.0)) / 0.75)
    return x, float(np.linalg.norm(rho - werner_state(x)))
