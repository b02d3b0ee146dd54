"""Hermitian spectra, von Neumann entropies and the average pair entropy E2."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import PureState, all_pairs, qubit_pair, reduced_density

HERMITIAN_TOL = 1e-12
SUPPORT_THRESHOLD = 1e-10
ZERO_EIGENVALUE = 1e-12


class RankDeficientError(ValueError):
    """A reduced density matrix lacks the full support a formula requires."""


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self, fn=None) -> np.ndarray:
        """``V f(diag(lambda)) V^dagger`` with ``f`` the identity by default."""
        vals = self.eigenvalues if fn is None else fn(self.eigenvalues)
        return (self.eigenvectors * vals) @ self.eigenvectors.conj().T


def check_hermitian(h, tol: float = HERMITIAN_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    scale = max(1.0, float(np.max(np.abs(h), initial=0.0)))
    if np.max(np.abs(h - h.conj().T), initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return h


def jacobi_eigh(h, tol: float = 1e-14, max_sweeps: int = 64) -> Spectrum:
    """Cyclic Jacobi diagonalization of a small Hermitian matrix.

    Rotations are applied row by row over the upper triangle in a fixed order
    until the off-diagonal Frobenius mass drops below ``tol * ||H||_F``.
    Each complex pivot ``a_pq = |a_pq| e^{i phi}`` is first reduced to a real
    symmetric 2x2 block by the phase ``diag(1, e^{-i phi})``.
    """
    a = check_hermitian(h).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return Spectrum(np.zeros(n), v)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                zeta = (aqq - app) / (2.0 * mag)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # unitary G on span(p, q): columns (c, -s e^{-i phi}) and (s, c e^{-i phi})
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                cols = a[:, [p, q]] @ g
                a[:, [p, q]] = cols
                rows = g.conj().T @ a[[p, q], :]
                a[[p, q], :] = rows
                a[p, q] = a[q, p] = 0.0
                a[p, p], a[q, q] = a[p, p].real, a[q, q].real
                v[:, [p, q]] = v[:, [p, q]] @ g
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    return Spectrum(vals[order], v[:, order])


def eigh(h, method: str = "lapack") -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    ``method="lapack"`` (default) calls ``numpy.linalg.eigh``; ``"jacobi"``
    uses :func:`jacobi_eigh`. Both return ascending eigenvalues.
    """
    h = check_hermitian(h)
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    vals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
    return Spectrum(vals, vecs)


def entropy_from_eigenvalues(vals) -> float:
    lam = np.asarray(vals, dtype=float)
    lam = lam[lam > ZERO_EIGENVALUE]
    return float(-np.sum(lam * np.log2(lam)))


def entropy_bits(rho) -> float:
    """von Neumann entropy ``-tr(rho log2 rho)`` with ``0 log 0 = 0``."""
    vals = np.linalg.eigvalsh(check_hermitian(rho))
    return max(entropy_from_eigenvalues(vals), 0.0)


def entropy_side(n_qubits: int, pair) -> tuple[int, ...]:
    """Qubits of whichever side of the cut ``pair | rest`` is smaller.

    For a pure state both sides have the same nonzero spectrum, so entropies
    and their variations may be computed on either; the smaller side is the
    one whose reduction generically has full support. Ties keep the pair.
    """
    pair = tuple(pair)
    if n_qubits - 2 < 2:
        return tuple(q for q in range(n_qubits) if q not in pair)
    return pair


def pair_entropy(state: PureState, pair) -> float:
    """``E_XY`` in bits."""
    pair = qubit_pair(pair, state.n_qubits)
    side = entropy_side(state.n_qubits, pair)
    if not side:
        return 0.0
    return entropy_bits(reduced_density(state, side))


def pair_entropies(state: PureState) -> dict[str, float]:
    return {p.label(): pair_entropy(state, p) for p in all_pairs(state.n_qubits)}


def avg_pair_entropy(state: PureState) -> float:
    """E2: mean of ``E_XY`` over all ``C(n, 2)`` pairs.

    For four qubits this equals ``(E_AB + E_AC + E_AD) / 3`` since
    complementary pairs have equal entropy.
    """
    return _avg_pair_entropy_vec(state.amplitudes, state.n_qubits)


def _avg_pair_entropy_vec(amps: np.ndarray, n_qubits: int) -> float:
    # batched fast path used by the optimizer; amps must be unit norm
    pairs = all_pairs(n_qubits)
    sides = [entropy_side(n_qubits, p) for p in pairs]
    if not sides[0]:
        return 0.0
    t = amps.reshape((2,) * n_qubits)
    mats = []
    for side in sides:
        rest = [q for q in range(n_qubits) if q not in side]
        m = t.transpose(list(side) + rest).reshape(2 ** len(side), -1)
        mats.append(m @ m.conj().T)
    lam = np.linalg.eigvalsh(np.stack(mats))
    lam = np.where(lam > ZERO_EIGENVALUE, lam, 1.0)
    return float(-np.sum(lam * np.log2(lam)) / len(pairs))


def min_side_eigenvalue(amps: np.ndarray, n_qubits: int) -> float:
    """Smallest eigenvalue over all pair reductions used by E2."""
    t = amps.reshape((2,) * n_qubits)
    lo = np.inf
    for p in all_pairs(n_qubits):
        side = entropy_side(n_qubits, p)
        if not side:
            continue
        rest = [q for q in range(n_qubits) if q not in side]
        m = t.transpose(list(side) + rest).reshape(2 ** len(side), -1)
        lo = min(lo, float(np.linalg.eigvalsh(m @ m.conj().T)[0]))
    return lo


def log_on_support(
    rho, threshold: float = SUPPORT_THRESHOLD, require_full_support: bool = False
) -> np.ndarray:
    """Natural matrix logarithm ``V diag(ln lambda) V^dagger``.

    Eigenvalues at or below ``threshold`` are treated as outside the support
    and contribute nothing, unless ``require_full_support`` is set, in which
    case they raise :class:`RankDeficientError`.
    """
    spec = eigh(rho)
    lam = spec.eigenvalues
    on = lam > threshold
    if require_full_support and not np.all(on):
        raise RankDeficientError(
            f"matrix has eigenvalue {lam.min():.3e} <= support threshold {threshold:g}"
        )
    logs = np.where(on, np.log(np.where(on, lam, 1.0)), 0.0)
    return spec.reconstruct(lambda _: logs)
