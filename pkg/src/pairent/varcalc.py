"""First and second variations of pair entropies on the state sphere.

A variation of a pure state is written ``psi -> psi + dpsi + d2psi`` with
``dpsi`` first order and ``d2psi`` second order in the small parameters.
Staying on the unit sphere requires::

    2 Re<dpsi|psi> = 0
    2 Re<d2psi|psi> + <dpsi|dpsi> = 0

Tangent vectors live in the real vector space ``C^N = R^{2N}`` with metric
``Re<u|v>``. Variations of the matrix logarithm use the eigenbasis
divided-difference kernel ``ln(l_j / l_i) / (l_j - l_i)`` (``1 / l_i`` on
degenerate pairs), which is the closed form of
``int_0^1 [1 - t(1 - A)]^-1 dA [1 - t(1 - A)]^-1 dt``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import PureState, all_pairs, apply_on_qubits, qubit_pair, reduced_density, reduced_outer
from .spectra import (
    SUPPORT_THRESHOLD,
    RankDeficientError,
    Spectrum,
    check_hermitian,
    eigh,
    entropy_side,
)

LN2 = np.log(2.0)
TANGENT_TOL = 1e-10
DEGENERATE_REL_GAP = 1e-8

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: PureState
    delta: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=complex).reshape(-1)
        if d.shape != self.base.amplitudes.shape:
            raise ValueError("tangent length does not match base state")
        drift = abs(np.vdot(d, self.base.amplitudes).real)
        if drift > TANGENT_TOL * max(1.0, np.linalg.norm(d)):
            raise ValueError(f"Re<delta|psi> = {drift:.3e}; not tangent to the sphere")
        object.__setattr__(self, "delta", d)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))


@dataclass(frozen=True, eq=False)
class SecondOrderCurve:
    base: PureState
    delta: np.ndarray
    delta2: np.ndarray

    def __post_init__(self):
        TangentVector(self.base, self.delta)
        d = np.asarray(self.delta, dtype=complex).reshape(-1)
        d2 = np.asarray(self.delta2, dtype=complex).reshape(-1)
        if d2.shape != d.shape:
            raise ValueError("delta2 length does not match base state")
        resid = 2 * np.vdot(d2, self.base.amplitudes).real + np.vdot(d, d).real
        if abs(resid) > TANGENT_TOL * max(1.0, np.vdot(d, d).real):
            raise ValueError(f"second-order normalization violated by {resid:.3e}")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "delta2", d2)

    def at(self, t: float) -> np.ndarray:
        """Unnormalized point ``psi + t dpsi + t^2 d2psi``."""
        return self.base.amplitudes + t * self.delta + t * t * self.delta2


@dataclass(frozen=True, eq=False)
class GaugeBasis:
    """Re-orthonormal basis of the local-unitary plus global-phase directions."""

    base: PureState
    vectors: np.ndarray  # shape (rank, 2**n), complex

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True, eq=False)
class Hessian:
    """Riemannian Hessian of E2 on the unit sphere.

    ``matrix[a, b]`` is the bilinear form on ``basis[:, a]`` and
    ``basis[:, b]``, where ``basis`` holds real coordinates
    ``(Re v, Im v)`` of an orthonormal basis of the tangent space at ``base``.
    The quadratic form equals ``d^2/dt^2 E2`` along the great circle through
    ``base`` with unit initial velocity, i.e. twice the second variation on
    geodesic curves.
    """

    base: PureState
    matrix: np.ndarray
    basis: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_complex(self, coords: np.ndarray) -> np.ndarray:
        """Map tangent coordinates (columns allowed) to complex vectors."""
        x = self.basis @ coords
        n = self.base.dim
        return x[:n] + 1j * x[n:]


def tangent(state: PureState, delta, project: bool = True) -> TangentVector:
    """Build a tangent vector, projecting out ``Re<psi|delta> psi`` if asked."""
    d = np.asarray(delta, dtype=complex).reshape(-1)
    if project:
        d = d - np.vdot(state.amplitudes, d).real * state.amplitudes
    return TangentVector(state, d)


def geodesic_curve(state: PureState, delta) -> SecondOrderCurve:
    """Great-circle curve: ``d2psi = -|dpsi|^2 psi / 2``."""
    d = tangent(state, delta, project=False).delta
    return SecondOrderCurve(state, d, -0.5 * np.vdot(d, d).real * state.amplitudes)


def delta_rho(curve, keep, order: int = 1) -> np.ndarray:
    """First (``order=1``) or second (``order=2``) variation of ``rho_keep``.

    ``curve`` may be a :class:`TangentVector` for the first order.
    """
    psi = curve.base
    n = psi.n_qubits
    keep = tuple(keep)
    if order == 1:
        m = reduced_outer(curve.delta, psi, keep, n)
        return m + m.conj().T
    if order == 2:
        if not isinstance(curve, SecondOrderCurve):
            raise ValueError("second-order variation needs delta2")
        m = reduced_outer(curve.delta2, psi, keep, n)
        return m + m.conj().T + reduced_outer(curve.delta, curve.delta, keep, n)
    raise ValueError("order must be 1 or 2")


def kappa_sigma_split(curve: SecondOrderCurve, keep) -> tuple[np.ndarray, np.ndarray]:
    """Split ``d2rho = kappa + sigma``.

    ``kappa = tr_rest(|d2psi><psi| + h.c.)`` and
    ``sigma = tr_rest |dpsi><dpsi|`` (positive semidefinite).
    """
    n = curve.base.n_qubits
    keep = tuple(keep)
    m = reduced_outer(curve.delta2, curve.base, keep, n)
    return m + m.conj().T, reduced_outer(curve.delta, curve.delta, keep, n)


def log_kernel(lam: np.ndarray) -> np.ndarray:
    """Divided differences of ``ln`` on the eigenvalues ``lam``.

    Near-degenerate pairs (relative gap below 1e-8) use ``2 / (l_i + l_j)``,
    accurate to second order in the gap.
    """
    li, lj = np.meshgrid(lam, lam, indexing="ij")
    gap = lj - li
    near = np.abs(gap) < DEGENERATE_REL_GAP * np.maximum(li, lj)
    safe = np.where(near, 1.0, gap)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (np.log(lj) - np.log(li)) / safe
    return np.where(near, 2.0 / (li + lj), k)


def _check_open_unit(spec: Spectrum, threshold: float = SUPPORT_THRESHOLD) -> None:
    lam = spec.eigenvalues
    if lam[0] <= threshold:
        raise RankDeficientError(
            f"eigenvalue {lam[0]:.3e} outside (0, 1]; log variation needs full support"
        )
    if lam[-1] > 1.0 + 1e-12:
        raise ValueError(f"eigenvalue {lam[-1]:.6g} exceeds 1")


def delta_log(spectrum: Spectrum, drho) -> np.ndarray:
    """Frechet derivative of the natural log at ``rho`` in direction ``drho``."""
    _check_open_unit(spectrum)
    v = spectrum.eigenvectors
    d = v.conj().T @ check_hermitian(drho, tol=1e-9) @ v
    out = v @ (log_kernel(spectrum.eigenvalues) * d) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def _side_spectrum(state: PureState, side) -> Spectrum:
    spec = eigh(reduced_density(state, side))
    _check_open_unit(spec)
    return spec


def _log_from(spec: Spectrum) -> np.ndarray:
    return spec.reconstruct(np.log)


def _side(state: PureState, pair) -> tuple[int, ...]:
    return entropy_side(state.n_qubits, qubit_pair(pair, state.n_qubits))


def delta_E(tangent_vec: TangentVector, pair) -> float:
    """First variation of ``E_XY`` in bits: ``-tr[drho log rho] / ln 2``."""
    side = _side(tangent_vec.base, pair)
    if not side:
        return 0.0
    spec = _side_spectrum(tangent_vec.base, side)
    dr = delta_rho(tangent_vec, side, 1)
    return float(-np.trace(dr @ _log_from(spec)).real / LN2)


def delta2_E(curve: SecondOrderCurve, pair) -> float:
    """Second variation of ``E_XY`` in bits.

    ``-(tr[d2rho log rho] + tr[drho dlog rho] / 2) / ln 2``; equals half the
    second derivative of ``E_XY`` along the curve at ``t = 0``.
    """
    side = _side(curve.base, pair)
    if not side:
        return 0.0
    spec = _side_spectrum(curve.base, side)
    dr = delta_rho(curve, side, 1)
    d2r = delta_rho(curve, side, 2)
    val = np.trace(d2r @ _log_from(spec)) + 0.5 * np.trace(dr @ delta_log(spec, dr))
    return float(-val.real / LN2)


def delta_E2(tangent_vec: TangentVector) -> float:
    pairs = all_pairs(tangent_vec.base.n_qubits)
    return sum(delta_E(tangent_vec, p) for p in pairs) / len(pairs)


def delta2_E2(curve: SecondOrderCurve) -> float:
    pairs = all_pairs(curve.base.n_qubits)
    return sum(delta2_E(curve, p) for p in pairs) / len(pairs)


def variation_tr_f(a, da, d2a) -> tuple[float, float]:
    """First and second variations of ``tr f(A)`` for ``f(x) = x ln x``.

    ``first = tr[dA f'(A)]`` and ``second = tr[d2A f'(A) + dA df'(A) / 2]``
    with ``f'(x) = 1 + ln x``, so ``df'(A)`` is the log variation.
    """
    spec = eigh(a)
    _check_open_unit(spec)
    da = check_hermitian(da, tol=1e-9)
    d2a = check_hermitian(d2a, tol=1e-9)
    fprime = np.eye(spec.eigenvalues.size) + _log_from(spec)
    first = np.trace(da @ fprime).real
    second = (np.trace(d2a @ fprime) + 0.5 * np.trace(da @ delta_log(spec, da))).real
    return float(first), float(second)


def euclidean_gradient(state: PureState) -> np.ndarray:
    """Vector ``g`` with ``dE2 = 2 Re<dpsi|g>`` for every tangent ``dpsi``.

    ``g = -(1 / (P ln 2)) sum_pairs (log rho_side (x) 1) psi`` over the
    ``P = C(n, 2)`` pairs.
    """
    n = state.n_qubits
    pairs = all_pairs(n)
    g = np.zeros(state.dim, dtype=complex)
    for p in pairs:
        side = entropy_side(n, p)
        if not side:
            continue
        spec = _side_spectrum(state, side)
        g += apply_on_qubits(_log_from(spec), state.amplitudes, side, n)
    return -g / (len(pairs) * LN2)


def projected_gradient(state: PureState, mod_gauge: bool = False) -> TangentVector:
    """Sphere-tangent part of :func:`euclidean_gradient`.

    ``dE2 = 2 Re<v|grad>`` for tangent ``v``. With ``mod_gauge`` the gauge
    directions are projected out as well.
    """
    psi = state.amplitudes
    g = euclidean_gradient(state)
    g = g - np.vdot(psi, g).real * psi
    if mod_gauge:
        for b in gauge_basis(state).vectors:
            g = g - np.vdot(b, g).real * b
    return TangentVector(state, g)


def _gram_schmidt_real(vectors, tol: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=complex)
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for b in out:
                w = w - np.vdot(b, w).real * b
        nrm = np.linalg.norm(w)
        if nrm > tol:
            out.append(w / nrm)
    return out


def gauge_generators(state: PureState) -> list[np.ndarray]:
    """``i sigma_a^(q) psi`` for each qubit ``q`` and ``a`` in x, y, z, then ``i psi``."""
    n = state.n_qubits
    gens = [
        1j * apply_on_qubits(PAULI[a], state.amplitudes, [q], n)
        for q in range(n)
        for a in "xyz"
    ]
    gens.append(1j * state.amplitudes)
    return gens


def gauge_basis(state: PureState, tol: float = 1e-10) -> GaugeBasis:
    vecs = _gram_schmidt_real(gauge_generators(state), tol)
    arr = np.array(vecs) if vecs else np.zeros((0, state.dim), dtype=complex)
    return GaugeBasis(state, arr)


def tangent_basis(state: PureState) -> np.ndarray:
    """Real orthonormal basis of the tangent space, as ``(2N, 2N - 1)`` columns.

    Gram-Schmidt over the real coordinate directions ``e_k`` then ``i e_k``,
    each with its ``psi`` component removed. The single coordinate direction
    on which ``psi`` has the largest weight (lowest index on ties) is skipped,
    which guarantees the remaining ``2N - 1`` directions are independent.
    """
    psi = state.amplitudes
    n = psi.size
    p = np.concatenate([psi.real, psi.imag])
    skip = int(np.argmax(np.abs(p) > np.max(np.abs(p)) - 1e-15))
    cols = []
    for k in range(2 * n):
        if k == skip:
            continue
        w = -p[k] * p
        w[k] += 1.0
        for _ in range(2):
            for b in cols:
                w -= (b @ w) * b
        cols.append(w / np.linalg.norm(w))
    return np.array(cols).T


def _real_directions(n: int) -> np.ndarray:
    # complex vectors for the real coordinates (Re v, Im v): e_k then i e_k
    eye = np.eye(n, dtype=complex)
    return np.concatenate([eye, 1j * eye])


def hessian(state: PureState) -> Hessian:
    """Riemannian Hessian of E2 in the basis of :func:`tangent_basis`.

    For a tangent ``u`` on the geodesic curve ``d2psi = -|u|^2 psi / 2``,
    ``-ln2 * d2E_side = -|u|^2 tr[rho log rho] + Re<u|(log rho (x) 1)|u>
    + tr[drho(u) dlog drho(u)] / 2``; the bilinear form of this, summed over
    pairs, is assembled on all ``2N`` real coordinate directions at once and
    then restricted to the tangent space.
    """
    n = state.n_qubits
    psi = state.amplitudes
    dim = psi.size
    pairs = all_pairs(n)
    dirs = _real_directions(dim)  # (2N, N)
    full = np.zeros((2 * dim, 2 * dim))
    for p in pairs:
        side = entropy_side(n, p)
        if not side:
            continue
        spec = _side_spectrum(state, side)
        log_rho = _log_from(spec)
        lam = spec.eigenvalues
        s_ent = float(np.sum(lam * np.log(lam)))
        # Re<e_k|(L (x) 1)|e_l> on coordinate directions
        op_cols = np.array([apply_on_qubits(log_rho, d, side, n) for d in dirs])
        quad_log = np.real(dirs.conj() @ op_cols.T)
        # drho for each coordinate direction, rotated into the eigenbasis
        rest = [q for q in range(n) if q not in side]
        order = list(side) + rest
        psi_m = psi.reshape((2,) * n).transpose(order).reshape(2 ** len(side), -1)
        dir_m = dirs.reshape((2 * dim,) + (2,) * n).transpose([0] + [q + 1 for q in order])
        dir_m = dir_m.reshape(2 * dim, 2 ** len(side), -1)
        m = dir_m @ psi_m.conj().T
        dr = m + np.conj(np.transpose(m, (0, 2, 1)))
        v = spec.eigenvectors
        drt = v.conj().T @ dr @ v
        kern = log_kernel(lam)
        quad_dlog = np.real(np.einsum("kij,ij,lij->kl", drt.conj(), kern, drt))
        full += -s_ent * np.eye(2 * dim) + quad_log + 0.5 * quad_dlog
    full *= -2.0 / (len(pairs) * LN2)
    basis = tangent_basis(state)
    h = basis.T @ full @ basis
    return Hessian(state, 0.5 * (h + h.T), basis)


def hessian_by_polarization(state: PureState) -> Hessian:
    """Same matrix as :func:`hessian`, entry by entry from :func:`delta2_E2`.

    ``H(u, v) = 2 * [Q(u + v) - Q(u - v)] / 4`` with ``Q`` the second
    variation on geodesic curves. Slow; a cross-check of :func:`hessian`.
    """
    basis = tangent_basis(state)
    dim = state.dim
    cvec = basis[:dim] + 1j * basis[dim:]
    k = basis.shape[1]

    def q(u):
        return delta2_E2(geodesic_curve(state, u))

    h = np.zeros((k, k))
    for a in range(k):
        h[a, a] = 2.0 * q(cvec[:, a])
        for b in range(a + 1, k):
            h[a, b] = h[b, a] = 0.5 * (q(cvec[:, a] + cvec[:, b]) - q(cvec[:, a] - cvec[:, b]))
    return Hessian(state, h, basis)


def retract(vec) -> np.ndarray:
    """Projection retraction onto the unit sphere."""
    v = np.asarray(vec, dtype=complex)
    return v / np.linalg.norm(v)
