"""Stationarity and local-maximum certification.

Two independent routes are kept apart here. :func:`certify` works for any
state from the generic gradient and Hessian. The ``p_*`` functions specialise
to M4, whose pair reductions are all ``I/6 + |Phi-><Phi-|/3``: there the
second variation of ``E_AB + E_AC + E_AD`` equals ``-(F + P/2) / ln 2`` with
``F >= 0`` a sum of singlet overlaps and

    P = sum_Y tr[drho_AY dlog rho_AY] - 3 ln 3 <dpsi|dpsi>,

so ``P > 0`` on every non-gauge variation makes M4 a strict local maximum.
``P`` splits into four blocks with closed forms in a 21-parameter chart.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .mixedent import PHI_MINUS
from .qcore import PureState, basis_ket, named_state, partial_trace, reduced_outer
from .spectra import RankDeficientError, avg_pair_entropy, eigh
from .varcalc import (
    LN2,
    TangentVector,
    delta_log,
    delta_rho,
    euclidean_gradient,
    gauge_basis,
    hessian,
    kappa_sigma_split,
    projected_gradient,
    tangent,
)

LN3 = np.log(3.0)
A_PAIRS = ((0, 1), (0, 2), (0, 3))

TOL_GRAD = 1e-6
TOL_ZERO = 1e-6
TOL_NEG = 1e-3

# basis S = {|00>, |11>, |Phi+>, |Phi->} with |Phi+-> = (|10> +- |01>)/sqrt2
_R = 1 / np.sqrt(2)
S_BASIS = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, _R, _R, 0], [0, -_R, _R, 0]], dtype=complex
).T
S_LABELS = ("O", "I", "+", "-")

_M4_BLOCK = ("0011", "1100", "0101", "1010", "0110", "1001")
_THREE_ONES = ("0111", "1011", "1101", "1110")
_THREE_ZEROS = ("1000", "0100", "0010", "0001")
_OMEGA = np.exp(2j * np.pi / 3)
_WEIGHT = {"0101": _OMEGA, "1010": _OMEGA, "0110": _OMEGA**2, "1001": _OMEGA**2}


@dataclass(frozen=True)
class M4VariationParams:
    """Complex coordinates of a variation of M4.

    The middle block carries M4's own phases: the ``0101``/``1010`` kets enter
    with weight omega and ``0110``/``1001`` with omega^2. All four kets with a
    single ``1`` share the coefficient ``z``.
    """

    eps_0000: complex = 0j
    eps_1111: complex = 0j
    eps_0011: complex = 0j
    eps_1100: complex = 0j
    eps_0101: complex = 0j
    eps_1010: complex = 0j
    eps_0110: complex = 0j
    eps_1001: complex = 0j
    eps_0111: complex = 0j
    eps_1011: complex = 0j
    eps_1101: complex = 0j
    eps_1110: complex = 0j
    z: complex = 0j

    def eps(self, bits: str) -> complex:
        return complex(getattr(self, "eps_" + bits))

    @property
    def small(self) -> np.ndarray:
        """``x_a + i y_a``: eps_0.. - eps_1.. for the three middle pairs."""
        return np.array(
            [
                self.eps("0011") - self.eps("1100"),
                self.eps("0101") - self.eps("1010"),
                self.eps("0110") - self.eps("1001"),
            ]
        )

    @property
    def big(self) -> np.ndarray:
        """``X_a + i Y_a``: eps_1.. + eps_0.. for the three middle pairs."""
        return np.array(
            [
                self.eps("1100") + self.eps("0011"),
                self.eps("1010") + self.eps("0101"),
                self.eps("1001") + self.eps("0110"),
            ]
        )

    def replace(self, **changes) -> "M4VariationParams":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return M4VariationParams(**d)

    def to_real(self) -> np.ndarray:
        c = np.array([getattr(self, f.name) for f in fields(self)], dtype=complex)
        return np.concatenate([c.real, c.imag])

    @classmethod
    def from_real(cls, x) -> "M4VariationParams":
        x = np.asarray(x, dtype=float)
        k = len(fields(cls))
        c = x[:k] + 1j * x[k:]
        return cls(*[complex(v) for v in c])

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "M4VariationParams":
        return cls.from_real(scale * rng.standard_normal(2 * len(fields(cls))))

    def is_gauge_fixed(self, tol: float = 1e-12) -> bool:
        return bool(
            np.all(np.abs(self.small.imag) <= tol) and abs(self.big.imag.sum()) <= tol
        )


def _shift_middle(params: M4VariationParams, amount: complex) -> M4VariationParams:
    return params.replace(
        **{"eps_" + b: params.eps(b) + amount for b in _M4_BLOCK}
    )


def normal_part(params: M4VariationParams) -> M4VariationParams:
    """Drop the component along M4 itself (``X_1 + X_2 + X_3 = 0`` afterwards).

    Adding ``c M4`` shifts every middle eps by ``c / sqrt6``, so this equals
    subtracting ``Re<M4|dpsi> M4`` from the built vector.
    """
    return _shift_middle(params, -0.5 * params.big.real.mean())


def build_m4_variation(params: M4VariationParams) -> TangentVector:
    """Tangent vector at M4 for the given coordinates (normal part removed)."""
    p = normal_part(params)
    d = p.eps("0000") * basis_ket("0000") + p.eps("1111") * basis_ket("1111")
    for bits in _M4_BLOCK + _THREE_ONES:
        d = d + _WEIGHT.get(bits, 1.0) * p.eps(bits) * basis_ket(bits)
    for bits in _THREE_ZEROS:
        d = d + p.z * basis_ket(bits)
    return TangentVector(named_state("M4"), d)


def gauge_fix(params: M4VariationParams) -> M4VariationParams:
    """Impose ``y_1 = y_2 = y_3 = 0`` and ``Y_1 + Y_2 + Y_3 = 0``.

    A relative phase on one qubit moves only the ``y_a`` (the three qubit
    phases on A, B, C span all of them) and a global phase moves each ``Y_a``
    equally, so both shifts add a pure gauge direction to the variation.
    """
    out = params
    for (zero, one), y in zip(
        (("0011", "1100"), ("0101", "1010"), ("0110", "1001")), params.small.imag
    ):
        out = out.replace(
            **{"eps_" + zero: out.eps(zero) - 0.5j * y, "eps_" + one: out.eps(one) + 0.5j * y}
        )
    return _shift_middle(out, -0.5j * out.big.imag.mean())


def _m4_spectra():
    psi = named_state("M4")
    return psi, [eigh(partial_trace(psi, p)) for p in A_PAIRS]


def _require_m4(tv: TangentVector) -> None:
    if not np.allclose(tv.base.amplitudes, named_state("M4").amplitudes, atol=1e-12):
        raise ValueError("this quantity is defined only at M4")


def p_direct(tv: TangentVector) -> float:
    """``P`` from the generic log-variation kernel (natural logs)."""
    _require_m4(tv)
    _, specs = _m4_spectra()
    total = 0.0
    for pair, spec in zip(A_PAIRS, specs):
        dr = delta_rho(tv, pair, 1)
        total += np.trace(dr @ delta_log(spec, dr)).real
    return float(total - 3 * LN3 * np.vdot(tv.delta, tv.delta).real)


def k_matrix() -> np.ndarray:
    """Log-variation kernel of ``rho_AY(M4)`` in the basis S."""
    six, half = 1.0 / 6.0, 0.5
    lam = np.array([six, six, six, half])
    li, lj = np.meshgrid(lam, lam, indexing="ij")
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(li == lj, 1.0 / li, np.log(lj / li) / (lj - li))
    return k


def a_coefficients(tv: TangentVector) -> np.ndarray:
    """``a[alpha, i, j] = <S_i|drho_AY|S_j>`` for Y = B, C, D (alpha = 0, 1, 2)."""
    _require_m4(tv)
    return np.array([S_BASIS.conj().T @ delta_rho(tv, pair, 1) @ S_BASIS for pair in A_PAIRS])


def p_from_a(tv: TangentVector) -> float:
    """``P`` as ``sum K_ij |a_ij|^2 - 3 ln 3 <dpsi|dpsi>`` in the basis S."""
    a = a_coefficients(tv)
    return float(np.sum(k_matrix() * np.abs(a) ** 2) - 3 * LN3 * np.vdot(tv.delta, tv.delta).real)


def p_closed(params: M4VariationParams) -> tuple[float, float, float, float]:
    """Closed forms of the four blocks of ``P`` for gauge-fixed coordinates.

    ``P1 = (6 - 3 ln3)(|e0000|^2 + |e1111|^2)``;
    ``P2 = (1 - ln3/2) sum_{pairs} |e_i + e_j|^2 + ln3 sum |e_i - e_j|^2
    + 24 (1 - ln3/2)|z|^2`` over the three-ones kets, the difference sum
    restricted to pairs not involving ``0111``;
    ``P3 = (ln3/2)(4 sum x^2 + x2 x3 + x3 x1 + x1 x2)``;
    ``P4 = 2 sum (X^2 + x^2) + sum_cyclic[(X_b + X_c)^2 + (Y_b - Y_c)^2]
    - (3/2) ln3 sum (X^2 + Y^2)``.
    """
    if not params.is_gauge_fixed(tol=1e-10):
        raise ValueError("p_closed needs gauge-fixed parameters (see gauge_fix)")
    p = normal_part(params)
    p1 = (6 - 3 * LN3) * (abs(p.eps("0000")) ** 2 + abs(p.eps("1111")) ** 2)
    t = [p.eps(b) for b in _THREE_ONES]
    c = 1 - 0.5 * LN3
    sums = sum(abs(t[i] + t[j]) ** 2 for i in range(4) for j in range(i + 1, 4))
    diffs = sum(abs(t[i] - t[j]) ** 2 for i in range(1, 4) for j in range(i + 1, 4))
    p2 = c * sums + LN3 * diffs + 24 * c * abs(p.z) ** 2
    x = p.small.real
    p3 = 0.5 * LN3 * (4 * np.sum(x**2) + x[1] * x[2] + x[2] * x[0] + x[0] * x[1])
    xb, yb = p.big.real, p.big.imag
    cyc = sum((xb[b] + xb[g]) ** 2 + (yb[b] - yb[g]) ** 2 for b, g in ((1, 2), (2, 0), (0, 1)))
    p4 = 2 * np.sum(xb**2 + x**2) + cyc - 1.5 * LN3 * np.sum(xb**2 + yb**2)
    return float(p1), float(p2), float(p3), float(p4)


def p_consistency(params: M4VariationParams) -> float:
    """``|P_direct - (P1 + P2 + P3 + P4)|``."""
    return abs(p_direct(build_m4_variation(params)) - sum(p_closed(params)))


def f_terms(tv: TangentVector) -> tuple[float, float, float]:
    """``F_AY = ln3 <Phi-|sigma_AY|Phi->`` for Y = B, C, D."""
    _require_m4(tv)
    out = []
    for pair in A_PAIRS:
        sigma = delta_rho_sigma(tv, pair)
        out.append(float(LN3 * np.vdot(PHI_MINUS, sigma @ PHI_MINUS).real))
    return out[0], out[1], out[2]


def delta_rho_sigma(tv: TangentVector, pair) -> np.ndarray:
    return reduced_outer(tv.delta, tv.delta, pair, tv.base.n_qubits)


@dataclass
class CertificationReport:
    gradient_norm: float
    gauge_rank: int
    hessian_zero_count: int | None
    hessian_negative_count: int | None
    hessian_positive_count: int | None
    min_nonzero_abs: float | None
    verdict: str
    tangent_dim: int
    e2: float
    rank_deficient: bool = False
    hessian_eigenvalues: list[float] = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tool_version"] = __version__
        return d


VERDICTS = (
    "not_stationary",
    "strict_local_max_mod_gauge",
    "saddle_or_min",
    "degenerate_inconclusive",
)


def inertia(eigenvalues, tol_zero: float = TOL_ZERO) -> tuple[int, int, int]:
    """(zero, negative, positive) counts with ``|lambda| < tol_zero`` as zero."""
    ev = np.asarray(eigenvalues)
    zero = int(np.sum(np.abs(ev) < tol_zero))
    neg = int(np.sum(ev <= -tol_zero))
    return zero, neg, ev.size - zero - neg


def certify(
    state: PureState,
    tol_grad: float = TOL_GRAD,
    tol_zero: float = TOL_ZERO,
    tol_neg: float = TOL_NEG,
) -> CertificationReport:
    """Classify ``state`` as a critical point of E2.

    A pair reduction without full support makes E2 non-differentiable with
    an unbounded increase rate into the missing eigen-directions, so such a
    state is reported ``not_stationary`` with infinite gradient norm and no
    Hessian.
    """
    thresholds = {"tol_grad": tol_grad, "tol_zero": tol_zero, "tol_neg": tol_neg}
    tdim = 2 * state.dim - 1
    # gauge directions shorter than tol_zero count as zero, matching the Hessian cut
    gb = gauge_basis(state, tol=tol_zero)
    e2 = avg_pair_entropy(state)
    try:
        grad = projected_gradient(state)
    except RankDeficientError:
        return CertificationReport(
            float("inf"), gb.rank, None, None, None, None, "not_stationary",
            tdim, e2, rank_deficient=True, thresholds=thresholds,
        )
    gnorm = grad.norm
    ev = hessian(state).eigenvalues()
    zero, neg, pos = inertia(ev, tol_zero)
    nonzero = np.abs(ev)[np.abs(ev) >= tol_zero]
    min_nz = float(nonzero.min()) if nonzero.size else None
    if gnorm > tol_grad:
        verdict = "not_stationary"
    elif pos > 0:
        verdict = "saddle_or_min"
    elif zero == gb.rank and np.all(ev[np.abs(ev) >= tol_zero] < -tol_neg):
        verdict = "strict_local_max_mod_gauge"
    else:
        verdict = "degenerate_inconclusive"
    return CertificationReport(
        gnorm, gb.rank, zero, neg, pos, min_nz, verdict, tdim, e2,
        hessian_eigenvalues=[float(v) for v in ev], thresholds=thresholds,
    )


def psi4_probe_direction() -> np.ndarray:
    return (basis_ket("0011") - basis_ket("1011")) / np.sqrt(2)


def psi4_nonstationarity() -> float:
    """Directional derivative of E2 at PSI4 along ``(|0011> - |1011>)/sqrt2``."""
    tv = tangent(named_state("PSI4"), psi4_probe_direction(), project=False)
    return float(2 * np.vdot(tv.delta, euclidean_gradient(tv.base)).real)


def psi4_family_coefficients() -> tuple[float, float]:
    """``(c_a, c_b)`` with ``dE2 = c_a Re(alpha) + c_b Re(beta)`` at PSI4.

    For variations ``alpha |0011> + beta |1011>`` evaluated with the
    first-variation formula ``-tr[drho log rho] / ln 2`` (pairs averaged).
    """
    g = euclidean_gradient(named_state("PSI4"))
    return (
        float(2 * np.vdot(basis_ket("0011"), g).real),
        float(2 * np.vdot(basis_ket("1011"), g).real),
    )


def kappa_log_sum(curve) -> float:
    """``sum_Y tr(kappa_AY ln rho_AY)`` at M4."""
    _, specs = _m4_spectra()
    total = 0.0
    for pair, spec in zip(A_PAIRS, specs):
        kappa, _ = kappa_sigma_split(curve, pair)
        total += np.trace(kappa @ spec.reconstruct(np.log)).real
    return float(total)


def sigma_log_sum(curve) -> float:
    """``sum_Y tr(sigma_AY ln rho_AY)`` at M4."""
    _, specs = _m4_spectra()
    total = 0.0
    for pair, spec in zip(A_PAIRS, specs):
        _, sigma = kappa_sigma_split(curve, pair)
        total += np.trace(sigma @ spec.reconstruct(np.log)).real
    return float(total)


def second_variation_from_p(tv: TangentVector) -> float:
    """``sum_Y d2E_AY`` on the geodesic through M4, as ``-(F + P/2) / ln 2``."""
    return -(sum(f_terms(tv)) + 0.5 * p_direct(tv)) / LN2
