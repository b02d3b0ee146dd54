"""Pure states, reductions and the registry of named four-qubit states.

Basis convention: the amplitude index is the bit string ``b_A b_B b_C ...``
read as a binary number, so qubit ``A`` (index 0) is the most significant bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

NORM_TOL = 1e-9
LABELS = "ABCDEFGHIJKL"
OMEGA = np.exp(2j * np.pi / 3)


class StateError(ValueError):
    """Malformed state input (wrong length, zero vector, bad file)."""


class NormError(StateError):
    """A state that should already be normalized is not."""


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector of ``2**n_qubits`` complex amplitudes. Use :func:`make_state`."""

    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __repr__(self) -> str:
        return f"PureState(n_qubits={self.n_qubits})"


class QubitPair(NamedTuple):
    first: int
    second: int

    def label(self) -> str:
        return LABELS[self.first] + LABELS[self.second]


def make_state(n_qubits: int, amplitudes, normalize: bool = False) -> PureState:
    """Validate amplitudes and wrap them in a :class:`PureState`.

    With ``normalize=False`` the input norm must already be 1 within 1e-9; the
    stored vector is always rescaled to unit norm to machine precision.
    """
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise StateError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    n_qubits = int(n_qubits)
    amps = np.array(amplitudes, dtype=complex).reshape(-1)
    if amps.shape[0] != 2**n_qubits:
        raise StateError(
            f"expected {2**n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape[0]}"
        )
    if not np.all(np.isfinite(amps)):
        raise StateError("amplitudes must be finite")
    norm = np.linalg.norm(amps)
    if norm == 0.0:
        raise StateError("zero vector is not a state")
    if not normalize and abs(norm - 1.0) > NORM_TOL:
        raise NormError(f"state norm {norm!r} differs from 1 by more than {NORM_TOL}")
    amps = amps / norm
    amps.setflags(write=False)
    return PureState(n_qubits, amps)


def basis_ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def _m4() -> np.ndarray:
    k = basis_ket
    w, wb = OMEGA, OMEGA.conjugate()
    return (
        k("0011") + k("1100") + w * (k("0101") + k("1010")) + wb * (k("0110") + k("1001"))
    ) / np.sqrt(6)


def _psi4() -> np.ndarray:
    # |0000> + |+011> + |1101> + |-110>, with |+-> = (|0> +- |1>)/sqrt2
    k = basis_ket
    r = np.sqrt(2.0)
    return 0.5 * (
        k("0000")
        + (k("0011") + k("1011")) / r
        + k("1101")
        + (k("0110") - k("1110")) / r
    )


def _phi1() -> np.ndarray:
    return (basis_ket("0000") + basis_ket("1111")) / np.sqrt(2)


def _phi2() -> np.ndarray:
    k = basis_ket
    return 0.5 * (k("0000") + k("0111") + k("1001") + k("1110"))


_REGISTRY = {
    "M4": (_m4, "omega-phase state; every pair spectrum {1/6,1/6,1/6,1/2}"),
    "PSI4": (_psi4, "state with rho_AC = I/4 and two (2+-sqrt2)/8 pair spectra"),
    "PHI1": (_phi1, "four-qubit GHZ state"),
    "PHI2": (_phi2, "(|0000>+|0111>+|1001>+|1110>)/2"),
}


def state_names() -> dict[str, str]:
    """Registered state names mapped to one-line descriptions."""
    return {name: desc for name, (_, desc) in _REGISTRY.items()}


def named_state(name: str) -> PureState:
    try:
        factory, _ = _REGISTRY[name.upper()]
    except KeyError:
        raise KeyError(f"unknown state {name!r}; known: {sorted(_REGISTRY)}") from None
    return make_state(4, factory())


def qubit_index(label, n_qubits: int) -> int:
    if isinstance(label, str):
        if len(label) != 1 or label.upper() not in LABELS:
            raise ValueError(f"bad qubit label {label!r}")
        idx = LABELS.index(label.upper())
    else:
        idx = int(label)
    if not 0 <= idx < n_qubits:
        raise ValueError(f"qubit {label!r} out of range for {n_qubits} qubits")
    return idx


def qubit_pair(pair, n_qubits: int) -> QubitPair:
    """Parse ``"AB"``, ``("A", "B")`` or ``(0, 1)`` into a validated pair."""
    if isinstance(pair, str):
        if len(pair) != 2:
            raise ValueError(f"pair label must have two letters, got {pair!r}")
        pair = tuple(pair)
    a, b = (qubit_index(q, n_qubits) for q in pair)
    if a == b:
        raise ValueError("pair qubits must be distinct")
    return QubitPair(a, b)


def all_pairs(n_qubits: int) -> list[QubitPair]:
    return [QubitPair(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]


def _as_vector(x) -> np.ndarray:
    return x.amplitudes if isinstance(x, PureState) else np.asarray(x, dtype=complex)


def _split(vec: np.ndarray, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    # (2**len(keep), 2**rest) matrix with the kept qubits as row index, in order
    rest = [q for q in range(n_qubits) if q not in keep]
    t = vec.reshape((2,) * n_qubits).transpose(list(keep) + rest)
    return t.reshape(2 ** len(keep), -1)


def reduced_outer(a, b, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    """``tr_rest |a><b|`` over the qubits not in ``keep`` (kept order preserved)."""
    return _split(_as_vector(a), keep, n_qubits) @ _split(_as_vector(b), keep, n_qubits).conj().T


def reduced_density(state: PureState, keep: Sequence[int]) -> np.ndarray:
    keep = [qubit_index(q, state.n_qubits) for q in keep]
    if len(set(keep)) != len(keep):
        raise ValueError("kept qubits must be distinct")
    m = _split(state.amplitudes, keep, state.n_qubits)
    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def partial_trace(state: PureState, keep) -> np.ndarray:
    """4x4 reduced density matrix of the pair ``keep`` (ordered first, second)."""
    pair = qubit_pair(keep, state.n_qubits)
    return reduced_density(state, pair)


def apply_on_qubits(op: np.ndarray, vec, qubits: Sequence[int], n_qubits: int) -> np.ndarray:
    """Apply ``op`` (acting on ``qubits`` in the given order) to a state vector."""
    vec = _as_vector(vec)
    rest = [q for q in range(n_qubits) if q not in qubits]
    order = list(qubits) + rest
    t = vec.reshape((2,) * n_qubits).transpose(order).reshape(2 ** len(qubits), -1)
    t = (op @ t).reshape((2,) * n_qubits)
    return t.transpose(np.argsort(order)).reshape(-1)


def permute_qubits(state: PureState, permutation: Sequence[int]) -> PureState:
    """Move qubit ``q`` of the input to position ``permutation[q]`` of the output."""
    perm = [int(p) for p in permutation]
    n = state.n_qubits
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{permutation!r} is not a permutation of 0..{n - 1}")
    # output axis k holds input axis perm^-1(k)
    t = state.amplitudes.reshape((2,) * n).transpose(np.argsort(perm))
    return make_state(n, t.reshape(-1))


def conjugate_state(state: PureState) -> PureState:
    return make_state(state.n_qubits, state.amplitudes.conj())


def inner(a, b) -> complex:
    """``<a|b>``, conjugate-linear in the first argument."""
    va, vb = _as_vector(a), _as_vector(b)
    if va.shape != vb.shape:
        raise ValueError(f"length mismatch: {va.shape} vs {vb.shape}")
    return complex(np.vdot(va, vb))


def real_inner(a, b) -> float:
    return inner(a, b).real


def load_state(path) -> PureState:
    """Read the JSON state file format ``{"version": 1, "n_qubits", "amplitudes"}``."""
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StateError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(doc)


def state_from_dict(doc) -> PureState:
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise StateError("state document must be an object with version 1")
    try:
        n = doc["n_qubits"]
        pairs = doc["amplitudes"]
        amps = [complex(float(re), float(im)) for re, im in pairs]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed state document: {exc}") from exc
    if not isinstance(n, int):
        raise StateError("n_qubits must be an integer")
    return make_state(n, amps)


def state_to_json(state: PureState) -> str:
    # %.17g keeps every double exact on read-back
    amps = ", ".join(f"[{z.real:.17g}, {z.imag:.17g}]" for z in state.amplitudes)
    return f'{{"version": 1, "n_qubits": {state.n_qubits}, "amplitudes": [{amps}]}}\n'


def save_state(state: PureState, path) -> None:
    Path(path).write_text(state_to_json(state))
