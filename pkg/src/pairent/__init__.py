"""Average pair entanglement entropy (E2) of multi-qubit pure states.

Computes E2 and its first and second variations on the state sphere,
certifies critical points, and searches for high-E2 states.
"""

__version__ = "0.1.0"

from .qcore import (  # noqa: E402
    PureState,
    StateError,
    NormError,
    make_state,
    named_state,
    partial_trace,
    permute_qubits,
    conjugate_state,
    inner,
    real_inner,
    load_state,
    save_state,
)
from .spectra import avg_pair_entropy, pair_entropy, entropy_bits, eigh  # noqa: E402
