"""Seeded multi-start gradient ascent of E2 over pure states.

Randomness comes from numpy's Philox counter-based generator (4x64-bit
counter, 2x64-bit key). The user seed feeds a ``SeedSequence`` whose
``spawn`` children key one independent Philox stream per restart, so restart
``k`` sees the same numbers regardless of how many restarts run or in which
order. A random state draws ``2 * 2**n`` standard normals from its stream,
interleaved as ``(re_0, im_0, re_1, im_1, ...)``, and normalizes.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .qcore import PureState, all_pairs, make_state, reduced_density
from .spectra import (
    SUPPORT_THRESHOLD,
    RankDeficientError,
    _avg_pair_entropy_vec,
    entropy_side,
    min_side_eigenvalue,
)
from .varcalc import euclidean_gradient

log = logging.getLogger(__name__)

M4_E2 = 1.0 + 0.5 * np.log2(3.0)
MAX_HALVINGS = 60
MAX_REDRAWS = 100


@dataclass(frozen=True)
class SearchConfig:
    seed: int = 7
    restarts: int = 100
    max_iters: int = 5000
    grad_tol: float = 1e-9
    initial_step: float = 0.5
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    n_qubits: int = 4

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("restarts", "max_iters"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("grad_tol", "initial_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must lie in (0, 1)")
        if not 0 < self.backtrack_factor < 1:
            raise ValueError("backtrack_factor must lie in (0, 1)")
        # E2 is identically zero on two qubits: the pair is the whole system
        if not 3 <= self.n_qubits <= 8:
            raise ValueError("n_qubits must be between 3 and 8")

    @classmethod
    def from_dict(cls, d: dict) -> "SearchConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


@dataclass
class RestartRecord:
    index: int
    start_e2: float
    final_e2: float
    iterations: int
    converged: bool
    stop_reason: str
    gradient_norm: float
    redraws: int = 0
    e2_history: list[float] = field(default_factory=list, repr=False)
    final_amplitudes: np.ndarray | None = field(default=None, repr=False)


@dataclass
class SearchResult:
    config: SearchConfig
    best_state: PureState
    best_e2: float
    best_restart: int
    records: list[RestartRecord]
    fingerprint: dict[str, list[float]]
    clusters: list[dict]
    exceeds_m4: bool

    def to_dict(self) -> dict:
        recs = []
        for r in self.records:
            d = asdict(r)
            d.pop("e2_history")
            d.pop("final_amplitudes")
            recs.append(d)
        return {
            "config": asdict(self.config),
            "best_e2": self.best_e2,
            "best_restart": self.best_restart,
            "exceeds_m4": self.exceeds_m4,
            "m4_e2": M4_E2,
            "fingerprint": self.fingerprint,
            "clusters": self.clusters,
            "best_state": {
                "version": 1,
                "n_qubits": self.best_state.n_qubits,
                "amplitudes": [[z.real, z.imag] for z in self.best_state.amplitudes],
            },
            "restarts": recs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def restart_streams(seed: int, restarts: int) -> list[np.random.Generator]:
    children = np.random.SeedSequence(int(seed)).spawn(int(restarts))
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def random_state(rng: np.random.Generator, n_qubits: int = 4) -> PureState:
    """Haar-random pure state from ``2 * 2**n`` interleaved normals."""
    x = rng.standard_normal(2 * 2**n_qubits)
    return make_state(n_qubits, x[0::2] + 1j * x[1::2], normalize=True)


def fingerprint(state: PureState, digits: int = 6) -> dict[str, list[float]]:
    """Sorted pair-reduction spectra rounded to ``10**-digits``."""
    out = {}
    for p in all_pairs(state.n_qubits):
        side = entropy_side(state.n_qubits, p)
        lam = np.linalg.eigvalsh(reduced_density(state, side)) if side else np.ones(1)
        out[p.label()] = [round(float(v), digits) + 0.0 for v in lam]
    return out


def _gradient(amps: np.ndarray, n: int) -> np.ndarray:
    state = PureState(n, amps)
    g = euclidean_gradient(state)
    return g - np.vdot(amps, g).real * amps


def ascend(start: PureState, config: SearchConfig, index: int = 0) -> RestartRecord:
    """Projected gradient ascent ``psi <- normalize(psi + eta * grad)``.

    The trial step is ``config.initial_step`` each iteration, halved by
    ``backtrack_factor`` until the Armijo condition
    ``E2(new) >= E2(old) + c * eta * dE2(grad)`` holds (with a 4-ulp rounding
    allowance so the iteration can still reach tight gradient tolerances) and
    every pair reduction keeps full support.
    """
    n = start.n_qubits
    psi = np.array(start.amplitudes)
    if min_side_eigenvalue(psi, n) <= SUPPORT_THRESHOLD:
        raise RankDeficientError("start state has a rank-deficient pair reduction")
    e = _avg_pair_entropy_vec(psi, n)
    history = [e]
    reason, converged, it, gnorm = "max_iters", False, 0, float("nan")
    for it in range(config.max_iters + 1):
        g = _gradient(psi, n)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= config.grad_tol:
            reason, converged = "grad_tol", True
            break
        if it == config.max_iters:
            break
        slope = 2.0 * gnorm**2  # dE2 along g
        noise = 4 * np.finfo(float).eps * max(1.0, abs(e))
        step = config.initial_step
        for _ in range(MAX_HALVINGS):
            cand = psi + step * g
            cand /= np.linalg.norm(cand)
            ec = _avg_pair_entropy_vec(cand, n)
            if ec >= e + config.armijo_c * step * slope - noise and (
                min_side_eigenvalue(cand, n) > SUPPORT_THRESHOLD
            ):
                break
            step *= config.backtrack_factor
        else:
            reason = "line_search"
            break
        psi, e = cand, ec
        history.append(e)
    return RestartRecord(
        index=index,
        start_e2=history[0],
        final_e2=e,
        iterations=it,
        converged=converged,
        stop_reason=reason,
        gradient_norm=gnorm,
        e2_history=history,
        final_amplitudes=psi,
    )


def _run_restart(args) -> RestartRecord:
    index, rng, config = args
    redraws = 0
    while True:
        start = random_state(rng, config.n_qubits)
        try:
            rec = ascend(start, config, index)
        except RankDeficientError:
            redraws += 1
            if redraws > MAX_REDRAWS:
                raise
            continue
        rec.redraws = redraws
        return rec


def _clusters(records: list[RestartRecord], n: int) -> list[dict]:
    groups: dict[str, dict] = {}
    for r in records:
        if not r.converged:
            continue
        fp = fingerprint(PureState(n, r.final_amplitudes), digits=5)
        key = json.dumps(fp, sort_keys=True)
        g = groups.setdefault(key, {"fingerprint": fp, "e2": r.final_e2, "count": 0, "restarts": []})
        g["count"] += 1
        g["restarts"].append(r.index)
        g["e2"] = max(g["e2"], r.final_e2)
    return sorted(groups.values(), key=lambda g: (-g["e2"], g["restarts"][0]))


def multistart(config: SearchConfig, jobs: int = 1) -> SearchResult:
    """Run ``config.restarts`` independent ascents and keep the best.

    Ties in E2 go to the lowest restart index, so the result does not depend
    on ``jobs`` or scheduling.
    """
    streams = restart_streams(config.seed, config.restarts)
    tasks = [(k, rng, config) for k, rng in enumerate(streams)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_restart, tasks))
    else:
        records = [_run_restart(t) for t in tasks]
    best = max(records, key=lambda r: (r.final_e2, -r.index))
    n = config.n_qubits
    best_state = make_state(n, best.final_amplitudes, normalize=True)
    exceeds = bool(n == 4 and best.final_e2 > M4_E2 + 1e-6)
    if exceeds:
        log.warning(
            "restart %d reached E2 = %.12f above M4's %.12f: evidence against M4 being the global maximum",
            best.index, best.final_e2, M4_E2,
        )
    return SearchResult(
        config=config,
        best_state=best_state,
        best_e2=best.final_e2,
        best_restart=best.index,
        records=records,
        fingerprint=fingerprint(best_state),
        clusters=_clusters(records, n),
        exceeds_m4=exceeds,
    )
