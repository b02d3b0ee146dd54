"""Hessian spectra and certification verdicts for registered or saved states.

Usage: python scripts/hessian_spectrum.py [M4 PSI4 ...] [--file state.json]
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from pairent.certify import TOL_NEG, TOL_ZERO, certify
from pairent.qcore import load_state, named_state, state_names


@dataclass(frozen=True)
class SpectrumConfig:
    states: tuple[str, ...] = ("M4", "PSI4")
    files: tuple[str, ...] = field(default_factory=tuple)
    tol_zero: float = TOL_ZERO
    tol_neg: float = TOL_NEG
    cluster_digits: int = 4


def clustered(values, digits):
    vals, counts = np.unique(np.round(values, digits), return_counts=True)
    return [(float(v), int(c)) for v, c in zip(vals, counts)]


def report(label, state, cfg):
    r = certify(state, tol_zero=cfg.tol_zero, tol_neg=cfg.tol_neg)
    print(f"{label}: E2 = {r.e2:.12f}, |grad| = {r.gradient_norm:.3e}, gauge rank {r.gauge_rank}")
    if r.rank_deficient:
        print("  a pair reduction is rank deficient; no Hessian")
    else:
        print(f"  inertia (zero, neg, pos) = ({r.hessian_zero_count}, {r.hessian_negative_count}, "
              f"{r.hessian_positive_count}) of {r.tangent_dim}")
        for v, c in clustered(r.hessian_eigenvalues, cfg.cluster_digits):
            print(f"  {v:+.{cfg.cluster_digits}f} x{c}")
    print(f"  verdict: {r.verdict}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("states", nargs="*", default=list(SpectrumConfig.states), help=", ".join(state_names()))
    parser.add_argument("--file", action="append", default=[])
    args = parser.parse_args(argv)
    cfg = SpectrumConfig(states=tuple(args.states), files=tuple(args.file))
    for name in cfg.states:
        report(name, named_state(name), cfg)
    for path in cfg.files:
        report(path, load_state(path), cfg)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
