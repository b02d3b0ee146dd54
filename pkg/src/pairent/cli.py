"""Command-line interface: ``pairent <command> [options]``.

Exit codes: 0 ok, 1 a ``reproduce`` check failed, 2 usage or input format
error, 3 a numerical invariant was violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .certify import TOL_GRAD, TOL_NEG, TOL_ZERO, certify, inertia
from .mixedent import ckw_check, concurrence_2q, ppt_min_eigenvalue, werner_fit
from .qcore import (
    NormError,
    PureState,
    StateError,
    all_pairs,
    load_state,
    named_state,
    partial_trace,
    qubit_pair,
    reduced_density,
    save_state,
    state_names,
)
from .reproduce import failed, format_table, rows_to_dicts, run_checks
from .search import SearchConfig, multistart
from .spectra import RankDeficientError, avg_pair_entropy, pair_entropies
from .varcalc import hessian, projected_gradient

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _g(x) -> str:
    return f"{x:.12g}"


def _complex_pairs(vec) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec)]


def _dump(obj) -> str:
    # json writes floats with repr, i.e. the shortest round-tripping form
    return json.dumps(obj, indent=2, sort_keys=True)


def _resolve_state(args) -> PureState:
    if args.state is not None:
        try:
            return named_state(args.state)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if args.file is not None:
        return load_state(args.file)
    raise UsageError("one of --state or --file is required")


def analysis_report(state: PureState, pair=None) -> dict:
    n = state.n_qubits
    pairs = all_pairs(n)
    ent = pair_entropies(state)
    report = {
        "n_qubits": n,
        "pair_entropies": ent,
        "e2": avg_pair_entropy(state),
        "pair_spectra": {
            p.label(): np.linalg.eigvalsh(partial_trace(state, p)).tolist() for p in pairs
        },
        "qubit_spectra": {
            "ABCDEFGH"[q]: np.linalg.eigvalsh(reduced_density(state, [q])).tolist()
            for q in range(n)
        },
        "concurrences": {},
        "werner_fits": {},
        "ppt_min_eigenvalues": {},
        "ckw": {},
    }
    for p in pairs:
        rho = partial_trace(state, p)
        report["concurrences"][p.label()] = concurrence_2q(rho)
        x, res = werner_fit(rho)
        report["werner_fits"][p.label()] = {"x": x, "residual": res}
        report["ppt_min_eigenvalues"][p.label()] = ppt_min_eigenvalue(rho)
    for q in range(n):
        c = ckw_check(state, q)
        report["ckw"]["ABCDEFGH"[q]] = {"lhs": c.lhs, "rhs": c.rhs, "holds": c.holds}
    if pair is not None:
        p = qubit_pair(pair, n)
        report["pair"] = {
            "label": p.label(),
            "rho": _complex_pairs(partial_trace(state, p).ravel()),
        }
    return report


def _text_analysis(r: dict) -> str:
    lines = [f"E2 = {_g(r['e2'])}  (n_qubits = {r['n_qubits']})", "pair  entropy          concurrence      werner_x         ppt_min          spectrum"]
    for label, e in r["pair_entropies"].items():
        spec = " ".join(_g(v) for v in r["pair_spectra"][label])
        lines.append(
            f"{label:<4}  {_g(e):<15}  {_g(r['concurrences'][label]):<15}  "
            f"{_g(r['werner_fits'][label]['x']):<15}  {_g(r['ppt_min_eigenvalues'][label]):<15}  {spec}"
        )
    lines.append("qubit  spectrum                          CKW lhs          CKW rhs")
    for q, spec in r["qubit_spectra"].items():
        c = r["ckw"][q]
        lines.append(
            f"{q:<5}  {' '.join(_g(v) for v in spec):<32}  {_g(c['lhs']):<15}  {_g(c['rhs'])}"
            + ("" if c["holds"] else "  VIOLATED")
        )
    if "pair" in r:
        lines.append(f"rho_{r['pair']['label']} (re, im) row-major:")
        vals = r["pair"]["rho"]
        for i in range(4):
            row = vals[4 * i: 4 * i + 4]
            lines.append("  " + "  ".join(f"{re:.12g}{im:+.12g}j" for re, im in row))
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    r = analysis_report(_resolve_state(args), args.pair)
    print(_dump(r) if args.json else _text_analysis(r))
    return EXIT_OK


def cmd_certify(args) -> int:
    rep = certify(_resolve_state(args), args.tol_grad, args.tol_zero, args.tol_neg)
    if args.json:
        print(_dump(rep.to_dict()))
        return EXIT_OK
    counts = (rep.hessian_zero_count, rep.hessian_negative_count, rep.hessian_positive_count)
    print(f"verdict            {rep.verdict}")
    print(f"E2                 {_g(rep.e2)}")
    print(f"gradient norm      {_g(rep.gradient_norm)}")
    print(f"gauge rank         {rep.gauge_rank}")
    print(f"inertia (0, -, +)  {counts if counts[0] is not None else 'n/a'}")
    if rep.min_nonzero_abs is not None:
        print(f"min |nonzero eig|  {_g(rep.min_nonzero_abs)}")
    if rep.rank_deficient:
        print("note               a pair reduction lacks full support")
    return EXIT_OK


def cmd_grad(args) -> int:
    state = _resolve_state(args)
    g = projected_gradient(state)
    gm = projected_gradient(state, mod_gauge=True)
    out = {
        "e2": avg_pair_entropy(state),
        "gradient_norm": g.norm,
        "gradient_norm_mod_gauge": gm.norm,
        "gradient": _complex_pairs(g.delta),
    }
    if args.json:
        print(_dump(out))
    else:
        print(f"E2                          {_g(out['e2'])}")
        print(f"projected gradient norm     {_g(g.norm)}")
        print(f"gradient norm mod gauge     {_g(gm.norm)}")
    return EXIT_OK


def cmd_hessian(args) -> int:
    state = _resolve_state(args)
    ev = hessian(state).eigenvalues()
    counts = inertia(ev, args.tol_zero)
    if args.json:
        print(_dump({"eigenvalues": ev.tolist(), "inertia": list(counts), "dim": int(ev.size)}))
    else:
        print(f"dimension {ev.size}, inertia (zero, negative, positive) = {counts}")
        for v in ev:
            print(_g(v))
    return EXIT_OK


def _search_config(args) -> SearchConfig:
    base = {}
    if args.config is not None:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(base, dict):
            raise UsageError("config file must hold a JSON object")
    for key in ("seed", "restarts", "max_iters", "n_qubits", "grad_tol"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    try:
        return SearchConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_search(args) -> int:
    config = _search_config(args)
    result = multistart(config, jobs=args.jobs)
    if args.save_best:
        save_state(result.best_state, args.save_best)
    if args.json:
        print(result.to_json())
        return EXIT_OK
    conv = sum(r.converged for r in result.records)
    print(f"best E2      {_g(result.best_e2)}  (restart {result.best_restart})")
    print(f"converged    {conv}/{len(result.records)}")
    for label, spec in result.fingerprint.items():
        print(f"  {label}  {' '.join(f'{v:.6f}' for v in spec)}")
    print("clusters (E2, count):")
    for c in result.clusters:
        print(f"  {_g(c['e2'])}  {c['count']}")
    if result.exceeds_m4:
        print("!" * 72)
        print("! best E2 exceeds the value at M4: the state is saved with --save-best")
        print("!" * 72)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    rows = run_checks()
    if args.json:
        print(_dump({"rows": rows_to_dicts(rows), "failed": len(failed(rows))}))
    else:
        print(format_table(rows))
    return EXIT_CHECK if failed(rows) else EXIT_OK


def cmd_states(args) -> int:
    names = state_names()
    if args.json:
        print(_dump(names))
    else:
        for name, desc in names.items():
            print(f"{name:<6} {desc}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pairent", description="Average pair entanglement entropy toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_state(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--state", help="registered state name (see `states`)")
        g.add_argument("--file", type=Path, help="state JSON file")

    def add_json(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("analyze", help="entropies, spectra and mixed-state diagnostics")
    add_state(p)
    add_json(p)
    p.add_argument("--pair", help="also print the reduced density matrix of this pair, e.g. AB")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("certify", help="stationarity and local-maximum verdict")
    add_state(p)
    add_json(p)
    p.add_argument("--tol-grad", type=float, default=TOL_GRAD)
    p.add_argument("--tol-zero", type=float, default=TOL_ZERO)
    p.add_argument("--tol-neg", type=float, default=TOL_NEG)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("grad", help="projected gradient of E2")
    add_state(p)
    add_json(p)
    p.set_defaults(func=cmd_grad)

    p = sub.add_parser("hessian", help="Hessian spectrum on the sphere tangent")
    add_state(p)
    add_json(p)
    p.add_argument("--tol-zero", type=float, default=TOL_ZERO)
    p.set_defaults(func=cmd_hessian)

    p = sub.add_parser("search", help="multi-start gradient ascent")
    add_json(p)
    p.add_argument("--config", type=Path, help="JSON file with SearchConfig fields")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--n-qubits", dest="n_qubits", type=int)
    p.add_argument("--grad-tol", dest="grad_tol", type=float)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--save-best", type=Path, help="write the best state to this file")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("reproduce", help="recompute every reference value")
    add_json(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("states", help="list registered states")
    add_json(p)
    p.set_defaults(func=cmd_states)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NormError, RankDeficientError) as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (UsageError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
