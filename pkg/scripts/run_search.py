"""Multi-start ascent of E2 from Haar-random starts.

Usage: python scripts/run_search.py [--config cfg.json] [--out results/search.json] [--jobs 4]
"""

import argparse
import json
import logging
from pathlib import Path

from pairent.qcore import save_state
from pairent.search import M4_E2, SearchConfig, multistart


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, help="JSON file with SearchConfig fields")
    parser.add_argument("--out", type=Path, default=Path("results/search.json"))
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    cfg = SearchConfig.from_dict(json.loads(args.config.read_text())) if args.config else SearchConfig()
    result = multistart(cfg, jobs=args.jobs)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(result.to_json())
    save_state(result.best_state, args.out.with_suffix(".best.json"))

    finals = sorted((r.final_e2 for r in result.records), reverse=True)
    print(f"restarts {cfg.restarts}, seed {cfg.seed}, n = {cfg.n_qubits}")
    print(f"best E2 {result.best_e2:.12f} at restart {result.best_restart}")
    if cfg.n_qubits == 4:
        print(f"M4 value {M4_E2:.12f}; gap {M4_E2 - result.best_e2:.2e}")
    print("clusters (value, count):")
    for c in result.clusters:
        print(f"  {c['e2']:.9f}  {c['count']}")
    print(f"top five finals: {', '.join(f'{v:.9f}' for v in finals[:5])}")
    print(f"wrote {args.out}")
    return 1 if result.exceeds_m4 else 0


if __name__ == "__main__":
    raise SystemExit(main())
