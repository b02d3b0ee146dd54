"""Print the reference-value table and optionally save it as JSON.

Exits 1 when any row fails.
"""

import argparse
import json
from pathlib import Path

from pairent.reproduce import REPRO_SEED, failed, format_table, rows_to_dicts, run_checks


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=REPRO_SEED)
    parser.add_argument("--out", type=Path)
    args = parser.parse_args(argv)
    rows = run_checks(args.seed)
    print(format_table(rows))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(rows_to_dicts(rows), indent=2, sort_keys=True))
    return 1 if failed(rows) else 0


if __name__ == "__main__":
    raise SystemExit(main())
