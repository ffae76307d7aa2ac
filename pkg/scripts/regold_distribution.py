import argparse
import os
import sys

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT_DIR not in sys.path:
    sys.path.insert(0, ROOT_DIR)

from app.services.deck import load_paytable
from app.services.distribution import build_distribution, write_distribution_csv
from app.services.expect import load_or_build_memo, solve_all


def regold(paytable: str, output: str, workers: int) -> int:
    table = load_paytable(paytable)
    results = solve_all(table, "fast", memo=load_or_build_memo(table), workers=workers)
    d = build_distribution(results)
    write_distribution_csv(d, output, compact=True)
    print(f"{table.name}: {len(d)} distinct values -> {output}")
    return len(d)


def main() -> None:
    parser = argparse.ArgumentParser(description="Rewrite the golden CE distribution CSV from a fresh solve")
    parser.add_argument("--paytable", default="jacks_or_better_9_6", help="built-in name or file path")
    parser.add_argument(
        "--output",
        default=os.path.join(ROOT_DIR, "tests", "data", "jacks_or_better_9_6_distribution.csv"),
        help="destination CSV",
    )
    parser.add_argument("--workers", type=int, default=1, help="worker processes")
    args = parser.parse_args()
    regold(args.paytable, args.output, args.workers)


if __name__ == "__main__":
    main()
