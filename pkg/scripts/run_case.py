"""Run the full pipeline on one or more bundled cases and print the verification summary.

    python3 scripts/run_case.py jet lorenz [--out DIR]
"""
import argparse
import logging
from pathlib import Path

from cbc.config import parse_config
from cbc.pipeline import run_pipeline

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("cases", nargs="+", choices=("jet", "lorenz"))
    ap.add_argument("--out", type=Path, help="parent directory for outputs")
    ap.add_argument("-v", action="store_true", help="log pipeline stages")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.v else logging.WARNING)
    for case in args.cases:
        cfg = parse_config(ROOT / "configs" / f"{case}.toml")
        if args.out:
            cfg = cfg.with_overrides(out_dir=args.out / case)
        res = run_pipeline(cfg)
        sol = res.solution
        print(f"== {case}: alpha1={sol.alpha1:.6g} alpha2={sol.alpha2:.6g} delta={sol.delta:.3g}")
        print(f"P =\n{sol.P}")
        print(res.report.summary())


if __name__ == "__main__":
    main()
