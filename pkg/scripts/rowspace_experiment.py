"""Restrict H to the row space of [M_-; U_-].

Components of H in the null space of [M_-; U_-] leave the identified model's
closed loop unchanged but still move X+ H(x) P x when the data are rounded.
This script checks whether the Gram program stays feasible without them.
"""
import argparse
from pathlib import Path

import numpy as np

from cbc.config import parse_config
from cbc.pipeline import prepare
from cbc.synthesis import SynthesisError, synthesize_gram

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("cases", nargs="*", default=["jet", "lorenz"])
    args = ap.parse_args()
    for case in args.cases:
        cfg = parse_config(ROOT / "configs" / f"{case}.toml")
        prep = prepare(cfg)
        stack = np.vstack([prep.lift.M_minus, prep.traj.U_minus])
        Q, _ = np.linalg.qr(stack.T)
        s = cfg.synthesis
        try:
            g = synthesize_gram(prep.lift, prep.traj, prep.theta, cfg.state_set(), cfg.degH, s.epsilon,
                                s.deg_lambda, cfg.solver_options(), h_basis=Q)
            print(f"{case}: feasible, eig(Z) = {np.linalg.eigvalsh(g.Z)}")
        except SynthesisError as exc:
            print(f"{case}: {type(exc).__name__}: {exc}")


if __name__ == "__main__":
    main()
