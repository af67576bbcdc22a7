"""Same known system, exact vs 4-significant-digit data: does the oracle tier survive rounding?

The certificate is built from data only.  The oracle simulates the least-squares
model, so it agrees with the data-based closed loop X+ H(x) P x only when the
data are exactly consistent with a model in the span of the basis.
"""
import argparse

import numpy as np

from cbc.data import MonomialBasis, TrajectoryData, build_lifted_matrix, build_transform
from cbc.synthesis import CbcSolution, SemiAlgebraicSet, compute_levels, extract_controller, invert_Z, synthesize_gram
from cbc.verify import VerifySettings, verify


def record(A, B, basis, x0, u):
    x = np.zeros((len(x0), u.shape[1] + 1))
    x[:, 0] = x0
    for k in range(u.shape[1]):
        x[:, k + 1] = A @ basis.eval(x[:, k][None])[0] + B @ u[:, k]
    return x


def certify(x, u, basis, sets, settings):
    traj = TrajectoryData.from_states(x, u)
    lift, theta = build_lifted_matrix(traj, basis), build_transform(basis)
    X, X0, Xu = sets
    g = synthesize_gram(lift, traj, theta, X, 1)
    P = invert_Z(g.Z, 1e-6)
    lv = compute_levels(P, X0, Xu)
    sol = CbcSolution(P=P, Z=g.Z, H=g.H, alpha1=lv.alpha1, alpha2=lv.alpha2, delta=lv.delta,
                      controller=extract_controller(traj.U_minus, g.H, P))
    return verify(sol, traj, lift, theta, X, X0, Xu, settings)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--digits", type=int, default=4)
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--T", type=int, default=8)
    args = ap.parse_args()
    basis = MonomialBasis.parse(["x1", "x2", "x1^2"], 2)
    A = np.array([[1.0, 0.1, 0.0], [0.0, 1.0, 0.1]])
    B = np.array([[0.0], [0.1]])
    rng = np.random.default_rng(args.seed)
    u = rng.uniform(-1, 1, (1, args.T))
    x = record(A, B, basis, np.array([0.3, -0.2]), u)
    sets = (SemiAlgebraicSet.from_boxes([[[-1, 1], [-1, 1]]]),
            SemiAlgebraicSet.from_boxes([[[-0.1, 0.1], [-0.1, 0.1]]]),
            SemiAlgebraicSet.from_boxes([[[0.7, 1], [0.7, 1]]]))
    settings = VerifySettings(rollouts=50, horizon=50)
    rnd = np.vectorize(lambda v: float(f"{v:.{args.digits}g}"))
    for label, xs, us in (("exact", x, u), (f"rounded to {args.digits} digits", rnd(x), rnd(u))):
        print(f"== {label}")
        print(certify(xs, us, basis, sets, settings).summary())


if __name__ == "__main__":
    main()
