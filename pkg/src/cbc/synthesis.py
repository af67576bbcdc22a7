"""Data-driven CBC synthesis: Gram program for (Z, H), inversion to P, level sets, controller."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import LiftedData, TrajectoryData, TransformMap, check_persistency
from .poly import Polynomial, PolyMatrix, mono_text, parse_monomial
from .sdp import SdpSolution, SolverOptions, min_eigenvalue, solve
from .sos import ExprMatrix, compile, new_program

DEFAULT_EPSILON = 1e-6
DEFAULT_GAP_FACTOR = 1e-3


class SynthesisError(RuntimeError):
    """Base class; ``exit_code`` follows the CLI contract."""

    exit_code = 1


class RankConditionError(SynthesisError):
    pass


class InfeasibleError(SynthesisError):
    pass


class SolverFailure(SynthesisError):
    exit_code = 3


class ConditioningError(SynthesisError):
    exit_code = 3


class LevelGapError(SynthesisError):
    def __init__(self, msg, alpha1=np.nan, alpha2=np.nan):
        super().__init__(msg)
        self.alpha1 = alpha1
        self.alpha2 = alpha2


# sets


@dataclass(frozen=True)
class Box:
    lower: tuple
    upper: tuple

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ValueError("box bounds must be non-empty and of equal length")
        for a, b in zip(self.lower, self.upper):
            if not a < b:
                raise ValueError(f"box side [{a}, {b}] is empty")

    @classmethod
    def from_sides(cls, sides: Sequence[Sequence[float]]) -> "Box":
        return cls(tuple(float(s[0]) for s in sides), tuple(float(s[1]) for s in sides))

    @property
    def n(self) -> int:
        return len(self.lower)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all((pts >= np.array(self.lower)) & (pts <= np.array(self.upper)), axis=1)

    def inequalities(self) -> list:
        n = self.n
        out = []
        for i, (a, b) in enumerate(zip(self.lower, self.upper)):
            xi = Polynomial.var(i, n)
            out.append((xi - a) * (b - xi))
        return out

    def grid(self, density: int) -> np.ndarray:
        axes = [np.linspace(a, b, density) for a, b in zip(self.lower, self.upper)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(count, self.n))

    def overlaps(self, other: "Box") -> bool:
        return all(a1 <= b2 and a2 <= b1 for a1, b1, a2, b2 in zip(self.lower, self.upper, other.lower, other.upper))


@dataclass(frozen=True)
class SemiAlgebraicSet:
    """Union of axis-aligned boxes."""

    boxes: tuple

    def __post_init__(self):
        if not self.boxes:
            raise ValueError("a set needs at least one box")
        if len({b.n for b in self.boxes}) != 1:
            raise ValueError("all boxes must have the same dimension")

    @classmethod
    def from_boxes(cls, boxes: Sequence[Sequence[Sequence[float]]]) -> "SemiAlgebraicSet":
        return cls(tuple(Box.from_sides(b) for b in boxes))

    @property
    def n(self) -> int:
        return self.boxes[0].n

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.any([b.contains(pts) for b in self.boxes], axis=0)

    def to_list(self) -> list:
        return [[[a, b] for a, b in zip(bx.lower, bx.upper)] for bx in self.boxes]


def box_to_inequalities(s: SemiAlgebraicSet) -> list:
    """One polynomial vector (x_i - a_i)(b_i - x_i), i = 1..n, per box."""
    if not s.boxes:
        raise ValueError("empty box list")
    return [b.inequalities() for b in s.boxes]


# step 3: Gram program for (Z, H)


@dataclass
class GramResult:
    Z: np.ndarray
    H: PolyMatrix
    multipliers: list
    sdp: SdpSolution
    n_rows: int
    block_dims: tuple


def _sum_products(mults, ineqs):
    total = mults[0] * ineqs[0]
    for lam, g in zip(mults[1:], ineqs[1:]):
        total = total + lam * g
    return total


def synthesize_gram(
    lift: LiftedData,
    traj: TrajectoryData,
    theta: TransformMap,
    X: SemiAlgebraicSet,
    degH: int,
    epsilon: float = DEFAULT_EPSILON,
    deg_lambda: int = 2,
    opts: SolverOptions | None = None,
    fixed_Z: np.ndarray | None = None,
    h_basis: np.ndarray | None = None,
) -> GramResult:
    """Solve  M_- H(x) = Theta(x) Z  and  [[Z, X_+ H],[*, Z]] - (Lambda^T g) I  matrix-SOS.

    The program is homogeneous in (Z, H, Lambda, epsilon), so it is solved with
    epsilon = 1 and the solution scaled back; this keeps the SDP data O(1).
    With ``fixed_Z`` only H and the multipliers are searched for (again at
    unit scale, Z / ||Z||).  ``h_basis`` (T x r) restricts H to its column
    span, H = h_basis W(x).
    """
    rank = check_persistency(lift)
    if not rank.passed:
        raise RankConditionError(f"rank condition fails: {rank.summary()}")
    if len(X.boxes) != 1:
        raise ValueError("the state set must be a single box")
    n, T = traj.n, traj.T
    opts = opts or SolverOptions()

    prog = new_program(n)
    if fixed_Z is None:
        Zexpr = prog.add_sym_var(n, "Z")
        scale = epsilon
    else:
        scale = float(np.linalg.norm(fixed_Z, 2))
        Zexpr = ExprMatrix.lift(np.asarray(fixed_Z, dtype=float) / scale, n)
    if h_basis is None:
        H = prog.add_poly_var(degH, (T, n), "H")
    else:
        H = np.asarray(h_basis, dtype=float) @ prog.add_poly_var(degH, (h_basis.shape[1], n), "W")
    prog.add_equality(lift.M_minus @ H, ExprMatrix.lift(theta.theta, n) @ Zexpr, "data-identity")
    g = box_to_inequalities(X)[0]
    lams = prog.add_sos_vector(len(g), deg_lambda, "lambda")
    lam_g = _sum_products(lams, g)
    XH = traj.X_plus @ H
    blk = ExprMatrix.block([[Zexpr, XH], [XH.T(), Zexpr]])
    shift = ExprMatrix([[lam_g if i == j else lam_g * 0.0 for j in range(2 * n)] for i in range(2 * n)], n)
    prog.add_matrix_sos(blk - shift, "decrease-lmi")
    if fixed_Z is None:
        prog.add_matrix_sos(Zexpr - np.eye(n), "Z-lower-bound")
        trace = Zexpr[0, 0]
        for i in range(1, n):
            trace = trace + Zexpr[i, i]
        prog.minimize(trace)
    sdp = compile(prog)
    sol = solve(sdp, opts)
    if sol.status == "infeasible":
        raise InfeasibleError(
            f"Gram program infeasible at degH={degH}, multiplier degree={deg_lambda}; "
            "try a larger degH or multiplier degree"
        )
    if not sol.ok:
        raise SolverFailure(f"Gram program: solver returned {sol.status} ({sol.message})")
    vals = sdp.scalar_values(sol.free, sol.blocks)
    Z = Zexpr.value(vals).eval(np.zeros(n)) * scale
    Z = 0.5 * (Z + Z.T)
    Hval = H.value(vals).scale(scale)
    mults = [lam.value(vals) * scale for lam in lams]
    return GramResult(Z=Z, H=Hval, multipliers=mults, sdp=sol, n_rows=sdp.n_rows, block_dims=sdp.block_dims)


def invert_Z(Z: np.ndarray, epsilon: float | None = None) -> np.ndarray:
    Z = np.asarray(Z, dtype=float)
    lo = min_eigenvalue(Z, tol=1e-10 * max(1.0, float(np.max(np.abs(Z)))))
    if epsilon is not None and lo < epsilon / 2:
        raise ConditioningError(f"min eigenvalue of Z ({lo:.3g}) below epsilon/2")
    if lo <= 0:
        raise ConditioningError("Z is not positive definite")
    ev = np.linalg.eigvalsh(Z)
    if ev[-1] / ev[0] > 1e12:
        raise ConditioningError(f"Z condition number {ev[-1] / ev[0]:.3g} exceeds 1e12")
    P = np.linalg.inv(Z)
    P = 0.5 * (P + P.T)
    resid = np.max(np.abs(P @ Z - np.eye(len(Z))))
    if resid > 1e-8:
        raise ConditioningError(f"P Z - I residual {resid:.3g} exceeds 1e-8")
    return P


# step 4: level sets


@dataclass
class LevelResult:
    alpha1: float
    alpha2: float
    delta: float
    multipliers0: list
    multipliers_u: list
    sdp_status: tuple


def _level_program(Pn, boxes, deg_lambda, upper: bool, opts):
    n = Pn.shape[0]
    prog = new_program(n)
    alpha = prog.add_scalar_var("alpha")
    B = Polynomial.quadratic_form(Pn)
    mults = []
    for k, box in enumerate(boxes):
        g = box.inequalities()
        lams = prog.add_sos_vector(len(g), deg_lambda, f"lambda{k}")
        lam_g = _sum_products(lams, g)
        if upper:
            prog.add_sos(alpha - B - lam_g, f"upper{k}")
        else:
            prog.add_sos(B - lam_g - alpha, f"lower{k}")
        mults.append(lams)
    if upper:
        prog.minimize(alpha)
    else:
        prog.maximize(alpha)
    sdp = compile(prog)
    sol = solve(sdp, opts)
    if sol.status == "infeasible":
        raise InfeasibleError("level-set program infeasible")
    if not sol.ok:
        raise SolverFailure(f"level-set program: solver returned {sol.status} ({sol.message})")
    vals = sdp.scalar_values(sol.free, sol.blocks)
    return alpha.value(vals).coeff((0,) * n), [[lam.value(vals) for lam in lams] for lams in mults], sol.status


def compute_levels(
    P: np.ndarray,
    X0: SemiAlgebraicSet,
    Xu: SemiAlgebraicSet,
    deg_lambda: int = 2,
    delta: float | None = None,
    opts: SolverOptions | None = None,
) -> LevelResult:
    """Smallest SOS-certified alpha1 >= B on X0 and largest alpha2 <= B on every box of Xu.

    ``delta`` defaults to 1e-3 * alpha1.  The programs run on P / ||P|| and
    the levels are scaled back.
    """
    opts = opts or SolverOptions()
    P = np.asarray(P, dtype=float)
    s = float(np.linalg.norm(P, 2))
    Pn = P / s
    a1, m0, st1 = _level_program(Pn, X0.boxes, deg_lambda, True, opts)
    a2, mu, st2 = _level_program(Pn, Xu.boxes, deg_lambda, False, opts)
    alpha1, alpha2 = a1 * s, a2 * s
    gap = DEFAULT_GAP_FACTOR * alpha1 if delta is None else float(delta)
    m0 = [[lam * s for lam in box] for box in m0]
    mu = [[lam * s for lam in box] for box in mu]
    if not alpha2 >= alpha1 + gap:
        raise LevelGapError(f"level gap fails: alpha2={alpha2:.6g} < alpha1 + delta = {alpha1 + gap:.6g}", alpha1,
                            alpha2)
    return LevelResult(alpha1=alpha1, alpha2=alpha2, delta=gap, multipliers0=m0, multipliers_u=mu,
                       sdp_status=(st1, st2))


# controller


@dataclass(frozen=True)
class Controller:
    gain: PolyMatrix  # m x n, u = gain(x) x
    u: tuple  # of Polynomial


def extract_controller(U_minus: np.ndarray, H: PolyMatrix, P: np.ndarray) -> Controller:
    n = P.shape[0]
    F = (np.asarray(U_minus) @ H) @ np.asarray(P)
    xcol = PolyMatrix([[Polynomial.var(i, n)] for i in range(n)], n)
    u = F @ xcol
    return Controller(gain=F, u=tuple(u.entries[i][0] for i in range(u.rows)))


# solution record


def _mat(A) -> list:
    return [[float(v) for v in row] for row in np.atleast_2d(A)]


def _polymatrix_to_dict(M: PolyMatrix, names=None) -> dict:
    return {mono_text(m, names): _mat(C) for m, C in M.coeffs().items()}


def _polymatrix_from_dict(d: dict, shape, nvars: int) -> PolyMatrix:
    coeffs = {parse_monomial(k, nvars): np.array(v, dtype=float) for k, v in d.items()}
    if not coeffs:
        return PolyMatrix.zeros(shape[0], shape[1], nvars)
    return PolyMatrix.from_coeffs(coeffs, nvars)


@dataclass
class CbcSolution:
    P: np.ndarray
    Z: np.ndarray
    H: PolyMatrix
    alpha1: float
    alpha2: float
    delta: float
    controller: Controller
    multipliers: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def barrier(self) -> Polynomial:
        return Polynomial.quadratic_form(self.P)

    @property
    def gain(self) -> PolyMatrix:
        return self.controller.gain

    def barrier_values(self, points) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.einsum("ij,jk,ik->i", pts, self.P, pts)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "P": _mat(self.P),
            "Z": _mat(self.Z),
            "alpha1": float(self.alpha1),
            "alpha2": float(self.alpha2),
            "delta": float(self.delta),
            "barrier": self.barrier.to_text(),
            "controller": [u.to_text() for u in self.controller.u],
            "H_shape": list(self.H.shape),
            "H": _polymatrix_to_dict(self.H),
            "gain": _polymatrix_to_dict(self.controller.gain),
            "multipliers": {k: [[p.to_text() for p in box] for box in v] for k, v in self.multipliers.items()},
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict, U_minus: np.ndarray) -> "CbcSolution":
        n = int(d["n"])
        P = np.array(d["P"], dtype=float)
        H = _polymatrix_from_dict(d["H"], d["H_shape"], n)
        return cls(P=P, Z=np.array(d["Z"], dtype=float), H=H, alpha1=float(d["alpha1"]),
                   alpha2=float(d["alpha2"]), delta=float(d["delta"]), controller=extract_controller(U_minus, H, P),
                   metadata=dict(d.get("metadata", {})))
