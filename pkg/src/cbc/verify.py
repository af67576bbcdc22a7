"""Independent checks of a synthesized certificate.

Two tiers are reported separately:

* certificate tier: algebraic and spectral checks of the SOS certificate and
  dense-grid evidence for the level conditions (grids are evidence, not proofs);
* oracle tier: a least-squares model identified from the same trajectory is
  used as a stand-in for the unknown plant to simulate closed-loop rollouts.
  It is a test oracle only and never feeds back into synthesis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import LiftedData, MonomialBasis, TrajectoryData, TransformMap, numeric_rank
from .synthesis import CbcSolution, SemiAlgebraicSet

GRID_DENSITY = {2: 201, 3: 61}
DIVERGENCE_NORM = 1e6
EXACT_TOL = 1e-7
QUANTIZED_TOL = 1e-2


class OracleUnavailable(ValueError):
    pass


@dataclass(frozen=True)
class IdentifiedModel:
    A_hat: np.ndarray  # n x M
    B_hat: np.ndarray  # n x m
    residual: float
    relative_residual: float
    basis: MonomialBasis

    @property
    def exact(self) -> bool:
        return self.relative_residual <= 1e-6

    def step(self, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """Batched: x (N, n), u (N, m) -> (N, n)."""
        return self.basis.eval(x) @ self.A_hat.T + np.atleast_2d(u) @ self.B_hat.T


def identify_model(lift: LiftedData, traj: TrajectoryData, basis: MonomialBasis) -> IdentifiedModel:
    stack = np.vstack([lift.M_minus, traj.U_minus])
    rows = stack.shape[0]
    # rows mix monomial values and raw inputs; equilibrate before the rank test
    norms = np.linalg.norm(stack, axis=1, keepdims=True)
    rank, _ = numeric_rank(stack / np.where(norms > 0, norms, 1.0))
    if rows > traj.T or rank < rows:
        raise OracleUnavailable(f"[M_-; U_-] is {rows}x{traj.T} with rank {rank}; need full row rank")
    AB = np.linalg.lstsq(stack.T, traj.X_plus.T, rcond=None)[0].T
    M = lift.M_minus.shape[0]
    res = float(np.linalg.norm(traj.X_plus - AB @ stack))
    return IdentifiedModel(A_hat=AB[:, :M], B_hat=AB[:, M:], residual=res,
                           relative_residual=res / max(float(np.linalg.norm(traj.X_plus)), 1e-300), basis=basis)


# closed-loop representation


def gain_values(sol: CbcSolution, points: np.ndarray) -> np.ndarray:
    """H(z) for each point: (N, T, n)."""
    return sol.H.eval_many(np.atleast_2d(points))


def closed_loop_many(sol: CbcSolution, traj: TrajectoryData, points: np.ndarray) -> np.ndarray:
    """x+ = X_+ H(x) P x for each row of ``points``."""
    pts = np.atleast_2d(points)
    Hz = gain_values(sol, pts)
    Px = pts @ sol.P.T
    return np.einsum("it,ntj,nj->ni", traj.X_plus, Hz, Px)


def closed_loop_step(x, sol: CbcSolution, traj: TrajectoryData) -> np.ndarray:
    return closed_loop_many(sol, traj, np.asarray(x, dtype=float)[None, :])[0]


def controller_values(sol: CbcSolution, traj: TrajectoryData, points: np.ndarray) -> np.ndarray:
    """u(x) = U_- H(x) P x, (N, m)."""
    pts = np.atleast_2d(points)
    Hz = gain_values(sol, pts)
    return np.einsum("it,ntj,nj->ni", traj.U_minus, Hz, pts @ sol.P.T)


# individual checks


def _check(passed, value, tolerance, **extra) -> dict:
    out = {"passed": bool(passed), "value": float(value), "tolerance": float(tolerance)}
    for k, v in extra.items():
        out[k] = v.tolist() if isinstance(v, np.ndarray) else v
    return out


def data_identity_residual(sol: CbcSolution, lift: LiftedData, theta: TransformMap) -> float:
    """Largest coefficient of M_- H(x) - Theta(x) Z, computed without coefficient cleanup."""
    hc = sol.H.coeffs()
    tc = theta.theta.coeffs()
    worst = 0.0
    for mono in set(hc) | set(tc):
        lhs = lift.M_minus @ hc[mono] if mono in hc else 0.0
        rhs = tc[mono] @ sol.Z if mono in tc else 0.0
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def lmi_blocks(sol: CbcSolution, traj: TrajectoryData, points: np.ndarray) -> np.ndarray:
    """[[Z, X_+ H(z)], [*, Z]] for each point, (N, 2n, 2n)."""
    XH = np.einsum("it,ntj->nij", traj.X_plus, gain_values(sol, points))
    N, n = XH.shape[0], sol.n
    out = np.empty((N, 2 * n, 2 * n))
    out[:, :n, :n] = sol.Z
    out[:, n:, n:] = sol.Z
    out[:, :n, n:] = XH
    out[:, n:, :n] = np.transpose(XH, (0, 2, 1))
    return out


def _min_eigs(mats: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(0.5 * (mats + np.transpose(mats, (0, 2, 1))))[:, 0]


def grid_check(sol: CbcSolution, X0: SemiAlgebraicSet, Xu: SemiAlgebraicSet, X: SemiAlgebraicSet | None,
               traj: TrajectoryData | None, density: int | None = None, chunk: int = 20000) -> dict:
    """Extremes of B on X0 / Xu grids and the LMI minimum eigenvalue on the X grid."""
    n = sol.n
    density = density or GRID_DENSITY.get(n, 21)
    if density < 2:
        raise ValueError("grid density must be at least 2 per axis")
    out = {"density": density}
    g0 = np.vstack([b.grid(density) for b in X0.boxes])
    v0 = sol.barrier_values(g0)
    i0 = int(np.argmax(v0))
    out["b_max_initial"], out["b_max_initial_at"] = float(v0[i0]), g0[i0].tolist()
    gu = np.vstack([b.grid(density) for b in Xu.boxes])
    vu = sol.barrier_values(gu)
    iu = int(np.argmin(vu))
    out["b_min_unsafe"], out["b_min_unsafe_at"] = float(vu[iu]), gu[iu].tolist()
    if X is not None and traj is not None:
        gx = X.boxes[0].grid(density)
        worst, where = np.inf, None
        for s in range(0, len(gx), chunk):
            ev = _min_eigs(lmi_blocks(sol, traj, gx[s : s + chunk]))
            k = int(np.argmin(ev))
            if ev[k] < worst:
                worst, where = float(ev[k]), gx[s + k].tolist()
        out["lmi_min_eig"], out["lmi_min_eig_at"] = worst, where
    return out


def theta_pinv_check(sol: CbcSolution, lift: LiftedData, theta: TransformMap, points: np.ndarray) -> float:
    """max ||[Theta^+(z) M_- H(z)]^{-1} - P|| / ||P|| over points with full-column-rank Theta(z)."""
    Pn = float(np.linalg.norm(sol.P, 2))
    worst = 0.0
    Th = theta.theta.eval_many(points)
    Hz = gain_values(sol, points)
    for k in range(len(points)):
        if np.linalg.matrix_rank(Th[k]) < sol.n:
            continue
        Q = np.linalg.pinv(Th[k]) @ lift.M_minus @ Hz[k]
        worst = max(worst, float(np.linalg.norm(np.linalg.inv(Q) - sol.P, 2)) / Pn)
    return worst


# rollouts


@dataclass
class RolloutResult:
    trajectories: list  # each (K+1, n) array (shorter if diverged)
    unsafe_entries: int
    unsafe_first: list
    monotonicity_violations: int
    worst_increase: float
    diverged: int
    tolerance: float


def simulate(sol: CbcSolution, model: IdentifiedModel, traj: TrajectoryData, x0_samples: np.ndarray, K: int,
             Xu: SemiAlgebraicSet, rel_tol: float = EXACT_TOL) -> RolloutResult:
    """Roll out x(k+1) = A_hat M(x) + B_hat u(x) and flag unsafe entries and B increases."""
    x = np.atleast_2d(np.asarray(x0_samples, dtype=float)).copy()
    N = x.shape[0]
    hist = [x.copy()]
    alive = np.ones(N, dtype=bool)
    stop = np.full(N, K)
    unsafe = Xu.contains(x) if N else np.zeros(0, dtype=bool)
    unsafe_first = [[i, 0] for i in np.flatnonzero(unsafe)]
    b_prev = sol.barrier_values(x) if N else np.zeros(0)
    violations = np.zeros(N, dtype=int)
    worst = 0.0
    for k in range(1, K + 1):
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        u = controller_values(sol, traj, x[idx])
        with np.errstate(over="ignore", invalid="ignore"):
            xn = model.step(x[idx], u)
        bad = ~np.all(np.isfinite(xn), axis=1) | (np.linalg.norm(np.nan_to_num(xn, nan=np.inf), axis=1) > DIVERGENCE_NORM)
        x[idx] = np.where(bad[:, None], np.nan, xn)
        stop[idx[bad]] = k - 1
        alive[idx[bad]] = False
        ok = idx[~bad]
        b_new = sol.barrier_values(x[ok])
        incr = b_new - b_prev[ok]
        slack = rel_tol * np.maximum(1.0, b_prev[ok])
        viol = incr > slack
        violations[ok[viol]] += 1
        if viol.any():
            worst = max(worst, float(np.max(incr[viol] / np.maximum(1.0, b_prev[ok][viol]))))
        b_prev[ok] = b_new
        hit = Xu.contains(x[ok]) & ~unsafe[ok]
        for i in ok[hit]:
            unsafe_first.append([int(i), k])
        unsafe[ok] |= Xu.contains(x[ok])
        hist.append(x.copy())
    H = np.stack(hist, axis=1) if N else np.zeros((0, 1, sol.n))
    trajs = [H[i, : stop[i] + 1] for i in range(N)]
    return RolloutResult(trajectories=trajs, unsafe_entries=int(unsafe.sum()), unsafe_first=sorted(unsafe_first),
                         monotonicity_violations=int((violations > 0).sum()), worst_increase=worst,
                         diverged=int((~alive).sum()), tolerance=rel_tol)


# report


@dataclass
class VerifySettings:
    density: int | None = None
    samples: int = 500
    theta_samples: int = 50
    rollouts: int = 100
    horizon: int = 100
    seed: int = 0
    level_rtol: float = 1e-6
    lmi_tol: float = 1e-6
    schur_tol: float = 1e-5
    identity_tol: float = 1e-6
    theta_tol: float = 1e-5
    decrease_tol: float = 1e-7


@dataclass
class VerificationReport:
    certificate: dict
    oracle: dict
    passed: bool
    rollouts: RolloutResult | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "certificate_tier": self.certificate, "oracle_tier": self.oracle}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def failed_checks(self) -> list:
        out = [f"certificate.{k}" for k, v in self.certificate["checks"].items() if not v["passed"]]
        out += [f"oracle.{k}" for k, v in self.oracle.get("checks", {}).items() if not v["passed"]]
        return out

    def summary(self) -> str:
        lines = [f"verification: {'PASS' if self.passed else 'FAIL'}",
                 f"  [{self.certificate['label']}] {'PASS' if self.certificate['passed'] else 'FAIL'}"]
        for k, v in self.certificate["checks"].items():
            lines.append(f"    {k:<24} {'ok ' if v['passed'] else 'BAD'} value={v['value']:.6g} tol={v['tolerance']:.3g}")
        lines.append(f"  [{self.oracle['label']}] "
                     + ("unavailable" if not self.oracle["available"] else ("PASS" if self.oracle["passed"] else "FAIL")))
        for k, v in self.oracle.get("checks", {}).items():
            lines.append(f"    {k:<24} {'ok ' if v['passed'] else 'BAD'} value={v['value']:.6g} tol={v['tolerance']:.3g}")
        if self.oracle.get("note"):
            lines.append(f"    note: {self.oracle['note']}")
        return "\n".join(lines)


def _sample(X: SemiAlgebraicSet, rng, count) -> np.ndarray:
    return X.boxes[0].sample(rng, count)


def certificate_checks(sol: CbcSolution, traj: TrajectoryData, lift: LiftedData, theta: TransformMap,
                       X: SemiAlgebraicSet, X0: SemiAlgebraicSet, Xu: SemiAlgebraicSet,
                       s: VerifySettings) -> dict:
    rng = np.random.default_rng(s.seed)
    checks = {}
    zn = float(np.linalg.norm(sol.Z, 2))
    p_min = float(np.linalg.eigvalsh(sol.P)[0])
    checks["positivity"] = _check(p_min > 0, p_min, 0.0)
    inv_res = float(np.max(np.abs(sol.P @ sol.Z - np.eye(sol.n))))
    checks["inverse"] = _check(inv_res <= 1e-8, inv_res, 1e-8)
    eq = data_identity_residual(sol, lift, theta)
    checks["data_identity"] = _check(eq <= s.identity_tol and eq <= s.identity_tol * zn, eq, s.identity_tol,
                                     relative=eq / zn)
    zt = _sample(X, rng, s.theta_samples)
    tp = theta_pinv_check(sol, lift, theta, zt)
    checks["theta_pinv_identity"] = _check(tp <= s.theta_tol, tp, s.theta_tol)

    grid = grid_check(sol, X0, Xu, X, traj, s.density)
    lmi = grid["lmi_min_eig"]
    checks["lmi_grid"] = _check(lmi >= -s.lmi_tol and lmi >= -s.lmi_tol * zn, lmi, s.lmi_tol,
                                relative=lmi / zn, at=grid["lmi_min_eig_at"], density=grid["density"])

    z = _sample(X, rng, s.samples)
    blocks = _min_eigs(lmi_blocks(sol, traj, z))
    XH = np.einsum("it,ntj->nij", traj.X_plus, gain_values(sol, z))
    schur = _min_eigs(sol.Z[None] - np.transpose(XH, (0, 2, 1)) @ sol.P @ XH)
    agree = bool(np.all((blocks >= -s.lmi_tol * zn) == (schur >= -s.schur_tol * zn)))
    sm = float(schur.min())
    checks["schur_complement"] = _check(sm >= -s.schur_tol and sm >= -s.schur_tol * zn and agree, sm, s.schur_tol,
                                        relative=sm / zn, forms_agree=agree)

    xp = closed_loop_many(sol, traj, z)
    b0, b1 = sol.barrier_values(z), sol.barrier_values(xp)
    slack = b1 - b0 - s.decrease_tol * (1.0 + b0)
    k = int(np.argmax(slack))
    checks["decrease"] = _check(slack[k] <= 0, float(np.max((b1 - b0) / (1.0 + b0))), s.decrease_tol,
                                at=z[k].tolist())

    a1, a2 = sol.alpha1, sol.alpha2
    checks["initial_level"] = _check(grid["b_max_initial"] <= a1 * (1 + s.level_rtol), grid["b_max_initial"],
                                     s.level_rtol, alpha1=a1, at=grid["b_max_initial_at"])
    checks["unsafe_level"] = _check(grid["b_min_unsafe"] >= a2 * (1 - s.level_rtol), grid["b_min_unsafe"],
                                    s.level_rtol, alpha2=a2, at=grid["b_min_unsafe_at"])
    checks["level_gap"] = _check(a2 >= a1 + sol.delta, a2 - a1, sol.delta)
    return {
        "label": "certificate tier: SOS certificate, spectral and grid checks (grid = evidence, not proof)",
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }


def oracle_checks(sol: CbcSolution, traj: TrajectoryData, lift: LiftedData, basis: MonomialBasis,
                  X: SemiAlgebraicSet, X0: SemiAlgebraicSet, Xu: SemiAlgebraicSet,
                  s: VerifySettings) -> tuple:
    label = "oracle tier: least-squares model identified from the same trajectory (test oracle only)"
    try:
        model = identify_model(lift, traj, basis)
    except OracleUnavailable as exc:
        return {"label": label, "available": False, "passed": True, "note": str(exc), "checks": {}}, None
    rng = np.random.default_rng(s.seed + 1)
    quantized = not model.exact
    consist_tol = 1e-5 if not quantized else QUANTIZED_TOL
    roll_tol = EXACT_TOL if not quantized else QUANTIZED_TOL
    checks = {}
    checks["identification_residual"] = _check(True, model.relative_residual, 1e-6, informational=True)
    z = _sample(X, rng, s.samples)
    lhs = model.step(z, controller_values(sol, traj, z))
    rhs = closed_loop_many(sol, traj, z)
    err = np.linalg.norm(lhs - rhs, axis=1) / (1.0 + np.linalg.norm(z, axis=1) ** 3)
    k = int(np.argmax(err))
    checks["representation_consistency"] = _check(err[k] <= consist_tol, err[k], consist_tol, at=z[k].tolist())
    x0 = np.vstack([b.sample(rng, s.rollouts) for b in X0.boxes[:1]])
    roll = simulate(sol, model, traj, x0, s.horizon, Xu, rel_tol=roll_tol)
    checks["unsafe_entries"] = _check(roll.unsafe_entries == 0, roll.unsafe_entries, 0,
                                      first=roll.unsafe_first[:5], rollouts=len(x0), horizon=s.horizon)
    checks["barrier_monotone"] = _check(roll.monotonicity_violations == 0, roll.monotonicity_violations, roll_tol,
                                        worst_relative_increase=roll.worst_increase)
    checks["bounded"] = _check(roll.diverged == 0, roll.diverged, DIVERGENCE_NORM)
    note = ""
    if quantized:
        note = (f"data reproduce the identified model only to relative residual {model.relative_residual:.3g}; "
                f"oracle tolerances widened to {QUANTIZED_TOL:g}")
    tier = {"label": label, "available": True, "quantized": quantized, "note": note, "checks": checks,
            "passed": all(c["passed"] for c in checks.values())}
    return tier, roll


def verify(sol: CbcSolution, traj: TrajectoryData, lift: LiftedData, theta: TransformMap, X: SemiAlgebraicSet,
           X0: SemiAlgebraicSet, Xu: SemiAlgebraicSet, settings: VerifySettings | None = None,
           with_oracle: bool = True) -> VerificationReport:
    s = settings or VerifySettings()
    cert = certificate_checks(sol, traj, lift, theta, X, X0, Xu, s)
    if with_oracle:
        orc, roll = oracle_checks(sol, traj, lift, theta.basis, X, X0, Xu, s)
    else:
        orc, roll = {"label": "oracle tier: skipped", "available": False, "passed": True, "checks": {}}, None
    return VerificationReport(certificate=cert, oracle=orc, passed=cert["passed"] and orc["passed"], rollouts=roll)


# plot data


def level_set_points(P: np.ndarray, alpha: float, count: int = 360) -> np.ndarray:
    """Points on {x : x^T P x = alpha}: an ellipse for n = 2, a latitude/longitude mesh for n = 3."""
    n = P.shape[0]
    L = np.linalg.cholesky(P)
    Linv_T = np.linalg.inv(L).T
    if n == 2:
        t = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        u = np.stack([np.cos(t), np.sin(t)], axis=1)
    elif n == 3:
        k = max(4, int(round(np.sqrt(count))))
        th, ph = np.meshgrid(np.linspace(0, np.pi, k), np.linspace(0, 2 * np.pi, 2 * k, endpoint=False), indexing="ij")
        u = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1).reshape(-1, 3)
    else:
        raise ValueError("level-set export supports n = 2 or 3")
    return np.sqrt(alpha) * u @ Linv_T.T


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def export_plot_data(sol: CbcSolution, report: VerificationReport | None, path, X0: SemiAlgebraicSet,
                     Xu: SemiAlgebraicSet, X: SemiAlgebraicSet | None = None) -> list:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    n = sol.n
    names = [f"x{i + 1}" for i in range(n)]
    written = []

    trajs = report.rollouts.trajectories if report is not None and report.rollouts is not None else []
    lines = [",".join(names + ["k", "traj_id"])]
    for tid, tr in enumerate(trajs):
        for k, row in enumerate(tr):
            lines.append(",".join([_fmt(v) for v in row] + [str(k), str(tid)]))
    (out / "trajectories.csv").write_text("\n".join(lines) + "\n")
    written.append(out / "trajectories.csv")

    lines = [",".join(names + ["level"])]
    curves = {}
    for name, alpha in (("alpha1", sol.alpha1), ("alpha2", sol.alpha2)):
        pts = level_set_points(sol.P, alpha)
        curves[name] = pts
        lines += [",".join([_fmt(v) for v in p] + [name]) for p in pts]
    (out / "level_sets.csv").write_text("\n".join(lines) + "\n")
    written.append(out / "level_sets.csv")

    lines = ["set,box," + ",".join(f"{v}_lo,{v}_hi" for v in names)]
    for label, S in (("initial", X0), ("unsafe", Xu)) + ((("state", X),) if X is not None else ()):
        for j, bx in enumerate(S.boxes):
            lines.append(f"{label},{j}," + ",".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(bx.lower, bx.upper)))
    (out / "sets.csv").write_text("\n".join(lines) + "\n")
    written.append(out / "sets.csv")

    if n == 2:
        svg = _svg(curves, trajs, X0, Xu, X)
        (out / "plot.svg").write_text(svg)
        written.append(out / "plot.svg")
    else:
        (out / "plot_note.txt").write_text(
            "n = 3: level sets exported as mesh samples in level_sets.csv; no SVG (would need a 2-D projection)\n")
        written.append(out / "plot_note.txt")
    return written


def _svg(curves, trajs, X0, Xu, X, size=600, pad=30) -> str:
    pts = [c for c in curves.values()] + [b for S in (X0, Xu) for b in
                                         (np.array([bx.lower, bx.upper]) for bx in S.boxes)]
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    scale = (size - 2 * pad) / span

    def tx(p):
        return pad + (p[0] - lo[0]) * scale, size - pad - (p[1] - lo[1]) * scale

    def poly(points, attrs, closed=False):
        coords = " ".join("{:.3f},{:.3f}".format(*tx(p)) for p in points if np.all(np.isfinite(p)))
        tag = "polygon" if closed else "polyline"
        return f'<{tag} points="{coords}" {attrs}/>'

    def rect(bx, fill):
        x0, y1 = tx(bx.lower)
        x1, y0 = tx(bx.upper)
        return f'<rect x="{x0:.3f}" y="{y0:.3f}" width="{x1 - x0:.3f}" height="{y1 - y0:.3f}" fill="{fill}"/>'

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
             f'<rect width="{size}" height="{size}" fill="white"/>']
    parts += [rect(bx, "#c8f0c8") for bx in X0.boxes]
    parts += [rect(bx, "#f4c4c4") for bx in Xu.boxes]
    for tr in trajs:
        parts.append(poly(tr[:, :2], 'fill="none" stroke="#555555" stroke-width="0.6"'))
    parts.append(poly(curves["alpha1"], 'fill="none" stroke="black" stroke-dasharray="6,3"', closed=True))
    parts.append(poly(curves["alpha2"], 'fill="none" stroke="blue" stroke-dasharray="6,3"', closed=True))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
