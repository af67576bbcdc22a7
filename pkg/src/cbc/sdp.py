"""Dense primal-dual interior-point solver for the block SDPs produced by ``sos.compile``.

Free variables are eliminated up front (SVD of their coefficient block), the
remaining equality rows are orthonormalized, and the PSD-only problem is
solved through the homogeneous self-dual embedding with Nesterov-Todd
scaling and a Mehrotra predictor-corrector.  The embedding lets one loop
certify optimality, primal infeasibility and unboundedness.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .sos import SdpProblem

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical-failure"

_SQRT2 = np.sqrt(2.0)
_RANK_RTOL = 1e-12


class AsymmetryError(ValueError):
    pass


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-9
    max_iter: int = 200
    backend: str = "builtin"  # or "external" (cvxpy)
    step_fraction: float = 0.99
    infeas_tol: float = 1e-8

    def __post_init__(self):
        if self.feas_tol <= 0:
            raise ValueError("feas_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.backend not in ("builtin", "external"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class SdpSolution:
    status: str
    blocks: list
    free: np.ndarray
    primal_residual: float = np.inf
    dual_residual: float = np.inf
    gap: float = np.inf
    iterations: int = 0
    objective: float = np.nan
    certificate: np.ndarray | None = field(default=None, repr=False)
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status in (OPTIMAL, FEASIBLE)

    def min_block_eig(self) -> float:
        return min((float(np.linalg.eigvalsh(B)[0]) for B in self.blocks if B.size), default=np.inf)


def min_eigenvalue(M, tol: float = 1e-10) -> float:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise AsymmetryError(f"matrix is not square: {M.shape}")
    if M.size == 0:
        return np.inf
    if np.max(np.abs(M - M.T)) > tol:
        raise AsymmetryError(f"asymmetry {np.max(np.abs(M - M.T)):.3g} exceeds {tol:g}")
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


# svec with sqrt(2) on off-diagonals so the Euclidean inner product matches trace(AB)
def _tri(d: int):
    return np.triu_indices(d)


def svec(S: np.ndarray) -> np.ndarray:
    d = S.shape[-1]
    iu = _tri(d)
    w = np.where(iu[0] == iu[1], 1.0, _SQRT2)
    return S[..., iu[0], iu[1]] * w


def smat(v: np.ndarray, d: int) -> np.ndarray:
    iu = _tri(d)
    w = np.where(iu[0] == iu[1], 1.0, 1.0 / _SQRT2)
    out = np.zeros(v.shape[:-1] + (d, d))
    out[..., iu[0], iu[1]] = v * w
    out[..., iu[1], iu[0]] = v * w
    return out


def _dense_svec_data(prob: SdpProblem):
    """A_f, A_s (svec columns), b, c_f, c_s and block offsets."""
    dims = list(prob.block_dims)
    sizes = [d * (d + 1) // 2 for d in dims]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    pos = []
    for d in dims:
        table = np.zeros((d, d), dtype=int)
        iu = _tri(d)
        table[iu] = np.arange(len(iu[0]))
        pos.append(table)

    def col(blk, a, b):
        a, b = min(a, b), max(a, b)
        return offsets[blk] + pos[blk][a, b], (1.0 if a == b else 1.0 / _SQRT2)

    m = prob.n_rows
    Af = np.zeros((m, prob.n_free))
    As = np.zeros((m, offsets[-1]))
    b = np.zeros(m)
    for i, (ft, pt, rhs) in enumerate(prob.rows):
        b[i] = rhs
        for j, v in ft:
            Af[i, j] += v
        for blk, a, bb, v in pt:
            k, w = col(blk, a, bb)
            As[i, k] += v * w
    cf = np.zeros(prob.n_free)
    for j, v in prob.obj_free:
        cf[j] += v
    cs = np.zeros(offsets[-1])
    for blk, a, bb, v in prob.obj_psd:
        k, w = col(blk, a, bb)
        cs[k] += v * w
    return Af, As, b, cf, cs, dims, offsets


def _split_blocks(v: np.ndarray, dims, offsets) -> list:
    return [smat(v[offsets[k] : offsets[k + 1]], d) for k, d in enumerate(dims)]


@dataclass
class _Reduced:
    A: np.ndarray  # r x N, orthonormal rows
    beta: np.ndarray
    c: np.ndarray
    obj_shift: float
    # recovery of free variables: f = F_b - F_s @ s
    F_b: np.ndarray
    F_s: np.ndarray
    # least-squares correction f -> f - F_corr @ residual, used for iterative refinement
    F_corr: np.ndarray
    # map reduced multipliers to original rows
    Ymap: np.ndarray
    inconsistency: float
    y_inconsistent: np.ndarray | None
    free_unbounded: bool


def _presolve(Af, As, b, cf, cs) -> _Reduced:
    m, nf = Af.shape
    N = As.shape[1]
    if nf and m:
        U, S, Vt = np.linalg.svd(Af, full_matrices=True)
        rf = int(np.sum(S > _RANK_RTOL * max(S[0], 1e-300) * max(Af.shape))) if S.size else 0
        U1, U2 = U[:, :rf], U[:, rf:]
        V1, V2 = Vt[:rf].T, Vt[rf:].T
        S1inv = 1.0 / S[:rf]
        F_b = V1 @ (S1inv * (U1.T @ b))
        F_s = V1 @ (S1inv[:, None] * (U1.T @ As))
        F_corr = V1 @ (S1inv[:, None] * U1.T)
        g = U1 @ (S1inv * (V1.T @ cf))
        obj_shift = float(cf @ F_b)
        c_red = cs - As.T @ g
        free_unbounded = bool(V2.size and np.linalg.norm(V2.T @ cf) > 1e-9 * (1 + np.linalg.norm(cf)))
    else:
        U2 = np.eye(m)
        F_b = np.zeros(nf)
        F_s = np.zeros((nf, N))
        F_corr = np.zeros((nf, m))
        obj_shift = 0.0
        c_red = cs.copy()
        free_unbounded = bool(nf and np.linalg.norm(cf) > 0)
    A2 = U2.T @ As
    b2 = U2.T @ b
    if A2.shape[0] and N:
        P, Sg, Qt = np.linalg.svd(A2, full_matrices=False)
        r = int(np.sum(Sg > _RANK_RTOL * max(Sg[0], 1e-300) * max(A2.shape))) if Sg.size and Sg[0] > 0 else 0
    else:
        P = np.zeros((A2.shape[0], 0))
        Sg = np.zeros(0)
        Qt = np.zeros((0, N))
        r = 0
    Pr = P[:, :r]
    b_perp = b2 - Pr @ (Pr.T @ b2)
    inconsistency = float(np.linalg.norm(b_perp))
    y_bad = U2 @ b_perp if inconsistency > 0 else None
    beta = (Pr.T @ b2) / Sg[:r]
    Ymap = U2 @ (Pr / Sg[:r])
    return _Reduced(A=Qt[:r], beta=beta, c=c_red, obj_shift=obj_shift, F_b=F_b, F_s=F_s, F_corr=F_corr, Ymap=Ymap,
                    inconsistency=inconsistency, y_inconsistent=y_bad, free_unbounded=free_unbounded)


class _Cone:
    """Product of PSD cones in svec coordinates."""

    def __init__(self, dims, offsets):
        self.dims = dims
        self.offsets = offsets
        self.nu = int(sum(dims))

    def split(self, v):
        return [v[self.offsets[k] : self.offsets[k + 1]] for k in range(len(self.dims))]

    def mats(self, v):
        return [smat(p, d) for p, d in zip(self.split(v), self.dims)]

    def vec(self, mats):
        return np.concatenate([svec(M) for M in mats]) if mats else np.zeros(0)

    def identity(self):
        return self.vec([np.eye(d) for d in self.dims])


class _Scaling:
    """Nesterov-Todd scaling for each block: X = G L G^T, Z = G^-T L G^-1."""

    def __init__(self, Xs, Zs):
        self.G, self.Ginv, self.lam, self.W = [], [], [], []
        for X, Z in zip(Xs, Zs):
            L = np.linalg.cholesky(X)
            R = np.linalg.cholesky(Z)
            _, s, Vt = np.linalg.svd(R.T @ L)
            rs = np.sqrt(s)
            G = (L @ Vt.T) / rs
            Ginv = (rs[:, None] * Vt) @ sla.solve_triangular(L, np.eye(len(s)), lower=True)
            self.G.append(G)
            self.Ginv.append(Ginv)
            self.lam.append(s)
            self.W.append(G @ G.T)

    def apply_W(self, mats):
        return [W @ M @ W for W, M in zip(self.W, mats)]

    def scaled_x(self, mats):
        return [Gi @ M @ Gi.T for Gi, M in zip(self.Ginv, mats)]

    def scaled_z(self, mats):
        return [G.T @ M @ G for G, M in zip(self.G, mats)]


def _max_step(lam_list, dmats) -> float:
    """Largest a with diag(lam) + a*D PSD in every block (capped at 1e6)."""
    amax = 1e6
    for lam, D in zip(lam_list, dmats):
        if lam.size == 0:
            continue
        s = 1.0 / np.sqrt(lam)
        ev = np.linalg.eigvalsh((s[:, None] * D) * s[None, :])[0]
        if ev < 0:
            amax = min(amax, -1.0 / ev)
    return amax


def _factor(Mmat: np.ndarray, refine: int = 2):
    """Solver for the Schur-complement system, Cholesky with a pseudo-inverse fallback.

    A few refinement sweeps against the unregularized matrix recover the
    accuracy lost to the diagonal shift and to ill-conditioning late in the run.
    """
    r = Mmat.shape[0]
    if r == 0:
        return lambda v: v
    try:
        fac = sla.cho_factor(Mmat + 1e-14 * np.trace(Mmat) / r * np.eye(r), check_finite=False)

        def base(v):
            return sla.cho_solve(fac, v, check_finite=False)
    except np.linalg.LinAlgError:
        pinv = np.linalg.pinv(Mmat, rcond=1e-14)

        def base(v):
            return pinv @ v

    def solve_refined(v):
        x = base(v)
        for _ in range(refine):
            x = x + base(v - Mmat @ x)
        return x

    return solve_refined


def _hsde(red: _Reduced, cone: _Cone, opts: SolverOptions):
    A, beta, c = red.A, red.beta, red.c
    r, N = A.shape
    bscale = max(1.0, float(np.linalg.norm(beta)))
    cscale = max(1.0, float(np.linalg.norm(c)))
    beta = beta / bscale
    c = c / cscale
    has_obj = bool(np.linalg.norm(c) > 0)
    # rows of A restricted to each block, as symmetric matrices
    A_parts = [A[:, cone.offsets[k] : cone.offsets[k + 1]] for k in range(len(cone.dims))]
    A_mats = [smat(Ak, d) for Ak, d in zip(A_parts, cone.dims)]

    x = cone.identity()
    z = cone.identity()
    y = np.zeros(r)
    tau, kappa = 1.0, 1.0
    nu = cone.nu
    info = {"status": NUMERICAL_FAILURE, "iterations": 0, "message": ""}
    stall = 0
    pres_hist = []
    best = None  # best iterate already within all tolerances

    for it in range(opts.max_iter + 1):
        F1 = A @ x - beta * tau
        F2 = A.T @ y + z - c * tau
        F3 = float(beta @ y - c @ x - kappa)
        mu = (float(x @ z) + tau * kappa) / (nu + 1)

        pres = np.linalg.norm(F1) / tau / (1 + np.linalg.norm(beta))
        dres = np.linalg.norm(F2) / tau / (1 + np.linalg.norm(c))
        pobj = float(c @ x) / tau
        dobj = float(beta @ y) / tau
        gap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        info.update(iterations=it, pres=pres, dres=dres, gap=gap)
        log.debug("it %3d pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e mu %.2e", it, pres, dres, gap, tau, kappa, mu)
        pres_hist.append(pres)
        # the affine projection afterwards needs some headroom; accept a stalled residual within feas_tol
        stalled = len(pres_hist) > 3 and pres > 0.5 * pres_hist[-4]
        if (pres <= 0.01 * opts.feas_tol or (stalled and pres <= opts.feas_tol)) and dres <= opts.feas_tol \
                and gap <= opts.gap_tol:
            info["status"] = OPTIMAL if has_obj else FEASIBLE
            break
        if pres <= opts.feas_tol and dres <= opts.feas_tol and gap <= opts.gap_tol \
                and (best is None or pres < best["pres"]):
            best = dict(x=x.copy(), y=y.copy(), z=z.copy(), tau=tau, kappa=kappa, pres=pres, dres=dres, gap=gap, it=it)
        if best is not None and pres > 100.0 * best["pres"]:
            info["message"] = "residual deteriorated"
            break
        by, cx = float(beta @ y), float(c @ x)
        if by > 0 and np.linalg.norm(A.T @ y + z) <= opts.infeas_tol * by:
            info["status"] = INFEASIBLE
            info["cert"] = y / by
            break
        if cx < 0 and np.linalg.norm(A @ x) <= opts.infeas_tol * (-cx):
            info["status"] = UNBOUNDED
            break
        if it == opts.max_iter:
            info["message"] = "iteration limit reached"
            break

        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z)) and np.all(np.isfinite(y))):
            info["message"] = "iterates became non-finite"
            break
        Xs, Zs = cone.mats(x), cone.mats(z)
        try:
            with np.errstate(over="raise", invalid="raise"):
                sc = _Scaling(Xs, Zs)
                WA = [W @ Am @ W for W, Am in zip(sc.W, A_mats)]
        except (np.linalg.LinAlgError, FloatingPointError):
            info["message"] = "lost positive definiteness"
            break
        Mmat = np.zeros((r, r))
        for Ak, WAk in zip(A_parts, WA):
            Mmat += Ak @ svec(WAk).T
        Mmat = 0.5 * (Mmat + Mmat.T)
        solveM = _factor(Mmat)

        Wc = cone.vec(sc.apply_W(cone.mats(c)))
        xi = A @ Wc + beta
        q = solveM(xi)
        zeta = beta - A @ Wc
        cWc = float(c @ Wc)

        def newton(r1, r2, r3, comp_rhs, r5):
            D = [2.0 * R / (lam[:, None] + lam[None, :]) for R, lam in zip(comp_rhs, sc.lam)]
            r4 = cone.vec([G @ Dk @ G.T for G, Dk in zip(sc.G, D)])
            Wr2 = cone.vec(sc.apply_W(cone.mats(r2)))
            p = solveM(r1 - A @ r4 + A @ Wr2)
            rhs3 = r3 + float(c @ r4) - float(c @ Wr2) + r5 / tau
            dtau = (rhs3 - float(zeta @ p)) / (float(zeta @ q) + cWc + kappa / tau)
            dy = p + q * dtau
            dz = r2 - A.T @ dy + c * dtau
            dx = r4 - cone.vec(sc.apply_W(cone.mats(dz)))
            dkappa = (r5 - kappa * dtau) / tau
            return dx, dy, dz, dtau, dkappa

        def step_len(dx, dz, dtau, dkappa):
            dxs = sc.scaled_x(cone.mats(dx))
            dzs = sc.scaled_z(cone.mats(dz))
            a = min(_max_step(sc.lam, dxs), _max_step(sc.lam, dzs))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a, dxs, dzs

        lam2 = [np.diag(lam**2) for lam in sc.lam]
        aff = newton(-F1, -F2, -F3, [-L2 for L2 in lam2], -tau * kappa)
        if not all(np.all(np.isfinite(v)) for v in aff):
            info["message"] = "non-finite search direction"
            break
        a_aff, dxs_a, dzs_a = step_len(aff[0], aff[2], aff[3], aff[4])
        a_aff = min(1.0, a_aff)
        sigma = (1.0 - a_aff) ** 3
        eta = 1.0 - sigma
        comp = []
        for lam, L2, dxa, dza in zip(sc.lam, lam2, dxs_a, dzs_a):
            corr = 0.5 * (dxa @ dza + dza @ dxa)
            comp.append(sigma * mu * np.eye(len(lam)) - L2 - corr)
        r5 = sigma * mu - tau * kappa - aff[3] * aff[4]
        dx, dy, dz, dtau, dkappa = newton(-eta * F1, -eta * F2, -eta * F3, comp, r5)
        if not all(np.all(np.isfinite(v)) for v in (dx, dy, dz, dtau, dkappa)):
            info["message"] = "non-finite search direction"
            break
        a, _, _ = step_len(dx, dz, dtau, dkappa)
        a = min(1.0, opts.step_fraction * a)
        if a < 1e-10:
            stall += 1
            if stall >= 3:
                info["message"] = "step length collapsed"
                break
        else:
            stall = 0
        x = x + a * dx
        y = y + a * dy
        z = z + a * dz
        tau = tau + a * dtau
        kappa = kappa + a * dkappa
        # homogeneous: rescale to keep magnitudes bounded
        scale = max(tau, kappa, 1e-300)
        if scale > 1e8 or scale < 1e-8:
            x, y, z, tau, kappa = x / scale, y / scale, z / scale, tau / scale, kappa / scale

    if info["status"] == NUMERICAL_FAILURE and best is not None:
        x, y, z, tau, kappa = best["x"], best["y"], best["z"], best["tau"], best["kappa"]
        info.update(status=OPTIMAL if has_obj else FEASIBLE, pres=best["pres"], dres=best["dres"], gap=best["gap"],
                    message=f"{info['message'] or 'stopped'}; best iterate from iteration {best['it']}")
    info.update(x=x * bscale / tau, y=y * cscale / tau, z=z * cscale / tau, bscale=bscale, cscale=cscale,
                tau=tau, kappa=kappa)
    return info


def solve(prob: SdpProblem, opts: SolverOptions | None = None) -> SdpSolution:
    opts = opts or SolverOptions()
    if opts.backend == "external":
        return solve_external(prob, opts)
    Af, As, b, cf, cs, dims, offsets = _dense_svec_data(prob)
    red = _presolve(Af, As, b, cf, cs)
    cone = _Cone(dims, offsets)
    N = As.shape[1]
    has_obj = bool(len(prob.obj_free) or len(prob.obj_psd))
    empty = SdpSolution(status=NUMERICAL_FAILURE, blocks=[np.zeros((d, d)) for d in dims], free=np.zeros(prob.n_free))

    if red.inconsistency > opts.feas_tol * (1 + np.linalg.norm(b)):
        empty.status = INFEASIBLE
        y = red.y_inconsistent
        empty.certificate = y / float(b @ y)
        empty.message = "equality rows are inconsistent"
        return empty

    if N == 0 or (red.A.shape[0] == 0 and not np.any(red.c)):
        status = UNBOUNDED if red.free_unbounded else (OPTIMAL if has_obj else FEASIBLE)
        return _finish(prob, red, cone, np.zeros(N), Af, As, b, cf, cs, status, 0, 0.0, 0.0, "", opts)

    info = _hsde(red, cone, opts)
    status = info["status"]
    if status == INFEASIBLE:
        y = red.Ymap @ info["cert"]
        sol = SdpSolution(status=INFEASIBLE, blocks=empty.blocks, free=empty.free, iterations=info["iterations"],
                          certificate=y / float(b @ y) if float(b @ y) != 0 else y, message="dual improving ray")
        return sol
    if status == UNBOUNDED:
        return SdpSolution(status=UNBOUNDED, blocks=empty.blocks, free=empty.free, iterations=info["iterations"],
                           message="primal improving ray")
    if red.free_unbounded and status in (OPTIMAL, FEASIBLE):
        status = UNBOUNDED
    raw = info["x"]
    # projecting onto the affine set can push a boundary point slightly out of the cone; keep the raw iterate
    # as a fallback candidate
    cands = [raw - red.A.T @ (red.A @ raw - red.beta), raw] if red.A.shape[0] else [raw]
    sol = None
    for s in cands:
        sol = _finish(prob, red, cone, s, Af, As, b, cf, cs, status, info["iterations"], info.get("dres", np.inf),
                      info.get("gap", np.inf), info.get("message", ""), opts)
        if sol.status == status:
            break
    return sol


def _finish(prob, red, cone, s, Af, As, b, cf, cs, status, iters, dres, gap, message, opts) -> SdpSolution:
    blocks = [0.5 * (B + B.T) for B in cone.mats(s)] if s.size else [np.zeros((d, d)) for d in cone.dims]
    f = red.F_b - red.F_s @ s
    resid = Af @ f + As @ s - b
    for _ in range(3):  # refinement: the elimination can be ill-conditioned
        if not resid.size or np.max(np.abs(resid)) <= 1e-3 * opts.feas_tol:
            break
        f = f - red.F_corr @ resid
        resid = Af @ f + As @ s - b
    pres = float(np.max(np.abs(resid))) if resid.size else 0.0
    obj = prob.obj_sign * (float(cf @ f + cs @ s) + prob.obj_const)
    sol = SdpSolution(status=status, blocks=blocks, free=f, primal_residual=pres, dual_residual=float(dres),
                      gap=float(gap), iterations=iters, objective=obj, message=message)
    if status in (OPTIMAL, FEASIBLE):
        min_eig = sol.min_block_eig()
        if pres > opts.feas_tol or min_eig < -opts.feas_tol:
            sol.status = NUMERICAL_FAILURE
            sol.message = f"recovered point violates tolerances (residual {pres:.2e}, min eig {min_eig:.2e})"
    return sol


def solve_external(prob: SdpProblem, opts: SolverOptions) -> SdpSolution:
    """Round-trip through the text dump and solve with cvxpy (optional dependency)."""
    try:
        import cvxpy as cp
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("external backend requires cvxpy") from exc
    p = SdpProblem.parse(prob.dump())
    f = cp.Variable(p.n_free) if p.n_free else None
    Xs = [cp.Variable((d, d), PSD=True) for d in p.block_dims]
    cons = []
    for ft, pt, rhs in p.rows:
        expr = 0
        for j, v in ft:
            expr = expr + v * f[j]
        for blk, a, bb, v in pt:
            expr = expr + v * Xs[blk][a, bb]
        cons.append(expr == rhs)
    obj = 0
    for j, v in p.obj_free:
        obj = obj + v * f[j]
    for blk, a, bb, v in p.obj_psd:
        obj = obj + v * Xs[blk][a, bb]
    has_obj = bool(p.obj_free or p.obj_psd)
    problem = cp.Problem(cp.Minimize(obj if has_obj else 0), cons)
    problem.solve(solver="CLARABEL", tol_feas=opts.feas_tol, tol_gap_abs=opts.feas_tol, tol_gap_rel=opts.feas_tol,
                  max_iter=opts.max_iter)
    st = problem.status
    blocks = [np.asarray(X.value) if X.value is not None else np.zeros(X.shape) for X in Xs]
    free = np.asarray(f.value) if f is not None and f.value is not None else np.zeros(p.n_free)
    if st in ("infeasible", "infeasible_inaccurate"):
        status = INFEASIBLE
    elif st in ("unbounded", "unbounded_inaccurate"):
        status = UNBOUNDED
    elif st == "optimal":
        status = OPTIMAL if has_obj else FEASIBLE
    else:
        status = NUMERICAL_FAILURE
    obj_val = prob.obj_sign * ((problem.value if has_obj else 0.0) + p.obj_const) if status == OPTIMAL else np.nan
    resid = 0.0
    if status in (OPTIMAL, FEASIBLE):
        Af, As, b, _, _, dims, offsets = _dense_svec_data(p)
        s = np.concatenate([svec(B) for B in blocks]) if blocks else np.zeros(0)
        resid = float(np.max(np.abs(Af @ free + As @ s - b))) if b.size else 0.0
    return SdpSolution(status=status, blocks=blocks, free=free, primal_residual=resid, objective=obj_val,
                       message=f"cvxpy/CLARABEL status {st}")
