"""Algorithm 1 end to end: load, lift, rank check, transform, Gram program, inversion, levels, controller, verify."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .data import (
    InsufficientDataError,
    LiftedData,
    RankReport,
    SchemaError,
    TrajectoryData,
    TransformMap,
    build_lifted_matrix,
    build_transform,
    check_persistency,
    load_trajectory,
)
from .synthesis import (
    CbcSolution,
    RankConditionError,
    SynthesisError,
    compute_levels,
    extract_controller,
    invert_Z,
    synthesize_gram,
)
from .verify import VerificationReport, verify

log = logging.getLogger(__name__)

STAGES = ("load", "lift", "rank", "transform", "synthesize", "invert", "levels", "controller", "verify")


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
        if isinstance(cause, SynthesisError):
            self.exit_code = cause.exit_code
        elif isinstance(cause, (SchemaError, InsufficientDataError, OSError)):
            self.exit_code = 2
        else:
            self.exit_code = 1


@dataclass
class Prepared:
    traj: TrajectoryData
    lift: LiftedData
    rank: RankReport
    theta: TransformMap


@dataclass
class PipelineResult:
    prepared: Prepared
    solution: CbcSolution | None = None
    report: VerificationReport | None = None
    stages_done: list = field(default_factory=list)


def _stage(name, fn, *args, **kw):
    log.info("stage %s", name)
    try:
        return fn(*args, **kw)
    except PipelineError:
        raise
    except (SynthesisError, SchemaError, InsufficientDataError, OSError, ValueError, np.linalg.LinAlgError) as exc:
        raise PipelineError(name, exc) from exc


def prepare(cfg: RunConfig) -> Prepared:
    basis = cfg.monomial_basis()
    traj = _stage("load", load_trajectory, cfg.data, cfg.n, cfg.m)
    lift = _stage("lift", build_lifted_matrix, traj, basis)
    rank = check_persistency(lift)
    if not rank.passed:
        raise PipelineError("rank", RankConditionError(f"rank condition fails: {rank.summary()}"))
    theta = _stage("transform", build_transform, basis, cfg.overrides())
    return Prepared(traj=traj, lift=lift, rank=rank, theta=theta)


def _metadata(cfg: RunConfig, prep: Prepared, extra: dict) -> dict:
    meta = {
        "case": cfg.name,
        "degH": cfg.degH,
        "degH_default_rule": cfg.synthesis.degH is None,
        "deg_lambda": cfg.synthesis.deg_lambda,
        "deg_lambda_levels": cfg.synthesis.deg_lambda_levels,
        "epsilon": cfg.synthesis.epsilon,
        "basis": prep.theta.basis.labels(),
        "theta_assignment": [f"x{j + 1}" for j in prep.theta.assignment],
        "rank": prep.rank.summary(),
        "solver": {"backend": cfg.solver.backend, "feas_tol": cfg.solver.feas_tol, "max_iter": cfg.solver.max_iter},
    }
    meta.update(extra)
    return meta


def synthesize(cfg: RunConfig, prep: Prepared, fixed_P: np.ndarray | None = None) -> CbcSolution:
    """Steps 3-4 plus controller extraction.  With ``fixed_P`` only H, multipliers and levels are searched."""
    opts = cfg.solver_options()
    X, X0, Xu = cfg.state_set(), cfg.initial_set(), cfg.unsafe_set()
    s = cfg.synthesis
    fixed_Z = None if fixed_P is None else np.linalg.inv(np.asarray(fixed_P, dtype=float))
    gram = _stage("synthesize", synthesize_gram, prep.lift, prep.traj, prep.theta, X, cfg.degH, s.epsilon,
                  s.deg_lambda, opts, fixed_Z)
    if fixed_P is None:
        P = _stage("invert", invert_Z, gram.Z, s.epsilon)
        Z = gram.Z
    else:
        P = 0.5 * (np.asarray(fixed_P, dtype=float) + np.asarray(fixed_P, dtype=float).T)
        Z = np.linalg.inv(P)
        Z = 0.5 * (Z + Z.T)
    levels = _stage("levels", compute_levels, P, X0, Xu, s.deg_lambda_levels, s.delta, opts)
    ctrl = _stage("controller", extract_controller, prep.traj.U_minus, gram.H, P)
    meta = _metadata(cfg, prep, {
        "P_source": "synthesized" if fixed_P is None else "injected",
        "gram_sdp": {"status": gram.sdp.status, "iterations": gram.sdp.iterations, "rows": gram.n_rows,
                     "blocks": list(gram.block_dims), "primal_residual": gram.sdp.primal_residual},
        "level_sdp_status": list(levels.sdp_status),
    })
    return CbcSolution(P=P, Z=Z, H=gram.H, alpha1=levels.alpha1, alpha2=levels.alpha2, delta=levels.delta,
                       controller=ctrl,
                       multipliers={"state": [gram.multipliers], "initial": levels.multipliers0,
                                    "unsafe": levels.multipliers_u},
                       metadata=meta)


def run_pipeline(cfg: RunConfig, with_oracle: bool = True, fixed_P: np.ndarray | None = None) -> PipelineResult:
    prep = prepare(cfg)
    sol = synthesize(cfg, prep, fixed_P)
    report = _stage("verify", verify, sol, prep.traj, prep.lift, prep.theta, cfg.state_set(), cfg.initial_set(),
                    cfg.unsafe_set(), cfg.verify_settings(), with_oracle)
    return PipelineResult(prepared=prep, solution=sol, report=report, stages_done=list(STAGES))
