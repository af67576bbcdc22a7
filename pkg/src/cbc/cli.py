"""``cbc`` command line: one config file drives every stage.

Exit codes: 0 pass, 1 certified infeasibility or verification failure,
2 usage / IO / config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, parse_config
from .data import InsufficientDataError, SchemaError, build_lifted_matrix, check_persistency, load_trajectory
from .pipeline import PipelineError, prepare, synthesize
from .synthesis import CbcSolution
from .verify import export_plot_data, oracle_checks, verify

COMMANDS = ("ingest", "check-rank", "synthesize", "verify", "simulate", "export-plot", "all")
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("cbc")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cbc", description="Data-driven control barrier certificates from one trajectory")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="TOML or JSON run configuration")
    p.add_argument("--out", help="output directory (overrides the config)")
    p.add_argument("--seed", type=int, help="random seed for sampling")
    p.add_argument("--feas-tol", type=float, help="solver feasibility tolerance")
    p.add_argument("--max-iter", type=int, help="solver iteration cap")
    p.add_argument("--epsilon-pd", type=float, help="margin in Z >= eps I")
    p.add_argument("--backend", choices=("builtin", "external"), help="SDP backend")
    return p


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _solution_text(sol: CbcSolution) -> str:
    lines = [f"P = {sol.P.tolist()}", f"alpha1 = {sol.alpha1:.10g}", f"alpha2 = {sol.alpha2:.10g}",
             f"delta = {sol.delta:.10g}", f"B(x) = {sol.barrier.to_text()}"]
    lines += [f"u{i + 1}(x) = {u.to_text()}" for i, u in enumerate(sol.controller.u)]
    if sol.metadata.get("degH_default_rule"):
        lines.append("note: degH chosen by the default rule (max basis degree - 1)")
    return "\n".join(lines) + "\n"


def _load_solution(cfg: RunConfig, U_minus) -> CbcSolution:
    path = cfg.out_dir / "solution.json"
    if not path.exists():
        raise FileNotFoundError(f"{path} not found; run 'cbc synthesize' first")
    return CbcSolution.from_dict(json.loads(path.read_text()), U_minus)


def _run(args, cfg: RunConfig) -> int:
    out = cfg.out_dir
    cmd = args.command
    if cmd == "ingest":
        traj = load_trajectory(cfg.data, cfg.n, cfg.m)
        print(f"n={traj.n}, m={traj.m}, T={traj.T}")
        return EXIT_OK
    if cmd == "check-rank":
        traj = load_trajectory(cfg.data, cfg.n, cfg.m)
        rep = check_persistency(build_lifted_matrix(traj, cfg.monomial_basis()))
        print(rep.summary())
        return EXIT_OK if rep.passed else EXIT_FAIL

    prep = prepare(cfg)
    X, X0, Xu = cfg.state_set(), cfg.initial_set(), cfg.unsafe_set()
    if cmd in ("synthesize", "all"):
        sol = synthesize(cfg, prep)
        _write(out / "solution.json", sol.to_json() + "\n")
        _write(out / "solution.txt", _solution_text(sol))
        print(_solution_text(sol), end="")
        if cmd == "synthesize":
            return EXIT_OK
    else:
        sol = _load_solution(cfg, prep.traj.U_minus)

    settings = cfg.verify_settings()
    if cmd == "simulate":
        tier, _ = oracle_checks(sol, prep.traj, prep.lift, prep.theta.basis, X, X0, Xu, settings)
        _write(out / "simulation.json", json.dumps(tier, indent=2, sort_keys=True) + "\n")
        print(json.dumps(tier, indent=2, sort_keys=True))
        return EXIT_OK if tier["passed"] else EXIT_FAIL

    report = verify(sol, prep.traj, prep.lift, prep.theta, X, X0, Xu, settings)
    if cmd in ("verify", "all"):
        _write(out / "verification.json", report.to_json() + "\n")
        _write(out / "verification.txt", report.summary() + "\n")
        print(report.summary())
    if cmd in ("export-plot", "all"):
        files = export_plot_data(sol, report, out / "plots", X0, Xu, X)
        for f in files:
            log.info("wrote %s", f)
    if cmd == "all":
        combined = {"solution": sol.to_dict(), "verification": report.to_dict()}
        _write(out / "report.json", json.dumps(combined, indent=2, sort_keys=True) + "\n")
    if cmd == "export-plot":
        return EXIT_OK
    if not report.passed:
        print("failed checks: " + ", ".join(report.failed_checks()), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def main(argv=None) -> int:
    level = os.environ.get("CBC_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = parse_config(args.config)
        cfg = cfg.with_overrides(out_dir=Path(args.out).resolve() if args.out else None, seed=args.seed,
                                 feas_tol=args.feas_tol, max_iter=args.max_iter, epsilon=args.epsilon_pd,
                                 backend=args.backend)
        return _run(args, cfg)
    except (ConfigError, SchemaError, InsufficientDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
