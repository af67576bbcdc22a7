"""Acceptance criteria AC1-AC10.  Each test records one PASS/FAIL line, shown in the terminal summary."""
import time

import numpy as np
import pytest

from appendix_tables import (
    JET_ALPHA1,
    JET_ALPHA2,
    JET_B,
    JET_BASIS,
    JET_P,
    JET_THETA,
    LORENZ_ALPHA1,
    LORENZ_ALPHA2,
    LORENZ_BASIS,
    LORENZ_P,
    LORENZ_THETA,
)
from cbc.cli import main
from cbc.data import build_lifted_matrix, build_transform
from cbc.pipeline import prepare, synthesize
from cbc.poly import PolyMatrix, Polynomial, monomials_up_to, parse_monomial
from cbc.sdp import solve
from cbc.sos import AffinePoly, ExprMatrix, compile, new_program
from cbc.verify import VerifySettings, identify_model, verify
from conftest import ACCEPTANCE_LINES, CONFIGS, load_case
from sdp_instances import interior_feasible, min_trace, planted_infeasible
from synthetic import random_system, random_trajectory


def record(ac, ok, detail):
    line = f"AC{ac} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def _verify(cfg, prep, sol, with_oracle=False, **kw):
    s = cfg.verify_settings()
    if kw:
        s = VerifySettings(**{**s.__dict__, **kw})
    return verify(sol, prep.traj, prep.lift, prep.theta, cfg.state_set(), cfg.initial_set(), cfg.unsafe_set(),
                  s, with_oracle)


# AC1


def test_ac1_rank_condition(capsys):
    t = time.perf_counter()
    codes = [main(["check-rank", "--config", str(CONFIGS / f"{c}.toml")]) for c in ("jet", "lorenz")]
    dt = time.perf_counter() - t
    out = capsys.readouterr().out.strip().splitlines()
    ok = codes == [0, 0] and out == ["M=9, T=15, rank=9, PASS", "M=6, T=15, rank=6, PASS"] and dt < 1.0
    record(1, ok, f"{out} in {dt:.3f}s")


# AC2


@pytest.mark.parametrize("case,basis,n,table", [("jet", JET_BASIS, 2, JET_THETA), ("lorenz", LORENZ_BASIS, 3, LORENZ_THETA)])
def test_ac2_theta_reproduction(case, basis, n, table):
    cfg = load_case(case)
    tm = build_transform(cfg.monomial_basis(), cfg.overrides())
    assert tm.basis.labels() == list(basis)
    mismatched = []
    for i in range(tm.basis.M):
        for j in range(n):
            want = table.get((i, j))
            expected = Polynomial.zero(n) if want is None else Polynomial.monomial(parse_monomial(want, n))
            if tm.theta[i, j] != expected:
                mismatched.append((i, j))
    x = PolyMatrix([[Polynomial.var(i, n)] for i in range(n)], n)
    recon = tm.theta @ x
    residual = [i for i, p in enumerate(tm.basis.as_polys()) if recon[i, 0] - p != Polynomial.zero(n)]
    record(2, not mismatched and not residual,
           f"{case}: theta entries mismatched={mismatched}, nonzero rows of Theta x - M(x)={residual}")


# AC3


def test_ac3_published_level_sets():
    t = time.perf_counter()
    cfg = load_case("jet")
    B = Polynomial({parse_monomial(k, 2): v for k, v in JET_B.items()}, 2)
    a1 = max(float(B.eval_many(b.grid(201)).max()) for b in cfg.initial_set().boxes)
    a2 = min(float(B.eval_many(b.grid(201)).min()) for b in cfg.unsafe_set().boxes)
    dt = time.perf_counter() - t
    e1, e2 = abs(a1 / JET_ALPHA1 - 1), abs(a2 / JET_ALPHA2 - 1)
    record(3, e1 <= 1e-3 and e2 <= 1e-3 and dt < 5.0,
           f"grid max on X0 {a1:.6g} (rel err {e1:.2e}), grid min on Xu {a2:.6g} (rel err {e2:.2e}), {dt:.2f}s")


# AC4 / AC5


def _end_to_end(case, ref_P, ref_a1, ref_a2, budget, ac, tmp_path):
    t = time.perf_counter()
    cfg = load_case(case, tmp_path)
    prep = prepare(cfg)
    sol = synthesize(cfg, prep)
    rep = _verify(cfg, prep, sol)
    dt = time.perf_counter() - t
    c = rep.certificate["checks"]
    own_ok = (rep.certificate["passed"] and c["data_identity"]["value"] <= 1e-6
              and c["lmi_grid"]["value"] >= -1e-6 and sol.alpha2 >= sol.alpha1 + sol.delta)

    injected = synthesize(cfg, prep, fixed_P=ref_P)
    irep = _verify(cfg, prep, injected)
    ic = irep.certificate["checks"]
    spectral_level = ("positivity", "inverse", "lmi_grid", "schur_complement", "decrease",
                      "initial_level", "unsafe_level", "level_gap")
    inj_ok = all(ic[k]["passed"] for k in spectral_level)
    record(ac, own_ok and inj_ok and dt < budget,
           f"{case}: own certificate tier {'pass' if rep.certificate['passed'] else 'fail'} "
           f"(identity {c['data_identity']['value']:.2e}, lmi min-eig {c['lmi_grid']['value']:.2e}, "
           f"alpha1={sol.alpha1:.6g} alpha2={sol.alpha2:.6g}) in {dt:.1f}s; "
           f"published P spectral/level checks {'pass' if inj_ok else 'fail'} "
           f"(alpha1={injected.alpha1:.6g} vs {ref_a1:g}, alpha2={injected.alpha2:.6g} vs {ref_a2:g})")


def test_ac4_jet_end_to_end(tmp_path):
    _end_to_end("jet", JET_P, JET_ALPHA1, JET_ALPHA2, 120.0, 4, tmp_path)


def test_ac5_lorenz_end_to_end(tmp_path):
    _end_to_end("lorenz", LORENZ_P, LORENZ_ALPHA1, LORENZ_ALPHA2, 300.0, 5, tmp_path)


# AC6


def test_ac6_safety_rollouts(jet_cfg, jet_prep, jet_solution, lorenz_cfg, lorenz_prep, lorenz_solution):
    """Expected to fail on the bundled data: see the decisions ledger.

    The bundled data are rounded to 4 significant digits, so the data-based
    closed loop X+ H(x) P x and the least-squares model disagree and the
    rollouts driven by the model leave the certified region.
    """
    t = time.perf_counter()
    parts, ok = [], True
    for cfg, prep, sol, count in ((jet_cfg, jet_prep, jet_solution, 100),
                                  (lorenz_cfg, lorenz_prep, lorenz_solution, 250)):
        rep = _verify(cfg, prep, sol, with_oracle=True, rollouts=count, horizon=100)
        oc = rep.oracle["checks"]
        case_ok = oc["unsafe_entries"]["passed"] and oc["barrier_monotone"]["passed"]
        ok &= case_ok
        parts.append(f"{cfg.name}: {count} rollouts, unsafe entries {oc['unsafe_entries']['value']:.0f}, "
                     f"B increases in {oc['barrier_monotone']['value']:.0f} (tol {oc['barrier_monotone']['tolerance']:g}), "
                     f"diverged {oc['bounded']['value']:.0f}, "
                     f"consistency err {oc['representation_consistency']['value']:.3g}")
    dt = time.perf_counter() - t
    record(6, ok and dt < 60.0, "; ".join(parts) + f"; {dt:.1f}s")


# AC7


def test_ac7_data_based_closed_loop_equivalence():
    worst_rel, worst_id, details = 0.0, 0.0, []
    for seed in range(3):
        rng = np.random.default_rng(100 + seed)
        n, deg = int(rng.integers(1, 4)), int(rng.integers(2, 4))
        system = random_system(rng, n, deg)
        basis = system.basis
        traj = random_trajectory(rng, system, basis.M + 6)
        lift = build_lifted_matrix(traj, basis)
        theta = build_transform(basis)
        model = identify_model(lift, traj, basis)
        worst_id = max(worst_id, float(np.max(np.abs(model.A_hat - system.A))),
                       float(np.max(np.abs(model.B_hat - system.B))))

        # any H with M_- H(z) = Theta(z) Z: particular solution plus a null-space part
        G = rng.normal(size=(n, n))
        Z = G @ G.T + np.eye(n)
        P = np.linalg.inv(Z)
        pinv = np.linalg.pinv(lift.M_minus)
        _, _, Vt = np.linalg.svd(lift.M_minus)
        N = Vt[basis.M:].T
        R = [rng.normal(size=(N.shape[1], n)) for _ in range(2)]
        z = rng.uniform(-1, 1, size=(500, n))
        for p in z:
            Hz = pinv @ theta.theta.eval(p) @ Z + N @ (R[0] + float(p.sum()) * R[1])
            Qz = Hz @ P
            u = traj.U_minus @ Qz @ p
            lhs = model.A_hat @ basis.eval(p[None])[0] + model.B_hat @ u
            rhs = traj.X_plus @ Qz @ p
            worst_rel = max(worst_rel, float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(lhs), 1e-12)))
        details.append(f"n={n} deg<={deg} M={basis.M}")
    record(7, worst_rel <= 1e-6 and worst_id <= 1e-8,
           f"{', '.join(details)}: worst relative mismatch {worst_rel:.2e}, identification error {worst_id:.2e}")


# AC8


def _random_poly(rng, n, deg):
    return Polynomial({m: rng.normal() for m in monomials_up_to(n, deg)}, n)


def _random_sos(rng, n):
    p = Polynomial.zero(n)
    for _ in range(int(rng.integers(1, 4))):
        q = _random_poly(rng, n, 2)
        p = p + q * q
    return p


def _sos_status(p, n):
    prog = new_program(n)
    prog.add_sos(p)
    return solve(compile(prog)).status


def _matrix_sos_min_eig(rng, n, size):
    L = PolyMatrix([[_random_poly(rng, n, 1) for _ in range(size)] for _ in range(size)], n)
    prog = new_program(n)
    t = prog.add_scalar_var()
    S = ExprMatrix.lift(L @ L.T(), n)
    shift = ExprMatrix([[t if i == j else AffinePoly({}, n) for j in range(size)] for i in range(size)], n)
    prog.add_matrix_sos(S + shift)
    prog.minimize(t)
    sdp = compile(prog)
    sol = solve(sdp)
    if sol.status != "optimal":
        return -np.inf
    Sv = (S + shift).value(sdp.scalar_values(sol.free, sol.blocks))
    pts = rng.uniform(-3, 3, size=(100, n))
    return min(float(np.linalg.eigvalsh(Sv.eval(p))[0]) for p in pts)


def test_ac8_sos_compiler_soundness():
    rng = np.random.default_rng(8)
    feasible = sum(_sos_status(_random_sos(rng, n), n) == "feasible" for n in [2] * 50)
    infeasible = 0
    for _ in range(20):
        n = 2
        s = _random_sos(rng, n)
        x0 = rng.uniform(-2, 2, n)
        p = s - (s.eval(x0) + 1.0)  # p(x0) = -1
        infeasible += _sos_status(p, n) == "infeasible"
    eigs = [_matrix_sos_min_eig(rng, 2, size) for size in (2, 2, 3)]
    empty = compile(new_program(2))
    empty_ok = empty.block_dims == () and empty.n_rows == 0 and solve(empty).status == "feasible"
    ok = feasible == 50 and infeasible == 20 and min(eigs) >= -1e-6 and empty_ok
    record(8, ok, f"{feasible}/50 SOS certified, {infeasible}/20 non-SOS rejected, "
                  f"matrix-SOS worst pointwise min-eig {min(eigs):.2e}, empty program feasible={empty_ok}")


# AC9


def test_ac9_sdp_solver_suite():
    rng = np.random.default_rng(9)
    trace_err = max(abs(solve(min_trace(n)).objective - n) for n in (2, 3, 5))
    worst_res, interior_ok = 0.0, 0
    for _ in range(20):
        d = int(rng.integers(2, 7))
        m = int(rng.integers(1, min(8, d * (d + 1) // 2) + 1))
        prob, A, b, _ = interior_feasible(rng, d, m)
        sol = solve(prob)
        if sol.status == "optimal":
            interior_ok += 1
            X = sol.blocks[0]
            worst_res = max(worst_res, max(abs(np.sum(Ai * X) - bi) for Ai, bi in zip(A, b)))
    statuses = []
    for _ in range(20):
        d = int(rng.integers(2, 7))
        prob, _, _ = planted_infeasible(rng, d, int(rng.integers(2, 9)))
        statuses.append(solve(prob).status)
    certified = statuses.count("infeasible")
    ok = trace_err <= 1e-7 and interior_ok == 20 and worst_res <= 1e-8 and certified == 20
    record(9, ok, f"min-trace error {trace_err:.1e}, {interior_ok}/20 interior instances with residual "
                  f"{worst_res:.1e}, {certified}/20 planted infeasible certified (statuses {sorted(set(statuses))})")


# AC10


def test_ac10_determinism(tmp_path):
    cfg = str(CONFIGS / "jet.toml")
    a, b = tmp_path / "a", tmp_path / "b"
    codes = [main(["all", "--config", cfg, "--out", str(a), "--seed", "0"]),
             main(["all", "--config", cfg, "--out", str(b), "--seed", "0"])]
    same = {name: (a / name).read_bytes() == (b / name).read_bytes()
            for name in ("report.json", "solution.json", "verification.json")}
    # exit code 1 reflects the oracle tier on quantized data; the reports must still be written identically
    record(10, all(same.values()) and codes[0] == codes[1], f"exit codes {codes}, byte-identical {same}")
