import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbc.poly import PolyMatrix, Polynomial, monomials_up_to
from cbc.sdp import solve
from cbc.sos import (
    AffinePoly,
    DegreeError,
    ExprMatrix,
    NonAffineError,
    SdpProblem,
    ShapeError,
    compile,
    new_program,
)


def x(i, n=2):
    return Polynomial.var(i, n)


def random_poly(rng, n, deg):
    return Polynomial({m: rng.normal() for m in monomials_up_to(n, deg)}, n)


def test_poly_var_counts():
    prog = new_program(2)
    H = prog.add_poly_var(2, (15, 2), "H")
    # 6 monomials of degree <= 2 in two variables
    assert H.shape == (15, 2)
    assert prog.n_scalars == 15 * 2 * 6


def test_sym_var_is_symmetric():
    prog = new_program(1)
    S = prog.add_sym_var(3)
    assert prog.n_scalars == 6
    assert S.is_symmetric()


def test_scalar_equality_compiles_to_one_row():
    prog = new_program(1)
    c = prog.add_scalar_var("c")
    prog.add_equality(c, 3.0)
    sdp = compile(prog)
    assert (sdp.n_free, sdp.n_rows, sdp.block_dims) == (1, 1, ())
    sol = solve(sdp)
    assert sol.ok
    assert sol.free == pytest.approx([3.0])


def test_polynomial_equality_one_row_per_monomial():
    prog = new_program(2)
    p = prog.add_poly_var(1)[0, 0]
    prog.add_equality(p, x(0) + 2 * x(1) + 1)
    sdp = compile(prog)
    assert sdp.n_rows == 3
    sol = solve(sdp)
    vals = sdp.scalar_values(sol.free, sol.blocks)
    assert p.value(vals).allclose(x(0) + 2 * x(1) + 1, atol=1e-9)


def test_matrix_equality_shape_mismatch():
    prog = new_program(2)
    H = prog.add_poly_var(0, (2, 2))
    with pytest.raises(ShapeError):
        prog.add_equality(H, np.zeros((3, 2)))


def test_product_of_decisions_rejected():
    prog = new_program(1)
    a, b = prog.add_scalar_var(), prog.add_scalar_var()
    with pytest.raises(NonAffineError):
        a * b


def test_sos_gram_block_size():
    prog = new_program(2)
    prog.add_sos(x(0) ** 4 + x(1) ** 2 + 1)
    sdp = compile(prog)
    # quartic in two variables: Gram basis of the 6 monomials of degree <= 2
    assert sdp.block_dims == (6,)


def test_odd_fixed_top_degree_rejected():
    prog = new_program(1)
    prog.add_sos(x(0, 1) ** 3 + 1)
    with pytest.raises(DegreeError):
        compile(prog)


def test_odd_sos_var_degree_rejected():
    with pytest.raises(DegreeError):
        new_program(1).add_sos_var(3)


def test_asymmetric_matrix_sos_rejected():
    prog = new_program(1)
    with pytest.raises(ShapeError):
        prog.add_matrix_sos(np.array([[1.0, 2.0], [0.0, 1.0]]))


@pytest.mark.parametrize("p,feasible", [
    (x(0) ** 2, True),
    (x(0) ** 2 - 2 * x(0) * x(1) + x(1) ** 2, True),
    (x(0) ** 4 + x(1) ** 4 + 1 - x(0) * x(1), True),
    (-(x(0) ** 2) - 1, False),
    (x(0) ** 2 - 1, False),
])
def test_sos_examples(p, feasible):
    prog = new_program(2)
    prog.add_sos(p)
    sol = solve(compile(prog))
    assert sol.status == ("feasible" if feasible else "infeasible")


def test_empty_program_trivially_feasible():
    sdp = compile(new_program(2))
    assert sdp.block_dims == () and sdp.n_rows == 0
    assert solve(sdp).status == "feasible"


@pytest.mark.parametrize("M,feasible", [
    (np.eye(2), True),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), False),
    (np.outer([1.0, 2.0], [1.0, 2.0]), True),
])
def test_constant_matrix_sos(M, feasible):
    prog = new_program(1)
    prog.add_matrix_sos(M)
    assert solve(compile(prog)).status == ("feasible" if feasible else "infeasible")


def test_polynomial_matrix_sos_pointwise(rng):
    n = 2
    L = PolyMatrix([[random_poly(rng, n, 1) for _ in range(2)] for _ in range(2)], n)
    prog = new_program(n)
    t = prog.add_scalar_var()
    S = ExprMatrix.lift(L @ L.T(), n)
    shift = ExprMatrix([[t if i == j else AffinePoly({}, n) for j in range(2)] for i in range(2)], n)
    prog.add_matrix_sos(S + shift)
    prog.minimize(t)
    sdp = compile(prog)
    sol = solve(sdp)
    assert sol.status == "optimal"
    vals = sdp.scalar_values(sol.free, sol.blocks)
    assert t.value(vals).coeff((0, 0)) <= 1e-6
    Sv = (S + shift).value(vals)
    pts = rng.uniform(-3, 3, size=(100, n))
    assert min(np.linalg.eigvalsh(Sv.eval(p))[0] for p in pts) >= -1e-6


def test_compile_is_deterministic():
    def build():
        prog = new_program(2)
        H = prog.add_poly_var(1, (2, 2))
        lam = prog.add_sos_var(2)
        prog.add_equality(H[0, 0], x(0))
        prog.add_sos(lam * (1 - x(0) ** 2) + x(1) ** 2 + H[1, 1] * 0.0 + 1)
        Z = prog.add_sym_var(2)
        prog.add_matrix_sos(Z - np.eye(2))
        prog.minimize(Z[0, 0] + Z[1, 1])
        return compile(prog)

    assert build().dump() == build().dump()


def test_dump_parse_round_trip():
    prog = new_program(2)
    c = prog.add_scalar_var()
    prog.add_sos(x(0) ** 2 + c * x(1) ** 2 + 0.1)
    prog.add_equality(c, 0.3)
    prog.maximize(c)
    sdp = compile(prog)
    back = SdpProblem.parse(sdp.dump())
    assert back.dump() == sdp.dump()
    a1, b1 = sdp.dense()[:2], back.dense()[:2]
    for u, v in zip(a1, b1):
        assert np.array_equal(u, v)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_random_sum_of_squares_certified(seed, k):
    rng = np.random.default_rng(seed)
    n = 2
    p = Polynomial.zero(n)
    for _ in range(k):
        q = random_poly(rng, n, 2)
        p = p + q * q
    prog = new_program(n)
    prog.add_sos(p)
    assert solve(compile(prog)).status == "feasible"
