"""Symbolic SOS programs and their compilation to block SDP data.

Decision objects are expressed as ``AffinePoly``: polynomials in the state
variables whose coefficients are affine functions of scalar decision
variables.  Every scalar is either free or an entry of a PSD Gram block.
SOS constraints become Gram blocks plus coefficient-matching equalities;
matrix SOS constraints are scalarized as ``y^T S(x) y`` with a Gram basis that
is linear in ``y``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .poly import (
    Polynomial,
    PolyMatrix,
    gram_basis,
    mono_product,
    monomials_up_to,
    sorted_grlex,
)

CONST = -1
_DROP = 1e-15


class DegreeError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class NonAffineError(ValueError):
    pass


class AffinePoly:
    """sum_mono x^mono * (c0 + sum_k c_k d_k) with scalar decisions d_k."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 1):
        self.nvars = nvars
        self.terms = {}
        for mono, lin in (terms or {}).items():
            lin = {k: v for k, v in lin.items() if abs(v) > _DROP}
            if lin:
                self.terms[tuple(mono)] = lin

    @classmethod
    def from_poly(cls, p: Polynomial) -> "AffinePoly":
        return cls({m: {CONST: c} for m, c in p.terms.items()}, p.nvars)

    @classmethod
    def constant(cls, c: float, nvars: int) -> "AffinePoly":
        return cls({(0,) * nvars: {CONST: float(c)}}, nvars)

    @classmethod
    def scalar(cls, k: int, nvars: int, mono=None, coeff: float = 1.0) -> "AffinePoly":
        mono = tuple(mono) if mono is not None else (0,) * nvars
        return cls({mono: {k: coeff}}, nvars)

    @staticmethod
    def lift(obj, nvars: int) -> "AffinePoly":
        if isinstance(obj, AffinePoly):
            return obj
        if isinstance(obj, Polynomial):
            return AffinePoly.from_poly(obj)
        if isinstance(obj, (int, float, np.floating, np.integer)):
            return AffinePoly.constant(float(obj), nvars)
        raise TypeError(f"cannot convert {type(obj).__name__} to AffinePoly")

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def decision_ids(self) -> set:
        return {k for lin in self.terms.values() for k in lin if k != CONST}

    def is_constant(self) -> bool:
        return not self.decision_ids()

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = AffinePoly.lift(other, self.nvars)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        terms = {m: dict(lin) for m, lin in self.terms.items()}
        for m, lin in other.terms.items():
            tgt = terms.setdefault(m, {})
            for k, v in lin.items():
                tgt[k] = tgt.get(k, 0.0) + v
        return AffinePoly(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-AffinePoly.lift(other, self.nvars))

    def __rsub__(self, other):
        return AffinePoly.lift(other, self.nvars) - self

    def scale(self, c: float) -> "AffinePoly":
        return AffinePoly({m: {k: v * c for k, v in lin.items()} for m, lin in self.terms.items()}, self.nvars)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.scale(float(other))
        if isinstance(other, AffinePoly):
            if other.is_constant():
                other = other.to_poly()
            elif self.is_constant():
                return other * self.to_poly()
            else:
                raise NonAffineError("product of two decision-dependent expressions")
        if not isinstance(other, Polynomial):
            return NotImplemented
        terms: dict = {}
        for m1, lin in self.terms.items():
            for m2, c in other.terms.items():
                tgt = terms.setdefault(mono_product(m1, m2), {})
                for k, v in lin.items():
                    tgt[k] = tgt.get(k, 0.0) + v * c
        return AffinePoly(terms, self.nvars)

    __rmul__ = __mul__

    def to_poly(self) -> Polynomial:
        if not self.is_constant():
            raise NonAffineError("expression depends on decision variables")
        return Polynomial({m: lin.get(CONST, 0.0) for m, lin in self.terms.items()}, self.nvars)

    def value(self, scalar_values: np.ndarray) -> Polynomial:
        terms = {}
        for m, lin in self.terms.items():
            terms[m] = sum(v * (1.0 if k == CONST else scalar_values[k]) for k, v in lin.items())
        return Polynomial(terms, self.nvars)

    def embed(self, nvars: int, index_map: Sequence[int]) -> "AffinePoly":
        terms: dict = {}
        for m, lin in self.terms.items():
            e = [0] * nvars
            for i, k in enumerate(m):
                e[index_map[i]] += k
            tgt = terms.setdefault(tuple(e), {})
            for k, v in lin.items():
                tgt[k] = tgt.get(k, 0.0) + v
        return AffinePoly(terms, nvars)

    def same_as(self, other: "AffinePoly", tol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(v) <= tol for lin in diff.terms.values() for v in lin.values())


class ExprMatrix:
    """Dense matrix of AffinePoly entries."""

    __array_ufunc__ = None

    def __init__(self, entries: Sequence[Sequence[AffinePoly]], nvars: int):
        self.entries = [list(r) for r in entries]
        self.nvars = nvars
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0

    @classmethod
    def lift(cls, obj, nvars: int) -> "ExprMatrix":
        if isinstance(obj, ExprMatrix):
            return obj
        if isinstance(obj, PolyMatrix):
            return cls([[AffinePoly.from_poly(p) for p in row] for row in obj.entries], nvars)
        if isinstance(obj, (AffinePoly, Polynomial)):
            return cls([[AffinePoly.lift(obj, nvars)]], nvars)
        A = np.atleast_2d(np.asarray(obj, dtype=float))
        return cls([[AffinePoly.constant(v, nvars) for v in row] for row in A], nvars)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["ExprMatrix"]]) -> "ExprMatrix":
        rows = []
        for brow in blocks:
            for i in range(brow[0].rows):
                rows.append([e for b in brow for e in b.entries[i]])
        return cls(rows, blocks[0][0].nvars)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def T(self) -> "ExprMatrix":
        return ExprMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.nvars)

    def __add__(self, other):
        other = ExprMatrix.lift(other, self.nvars)
        if other.shape != self.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return ExprMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.nvars)

    def __sub__(self, other):
        return self + ExprMatrix.lift(other, self.nvars).scale(-1.0)

    def scale(self, c: float) -> "ExprMatrix":
        return ExprMatrix([[e.scale(c) for e in row] for row in self.entries], self.nvars)

    def times_poly(self, p: Polynomial) -> "ExprMatrix":
        return ExprMatrix([[e * p for e in row] for row in self.entries], self.nvars)

    def _matmul(self, other: "ExprMatrix") -> "ExprMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"inner dimensions {self.shape} @ {other.shape}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = AffinePoly({}, self.nvars)
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return ExprMatrix(out, self.nvars)

    def __matmul__(self, other):
        if isinstance(other, np.ndarray):
            return self._numeric_right(other)
        return self._matmul(ExprMatrix.lift(other, self.nvars))

    def __rmatmul__(self, other):
        if isinstance(other, np.ndarray):
            return self._numeric_left(other)
        return ExprMatrix.lift(other, self.nvars)._matmul(self)

    def _numeric_left(self, A: np.ndarray) -> "ExprMatrix":
        A = np.atleast_2d(A)
        if A.shape[1] != self.rows:
            raise ShapeError(f"inner dimensions {A.shape} @ {self.shape}")
        out = []
        for i in range(A.shape[0]):
            row = []
            for j in range(self.cols):
                terms: dict = {}
                for k in range(self.rows):
                    a = A[i, k]
                    if a == 0.0:
                        continue
                    for m, lin in self.entries[k][j].terms.items():
                        tgt = terms.setdefault(m, {})
                        for key, v in lin.items():
                            tgt[key] = tgt.get(key, 0.0) + a * v
                row.append(AffinePoly(terms, self.nvars))
            out.append(row)
        return ExprMatrix(out, self.nvars)

    def _numeric_right(self, B: np.ndarray) -> "ExprMatrix":
        return self.T()._numeric_left(np.atleast_2d(B).T).T()

    def value(self, scalar_values: np.ndarray) -> PolyMatrix:
        return PolyMatrix([[e.value(scalar_values) for e in row] for row in self.entries], self.nvars)

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        if self.rows != self.cols:
            return False
        return all(
            self.entries[i][j].same_as(self.entries[j][i], tol)
            for i in range(self.rows)
            for j in range(i + 1, self.cols)
        )

    @property
    def degree(self) -> int:
        return max((e.degree for row in self.entries for e in row), default=-1)


@dataclass
class DecisionVar:
    id: int
    kind: str  # "scalar" | "symmetric-matrix" | "polynomial" | "sos-polynomial"
    name: str
    scalar_ids: list
    basis: list = field(default_factory=list)
    block: int | None = None


@dataclass
class GramBlock:
    basis: list
    nvars: int
    scalar_ids: np.ndarray  # d x d symmetric array of program scalar ids
    label: str


class SosProgram:
    """Mutable builder for an SOS program in ``nvars`` state variables."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.vars: list[DecisionVar] = []
        self.scalar_kind: list = []  # ("free",) or ("gram", block, a, b)
        self.blocks: list[GramBlock] = []
        self.equalities: list = []  # (label, AffinePoly)
        self.sos_constraints: list = []  # (label, AffinePoly)
        self.matrix_sos_constraints: list = []  # (label, ExprMatrix)
        self.objective: AffinePoly | None = None
        self.sense = "min"

    @property
    def n_scalars(self) -> int:
        return len(self.scalar_kind)

    def _free_scalar(self) -> int:
        self.scalar_kind.append(("free",))
        return len(self.scalar_kind) - 1

    def _gram_block(self, basis: list, nvars: int, label: str) -> GramBlock:
        d = len(basis)
        ids = np.zeros((d, d), dtype=int)
        blk = len(self.blocks)
        for a in range(d):
            for b in range(a, d):
                self.scalar_kind.append(("gram", blk, a, b))
                ids[a, b] = ids[b, a] = len(self.scalar_kind) - 1
        g = GramBlock(basis=list(basis), nvars=nvars, scalar_ids=ids, label=label)
        self.blocks.append(g)
        return g

    def _record(self, kind, name, ids, basis=(), block=None) -> DecisionVar:
        v = DecisionVar(id=len(self.vars), kind=kind, name=name or f"v{len(self.vars)}", scalar_ids=list(ids),
                        basis=list(basis), block=block)
        self.vars.append(v)
        return v

    # decision objects
    def add_scalar_var(self, name: str = "") -> AffinePoly:
        k = self._free_scalar()
        self._record("scalar", name, [k])
        return AffinePoly.scalar(k, self.nvars)

    def add_sym_var(self, d: int, name: str = "") -> ExprMatrix:
        ids = np.zeros((d, d), dtype=int)
        for a in range(d):
            for b in range(a, d):
                ids[a, b] = ids[b, a] = self._free_scalar()
        self._record("symmetric-matrix", name, sorted(set(ids.ravel().tolist())))
        return ExprMatrix([[AffinePoly.scalar(int(ids[a, b]), self.nvars) for b in range(d)] for a in range(d)],
                          self.nvars)

    def add_poly_var(self, degree: int, shape=(1, 1), name: str = "") -> ExprMatrix:
        """Matrix whose entries are fully parameterized polynomials of degree <= ``degree``."""
        if degree < 0:
            raise ValueError("degree must be non-negative")
        monos = monomials_up_to(self.nvars, degree)
        rows, cols = shape
        entries, ids = [], []
        for _ in range(rows):
            row = []
            for _ in range(cols):
                terms = {}
                for mono in monos:
                    k = self._free_scalar()
                    ids.append(k)
                    terms[mono] = {k: 1.0}
                row.append(AffinePoly(terms, self.nvars))
            entries.append(row)
        self._record("polynomial", name, ids, basis=monos)
        return ExprMatrix(entries, self.nvars)

    def add_sos_var(self, degree: int, name: str = "") -> AffinePoly:
        """An SOS polynomial z^T G z, G PSD, z = all monomials of degree <= degree // 2."""
        if degree < 0 or degree % 2:
            raise DegreeError("SOS decision polynomials need an even non-negative degree")
        basis = gram_basis(self.nvars, degree // 2)
        g = self._gram_block(basis, self.nvars, name or f"sosvar{len(self.vars)}")
        self._record("sos-polynomial", name, sorted(set(g.scalar_ids.ravel().tolist())), basis=basis,
                     block=len(self.blocks) - 1)
        return _gram_expression(g)

    def add_sos_vector(self, count: int, degree: int, name: str = "") -> list:
        return [self.add_sos_var(degree, f"{name}[{i}]") for i in range(count)]

    # constraints
    def add_equality(self, lhs, rhs=0.0, label: str = "") -> None:
        if isinstance(lhs, (ExprMatrix, PolyMatrix)) or isinstance(rhs, (ExprMatrix, PolyMatrix)):
            L = ExprMatrix.lift(lhs, self.nvars)
            R = ExprMatrix.lift(rhs, self.nvars) if not isinstance(rhs, (int, float)) else None
            if R is not None and R.shape != L.shape:
                raise ShapeError(f"equality shapes differ: {L.shape} vs {R.shape}")
            diff = L - R if R is not None else L
            for i in range(diff.rows):
                for j in range(diff.cols):
                    self.equalities.append((f"{label}[{i},{j}]", diff.entries[i][j]))
        else:
            diff = AffinePoly.lift(lhs, self.nvars) - AffinePoly.lift(rhs, self.nvars)
            self.equalities.append((label or f"eq{len(self.equalities)}", diff))

    def add_sos(self, expr, label: str = "") -> None:
        self.sos_constraints.append((label or f"sos{len(self.sos_constraints)}", AffinePoly.lift(expr, self.nvars)))

    def add_matrix_sos(self, S, label: str = "") -> None:
        S = ExprMatrix.lift(S, self.nvars)
        if not S.is_symmetric():
            raise ShapeError("matrix SOS constraint requires a symmetric matrix")
        self.matrix_sos_constraints.append((label or f"msos{len(self.matrix_sos_constraints)}", S))

    def minimize(self, expr) -> None:
        self.objective = AffinePoly.lift(expr, self.nvars)
        self.sense = "min"

    def maximize(self, expr) -> None:
        self.objective = AffinePoly.lift(expr, self.nvars)
        self.sense = "max"


def new_program(nvars: int = 1) -> SosProgram:
    return SosProgram(nvars)


def _gram_expression(g: GramBlock) -> AffinePoly:
    terms: dict = {}
    d = len(g.basis)
    for a in range(d):
        for b in range(a, d):
            m = mono_product(g.basis[a], g.basis[b])
            tgt = terms.setdefault(m, {})
            k = int(g.scalar_ids[a, b])
            tgt[k] = tgt.get(k, 0.0) + (1.0 if a == b else 2.0)
    return AffinePoly(terms, g.nvars)


def _half_degree(expr: AffinePoly, var_idx: Sequence[int], label: str) -> int:
    """Half of the degree in ``var_idx``; odd top degree only if decisions can cancel it."""
    degs = {m: sum(m[i] for i in var_idx) for m in expr.terms}
    top = max(degs.values(), default=0)
    if top % 2 == 0:
        return top // 2
    for m, d in degs.items():
        if d == top and set(expr.terms[m]) == {CONST}:
            raise DegreeError(f"constraint {label!r}: odd-degree term {m} with fixed coefficient cannot cancel")
    return top // 2


@dataclass(frozen=True)
class SdpProblem:
    """min c.v s.t. rows, with v = (free scalars, PSD blocks).

    Each row is ``(free_terms, psd_terms, rhs)`` where ``free_terms`` is a tuple
    of ``(j, coeff)`` and ``psd_terms`` a tuple of ``(block, a, b, coeff)``
    with a <= b, the coefficient multiplying the scalar X_block[a, b].
    """

    block_dims: tuple
    n_free: int
    rows: tuple
    obj_free: tuple = ()
    obj_psd: tuple = ()
    obj_const: float = 0.0
    obj_sign: float = 1.0  # +1 minimize, -1 the program maximized
    scalar_map: tuple = ()
    block_labels: tuple = ()
    block_bases: tuple = ()
    block_nvars: tuple = ()
    row_labels: tuple = ()

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def dense(self):
        """(A_free m x nf, [A_blk m x d x d], b, c_free, [C_blk])."""
        m = len(self.rows)
        Af = np.zeros((m, self.n_free))
        Ab = [np.zeros((m, d, d)) for d in self.block_dims]
        b = np.zeros(m)
        for i, (ft, pt, rhs) in enumerate(self.rows):
            b[i] = rhs
            for j, v in ft:
                Af[i, j] += v
            for blk, a, c, v in pt:
                if a == c:
                    Ab[blk][i, a, a] += v
                else:
                    Ab[blk][i, a, c] += 0.5 * v
                    Ab[blk][i, c, a] += 0.5 * v
        cf = np.zeros(self.n_free)
        for j, v in self.obj_free:
            cf[j] += v
        Cb = [np.zeros((d, d)) for d in self.block_dims]
        for blk, a, c, v in self.obj_psd:
            if a == c:
                Cb[blk][a, a] += v
            else:
                Cb[blk][a, c] += 0.5 * v
                Cb[blk][c, a] += 0.5 * v
        return Af, Ab, b, cf, Cb

    def scalar_values(self, free: np.ndarray, blocks: Sequence[np.ndarray]) -> np.ndarray:
        vals = np.zeros(len(self.scalar_map))
        for k, ref in enumerate(self.scalar_map):
            if ref[0] == "free":
                vals[k] = free[ref[1]]
            else:
                vals[k] = blocks[ref[1]][ref[2], ref[3]]
        return vals

    def dump(self) -> str:
        """Sparse text form used for golden tests and external backends."""
        out = ["SDP 1", "blocks " + " ".join(str(d) for d in (len(self.block_dims),) + tuple(self.block_dims)),
               f"free {self.n_free}", f"rows {len(self.rows)}",
               f"objective {_num(self.obj_sign)} {_num(self.obj_const)}"]
        for j, v in self.obj_free:
            out.append(f"c f {j} {_num(v)}")
        for blk, a, b, v in self.obj_psd:
            out.append(f"c s {blk} {a} {b} {_num(v)}")
        for i, (ft, pt, rhs) in enumerate(self.rows):
            out.append(f"row {i} {_num(rhs)}")
            for j, v in ft:
                out.append(f"f {j} {_num(v)}")
            for blk, a, b, v in pt:
                out.append(f"s {blk} {a} {b} {_num(v)}")
        return "\n".join(out) + "\n"

    @classmethod
    def parse(cls, text: str) -> "SdpProblem":
        lines = [ln.split() for ln in text.strip().splitlines()]
        if lines[0][:1] != ["SDP"]:
            raise ValueError("not an SDP dump")
        nblk = int(lines[1][1])
        dims = tuple(int(t) for t in lines[1][2 : 2 + nblk])
        n_free = int(lines[2][1])
        sign, const = float(lines[4][1]), float(lines[4][2])
        obj_free, obj_psd, rows = [], [], []
        cur = None
        for tok in lines[5:]:
            if tok[0] == "c" and tok[1] == "f":
                obj_free.append((int(tok[2]), float(tok[3])))
            elif tok[0] == "c":
                obj_psd.append((int(tok[2]), int(tok[3]), int(tok[4]), float(tok[5])))
            elif tok[0] == "row":
                cur = ([], [], float(tok[2]))
                rows.append(cur)
            elif tok[0] == "f":
                cur[0].append((int(tok[1]), float(tok[2])))
            elif tok[0] == "s":
                cur[1].append((int(tok[1]), int(tok[2]), int(tok[3]), float(tok[4])))
        rows = tuple((tuple(f), tuple(p), r) for f, p, r in rows)
        return cls(block_dims=dims, n_free=n_free, rows=rows, obj_free=tuple(obj_free), obj_psd=tuple(obj_psd),
                   obj_const=const, obj_sign=sign)


def _num(v) -> str:
    """Shortest round-trip text for a float (also for numpy scalars)."""
    return repr(float(v))


def _y_lift(S: ExprMatrix, nvars: int) -> AffinePoly:
    d = S.rows
    ext = nvars + d
    idx = list(range(nvars))
    total = AffinePoly({}, ext)
    for i in range(d):
        for j in range(i, d):
            e = S.entries[i][j]
            if e.is_zero():
                continue
            ymono = [0] * ext
            ymono[nvars + i] += 1
            ymono[nvars + j] += 1
            factor = Polynomial.monomial(tuple(ymono), 1.0 if i == j else 2.0)
            total = total + e.embed(ext, idx) * factor
    return total


def compile(prog: SosProgram) -> SdpProblem:  # noqa: A001 - mirrors the builder vocabulary
    """Turn the program into SDP rows; blocks keep insertion order, rows follow grlex."""
    # work on copies of the scalar table so compiling twice is side-effect free
    kinds = list(prog.scalar_kind)
    blocks = list(prog.blocks)
    equalities = list(prog.equalities)

    def new_block(basis, nvars, label):
        d = len(basis)
        ids = np.zeros((d, d), dtype=int)
        blk = len(blocks)
        for a in range(d):
            for b in range(a, d):
                kinds.append(("gram", blk, a, b))
                ids[a, b] = ids[b, a] = len(kinds) - 1
        g = GramBlock(basis=list(basis), nvars=nvars, scalar_ids=ids, label=label)
        blocks.append(g)
        return g

    for label, expr in prog.sos_constraints:
        h = _half_degree(expr, range(prog.nvars), label)
        g = new_block(gram_basis(prog.nvars, h), prog.nvars, label)
        equalities.append((label, expr - _gram_expression(g)))

    for label, S in prog.matrix_sos_constraints:
        d = S.rows
        lifted = _y_lift(S, prog.nvars)
        h = _half_degree(lifted, range(prog.nvars), label)
        basis = gram_basis(prog.nvars + d, h + 1, linear_in=range(prog.nvars, prog.nvars + d))
        g = new_block(basis, prog.nvars + d, label)
        equalities.append((label, lifted - _gram_expression(g)))

    free_index = {}
    scalar_map = []
    for k, kind in enumerate(kinds):
        if kind[0] == "free":
            free_index[k] = len(free_index)
            scalar_map.append(("free", free_index[k]))
        else:
            scalar_map.append(("psd", kind[1], kind[2], kind[3]))

    def split(lin: dict):
        ft, pt, const = {}, {}, 0.0
        for k, v in lin.items():
            if k == CONST:
                const += v
            elif kinds[k][0] == "free":
                j = free_index[k]
                ft[j] = ft.get(j, 0.0) + v
            else:
                key = kinds[k][1:]
                pt[key] = pt.get(key, 0.0) + v
        return (tuple(sorted(ft.items())),
                tuple((blk, a, b, v) for (blk, a, b), v in sorted(pt.items())),
                const)

    rows, labels = [], []
    for label, expr in equalities:
        for mono in sorted_grlex(expr.terms):
            ft, pt, const = split(expr.terms[mono])
            if not ft and not pt and const == 0.0:
                continue
            rows.append((ft, pt, -const))
            labels.append(f"{label}@{mono}")

    obj_free, obj_psd, obj_const, sign = (), (), 0.0, 1.0
    if prog.objective is not None:
        if prog.objective.degree > 0:
            raise DegreeError("objective must be a constant polynomial in the state")
        sign = 1.0 if prog.sense == "min" else -1.0
        lin = prog.objective.terms.get((0,) * prog.nvars, {})
        obj_free, obj_psd, obj_const = split({k: sign * v for k, v in lin.items()})

    return SdpProblem(
        block_dims=tuple(len(g.basis) for g in blocks),
        n_free=len(free_index),
        rows=tuple(rows),
        obj_free=obj_free,
        obj_psd=obj_psd,
        obj_const=obj_const,
        obj_sign=sign,
        scalar_map=tuple(scalar_map),
        block_labels=tuple(g.label for g in blocks),
        block_bases=tuple(tuple(g.basis) for g in blocks),
        block_nvars=tuple(g.nvars for g in blocks),
        row_labels=tuple(labels),
    )
