"""Single-trajectory ingestion, monomial lifting, rank check and the transform Theta(x)."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .poly import (
    Monomial,
    PolyMatrix,
    Polynomial,
    eval_monomials,
    monomials_up_to,
    mono_text,
    parse_monomial,
)

RANK_RTOL = 1e-10


class SchemaError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


class AssignmentError(ValueError):
    pass


@dataclass(frozen=True)
class TrajectoryData:
    U_minus: np.ndarray  # m x T
    X_minus: np.ndarray  # n x T
    X_plus: np.ndarray  # n x T

    def __post_init__(self):
        T = self.X_minus.shape[1]
        if self.U_minus.shape[1] != T or self.X_plus.shape[1] != T:
            raise SchemaError("U_minus, X_minus and X_plus must have the same number of columns")
        if self.X_plus.shape[0] != self.X_minus.shape[0]:
            raise SchemaError("X_minus and X_plus must have the same number of rows")

    @property
    def n(self) -> int:
        return self.X_minus.shape[0]

    @property
    def m(self) -> int:
        return self.U_minus.shape[0]

    @property
    def T(self) -> int:
        return self.X_minus.shape[1]

    @classmethod
    def from_states(cls, states: np.ndarray, inputs: np.ndarray) -> "TrajectoryData":
        """states: n x (T+1) contiguous record; inputs: m x T (or wider, extra columns ignored)."""
        states = np.atleast_2d(np.asarray(states, dtype=float))
        T = states.shape[1] - 1
        if T < 1:
            raise InsufficientDataError("need at least two state samples")
        inputs = np.atleast_2d(np.asarray(inputs, dtype=float))[:, :T]
        return cls(U_minus=inputs.copy(), X_minus=states[:, :T].copy(), X_plus=states[:, 1:].copy())


def load_trajectory(path, n: int, m: int) -> TrajectoryData:
    """Read the ``k,x1..xn,u1..um`` CSV; the last row's inputs may be blank."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows:
        raise SchemaError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    expected = ["k"] + [f"x{i + 1}" for i in range(n)] + [f"u{j + 1}" for j in range(m)]
    if header != expected:
        raise SchemaError(f"{path}: header {header} != {expected}")
    body = rows[1:]
    if len(body) < 2:
        raise InsufficientDataError(f"{path}: need at least 2 data rows, got {len(body)}")
    states, inputs = [], []
    for lineno, row in enumerate(body, start=2):
        if len(row) != 1 + n + m:
            raise SchemaError(f"{path}:{lineno}: expected {1 + n + m} cells, got {len(row)}")
        try:
            states.append([float(c) for c in row[1 : 1 + n]])
            cells = [c.strip() for c in row[1 + n :]]
            last = lineno == len(body) + 1
            if last and all(c == "" for c in cells):
                inputs.append([np.nan] * m)
            else:
                inputs.append([float(c) for c in cells])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: {exc}") from None
    X = np.array(states).T
    U = np.array(inputs).T
    return TrajectoryData.from_states(X, U)


@dataclass(frozen=True)
class MonomialBasis:
    entries: tuple  # of Monomial
    nvars: int

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("basis entries must be distinct")
        for e in self.entries:
            if len(e) != self.nvars:
                raise ValueError(f"monomial {e} does not have {self.nvars} exponents")
            if sum(e) < 1:
                raise ValueError("constant monomial cannot be written as Theta(x) x")
        for i in range(self.nvars):
            unit = tuple(1 if k == i else 0 for k in range(self.nvars))
            if unit not in self.entries:
                raise ValueError(f"basis must contain the degree-1 monomial x{i + 1}")

    @property
    def M(self) -> int:
        return len(self.entries)

    @property
    def max_degree(self) -> int:
        return max(sum(e) for e in self.entries)

    @classmethod
    def up_to_degree(cls, nvars: int, max_deg: int) -> "MonomialBasis":
        """All monomials of degree 1..max_deg, ascending graded-lex."""
        return cls(tuple(monomials_up_to(nvars, max_deg, min_deg=1)), nvars)

    @classmethod
    def parse(cls, texts: Sequence[str], nvars: int) -> "MonomialBasis":
        return cls(tuple(parse_monomial(t, nvars) for t in texts), nvars)

    def eval(self, points) -> np.ndarray:
        """(N, M) array of monomial values."""
        return eval_monomials(list(self.entries), points)

    def as_polys(self) -> list:
        return [Polynomial.monomial(e) for e in self.entries]

    def labels(self) -> list:
        return [mono_text(e) for e in self.entries]


@dataclass(frozen=True)
class TransformMap:
    basis: MonomialBasis
    assignment: tuple  # variable index per basis row (0-based)
    theta: PolyMatrix  # M x n


def build_transform(basis: MonomialBasis, overrides: Mapping | None = None) -> TransformMap:
    """Theta(x) with exactly one nonzero per row so that Theta(x) x = basis(x).

    Row i is placed in the lowest-index variable dividing the monomial unless
    ``overrides`` maps that row (by index or by monomial) to another variable.
    """
    n = basis.nvars
    chosen = {}
    for key, j in (overrides or {}).items():
        row = basis.entries.index(tuple(key)) if not isinstance(key, (int, np.integer)) else int(key)
        chosen[row] = int(j)
    assignment = []
    rows = []
    for i, mono in enumerate(basis.entries):
        j = chosen.get(i, next(k for k, e in enumerate(mono) if e > 0))
        if not 0 <= j < n or mono[j] < 1:
            raise AssignmentError(f"cannot factor x{j + 1} out of {mono_text(mono)}")
        assignment.append(j)
        quotient = list(mono)
        quotient[j] -= 1
        row = [Polynomial.zero(n) for _ in range(n)]
        row[j] = Polynomial.monomial(tuple(quotient))
        rows.append(row)
    return TransformMap(basis=basis, assignment=tuple(assignment), theta=PolyMatrix(rows, n))


@dataclass(frozen=True)
class LiftedData:
    M_minus: np.ndarray
    rank: int
    singular_values: np.ndarray = field(repr=False)


def numeric_rank(A: np.ndarray, rtol: float = RANK_RTOL) -> tuple:
    sv = np.linalg.svd(np.atleast_2d(A), compute_uv=False) if A.size else np.zeros(0)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, sv
    return int(np.sum(sv > rtol * sv[0])), sv


def build_lifted_matrix(traj: TrajectoryData, basis: MonomialBasis) -> LiftedData:
    if basis.nvars != traj.n:
        raise ValueError(f"basis has {basis.nvars} variables, trajectory has n={traj.n}")
    Mm = basis.eval(traj.X_minus.T).T
    rank, sv = numeric_rank(Mm)
    return LiftedData(M_minus=Mm, rank=rank, singular_values=sv)


@dataclass(frozen=True)
class RankReport:
    M: int
    T: int
    rank: int
    passed: bool
    sigma_min_rel: float

    def summary(self) -> str:
        return f"M={self.M}, T={self.T}, rank={self.rank}, {'PASS' if self.passed else 'FAIL'}"


def check_persistency(lift: LiftedData) -> RankReport:
    M, T = lift.M_minus.shape
    sv = lift.singular_values
    rel = float(sv[min(M, T) - 1] / sv[0]) if sv.size and sv[0] > 0 else 0.0
    return RankReport(M=M, T=T, rank=lift.rank, passed=(T >= M and lift.rank == M), sigma_min_rel=rel)
