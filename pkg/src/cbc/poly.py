"""Sparse multivariate polynomials and polynomial matrices with float coefficients.

Monomials are plain exponent tuples.  Terms are kept in a dict keyed by the
exponent tuple; every public constructor normalizes, i.e. drops exact zero
coefficients.  No magnitude cutoff is applied: certificates are rescaled over
many orders of magnitude, so "small" is not a property of a coefficient alone.
Values are treated as immutable.
"""
from __future__ import annotations

import itertools
import re
from typing import Iterable, Sequence

import numpy as np


Monomial = tuple


class VariableCountError(ValueError):
    """Operands live in polynomial rings with different variable counts."""


def degree(mono: Monomial) -> int:
    return sum(mono)


def grlex_key(mono: Monomial):
    """Sort key for graded-lex order (ascending); x1 ranks above x2 within a degree."""
    return (sum(mono), tuple(mono))


def sorted_grlex(monos: Iterable[Monomial], descending: bool = False) -> list:
    return sorted(monos, key=grlex_key, reverse=descending)


def monomials_up_to(nvars: int, max_deg: int, min_deg: int = 0) -> list:
    """All exponent tuples with min_deg <= total degree <= max_deg, ascending grlex."""
    out = []
    for d in range(min_deg, max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted_grlex(out)


def gram_basis(nvars: int, max_deg: int, linear_in: Sequence[int] | None = None) -> list:
    """Monomial basis for a Gram-matrix parameterization.

    Without ``linear_in`` this is every monomial of degree <= max_deg.  With it,
    only monomials whose degree in the ``linear_in`` variables is exactly one
    (used for the y-lifting of matrix SOS constraints).
    """
    if max_deg < 0:
        raise ValueError("max_deg must be non-negative")
    monos = monomials_up_to(nvars, max_deg)
    if linear_in is None:
        return monos
    lin = list(linear_in)
    return [m for m in monos if sum(m[i] for i in lin) == 1]


def mono_product(a: Monomial, b: Monomial) -> Monomial:
    return tuple(i + j for i, j in zip(a, b))


def mono_text(mono: Monomial, names: Sequence[str] | None = None) -> str:
    names = names or [f"x{i + 1}" for i in range(len(mono))]
    parts = []
    for name, e in zip(names, mono):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


_FACTOR = re.compile(r"^\s*x(\d+)\s*(?:\^\s*(\d+))?\s*$")


def parse_monomial(text: str, nvars: int) -> Monomial:
    """Parse ``"x1^2*x3"`` style text into an exponent tuple."""
    e = [0] * nvars
    text = text.strip()
    if text == "1":
        return tuple(e)
    for factor in text.split("*"):
        m = _FACTOR.match(factor)
        if m is None:
            raise ValueError(f"cannot parse monomial factor {factor!r} in {text!r}")
        idx = int(m.group(1)) - 1
        if not 0 <= idx < nvars:
            raise ValueError(f"variable x{idx + 1} out of range for {nvars} variables")
        e[idx] += int(m.group(2) or 1)
    return tuple(e)


def eval_monomials(monos: Sequence[Monomial], points: np.ndarray) -> np.ndarray:
    """Evaluate monomials at many points: returns array (len(points), len(monos))."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not monos:
        return np.zeros((points.shape[0], 0))
    exps = np.array(monos, dtype=int)
    if exps.shape[1] != points.shape[1]:
        raise VariableCountError(f"points have {points.shape[1]} coordinates, monomials {exps.shape[1]}")
    out = np.ones((points.shape[0], len(monos)))
    for j in range(exps.shape[1]):
        col = exps[:, j]
        if col.any():
            out *= points[:, j : j + 1] ** col[None, :]
    return out


class Polynomial:
    """Sparse polynomial ``sum_k c_k x^{e_k}`` in a fixed number of variables."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 1):
        self.nvars = int(nvars)
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars:
                raise VariableCountError(f"monomial {mono} does not have {self.nvars} exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = float(c)
            if c != 0.0:
                clean[mono] = clean.get(mono, 0.0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0.0}

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c: float, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int) -> "Polynomial":
        """The coordinate polynomial x_{i+1} (0-based index)."""
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1.0}, nvars)

    @classmethod
    def monomial(cls, mono: Monomial, coeff: float = 1.0) -> "Polynomial":
        return cls({tuple(mono): coeff}, len(mono))

    @classmethod
    def quadratic_form(cls, P: np.ndarray) -> "Polynomial":
        """x^T P x for a symmetric matrix P."""
        P = np.asarray(P, dtype=float)
        n = P.shape[0]
        terms = {}
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                terms[tuple(e)] = terms.get(tuple(e), 0.0) + P[i, j]
        return cls(terms, n)

    # basic queries
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self.terms), default=-1)

    def coeff(self, mono: Monomial) -> float:
        return self.terms.get(tuple(mono), 0.0)

    def monomials(self) -> list:
        return sorted_grlex(self.terms)

    def normalized(self) -> "Polynomial":
        return Polynomial(self.terms, self.nvars)

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise VariableCountError(f"{self.nvars} vs {other.nvars} variables")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(float(other), self.nvars)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, c in other.terms.items():
            terms[m] = terms.get(m, 0.0) + c
        return Polynomial(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial({m: c * float(other) for m, c in self.terms.items()}, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        terms: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_product(m1, m2)
                terms[m] = terms.get(m, 0.0) + c1 * c2
        return Polynomial(terms, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.constant(1.0, self.nvars)
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(other, self.nvars)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def allclose(self, other: "Polynomial", atol: float = 1e-9) -> bool:
        self._check(other)
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    # evaluation
    def __call__(self, point) -> float:
        return self.eval(point)

    def eval(self, point) -> float:
        point = np.asarray(point, dtype=float).ravel()
        if point.size != self.nvars:
            raise VariableCountError(f"point has {point.size} coordinates, polynomial {self.nvars} variables")
        total = 0.0
        for m, c in self.terms.items():
            total += c * float(np.prod(point ** np.array(m)))
        return total

    def eval_many(self, points) -> np.ndarray:
        monos = list(self.terms)
        coeffs = np.array([self.terms[m] for m in monos])
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.nvars:
            raise VariableCountError(f"points have {points.shape[1]} coordinates, polynomial {self.nvars} variables")
        if not monos:
            return np.zeros(points.shape[0])
        return eval_monomials(monos, points) @ coeffs

    def substitute_vars(self, nvars: int, index_map: Sequence[int]) -> "Polynomial":
        """Re-embed into a ring with ``nvars`` variables; variable i goes to index_map[i]."""
        terms = {}
        for m, c in self.terms.items():
            e = [0] * nvars
            for i, k in enumerate(m):
                e[index_map[i]] += k
            terms[tuple(e)] = terms.get(tuple(e), 0.0) + c
        return Polynomial(terms, nvars)

    # rendering
    def to_text(self, names: Sequence[str] | None = None, fmt: str = "{:.12g}") -> str:
        """Canonical text: descending graded-lex, explicit ``^`` and ``*``."""
        if not self.terms:
            return "0"
        out = []
        for i, m in enumerate(sorted_grlex(self.terms, descending=True)):
            c = self.terms[m]
            mag = fmt.format(abs(c))
            body = mono_text(m, names)
            term = mag if body == "1" else f"{mag}*{body}"
            if i == 0:
                out.append(term if c >= 0 else f"-{term}")
            else:
                out.append(f"+ {term}" if c >= 0 else f"- {term}")
        return " ".join(out)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self.to_text()!r}, nvars={self.nvars})"


class PolyMatrix:
    """Dense rows x cols grid of Polynomials sharing one variable count."""

    __array_ufunc__ = None  # let numpy defer to __rmatmul__

    def __init__(self, entries: Sequence[Sequence[Polynomial]], nvars: int | None = None, symmetric: bool = False):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if nvars is None:
            nvars = self.entries[0][0].nvars if self.rows and self.cols else 1
        self.nvars = nvars
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged PolyMatrix")
            for p in row:
                if p.nvars != nvars:
                    raise VariableCountError("all entries must share the variable count")
        self.symmetric = symmetric
        if symmetric:
            if self.rows != self.cols:
                raise ValueError("symmetric PolyMatrix must be square")
            for i in range(self.rows):
                for j in range(i + 1, self.cols):
                    if self.entries[i][j] != self.entries[j][i]:
                        raise ValueError(f"entry ({i},{j}) differs from ({j},{i})")

    @classmethod
    def zeros(cls, rows: int, cols: int, nvars: int) -> "PolyMatrix":
        return cls([[Polynomial.zero(nvars) for _ in range(cols)] for _ in range(rows)], nvars)

    @classmethod
    def from_array(cls, A, nvars: int) -> "PolyMatrix":
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return cls([[Polynomial.constant(v, nvars) for v in row] for row in A], nvars)

    @classmethod
    def from_coeffs(cls, coeffs: dict, nvars: int) -> "PolyMatrix":
        """Build from {monomial: numeric matrix}."""
        shape = next(iter(coeffs.values())).shape
        out = [[{} for _ in range(shape[1])] for _ in range(shape[0])]
        for mono, C in coeffs.items():
            for i in range(shape[0]):
                for j in range(shape[1]):
                    if C[i, j] != 0.0:
                        out[i][j][tuple(mono)] = C[i, j]
        return cls([[Polynomial(t, nvars) for t in row] for row in out], nvars)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def T(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.nvars)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.nvars
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "PolyMatrix":
        return PolyMatrix([[p * c for p in row] for row in self.entries], self.nvars)

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ValueError("inner dimensions differ")
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = Polynomial.zero(self.nvars)
                    for k in range(self.cols):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                    row.append(acc)
                out.append(row)
            return PolyMatrix(out, self.nvars)
        B = np.atleast_2d(np.asarray(other, dtype=float))
        coeffs = self.coeffs()
        return PolyMatrix.from_coeffs({m: C @ B for m, C in coeffs.items()}, self.nvars) if coeffs else PolyMatrix.zeros(self.rows, B.shape[1], self.nvars)

    def __rmatmul__(self, other):
        A = np.atleast_2d(np.asarray(other, dtype=float))
        coeffs = self.coeffs()
        if not coeffs:
            return PolyMatrix.zeros(A.shape[0], self.cols, self.nvars)
        return PolyMatrix.from_coeffs({m: A @ C for m, C in coeffs.items()}, self.nvars)

    def coeffs(self) -> dict:
        """{monomial: numeric coefficient matrix}, ascending grlex order."""
        monos = set()
        for row in self.entries:
            for p in row:
                monos.update(p.terms)
        out = {}
        for m in sorted_grlex(monos):
            C = np.zeros(self.shape)
            for i in range(self.rows):
                for j in range(self.cols):
                    C[i, j] = self.entries[i][j].coeff(m)
            out[m] = C
        return out

    @property
    def degree(self) -> int:
        return max((p.degree for row in self.entries for p in row), default=-1)

    def max_abs_coeff(self) -> float:
        return max((p.max_abs_coeff() for row in self.entries for p in row), default=0.0)

    def eval(self, point) -> np.ndarray:
        point = np.asarray(point, dtype=float).ravel()
        if point.size != self.nvars:
            raise VariableCountError(f"point has {point.size} coordinates, matrix {self.nvars} variables")
        out = np.array([[p.eval(point) for p in row] for row in self.entries]).reshape(self.shape)
        if self.symmetric:
            out = 0.5 * (out + out.T)
        return out

    def eval_many(self, points) -> np.ndarray:
        """Evaluate at many points: returns (N, rows, cols)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        coeffs = self.coeffs()
        if not coeffs:
            return np.zeros((points.shape[0],) + self.shape)
        monos = list(coeffs)
        V = eval_monomials(monos, points)
        stack = np.stack([coeffs[m] for m in monos])
        return np.einsum("pk,kij->pij", V, stack)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.shape == other.shape and self.entries == other.entries

    def to_text(self, names=None) -> str:
        return "\n".join("[" + ", ".join(p.to_text(names) for p in row) + "]" for row in self.entries)
