"""Run configuration: one TOML or JSON file describes a full case study."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import tomli

from .data import MonomialBasis
from .poly import parse_monomial
from .sdp import SolverOptions
from .synthesis import SemiAlgebraicSet
from .verify import VerifySettings


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    monomials: tuple = ()
    max_degree: int | None = None


@dataclass(frozen=True)
class SetSpec:
    state: tuple = ()
    initial: tuple = ()
    unsafe: tuple = ()


@dataclass(frozen=True)
class SynthesisSpec:
    degH: int | None = None
    deg_lambda: int = 2
    deg_lambda_levels: int = 2
    epsilon: float = 1e-6
    delta: float | None = None


@dataclass(frozen=True)
class SolverSpec:
    feas_tol: float = 1e-8
    max_iter: int = 200
    backend: str = "builtin"


@dataclass(frozen=True)
class VerifySpec:
    density: int | None = None
    samples: int = 500
    theta_samples: int = 50
    rollouts: int = 100
    horizon: int = 100


@dataclass(frozen=True)
class RunConfig:
    name: str
    data: Path
    n: int
    m: int
    basis: BasisSpec = field(default_factory=BasisSpec)
    theta_overrides: tuple = ()  # (monomial text, variable index 0-based)
    sets: SetSpec = field(default_factory=SetSpec)
    synthesis: SynthesisSpec = field(default_factory=SynthesisSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    verify: VerifySpec = field(default_factory=VerifySpec)
    out_dir: Path = Path("out")
    seed: int = 0

    def monomial_basis(self) -> MonomialBasis:
        if self.basis.monomials:
            return MonomialBasis.parse(list(self.basis.monomials), self.n)
        return MonomialBasis.up_to_degree(self.n, self.basis.max_degree)

    def overrides(self) -> dict:
        return {parse_monomial(k, self.n): j for k, j in self.theta_overrides}

    @property
    def degH(self) -> int:
        if self.synthesis.degH is not None:
            return self.synthesis.degH
        return max(self.monomial_basis().max_degree - 1, 0)

    def state_set(self) -> SemiAlgebraicSet:
        return SemiAlgebraicSet.from_boxes(self.sets.state)

    def initial_set(self) -> SemiAlgebraicSet:
        return SemiAlgebraicSet.from_boxes(self.sets.initial)

    def unsafe_set(self) -> SemiAlgebraicSet:
        return SemiAlgebraicSet.from_boxes(self.sets.unsafe)

    def solver_options(self) -> SolverOptions:
        return SolverOptions(feas_tol=self.solver.feas_tol, max_iter=self.solver.max_iter,
                             backend=self.solver.backend)

    def verify_settings(self) -> VerifySettings:
        v = self.verify
        return VerifySettings(density=v.density, samples=v.samples, theta_samples=v.theta_samples,
                              rollouts=v.rollouts, horizon=v.horizon, seed=self.seed)

    def with_overrides(self, **kw) -> "RunConfig":
        """Apply CLI flags (None values are ignored)."""
        kw = {k: v for k, v in kw.items() if v is not None}
        solver = {k: kw.pop(k) for k in ("feas_tol", "max_iter", "backend") if k in kw}
        synth = {"epsilon": kw.pop("epsilon")} if "epsilon" in kw else {}
        cfg = replace(self, solver=replace(self.solver, **solver), synthesis=replace(self.synthesis, **synth), **kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be positive")
        if not self.data.exists():
            raise ConfigError(f"data: file {self.data} does not exist")
        if not self.basis.monomials and not self.basis.max_degree:
            raise ConfigError("basis: give either 'monomials' or 'max_degree'")
        try:
            basis = self.monomial_basis()
            for mono, j in self.overrides().items():
                if mono not in basis.entries:
                    raise ConfigError(f"theta.overrides: {mono} is not a basis monomial")
                if not 0 <= j < self.n or mono[j] < 1:
                    raise ConfigError(f"theta.overrides: x{j + 1} does not divide the monomial {mono}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"basis: {exc}") from None
        boxes = {}
        for key in ("state", "initial", "unsafe"):
            spec = getattr(self.sets, key)
            if not spec:
                raise ConfigError(f"sets.{key}: at least one box is required")
            for j, box in enumerate(spec):
                if len(box) != self.n:
                    raise ConfigError(f"sets.{key}[{j}]: expected {self.n} intervals, got {len(box)}")
                for i, side in enumerate(box):
                    if len(side) != 2 or not side[0] < side[1]:
                        raise ConfigError(f"sets.{key}[{j}][{i}]: interval {list(side)} must satisfy a < b")
            boxes[key] = SemiAlgebraicSet.from_boxes(spec)
        if len(self.sets.state) != 1:
            raise ConfigError("sets.state: the state set must be a single box")
        for b0 in boxes["initial"].boxes:
            for bu in boxes["unsafe"].boxes:
                if b0.overlaps(bu):
                    raise ConfigError("sets: initial and unsafe boxes overlap")
        s = self.synthesis
        if s.degH is not None and s.degH < 0:
            raise ConfigError("synthesis.degH must be non-negative")
        for k in ("deg_lambda", "deg_lambda_levels"):
            v = getattr(s, k)
            if v < 0 or v % 2:
                raise ConfigError(f"synthesis.{k} must be a non-negative even integer")
        if s.epsilon <= 0:
            raise ConfigError("synthesis.epsilon must be positive")
        if s.delta is not None and s.delta < 0:
            raise ConfigError("synthesis.delta must be non-negative")
        try:
            self.solver_options()
        except ValueError as exc:
            raise ConfigError(f"solver: {exc}") from None
        if self.verify.density is not None and self.verify.density < 2:
            raise ConfigError("verify.density must be at least 2")


_SECTIONS = {"basis": BasisSpec, "sets": SetSpec, "synthesis": SynthesisSpec, "solver": SolverSpec,
             "verify": VerifySpec}
_TOP = {"name", "data", "n", "m", "basis", "theta", "sets", "synthesis", "solver", "verify", "output", "seed"}


def _section(cls, raw, path: str):
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a table")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {', '.join(path + '.' + u for u in unknown)}")
    vals = {}
    for k, v in raw.items():
        vals[k] = _freeze(v)
    try:
        return cls(**vals)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _freeze(v):
    if isinstance(v, list):
        return tuple(_freeze(x) for x in v)
    return v


def parse_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        raw = json.loads(text) if path.suffix == ".json" else tomli.loads(text)
    except (json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from None
    unknown = sorted(set(raw) - _TOP)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    for req in ("name", "data", "n", "m", "basis", "sets"):
        if req not in raw:
            raise ConfigError(f"missing required key '{req}'")
    base = path.parent
    kw = {"name": str(raw["name"]), "data": (base / raw["data"]).resolve(), "n": raw["n"], "m": raw["m"]}
    for key, cls in _SECTIONS.items():
        if key in raw:
            kw[key] = _section(cls, raw[key], key)
    theta = raw.get("theta", {})
    if set(theta) - {"overrides"}:
        raise ConfigError(f"theta: unknown key(s) {sorted(set(theta) - {'overrides'})}")
    ov = []
    for mono, var in sorted(theta.get("overrides", {}).items()):
        if not (isinstance(var, str) and var.startswith("x") and var[1:].isdigit()):
            raise ConfigError(f"theta.overrides.{mono}: expected a variable name like 'x2', got {var!r}")
        ov.append((mono, int(var[1:]) - 1))
    kw["theta_overrides"] = tuple(ov)
    output = raw.get("output", {})
    if set(output) - {"dir"}:
        raise ConfigError(f"output: unknown key(s) {sorted(set(output) - {'dir'})}")
    if "dir" in output:
        kw["out_dir"] = (base / output["dir"]).resolve()
    if "seed" in raw:
        kw["seed"] = int(raw["seed"])
    if not isinstance(kw["n"], int) or not isinstance(kw["m"], int):
        raise ConfigError("n and m must be integers")
    try:
        cfg = RunConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg
