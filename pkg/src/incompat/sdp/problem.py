"""Problem and solution containers for the block SDP engine.

Standard form solved by the engine::

    minimize   sum_b <C_b, X_b> + offset
    subject to sum_b L_{F,b}(X_b) = rhs_F     for every constraint family F
               X_b PSD (or free for blocks flagged ``free``)

A family is a matrix-valued (Hermitian or real symmetric) or vector-valued
equality; its scalar constraints are the coordinates of its value in an
orthonormal basis.  Maximization problems are negated internally.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .. import linalg as la
from ..errors import NotHermitian, ShapeError

SQRT2 = np.sqrt(2.0)


class Space:
    """Orthonormal coordinates for Hermitian (``herm``), real symmetric
    (``sym``) matrices of side k, or plain real vectors (``vec``) of length k."""

    _cache = {}

    def __new__(cls, kind, k):
        key = (kind, int(k))
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._init(kind, int(k))
            cls._cache[key] = obj
        return cls._cache[key]

    def _init(self, kind, k):
        if kind not in ("herm", "sym", "vec"):
            raise ValueError(f"unknown space kind {kind!r}")
        self.kind, self.k = kind, k
        self.iu = np.triu_indices(k, 1)
        p = k * (k - 1) // 2
        self.dim = {"herm": k * k, "sym": k + p, "vec": k}[kind]
        self._basis = None

    def __reduce__(self):
        return (Space, (self.kind, self.k))

    def coords(self, y):
        """Coordinates of a batch of values, shape (..., dim)."""
        if self.kind == "vec":
            return np.real(y)
        diag = np.real(np.diagonal(y, axis1=-2, axis2=-1))
        up = y[..., self.iu[0], self.iu[1]]
        if self.kind == "sym":
            return np.concatenate([diag, SQRT2 * np.real(up)], axis=-1)
        return np.concatenate([diag, SQRT2 * up.real, SQRT2 * up.imag], axis=-1)

    def value(self, c):
        """Inverse of :meth:`coords`."""
        c = np.asarray(c, dtype=float)
        if self.kind == "vec":
            return c
        k = self.k
        p = k * (k - 1) // 2
        dtype = complex if self.kind == "herm" else float
        y = np.zeros(c.shape[:-1] + (k, k), dtype=dtype)
        idx = np.arange(k)
        y[..., idx, idx] = c[..., :k]
        if self.kind == "sym":
            up = c[..., k:k + p] / SQRT2
        else:
            up = (c[..., k:k + p] + 1j * c[..., k + p:]) / SQRT2
        y[..., self.iu[0], self.iu[1]] = up
        y[..., self.iu[1], self.iu[0]] = np.conj(up)
        return y

    def basis(self):
        if self._basis is None:
            self._basis = self.value(np.eye(self.dim))
        return self._basis


@dataclass
class Block:
    name: str
    size: int
    complex: bool = True  # Hermitian (True) or real symmetric (False)
    free: bool = False  # unconstrained instead of PSD

    @property
    def space(self):
        return Space("herm" if self.complex else "sym", self.size)


@dataclass
class Family:
    """Equality sum_b terms[b](X_b) = rhs with values in ``space``."""

    name: str
    space: Space
    terms: Dict[str, object]
    rhs: np.ndarray


@dataclass
class SdpProblem:
    blocks: List[Block]
    families: List[Family]
    objective: Dict[str, np.ndarray] = field(default_factory=dict)
    offset: float = 0.0
    sense: str = "min"
    value_scale: float = 1.0  # reported values are divided by this (realified programs use 2)

    def block(self, name) -> Block:
        for b in self.blocks:
            if b.name == name:
                return b
        raise KeyError(name)

    def validate(self):
        names = [b.name for b in self.blocks]
        if len(set(names)) != len(names):
            raise ShapeError("duplicate block names")
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        for name, c in self.objective.items():
            b = self.block(name)
            c = np.asarray(c)
            if c.shape != (b.size, b.size):
                raise ShapeError(f"objective coefficient for {name} has shape {c.shape}")
            if la.hermiticity_residual(c) > 1e-9 * max(1.0, np.abs(c).max()):
                raise NotHermitian(f"objective coefficient for {name} is not Hermitian")
        dof = 0
        for b in self.blocks:
            dof += b.space.dim
        ncons = 0
        for f in self.families:
            ncons += f.space.dim
            for name, m in f.terms.items():
                b = self.block(name)
                if m.in_size != b.size:
                    raise ShapeError(f"family {f.name}: map for {name} expects size {m.in_size}, block has {b.size}")
            rhs = np.asarray(f.rhs)
            if f.space.kind == "vec":
                if rhs.shape != (f.space.k,):
                    raise ShapeError(f"family {f.name}: rhs shape {rhs.shape}")
            else:
                if rhs.shape != (f.space.k, f.space.k):
                    raise ShapeError(f"family {f.name}: rhs shape {rhs.shape}")
                if la.hermiticity_residual(rhs) > 1e-9 * max(1.0, np.abs(rhs).max()):
                    raise NotHermitian(f"family {f.name}: rhs is not Hermitian")
        if ncons > dof:
            raise ShapeError(f"{ncons} scalar constraints exceed {dof} real degrees of freedom")

    def scalar_constraints(self):
        """Explicit scalar form: list of (coefficient matrices per block, rhs).

        Computed through the adjoint maps, so it is an independent code path
        from the ``apply`` calls used inside the solver.
        """
        out = []
        for f in self.families:
            basis = f.space.basis()
            rhs = f.space.coords(np.asarray(f.rhs))
            adj = {name: m.adjoint(basis) for name, m in f.terms.items()}
            for i in range(f.space.dim):
                out.append(({name: a[i] for name, a in adj.items()}, float(rhs[i])))
        return out


@dataclass
class Settings:
    gap_tol: float = 1e-8
    res_tol: float = 1e-9
    max_iters: int = 200
    step_fraction: float = 0.98
    max_condition: float = 1e12


@dataclass
class SdpSolution:
    status: str  # Optimal | PrimalInfeasible | DualInfeasible | IterationLimit | NumericalFailure
    primal_value: float
    dual_value: float
    gap: float
    block_values: Dict[str, np.ndarray]
    multipliers: np.ndarray  # one per scalar equality, family by family
    family_multipliers: Dict[str, np.ndarray]
    dual_slacks: Dict[str, np.ndarray]
    iterations: int = 0
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")
    dropped_constraints: int = 0
    message: str = ""

    @property
    def optimal(self):
        return self.status == "Optimal"

    @property
    def value(self):
        return self.primal_value


def check_solution(problem: SdpProblem, sol: SdpSolution) -> dict:
    """Independent residual check of a solution.

    Uses the explicit scalar constraint matrices and eigenvalue tests rather
    than the solver's internal bookkeeping.  Returns the worst relative
    equality residual, the most negative primal and dual-slack eigenvalues,
    and the recomputed objective values.
    """
    cons = problem.scalar_constraints()
    x = sol.block_values
    worst = 0.0
    bnorm = max([abs(r) for _, r in cons] + [0.0])
    for coeffs, rhs in cons:
        v = sum(np.real(np.vdot(a, x[name])) for name, a in coeffs.items())
        worst = max(worst, abs(v - rhs))
    psd = [la.min_eig(x[b.name]) for b in problem.blocks if not b.free]
    slack = [la.min_eig(z) for z in sol.dual_slacks.values()]
    obj = sum(np.real(np.vdot(c, x[name])) for name, c in problem.objective.items()) + problem.offset
    dual = sum(
        np.real(np.vdot(f.space.coords(np.asarray(f.rhs)), f.space.coords(sol.family_multipliers[f.name])))
        for f in problem.families
    ) + problem.offset
    return {
        "equality": worst / (1.0 + bnorm),
        "primal_min_eig": min(psd) if psd else 0.0,
        "dual_min_eig": min(slack) if slack else 0.0,
        "primal_objective": obj / problem.value_scale,
        "dual_objective": dual / problem.value_scale,
    }
