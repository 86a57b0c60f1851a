"""Embedding of complex Hermitian programs into real symmetric ones."""
import numpy as np

from .. import linalg as la
from ..errors import NotHermitian
from .maps import Dense
from .problem import Block, Family, SdpProblem, SdpSolution, Settings, Space
from .solver import solve_sdp


def realify_matrix(h, check=True):
    """[[Re H, -Im H], [Im H, Re H]]; works on a leading batch axis."""
    h = np.asarray(h)
    if check and la.hermiticity_residual(h) > 1e-9 * max(1.0, np.abs(h).max()):
        raise NotHermitian("cannot realify a non-Hermitian matrix")
    re, im = np.real(h), np.imag(h)
    top = np.concatenate([re, -im], axis=-1)
    bottom = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def complexify_matrix(r):
    """Left inverse of :func:`realify_matrix` (averages the redundant copies)."""
    r = np.asarray(r)
    n = r.shape[-1] // 2
    p, q = r[..., :n, :n], r[..., n:, :n]
    rr, qt = r[..., n:, n:], r[..., :n, n:]
    return 0.5 * (p + rr) + 0.5j * (q - qt)


def realify(problem: SdpProblem) -> SdpProblem:
    """Equivalent program over real symmetric blocks of twice the size.

    Every block (complex or already real) is doubled, so all objective and
    constraint values are exactly twice the original ones; ``value_scale``
    records the factor so reported values match the complex program.
    """
    problem.validate()
    blocks = [Block(b.name, 2 * b.size, complex=False, free=b.free) for b in problem.blocks]
    fams = []
    for f in problem.families:
        basis = f.space.basis()
        terms = {}
        for name, mp in f.terms.items():
            coeffs = mp.adjoint(basis)
            if not problem.block(name).complex:
                coeffs = np.real(coeffs)
            terms[name] = Dense(realify_matrix(coeffs, check=False))
        rhs = 2.0 * f.space.coords(np.asarray(f.rhs))
        fams.append(Family(f.name, Space("vec", f.space.dim), terms, rhs))
    objective = {name: realify_matrix(c) for name, c in problem.objective.items()}
    return SdpProblem(blocks, fams, objective, 2.0 * problem.offset, problem.sense, 2.0 * problem.value_scale)


def solve_via_realification(problem: SdpProblem, settings: Settings = None) -> SdpSolution:
    """Solve the realified program and map block values back to complex form."""
    sol = solve_sdp(realify(problem), settings)
    for b in problem.blocks:
        v = complexify_matrix(sol.block_values[b.name])
        sol.block_values[b.name] = v if b.complex else np.real(v)
    fam = {}
    for f in problem.families:
        fam[f.name] = f.space.value(sol.family_multipliers[f.name])
    sol.family_multipliers = fam
    sol.dual_slacks = {k: complexify_matrix(v) for k, v in sol.dual_slacks.items()}
    return sol
