"""Feasibility probe: how far inside the PSD cone a constraint system reaches."""
from dataclasses import dataclass

import numpy as np

from .maps import Outer
from .problem import Block, Family, SdpProblem, SdpSolution, Settings, Space
from .solver import solve_sdp


@dataclass
class ProbeResult:
    feasible: bool
    margin: float  # optimal t in "every PSD block >= t I", capped at 1
    solution: SdpSolution

    @property
    def status(self):
        return "Feasible" if self.feasible else "Infeasible"


def feasibility_probe(problem: SdpProblem, settings: Settings = None, block_values=False) -> ProbeResult:
    """Maximize t subject to the equalities of ``problem`` and X_b >= t I.

    The objective of ``problem`` is ignored.  Internally X_b = Y_b + (1 - s) I
    with Y_b, s PSD and s minimized, so the margin is t = 1 - s <= 1 and the
    shifted program is strictly feasible whenever the equalities are
    consistent.  Feasible iff t >= -residual tolerance, judged on the dual
    bound of the optimal t.
    """
    settings = settings or Settings()
    problem.validate()
    shift = "__probe_s"
    fams = []
    for f in problem.families:
        d = 0
        for name, mp in f.terms.items():
            b = problem.block(name)
            if b.free:
                continue
            d = d + mp.apply(np.eye(b.size))
        terms = dict(f.terms)
        rhs = np.asarray(f.rhs)
        if not np.isscalar(d):
            d = np.real(d) if f.space.kind != "herm" else d
            terms[shift] = Outer(-d)
            rhs = rhs - d
        fams.append(Family(f.name, f.space, terms, rhs))
    blocks = list(problem.blocks) + [Block(shift, 1, complex=False)]
    shifted = SdpProblem(blocks, fams, {shift: np.ones((1, 1))}, 0.0, "min")
    sol = solve_sdp(shifted, settings)
    if sol.status == "PrimalInfeasible":
        return ProbeResult(False, -np.inf, sol)
    # 1 - primal <= t* <= 1 - dual; the dual side decides, so a boundary
    # system is not rejected because of the optimality-gap tolerance
    margin = 1.0 - sol.primal_value
    upper = 1.0 - sol.dual_value if sol.optimal else margin
    if block_values and sol.block_values:
        t = 1.0 - float(np.real(sol.block_values[shift][0, 0]))
        for b in problem.blocks:
            if not b.free:
                sol.block_values[b.name] = sol.block_values[b.name] + t * np.eye(b.size)
    return ProbeResult(bool(upper >= -settings.res_tol), float(margin), sol)
