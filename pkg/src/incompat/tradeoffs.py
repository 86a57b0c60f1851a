"""Numerical checks of the joint-realizability tradeoff inequalities.

Each verifier evaluates both sides of one inequality on a concrete instance
and returns a :class:`TradeoffReport` with ``slack = rhs - lhs``.  The
disturbance of a channel (best diamond distance of a recovered channel to
the identity) is computed by a single SDP that optimizes the recovery map
and the diamond-norm certificate jointly.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import DomainError, PreconditionError, ShapeError, SolverError
from .measures import (AGREEMENT_TOL, diamond_distance, l1_povm_error, robustness_of_measurement,
                       roi_channel_channel, roi_channel_povm, roi_povm_povm)
from .objects import ChoiChannel, JointChannel, Povm, compose, identity_channel, joint_povm_marginals, marginal_choi
from .sdp import (Block, Compose, Embed, Family, Identity, LinkWith, PartialTrace, SdpProblem, Settings, Space,
                  SubBlock, feasibility_probe, solve_sdp)

SLACK_TOL = 1e-6
K_CHANNEL_MARGIN = -1e-7
INEQUALITIES = ("Theorem1", "Theorem2", "Prop3", "Theorem4", "Corollary", "HMDominance", "Lipschitz")


@dataclass
class TradeoffReport:
    inequality_id: str
    lhs: float
    rhs: float
    slack: float
    instance: dict = field(default_factory=dict)

    @property
    def passed(self):
        return bool(self.slack >= -SLACK_TOL)

    def as_dict(self):
        return {"inequality": self.inequality_id, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "pass": self.passed, "instance": self.instance}


@dataclass
class RecoverySearchResult:
    best_recovery: ChoiChannel
    recovered_distance: float
    iterations: int
    lower_check: float = float("nan")  # value of the compact diamond formulation, when computed


def _report(name, lhs, rhs, **instance):
    return TradeoffReport(name, float(lhs), float(rhs), float(rhs - lhs), instance)


# ------------------------------------------------------------------ channel inequalities

def verify_theorem1(a: ChoiChannel, b: ChoiChannel, joint: JointChannel, settings: Settings = None) -> TradeoffReport:
    """2 R(a, b) <= ||a - J_1||_diamond + ||b - J_2||_diamond for any joint channel J."""
    if joint.dim_in != a.dim_in or joint.dim_in != b.dim_in:
        raise ShapeError("input dimensions of the pair and the joint channel differ")
    if (joint.dim_out1, joint.dim_out2) != (a.dim_out, b.dim_out):
        raise ShapeError("joint channel outputs do not match the pair")
    r = roi_channel_channel(a, b, settings).value
    e1 = diamond_distance(a, marginal_choi(joint, 1), settings).value
    e2 = diamond_distance(b, marginal_choi(joint, 2), settings).value
    return _report("Theorem1", 2 * r, e1 + e2, roi=r, error1=e1, error2=e2)


def verify_lipschitz(a: ChoiChannel, b: ChoiChannel, c: ChoiChannel, d: ChoiChannel,
                     settings: Settings = None) -> TradeoffReport:
    """2 |R(a, b) - R(c, d)| <= ||a - c||_diamond + ||b - d||_diamond."""
    if (a.dim_in, a.dim_out) != (c.dim_in, c.dim_out) or (b.dim_in, b.dim_out) != (d.dim_in, d.dim_out):
        raise ShapeError("pairs must have matching dimensions")
    r1 = roi_channel_channel(a, b, settings).value
    r2 = r1 if (a is c and b is d) else roi_channel_channel(c, d, settings).value
    da = diamond_distance(a, c, settings).value
    db = diamond_distance(b, d, settings).value
    return _report("Lipschitz", 2 * abs(r1 - r2), da + db, roi_first=r1, roi_second=r2, distance1=da, distance2=db)


# ------------------------------------------------------------------ POVM inequalities

def _grid_marginals(e: Povm, f: Povm, g: Povm):
    """Marginals of g labelled like e and f.

    Labels of the form "x,y" are matched by name; otherwise the effects of g
    are read row-major over the e x f grid.
    """
    nx, ny = e.n_outcomes, f.n_outcomes
    pairs = [lab.split(",") for lab in g.labels]
    if all(len(p) == 2 and p[0] in e.labels and p[1] in f.labels for p in pairs):
        zero = np.zeros((g.dim, g.dim), dtype=complex)
        m1 = {x: zero.copy() for x in e.labels}
        m2 = {y: zero.copy() for y in f.labels}
        for (x, y), eff in zip(pairs, g.effects):
            m1[x] = m1[x] + eff
            m2[y] = m2[y] + eff
        return (Povm(g.dim, tuple(m1[x] for x in e.labels), e.labels),
                Povm(g.dim, tuple(m2[y] for y in f.labels), f.labels))
    if g.n_outcomes != nx * ny:
        raise ShapeError(f"joint POVM with {g.n_outcomes} outcomes does not fit a {nx}x{ny} label grid")
    return joint_povm_marginals(g, (nx, ny), (e.labels, f.labels))


def verify_theorem2(e: Povm, f: Povm, g: Povm, settings: Settings = None) -> TradeoffReport:
    """2 R(E, F) <= eps(E, G_1) + eps(F, G_2) for any joint POVM G."""
    if e.dim != f.dim or e.dim != g.dim:
        raise ShapeError("POVM dimensions differ")
    g1, g2 = _grid_marginals(e, f, g)
    r = roi_povm_povm(e, f, settings).value
    e1 = l1_povm_error(e, g1)
    e2 = l1_povm_error(f, g2)
    return _report("Theorem2", 2 * r, e1 + e2, roi=r, error1=e1, error2=e2)


def prop3_bound(e: Povm) -> float:
    """(sqrt(R(E) + 1) - 1)^2 / (d - 1) with the closed-form robustness of measurement."""
    if e.dim < 2:
        raise DomainError("the bound needs dimension at least 2")
    return (np.sqrt(robustness_of_measurement(e) + 1.0) - 1.0) ** 2 / (e.dim - 1)


def hm_bound(e: Povm) -> float:
    """(1/16) max_x (||E^x|| + ||I - E^x|| - 1)^2."""
    eye = np.eye(e.dim)
    return max((la.operator_norm(m) + la.operator_norm(eye - m) - 1.0) ** 2 for m in e.effects) / 16.0


def verify_prop3(e: Povm, settings: Settings = None) -> TradeoffReport:
    """prop3_bound(E) <= R(id, E)."""
    bound = prop3_bound(e)
    r = roi_channel_povm(identity_channel(e.dim), e, settings).value
    return _report("Prop3", bound, r, robustness_of_measurement=robustness_of_measurement(e), dim=e.dim)


def verify_hm_dominance(e: Povm) -> TradeoffReport:
    """hm_bound(E) <= 2 prop3_bound(E); only claimed for 2 <= d <= 6."""
    if not 2 <= e.dim <= 6:
        raise DomainError(f"dominance is only established for dimensions 2 to 6, got {e.dim}")
    return _report("HMDominance", hm_bound(e), 2 * prop3_bound(e), dim=e.dim)


# ------------------------------------------------------------------ disturbance

def recovered_distance(lam: ChoiChannel, recovery: ChoiChannel, settings: Settings = None) -> float:
    """||recovery o lam - id||_diamond for one candidate recovery channel."""
    if recovery.dim_in != lam.dim_out or recovery.dim_out != lam.dim_in:
        raise ShapeError("recovery must map the output of the channel back to its input")
    composed = compose(recovery, lam)
    return diamond_distance(composed, identity_channel(lam.dim_in), settings).value


def disturbance_program(lam: ChoiChannel) -> SdpProblem:
    """Joint SDP over recovery R and the 2x2 certificate M = [[Y0, -D], [-D, Y1]] >= 0.

    D = C(R o lam) - C(id) is linear in R.  The objective (t0 + t1)/2 with
    t_i I >= Tr_out Y_i is the minimization form of the diamond norm.
    """
    da, db = lam.dim_in, lam.dim_out
    n = da * da
    ident = identity_channel(da).choi
    blocks = [Block("R", da * db), Block("M", 2 * n), Block("T0", da), Block("T1", da),
              Block("t0", 1, complex=False), Block("t1", 1, complex=False)]
    herm = Space("herm", n)
    fams = [
        Family("recovery_tp", Space("herm", db), {"R": PartialTrace((da, db), (1,))}, np.eye(db)),
        Family("coupling", herm, {"M": SubBlock(n, "herm"), "R": LinkWith(lam.choi, da, db, da)}, ident),
        Family("coupling_imag", herm, {"M": SubBlock(n, "antiherm")}, np.zeros((n, n))),
    ]
    for i in (0, 1):
        part = SubBlock(n, "00" if i == 0 else "11")
        fams.append(Family(f"bound{i}", Space("herm", da),
                           {f"t{i}": Embed((da,), ()), "M": Compose(PartialTrace((da, da), (1,)), part, -1.0),
                            f"T{i}": Identity(da, -1.0)}, np.zeros((da, da))))
    obj = {"t0": 0.5 * np.ones((1, 1)), "t1": 0.5 * np.ones((1, 1))}
    return SdpProblem(blocks, fams, obj, sense="min")


def disturbance_program_compact(lam: ChoiChannel) -> SdpProblem:
    """Second formulation: min 2t over R, Z >= 0 with Z >= D and t I >= Tr_out Z."""
    da, db = lam.dim_in, lam.dim_out
    n = da * da
    ident = identity_channel(da).choi
    blocks = [Block("R", da * db), Block("Z", n), Block("S", n), Block("T", da), Block("t", 1, complex=False)]
    fams = [
        Family("recovery_tp", Space("herm", db), {"R": PartialTrace((da, db), (1,))}, np.eye(db)),
        Family("dominate", Space("herm", n), {"Z": Identity(n), "S": Identity(n, -1.0),
                                              "R": LinkWith(lam.choi, da, db, da, -1.0)}, -ident),
        Family("bound", Space("herm", da), {"t": Embed((da,), ()), "Z": PartialTrace((da, da), (1,), -1.0),
                                            "T": Identity(da, -1.0)}, np.zeros((da, da))),
    ]
    return SdpProblem(blocks, fams, {"t": 2.0 * np.ones((1, 1))}, sense="min")


def minimize_disturbance(lam: ChoiChannel, settings: Settings = None, check: bool = True) -> RecoverySearchResult:
    """delta(lam) = min over recovery channels R of ||R o lam - id||_diamond.

    The value is attained by the returned recovery at Optimal status.  With
    ``check`` the compact formulation is solved as well and must agree.
    """
    sol = solve_sdp(disturbance_program(lam), settings)
    if not sol.optimal:
        raise SolverError(f"disturbance program: solver returned {sol.status} ({sol.message})", sol)
    r = la.hermitian_part(sol.block_values["R"])
    recovery = ChoiChannel(lam.dim_out, lam.dim_in, r, validate=False)
    value = max(0.0, min(2.0, sol.primal_value))
    other = float("nan")
    if check:
        csol = solve_sdp(disturbance_program_compact(lam), settings)
        if not csol.optimal:
            raise SolverError(f"compact disturbance program: solver returned {csol.status}", csol)
        other = csol.primal_value
        if abs(other - sol.primal_value) > AGREEMENT_TOL * (1 + abs(other)):
            raise SolverError(f"disturbance formulations disagree: {sol.primal_value:.10g} vs {other:.10g}")
    return RecoverySearchResult(recovery, value, sol.iterations, other)


# ------------------------------------------------------------------ K-channels

def k_channel_program(lam: ChoiChannel, k: Povm) -> SdpProblem:
    """C^x >= 0 with sum_x C^x = C(lam) and Tr_out C^x = (K^x)^T."""
    if lam.dim_in != k.dim:
        raise ShapeError("channel input and POVM dimension differ")
    db, da = lam.dim_out, lam.dim_in
    n = db * da
    xs = range(k.n_outcomes)
    blocks = [Block(f"C{x}", n) for x in xs]
    fams = [Family("channel", Space("herm", n), {f"C{x}": Identity(n) for x in xs}, lam.choi)]
    tr = PartialTrace((db, da), (1,))
    for x in xs:
        fams.append(Family(f"effect{x}", Space("herm", da), {f"C{x}": tr}, la.transpose_in_basis(k.effects[x])))
    return SdpProblem(blocks, fams)


def k_channel_margin(lam: ChoiChannel, k: Povm, settings: Settings = None) -> float:
    """Largest t with an instrument decomposition C^x >= t I; -inf if the equalities are inconsistent."""
    res = feasibility_probe(k_channel_program(lam, k), settings)
    if res.solution.status not in ("Optimal", "PrimalInfeasible"):
        raise SolverError(f"K-channel probe: solver returned {res.solution.status}", res.solution)
    return res.margin


def _require_k_channel(lam, k, settings):
    margin = k_channel_margin(lam, k, settings)
    if margin < K_CHANNEL_MARGIN:
        raise PreconditionError(f"channel is not compatible with the POVM (decomposition margin {margin:.3g})")
    return margin


def verify_theorem4(e: Povm, k: Povm, lam_k: ChoiChannel, settings: Settings = None) -> TradeoffReport:
    """2 prop3_bound(E) <= eps(E, K) + delta(lam_K) for a K-channel lam_K."""
    if e.dim != k.dim:
        raise ShapeError("POVM dimensions differ")
    margin = _require_k_channel(lam_k, k, settings)
    eps = l1_povm_error(e, k)
    delta = minimize_disturbance(lam_k, settings).recovered_distance
    return _report("Theorem4", 2 * prop3_bound(e), eps + delta, error=eps, disturbance=delta, k_margin=margin)


def verify_corollary(e: Povm, lam_e: ChoiChannel, settings: Settings = None) -> TradeoffReport:
    """2 prop3_bound(E) <= delta(lam_E) for an E-channel lam_E."""
    margin = _require_k_channel(lam_e, e, settings)
    delta = minimize_disturbance(lam_e, settings).recovered_distance
    return _report("Corollary", 2 * prop3_bound(e), delta, disturbance=delta, k_margin=margin)
