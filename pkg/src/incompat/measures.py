"""Incompatibility and distance measures for channels and POVMs.

Every robustness value is computed from a primal program (minimization over
joint devices) and, unless disabled, confirmed against a separately
formulated dual program.  ``roi_bisection_oracle`` provides a third,
search-based route directly from the definition (minimal noise weight).
"""
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .errors import ShapeError, SolverError
from .objects import ChoiChannel, Povm, measurement_channel_choi
from .sdp import (Block, Embed, Family, Identity, PartialTrace, SdpProblem, Settings, Space, feasibility_probe,
                  solve_sdp)

CLAMP_TOL = 1e-9
AGREEMENT_TOL = 1e-6


@dataclass
class IncompatReport:
    value: float
    primal_value: float
    dual_value: float = float("nan")
    certificate: dict = field(default_factory=dict)
    method: str = "PrimalSdp"  # PrimalSdp | DualSdp | Bisection | Analytic
    checks: dict = field(default_factory=dict)

    def as_dict(self):
        return {"value": self.value, "primal": self.primal_value, "dual": self.dual_value,
                "gap": abs(self.primal_value - self.dual_value) if np.isfinite(self.dual_value) else None,
                "method": self.method}


def _herm(k):
    return Space("herm", k)


def _scalar_one():
    return Space("sym", 1), np.ones((1, 1))


def _clamp(v):
    return 0.0 if v < CLAMP_TOL else float(v)


def _solve(problem, settings, what):
    sol = solve_sdp(problem, settings)
    if not sol.optimal:
        raise SolverError(f"{what}: solver returned {sol.status} ({sol.message})", sol)
    return sol


def _agree(p, d, what):
    if abs(p - d) > AGREEMENT_TOL * (1 + abs(p)):
        raise SolverError(f"{what}: primal {p:.10g} and dual {d:.10g} disagree")


def _check_same_input(a, b):
    if a.dim_in != b.dim_in:
        raise ShapeError(f"input dimensions differ: {a.dim_in} vs {b.dim_in}")


# ------------------------------------------------------------------ programs

def roi_cc_primal(a: ChoiChannel, b: ChoiChannel) -> SdpProblem:
    """min r: Tr_{B1B2} C = (1+r) I, Tr_{B2} C >= C(a), Tr_{B1} C >= C(b), C >= 0."""
    d1, d2, da = a.dim_out, b.dim_out, a.dim_in
    dims = (d1, d2, da)
    blocks = [Block("C", d1 * d2 * da), Block("S1", d1 * da), Block("S2", d2 * da), Block("r", 1, complex=False)]
    fams = [
        Family("norm", _herm(da), {"C": PartialTrace(dims, (2,)), "r": Embed((da,), (), -1.0)}, np.eye(da)),
        Family("first", _herm(d1 * da), {"C": PartialTrace(dims, (0, 2)), "S1": Identity(d1 * da, -1.0)}, a.choi),
        Family("second", _herm(d2 * da), {"C": PartialTrace(dims, (1, 2)), "S2": Identity(d2 * da, -1.0)}, b.choi),
    ]
    return SdpProblem(blocks, fams, {"r": np.ones((1, 1))}, sense="min")


def roi_cc_dual(a: ChoiChannel, b: ChoiChannel) -> SdpProblem:
    """max Tr[X C(a)] + Tr[Y C(b)] - 1: Tr V = 1, I (x) V >= X (x) I + I (x) Y."""
    d1, d2, da = a.dim_out, b.dim_out, a.dim_in
    dims = (d1, d2, da)
    n = d1 * d2 * da
    blocks = [Block("X", d1 * da), Block("Y", d2 * da), Block("V", da), Block("S", n)]
    sp, one = _scalar_one()
    fams = [
        Family("trace", sp, {"V": PartialTrace((da,), ())}, one),
        Family("lmi", _herm(n), {"V": Embed(dims, (2,)), "X": Embed(dims, (0, 2), -1.0),
                                 "Y": Embed(dims, (1, 2), -1.0), "S": Identity(n, -1.0)}, np.zeros((n, n))),
    ]
    return SdpProblem(blocks, fams, {"X": a.choi, "Y": b.choi}, offset=-1.0, sense="max")


def roi_cp_primal(a: ChoiChannel, e: Povm) -> SdpProblem:
    """min r over instrument-like C^x: sum_x Tr_B C^x = (1+r) I,
    sum_x C^x >= C(a), Tr_B C^x >= (E^x)^T."""
    db, da = a.dim_out, a.dim_in
    n = db * da
    xs = range(e.n_outcomes)
    blocks = [Block(f"C{x}", n) for x in xs] + [Block("S", n)] + [Block(f"T{x}", da) for x in xs]
    blocks.append(Block("r", 1, complex=False))
    tr = PartialTrace((db, da), (1,))
    norm = {f"C{x}": tr for x in xs}
    norm["r"] = Embed((da,), (), -1.0)
    chan = {f"C{x}": Identity(n) for x in xs}
    chan["S"] = Identity(n, -1.0)
    fams = [Family("norm", _herm(da), norm, np.eye(da)), Family("channel", _herm(n), chan, a.choi)]
    for x in xs:
        fams.append(Family(f"effect{x}", _herm(da), {f"C{x}": tr, f"T{x}": Identity(da, -1.0)},
                           la.transpose_in_basis(e.effects[x])))
    return SdpProblem(blocks, fams, {"r": np.ones((1, 1))}, sense="min")


def roi_cp_dual(a: ChoiChannel, e: Povm) -> SdpProblem:
    """max Tr[X C(a)] + sum_x Tr[Y^x (E^x)^T] - 1: Tr V = 1, I (x) V >= X + I (x) Y^x."""
    db, da = a.dim_out, a.dim_in
    n = db * da
    xs = range(e.n_outcomes)
    blocks = [Block("X", n), Block("V", da)] + [Block(f"Y{x}", da) for x in xs] + [Block(f"S{x}", n) for x in xs]
    sp, one = _scalar_one()
    fams = [Family("trace", sp, {"V": PartialTrace((da,), ())}, one)]
    emb = Embed((db, da), (1,))
    for x in xs:
        fams.append(Family(f"lmi{x}", _herm(n), {"V": emb, "X": Identity(n, -1.0), f"Y{x}": Embed((db, da), (1,), -1.0),
                                                f"S{x}": Identity(n, -1.0)}, np.zeros((n, n))))
    obj = {"X": a.choi}
    for x in xs:
        obj[f"Y{x}"] = la.transpose_in_basis(e.effects[x])
    return SdpProblem(blocks, fams, obj, offset=-1.0, sense="max")


def roi_pp_primal(e: Povm, f: Povm) -> SdpProblem:
    """min r over G^{xy}: sum G = (1+r) I, sum_y G^{xy} >= E^x, sum_x G^{xy} >= F^y."""
    d = e.dim
    xs, ys = range(e.n_outcomes), range(f.n_outcomes)
    blocks = [Block(f"G{x}_{y}", d) for x in xs for y in ys]
    blocks += [Block(f"S{x}", d) for x in xs] + [Block(f"T{y}", d) for y in ys] + [Block("r", 1, complex=False)]
    idm = Identity(d)
    norm = {f"G{x}_{y}": idm for x in xs for y in ys}
    norm["r"] = Embed((d,), (), -1.0)
    fams = [Family("norm", _herm(d), norm, np.eye(d))]
    for x in xs:
        t = {f"G{x}_{y}": idm for y in ys}
        t[f"S{x}"] = Identity(d, -1.0)
        fams.append(Family(f"first{x}", _herm(d), t, e.effects[x]))
    for y in ys:
        t = {f"G{x}_{y}": idm for x in xs}
        t[f"T{y}"] = Identity(d, -1.0)
        fams.append(Family(f"second{y}", _herm(d), t, f.effects[y]))
    return SdpProblem(blocks, fams, {"r": np.ones((1, 1))}, sense="min")


def roi_pp_dual(e: Povm, f: Povm) -> SdpProblem:
    """max sum Tr[X^x E^x] + sum Tr[Y^y F^y] - 1: Tr V = 1, V >= X^x + Y^y."""
    d = e.dim
    xs, ys = range(e.n_outcomes), range(f.n_outcomes)
    blocks = [Block("V", d)] + [Block(f"X{x}", d) for x in xs] + [Block(f"Y{y}", d) for y in ys]
    blocks += [Block(f"S{x}_{y}", d) for x in xs for y in ys]
    sp, one = _scalar_one()
    fams = [Family("trace", sp, {"V": PartialTrace((d,), ())}, one)]
    neg = Identity(d, -1.0)
    for x in xs:
        for y in ys:
            fams.append(Family(f"lmi{x}_{y}", _herm(d), {"V": Identity(d), f"X{x}": neg, f"Y{y}": neg, f"S{x}_{y}": neg},
                               np.zeros((d, d))))
    obj = {f"X{x}": e.effects[x] for x in xs}
    obj.update({f"Y{y}": f.effects[y] for y in ys})
    return SdpProblem(blocks, fams, obj, offset=-1.0, sense="max")


def woi_primal(a: ChoiChannel, b: ChoiChannel) -> SdpProblem:
    """min w: Tr_{B1B2} C = (1-w) I, C(a) >= Tr_{B2} C, C(b) >= Tr_{B1} C, C >= 0."""
    d1, d2, da = a.dim_out, b.dim_out, a.dim_in
    dims = (d1, d2, da)
    blocks = [Block("C", d1 * d2 * da), Block("S1", d1 * da), Block("S2", d2 * da), Block("w", 1, complex=False)]
    fams = [
        Family("norm", _herm(da), {"C": PartialTrace(dims, (2,)), "w": Embed((da,), ())}, np.eye(da)),
        Family("first", _herm(d1 * da), {"C": PartialTrace(dims, (0, 2)), "S1": Identity(d1 * da)}, a.choi),
        Family("second", _herm(d2 * da), {"C": PartialTrace(dims, (1, 2)), "S2": Identity(d2 * da)}, b.choi),
    ]
    return SdpProblem(blocks, fams, {"w": np.ones((1, 1))}, sense="min")


def woi_dual(a: ChoiChannel, b: ChoiChannel) -> SdpProblem:
    """max 1 - Tr[X C(a)] - Tr[Y C(b)]: Tr V = 1, X (x) I + I (x) Y >= I (x) V, V free."""
    d1, d2, da = a.dim_out, b.dim_out, a.dim_in
    dims = (d1, d2, da)
    n = d1 * d2 * da
    blocks = [Block("X", d1 * da), Block("Y", d2 * da), Block("V", da, free=True), Block("S", n)]
    sp, one = _scalar_one()
    fams = [
        Family("trace", sp, {"V": PartialTrace((da,), ())}, one),
        Family("lmi", _herm(n), {"X": Embed(dims, (0, 2)), "Y": Embed(dims, (1, 2)), "V": Embed(dims, (2,), -1.0),
                                 "S": Identity(n, -1.0)}, np.zeros((n, n))),
    ]
    return SdpProblem(blocks, fams, {"X": -a.choi, "Y": -b.choi}, offset=1.0, sense="max")


def diamond_max_form(delta, dim_out, dim_in) -> SdpProblem:
    """max 2 Tr[W delta]: 0 <= W <= I (x) rho, Tr rho = 1.

    Same value as max Tr[Z delta] over -I (x) rho <= Z <= I (x) rho through
    Z = 2W - I (x) rho, because Tr_B delta = 0 when delta is a difference of
    trace-preserving Choi operators.
    """
    n = dim_out * dim_in
    blocks = [Block("W", n), Block("rho", dim_in), Block("S", n)]
    sp, one = _scalar_one()
    fams = [
        Family("trace", sp, {"rho": PartialTrace((dim_in,), ())}, one),
        Family("lmi", _herm(n), {"rho": Embed((dim_out, dim_in), (1,)), "W": Identity(n, -1.0), "S": Identity(n, -1.0)},
               np.zeros((n, n))),
    ]
    return SdpProblem(blocks, fams, {"W": 2.0 * delta}, sense="max")


def diamond_min_form(delta, dim_out, dim_in) -> SdpProblem:
    """min 2 t: Z >= delta, Z >= 0, t I >= Tr_B Z."""
    n = dim_out * dim_in
    blocks = [Block("Z", n), Block("S", n), Block("T", dim_in), Block("t", 1, complex=False)]
    fams = [
        Family("dominate", _herm(n), {"Z": Identity(n), "S": Identity(n, -1.0)}, delta),
        Family("bound", _herm(dim_in), {"t": Embed((dim_in,), ()), "Z": PartialTrace((dim_out, dim_in), (1,), -1.0),
                                        "T": Identity(dim_in, -1.0)}, np.zeros((dim_in, dim_in))),
    ]
    return SdpProblem(blocks, fams, {"t": 2.0 * np.ones((1, 1))}, sense="min")


# ------------------------------------------------------------------ measures

def diamond_distance(a: ChoiChannel, b: ChoiChannel, settings: Settings = None, dual: bool = True) -> IncompatReport:
    """||a - b||_diamond from the maximization form, optionally confirmed by the minimization form."""
    if a.dim_in != b.dim_in or a.dim_out != b.dim_out:
        raise ShapeError("channels must have matching input and output dimensions")
    if a.choi.tobytes() > b.choi.tobytes():
        a, b = b, a  # fixed argument order makes the value exactly symmetric
    delta = la.hermitian_part(a.choi - b.choi)
    sol = _solve(diamond_max_form(delta, a.dim_out, a.dim_in), settings, "diamond (max form)")
    primal = sol.primal_value
    rho = sol.block_values["rho"]
    cert = {"Z": 2 * sol.block_values["W"] - np.kron(np.eye(a.dim_out), rho), "V": rho}
    dual_value = float("nan")
    if dual:
        dsol = _solve(diamond_min_form(delta, a.dim_out, a.dim_in), settings, "diamond (min form)")
        dual_value = dsol.primal_value
        _agree(primal, dual_value, "diamond distance")
    return IncompatReport(min(_clamp(primal), 2.0), primal, dual_value, cert, "PrimalSdp")


def roi_channel_channel(a: ChoiChannel, b: ChoiChannel, settings: Settings = None, dual: bool = True) -> IncompatReport:
    _check_same_input(a, b)
    sol = _solve(roi_cc_primal(a, b), settings, "channel-channel robustness (primal)")
    primal = sol.primal_value
    cert = {"joint": sol.block_values["C"]}
    dual_value = float("nan")
    if dual:
        dsol = _solve(roi_cc_dual(a, b), settings, "channel-channel robustness (dual)")
        dual_value = dsol.primal_value
        _agree(primal, dual_value, "channel-channel robustness")
        cert.update({k: dsol.block_values[k] for k in ("X", "Y", "V")})
    return IncompatReport(_clamp(primal), primal, dual_value, cert, "PrimalSdp")


def roi_channel_povm(a: ChoiChannel, e: Povm, settings: Settings = None, dual: bool = True,
                     cross_check: bool = True) -> IncompatReport:
    """R(a, E); with ``cross_check`` also solves R(a, Gamma^E) and requires agreement."""
    if a.dim_in != e.dim:
        raise ShapeError("channel input and POVM dimension differ")
    sol = _solve(roi_cp_primal(a, e), settings, "channel-POVM robustness (primal)")
    primal = sol.primal_value
    cert = {"instrument": [sol.block_values[f"C{x}"] for x in range(e.n_outcomes)]}
    dual_value = float("nan")
    checks = {}
    if dual:
        dsol = _solve(roi_cp_dual(a, e), settings, "channel-POVM robustness (dual)")
        dual_value = dsol.primal_value
        _agree(primal, dual_value, "channel-POVM robustness")
        cert["X"] = dsol.block_values["X"]
        cert["V"] = dsol.block_values["V"]
        cert["Y"] = [dsol.block_values[f"Y{x}"] for x in range(e.n_outcomes)]
    if cross_check:
        other = roi_channel_channel(a, measurement_channel_choi(e), settings, dual=False).primal_value
        _agree(primal, other, "channel-POVM vs channel-channel robustness")
        checks["measurement_channel_value"] = other
    return IncompatReport(_clamp(primal), primal, dual_value, cert, "PrimalSdp", checks)


def roi_povm_povm(e: Povm, f: Povm, settings: Settings = None, dual: bool = True,
                  cross_check: bool = True) -> IncompatReport:
    if e.dim != f.dim:
        raise ShapeError("POVM dimensions differ")
    sol = _solve(roi_pp_primal(e, f), settings, "POVM-POVM robustness (primal)")
    primal = sol.primal_value
    cert = {"joint": [[sol.block_values[f"G{x}_{y}"] for y in range(f.n_outcomes)] for x in range(e.n_outcomes)]}
    dual_value = float("nan")
    checks = {}
    if dual:
        dsol = _solve(roi_pp_dual(e, f), settings, "POVM-POVM robustness (dual)")
        dual_value = dsol.primal_value
        _agree(primal, dual_value, "POVM-POVM robustness")
        cert["V"] = dsol.block_values["V"]
        cert["X"] = [dsol.block_values[f"X{x}"] for x in range(e.n_outcomes)]
        cert["Y"] = [dsol.block_values[f"Y{y}"] for y in range(f.n_outcomes)]
    if cross_check:
        other = roi_channel_channel(measurement_channel_choi(e), measurement_channel_choi(f), settings,
                                    dual=False).primal_value
        _agree(primal, other, "POVM-POVM vs measurement-channel robustness")
        checks["measurement_channel_value"] = other
    return IncompatReport(_clamp(primal), primal, dual_value, cert, "PrimalSdp", checks)


def woi_channel_channel(a: ChoiChannel, b: ChoiChannel, settings: Settings = None, dual: bool = True) -> IncompatReport:
    _check_same_input(a, b)
    sol = _solve(woi_primal(a, b), settings, "weight of incompatibility (primal)")
    primal = sol.primal_value
    cert = {"joint": sol.block_values["C"]}
    dual_value = float("nan")
    if dual:
        dsol = _solve(woi_dual(a, b), settings, "weight of incompatibility (dual)")
        dual_value = dsol.primal_value
        _agree(primal, dual_value, "weight of incompatibility")
        cert.update({k: dsol.block_values[k] for k in ("X", "Y", "V")})
    return IncompatReport(min(_clamp(primal), 1.0), primal, dual_value, cert, "PrimalSdp")


def robustness_of_measurement(e: Povm) -> float:
    """sum_x ||E^x|| - 1."""
    return max(0.0, sum(la.operator_norm(m) for m in e.effects) - 1.0)


def l1_povm_error(e: Povm, g: Povm) -> float:
    """sum_x ||E^x - G^x|| over the union of labels, missing effects read as zero."""
    if e.dim != g.dim:
        raise ShapeError("POVM dimensions differ")
    labels = list(e.labels) + [x for x in g.labels if x not in e.labels]
    zero = np.zeros((e.dim, e.dim))
    total = 0.0
    for x in labels:
        a = e.effect(x) if x in e.labels else zero
        b = g.effect(x) if x in g.labels else zero
        total += la.operator_norm(a - b)
    return total


# ------------------------------------------------------------------ bisection oracle

def compatibility_system(first, second, r: float) -> SdpProblem:
    """Constraint-only program: the pair mixed with free noise at weight r is compatible.

    Noise enters as (device + r * noise) / (1 + r); both sides are multiplied
    by (1 + r) to keep the constraints linear in the joint device.
    """
    s = 1.0 + r
    if isinstance(first, Povm) and isinstance(second, Povm):
        e, f = first, second
        d = e.dim
        xs, ys = range(e.n_outcomes), range(f.n_outcomes)
        blocks = [Block(f"G{x}_{y}", d) for x in xs for y in ys]
        blocks += [Block(f"M{x}", d) for x in xs] + [Block(f"N{y}", d) for y in ys]
        fams = []
        for x in xs:
            t = {f"G{x}_{y}": Identity(d, s) for y in ys}
            t[f"M{x}"] = Identity(d, -r)
            fams.append(Family(f"first{x}", _herm(d), t, e.effects[x]))
        for y in ys:
            t = {f"G{x}_{y}": Identity(d, s) for x in xs}
            t[f"N{y}"] = Identity(d, -r)
            fams.append(Family(f"second{y}", _herm(d), t, f.effects[y]))
        fams.append(Family("noise1", _herm(d), {f"M{x}": Identity(d) for x in xs}, np.eye(d)))
        fams.append(Family("noise2", _herm(d), {f"N{y}": Identity(d) for y in ys}, np.eye(d)))
        return SdpProblem(blocks, fams)
    if isinstance(first, Povm):
        first, second = second, first
    if isinstance(second, Povm):
        a, e = first, second
        if a.dim_in != e.dim:
            raise ShapeError("channel input and POVM dimension differ")
        db, da = a.dim_out, a.dim_in
        n = db * da
        xs = range(e.n_outcomes)
        blocks = [Block(f"C{x}", n) for x in xs] + [Block("N", n)] + [Block(f"M{x}", da) for x in xs]
        t = {f"C{x}": Identity(n, s) for x in xs}
        t["N"] = Identity(n, -r)
        fams = [Family("channel", _herm(n), t, a.choi)]
        for x in xs:
            fams.append(Family(f"effect{x}", _herm(da),
                               {f"C{x}": PartialTrace((db, da), (1,), s), f"M{x}": Identity(da, -r)},
                               la.transpose_in_basis(e.effects[x])))
        fams.append(Family("noise_channel", _herm(da), {"N": PartialTrace((db, da), (1,))}, np.eye(da)))
        fams.append(Family("noise_povm", _herm(da), {f"M{x}": Identity(da) for x in xs}, np.eye(da)))
        return SdpProblem(blocks, fams)
    a, b = first, second
    _check_same_input(a, b)
    d1, d2, da = a.dim_out, b.dim_out, a.dim_in
    dims = (d1, d2, da)
    blocks = [Block("C", d1 * d2 * da), Block("N1", d1 * da), Block("N2", d2 * da)]
    fams = [
        Family("first", _herm(d1 * da), {"C": PartialTrace(dims, (0, 2), s), "N1": Identity(d1 * da, -r)}, a.choi),
        Family("second", _herm(d2 * da), {"C": PartialTrace(dims, (1, 2), s), "N2": Identity(d2 * da, -r)}, b.choi),
        Family("noise1", _herm(da), {"N1": PartialTrace((d1, da), (1,))}, np.eye(da)),
        Family("noise2", _herm(da), {"N2": PartialTrace((d2, da), (1,))}, np.eye(da)),
    ]
    return SdpProblem(blocks, fams)


def _probe(first, second, r, settings):
    res = feasibility_probe(compatibility_system(first, second, r), settings)
    if res.solution.status not in ("Optimal", "PrimalInfeasible"):
        raise SolverError(f"feasibility probe at r={r}: {res.solution.status}", res.solution)
    return res.feasible


def roi_bisection_oracle(first, second, settings: Settings = None, iterations: int = 40) -> IncompatReport:
    """Minimal noise weight r in [0, d] making the pair compatible, by bisection.

    ``first``/``second`` are channels or POVMs; the flavor follows from their types.
    """
    d = first.dim_in if isinstance(first, ChoiChannel) else first.dim
    if _probe(first, second, 0.0, settings):
        return IncompatReport(0.0, 0.0, float("nan"), {"interval": (0.0, 0.0)}, "Bisection")
    lo, hi = 0.0, float(d)
    if not _probe(first, second, hi, settings):
        raise SolverError(f"search cap r={hi} is binding: pair not compatible at the cap")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _probe(first, second, mid, settings):
            hi = mid
        else:
            lo = mid
    v = 0.5 * (lo + hi)
    return IncompatReport(_clamp(v), v, float("nan"), {"interval": (lo, hi)}, "Bisection")
