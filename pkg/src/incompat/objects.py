"""POVMs, channels stored as Choi operators, and the worked-example families.

Choi convention: for a channel Phi from A (dimension d_A) to B (dimension
d_B), ``choi = (Phi (x) id)(|phi><phi|)`` with ``|phi> = sum_i |i>|i>``.  The
output factor B is the LEFT tensor factor and the reference copy R of A is
the right factor, so trace preservation reads ``Tr_B choi = I_R``.
Joint channels live on B1 (x) B2 (x) R.
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import DomainError, NotTracePreserving, ShapeError, ValidationError

DEVICE_TOL = 1e-8


def _check_psd_family(mats, tol, what="effect"):
    for m in mats:
        res = la.hermiticity_residual(m)
        if res > tol:
            raise ValidationError("hermiticity", res, f"{what} is not Hermitian")
        lo = la.min_eig(m)
        if lo < -tol:
            raise ValidationError("positivity", -lo, f"{what} is not PSD")


@dataclass(frozen=True, eq=False)
class Povm:
    """Finite-outcome POVM; ``effects[x]`` is the effect of ``labels[x]``."""

    dim: int
    effects: tuple
    labels: tuple = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        effects = tuple(la.as_matrix(e, square=True) for e in self.effects)
        if not effects:
            raise ShapeError("a POVM needs at least one effect")
        for e in effects:
            if e.shape[0] != self.dim:
                raise ShapeError(f"effect of size {e.shape[0]} in a dimension-{self.dim} POVM")
        labels = self.labels
        if labels is None:
            labels = tuple(str(i) for i in range(len(effects)))
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(effects):
            raise ShapeError("labels and effects differ in length")
        if len(set(labels)) != len(labels):
            raise ShapeError("duplicate outcome labels")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "labels", labels)
        if self.validate:
            _check_psd_family(effects, DEVICE_TOL)
            res = float(np.abs(sum(effects) - np.eye(self.dim)).max())
            if res > DEVICE_TOL:
                raise ValidationError("completeness", res, "effects do not sum to the identity")

    def __len__(self):
        return len(self.effects)

    @property
    def n_outcomes(self):
        return len(self.effects)

    def effect(self, label):
        return self.effects[self.labels.index(str(label))]


@dataclass(frozen=True, eq=False)
class ChoiChannel:
    """Channel from a dim_in system to a dim_out system, stored by its Choi operator."""

    dim_in: int
    dim_out: int
    choi: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = la.as_matrix(self.choi, square=True)
        if c.shape[0] != self.dim_in * self.dim_out:
            raise ShapeError(f"Choi of size {c.shape[0]} for dims out={self.dim_out}, in={self.dim_in}")
        object.__setattr__(self, "choi", c)
        if self.validate:
            _validate_choi(c, (self.dim_out, self.dim_in))

    @property
    def dims(self):
        return (self.dim_out, self.dim_in)


@dataclass(frozen=True, eq=False)
class JointChannel:
    """Channel from A to B1 (x) B2; Choi operator on B1 (x) B2 (x) R."""

    dim_in: int
    dim_out1: int
    dim_out2: int
    choi: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = la.as_matrix(self.choi, square=True)
        if c.shape[0] != self.dim_in * self.dim_out1 * self.dim_out2:
            raise ShapeError("joint Choi size does not match its dimensions")
        object.__setattr__(self, "choi", c)
        if self.validate:
            _validate_choi(c, (self.dim_out1 * self.dim_out2, self.dim_in))

    @property
    def dims(self):
        return (self.dim_out1, self.dim_out2, self.dim_in)


def _validate_choi(c, dims, tol=DEVICE_TOL):
    _check_psd_family([c], tol, what="Choi operator")
    res = float(np.abs(la.partial_trace(c, dims, "left") - np.eye(dims[1])).max())
    if res > tol:
        raise ValidationError("trace-preservation", res, "Tr_B of the Choi operator is not the identity")


# ---------------------------------------------------------------- channels

def unnormalized_max_entangled(d: int) -> np.ndarray:
    """The d^2 x 1 column vector sum_i |i>|i>."""
    if d < 1:
        raise DomainError("dimension must be positive")
    v = np.zeros((d * d, 1), dtype=complex)
    v[np.arange(d) * (d + 1), 0] = 1.0
    return v


def choi_from_kraus(kraus: Sequence, dim_in: int, dim_out: int, tol: float = DEVICE_TOL) -> ChoiChannel:
    ks = [la.as_matrix(k) for k in kraus]
    for k in ks:
        if k.shape != (dim_out, dim_in):
            raise ShapeError(f"Kraus operator of shape {k.shape}, expected {(dim_out, dim_in)}")
    res = float(np.abs(sum(la.dagger(k) @ k for k in ks) - np.eye(dim_in)).max())
    if res > tol:
        raise NotTracePreserving(f"Kraus completeness violated (residual {res:.3g})")
    phi = unnormalized_max_entangled(dim_in)
    c = np.zeros((dim_out * dim_in,) * 2, dtype=complex)
    for k in ks:
        v = np.kron(k, np.eye(dim_in)) @ phi
        c += v @ la.dagger(v)
    return ChoiChannel(dim_in, dim_out, la.hermitian_part(c))


def apply_via_choi(ch, rho) -> np.ndarray:
    """Lambda(rho) = Tr_R[(I_B (x) rho^T) choi]."""
    rho = la.as_matrix(rho, square=True)
    if rho.shape[0] != ch.dim_in:
        raise ShapeError(f"state of size {rho.shape[0]} for a channel with input dimension {ch.dim_in}")
    t = ch.choi.reshape(ch.dim_out, ch.dim_in, ch.dim_out, ch.dim_in)
    return np.einsum("aibj,ji->ab", t, rho.T)


def compose(second: ChoiChannel, first: ChoiChannel, validate: bool = False) -> ChoiChannel:
    """Choi operator of ``second o first`` (apply ``first``, then ``second``)."""
    if second.dim_in != first.dim_out:
        raise ShapeError("output of the first channel does not match input of the second")
    c = link_product(second.choi, first.choi, second.dim_out, first.dim_out, first.dim_in)
    return ChoiChannel(first.dim_in, second.dim_out, la.hermitian_part(c), validate=validate)


def link_product(c_second, c_first, d_out, d_mid, d_in):
    """(second (x) id)(c_first) written as a contraction of the two Choi operators."""
    s = np.asarray(c_second).reshape(d_out, d_mid, d_out, d_mid)
    f = np.asarray(c_first).reshape(d_mid, d_in, d_mid, d_in)
    r = np.einsum("aibj,irjs->arbs", s, f)
    return r.reshape(d_out * d_in, d_out * d_in)


def identity_channel(d: int) -> ChoiChannel:
    phi = unnormalized_max_entangled(d)
    return ChoiChannel(d, d, phi @ phi.T)


def unitary_channel(u) -> ChoiChannel:
    u = la.as_matrix(u, square=True)
    d = u.shape[0]
    return choi_from_kraus([u], d, d)


def depolarizing_channel(d: int, p: float = 1.0) -> ChoiChannel:
    """rho -> (1-p) rho + p Tr[rho] I/d; p=1 is the fully depolarizing channel."""
    phi = unnormalized_max_entangled(d)
    c = (1 - p) * (phi @ phi.T) + p * np.eye(d * d) / d
    return ChoiChannel(d, d, c)


def constant_channel(dim_in: int, sigma) -> ChoiChannel:
    """rho -> Tr[rho] sigma."""
    sigma = la.as_matrix(sigma, square=True)
    return ChoiChannel(dim_in, sigma.shape[0], np.kron(sigma, np.eye(dim_in)))


def measurement_channel_choi(p: Povm) -> ChoiChannel:
    """Choi operator sum_x |x><x| (x) (E^x)^T of the quantum-to-classical channel."""
    n, d = p.n_outcomes, p.dim
    c = np.zeros((n * d, n * d), dtype=complex)
    for x, e in enumerate(p.effects):
        c[x * d:(x + 1) * d, x * d:(x + 1) * d] = la.transpose_in_basis(e)
    return ChoiChannel(d, n, c)


def marginal_choi(j: JointChannel, which: int) -> ChoiChannel:
    if which not in (1, 2):
        raise DomainError("which must be 1 or 2")
    keep = (0, 2) if which == 1 else (1, 2)
    c = la.partial_trace_keep(j.choi, j.dims, keep)
    dim_out = j.dim_out1 if which == 1 else j.dim_out2
    return ChoiChannel(j.dim_in, dim_out, c, validate=j.validate)


def joint_from_channel(ch: ChoiChannel, dim_out1: int, dim_out2: int) -> JointChannel:
    """Reinterpret a channel into a product output space as a joint channel."""
    if ch.dim_out != dim_out1 * dim_out2:
        raise ShapeError("output dimension does not factor")
    return JointChannel(ch.dim_in, dim_out1, dim_out2, ch.choi, validate=ch.validate)


def product_joint_channel(first: ChoiChannel, sigma) -> JointChannel:
    """Joint channel rho -> first(rho) (x) sigma."""
    sigma = la.as_matrix(sigma, square=True)
    d1, din, d2 = first.dim_out, first.dim_in, sigma.shape[0]
    t = np.einsum("aibj,ck->acibkj", first.choi.reshape(d1, din, d1, din), sigma)
    n = d1 * d2 * din
    return JointChannel(din, d1, d2, t.reshape(n, n))


def instrument_channel(kraus_by_outcome: Sequence[Sequence], dim_in: int, dim_out: int) -> ChoiChannel:
    """Unconditional channel of an instrument given Kraus operators per outcome."""
    flat = [k for ks in kraus_by_outcome for k in ks]
    return choi_from_kraus(flat, dim_in, dim_out)


def lueders_channel(p: Povm) -> ChoiChannel:
    """rho -> sum_x sqrt(E^x) rho sqrt(E^x)."""
    return instrument_channel([[la.psd_sqrt(e)] for e in p.effects], p.dim, p.dim)


# ------------------------------------------------------------------- POVMs

def trivial_povm(d: int, n: int = 2) -> Povm:
    return Povm(d, tuple(np.eye(d) / n for _ in range(n)))


def sharp_povm(basis) -> Povm:
    """Projective POVM onto the columns of a unitary matrix."""
    u = la.as_matrix(basis, square=True)
    return Povm(u.shape[0], tuple(np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[0])))


def pauli_povm(axis: str, eta: float = 1.0) -> Povm:
    """Binary qubit POVM (I +- eta sigma_axis)/2 with labels +1, -1."""
    s = {"x": la.PAULI_X, "y": la.PAULI_Y, "z": la.PAULI_Z}[axis.lower()]
    return Povm(2, ((np.eye(2) + eta * s) / 2, (np.eye(2) - eta * s) / 2), labels=("+1", "-1"))


def example_unbiased_qubit_povm(eta: float) -> Povm:
    """Z(eta): effects (I +- eta sigma_z)/2."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    return pauli_povm("z", eta)


def example_sixfold_povm(p: float) -> Povm:
    """Six effects (1-p)/3 |+-a><+-a| + p I/6 for a in x, y, z."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    effects, labels = [], []
    for axis, s in (("x", la.PAULI_X), ("y", la.PAULI_Y), ("z", la.PAULI_Z)):
        for sign in (1, -1):
            proj = (np.eye(2) + sign * s) / 2
            effects.append((1 - p) / 3 * proj + p * np.eye(2) / 6)
            labels.append(("+" if sign > 0 else "-") + axis)
    return Povm(2, tuple(effects), labels=tuple(labels))


def joint_povm_marginals(g: Povm, shape, labels=None) -> tuple:
    """Marginals of a joint POVM whose effects are listed row-major over ``shape``.

    ``labels`` optionally gives the (first, second) marginal label tuples.
    """
    nx, ny = shape
    if g.n_outcomes != nx * ny:
        raise ShapeError(f"joint POVM has {g.n_outcomes} outcomes, grid {nx}x{ny} needs {nx * ny}")
    lx, ly = labels if labels is not None else (None, None)
    e = np.array(g.effects).reshape(nx, ny, g.dim, g.dim)
    return (Povm(g.dim, tuple(e.sum(axis=1)), lx, validate=g.validate),
            Povm(g.dim, tuple(e.sum(axis=0)), ly, validate=g.validate))


def product_joint_povm(e: Povm, f: Povm) -> Povm:
    """Joint POVM G^{xy} = sqrt(E^x) F^y sqrt(E^x) (E first, then F)."""
    if e.dim != f.dim:
        raise ShapeError("dimension mismatch")
    roots = [la.psd_sqrt(a) for a in e.effects]
    effects = [r @ b @ r for r in roots for b in f.effects]
    labels = [f"{x},{y}" for x in e.labels for y in f.labels]
    return Povm(e.dim, tuple(la.hermitian_part(m) for m in effects), labels=tuple(labels))


def diagonal_joint_povm(e: Povm) -> Povm:
    """G^{xy} = delta_xy E^x, a joint POVM for the pair (E, E)."""
    n, d = e.n_outcomes, e.dim
    zero = np.zeros((d, d))
    effects = [e.effects[x] if x == y else zero for x in range(n) for y in range(n)]
    return Povm(d, tuple(effects), labels=tuple(f"{x},{y}" for x in e.labels for y in e.labels))


def smeared_joint_povm() -> Povm:
    """G^{jk} = (I + (j sigma_x + k sigma_z)/sqrt 2)/4 for j, k = +-1."""
    effects = [(np.eye(2) + (j * la.PAULI_X + k * la.PAULI_Z) / np.sqrt(2)) / 4
               for j in (1, -1) for k in (1, -1)]
    return Povm(2, tuple(effects), labels=("+1,+1", "+1,-1", "-1,+1", "-1,-1"))


# ---------------------------------------------------------------- sampling

def _ginibre(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def sample_random_channel(dim_in: int, dim_out: int, seed=0) -> ChoiChannel:
    """Channel from a Haar-like random isometry with environment dim_in*dim_out."""
    if dim_in < 1 or dim_out < 1:
        raise DomainError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    env = dim_in * dim_out
    q, r = np.linalg.qr(_ginibre(rng, dim_out * env, dim_in))
    q = q * (np.diag(r) / np.abs(np.diag(r)))  # fix phases so the map is well defined
    v = q.reshape(dim_out, env, dim_in)
    kraus = [v[:, e, :] for e in range(env)]
    return choi_from_kraus(kraus, dim_in, dim_out)


def sample_random_povm(dim: int, outcomes: int, seed=0) -> Povm:
    """Random POVM: Wishart matrices normalized by the inverse square root of their sum."""
    if dim < 1 or outcomes < 1:
        raise DomainError("dimensions must be positive")
    if outcomes == 1:
        return Povm(dim, (np.eye(dim, dtype=complex),))
    rng = np.random.default_rng(seed)
    mats = []
    for _ in range(outcomes):
        g = _ginibre(rng, dim, dim)
        mats.append(g @ la.dagger(g))
    s = la.psd_inv_sqrt(sum(mats))
    return Povm(dim, tuple(la.hermitian_part(s @ m @ s) for m in mats))


def sample_random_joint_channel(dim_in: int, dim_out1: int, dim_out2: int, seed=0) -> JointChannel:
    return joint_from_channel(sample_random_channel(dim_in, dim_out1 * dim_out2, seed), dim_out1, dim_out2)


def sample_k_channel(k: Povm, dim_out: int = None, seed=0) -> ChoiChannel:
    """Unconditional channel of a random K-instrument.

    Outcome x applies sqrt(K^x) followed by a random channel, so the result
    is compatible with ``k`` by construction.
    """
    dim_out = k.dim if dim_out is None else dim_out
    rng = np.random.default_rng(seed)
    kraus = []
    for e in k.effects:
        post = sample_random_channel(k.dim, dim_out, seed=rng.integers(2**32))
        root = la.psd_sqrt(e)
        for kk in kraus_from_choi(post):
            kraus.append(kk @ root)
    return choi_from_kraus(kraus, k.dim, dim_out)


def kraus_from_choi(ch: ChoiChannel, tol: float = 1e-12) -> list:
    """Kraus operators from the eigen-decomposition of the Choi operator."""
    w, v = np.linalg.eigh(ch.choi)
    out = []
    for lam, vec in zip(w, v.T):
        if lam > tol:
            out.append(np.sqrt(lam) * vec.reshape(ch.dim_out, ch.dim_in))
    return out
