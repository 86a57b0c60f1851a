"""Dense complex linear-algebra primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128`` (real
arrays are accepted everywhere and promoted where needed).
"""
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NotHermitian, ShapeError, SizeLimit

MAX_DIM = 4096
HERMITIAN_TOL = 1e-9


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # real, descending
    eigenvectors: np.ndarray  # columns orthonormal


def as_matrix(m, square=False) -> np.ndarray:
    """Validate and return ``m`` as a finite 2-d complex array."""
    a = np.asarray(m)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {a.shape}")
    if a.size == 0:
        raise ShapeError("empty matrix")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix has non-finite entries")
    if square and a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    return a.astype(complex, copy=False)


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def hermitian_part(m):
    return 0.5 * (m + dagger(m))


def hermiticity_residual(m) -> float:
    m = np.asarray(m)
    return float(np.abs(m - dagger(m)).max()) if m.size else 0.0


def kron(a, b, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with the standard (a-major) index ordering."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > max_dim:
        raise SizeLimit(f"kron result {rows}x{cols} exceeds limit {max_dim}")
    return np.kron(a, b)


def kron_all(*ms, max_dim: int = MAX_DIM):
    out = as_matrix(ms[0])
    for m in ms[1:]:
        out = kron(out, m, max_dim=max_dim)
    return out


def partial_trace(m, dims: Sequence[int], side: str = "right") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    ``dims = (dLeft, dRight)``.  ``side="right"`` traces the right factor and
    returns a dLeft x dLeft matrix; ``side="left"`` traces the left factor.
    """
    m = as_matrix(m, square=True)
    dl, dr = (int(d) for d in dims)
    if dl < 1 or dr < 1 or m.shape[0] != dl * dr:
        raise ShapeError(f"matrix of size {m.shape[0]} does not factor as {dl}x{dr}")
    t = m.reshape(dl, dr, dl, dr)
    side = side.lower()
    if side == "right":
        return np.einsum("ajbj->ab", t)
    if side == "left":
        return np.einsum("iaib->ab", t)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def partial_trace_keep(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace over every tensor factor not listed in ``keep``.

    Works on a leading batch axis too: ``m`` may have shape (..., n, n).
    The kept factors appear in increasing order.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(keep))
    k = len(dims)
    n = int(np.prod(dims))
    m = np.asarray(m)
    if m.shape[-1] != n or m.shape[-2] != n:
        raise ShapeError(f"operator of size {m.shape[-1]} does not match dims {dims}")
    batch = m.shape[:-2]
    t = m.reshape(batch + dims + dims)
    nb = len(batch)
    letters = "abcdefghijklmnopqrstuvwxyz"
    bidx = "ABCDEFGH"[:nb]
    row = list(letters[:k])
    col = list(letters[k:2 * k])
    for i in range(k):
        if i not in keep:
            col[i] = row[i]
    out = bidx + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    r = np.einsum(bidx + "".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return r.reshape(batch + (dk, dk))


def embed_identity(y, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Adjoint of :func:`partial_trace_keep`: tensor ``y`` with identities.

    ``y`` acts on the factors ``keep`` (increasing order); identities fill the
    remaining factors of ``dims``.  Supports a leading batch axis.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(keep))
    k = len(dims)
    y = np.asarray(y)
    batch = y.shape[:-2]
    kd = tuple(dims[i] for i in keep)
    t = y.reshape(batch + kd + kd)
    nb = len(batch)
    letters = "abcdefghijklmnopqrstuvwxyz"
    bidx = "ABCDEFGH"[:nb]
    row = list(letters[:k])
    col = list(letters[k:2 * k])
    operands = [t]
    subs = [bidx + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)]
    for i in range(k):
        if i not in keep:
            operands.append(np.eye(dims[i]))
            subs.append(row[i] + col[i])
    r = np.einsum(",".join(subs) + "->" + bidx + "".join(row) + "".join(col), *operands)
    n = int(np.prod(dims))
    return r.reshape(batch + (n, n))


def transpose_in_basis(m) -> np.ndarray:
    """Entrywise transpose in the computational basis (no conjugation)."""
    return np.swapaxes(np.asarray(m), -1, -2).copy()


def partial_transpose(m, dims: Sequence[int], which: int) -> np.ndarray:
    dims = tuple(int(d) for d in dims)
    k = len(dims)
    t = np.asarray(m).reshape(dims + dims)
    axes = list(range(2 * k))
    axes[which], axes[k + which] = axes[k + which], axes[which]
    n = int(np.prod(dims))
    return t.transpose(axes).reshape(n, n)


def _check_hermitian(m, tol):
    m = as_matrix(m, square=True)
    res = hermiticity_residual(m)
    scale = max(1.0, float(np.abs(m).max()))
    if res > tol * scale:
        raise NotHermitian(f"matrix is not Hermitian (residual {res:.3g})")
    return hermitian_part(m)


def hermitian_eigs(m, tol: float = HERMITIAN_TOL) -> EigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    h = _check_hermitian(m, tol)
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(w[::-1].copy(), v[:, ::-1].copy())


def operator_norm(m) -> float:
    """Largest singular value."""
    m = as_matrix(m)
    return float(np.linalg.norm(m, 2))


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = as_matrix(m)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def psd_check(m, tol: float = 1e-9) -> bool:
    """True iff the Hermitian matrix ``m`` has min eigenvalue >= -tol."""
    h = _check_hermitian(m, max(tol, HERMITIAN_TOL))
    return bool(np.linalg.eigvalsh(h)[0] >= -tol)


def min_eig(m) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(as_matrix(m, square=True)))[0])


def psd_sqrt(m) -> np.ndarray:
    """Square root of a PSD matrix (tiny negative eigenvalues clamped)."""
    w, v = np.linalg.eigh(hermitian_part(as_matrix(m, square=True)))
    return (v * np.sqrt(np.clip(w, 0, None))) @ dagger(v)


def psd_inv_sqrt(m) -> np.ndarray:
    w, v = np.linalg.eigh(hermitian_part(as_matrix(m, square=True)))
    if w[0] <= 0:
        raise ValueError("matrix is not positive definite")
    return (v / np.sqrt(w)) @ dagger(v)


PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
