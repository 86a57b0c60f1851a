"""Linear maps from a variable block into the value space of a constraint family.

Every map acts on a batch of matrices (leading axes are preserved) and comes
with its adjoint under the real inner product <A, B> = Re Tr[A^dag B].  The
solver only ever calls ``apply`` and ``adjoint``; ``identity_scale`` lets it
use a closed-form Schur-complement kernel when both sides are identities.
"""
import numpy as np

from .. import linalg as la


class LinearMap:
    in_size: int  # side length of the variable block
    identity_scale = None  # not None only for multiples of the identity map

    def apply(self, x):
        raise NotImplementedError

    def adjoint(self, y):
        raise NotImplementedError


class Identity(LinearMap):
    def __init__(self, n, scale=1.0):
        self.in_size = n
        self.out_size = n
        self.scale = float(scale)
        self.identity_scale = self.scale

    def apply(self, x):
        return self.scale * x

    def adjoint(self, y):
        return self.scale * y


class PartialTrace(LinearMap):
    """Trace over the factors of ``dims`` not listed in ``keep``."""

    def __init__(self, dims, keep, scale=1.0):
        self.dims = tuple(int(d) for d in dims)
        self.keep = tuple(sorted(keep))
        self.scale = float(scale)
        self.in_size = int(np.prod(self.dims))
        self.out_size = int(np.prod([self.dims[i] for i in self.keep])) if self.keep else 1

    def apply(self, x):
        return self.scale * la.partial_trace_keep(x, self.dims, self.keep)

    def adjoint(self, y):
        return self.scale * la.embed_identity(y, self.dims, self.keep)


class Embed(LinearMap):
    """y -> identities (x) y, with y placed on the factors ``keep`` of ``dims``."""

    def __init__(self, dims, keep, scale=1.0):
        self.dims = tuple(int(d) for d in dims)
        self.keep = tuple(sorted(keep))
        self.scale = float(scale)
        self.in_size = int(np.prod([self.dims[i] for i in self.keep])) if self.keep else 1
        self.out_size = int(np.prod(self.dims))

    def apply(self, x):
        return self.scale * la.embed_identity(x, self.dims, self.keep)

    def adjoint(self, y):
        return self.scale * la.partial_trace_keep(y, self.dims, self.keep)


class SubBlock(LinearMap):
    """Extract parts of a 2x2 block matrix with blocks of side ``k``.

    ``part`` is ``"00"`` or ``"11"`` for a diagonal block, ``"herm"`` for the
    Hermitian part (X01 + X10)/2 of the off-diagonal block and ``"antiherm"``
    for (X01 - X10)/(2i).  For Hermitian X these give X01 = herm + i antiherm.
    """

    def __init__(self, k, part):
        self.k = k
        self.part = part
        self.in_size = 2 * k
        self.out_size = k

    def apply(self, x):
        k = self.k
        if self.part == "00":
            return x[..., :k, :k]
        if self.part == "11":
            return x[..., k:, k:]
        x01, x10 = x[..., :k, k:], x[..., k:, :k]
        if self.part == "herm":
            return 0.5 * (x01 + x10)
        return (x01 - x10) / 2j

    def adjoint(self, y):
        k = self.k
        out = np.zeros(y.shape[:-2] + (2 * k, 2 * k), dtype=complex)
        if self.part == "00":
            out[..., :k, :k] = y
        elif self.part == "11":
            out[..., k:, k:] = y
        elif self.part == "herm":
            out[..., :k, k:] = 0.5 * y
            out[..., k:, :k] = 0.5 * y
        else:
            out[..., :k, k:] = 0.5j * y
            out[..., k:, :k] = -0.5j * y
        return out


class Compose(LinearMap):
    """outer o inner."""

    def __init__(self, outer, inner, scale=1.0):
        self.outer = outer
        self.inner = inner
        self.scale = float(scale)
        self.in_size = inner.in_size
        self.out_size = outer.out_size

    def apply(self, x):
        return self.scale * self.outer.apply(self.inner.apply(x))

    def adjoint(self, y):
        return self.scale * self.inner.adjoint(self.outer.adjoint(y))


class LinkWith(LinearMap):
    """R -> Choi of (R o F) for a fixed channel F given by its Choi operator.

    The variable R is the Choi operator of a map from the output of F
    (dimension d_mid) to a d_out system; the result lives on d_out (x) d_in.
    """

    def __init__(self, fixed_choi, d_out, d_mid, d_in, scale=1.0):
        self.f = np.asarray(fixed_choi).reshape(d_mid, d_in, d_mid, d_in)
        self.fc = np.conj(self.f)
        self.dims = (d_out, d_mid, d_in)
        self.scale = float(scale)
        self.in_size = d_out * d_mid
        self.out_size = d_out * d_in

    def apply(self, x):
        do, dm, di = self.dims
        b = x.shape[:-2]
        t = x.reshape(b + (do, dm, do, dm))
        r = np.einsum("...aibj,irjs->...arbs", t, self.f)
        return self.scale * r.reshape(b + (do * di, do * di))

    def adjoint(self, y):
        do, dm, di = self.dims
        b = y.shape[:-2]
        t = y.reshape(b + (do, di, do, di))
        r = np.einsum("...arbs,irjs->...aibj", t, self.fc)
        return self.scale * r.reshape(b + (do * dm, do * dm))


class Outer(LinearMap):
    """Scalar (1x1 block) x -> x * D for a fixed Hermitian matrix or real vector D."""

    def __init__(self, d):
        self.d = np.asarray(d)
        self.in_size = 1
        self.out_size = self.d.shape[-1]

    def apply(self, x):
        s = x[..., 0, 0]
        if self.d.ndim == 1:
            return s.real[..., None] * self.d
        return s[..., None, None] * self.d

    def adjoint(self, y):
        if self.d.ndim == 1:
            v = y @ self.d
        else:
            v = np.einsum("...ab,ab->...", y, np.conj(self.d)).real
        return np.asarray(v)[..., None, None]


class Dense(LinearMap):
    """Explicit scalar functionals X -> (Re Tr[A_i X])_i with Hermitian A_i."""

    def __init__(self, coeffs):
        self.a = np.asarray(coeffs)
        self.in_size = self.a.shape[-1]
        self.out_size = self.a.shape[0]
        self.at = np.swapaxes(self.a, -1, -2).copy()

    def apply(self, x):
        return np.einsum("iab,...ab->...i", self.at, x).real

    def adjoint(self, y):
        return np.einsum("...i,iab->...ab", np.real(y), self.a)
