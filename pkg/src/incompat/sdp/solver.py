"""Primal-dual interior-point method with Nesterov-Todd scaling.

Infeasible-start path following with a Mehrotra predictor-corrector step.
The Schur complement is assembled family by family: pairs of identity maps
use a closed-form Kronecker kernel, every other pair pushes the (small)
basis of one family through W (.) W.
"""
import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .. import linalg as la
from .problem import SQRT2, SdpProblem, SdpSolution, Settings


def solve_sdp(problem: SdpProblem, settings: Settings = None) -> SdpSolution:
    problem.validate()
    return _Engine(problem, settings or Settings()).run()


def _kernel(w, space):
    """Matrix of X -> W X W in the orthonormal coordinates of ``space``.

    Entries are Re Tr[B_a W B_b W] for basis elements B_a, B_b.  Writing each
    off-diagonal basis element through its (j,k) and (k,j) entries, all of
    them follow from two products of gathered entries of W, so the
    n^2 x n^2 Kronecker product is never formed.
    """
    if w is None:
        return np.eye(space.dim)
    n = space.k
    herm = space.kind == "herm"
    diag = np.arange(n)
    i0, i1 = space.iu

    def q(r0, r1, c0, c1):
        wr0, wr1 = w[r0], w[r1]
        p00, p01 = wr0[:, c0], wr0[:, c1]
        p10, p11 = wr1[:, c0], wr1[:, c1]
        return p10 * np.conj(p01), p11 * np.conj(p00)

    # diagonal rows against diagonal and pair columns
    q1, q2 = q(diag, diag, diag, diag)
    dd = np.real(q1)
    q1d, q2d = q(diag, diag, i0, i1)
    dre = np.real(q1d + q2d) / SQRT2
    q1, q2 = q(i0, i1, i0, i1)
    rr = np.real(q1) + np.real(q2)
    if not herm:
        return np.block([[dd, dre], [dre.T, rr]])
    dim_ = np.real(1j * (q1d - q2d)) / SQRT2
    ri = np.imag(q2) - np.imag(q1)
    ii = np.real(q2) - np.real(q1)
    return np.block([[dd, dre, dim_], [dre.T, rr, ri], [dim_.T, ri.T, ii]])


def _sandwich(w, p):
    if w is None:
        return p
    return np.matmul(np.matmul(w, p), w)


def _max_step(lchol, dx):
    """Largest a with X + a dX PSD, given the Cholesky factor of X."""
    t = sla.solve_triangular(lchol, dx, lower=True)
    t = sla.solve_triangular(lchol, la.dagger(t), lower=True)
    lam = np.linalg.eigvalsh(la.hermitian_part(t))[0]
    return np.inf if lam >= 0 else -1.0 / lam


CENTER_TRIGGER = 0.1
CENTER_SIGMA = 0.5


def _factors(m):
    try:
        np.linalg.cholesky(m)
        return True
    except np.linalg.LinAlgError:
        return False


class _Engine:
    def __init__(self, p: SdpProblem, s: Settings):
        self.p, self.s = p, s
        self.sign = 1.0 if p.sense == "min" else -1.0
        self.psd = [b for b in p.blocks if not b.free]
        self.free = [b for b in p.blocks if b.free]
        self.fams = p.families
        self.off = np.cumsum([0] + [f.space.dim for f in self.fams])
        self.m = int(self.off[-1])
        self.rows = [slice(self.off[i], self.off[i + 1]) for i in range(len(self.fams))]
        self.terms = {b.name: [] for b in p.blocks}
        for i, f in enumerate(self.fams):
            for name, mp in f.terms.items():
                self.terms[name].append((i, mp))
        self.c = {}
        for b in p.blocks:
            c = p.objective.get(b.name)
            c = np.zeros((b.size, b.size)) if c is None else la.hermitian_part(np.asarray(c))
            c = self.sign * c
            self.c[b.name] = c.astype(complex) if b.complex else np.real(c).astype(float)
        self.b = np.concatenate([f.space.coords(np.asarray(f.rhs, dtype=complex if f.space.kind == "herm" else float))
                                 for f in self.fams]) if self.fams else np.zeros(0)
        self.n_total = sum(b.size for b in self.psd)
        # free variables enter the Newton system through a constant matrix
        self.fdim = sum(b.space.dim for b in self.free)
        self.bfree = np.zeros((self.m, self.fdim))
        col = 0
        for b in self.free:
            basis = b.space.basis()
            for i, mp in self.terms[b.name]:
                self.bfree[self.rows[i], col:col + b.space.dim] = self.fams[i].space.coords(mp.apply(basis)).T
            col += b.space.dim
        self.cfree = np.concatenate([b.space.coords(self.c[b.name]) for b in self.free]) if self.free else np.zeros(0)

    # ------------------------------------------------------------ operators
    def A(self, x):
        out = np.zeros(self.m)
        for i, f in enumerate(self.fams):
            val = 0
            for name, mp in f.terms.items():
                val = val + mp.apply(x[name])
            out[self.rows[i]] = f.space.coords(val)
        return out

    def At(self, y, blocks=None):
        blocks = self.p.blocks if blocks is None else blocks
        vals = [f.space.value(y[self.rows[i]]) for i, f in enumerate(self.fams)]
        out = {}
        for b in blocks:
            acc = np.zeros((b.size, b.size), dtype=complex if b.complex else float)
            for i, mp in self.terms[b.name]:
                v = mp.adjoint(vals[i])
                acc = acc + (v if b.complex else np.real(v))
            out[b.name] = acc
        return out

    def free_vec(self, u):
        if not self.free:
            return np.zeros(0)
        return np.concatenate([b.space.coords(u[b.name]) for b in self.free])

    def free_mats(self, v):
        out, col = {}, 0
        for b in self.free:
            out[b.name] = b.space.value(v[col:col + b.space.dim])
            col += b.space.dim
        return out

    def schur(self, w):
        """M = A (W . W) A^* over the PSD blocks; ``w`` None means W = I."""
        m = np.zeros((self.m, self.m))
        for b in self.psd:
            wb = None if w is None else w[b.name]
            terms = self.terms[b.name]
            ident = [(i, mp) for i, mp in terms if mp.identity_scale is not None]
            gen = [(i, mp) for i, mp in terms if mp.identity_scale is None]
            if len(ident) > 0:
                ker = _kernel(wb, b.space)
                for a, (i, mi) in enumerate(ident):
                    for j, mj in ident[a:]:
                        blk = (mi.identity_scale * mj.identity_scale) * ker
                        m[self.rows[i], self.rows[j]] += blk
                        if i != j:
                            m[self.rows[j], self.rows[i]] += blk.T
            for a, (j, mj) in enumerate(gen):
                q = mj.adjoint(self.fams[j].space.basis())
                if not b.complex:
                    q = np.real(q)
                q = _sandwich(wb, q)
                partners = ident + gen[:a + 1]
                for i, mi in partners:
                    blk = self.fams[i].space.coords(mi.apply(q)).T
                    m[self.rows[i], self.rows[j]] += blk
                    if i != j:
                        m[self.rows[j], self.rows[i]] += blk.T
        return m

    # ------------------------------------------------------------ preprocessing
    def presolve(self):
        """Drop linearly dependent equalities and check consistency."""
        g = self.schur(None) + self.bfree @ self.bfree.T
        rn = np.sqrt(np.clip(np.diag(g), 0, None))
        scale = rn.max() if rn.size else 0.0
        zero = rn <= 1e-14 * max(scale, 1e-300)
        if np.any(np.abs(self.b[zero]) > 1e-9 * (1 + np.abs(self.b).max())):
            return None, "equality with zero coefficients and nonzero right-hand side"
        nz = np.where(~zero)[0]
        if nz.size == 0:
            return np.zeros(0, dtype=int), None
        cond = rn[nz].max() / rn[nz].min()
        if cond > self.s.max_condition:
            return None, f"badly scaled constraints (row-norm ratio {cond:.2e})"
        gn = g[np.ix_(nz, nz)] / np.outer(rn[nz], rn[nz])
        _, piv, rank, info = lapack.dpstrf(gn.copy(), tol=1e-11, lower=1)
        keep = np.sort(nz[piv[:rank] - 1])
        self.dropped = self.m - keep.size
        if keep.size < nz.size:
            # consistency: the least-norm solution of the kept rows must satisfy all rows
            gk = g[np.ix_(keep, keep)]
            z = sla.solve(gk, self.b[keep], assume_a="pos")
            y = np.zeros(self.m)
            y[keep] = z
            x = self.At(y, self.psd)
            resid = self.A({**x, **self.free_mats(self.bfree.T @ y)}) - self.b
            if np.abs(resid).max() > 1e-7 * (1 + np.abs(self.b).max()):
                return None, "inconsistent linear equalities"
        self.gram = sla.cho_factor(g[np.ix_(keep, keep)], lower=True)
        return keep, None

    def project(self, dx, du, target, keep):
        """Least-norm correction of (dx, du) so that A(dx, du) = target on the kept rows.

        Uses the fixed, well-conditioned Gram matrix A A^* and is applied only
        to the residual that refinement in the scaled metric leaves behind.
        """
        err = target - self.A({**dx, **du})[keep]
        if not err.size:
            return dx, du
        yk = np.zeros(self.m)
        yk[keep] = sla.cho_solve(self.gram, err)
        corr = self.At(yk, self.psd)
        dx = {k: v + corr[k] for k, v in dx.items()}
        if self.fdim:
            cu = self.free_mats(self.bfree.T @ yk)
            du = {k: v + cu[k] for k, v in du.items()}
        return dx, du

    # ------------------------------------------------------------ main loop
    def run(self):
        s = self.s
        self.dropped = 0
        keep, why = self.presolve()
        if keep is None:
            status = "NumericalFailure" if why.startswith("badly") else "PrimalInfeasible"
            return self._solution(status, None, None, None, None, 0, np.nan, np.nan, why)
        kept_b = self.b[keep]
        tau_x = 1.0 + (np.abs(self.b).max() if self.m else 0.0)
        tau_z = 1.0 + max([np.abs(c).max() for c in self.c.values()] + [0.0])
        x = {b.name: tau_x * np.eye(b.size, dtype=complex if b.complex else float) for b in self.psd}
        z = {b.name: tau_z * np.eye(b.size, dtype=complex if b.complex else float) for b in self.psd}
        u = {b.name: np.zeros((b.size, b.size), dtype=complex if b.complex else float) for b in self.free}
        y = np.zeros(self.m)
        bnorm = 1.0 + np.linalg.norm(self.b)
        cnorm = 1.0 + np.sqrt(sum(np.linalg.norm(c) ** 2 for c in self.c.values()))
        status, msg = "IterationLimit", ""
        it = 0
        pinf = dinf = np.nan
        for it in range(s.max_iters + 1):
            ax = self.A({**x, **u})
            rp = (self.b - ax)[keep]
            aty = self.At(y, self.psd)
            rd = {k: self.c[k] - z[k] - aty[k] for k in x}
            rfree = self.cfree - self.bfree.T @ y
            pobj = sum(np.real(np.vdot(self.c[k], v)) for k, v in x.items()) + self.cfree @ self.free_vec(u)
            dobj = self.b @ y
            pinf = np.linalg.norm(rp) / bnorm
            dinf = (np.sqrt(sum(np.linalg.norm(v) ** 2 for v in rd.values())) + np.linalg.norm(rfree)) / cnorm
            gap = abs(pobj - dobj)
            if (gap <= s.gap_tol * (1 + abs(pobj)) and np.abs(rp).max(initial=0) <= s.res_tol * (1 + np.abs(self.b).max(initial=0))
                    and pinf <= s.res_tol and dinf <= s.res_tol):
                status = "Optimal"
                break
            if it == s.max_iters:
                break
            if np.abs(y).max(initial=0) > 1e12 or max(np.abs(v).max() for v in z.values()) > 1e13:
                status, msg = "PrimalInfeasible", "dual iterates diverge"
                break
            if max(np.abs(v).max() for v in x.values()) > 1e13:
                status, msg = "DualInfeasible", "primal iterates diverge"
                break
            try:
                step = self._step(x, z, u, y, rp, rd, rfree, keep)
            except (np.linalg.LinAlgError, ValueError, FloatingPointError) as exc:
                status, msg = "NumericalFailure", str(exc)
                break
            if step is None:
                status, msg = "NumericalFailure", "Schur complement is singular"
                break
            dx, dz, du, dy, ap, ad = step
            # roundoff can push a tiny eigenvalue across zero near the boundary; shorten the step until both factor
            for _ in range(30):
                nx = {k: la.hermitian_part(x[k] + ap * dx[k]) for k in x}
                nz = {k: la.hermitian_part(z[k] + ad * dz[k]) for k in x}
                if all(_factors(v) for v in nx.values()) and all(_factors(v) for v in nz.values()):
                    break
                ap, ad = 0.5 * ap, 0.5 * ad
            else:
                status, msg = "NumericalFailure", "iterates left the cone"
                break
            x, z = nx, nz
            for k in u:
                u[k] = la.hermitian_part(u[k] + ap * du[k])
            y = y + ad * dy
        return self._solution(status, x, z, u, y, it, pinf, dinf, msg)

    def _step(self, x, z, u, y, rp, rd, rfree, keep):
        s = self.s
        nt = {}
        for k in x:
            lx = np.linalg.cholesky(x[k])
            lz = np.linalg.cholesky(z[k])
            uu, sv, vh = np.linalg.svd(la.dagger(lz) @ lx)
            g = (lx @ la.dagger(vh)) / np.sqrt(sv)
            ginv = (sv[:, None] ** -1) * (la.dagger(g) @ z[k])  # G^{-1} = D^{-1} G^H Z
            nt[k] = (lx, lz, g, ginv, sv, g @ la.dagger(g))
        w = {k: v[5] for k, v in nt.items()}
        mfull = self.schur(w)
        mk = mfull[np.ix_(keep, keep)]
        bk = self.bfree[keep]
        fac = None
        for reg in (0.0, 1e-13, 1e-10):
            try:
                mm = mk + reg * np.abs(np.diag(mk)).max(initial=1.0) * np.eye(mk.shape[0])
                fac = sla.cho_factor(mm, lower=True, check_finite=False)
                break
            except np.linalg.LinAlgError:
                continue
        if fac is None:
            return None
        def msolve(rhs):
            # Cholesky solve plus iterative refinement against the unregularized matrix
            sol = sla.cho_solve(fac, rhs)
            for _ in range(2):
                sol = sol + sla.cho_solve(fac, rhs - mk @ sol)
            return sol

        if self.fdim:
            minv_b = msolve(bk)
            sf = bk.T @ minv_b
            sf_fac = sla.lu_factor(sf)

        def kkt(h, f):
            """Solve M dy + B dv = h, B^T dy = f on the kept rows."""
            if self.fdim:
                mh = msolve(h)
                dv = sla.lu_solve(sf_fac, bk.T @ mh - f)
                return mh - minv_b @ dv, dv
            return msolve(h), np.zeros(0)

        def lift(dyk):
            dy = np.zeros(self.m)
            dy[keep] = dyk
            return dy, self.At(dy, self.psd)

        def solve(rc):
            h = rp - self.A({**{k: rc[k] - w[k] @ rd[k] @ w[k] for k in x},
                             **{k: np.zeros_like(v) for k, v in u.items()}})[keep]
            dyk, dv = kkt(h, rfree)
            dy, aty = lift(dyk)
            dz = {k: la.hermitian_part(rd[k] - aty[k]) for k in x}
            dx = {k: la.hermitian_part(rc[k] - w[k] @ dz[k] @ w[k]) for k in x}
            # refine against the exact operators: the assembled M loses accuracy as mu -> 0
            for _ in range(2):
                e1 = rp - self.A({**dx, **self.free_mats(dv)})[keep]
                e2 = rfree - bk.T @ dyk
                cy, cv = kkt(e1, e2)
                cfull, atc = lift(cy)
                dyk, dv, dy = dyk + cy, dv + cv, dy + cfull
                dz = {k: la.hermitian_part(dz[k] - atc[k]) for k in x}
                dx = {k: la.hermitian_part(dx[k] + w[k] @ atc[k] @ w[k]) for k in x}
            dx, du = self.project(dx, self.free_mats(dv), rp, keep)
            return dx, dz, du, dy

        def steps(dx, dz):
            ap = min([_max_step(nt[k][0], dx[k]) for k in x] + [np.inf])
            ad = min([_max_step(nt[k][1], dz[k]) for k in x] + [np.inf])
            return ap, ad

        mu = sum(np.real(np.vdot(x[k], z[k])) for k in x) / max(self.n_total, 1)
        # predictor
        dx, dz, du, dy = solve({k: -x[k] for k in x})
        ap, ad = steps(dx, dz)
        ap, ad = min(1.0, ap), min(1.0, ad)
        mu_aff = sum(np.real(np.vdot(x[k] + ap * dx[k], z[k] + ad * dz[k])) for k in x) / max(self.n_total, 1)
        expo = max(1.0, 3.0 * min(ap, ad) ** 2)
        sigma = min(1.0, max(0.0, mu_aff / mu) ** expo) if mu > 0 else 0.0
        # corrector
        rc = {}
        for k in x:
            lx, lz, g, ginv, sv, _ = nt[k]
            dxs = ginv @ dx[k] @ la.dagger(ginv)
            dzs = la.dagger(g) @ dz[k] @ g
            r = -(dxs @ dzs + dzs @ dxs)
            r[np.diag_indices_from(r)] += 2 * sigma * mu - 2 * sv ** 2
            r = r / (sv[:, None] + sv[None, :])
            rc[k] = g @ r @ la.dagger(g)
        dx, dz, du, dy = solve(rc)
        ap, ad = steps(dx, dz)
        if min(ap, ad) < CENTER_TRIGGER:
            # second-order term blew up the step; try plain centering and keep the longer step
            sig = max(sigma, CENTER_SIGMA)
            rc2 = {}
            for k in x:
                g, sv = nt[k][2], nt[k][4]
                rc2[k] = (g * ((sig * mu - sv ** 2) / sv)) @ la.dagger(g)
            alt = solve(rc2)
            ap2, ad2 = steps(alt[0], alt[1])
            if min(ap2, ad2) > min(ap, ad):
                (dx, dz, du, dy), ap, ad = alt, ap2, ad2
        ap = min(1.0, s.step_fraction * ap)
        ad = min(1.0, s.step_fraction * ad)
        return dx, dz, du, dy, ap, ad

    def _solution(self, status, x, z, u, y, it, pinf, dinf, msg):
        p = self.p
        if x is None:
            nan = float("nan")
            return SdpSolution(status, nan, nan, nan, {}, np.zeros(self.m), {}, {}, 0, nan, nan, self.dropped, msg)
        blocks = {**x, **u}
        pobj = sum(np.real(np.vdot(self.c[k], v)) for k, v in blocks.items())
        dobj = self.b @ y
        sgn = self.sign
        primal = (sgn * pobj + p.offset) / p.value_scale
        dual = (sgn * dobj + p.offset) / p.value_scale
        ys = sgn * y
        fam = {f.name: f.space.value(ys[self.rows[i]]) for i, f in enumerate(self.fams)}
        return SdpSolution(
            status=status,
            primal_value=float(primal),
            dual_value=float(dual),
            gap=float(abs(primal - dual)),
            block_values={b.name: blocks[b.name] for b in p.blocks},
            multipliers=ys,
            family_multipliers=fam,
            dual_slacks=dict(z),
            iterations=it,
            primal_residual=float(pinf),
            dual_residual=float(dinf),
            dropped_constraints=self.dropped,
            message=msg,
        )
