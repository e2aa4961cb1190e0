"""Finite-dimensional reduction of the critical point equation.

The truncated space keeps the base point plus every nonzero mode whose
eigenvalue magnitude 2 pi |A^T k| does not exceed a threshold N (modes are
retained whole: both eigenvalues of a mode share one magnitude).  On the
excluded modes the operator is invertible with norm 1 / N_excl, so for

    q = sup |hess H| / N_excl < 1

the fiber map  h -> DiracInv P_excl grad H(g + h)  is a contraction and has
a unique fixed point h(g) with ||h(g)|| <= ||grad H||_inf / N_excl * (1 +
q / (1 - q)).  The generating function is

    Phi(g) = action(g + h(g)),
    grad Phi(g) = Dirac g - P_N grad H(g + h(g)),
    hess Phi(g) = Dirac|_N - P_N hess H(g + h(g)) (I + Dh(g)),

with Dh(g) evaluated by a Neumann series whose convergence rate is bounded
by q.  Zeros of grad Phi are exactly the g whose lift g + h(g) solves the
full equation, which is what the search layer consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .clifford import CliffordModule, PencilError
from .fields import (FourierField, Frame, _mode_array, apply_dirac, half_modes,
                     l2_inner, l2_norm, mode_magnitudes)
from .hamiltonians import (TrigHamiltonian, action, hess_grid, nabla_H_field,
                           required_grid_size)

__all__ = [
    "Truncation",
    "FiberSolution",
    "ReducedProblem",
    "ContractionError",
    "make_truncation",
    "choose_truncation",
    "lemma_quadratic_diagnostic",
    "fiber_scaling_rows",
]

MAG_TIE_TOL = 1e-9


class ContractionError(RuntimeError):
    """The truncation is too small for the fiber map to contract."""


@dataclass(frozen=True)
class Truncation:
    """Spectral cutoff data: retained modes, excluded gap, contraction bound."""

    threshold: float
    n_excl: float
    q: float
    cutoff: int
    retained_mask: np.ndarray
    mags: np.ndarray
    n_retained: int


def make_truncation(threshold: float, frame: Frame, cutoff: int,
                    hess_inf: float) -> Truncation:
    """Truncation at a given threshold inside the working box |k|_inf <= K.

    Ties 2 pi |A^T k| = N are retained (closed condition).  Raises when no
    mode of the box is excluded, since then the excluded gap is unknown.
    """
    mags = mode_magnitudes(frame.rank, cutoff, frame)
    tol = MAG_TIE_TOL * max(1.0, threshold)
    nonzero = mags > 0.0
    retained = nonzero & (mags <= threshold + tol)
    excluded = nonzero & ~retained
    if not excluded.any():
        raise PencilError(
            f"working cutoff {cutoff} too small to realize threshold {threshold}")
    n_excl = float(mags[excluded].min())
    q = float(hess_inf / n_excl)
    return Truncation(threshold=float(threshold), n_excl=n_excl, q=q,
                      cutoff=cutoff, retained_mask=retained, mags=mags,
                      n_retained=int(retained.sum()))


def choose_truncation(H: TrigHamiltonian, frame: Frame, cutoff: int,
                      q_max: float = 0.25) -> Truncation:
    """Smallest threshold on the mode-magnitude ladder with q <= q_max."""
    hess_inf = H.sup_norms()["hess_inf"]
    mags = mode_magnitudes(frame.rank, cutoff, frame)
    rungs = np.unique(mags[mags > 0.0])
    for threshold in np.concatenate(([0.0], rungs)):
        try:
            trunc = make_truncation(threshold, frame, cutoff, hess_inf)
        except PencilError:
            break
        if trunc.q <= q_max:
            return trunc
    raise PencilError(
        f"working cutoff {cutoff} too small: cannot reach q <= {q_max} "
        f"(hess bound {hess_inf:.6g})")


@dataclass
class FiberSolution:
    h: FourierField
    iterations: int
    final_delta: float
    contraction_q: float      # measured linear rate
    q_prior: float            # a-priori bound hess_inf / N_excl


# ---------------------------------------------------------------------------
# Batched array helpers (trailing axis = column index)
# ---------------------------------------------------------------------------

def _conj_reverse(arr: np.ndarray, rank: int) -> np.ndarray:
    axes = tuple(range(rank))
    return np.roll(np.flip(arr.conj(), axis=axes), 1, axis=axes)


def _hermitianize(arr: np.ndarray, rank: int) -> np.ndarray:
    return 0.5 * (arr + _conj_reverse(arr, rank))


class ReducedProblem:
    """One configured reduction: operator data, fiber solver, Phi and its
    derivatives, and the packing of the reduced space into real coordinates.

    The packing is an L^2 isometry (base point plus sqrt(2)-scaled real and
    imaginary parts of the positive half-lattice modes, through the
    Cholesky factor of the metric), so packed Euclidean norms, gradients
    and Hessians agree with their L^2 counterparts.
    """

    def __init__(self, H: TrigHamiltonian, frame: Frame, module: CliffordModule,
                 trunc: Truncation, gram: np.ndarray = None,
                 grid_size: int = None, fiber_tol: float = 1e-12,
                 fiber_max_iter: int = 200):
        self.H = H
        self.frame = frame
        self.module = module
        self.trunc = trunc
        self.rank = frame.rank
        self.dim_v = module.dim_v if module is not None else 1
        if H.space_dim != self.dim_v or H.time_rank != self.rank:
            raise PencilError("Hamiltonian shape does not match the problem")
        self.cutoff = trunc.cutoff
        self.gram = np.eye(self.dim_v) if gram is None else np.asarray(gram, dtype=float)
        self.chol = np.linalg.cholesky(self.gram)
        self._id_gram = bool(np.all(self.gram == np.eye(self.dim_v)))
        self.gram_inv = np.linalg.inv(self.gram)
        self.grid_size = grid_size if grid_size is not None \
            else required_grid_size(self.cutoff, H)
        self.fiber_tol = fiber_tol
        self.fiber_max_iter = fiber_max_iter

        modes = _mode_array(self.rank, self.cutoff).astype(float)
        self.theta = 2.0 * np.pi * (modes @ frame.matrix)
        self.mags = trunc.mags
        self.zero_mask = ~(self.mags > 0.0)
        self.retained_mask = trunc.retained_mask
        self.reduced_mask = self.retained_mask | self.zero_mask
        self.excluded_mask = ~self.reduced_mask
        inv_sq = np.where(self.excluded_mask, 1.0 / np.where(self.mags > 0, self.mags, 1.0) ** 2, 0.0)
        self.inv_theta = self.theta * inv_sq[..., None]

        size = 2 * self.cutoff + 1
        self.retained_half = [k for k in half_modes(self.rank, self.cutoff)
                              if self.retained_mask[tuple(c % size for c in k)]]
        self.n_fiber = 2 * self.dim_v * len(self.retained_half)
        self.n_dof = self.dim_v + self.n_fiber
        self._half_idx = [tuple(c % size for c in k) for k in self.retained_half]
        self._neg_idx = [tuple((-c) % size for c in k) for k in self.retained_half]
        self._zero_idx = (0,) * self.rank

    # -- field helpers -----------------------------------------------------------

    def zeros(self) -> FourierField:
        return FourierField.zeros(self.rank, self.dim_v, self.cutoff)

    def project_reduced(self, f: FourierField) -> FourierField:
        return f.like(f.coeffs * self.reduced_mask[..., None])

    def project_excluded(self, f: FourierField) -> FourierField:
        return f.like(f.coeffs * self.excluded_mask[..., None])

    def dirac_inverse_excluded(self, f: FourierField) -> FourierField:
        """Per-mode inverse of the operator on the excluded modes."""
        arr = self._dirac_inv_arr(f.coeffs[..., None])[..., 0]
        return f.like(arr)

    def l2(self, f: FourierField, g: FourierField) -> float:
        return l2_inner(f, g, self.gram)

    def norm(self, f: FourierField) -> float:
        return l2_norm(f, self.gram)

    def dirac(self, f: FourierField) -> FourierField:
        return apply_dirac(f, self.frame, self.module)

    def nabla(self, f: FourierField) -> FourierField:
        """Gradient of H along the target, taken w.r.t. the metric."""
        w = nabla_H_field(f, self.H, self.grid_size)
        if not self._id_gram:
            w = w.like(np.einsum("ab,...b->...a", self.gram_inv, w.coeffs))
        return w

    # -- packing -----------------------------------------------------------------

    def pack(self, f: FourierField) -> np.ndarray:
        z = np.empty(self.n_dof)
        LT = self.chol.T
        z[: self.dim_v] = LT @ f.coeffs[self._zero_idx].real
        s = np.sqrt(2.0)
        off = self.dim_v
        for idx in self._half_idx:
            c = f.coeffs[idx]
            z[off: off + self.dim_v] = s * (LT @ c.real)
            off += self.dim_v
            z[off: off + self.dim_v] = s * (LT @ c.imag)
            off += self.dim_v
        return z

    def unpack(self, z: np.ndarray) -> FourierField:
        f = self.zeros()
        LT = self.chol.T
        base = np.linalg.solve(LT, z[: self.dim_v])
        f.coeffs[self._zero_idx] = base
        s = 1.0 / np.sqrt(2.0)
        off = self.dim_v
        for idx, nidx in zip(self._half_idx, self._neg_idx):
            re = np.linalg.solve(LT, z[off: off + self.dim_v]) * s
            off += self.dim_v
            im = np.linalg.solve(LT, z[off: off + self.dim_v]) * s
            off += self.dim_v
            f.coeffs[idx] = re + 1j * im
            f.coeffs[nidx] = re - 1j * im
        return f

    # -- fiber solve ---------------------------------------------------------------

    def solve_fiber(self, g: FourierField, tol: float = None, max_iter: int = None,
                    h0: FourierField = None) -> FiberSolution:
        """Fixed-point iteration for the excluded-mode component h(g).

        Starts at h = 0 (or a caller-supplied warm start) and stops once the
        update falls below tol; the final residual of the fixed point
        equation is then at most q * tol.
        """
        tol = self.fiber_tol if tol is None else tol
        max_iter = self.fiber_max_iter if max_iter is None else max_iter
        if self.trunc.q >= 1.0:
            raise ContractionError(
                f"a-priori contraction bound q = {self.trunc.q:.4g} >= 1: "
                "truncation too small")
        h = self.zeros() if h0 is None else h0
        deltas = []
        for it in range(1, max_iter + 1):
            w = self.nabla(g + h)
            h_new = self.dirac_inverse_excluded(self.project_excluded(w))
            delta = self.norm(h_new - h)
            deltas.append(delta)
            h = h_new
            if delta <= tol:
                rate = deltas[-1] / deltas[-2] if len(deltas) >= 2 and deltas[-2] > 0 else 0.0
                return FiberSolution(h=h, iterations=it, final_delta=delta,
                                     contraction_q=float(rate), q_prior=self.trunc.q)
        raise ContractionError(
            f"fiber iteration did not reach tol {tol:.3g} in {max_iter} steps "
            f"(last delta {deltas[-1]:.3g})")

    # -- generating function ----------------------------------------------------------

    def phi(self, g: FourierField, fiber: FiberSolution = None) -> float:
        fiber = fiber or self.solve_fiber(g)
        return action(g + fiber.h, self.H, self.frame, self.module,
                      self.gram, self.grid_size)

    def grad_phi(self, g: FourierField, fiber: FiberSolution = None) -> FourierField:
        fiber = fiber or self.solve_fiber(g)
        w = self.nabla(g + fiber.h)
        return self.project_reduced(self.dirac(g) - w)

    def grad_packed(self, z: np.ndarray, h0: FourierField = None):
        g = self.unpack(z)
        fiber = self.solve_fiber(g, h0=h0)
        return self.pack(self.grad_phi(g, fiber)), fiber

    def phi0(self, g: FourierField) -> float:
        return 0.5 * self.l2(self.dirac(g), g)

    # -- batched machinery for Dh and the Hessian ------------------------------------

    def _embed(self, arr: np.ndarray) -> np.ndarray:
        from .fields import _embed_indices
        M = self.grid_size
        big = np.zeros((M,) * self.rank + arr.shape[self.rank:], dtype=complex)
        idx = _embed_indices(self.cutoff, M)
        big[np.ix_(*([idx] * self.rank))] = arr
        return big

    def _to_grid(self, arr: np.ndarray) -> np.ndarray:
        axes = tuple(range(self.rank))
        big = self._embed(arr)
        return (_fft.ifftn(big, axes=axes, workers=-1) * self.grid_size ** self.rank).real

    def _from_grid(self, vals: np.ndarray, cutoff: int = None) -> np.ndarray:
        from .fields import _embed_indices
        cutoff = self.cutoff if cutoff is None else cutoff
        axes = tuple(range(self.rank))
        co = _fft.fftn(vals.astype(complex), axes=axes, workers=-1) / self.grid_size ** self.rank
        idx = _embed_indices(cutoff, self.grid_size)
        arr = co[np.ix_(*([idx] * self.rank))]
        return _hermitianize(arr, self.rank)

    def _dirac_arr(self, arr: np.ndarray) -> np.ndarray:
        """Operator applied to a batch (box..., dim_v, B)."""
        if self.module is None:
            return arr * (1j * self.theta[..., 0])[..., None, None]
        out = np.zeros_like(arr)
        for l, J in enumerate(self.module.generators):
            out += (1j * self.theta[..., l])[..., None, None] * \
                np.einsum("ab,...bB->...aB", J, arr)
        return out

    def _dirac_inv_arr(self, arr: np.ndarray) -> np.ndarray:
        """Inverse on the excluded modes for a batch; zero elsewhere.

        The per-mode inverse is the adjoint over the squared magnitude,
        which covers both the Clifford case (Hermitian mode matrices) and
        the scalar case (skew scalar symbol).
        """
        if self.module is None:
            return arr * (-1j * self.inv_theta[..., 0])[..., None, None]
        out = np.zeros_like(arr)
        for l, J in enumerate(self.module.generators):
            out += (1j * self.inv_theta[..., l])[..., None, None] * \
                np.einsum("ab,...bB->...aB", J, arr)
        return out

    def _hess_apply_arr(self, hess_vals: np.ndarray, arr: np.ndarray) -> np.ndarray:
        vals = self._to_grid(arr)
        out = np.einsum("...ab,...bB->...aB", hess_vals, vals)
        if not self._id_gram:
            out = np.einsum("ab,...bB->...aB", self.gram_inv, out)
        return self._from_grid(out)

    def _col_norms(self, arr: np.ndarray) -> np.ndarray:
        flat = arr.reshape(-1, arr.shape[-1])
        return np.sqrt(np.einsum("ib,ib->b", flat.conj(), flat).real)

    def _dh_batch(self, hess_vals: np.ndarray, warr: np.ndarray,
                  rtol: float = 1e-12, max_iter: int = 400) -> np.ndarray:
        """Neumann series for Dh applied to a batch of tangent fields."""
        scale = max(float(self._col_norms(warr).max(initial=0.0)), 1e-300)
        excl = self.excluded_mask[..., None, None]
        U = np.zeros_like(warr)
        for _ in range(max_iter):
            nxt = self._dirac_inv_arr(self._hess_apply_arr(hess_vals, warr + U) * excl)
            inc = float(self._col_norms(nxt - U).max(initial=0.0))
            U = nxt
            if inc <= rtol * scale:
                return U
        raise ContractionError("Neumann series for Dh did not converge (q >= 1?)")

    def apply_dh(self, g: FourierField, w: FourierField,
                 fiber: FiberSolution = None, rtol: float = 1e-12) -> FourierField:
        """Derivative of g -> h(g) applied to a tangent field w."""
        fiber = fiber or self.solve_fiber(g)
        hess_vals, _ = hess_grid(g + fiber.h, self.H, self.grid_size)
        out = self._dh_batch(hess_vals, w.coeffs[..., None], rtol=rtol)
        return w.like(out[..., 0])

    def _basis_batch(self, indices) -> np.ndarray:
        cols = np.zeros((self.n_dof, len(indices)))
        for j, i in enumerate(indices):
            cols[i, j] = 1.0
        shape = (2 * self.cutoff + 1,) * self.rank + (self.dim_v, len(indices))
        out = np.zeros(shape, dtype=complex)
        for j in range(len(indices)):
            out[..., j] = self.unpack(cols[:, j]).coeffs
        return out

    def _pack_batch(self, arr: np.ndarray) -> np.ndarray:
        B = arr.shape[-1]
        Z = np.empty((self.n_dof, B))
        LT = self.chol.T
        Z[: self.dim_v] = LT @ arr[self._zero_idx].real
        s = np.sqrt(2.0)
        off = self.dim_v
        for idx in self._half_idx:
            c = arr[idx]
            Z[off: off + self.dim_v] = s * (LT @ c.real)
            off += self.dim_v
            Z[off: off + self.dim_v] = s * (LT @ c.imag)
            off += self.dim_v
        return Z

    def _dirac_packed(self) -> np.ndarray:
        """The operator restricted to the reduced space, in packed coords.

        Block [[0, -A], [A, 0]] per half mode with A = sum_l theta_l J_l,
        zero on the base block.
        """
        out = np.zeros((self.n_dof, self.n_dof))
        dv = self.dim_v
        off = dv
        for k in self.retained_half:
            th = 2.0 * np.pi * self.frame.covector(k)
            if self.module is None:
                A = np.array([[th[0]]])
            else:
                A = np.zeros((dv, dv))
                for t, J in zip(th, self.module.generators):
                    A += t * J
            out[off + dv: off + 2 * dv, off: off + dv] = A
            out[off: off + dv, off + dv: off + 2 * dv] = -A
            off += 2 * dv
        return out

    def _conv_packed(self, hess_vals: np.ndarray) -> np.ndarray:
        """P_N hess H(f) P_N in packed coordinates, via box coefficients.

        The restricted operator is a mode-space convolution with the
        Fourier coefficients of the pointwise Hessian, so the packed block
        between half modes k and k' follows from the coefficients at
        k - k' and k + k'; exact agreement with the grid path since both
        difference and sum stay within twice the working cutoff.
        """
        conv_cut = min(2 * self.cutoff, (self.grid_size - 1) // 2)
        box = self._from_grid(hess_vals, cutoff=conv_cut)
        size = 2 * conv_cut + 1

        def at(m):
            if max(abs(int(c)) for c in m) > conv_cut:
                return np.zeros((self.dim_v, self.dim_v), dtype=complex)
            return box[tuple(int(c) % size for c in m)]

        dv = self.dim_v
        s = np.sqrt(2.0)
        out = np.zeros((self.n_dof, self.n_dof))
        out[:dv, :dv] = at((0,) * self.rank).real
        for i, k in enumerate(self.retained_half):
            ro = dv + 2 * dv * i
            blk = at(k)
            out[ro: ro + dv, :dv] = s * blk.real
            out[ro + dv: ro + 2 * dv, :dv] = s * blk.imag
            out[:dv, ro: ro + dv] = s * blk.real.T
            out[:dv, ro + dv: ro + 2 * dv] = s * blk.imag.T
            for j, kp in enumerate(self.retained_half):
                co = dv + 2 * dv * j
                mpp = at(tuple(a - b for a, b in zip(k, kp)))
                mpm = at(tuple(a + b for a, b in zip(k, kp)))
                re_in = mpp + mpm
                im_in = mpp - mpm
                out[ro: ro + dv, co: co + dv] = re_in.real
                out[ro + dv: ro + 2 * dv, co: co + dv] = re_in.imag
                out[ro: ro + dv, co + dv: co + 2 * dv] = -im_in.imag
                out[ro + dv: ro + 2 * dv, co + dv: co + 2 * dv] = im_in.real
        return out

    def hessian_packed(self, g: FourierField, fiber: FiberSolution = None,
                       include_dh: bool = True, symmetrize: bool = True,
                       chunk: int = 64, dh_rtol: float = 1e-12) -> np.ndarray:
        """The derivative of packed grad Phi.

        With include_dh the result is the exact Hessian
        Dirac|_N - P_N hess H(f) (I + Dh); without it, the cheap frozen-fiber
        Jacobian used inside Newton iterations.  The Dh-free part assembles
        directly from convolution blocks (identity metric) or column by
        column otherwise; the Dh correction always goes column by column.
        """
        fiber = fiber or self.solve_fiber(g)
        hess_vals, _ = hess_grid(g + fiber.h, self.H, self.grid_size)
        red = self.reduced_mask[..., None, None]
        if self._id_gram:
            out = self._dirac_packed() - self._conv_packed(hess_vals)
            if include_dh:
                for start in range(0, self.n_dof, chunk):
                    idx = list(range(start, min(start + chunk, self.n_dof)))
                    W = self._basis_batch(idx)
                    U = self._dh_batch(hess_vals, W, rtol=dh_rtol)
                    out[:, idx] -= self._pack_batch(self._hess_apply_arr(hess_vals, U) * red)
        else:
            out = np.empty((self.n_dof, self.n_dof))
            for start in range(0, self.n_dof, chunk):
                idx = list(range(start, min(start + chunk, self.n_dof)))
                W = self._basis_batch(idx)
                V = W
                if include_dh:
                    V = W + self._dh_batch(hess_vals, W, rtol=dh_rtol)
                col = self._dirac_arr(W) - self._hess_apply_arr(hess_vals, V) * red
                out[:, idx] = self._pack_batch(col)
        if symmetrize:
            out = 0.5 * (out + out.T)
        return out

    def hess_phi(self, g: FourierField, fiber: FiberSolution = None,
                 dh_rtol: float = 1e-12) -> np.ndarray:
        return self.hessian_packed(g, fiber, include_dh=True, symmetrize=True,
                                   dh_rtol=dh_rtol)

    # -- residual of the lifted equation ---------------------------------------------

    def lifted_residual(self, g: FourierField, fiber: FiberSolution = None) -> float:
        fiber = fiber or self.solve_fiber(g)
        f = g + fiber.h
        return self.norm(self.dirac(f) - self.nabla(f))


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def lemma_quadratic_diagnostic(problem: ReducedProblem, radii, n_dirs: int = 4,
                               seed: int = 0) -> dict:
    """Measure |R| + ||grad R|| against ||grad Phi_0|| on fiber spheres.

    R = Phi - Phi_0 with Phi_0(g) = 1/2 <Dirac g, g>; the perturbation part
    of the gradient is grad Phi - Dirac g.  Reports per-radius extremes and
    the smallest sampled radius beyond which the inequality holds at every
    larger sampled radius.
    """
    rng = np.random.default_rng(seed)
    radii = sorted(float(r) for r in radii)
    rows = []
    for rho in radii:
        worst_lhs, worst_margin = 0.0, np.inf
        holds = True
        for _ in range(n_dirs):
            z = np.zeros(problem.n_dof)
            z[: problem.dim_v] = rng.uniform(0.0, 1.0, size=problem.dim_v)
            if problem.n_fiber:
                direction = rng.standard_normal(problem.n_fiber)
                direction /= np.linalg.norm(direction)
                z[problem.dim_v:] = rho * direction
            g = problem.unpack(z)
            fiber = problem.solve_fiber(g)
            big_r = problem.phi(g, fiber) - problem.phi0(g)
            grad_r = problem.grad_phi(g, fiber) - problem.project_reduced(problem.dirac(g))
            lhs = abs(big_r) + problem.norm(grad_r)
            rhs = problem.norm(problem.dirac(g))
            holds = holds and (lhs < rhs)
            worst_lhs = max(worst_lhs, lhs)
            worst_margin = min(worst_margin, rhs - lhs)
        rows.append({"radius": rho, "holds": bool(holds),
                     "max_lhs": worst_lhs, "min_margin": float(worst_margin)})
    crossover = None
    for i in range(len(rows)):
        if all(r["holds"] for r in rows[i:]):
            crossover = rows[i]["radius"]
            break
    return {"rows": rows, "crossover": crossover}


def fiber_scaling_rows(H: TrigHamiltonian, frame: Frame, module, base_trunc: Truncation,
                       g: FourierField, factors=(1.0, 2.0, 4.0), gram=None,
                       grid_size=None, tol: float = 1e-12) -> list:
    """Solve the fiber at thresholds N * factors for a fixed g.

    Returns one row per rung with the CSV fields N, N_excl, q, h_norm,
    iters; used both for the emitted ladder diagnostics and the O(1/N)
    scaling check (the log-log slope of h_norm against N_excl).
    """
    hess_inf = H.sup_norms()["hess_inf"]
    rows = []
    base_n = base_trunc.threshold if base_trunc.threshold > 0 else base_trunc.n_excl
    for fac in factors:
        trunc = make_truncation(base_n * fac, frame, base_trunc.cutoff, hess_inf)
        prob = ReducedProblem(H, frame, module, trunc, gram=gram,
                              grid_size=grid_size, fiber_tol=tol)
        fiber = prob.solve_fiber(g)
        rows.append({
            "N": trunc.threshold,
            "N_excl": trunc.n_excl,
            "q": trunc.q,
            "h_norm": prob.norm(fiber.h),
            "iters": fiber.iterations,
        })
    return rows
