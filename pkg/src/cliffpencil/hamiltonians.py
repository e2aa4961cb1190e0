"""Trigonometric Hamiltonians on T^r x T^d with exact derivatives.

A Hamiltonian is a finite sum of terms

    c * cos(2 pi (m.t + n.x)) + s * sin(2 pi (m.t + n.x)),

with integer time mode m and space mode n, so gradients and Hessians in x
are again trigonometric polynomials and sup-norm bounds follow from
coefficient sums.  Composition with a Fourier field is evaluated
pseudospectrally on a uniform grid sized for the combined bandwidth; the
grid refuses to run undersized rather than alias silently.

The action functional of a field f = (x_0, phi) is

    action(f) = 1/2 <Dirac phi, phi>_{L^2} - mean_t H(t, f(t)),

the factor 1/2 fixed so that the L^2 gradient of the quadratic part is the
operator itself.
"""

from __future__ import annotations

import numpy as np

from .clifford import PencilError
from .fields import FourierField, Frame, apply_dirac, l2_inner

__all__ = [
    "HamiltonianTerm",
    "TrigHamiltonian",
    "LatticeTorus",
    "required_grid_size",
    "nabla_H_field",
    "hess_apply_field",
    "action",
]

TWO_PI = 2.0 * np.pi


class HamiltonianTerm:
    """One trigonometric term with integer modes and real coefficients."""

    __slots__ = ("m", "n", "cos", "sin")

    def __init__(self, m, n, cos=0.0, sin=0.0):
        self.m = tuple(int(c) for c in m)
        self.n = tuple(int(c) for c in n)
        self.cos = float(cos)
        self.sin = float(sin)

    @property
    def amplitude(self) -> float:
        return float(np.hypot(self.cos, self.sin))

    def to_record(self) -> dict:
        return {"m": list(self.m), "n": list(self.n), "cos": self.cos, "sin": self.sin}


class TrigHamiltonian:
    """Real trigonometric polynomial H: T^r x T^d -> R."""

    def __init__(self, time_rank: int, space_dim: int, terms):
        self.time_rank = int(time_rank)
        self.space_dim = int(space_dim)
        self.terms = []
        for term in terms:
            if isinstance(term, dict):
                term = HamiltonianTerm(term["m"], term["n"],
                                       term.get("cos", 0.0), term.get("sin", 0.0))
            if len(term.m) != self.time_rank or len(term.n) != self.space_dim:
                raise PencilError("term mode lengths must match (time_rank, space_dim)")
            self.terms.append(term)

    # -- pointwise evaluation ---------------------------------------------------

    def _phases(self, t, x):
        """2 pi (m.t + n.x) per term; t, x may carry leading batch axes."""
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return [TWO_PI * (t @ np.array(term.m, dtype=float)
                          + x @ np.array(term.n, dtype=float))
                for term in self.terms]

    def eval(self, t, x):
        t = np.asarray(t, dtype=float)
        out = 0.0
        for term, th in zip(self.terms, self._phases(t, x)):
            out = out + term.cos * np.cos(th) + term.sin * np.sin(th)
        if np.ndim(out) == 0:
            return float(out)
        return out

    def grad_x(self, t, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for term, th in zip(self.terms, self._phases(t, x)):
            radial = TWO_PI * (-term.cos * np.sin(th) + term.sin * np.cos(th))
            out = out + np.asarray(radial)[..., None] * np.array(term.n, dtype=float)
        return out

    def hess_x(self, t, x):
        x = np.asarray(x, dtype=float)
        d = self.space_dim
        out = np.zeros(x.shape[:-1] + (d, d))
        for term, th in zip(self.terms, self._phases(t, x)):
            nn = np.outer(term.n, term.n).astype(float)
            radial = -TWO_PI ** 2 * (term.cos * np.cos(th) + term.sin * np.sin(th))
            out = out + np.asarray(radial)[..., None, None] * nn
        return out

    # -- bounds -------------------------------------------------------------------

    def sup_norms(self) -> dict:
        """Rigorous upper bounds from coefficient sums at each order."""
        h = g = hh = 0.0
        for term in self.terms:
            amp = term.amplitude
            n_norm = float(np.linalg.norm(term.n))
            h += amp
            g += amp * TWO_PI * n_norm
            hh += amp * TWO_PI ** 2 * n_norm ** 2
        return {"H_inf": h, "grad_inf": g, "hess_inf": hh}

    def sup_norm_order(self, order: int) -> float:
        """Coefficient-sum bound on the derivatives of a given order."""
        return float(sum(term.amplitude * (TWO_PI * np.linalg.norm(term.n)) ** order
                         for term in self.terms))

    @property
    def max_space_mode(self) -> int:
        return max((max(map(abs, term.n), default=0) for term in self.terms), default=0)

    @property
    def max_time_mode(self) -> int:
        return max((max(map(abs, term.m), default=0) for term in self.terms), default=0)

    def to_records(self) -> list:
        return [term.to_record() for term in self.terms]


class LatticeTorus:
    """Quotient torus W; points are stored in lattice coordinates."""

    def __init__(self, dim: int, basis=None):
        self.dim = int(dim)
        self.basis = np.eye(self.dim) if basis is None else np.asarray(basis, dtype=float)
        if self.basis.shape != (self.dim, self.dim):
            raise PencilError("lattice basis must be d x d")
        if abs(np.linalg.det(self.basis)) < 1e-12:
            raise PencilError("lattice basis must be invertible")

    def reduce(self, x) -> np.ndarray:
        """Representative in the fundamental domain [0, 1)^d.

        Values within 1e-9 of the upper face wrap to 0 so that points
        converged to a lattice translate of the origin report identically.
        """
        r = np.mod(np.asarray(x, dtype=float), 1.0)
        r[r > 1.0 - 1e-9] = 0.0
        return r

    def distance(self, x, y) -> float:
        """Torus distance in lattice coordinates."""
        diff = self.reduce(np.asarray(x) - np.asarray(y))
        diff = np.minimum(diff, 1.0 - diff)
        return float(np.linalg.norm(diff))


# ---------------------------------------------------------------------------
# Pseudospectral composition
# ---------------------------------------------------------------------------

def required_grid_size(cutoff: int, H: TrigHamiltonian) -> int:
    """Minimum dealiased grid for composing H with a cutoff-K field."""
    base = 2 * (cutoff + cutoff * H.max_space_mode + H.max_time_mode) + 1
    return max(base, 2 * cutoff + 1)


def _time_points(rank: int, grid_size: int) -> np.ndarray:
    """Grid points j / grid_size, shape (grid,)*r + (r,)."""
    axis = np.arange(grid_size) / grid_size
    grids = np.meshgrid(*([axis] * rank), indexing="ij")
    return np.stack(grids, axis=-1)


def _check_grid(grid_size, cutoff, H):
    need = required_grid_size(cutoff, H)
    if grid_size is None:
        return need
    if grid_size < need:
        raise PencilError(
            f"grid of size {grid_size} would alias: need at least {need}")
    return grid_size


def nabla_H_field(f: FourierField, H: TrigHamiltonian, grid_size: int = None) -> FourierField:
    """The field t -> grad H(t, f(t)), projected back to the cutoff of f."""
    if H.space_dim != f.dim_v or H.time_rank != f.rank:
        raise PencilError("Hamiltonian shape does not match the field")
    M = _check_grid(grid_size, f.cutoff, H)
    vals = f.grid_values(M)
    tpts = _time_points(f.rank, M)
    grads = H.grad_x(tpts, vals)
    return FourierField.from_grid_values(grads, f.cutoff)


def hess_grid(f: FourierField, H: TrigHamiltonian, grid_size: int = None):
    """Pointwise Hessians of H along f on the dealiased grid.

    Returns (values, grid_size); reusable across many directional applies.
    """
    M = _check_grid(grid_size, f.cutoff, H)
    vals = f.grid_values(M)
    tpts = _time_points(f.rank, M)
    d = H.space_dim
    th_stack = np.zeros(vals.shape[:-1] + (d, d))
    for term in H.terms:
        th = TWO_PI * (tpts @ np.array(term.m, dtype=float)
                       + vals @ np.array(term.n, dtype=float))
        nn = np.outer(term.n, term.n).astype(float)
        radial = -TWO_PI ** 2 * (term.cos * np.cos(th) + term.sin * np.sin(th))
        th_stack += radial[..., None, None] * nn
    return th_stack, M


def hess_apply_field(f: FourierField, w: FourierField, H: TrigHamiltonian,
                     grid_size: int = None, hess_vals=None) -> FourierField:
    """The field t -> hess H(t, f(t)) . w(t), projected to the cutoff of w."""
    if hess_vals is None:
        hess_vals, grid_size = hess_grid(f, H, grid_size)
    wv = w.grid_values(grid_size)
    out = np.einsum("...ab,...b->...a", hess_vals, wv)
    return FourierField.from_grid_values(out, w.cutoff)


def action(f: FourierField, H: TrigHamiltonian, frame: Frame, module,
           gram: np.ndarray = None, grid_size: int = None) -> float:
    """1/2 <Dirac f, f> minus the mean of H along f (unit total volume).

    The quadrature mean over the dealiased grid is exact for trigonometric
    content up to the grid bandwidth; the quadratic part only sees the
    zero-mean component of f since the operator kills constants.
    """
    quad = 0.5 * l2_inner(apply_dirac(f, frame, module), f, gram)
    M = _check_grid(grid_size, f.cutoff, H)
    vals = f.grid_values(M)
    tpts = _time_points(f.rank, M)
    hvals = H.eval(tpts, vals)
    mean = float(np.mean(hvals)) if np.ndim(hvals) else float(hvals)
    return quad - mean
