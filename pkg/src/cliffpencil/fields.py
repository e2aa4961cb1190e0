"""Truncated Fourier representation of maps T^r -> V and the operator
sum_l J_l L_{v_l} built from a constant frame and a Clifford module.

Conventions.  Torus coordinates have period 1, so a mode k in Z^r carries
the frequency 2 pi k and the volume form is normalized to total mass 1;
L^2 norms are then cutoff-independent and the zero mode is the mean value.
On one mode the operator acts by

    D_k = 2 pi i sum_l <k, v_l> J_l,

a Hermitian matrix (i times a real antisymmetric one) whose square is
+(2 pi |A^T k|)^2 I on a Clifford module; its eigenvalues are the real
pair +-2 pi |A^T k|, each with multiplicity dim_v / 2.  The full operator
is therefore self-adjoint on real fields, with spectral gap
2 pi min_{k != 0} |A^T k| over zero-mean fields.

The scalar case dim_v = 1 (no complex structure exists there) is carried
along for the classical one-dimensional target: the operator degenerates
to the plain derivative along v_1, whose mode symbol 2 pi i <k, v_1> is
still invertible for k != 0, which is all the downstream reduction uses.

Fields are stored as dense complex arrays over the full mode box
|k|_inf <= K in FFT index order, with the reality constraint
c_{-k} = conj(c_k) enforced explicitly; serialization emits only the
lexicographically positive half-lattice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .clifford import CliffordModule, PencilError
from .quaternion import su2_counterexample_residual  # re-exported

__all__ = [
    "Frame",
    "FourierField",
    "mode_operator",
    "mode_spectrum",
    "lie_derivative",
    "apply_dirac",
    "l2_inner",
    "l2_norm",
    "regularity_gap",
    "half_modes",
    "is_positive_mode",
    "field_to_json",
    "field_from_json",
    "su2_counterexample_residual",
]

REALITY_TOL = 1e-12


@dataclass(frozen=True)
class Frame:
    """Invertible r x r matrix whose column l holds the coefficients of v_l.

    Constant-coefficient fields on the torus are automatically
    divergence-free.
    """

    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise PencilError("frame matrix must be square")
        r = a.shape[0]
        norm = np.linalg.norm(a, 2)
        if abs(np.linalg.det(a)) <= 1e-12 * max(norm, 1.0) ** r:
            raise PencilError("frame matrix is singular: not a frame")

    @property
    def rank(self) -> int:
        return self.matrix.shape[0]

    def covector(self, k) -> np.ndarray:
        """A^T k, the per-field frequencies <k, v_l>."""
        return self.matrix.T @ np.asarray(k, dtype=float)


# ---------------------------------------------------------------------------
# Mode bookkeeping
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _mode_array(rank: int, cutoff: int) -> np.ndarray:
    """Integer modes of the box in FFT order, shape (2K+1,)*r + (r,)."""
    axis = np.fft.fftfreq(2 * cutoff + 1, d=1.0 / (2 * cutoff + 1)).round().astype(int)
    grids = np.meshgrid(*([axis] * rank), indexing="ij")
    return np.stack(grids, axis=-1)


def is_positive_mode(k) -> bool:
    """True when the first nonzero entry of k is positive."""
    for c in k:
        if c > 0:
            return True
        if c < 0:
            return False
    return False


def half_modes(rank: int, cutoff: int) -> list:
    """Lexicographically sorted positive half of the mode box."""
    out = [k for k in product(range(-cutoff, cutoff + 1), repeat=rank)
           if is_positive_mode(k)]
    out.sort()
    return out


def _fft_index(k, size: int):
    return tuple(int(c) % size for c in k)


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------

class FourierField:
    """Map T^r -> R^{dim_v} as coefficients c_k over the box |k|_inf <= K."""

    __slots__ = ("rank", "dim_v", "cutoff", "coeffs")

    def __init__(self, rank: int, dim_v: int, cutoff: int, coeffs: np.ndarray = None):
        self.rank = int(rank)
        self.dim_v = int(dim_v)
        self.cutoff = int(cutoff)
        shape = (2 * self.cutoff + 1,) * self.rank + (self.dim_v,)
        if coeffs is None:
            coeffs = np.zeros(shape, dtype=complex)
        else:
            coeffs = np.asarray(coeffs, dtype=complex)
            if coeffs.shape != shape:
                raise PencilError(f"coefficient array must have shape {shape}")
        self.coeffs = coeffs

    # -- construction helpers ------------------------------------------------

    @classmethod
    def zeros(cls, rank, dim_v, cutoff):
        return cls(rank, dim_v, cutoff)

    def copy(self) -> "FourierField":
        return FourierField(self.rank, self.dim_v, self.cutoff, self.coeffs.copy())

    def like(self, coeffs) -> "FourierField":
        return FourierField(self.rank, self.dim_v, self.cutoff, coeffs)

    # -- mode access ----------------------------------------------------------

    @property
    def size(self) -> int:
        return 2 * self.cutoff + 1

    def get_mode(self, k) -> np.ndarray:
        return self.coeffs[_fft_index(k, self.size)]

    def set_mode(self, k, value):
        value = np.asarray(value, dtype=complex)
        self.coeffs[_fft_index(k, self.size)] = value
        kk = tuple(-c for c in k)
        if kk != tuple(int(c) for c in k):
            self.coeffs[_fft_index(kk, self.size)] = value.conj()
        else:
            self.coeffs[_fft_index(k, self.size)] = value.real

    @property
    def base_point(self) -> np.ndarray:
        return self.get_mode((0,) * self.rank).real.copy()

    def with_base(self, x) -> "FourierField":
        out = self.copy()
        out.set_mode((0,) * self.rank, np.asarray(x, dtype=float))
        return out

    def zero_mean(self) -> "FourierField":
        out = self.copy()
        out.set_mode((0,) * self.rank, np.zeros(self.dim_v))
        return out

    # -- reality --------------------------------------------------------------

    def _conjugate_reverse(self) -> np.ndarray:
        axes = tuple(range(self.rank))
        rev = np.flip(self.coeffs, axis=axes)
        rev = np.roll(rev, shift=1, axis=axes)
        return rev.conj()

    def hermitianize(self) -> "FourierField":
        return self.like(0.5 * (self.coeffs + self._conjugate_reverse()))

    def reality_defect(self) -> float:
        return float(np.abs(self.coeffs - self._conjugate_reverse()).max(initial=0.0))

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        self._check_shape(other)
        return self.like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_shape(other)
        return self.like(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self.like(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.like(-self.coeffs)

    def _check_shape(self, other):
        if (self.rank, self.dim_v, self.cutoff) != (other.rank, other.dim_v, other.cutoff):
            raise PencilError("field shape mismatch")

    # -- grid transforms --------------------------------------------------------

    def grid_values(self, grid_size: int) -> np.ndarray:
        """Real values on the uniform (grid_size,)*r grid, points j/grid_size."""
        if grid_size < self.size:
            raise PencilError("grid smaller than the mode box")
        axes = tuple(range(self.rank))
        big = np.zeros((grid_size,) * self.rank + (self.dim_v,), dtype=complex)
        idx = _embed_indices(self.cutoff, grid_size)
        big[np.ix_(*([idx] * self.rank))] = self.coeffs
        vals = np.fft.ifftn(big, axes=axes) * grid_size ** self.rank
        return vals.real

    @classmethod
    def from_grid_values(cls, values: np.ndarray, cutoff: int) -> "FourierField":
        values = np.asarray(values)
        rank = values.ndim - 1
        grid_size = values.shape[0]
        if grid_size < 2 * cutoff + 1:
            raise PencilError("grid smaller than the requested mode box")
        axes = tuple(range(rank))
        co = np.fft.fftn(values.astype(complex), axes=axes) / grid_size ** rank
        idx = _embed_indices(cutoff, grid_size)
        arr = co[np.ix_(*([idx] * rank))]
        return cls(rank, values.shape[-1], cutoff, arr).hermitianize()


@lru_cache(maxsize=None)
def _embed_indices(cutoff: int, grid_size: int) -> np.ndarray:
    """Target indices in a grid_size axis for box FFT-order indices."""
    idx = np.empty(2 * cutoff + 1, dtype=int)
    for i in range(2 * cutoff + 1):
        k = i if i <= cutoff else i - (2 * cutoff + 1)
        idx[i] = k % grid_size
    return idx


# ---------------------------------------------------------------------------
# The operator
# ---------------------------------------------------------------------------

def _theta(field_rank: int, cutoff: int, frame: Frame) -> np.ndarray:
    """2 pi <k, v_l> over the box, shape box + (r,)."""
    modes = _mode_array(field_rank, cutoff).astype(float)
    return 2.0 * np.pi * (modes @ frame.matrix)


def mode_magnitudes(rank: int, cutoff: int, frame: Frame) -> np.ndarray:
    """2 pi |A^T k| over the box (the per-mode eigenvalue magnitude)."""
    return np.linalg.norm(_theta(rank, cutoff, frame), axis=-1)


def mode_operator(k, frame: Frame, module: CliffordModule) -> np.ndarray:
    """The matrix D_k = 2 pi i sum_l <k, v_l> J_l of one mode."""
    th = 2.0 * np.pi * frame.covector(k)
    if module is None:
        return np.array([[1j * th[0]]]) if frame.rank == 1 else _scalar_error()
    D = np.zeros((module.dim_v, module.dim_v), dtype=complex)
    for t, J in zip(th, module.generators):
        D += 1j * t * J
    return D


def _scalar_error():
    raise PencilError("scalar fields require rank 1")


def mode_spectrum(k, frame: Frame, module: CliffordModule) -> list:
    """Eigenvalues of D_k with multiplicities, as (value, mult) pairs.

    For a Clifford module this is +-2 pi |A^T k|, each with multiplicity
    dim_v / 2; the zero mode gives 0 with full multiplicity.
    """
    if module is None:
        raise PencilError("mode_spectrum requires a Clifford module")
    if not np.any(np.asarray(k)):
        return [(0.0, module.dim_v)]
    D = mode_operator(k, frame, module)
    eigs = np.linalg.eigvals(D)
    if np.abs(eigs.imag).max() > 1e-8 * max(1.0, np.abs(eigs).max()):
        raise PencilError("mode operator has non-real spectrum; module is not Clifford")
    vals = np.sort(eigs.real)
    out = []
    for v in vals:
        if out and abs(v - out[-1][0]) <= 1e-9 * max(1.0, abs(v)):
            out[-1][1] += 1
        else:
            out.append([float(v), 1])
    return [(v, m) for v, m in out]


def lie_derivative(f: FourierField, v) -> FourierField:
    """Derivative along the constant field v: mode k scales by 2 pi i <k, v>."""
    v = np.asarray(v, dtype=float)
    if v.shape != (f.rank,):
        raise PencilError("direction length must equal the field rank")
    modes = _mode_array(f.rank, f.cutoff).astype(float)
    factor = 2j * np.pi * (modes @ v)
    return f.like(f.coeffs * factor[..., None])


def apply_dirac(f: FourierField, frame: Frame, module: CliffordModule) -> FourierField:
    """sum_l J_l L_{v_l} f, applied per mode; output cutoff equals input."""
    if frame.rank != f.rank:
        raise PencilError("frame rank does not match the field rank")
    th = _theta(f.rank, f.cutoff, frame)
    if module is None:
        if f.dim_v != 1:
            raise PencilError("module required for vector-valued fields")
        return f.like(f.coeffs * (1j * th[..., 0])[..., None])
    if module.rank != frame.rank:
        raise PencilError("frame rank does not match the module rank")
    if module.dim_v != f.dim_v:
        raise PencilError("module dimension does not match the field")
    out = np.zeros_like(f.coeffs)
    for l, J in enumerate(module.generators):
        out += (1j * th[..., l])[..., None] * np.einsum("ab,...b->...a", J, f.coeffs)
    return f.like(out)


def l2_inner(f: FourierField, g: FourierField, gram: np.ndarray = None) -> float:
    """L^2 pairing with unit total volume: sum_k conj(c_k)^T G c'_k."""
    f._check_shape(g)
    if gram is None:
        val = np.sum(f.coeffs.conj() * g.coeffs)
    else:
        val = np.sum(f.coeffs.conj() * np.einsum("ab,...b->...a", gram, g.coeffs))
    return float(val.real)


def l2_norm(f: FourierField, gram: np.ndarray = None) -> float:
    return float(np.sqrt(max(l2_inner(f, f, gram), 0.0)))


def regularity_gap(frame: Frame, module: CliffordModule, search_box: int) -> dict:
    """Spectral gap over zero-mean fields, with its certified lower bound.

    A constant invertible frame is always regular: |A^T k| >= sigma_min(A)
    |k| > 0 for k != 0, so the kernel is exactly the constants.  The gap is
    2 pi min_{0 < |k|_inf <= search_box} |A^T k| and the reported bound is
    2 pi sigma_min(A).
    """
    if search_box < 1:
        raise PencilError("search box must be at least 1")
    mags = mode_magnitudes(frame.rank, search_box, frame)
    flat = mags.ravel()
    nonzero = flat[flat > 0.0]
    # k = 0 is the only zero of |A^T k| since the frame is invertible
    gap = float(nonzero.min())
    sigma_min = float(np.linalg.svd(frame.matrix, compute_uv=False)[-1])
    return {
        "regular": True,
        "gap": gap,
        "certified_lower_bound": float(2.0 * np.pi * sigma_min),
    }


# ---------------------------------------------------------------------------
# Serialization (half-lattice only)
# ---------------------------------------------------------------------------

def field_to_json(f: FourierField) -> str:
    modes = []
    zero = (0,) * f.rank
    c0 = f.get_mode(zero)
    if np.any(c0 != 0):
        modes.append({"k": list(zero), "re": c0.real.tolist(), "im": c0.imag.tolist()})
    for k in half_modes(f.rank, f.cutoff):
        c = f.get_mode(k)
        if np.any(c != 0):
            modes.append({"k": list(k), "re": c.real.tolist(), "im": c.imag.tolist()})
    doc = {"rank": f.rank, "dim_v": f.dim_v, "cutoff": f.cutoff, "modes": modes}
    return json.dumps(doc, sort_keys=True)


def field_from_json(text: str) -> FourierField:
    doc = json.loads(text)
    f = FourierField(int(doc["rank"]), int(doc["dim_v"]), int(doc["cutoff"]))
    for rec in doc["modes"]:
        k = tuple(int(c) for c in rec["k"])
        f.set_mode(k, np.array(rec["re"], dtype=float) + 1j * np.array(rec["im"], dtype=float))
    return f
