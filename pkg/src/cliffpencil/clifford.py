"""Clifford symplectic pencils on a finite-dimensional inner-product space.

A rank-r pencil is spanned by skew forms ``omega_1 .. omega_r`` such that
every nonzero combination is nondegenerate.  The Clifford case is the one
where the associated operators are anti-commuting orthogonal complex
structures ``J_l``:

    J_l^2 = -I,    J_l J_j + J_j J_l = 0   (l != j).

Generator tables for rank up to 8 are built from Cayley-Dickson
multiplication tables (complex numbers, quaternions, octonions, plus one
doubling step), so every entry is in {-1, 0, 1} and all algebra checks are
exact in floating point.  Ranks above 8 use the period-8 tensor recursion.

A general pencil given by an arbitrary basis of skew forms can be tested
for compatibility with a metric (every form squares to a negative scalar)
and, when compatible, orthonormalized into a Clifford module
("cliffordization").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SkewForm",
    "InnerProduct",
    "CliffordModule",
    "Pencil",
    "VerifyReport",
    "radon_hurwitz_max_rank",
    "build_clifford_module",
    "verify_module",
    "pencil_pairing",
    "is_compatible",
    "cliffordize",
    "symbol_invertible",
    "pencil_from_module",
    "module_to_json",
    "module_from_json",
]

SKEW_TOL = 1e-12
CHECK_TOL = 1e-10


class PencilError(ValueError):
    """Raised for ill-formed pencils, modules, or incompatible inputs."""


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InnerProduct:
    """Symmetric positive-definite Gram matrix on V."""

    gram: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=float)
        object.__setattr__(self, "gram", g)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise PencilError("inner product matrix must be square")
        if not np.allclose(g, g.T, atol=SKEW_TOL, rtol=0.0):
            raise PencilError("inner product matrix must be symmetric")
        if np.linalg.eigvalsh(g).min() <= 0.0:
            raise PencilError("inner product matrix must be positive definite")

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @staticmethod
    def standard(n: int) -> "InnerProduct":
        return InnerProduct(np.eye(n))


@dataclass(frozen=True)
class SkewForm:
    """Skew bilinear form, stored as the matrix A with omega(X,Y) = <A X, Y>.

    The pairing on the right-hand side is the standard one, so the stored
    matrix is antisymmetric.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise PencilError("form matrix must be square")
        if np.abs(m + m.T).max() > SKEW_TOL:
            raise PencilError("form matrix must be antisymmetric (1e-12)")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def operator(self, metric: InnerProduct) -> np.ndarray:
        """Matrix of the form w.r.t. ``metric``: omega(X,Y) = <A_w X, Y>_g."""
        if metric.dim != self.dim:
            raise PencilError("form/metric dimension mismatch")
        return np.linalg.solve(metric.gram, self.matrix)


@dataclass(frozen=True)
class CliffordModule:
    """r anti-commuting orthogonal complex structures on V."""

    dim_v: int
    rank: int
    generators: tuple
    metric: InnerProduct = field(default=None)

    def __post_init__(self):
        gens = tuple(np.asarray(J, dtype=float) for J in self.generators)
        object.__setattr__(self, "generators", gens)
        if self.metric is None:
            object.__setattr__(self, "metric", InnerProduct.standard(self.dim_v))
        if len(gens) != self.rank:
            raise PencilError("generator count must equal rank")
        for J in gens:
            if J.shape != (self.dim_v, self.dim_v):
                raise PencilError("generator shape mismatch")

    def symbol(self, lam) -> np.ndarray:
        """sum_l lam_l J_l."""
        lam = np.asarray(lam, dtype=float)
        out = np.zeros((self.dim_v, self.dim_v))
        for c, J in zip(lam, self.generators):
            out += c * J
        return out


@dataclass(frozen=True)
class Pencil:
    """A basis of skew forms together with the reference metric."""

    forms: tuple
    metric: InnerProduct

    def __post_init__(self):
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        if not forms:
            raise PencilError("pencil needs at least one form")
        n = self.metric.dim
        for w in forms:
            if w.dim != n:
                raise PencilError("form/metric dimension mismatch")
        stack = np.stack([w.matrix.ravel() for w in forms])
        sv = np.linalg.svd(stack, compute_uv=False)
        if sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise PencilError("forms are linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.forms)

    @property
    def dim(self) -> int:
        return self.metric.dim


@dataclass(frozen=True)
class VerifyReport:
    orthogonal: bool
    square_minus_id: bool
    anticommute: bool
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.orthogonal and self.square_minus_id and self.anticommute


# ---------------------------------------------------------------------------
# Radon-Hurwitz bound
# ---------------------------------------------------------------------------

def radon_hurwitz_max_rank(n: int) -> int:
    """Largest pencil rank a space of dimension n can carry.

    With n = 2^(4d+c) * b, b odd and 0 <= c <= 3, the value is
    8d + 2^c - 1.  Odd n gives 0.
    """
    if n < 1 or int(n) != n:
        raise PencilError("dimension must be a positive integer")
    n = int(n)
    a = 0
    while n % 2 == 0:
        n //= 2
        a += 1
    d, c = divmod(a, 4)
    return 8 * d + 2 ** c - 1


# ---------------------------------------------------------------------------
# Generator tables via Cayley-Dickson doubling
# ---------------------------------------------------------------------------

def _cayley_dickson_table(dim: int) -> dict:
    """Structure constants of the dim-dimensional Cayley-Dickson algebra.

    Returns {(i, j): (k, sign)} meaning e_i e_j = sign * e_k.  Valid (and
    used) only up to dim = 8, where the algebra is still a composition
    algebra and left multiplications are signed permutations.
    """
    if dim == 1:
        return {(0, 0): (0, 1)}
    half = dim // 2
    sub = _cayley_dickson_table(half)
    conj = lambda i: 1 if i == 0 else -1
    tab = {}
    for i in range(dim):
        a, b = i % half, i // half
        for j in range(dim):
            c, d = j % half, j // half
            # (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))
            if b == 0 and d == 0:
                k, s = sub[(a, c)]
                tab[(i, j)] = (k, s)
            elif b == 0 and d == 1:
                k, s = sub[(c, a)]
                tab[(i, j)] = (k + half, s)
            elif b == 1 and d == 0:
                k, s = sub[(a, c)]
                tab[(i, j)] = (k + half, s * conj(c))
            else:
                k, s = sub[(c, a)]
                tab[(i, j)] = (k, -s * conj(c))
    return tab


def _left_multiplications(dim: int) -> list:
    tab = _cayley_dickson_table(dim)
    mats = []
    for l in range(1, dim):
        M = np.zeros((dim, dim))
        for j in range(dim):
            k, s = tab[(l, j)]
            M[k, j] = s
        mats.append(M)
    return mats


def _double(gens: list) -> list:
    """From r structures on R^n produce r+1 structures on R^2n."""
    n = gens[0].shape[0]
    Z = np.zeros((n, n))
    out = [np.block([[Z, J], [J, Z]]) for J in gens]
    I = np.eye(n)
    out.append(np.block([[Z, -I], [I, Z]]))
    return out


def _minimal_generators(r: int) -> list:
    if r <= 1:
        return _left_multiplications(2)[:1]
    if r <= 3:
        return _left_multiplications(4)[:r]
    if r <= 7:
        return _left_multiplications(8)[:r]
    if r == 8:
        return _double(_left_multiplications(8))
    # period-8 recursion: Cl_{r} from Cl_{r-8} tensor Cl_8 on R^16
    big = _minimal_generators(8)
    omega = np.eye(16)
    for J in big:
        omega = omega @ J           # omega^2 = I, anticommutes with each J
    small = _minimal_generators(r - 8)
    m = small[0].shape[0]
    gens = [np.kron(J, np.eye(m)) for J in big]
    gens += [np.kron(omega, B) for B in small]
    return gens


def build_clifford_module(r: int, dim: int = None) -> CliffordModule:
    """Construct a Clifford module of rank r and minimal dimension.

    Minimal dimensions for r = 1..8 are 2, 4, 4, 8, 8, 8, 8, 16.  If
    ``dim`` is given it must be a multiple of the minimal dimension; the
    module is padded by block-diagonal copies.
    """
    if r < 1:
        raise PencilError("rank must be >= 1")
    gens = _minimal_generators(r)
    n = gens[0].shape[0]
    if dim is not None:
        if dim % n != 0:
            raise PencilError(
                f"dimension {dim} is not a multiple of the minimal dimension {n} for rank {r}")
        copies = dim // n
        if copies > 1:
            gens = [np.kron(np.eye(copies), J) for J in gens]
            n = dim
    return CliffordModule(dim_v=n, rank=r, generators=tuple(gens))


# ---------------------------------------------------------------------------
# Verification and pairing
# ---------------------------------------------------------------------------

def verify_module(J_list, metric: InnerProduct = None) -> VerifyReport:
    """Check orthogonality, J^2 = -I, and pairwise anti-commutation.

    Each flag holds iff the corresponding identity is satisfied to 1e-10
    entrywise; max_violation is the largest residual over all checks.
    """
    mats = [np.asarray(J, dtype=float) for J in J_list]
    if not mats:
        raise PencilError("empty generator list")
    n = mats[0].shape[0]
    for J in mats:
        if J.shape != (n, n):
            raise PencilError("generators must be square matrices of equal size")
    if metric is None:
        metric = InnerProduct.standard(n)
    if metric.dim != n:
        raise PencilError("metric dimension mismatch")
    G = metric.gram
    I = np.eye(n)

    v_orth = max(np.abs(J.T @ G @ J - G).max() for J in mats)
    v_sq = max(np.abs(J @ J + I).max() for J in mats)
    v_ac = 0.0
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            v_ac = max(v_ac, np.abs(mats[a] @ mats[b] + mats[b] @ mats[a]).max())
    return VerifyReport(
        orthogonal=bool(v_orth <= CHECK_TOL),
        square_minus_id=bool(v_sq <= CHECK_TOL),
        anticommute=bool(v_ac <= CHECK_TOL),
        max_violation=float(max(v_orth, v_sq, v_ac)),
    )


def pencil_pairing(omega: SkewForm, eta: SkewForm, metric: InnerProduct) -> float:
    """Trace pairing -tr(A_omega A_eta) of two forms w.r.t. the metric."""
    if omega.dim != eta.dim or omega.dim != metric.dim:
        raise PencilError("dimension mismatch in pairing")
    return float(-np.trace(omega.operator(metric) @ eta.operator(metric)))


def _scalar_square(A: np.ndarray, tol: float = CHECK_TOL):
    """If A^2 = -lambda I within tol, return lambda, else None."""
    n = A.shape[0]
    sq = A @ A
    lam = -np.trace(sq) / n
    if np.abs(sq + lam * np.eye(n)).max() <= tol * max(1.0, abs(lam)):
        return float(lam)
    return None


def is_compatible(pencil: Pencil):
    """Test A_omega^2 = -lambda I on basis forms and all pairwise sums.

    By polarization this finite certificate covers the whole pencil.
    Returns (flag, witnesses) where witnesses maps a label to the fitted
    lambda (None when the square is not scalar).
    """
    ops = [w.operator(pencil.metric) for w in pencil.forms]
    witnesses = {}
    ok = True
    for i, A in enumerate(ops):
        lam = _scalar_square(A)
        witnesses[f"w{i + 1}"] = lam
        ok = ok and lam is not None and lam >= 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            lam = _scalar_square(ops[i] + ops[j])
            witnesses[f"w{i + 1}+w{j + 1}"] = lam
            ok = ok and lam is not None and lam >= 0.0
    return ok, witnesses


def cliffordize(pencil: Pencil) -> CliffordModule:
    """Orthonormalize a compatible pencil into a Clifford module.

    Gram-Schmidt runs in the trace pairing; the normalization uses the
    dimension-scaled pairing -tr(A B)/n so that each output generator
    squares to -I exactly (a unit form in the raw trace pairing would
    square to -I/n instead).  The result is verified with verify_module.
    """
    ok, _ = is_compatible(pencil)
    if not ok:
        raise PencilError("pencil is not compatible with the metric")
    n = pencil.dim
    ops = [w.operator(pencil.metric) for w in pencil.forms]

    gram = np.empty((len(ops), len(ops)))
    for i, A in enumerate(ops):
        for j, B in enumerate(ops):
            gram[i, j] = -np.trace(A @ B) / n
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e12:
        raise PencilError(f"pairing Gram matrix is numerically singular (cond={cond:.3e})")

    pair = lambda A, B: -np.trace(A @ B) / n
    ortho = []
    for A in ops:
        U = A.copy()
        for B in ortho:
            U -= pair(U, B) * B
        nrm = pair(U, U)
        if nrm <= 1e-24:
            raise PencilError("Gram-Schmidt collapsed: forms are linearly dependent")
        ortho.append(U / np.sqrt(nrm))

    module = CliffordModule(dim_v=n, rank=len(ortho),
                            generators=tuple(ortho), metric=pencil.metric)
    report = verify_module(module.generators, module.metric)
    if not report.ok:
        raise PencilError(
            f"cliffordization failed verification (violation {report.max_violation:.3e})")
    return module


def symbol_invertible(module: CliffordModule, lam):
    """Invertibility of sum_l lam_l J_l, with its smallest singular value.

    For a Clifford module the symbol squares to -|lam|^2 I, so the minimal
    singular value is |lam| exactly; the SVD check covers generic input.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.shape != (module.rank,):
        raise PencilError("lambda length must equal module rank")
    if np.linalg.norm(lam) == 0.0:
        return False, 0.0
    sigma = module.symbol(lam)
    smin = float(np.linalg.svd(sigma, compute_uv=False)[-1])
    return bool(smin > 0.0), smin


def pencil_from_module(module: CliffordModule) -> Pencil:
    """The pencil spanned by omega_l(X,Y) = <J_l X, Y> of a module."""
    G = module.metric.gram
    forms = tuple(SkewForm(G @ J) for J in module.generators)
    return Pencil(forms=forms, metric=module.metric)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def module_to_json(module: CliffordModule) -> str:
    doc = {
        "dim_v": module.dim_v,
        "rank": module.rank,
        "generators": [np.asarray(J).tolist() for J in module.generators],
        "metric": module.metric.gram.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def module_from_json(text: str) -> CliffordModule:
    doc = json.loads(text)
    return CliffordModule(
        dim_v=int(doc["dim_v"]),
        rank=int(doc["rank"]),
        generators=tuple(np.array(J, dtype=float) for J in doc["generators"]),
        metric=InnerProduct(np.array(doc["metric"], dtype=float)),
    )
