import numpy as np
import pytest

from conftest import rand_field

from cliffpencil.clifford import PencilError, build_clifford_module
from cliffpencil.fields import (FourierField, Frame, apply_dirac,
                                field_from_json, field_to_json, half_modes,
                                l2_inner, l2_norm, lie_derivative,
                                mode_operator, mode_spectrum, regularity_gap,
                                su2_counterexample_residual)
from cliffpencil.quaternion import Quaternion, UNIT_SAMPLES, _residual_at

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# Frame
# ---------------------------------------------------------------------------

def test_frame_rejects_singular_matrix():
    with pytest.raises(PencilError):
        Frame(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_frame_covector():
    fr = Frame(np.array([[2.0, 0.0], [1.0, 1.0]]))
    assert np.allclose(fr.covector([1, 1]), fr.matrix.T @ np.array([1.0, 1.0]))


# ---------------------------------------------------------------------------
# Lie derivative
# ---------------------------------------------------------------------------

def test_lie_derivative_kills_constants():
    f = FourierField(2, 2, 3)
    f.set_mode((0, 0), np.array([1.0, -2.0]))
    out = lie_derivative(f, [1.3, -0.4])
    assert np.abs(out.coeffs).max() == 0.0


def test_lie_derivative_cosine():
    # f(t) = cos(2 pi t) e_1  ->  -2 pi sin(2 pi t) e_1
    f = FourierField(1, 2, 4)
    f.set_mode((1,), np.array([0.5, 0.0]))
    out = lie_derivative(f, [1.0])
    expected = FourierField(1, 2, 4)
    # -2 pi sin(2 pi t) has mode-1 coefficient -2 pi * (-i/2) = i pi
    expected.set_mode((1,), np.array([1j * np.pi, 0.0]))
    assert np.abs(out.coeffs - expected.coeffs).max() < 1e-14


def test_lie_derivative_mode_factor():
    # r=2, v=(1,1), mode k=(2,-1): factor 2 pi i <k,v> = 2 pi i
    f = FourierField(2, 2, 3)
    c = np.array([1.0 + 0.5j, -2.0j])
    f.set_mode((2, -1), c)
    out = lie_derivative(f, [1.0, 1.0])
    assert np.abs(out.get_mode((2, -1)) - 2j * np.pi * c).max() < 1e-14


# ---------------------------------------------------------------------------
# Dirac operator
# ---------------------------------------------------------------------------

def test_dirac_kills_constants():
    mod = build_clifford_module(2)
    fr = Frame(np.eye(2))
    f = FourierField(2, 4, 2)
    f.set_mode((0, 0), np.arange(4.0))
    assert np.abs(apply_dirac(f, fr, mod).coeffs).max() == 0.0


def test_dirac_eigenfield():
    # r=1, J the quarter rotation, f = (cos, sin) is an eigenfield: -2 pi f
    mod = build_clifford_module(1)
    fr = Frame(np.array([[1.0]]))
    f = FourierField(1, 2, 3)
    f.set_mode((1,), np.array([0.5, -0.5j]))
    out = apply_dirac(f, fr, mod)
    assert np.abs(out.coeffs - (-TWO_PI) * f.coeffs).max() < 1e-13


def test_dirac_on_single_component():
    # f = (cos 2 pi t, 0) -> (0, -2 pi sin 2 pi t)
    mod = build_clifford_module(1)
    fr = Frame(np.array([[1.0]]))
    f = FourierField(1, 2, 3)
    f.set_mode((1,), np.array([0.5, 0.0]))
    out = apply_dirac(f, fr, mod)
    expected = FourierField(1, 2, 3)
    expected.set_mode((1,), np.array([0.0, 1j * np.pi]))
    assert np.abs(out.coeffs - expected.coeffs).max() < 1e-13


def test_dirac_rank_mismatch():
    mod = build_clifford_module(2)
    fr = Frame(np.eye(3))
    f = FourierField(3, 4, 1)
    with pytest.raises(PencilError):
        apply_dirac(f, Frame(np.eye(2)), build_clifford_module(3))
    with pytest.raises(PencilError):
        apply_dirac(FourierField(2, 2, 1), Frame(np.eye(2)), mod)


def test_reality_preserved_by_operators():
    rng = np.random.default_rng(0)
    mod = build_clifford_module(3)
    fr = Frame(np.array([[1.0, 0.2, 0.0], [0.0, 1.0, 0.0], [0.1, 0.0, 1.0]]))
    for _ in range(5):
        f = rand_field(3, 4, 2, rng)
        assert apply_dirac(f, fr, mod).reality_defect() <= 1e-12
        assert lie_derivative(f, [0.3, -1.0, 2.0]).reality_defect() <= 1e-12


def test_scalar_dirac_is_time_derivative():
    fr = Frame(np.array([[1.0]]))
    f = FourierField(1, 1, 3)
    f.set_mode((1,), np.array([0.5]))        # cos(2 pi t)
    out = apply_dirac(f, fr, None)
    assert np.abs(out.get_mode((1,)) - np.array([1j * np.pi])).max() < 1e-14


# ---------------------------------------------------------------------------
# Mode operators and spectrum
# ---------------------------------------------------------------------------

def test_mode_operator_hermitian_square():
    # D_k is Hermitian with D_k^2 = (2 pi |A^T k|)^2 I on a Clifford module
    rng = np.random.default_rng(1)
    mod = build_clifford_module(3)
    for _ in range(25):
        A = rng.uniform(-2, 2, (3, 3))
        if abs(np.linalg.det(A)) < 1e-3:
            continue
        fr = Frame(A)
        k = rng.integers(-6, 7, size=3)
        if not np.any(k):
            continue
        D = mode_operator(k, fr, mod)
        mu = TWO_PI * np.linalg.norm(fr.covector(k))
        assert np.abs(D - D.conj().T).max() <= 1e-10 * max(1.0, mu)
        assert np.abs(D @ D - mu ** 2 * np.eye(4)).max() <= 1e-10 * mu ** 2


def test_mode_spectrum_zero_mode():
    mod = build_clifford_module(3)
    assert mode_spectrum((0, 0, 0), Frame(np.eye(3)), mod) == [(0.0, 4)]


def test_mode_spectrum_identity_frame():
    mod = build_clifford_module(3)
    sp = mode_spectrum((1, 0, 0), Frame(np.eye(3)), mod)
    assert len(sp) == 2
    (lo, mlo), (hi, mhi) = sp
    assert lo == pytest.approx(-TWO_PI) and hi == pytest.approx(TWO_PI)
    assert mlo == mhi == 2


def test_mode_spectrum_scaled_frame():
    mod = build_clifford_module(3)
    sp = mode_spectrum((1, 1, 0), Frame(np.diag([2.0, 1.0, 1.0])), mod)
    mu = TWO_PI * np.sqrt(5.0)
    assert sp[0][0] == pytest.approx(-mu) and sp[1][0] == pytest.approx(mu)


# ---------------------------------------------------------------------------
# L2 structure
# ---------------------------------------------------------------------------

def test_l2_unit_mode_pair():
    # a single mode pair scaled to unit norm: sqrt(2) cos(2 pi t) e_1
    f = FourierField(1, 2, 2)
    f.set_mode((1,), np.array([np.sqrt(2.0) / 2.0, 0.0]))
    assert l2_inner(f, f) == pytest.approx(1.0)


def test_l2_orthogonal_modes():
    f = FourierField(1, 2, 2)
    f.set_mode((1,), np.array([1.0, 0.0]))
    g = FourierField(1, 2, 2)
    g.set_mode((2,), np.array([1.0, 0.0]))
    assert l2_inner(f, g) == pytest.approx(0.0, abs=1e-15)


def test_self_adjointness_random_pairs():
    rng = np.random.default_rng(2)
    mod = build_clifford_module(2)
    fr = Frame(np.array([[1.0, 0.3], [0.0, 0.7]]))
    for _ in range(30):
        f = rand_field(2, 4, 2, rng)
        g = rand_field(2, 4, 2, rng)
        defect = abs(l2_inner(apply_dirac(f, fr, mod), g)
                     - l2_inner(f, apply_dirac(g, fr, mod)))
        assert defect <= 1e-10 * l2_norm(f) * l2_norm(g)


def test_kernel_is_exactly_the_constants():
    # assemble the full truncated operator and count its numerical kernel
    mod = build_clifford_module(2)
    fr = Frame(np.array([[1.0, 0.5], [0.0, 1.0]]))
    K, dv = 2, 4
    f = FourierField(2, dv, K)
    modes = [(a, b) for a in range(-K, K + 1) for b in range(-K, K + 1)]
    cols = []
    for k in modes:
        for comp in range(dv):
            f.coeffs[:] = 0.0
            idx = tuple(c % (2 * K + 1) for c in k)
            f.coeffs[idx + (comp,)] = 1.0
            cols.append(apply_dirac(f, fr, mod).coeffs.ravel())
    M = np.stack(cols, axis=1)
    sv = np.linalg.svd(M, compute_uv=False)
    assert int(np.sum(sv < 1e-10 * sv.max())) == dv


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------

def test_regularity_gap_identity_frame():
    mod = build_clifford_module(3)
    report = regularity_gap(Frame(np.eye(3)), mod, search_box=4)
    assert report["regular"]
    assert report["gap"] == pytest.approx(TWO_PI)
    assert report["certified_lower_bound"] == pytest.approx(TWO_PI)


def test_regularity_gap_scaled_frame():
    mod = build_clifford_module(3)
    report = regularity_gap(Frame(np.diag([0.5, 1.0, 1.0])), mod, search_box=4)
    assert report["gap"] == pytest.approx(np.pi)
    assert report["certified_lower_bound"] == pytest.approx(np.pi)


def test_gap_certified_bound_is_lower_bound():
    rng = np.random.default_rng(4)
    mod = build_clifford_module(2)
    for _ in range(20):
        A = rng.uniform(-2, 2, (2, 2))
        try:
            fr = Frame(A)
        except PencilError:
            continue
        rep = regularity_gap(fr, mod, search_box=6)
        assert rep["gap"] >= rep["certified_lower_bound"] - 1e-12


# ---------------------------------------------------------------------------
# SU(2) pointwise kernel identity
# ---------------------------------------------------------------------------

def test_su2_balanced_weights_exact_zero():
    assert su2_counterexample_residual((2, -1, -1)) == 0.0


def test_su2_uniform_weights():
    # at q = 1 the residual is i*i + j*j + k*k = -3, norm 3; the norm is the
    # same at every unit quaternion
    res = _residual_at(Quaternion(1), (1, 1, 1))
    assert res == Quaternion(-3)
    assert su2_counterexample_residual((1, 1, 1)) == 3.0


def test_su2_zero_weights():
    assert su2_counterexample_residual((0, 0, 0)) == 0.0


def test_su2_balance_characterizes_kernel():
    # the identity vanishes exactly when the weights sum to zero
    assert su2_counterexample_residual((1, -1, 0)) == 0.0
    assert su2_counterexample_residual((1, 0, 0)) > 0.0
    assert all(q.norm_sq() == 1 for q in UNIT_SAMPLES)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_field_json_roundtrip():
    rng = np.random.default_rng(5)
    f = rand_field(2, 3, 2, rng)
    back = field_from_json(field_to_json(f))
    assert np.abs(back.coeffs - f.coeffs).max() == 0.0


def test_half_lattice_is_half():
    modes = half_modes(2, 2)
    assert len(modes) == ((2 * 2 + 1) ** 2 - 1) // 2
    for k in modes:
        assert tuple(-c for c in k) not in modes
