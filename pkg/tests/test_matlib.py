import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from icap import matlib
from icap.errors import NotHermitian, NotPositiveDefinite, NotPSD, NotSquare, ShapeMismatch
from icap.matlib import DEFAULT_TOL, ToleranceConfig

from .strategies import cmatrix, hpd, psd, square


def test_tolerance_defaults_and_overrides():
    t = DEFAULT_TOL.with_overrides(eq_tol=1e-6, eig_floor=None)
    assert t.eq_tol == 1e-6 and t.eig_floor == DEFAULT_TOL.eig_floor
    with pytest.raises(ValueError):
        ToleranceConfig(eq_tol=-1.0)
    with pytest.raises(ValueError):
        ToleranceConfig(radius_grid=3)


def test_as_cmatrix_rejects_bad_input():
    assert matlib.as_cmatrix([1.0, 2.0, 3.0]).shape == (1, 3)
    with pytest.raises(ShapeMismatch):
        matlib.as_cmatrix(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        matlib.as_cmatrix([[np.nan]])
    assert matlib.as_cmatrix([[1, 2]]).dtype == np.complex128


def test_logdet_known_values():
    assert matlib.logdet_hpd(np.diag([1.0, np.e, np.e**2])) == pytest.approx(3.0, abs=1e-14)
    with pytest.raises(NotPositiveDefinite):
        matlib.logdet_hpd(np.diag([1.0, 0.0]))
    with pytest.raises(NotHermitian):
        matlib.logdet_hpd([[1.0, 1.0], [0.0, 1.0]])
    with pytest.raises(NotSquare):
        matlib.logdet_hpd(np.ones((2, 3)))


@given(hpd())
def test_logdet_matches_slogdet(M):
    sign, ld = np.linalg.slogdet(M)
    assert sign.real > 0
    assert matlib.logdet_hpd(M) == pytest.approx(ld, rel=1e-10, abs=1e-10)


@given(psd(), st.floats(0.0, 2.0))
def test_loewner_order_of_shifts(S, c):
    n = S.shape[0]
    assert matlib.loewner_leq(S, S + c * np.eye(n))
    assert matlib.loewner_margin(S, S + c * np.eye(n)) == pytest.approx(c, abs=1e-9 * (1 + np.linalg.norm(S)))
    if c > 1e-3:
        assert not matlib.loewner_leq(S + c * np.eye(n), S)


def test_loewner_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        matlib.loewner_leq(np.eye(2), np.eye(3))


def test_numerical_radius_closed_forms():
    assert matlib.numerical_radius([[0.0, 1.0], [0.0, 0.0]]) == pytest.approx(0.5, abs=1e-12)
    assert matlib.numerical_radius(np.diag([1.0, -3.0, 2j])) == pytest.approx(3.0, abs=1e-12)
    # a 2x2 Jordan block J(lam) has radius |lam| + 1/2
    assert matlib.numerical_radius([[0.3j, 1.0], [0.0, 0.3j]]) == pytest.approx(0.8, abs=1e-12)


@given(square())
def test_numerical_radius_bounds(X):
    r = matlib.numerical_radius(X)
    rho = np.abs(np.linalg.eigvals(X)).max()
    s = matlib.sigma_max(X)
    assert rho - 1e-9 <= r <= s + 1e-9
    assert r >= s / 2 - 1e-9


@given(square(), st.floats(-3.0, 3.0))
def test_numerical_radius_unitary_invariance_and_scaling(X, theta):
    Q, _ = np.linalg.qr(X + 2 * np.eye(X.shape[0]))
    r = matlib.numerical_radius(X)
    assert matlib.numerical_radius(Q.conj().T @ X @ Q) == pytest.approx(r, rel=1e-9, abs=1e-12)
    assert matlib.numerical_radius(np.exp(1j * theta) * 2.5 * X) == pytest.approx(2.5 * r, rel=1e-9, abs=1e-12)


@given(hpd())
def test_numerical_radius_of_hermitian_is_spectral_norm(M):
    assert matlib.numerical_radius(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-10)


@given(cmatrix())
def test_pinv_penrose_conditions(X):
    P = matlib.pinv(X)
    assert np.allclose(X @ P @ X, X, atol=1e-9)
    assert np.allclose(P @ X @ P, P, atol=1e-9)
    assert np.allclose((X @ P).conj().T, X @ P, atol=1e-9)
    assert np.allclose((P @ X).conj().T, P @ X, atol=1e-9)


@given(cmatrix())
def test_rank_and_left_invertibility(X):
    m, n = X.shape
    assert matlib.rank(X) == min(m, n)
    assert matlib.is_left_invertible(X) == (m >= n)


@given(psd())
def test_null_and_range_bases_split_space(S):
    N, R = matlib.null_basis(S), matlib.range_basis(S)
    n = S.shape[0]
    assert N.shape[1] + R.shape[1] == n
    assert np.allclose(S @ N, 0, atol=1e-8)
    Q = np.hstack([N, R])
    assert np.allclose(Q.conj().T @ Q, np.eye(n), atol=1e-10)


def test_null_basis_rejects_indefinite():
    with pytest.raises(NotPSD):
        matlib.null_basis(np.diag([1.0, -1.0]))


@given(hpd())
def test_square_roots(M):
    R = matlib.sqrtm_hpd(M)
    assert np.allclose(R @ R, M, atol=1e-9 * (1 + np.linalg.norm(M)))
    Ri = matlib.inv_sqrtm_hpd(M)
    assert np.allclose(Ri @ M @ Ri, np.eye(M.shape[0]), atol=1e-8)


@given(psd())
def test_sqrtm_psd(S):
    R = matlib.sqrtm_psd(S)
    assert np.allclose(R @ R, S, atol=1e-8 * (1 + np.linalg.norm(S)))
    assert np.allclose(R, R.conj().T)


@given(cmatrix())
def test_is_contraction_matches_sigma(X):
    s = matlib.sigma_max(X)
    assert matlib.is_contraction(X / s * 0.99)
    assert not matlib.is_contraction(X / s * 1.01)


def test_solve_hpd():
    M = np.array([[2.0, 0.5], [0.5, 1.0]])
    b = np.array([[1.0], [2.0]])
    assert np.allclose(M @ matlib.solve_hpd(M, b), b)


def test_backend_name():
    assert matlib.BACKEND in ("cython", "python")


def test_kernels_agree_across_backends(rng):
    from icap import _kernels_py
    try:
        from icap import _kernels
    except ImportError:
        pytest.skip("compiled extension not built")
    from .conftest import cgauss
    for _ in range(5):
        X = np.ascontiguousarray(cgauss(rng, 4, 4))
        vc = _kernels.radius_scan(X, 720, 1e-11, 4)[0]
        vp = _kernels_py.radius_scan(X, 720, 1e-11, 4)[0]
        assert vc == pytest.approx(vp, rel=1e-12)
        A1 = 0.3 * cgauss(rng, 3, 2)
        A2 = 0.3 * cgauss(rng, 2, 3)
        out_c = _kernels.riccati_fixed_point(A1, A2, 20000, 1e-12)
        out_p = _kernels_py.riccati_fixed_point(A1, A2, 20000, 1e-12)
        assert out_c[4] == out_p[4]
        assert np.allclose(out_c[0], out_p[0], atol=1e-9)
        assert np.allclose(out_c[1], out_p[1], atol=1e-9)
