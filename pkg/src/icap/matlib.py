"""Dense complex Hermitian linear algebra used throughout icap.

Every routine accepts anything ``numpy.asarray`` understands and works in
complex128. Tolerances come from a :class:`ToleranceConfig`; the module-level
``DEFAULT_TOL`` is used when none is given.

The two hot loops (numerical-radius sweep, coupled Riccati fixed point) live
in a compiled extension when it was built, else in ``_kernels_py``. Set
``ICAP_PURE_PYTHON=1`` to force the numpy fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, NotPSD, NotSquare, ShapeMismatch

if os.environ.get("ICAP_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _core
else:
    try:
        from . import _kernels as _core
    except ImportError:  # extension not built
        from . import _kernels_py as _core

BACKEND = _core.BACKEND

__all__ = [
    "BACKEND",
    "DEFAULT_TOL",
    "RadiusEstimate",
    "ToleranceConfig",
    "as_cmatrix",
    "hermitian_residual",
    "inv_sqrtm_hpd",
    "is_contraction",
    "is_hermitian",
    "is_left_invertible",
    "logdet_hpd",
    "loewner_leq",
    "loewner_margin",
    "null_basis",
    "numerical_radius",
    "numerical_radius_detail",
    "pinv",
    "range_basis",
    "sigma_max",
    "singular_values",
    "sqrtm_hpd",
    "sqrtm_psd",
]


_COUNT_FIELDS = ("radius_grid", "riccati_max_iter")


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical thresholds for every semidefinite and equality decision.

    Attributes
    ----------
    eig_floor : float
        Slack on eigenvalue nonnegativity, scaled by ``1 + ||A|| + ||B||``.
    eq_tol : float
        Relative Frobenius residual accepted as matrix equality.
    rank_tol : float
        Singular values below ``rank_tol * sigma_max`` count as zero.
    radius_grid : int
        Number of angle samples in the numerical-radius sweep.
    riccati_max_iter : int
        Iteration cap of the Riccati fixed point.
    riccati_tol : float
        Step and substitution-residual target of the Riccati fixed point.
    """

    eig_floor: float = 1e-9
    eq_tol: float = 1e-8
    rank_tol: float = 1e-10
    radius_grid: int = 720
    riccati_max_iter: int = 20000
    riccati_tol: float = 1e-11

    def __post_init__(self):
        for name in _COUNT_FIELDS:
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 8:
                raise ValueError(f"{name} must be an integer >= 8, got {v!r}")
        for f in fields(self):
            if f.name in _COUNT_FIELDS:
                continue
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be a positive real, got {v!r}")

    def with_overrides(self, **kw) -> "ToleranceConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_TOL = ToleranceConfig()

# golden-section stopping width on the angle, and peaks refined per sweep
_RADIUS_ANGLE_TOL = 1e-11
_RADIUS_PEAKS = 4


def as_cmatrix(X, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    M = np.asarray(X, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _square(M, name):
    M = as_cmatrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise NotSquare(f"{name} must be square, got {M.shape}")
    return M


def hermitian_residual(M) -> float:
    """``||M - M^H||_F / max(1, ||M||_F)``."""
    M = np.asarray(M)
    return float(np.linalg.norm(M - M.conj().T) / max(1.0, np.linalg.norm(M)))


def is_hermitian(M, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    M = as_cmatrix(M)
    return M.shape[0] == M.shape[1] and hermitian_residual(M) <= tol.eq_tol


def _hermitian(M, tol, name="matrix"):
    M = _square(M, name)
    if hermitian_residual(M) > tol.eq_tol:
        raise NotHermitian(f"{name} is not Hermitian (residual {hermitian_residual(M):.3g})")
    return 0.5 * (M + M.conj().T)


def logdet_hpd(M, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Natural log-determinant of a Hermitian positive definite matrix."""
    M = _hermitian(M, tol)
    w = np.linalg.eigvalsh(M)
    if w[0] <= tol.eig_floor * max(1.0, np.abs(w).max()):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g} is not positive")
    return float(np.sum(np.log(w)))


def loewner_margin(A, B, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``lambda_min(B - A)``; nonnegative exactly when ``A <= B`` in Loewner order."""
    A = _hermitian(A, tol, "A")
    B = _hermitian(B, tol, "B")
    if A.shape != B.shape:
        raise ShapeMismatch(f"Loewner comparison of {A.shape} and {B.shape}")
    if A.shape[0] == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(B - A)[0])


def loewner_slack(A, B, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Absolute-plus-relative floor applied to :func:`loewner_margin`."""
    nA = np.linalg.norm(A, 2) if np.size(A) else 0.0
    nB = np.linalg.norm(B, 2) if np.size(B) else 0.0
    return tol.eig_floor * (1.0 + nA + nB)


def loewner_leq(A, B, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """True iff ``B - A`` is positive semidefinite up to the eigenvalue floor."""
    return loewner_margin(A, B, tol) >= -loewner_slack(A, B, tol)


class RadiusEstimate(NamedTuple):
    value: float
    theta: float
    bracket: float


def numerical_radius_detail(X, tol: ToleranceConfig = DEFAULT_TOL) -> RadiusEstimate:
    """Numerical radius with the maximizing rotation angle and final bracket width.

    Uses ``r(X) = max_theta lambda_max((e^{i theta} X + e^{-i theta} X^H) / 2)``,
    sampled on ``tol.radius_grid`` angles in ``[0, pi)`` and polished around the
    best local maxima by golden-section search. The value is attained by some
    unit vector, so it never exceeds the true radius.
    """
    X = _square(X, "X")
    if X.shape[0] == 0:
        return RadiusEstimate(0.0, 0.0, 0.0)
    if not np.any(X):
        return RadiusEstimate(0.0, 0.0, 0.0)
    if X.shape[0] == 1:
        z = complex(X[0, 0])
        return RadiusEstimate(abs(z), float(-np.angle(z) % np.pi), 0.0)
    value, theta, width = _core.radius_scan(
        np.ascontiguousarray(X), int(tol.radius_grid), _RADIUS_ANGLE_TOL, _RADIUS_PEAKS
    )
    return RadiusEstimate(float(value), float(theta), float(width))


def numerical_radius(X, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``max |a^H X a|`` over unit vectors ``a``."""
    return numerical_radius_detail(X, tol).value


def singular_values(X) -> np.ndarray:
    X = as_cmatrix(X)
    if X.size == 0:
        return np.zeros(0)
    return np.linalg.svd(X, compute_uv=False)


def sigma_max(X) -> float:
    s = singular_values(X)
    return float(s[0]) if s.size else 0.0


def pinv(X, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse, cutting singular values below ``rank_tol * sigma_max``."""
    X = as_cmatrix(X)
    m, n = X.shape
    if X.size == 0:
        return np.zeros((n, m), dtype=np.complex128)
    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, m), dtype=np.complex128)
    keep = s > tol.rank_tol * s[0]
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def rank(X, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    s = singular_values(X)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol.rank_tol * s[0]))


def is_left_invertible(X, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Full column rank."""
    X = as_cmatrix(X)
    return X.shape[1] > 0 and rank(X, tol) == X.shape[1]


def _psd_eigh(S, tol, name):
    S = _hermitian(S, tol, name)
    w, V = np.linalg.eigh(S)
    scale = max(1.0, float(np.abs(w).max())) if w.size else 1.0
    if w.size and w[0] < -tol.eig_floor * scale:
        raise NotPSD(f"{name} has negative eigenvalue {w[0]:.3g}")
    return w, V


def _null_mask(w, tol):
    top = float(w.max()) if w.size else 0.0
    if top <= 0.0:
        return np.ones(w.shape, dtype=bool)
    return w <= tol.rank_tol * top


def null_basis(S, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a Hermitian PSD matrix."""
    w, V = _psd_eigh(S, tol, "S")
    return V[:, _null_mask(w, tol)]


def range_basis(S, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the range of a Hermitian PSD matrix (complement of :func:`null_basis`)."""
    w, V = _psd_eigh(S, tol, "S")
    return V[:, ~_null_mask(w, tol)]


def _pd_eigh(M, tol):
    M = _hermitian(M, tol, "M")
    w, V = np.linalg.eigh(M)
    if w.size and w[0] <= tol.eig_floor * max(1.0, float(np.abs(w).max())):
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3g} is not positive")
    return w, V


def sqrtm_hpd(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Hermitian positive definite square root."""
    w, V = _pd_eigh(M, tol)
    R = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def sqrtm_psd(S, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues below the null cutoff are set to zero."""
    w, V = _psd_eigh(S, tol, "S")
    w = np.where(_null_mask(w, tol), 0.0, w)
    R = (V * np.sqrt(w)) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def inv_sqrtm_hpd(M, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``M^{-1/2}`` for Hermitian positive definite ``M``."""
    w, V = _pd_eigh(M, tol)
    R = (V / np.sqrt(w)) @ V.conj().T
    return 0.5 * (R + R.conj().T)


def is_contraction(A, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """``sigma_max(A) <= 1 + eig_floor``, i.e. both ``A^H A <= I`` and ``A A^H <= I``."""
    return sigma_max(A) <= 1.0 + tol.eig_floor


def solve_hpd(M, B) -> np.ndarray:
    """``M^{-1} B`` for Hermitian positive definite ``M`` via Cholesky."""
    import scipy.linalg

    c = scipy.linalg.cho_factor(M, lower=True)
    return scipy.linalg.cho_solve(c, B)


def riccati_fixed_point(A1, A2, tol: ToleranceConfig = DEFAULT_TOL):
    """Raw kernel call; see :func:`icap.regimes.riccati_solve` for the checked entry point."""
    A1 = as_cmatrix(A1, "A1")
    A2 = as_cmatrix(A2, "A2")
    return _core.riccati_fixed_point(A1, A2, int(tol.riccati_max_iter), float(tol.riccati_tol))
