# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: numerical-radius angle sweep and the coupled Riccati
fixed point. Same signatures and return conventions as ``icap._kernels_py``."""

import numpy as np

from libc.math cimport cos, sin, sqrt, fabs, M_PI
from scipy.linalg.cython_lapack cimport zheev, zpotrf, ztrtrs
from scipy.linalg.cython_blas cimport zherk

BACKEND = "cython"

cdef double INV_PHI = (sqrt(5.0) - 1.0) / 2.0


cdef class _RotEig:
    """Workspace for lambda-extremes of (e^{it} X + e^{-it} X^H) / 2."""
    cdef double complex[:, ::1] X
    cdef double complex[::1, :] H
    cdef double[::1] w
    cdef double complex[::1] work
    cdef double[::1] rwork
    cdef int n, lwork

    def __init__(self, X):
        self.X = np.ascontiguousarray(X, dtype=np.complex128)
        self.n = self.X.shape[0]
        self.H = np.zeros((self.n, self.n), dtype=np.complex128, order="F")
        self.w = np.zeros(self.n)
        self.lwork = max(1, 2 * self.n) * 32
        self.work = np.zeros(self.lwork, dtype=np.complex128)
        self.rwork = np.zeros(max(1, 3 * self.n - 2))

    cdef double extreme(self, double theta) nogil:
        cdef int i, j, info = 0
        cdef int n = self.n
        cdef double complex z = cos(theta) + 1j * sin(theta)
        cdef double complex zc = cos(theta) - 1j * sin(theta)
        cdef char jobz = b'N'
        cdef char uplo = b'U'
        for j in range(n):
            for i in range(j + 1):
                self.H[i, j] = 0.5 * (z * self.X[i, j] + zc * self.X[j, i].conjugate())
        zheev(&jobz, &uplo, &n, &self.H[0, 0], &n, &self.w[0], &self.work[0],
              &self.lwork, &self.rwork[0], &info)
        if self.w[n - 1] > -self.w[0]:
            return self.w[n - 1]
        return -self.w[0]


def radius_scan(X, int grid, double tol, int n_refine):
    cdef _RotEig ev = _RotEig(X)
    cdef double[::1] f = np.empty(grid)
    cdef double half = M_PI / grid
    cdef int k
    with nogil:
        for k in range(grid):
            f[k] = ev.extreme(M_PI * k / grid)

    fa = np.asarray(f)
    peaks = np.flatnonzero((fa >= np.roll(fa, 1)) & (fa >= np.roll(fa, -1)))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(fa))])
    peaks = peaks[np.argsort(-fa[peaks])][:n_refine]

    cdef double a, b, c, d, fc, fd, t0
    cdef double best = fa[peaks[0]]
    cdef double best_theta = M_PI * peaks[0] / grid
    cdef double best_width = 2 * half
    for kk in peaks:
        k = kk
        t0 = M_PI * k / grid
        a = t0 - half
        b = t0 + half
        with nogil:
            c = b - INV_PHI * (b - a)
            d = a + INV_PHI * (b - a)
            fc = ev.extreme(c)
            fd = ev.extreme(d)
            while b - a > tol:
                if fc >= fd:
                    b = d
                    d = c
                    fd = fc
                    c = b - INV_PHI * (b - a)
                    fc = ev.extreme(c)
                else:
                    a = c
                    c = d
                    fc = fd
                    d = a + INV_PHI * (b - a)
                    fd = ev.extreme(d)
        if fc > best:
            best, best_theta, best_width = fc, c, b - a
        if fd > best:
            best, best_theta, best_width = fd, d, b - a
    return float(best), float(best_theta % M_PI), float(best_width)


cdef int _schur_update(double complex[::1, :] S, double complex[::1, :] At,
                       double complex[::1, :] L, double complex[::1, :] Y,
                       double complex[::1, :] out) nogil:
    """out = I - A S^{-1} A^H with At = A^H (m x n), S (m x m). Returns LAPACK info."""
    cdef int m = S.shape[0]
    cdef int n = At.shape[1]
    cdef int i, j, info = 0
    cdef char lo = b'L'
    cdef char up = b'U'
    cdef char notr = b'N'
    cdef char ctr = b'C'
    cdef char nondiag = b'N'
    cdef double alpha = -1.0
    cdef double beta = 1.0
    for j in range(m):
        for i in range(m):
            L[i, j] = S[i, j]
    zpotrf(&lo, &m, &L[0, 0], &m, &info)
    if info != 0:
        return info
    for j in range(n):
        for i in range(m):
            Y[i, j] = At[i, j]
    ztrtrs(&lo, &notr, &nondiag, &m, &n, &L[0, 0], &m, &Y[0, 0], &m, &info)
    if info != 0:
        return info
    for j in range(n):
        for i in range(n):
            out[i, j] = 1.0 if i == j else 0.0
    zherk(&up, &ctr, &n, &m, &alpha, &Y[0, 0], &m, &beta, &out[0, 0], &n)
    for j in range(n):
        for i in range(j + 1, n):
            out[i, j] = out[j, i].conjugate()
    return 0


cdef double _fro_diff(double complex[::1, :] P, double complex[::1, :] Q) nogil:
    cdef int i, j
    cdef double s = 0.0
    cdef double complex z
    for j in range(P.shape[1]):
        for i in range(P.shape[0]):
            z = P[i, j] - Q[i, j]
            s += z.real * z.real + z.imag * z.imag
    return sqrt(s)


def riccati_fixed_point(A1, A2, int max_iter, double tol):
    A1 = np.asarray(A1, dtype=np.complex128)
    A2 = np.asarray(A2, dtype=np.complex128)
    cdef int n1 = A2.shape[0]
    cdef int n2 = A1.shape[0]
    cdef double complex[::1, :] A1t = np.asfortranarray(A1.conj().T)
    cdef double complex[::1, :] A2t = np.asfortranarray(A2.conj().T)
    cdef double complex[::1, :] S1 = np.asfortranarray(np.eye(n1, dtype=np.complex128))
    cdef double complex[::1, :] S2 = np.asfortranarray(np.eye(n2, dtype=np.complex128))
    cdef double complex[::1, :] N1 = np.zeros((n1, n1), dtype=np.complex128, order="F")
    cdef double complex[::1, :] N2 = np.zeros((n2, n2), dtype=np.complex128, order="F")
    cdef double complex[::1, :] L1 = np.zeros((n1, n1), dtype=np.complex128, order="F")
    cdef double complex[::1, :] L2 = np.zeros((n2, n2), dtype=np.complex128, order="F")
    cdef double complex[::1, :] Y1 = np.zeros((n1, n2), dtype=np.complex128, order="F")
    cdef double complex[::1, :] Y2 = np.zeros((n2, n1), dtype=np.complex128, order="F")
    cdef double complex[::1, :] C1 = np.zeros((n1, n1), dtype=np.complex128, order="F")
    cdef double complex[::1, :] C2 = np.zeros((n2, n2), dtype=np.complex128, order="F")
    cdef int it, i, j, info, rises = 0, status = 1
    cdef bint damp = False
    cdef double prev = 1e300, step, residual = 1e300, r1, r2

    with nogil:
        for it in range(1, max_iter + 1):
            # S1 <- I - A2 S2^{-1} A2^H
            info = _schur_update(S2, A2t, L2, Y2, N1)
            if info != 0:
                status = 2
                break
            if damp:
                for j in range(n1):
                    for i in range(n1):
                        N1[i, j] = 0.5 * (N1[i, j] + S1[i, j])
            # S2 <- I - A1 S1^{-1} A1^H using the fresh S1
            info = _schur_update(N1, A1t, L1, Y1, N2)
            if info != 0:
                for j in range(n1):
                    for i in range(n1):
                        S1[i, j] = N1[i, j]
                status = 2
                break
            if damp:
                for j in range(n2):
                    for i in range(n2):
                        N2[i, j] = 0.5 * (N2[i, j] + S2[i, j])
            step = _fro_diff(N1, S1)
            r2 = _fro_diff(N2, S2)
            if r2 > step:
                step = r2
            for j in range(n1):
                for i in range(n1):
                    S1[i, j] = N1[i, j]
            for j in range(n2):
                for i in range(n2):
                    S2[i, j] = N2[i, j]
            if step > prev:
                rises += 1
                if rises >= 2:
                    damp = True
            prev = step
            if step <= tol:
                # undamped substitution residual
                info = _schur_update(S2, A2t, L2, Y2, C1)
                if info == 0:
                    info = _schur_update(S1, A1t, L1, Y1, C2)
                if info != 0:
                    status = 2
                    break
                r1 = _fro_diff(C1, S1)
                r2 = _fro_diff(C2, S2)
                residual = r1 if r1 > r2 else r2
                if residual <= tol:
                    status = 0
                    break
        else:
            it = max_iter

    if status == 1:
        info = _schur_update(S2, A2t, L2, Y2, C1)
        if info == 0:
            info = _schur_update(S1, A1t, L1, Y1, C2)
        if info == 0:
            residual = max(_fro_diff(C1, S1), _fro_diff(C2, S2))
        else:
            status = 2
    return np.asarray(S1).copy(), np.asarray(S2).copy(), it, float(residual), status
