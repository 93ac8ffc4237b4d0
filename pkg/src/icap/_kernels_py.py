"""Pure-Python (numpy) implementations of the hot kernels.

Mirrors the compiled ``icap._kernels`` module call for call; ``icap.matlib``
picks whichever is importable.
"""

import math

import numpy as np

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

BACKEND = "python"


def _rotated_extreme(X, theta):
    H = 0.5 * (np.exp(1j * theta) * X + np.exp(-1j * theta) * X.conj().T)
    w = np.linalg.eigvalsh(H)
    return max(w[-1], -w[0])


def radius_scan(X, grid, tol, n_refine):
    """Numerical radius of square ``X`` by angle sweep plus golden-section polish.

    Returns ``(value, theta, bracket)`` where ``bracket`` is the width of the
    final golden-section interval around the maximizing angle.
    """
    X = np.asarray(X, dtype=np.complex128)
    n = X.shape[0]
    thetas = np.pi * np.arange(grid) / grid
    rot = np.exp(1j * thetas)[:, None, None]
    stack = 0.5 * (rot * X[None] + rot.conj() * X.conj().T[None])
    w = np.linalg.eigvalsh(stack)
    f = np.maximum(w[:, n - 1], -w[:, 0])

    # local maxima of the periodic sweep, best first
    peaks = np.flatnonzero((f >= np.roll(f, 1)) & (f >= np.roll(f, -1)))
    if peaks.size == 0:
        peaks = np.array([int(np.argmax(f))])
    peaks = peaks[np.argsort(-f[peaks])][:n_refine]

    half = np.pi / grid
    best, best_theta, best_width = float(f[peaks[0]]), float(thetas[peaks[0]]), 2 * half
    for k in peaks:
        a, b = thetas[k] - half, thetas[k] + half
        c = b - _INV_PHI * (b - a)
        d = a + _INV_PHI * (b - a)
        fc, fd = _rotated_extreme(X, c), _rotated_extreme(X, d)
        while b - a > tol:
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - _INV_PHI * (b - a)
                fc = _rotated_extreme(X, c)
            else:
                a, c, fc = c, d, fd
                d = a + _INV_PHI * (b - a)
                fd = _rotated_extreme(X, d)
        for val, th in ((fc, c), (fd, d), (f[k], thetas[k])):
            if val > best:
                best, best_theta, best_width = float(val), float(th), float(b - a)
    return best, best_theta % np.pi, best_width


def _riccati_residual(A1, A2, S1, S2):
    r1 = S1 - (np.eye(S1.shape[0]) - A2 @ np.linalg.solve(S2, A2.conj().T))
    r2 = S2 - (np.eye(S2.shape[0]) - A1 @ np.linalg.solve(S1, A1.conj().T))
    return max(np.linalg.norm(r1), np.linalg.norm(r2))


def riccati_fixed_point(A1, A2, max_iter, tol):
    """Alternating fixed point for the coupled pair

        S1 = I - A2 S2^{-1} A2^H,   S2 = I - A1 S1^{-1} A1^H

    started from identities. Returns ``(S1, S2, iterations, residual, status)``
    with status 0 converged, 1 iteration cap, 2 lost positive definiteness.
    """
    A1 = np.asarray(A1, dtype=np.complex128)
    A2 = np.asarray(A2, dtype=np.complex128)
    n1, n2 = A2.shape[0], A1.shape[0]
    I1, I2 = np.eye(n1), np.eye(n2)
    S1, S2 = I1.astype(np.complex128), I2.astype(np.complex128)
    prev = np.inf
    rises = 0
    damp = False
    residual = np.inf
    for it in range(1, max_iter + 1):
        try:
            L2 = np.linalg.cholesky(S2)
        except np.linalg.LinAlgError:
            return S1, S2, it, residual, 2
        Y = np.linalg.solve(L2, A2.conj().T)
        new1 = I1 - Y.conj().T @ Y
        new1 = 0.5 * (new1 + new1.conj().T)
        if damp:
            new1 = 0.5 * (new1 + S1)
        try:
            L1 = np.linalg.cholesky(new1)
        except np.linalg.LinAlgError:
            return new1, S2, it, residual, 2
        Y = np.linalg.solve(L1, A1.conj().T)
        new2 = I2 - Y.conj().T @ Y
        new2 = 0.5 * (new2 + new2.conj().T)
        if damp:
            new2 = 0.5 * (new2 + S2)
        step = max(np.linalg.norm(new1 - S1), np.linalg.norm(new2 - S2))
        S1, S2 = new1, new2
        if step > prev:
            rises += 1
            if rises >= 2:
                damp = True
        prev = step
        if step <= tol:
            try:
                residual = _riccati_residual(A1, A2, S1, S2)
            except np.linalg.LinAlgError:
                return S1, S2, it, np.inf, 2
            if residual <= tol:
                return S1, S2, it, residual, 0
    try:
        residual = _riccati_residual(A1, A2, S1, S2)
    except np.linalg.LinAlgError:
        return S1, S2, max_iter, np.inf, 2
    return S1, S2, max_iter, residual, 1
