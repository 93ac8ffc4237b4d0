"""Closed-form rate expressions: log-det rates, regions, sum capacities, waterfilling.

All rates are in nats. Inverses inside rate formulas are avoided by writing
``log|I + Q N^{-1}| = log|N + Q| - log|N|``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import matlib
from .channel import ChannelInstance, is_zic, matrix_to_json
from .errors import ConstraintViolation, DimensionError, NotZIC, ShapeMismatch, SingularBarrier
from .matlib import DEFAULT_TOL, ToleranceConfig
from . import regimes

LOG2 = math.log(2.0)


# ------------------------------------------------------------ basic rates

def _check_pair(H, S):
    H = matlib.as_cmatrix(H, "H")
    S = matlib.as_cmatrix(S, "S")
    if S.shape[0] != S.shape[1] or H.shape[1] != S.shape[0]:
        raise ShapeMismatch(f"H {H.shape} and S {S.shape} are inconsistent")
    return H, S


def _gram(H, S):
    Q = H @ S @ H.conj().T
    return 0.5 * (Q + Q.conj().T)


def single_user_rate(H, S, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``log|I + H S H^H|``."""
    H, S = _check_pair(H, S)
    return matlib.logdet_hpd(np.eye(H.shape[0]) + _gram(H, S), tol)


def tin_rate(Hd, Sd, Hi, Si, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Rate with interference treated as noise, ``log|I + Hd Sd Hd^H (I + Hi Si Hi^H)^{-1}|``."""
    Hd, Sd = _check_pair(Hd, Sd)
    Hi, Si = _check_pair(Hi, Si)
    if Hd.shape[0] != Hi.shape[0]:
        raise ShapeMismatch(f"direct {Hd.shape} and interfering {Hi.shape} links reach different receivers")
    N = np.eye(Hd.shape[0]) + _gram(Hi, Si)
    return matlib.logdet_hpd(N + _gram(Hd, Sd), tol) - matlib.logdet_hpd(N, tol)


def mac_sum_rate(Ha, Sa, Hb, Sb, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``log|I + Ha Sa Ha^H + Hb Sb Hb^H|``, the joint-decoding sum bound at one receiver."""
    Ha, Sa = _check_pair(Ha, Sa)
    Hb, Sb = _check_pair(Hb, Sb)
    return matlib.logdet_hpd(np.eye(Ha.shape[0]) + _gram(Ha, Sa) + _gram(Hb, Sb), tol)


def tin_sum_rate(inst: ChannelInstance, S1=None, S2=None, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Sum of both TIN rates, at the instance covariances unless others are given."""
    S1 = inst.S1 if S1 is None else S1
    S2 = inst.S2 if S2 is None else S2
    return tin_rate(inst.H1, S1, inst.H2, S2, tol) + tin_rate(inst.H4, S2, inst.H3, S1, tol)


# ----------------------------------------------------------------- regions

@dataclass(frozen=True)
class Bound:
    coeffs: tuple[int, int]
    limit: float
    label: str = ""


@dataclass(frozen=True)
class RateRegion:
    """Polytope ``{R >= 0 : c . R <= limit}`` with its extreme points (counterclockwise from the origin).

    ``proven`` is False when the regime condition behind the formula failed;
    the region is then a formula value, not the capacity region.
    """

    bounds: tuple[Bound, ...]
    vertices: tuple[tuple[float, float], ...]
    proven: bool = True
    formula: str = ""
    components: dict = field(default_factory=dict)

    def contains(self, r1: float, r2: float, slack: float = 1e-9) -> bool:
        if r1 < -slack or r2 < -slack:
            return False
        return all(b.coeffs[0] * r1 + b.coeffs[1] * r2 <= b.limit + slack for b in self.bounds)

    def scaled(self, factor: float) -> "RateRegion":
        return RateRegion(
            tuple(Bound(b.coeffs, b.limit * factor, b.label) for b in self.bounds),
            tuple((a * factor, c * factor) for a, c in self.vertices),
            self.proven,
            self.formula,
            {k: v * factor for k, v in self.components.items()},
        )

    def to_mapping(self) -> dict:
        return {
            "formula": self.formula,
            "proven": self.proven,
            "bounds": [{"coeffs": list(b.coeffs), "limit": b.limit, "label": b.label} for b in self.bounds],
            "vertices": [list(v) for v in self.vertices],
            "components": dict(self.components),
        }


def region_from_limits(r1max: float, r2max: float, sum_max: float | None = None, **kw) -> RateRegion:
    """Region cut out by ``R1 <= a``, ``R2 <= b`` and optionally ``R1 + R2 <= c``.

    Vertices follow the five-point pentagon pattern, collapsing when
    ``c >= a + b`` (rectangle) or ``c <= min(a, b)``.
    """
    a, b = max(float(r1max), 0.0), max(float(r2max), 0.0)
    bounds = [Bound((1, 0), a, "R1"), Bound((0, 1), b, "R2")]
    c = a + b
    if sum_max is not None:
        c = max(float(sum_max), 0.0)
        bounds.append(Bound((1, 1), c, "R1+R2"))
    pts = [
        (0.0, 0.0),
        (min(a, c), 0.0),
        (a, min(b, c - a)) if c > a else None,
        (min(a, c - b), b) if c > b else None,
        (0.0, min(b, c)),
    ]
    verts: list[tuple[float, float]] = []
    for p in pts:
        if p is not None and (not verts or max(abs(p[0] - verts[-1][0]), abs(p[1] - verts[-1][1])) > 1e-15):
            verts.append(p)
    if len(verts) > 1 and verts[-1] == verts[0]:
        verts.pop()
    return RateRegion(tuple(bounds), tuple(verts), **kw)


def very_strong_region(
    inst: ChannelInstance, verdict: regimes.Verdict | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> RateRegion:
    """Interference-free rectangle of the very strong regime."""
    if verdict is None:
        verdict = regimes.check_very_strong(inst, tol)
    r1 = single_user_rate(inst.H1, inst.S1, tol)
    r2 = single_user_rate(inst.H4, inst.S2, tol)
    return region_from_limits(
        r1, r2, None, proven=verdict.satisfied, formula="VeryStrongRectangle",
        components={"R1max": r1, "R2max": r2},
    )


def aligned_strong_region(
    inst: ChannelInstance, verdict: regimes.Verdict | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> RateRegion:
    """Compound multiple-access pentagon of the aligned strong regime.

    Two-sided channels take the smaller of the two receivers' sum bounds; a
    one-sided channel keeps only the bound of the receiver that sees interference.
    """
    if verdict is None:
        verdict = regimes.check_aligned_strong(inst, tol=tol)
    r1 = single_user_rate(inst.H1, inst.S1, tol)
    r2 = single_user_rate(inst.H4, inst.S2, tol)
    comps = {"R1max": r1, "R2max": r2}
    zic = is_zic(inst)
    if zic != 2:
        comps["sum_rx1"] = mac_sum_rate(inst.H1, inst.S1, inst.H2, inst.S2, tol)
    if zic != 3:
        comps["sum_rx2"] = mac_sum_rate(inst.H3, inst.S1, inst.H4, inst.S2, tol)
    c = min(v for k, v in comps.items() if k.startswith("sum"))
    return region_from_limits(
        r1, r2, c, proven=verdict.satisfied,
        formula="AlignedStrongZPentagon" if zic else "AlignedStrongPentagon", components=comps,
    )


# ------------------------------------------------------------ sum capacity

class Formula(str, enum.Enum):
    ZIC_NOISY_SUM = "ZicNoisySum"
    NOISY_TWO_SIDED_SUM = "NoisyTwoSidedSum"
    MIXED_SUM = "MixedSum"
    SINGLE_USER = "SingleUser"


@dataclass(frozen=True)
class CapacityResult:
    """A closed-form sum rate; ``value`` is the sum of ``components``.

    ``branches`` holds the candidate totals of a min-formula, ``proven`` is
    False when the regime condition failed.
    """

    value: float
    formula: Formula
    components: dict
    proven: bool
    branches: dict = field(default_factory=dict)
    note: str = ""

    def to_mapping(self, units: str = "nats") -> dict:
        f = 1.0 if units == "nats" else 1.0 / LOG2
        out = {
            f"value_{units}": self.value * f,
            "formula": self.formula.value,
            "components": {k: v * f for k, v in self.components.items()},
            "proven": self.proven,
        }
        if self.branches:
            out["branches"] = {k: v * f for k, v in self.branches.items()}
        if not self.proven:
            out["tag"] = "formula value, not proven capacity"
        if self.note:
            out["note"] = self.note
        return out


def _result(formula, comps, proven, **kw):
    return CapacityResult(float(sum(comps.values())), formula, comps, bool(proven), **kw)


def noisy_sum_capacity(
    inst: ChannelInstance, verdict: regimes.Verdict | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> CapacityResult:
    """Sum capacity under noisy interference: the sum of the two TIN rates.

    For a one-sided channel the clean receiver's term is interference free.
    Without a verdict the matching regime check is run.
    """
    zic = is_zic(inst)
    if zic == 3:
        if verdict is None:
            verdict = regimes.check_noisy_zic(inst, tol=tol)
        comps = {
            "tin_user1": tin_rate(inst.H1, inst.S1, inst.H2, inst.S2, tol),
            "user2": single_user_rate(inst.H4, inst.S2, tol),
        }
        return _result(Formula.ZIC_NOISY_SUM, comps, verdict.satisfied)
    if zic == 2:
        if verdict is None:
            verdict = regimes.check_noisy_zic(inst.swap_users(), tol=tol)
        comps = {
            "user1": single_user_rate(inst.H1, inst.S1, tol),
            "tin_user2": tin_rate(inst.H4, inst.S2, inst.H3, inst.S1, tol),
        }
        return _result(Formula.ZIC_NOISY_SUM, comps, verdict.satisfied, note="users swapped (H2 = 0)")
    if verdict is None:
        verdict = regimes.check_noisy_two_sided(inst, tol=tol)
    comps = {
        "tin_user1": tin_rate(inst.H1, inst.S1, inst.H2, inst.S2, tol),
        "tin_user2": tin_rate(inst.H4, inst.S2, inst.H3, inst.S1, tol),
    }
    return _result(Formula.NOISY_TWO_SIDED_SUM, comps, verdict.satisfied)


def mixed_sum_capacity(
    inst: ChannelInstance, verdict: regimes.Verdict | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> CapacityResult:
    """Sum capacity under mixed aligned interference.

    With receiver 2 strong and receiver 1 weak this is
    ``min{log|I + H3 S1 H3^H + H4 S2 H4^H|, tin(H1, S1, H2, S2) + log|I + H4 S2 H4^H|}``;
    the mirrored orientation swaps the users. ``components`` are the terms of
    the active branch.
    """
    if verdict is None:
        verdict = regimes.check_mixed(inst, tol=tol)
    if regimes.mixed_orientation(verdict) == 1:
        mac = {"mac_rx2": mac_sum_rate(inst.H3, inst.S1, inst.H4, inst.S2, tol)}
        tin = {
            "tin_user1": tin_rate(inst.H1, inst.S1, inst.H2, inst.S2, tol),
            "user2": single_user_rate(inst.H4, inst.S2, tol),
        }
    else:
        mac = {"mac_rx1": mac_sum_rate(inst.H1, inst.S1, inst.H2, inst.S2, tol)}
        tin = {
            "user1": single_user_rate(inst.H1, inst.S1, tol),
            "tin_user2": tin_rate(inst.H4, inst.S2, inst.H3, inst.S1, tol),
        }
    branches = {"mac": sum(mac.values()), "tin_plus_clean": sum(tin.values())}
    comps = mac if branches["mac"] <= branches["tin_plus_clean"] else tin
    active = "mac" if comps is mac else "tin_plus_clean"
    return _result(Formula.MIXED_SUM, comps, verdict.satisfied, branches=branches,
                   note=f"{verdict.note}; active branch {active}" if verdict.note else f"active branch {active}")


def single_user_sum(inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> CapacityResult:
    """Interference-free sum, an upper bound on every sum rate."""
    comps = {"user1": single_user_rate(inst.H1, inst.S1, tol), "user2": single_user_rate(inst.H4, inst.S2, tol)}
    return _result(Formula.SINGLE_USER, comps, proven=not np.any(inst.H2) and not np.any(inst.H3))


# ------------------------------------------------------------- waterfilling

class WaterfillSolution(NamedTuple):
    covariance: np.ndarray
    level: float
    powers: np.ndarray
    gains: np.ndarray
    modes: np.ndarray


def waterfill_solution(H, P: float, tol: ToleranceConfig = DEFAULT_TOL) -> WaterfillSolution:
    """Trace-``P`` covariance maximizing ``log|I + H S H^H|`` with the water level and mode powers.

    The level ``mu`` solves ``sum max(mu - 1/g_i, 0) = P`` over the nonzero
    eigenmode gains ``g_i = sigma_i^2``; it is found exactly by scanning the
    sorted breakpoints.
    """
    H = matlib.as_cmatrix(H, "H")
    if P < 0 or not np.isfinite(P):
        raise ConstraintViolation(f"power must be finite and nonnegative, got {P}")
    t = H.shape[1]
    _, s, Vh = np.linalg.svd(H)
    keep = s > tol.rank_tol * (s[0] if s.size else 0.0)
    g = s[keep] ** 2
    V = Vh.conj().T[:, : g.size]
    if P == 0 or g.size == 0:
        return WaterfillSolution(np.zeros((t, t), complex), 0.0, np.zeros(g.size), g, V)
    inv = 1.0 / g  # ascending, since s is descending
    mu = inv[0] + P
    for k in range(1, g.size + 1):
        mu = (P + inv[:k].sum()) / k
        if k == g.size or mu <= inv[k]:
            break
    p = np.maximum(mu - inv, 0.0)
    S = (V * p) @ V.conj().T
    return WaterfillSolution(0.5 * (S + S.conj().T), float(mu), p, g, V)


def waterfill(H, P: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Single-user waterfilling covariance for total power ``P``."""
    return waterfill_solution(H, P, tol).covariance


class ParallelTIN(NamedTuple):
    S1: np.ndarray
    S2: np.ndarray
    value: float
    iterations: int
    converged: bool


def _priced_waterfill(g, n, price, P):
    """Maximize ``sum log(1 + g s / n) - price . s`` over ``s >= 0``, ``sum s <= P``."""
    if P <= 0:
        return np.zeros_like(g)

    def alloc(lam):
        with np.errstate(divide="ignore"):
            return np.maximum(1.0 / (lam + price) - n / g, 0.0)

    if np.all(price > 0) and alloc(0.0).sum() <= P:
        return alloc(0.0)
    hi = float(np.max(g / n))
    lo = hi
    while alloc(lo).sum() <= P:
        lo *= 0.5
    lam = brentq(lambda x: alloc(x).sum() - P, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
    return alloc(lam)


def _diag_gains(H, name):
    H = np.asarray(H)
    if H.shape[0] != H.shape[1] or np.any(H - np.diag(np.diag(H))):
        raise DimensionError(f"{name} must be square diagonal for a parallel channel")
    return np.abs(np.diag(H)) ** 2


def parallel_tin_waterfill(
    inst: ChannelInstance, P1: float, P2: float, max_iter: int = 20000, tol: float = 1e-13
) -> ParallelTIN:
    """Stationary TIN power split for a parallel (all-diagonal) channel.

    Alternates, user by user, a waterfill against noise plus interference in
    which each user pays the marginal rate loss it causes the other user,
    ``pi_i = a_3 a_4 s_2 / (n_2 (n_2 + a_4 s_2))`` per subchannel for user 1
    and symmetrically for user 2. Fixed points are the KKT points of the
    TIN sum rate under the two power budgets, which under noisy interference
    are the optimum.
    """
    a1, a2 = _diag_gains(inst.H1, "H1"), _diag_gains(inst.H2, "H2")
    a3, a4 = _diag_gains(inst.H3, "H3"), _diag_gains(inst.H4, "H4")
    m = a1.size
    if not (a2.size == a3.size == a4.size == m):
        raise DimensionError("parallel channel matrices must share one size")
    s1, s2 = np.full(m, P1 / m), np.full(m, P2 / m)
    converged, it = False, 0
    for it in range(1, max_iter + 1):
        n1, n2 = 1 + a2 * s2, 1 + a3 * s1
        new1 = _priced_waterfill(a1, n1, a3 * a4 * s2 / (n2 * (n2 + a4 * s2)), P1)
        n2 = 1 + a3 * new1
        new2 = _priced_waterfill(a4, n2, a2 * a1 * new1 / (n1 * (n1 + a1 * new1)), P2)
        step = max(np.abs(new1 - s1).max(), np.abs(new2 - s2).max())
        s1, s2 = new1, new2
        if step <= tol:
            converged = True
            break
    value = float(np.sum(np.log1p(a1 * s1 / (1 + a2 * s2))) + np.sum(np.log1p(a4 * s2 / (1 + a3 * s1))))
    return ParallelTIN(np.diag(s1), np.diag(s2), value, it, converged)


# ------------------------------------------------- min-max sum-rate bound

def _hpd_logdet(M):
    c = np.linalg.cholesky(0.5 * (M + M.conj().T))
    return 2.0 * float(np.sum(np.log(np.abs(np.diag(c)))))


def _interval_ok(Sh, S, tol):
    lo = matlib.loewner_margin(np.zeros_like(S), Sh, tol)
    hi = matlib.loewner_margin(Sh, S, tol)
    floor = tol.eig_floor * (1.0 + np.linalg.norm(S, 2))
    return lo >= -floor and hi >= -floor


def _bound_terms(A, S1h, S2h, inst):
    H1, H2, H4 = inst.H1, inst.H2, inst.H4
    r1, r2 = H1.shape[0], H4.shape[0]
    D = np.eye(r1) + _gram(H2, S2h)
    C = H4 @ S2h @ H2.conj().T + A
    E = np.eye(r2) + _gram(H4, S2h)
    Sig = np.block([[D, C.conj().T], [C, E]])
    W = np.eye(r2) - A @ A.conj().T
    return D, Sig, W


def bound_objective(A, S1h, S2h, inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Min-max sum-rate bound objective for a one-sided channel (``H3 = 0``)

        log|H1 S1h H1^H + H2 S2h H2^H + I| - log|I - A A^H|
          + log|H4 S2h H4^H + I - (H4 S2h H2^H + A)(H2 S2h H2^H + I)^{-1}(H2 S2h H4^H + A^H)|

    with ``A`` of shape r2 x r1, ``sigma_max(A) < 1`` and ``0 <= S_ih <= S_i``.
    """
    A = matlib.as_cmatrix(A, "A")
    S1h, S2h = matlib.as_cmatrix(S1h, "S1h"), matlib.as_cmatrix(S2h, "S2h")
    r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
    if A.shape != (r2, r1):
        raise ShapeMismatch(f"A must be {r2}x{r1}, got {A.shape}")
    if S1h.shape != inst.S1.shape or S2h.shape != inst.S2.shape:
        raise ShapeMismatch("covariances do not match the instance")
    if matlib.sigma_max(A) >= 1.0:
        raise SingularBarrier(f"sigma_max(A) = {matlib.sigma_max(A):.6g} >= 1")
    for name, Sh, S in (("S1h", S1h, inst.S1), ("S2h", S2h, inst.S2)):
        if not _interval_ok(Sh, S, tol):
            raise ConstraintViolation(f"{name} is not between 0 and its constraint")
    D, Sig, W = _bound_terms(A, S1h, S2h, inst)
    first = matlib.logdet_hpd(np.eye(r1) + _gram(inst.H1, S1h) + _gram(inst.H2, S2h), tol)
    # the Schur complement of D in Sig is the third log-det's argument
    third = _hpd_logdet(Sig) - _hpd_logdet(D)
    return first - _hpd_logdet(W) + third


def _bound_value_grads(A, S1h, S2h, inst):
    """Objective and its gradients in ``S1h``, ``S2h`` and ``A`` (``d f = Re tr(G^H dX)``)."""
    H1, H2, H4 = inst.H1, inst.H2, inst.H4
    r1 = H1.shape[0]
    X = np.eye(r1) + _gram(H1, S1h) + _gram(H2, S2h)
    D, Sig, W = _bound_terms(A, S1h, S2h, inst)
    Xi, Di, Si, Wi = (np.linalg.inv(M) for M in (X, D, Sig, W))
    G = np.vstack([H2, H4])
    g1 = H1.conj().T @ Xi @ H1
    g2 = H2.conj().T @ Xi @ H2 + G.conj().T @ Si @ G - H2.conj().T @ Di @ H2
    gA = 2.0 * (Wi @ A + Si[r1:, :r1])
    val = _hpd_logdet(X) - _hpd_logdet(W) + _hpd_logdet(Sig) - _hpd_logdet(D)
    return val, 0.5 * (g1 + g1.conj().T), 0.5 * (g2 + g2.conj().T), gA


def _clip_unit(U):
    w, V = np.linalg.eigh(0.5 * (U + U.conj().T))
    return (V * np.clip(w, 0.0, 1.0)) @ V.conj().T


def _shrink(A, cap):
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return (U * np.minimum(s, cap)) @ Vh


class BoundEstimate(NamedTuple):
    value: float
    A: np.ndarray
    S1h: np.ndarray
    S2h: np.ndarray
    certified: bool
    seed: str


def _inner_max(A, U1, U2, R1, R2, inst, iters):
    """Projected gradient ascent over ``S_ih = R_i U_i R_i`` with ``0 <= U_i <= I``."""

    def at(U1, U2):
        v, g1, g2, _ = _bound_value_grads(A, R1 @ U1 @ R1, R2 @ U2 @ R2, inst)
        return v, R1 @ g1 @ R1, R2 @ g2 @ R2

    val, G1, G2 = at(U1, U2)
    for _ in range(iters):
        gn = math.sqrt(np.linalg.norm(G1) ** 2 + np.linalg.norm(G2) ** 2)
        if gn < 1e-14:
            break
        # curvature probe along the gradient sets the 1/L step
        eps = 1e-6 / gn
        _, P1, P2 = at(U1 + eps * G1, U2 + eps * G2)
        L = math.sqrt(np.linalg.norm(P1 - G1) ** 2 + np.linalg.norm(P2 - G2) ** 2) / (eps * gn)
        t = 1.0 / max(L, 1e-8)
        for _ in range(40):
            N1, N2 = _clip_unit(U1 + t * G1), _clip_unit(U2 + t * G2)
            nv, H1g, H2g = at(N1, N2)
            if nv >= val - 1e-15:
                break
            t *= 0.5
        else:
            break
        moved = math.sqrt(np.linalg.norm(N1 - U1) ** 2 + np.linalg.norm(N2 - U2) ** 2)
        U1, U2, gain = N1, N2, nv - val
        val, G1, G2 = nv, H1g, H2g
        if moved < 1e-12 or gain < 1e-15:
            break
    return val, U1, U2


def bound_minimax_heuristic(
    inst: ChannelInstance,
    budget: int = 60,
    inner_iters: int = 400,
    seed: int = 0x1C0FFEE,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> BoundEstimate:
    """Best-effort value of ``min_A max_{S1h, S2h}`` of :func:`bound_objective`.

    The inner maximization is concave and solved by projected gradient
    ascent; the outer minimization over ``A`` takes projected gradient steps
    (Danskin gradient at the inner maximizer, ``sigma_max(A) <= 1 - 1e-6``).
    Step sizes are ``1/L`` from finite-difference curvature probes with a
    backtracking safeguard. Seeds: ``A = 0``, half the noisy-interference
    witness when one exists, and a fixed-seed random matrix. The result is
    never certified; ``value`` is the objective re-evaluated at the returned point.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if np.any(inst.H3):
        if np.any(inst.H2):
            raise NotZIC("the bound needs a one-sided channel")
        inst = inst.swap_users()
    r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
    cap = 1.0 - 1e-6
    R1, R2 = matlib.sqrtm_psd(inst.S1, tol), matlib.sqrtm_psd(inst.S2, tol)
    seeds = [("zero", np.zeros((r2, r1), complex))]
    v = regimes.check_noisy_zic(inst, tol=tol)
    if v.satisfied:
        seeds.append(("half-witness", 0.5 * v.witness.A.conj().T))
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((r2, r1)) + 1j * rng.standard_normal((r2, r1))
    seeds.append(("random", 0.5 * Z / max(matlib.sigma_max(Z), 1e-300)))

    best = None
    for name, A in seeds:
        A = _shrink(A, cap)
        U1, U2 = np.eye(R1.shape[0], dtype=complex), np.eye(R2.shape[0], dtype=complex)
        val, U1, U2 = _inner_max(A, U1, U2, R1, R2, inst, inner_iters)
        for _ in range(budget):
            _, _, _, gA = _bound_value_grads(A, R1 @ U1 @ R1, R2 @ U2 @ R2, inst)
            gn = np.linalg.norm(gA)
            if gn < 1e-12:
                break
            eps = 1e-6 / gn
            _, _, _, gP = _bound_value_grads(_shrink(A - eps * gA, cap), R1 @ U1 @ R1, R2 @ U2 @ R2, inst)
            L = np.linalg.norm(gP - gA) / (eps * gn)
            t = 1.0 / max(L, 1e-8)
            for _ in range(30):
                An = _shrink(A - t * gA, cap)
                nv, N1, N2 = _inner_max(An, U1, U2, R1, R2, inst, inner_iters)
                if nv < val:
                    break
                t *= 0.5
            else:
                break
            step = np.linalg.norm(An - A)
            A, U1, U2, drop, val = An, N1, N2, val - nv, nv
            if step < 1e-10 or drop < 1e-13:
                break
        if best is None or val < best[0]:
            best = (val, A, U1, U2, name)
    _, A, U1, U2, name = best
    S1h, S2h = R1 @ U1 @ R1, R2 @ U2 @ R2
    S1h, S2h = 0.5 * (S1h + S1h.conj().T), 0.5 * (S2h + S2h.conj().T)
    value = bound_objective(A, S1h, S2h, inst, tol)
    return BoundEstimate(value, A, S1h, S2h, False, name)


def bound_estimate_mapping(est: BoundEstimate) -> dict:
    return {
        "value_nats": est.value,
        "certified": est.certified,
        "seed": est.seed,
        "A": matrix_to_json(est.A),
        "S1h": matrix_to_json(est.S1h),
        "S2h": matrix_to_json(est.S2h),
    }


__all__ = [
    "Bound",
    "BoundEstimate",
    "CapacityResult",
    "Formula",
    "LOG2",
    "ParallelTIN",
    "RateRegion",
    "WaterfillSolution",
    "aligned_strong_region",
    "bound_estimate_mapping",
    "bound_minimax_heuristic",
    "bound_objective",
    "mac_sum_rate",
    "mixed_sum_capacity",
    "noisy_sum_capacity",
    "parallel_tin_waterfill",
    "region_from_limits",
    "single_user_rate",
    "single_user_sum",
    "tin_rate",
    "tin_sum_rate",
    "very_strong_region",
    "waterfill",
    "waterfill_solution",
]
