"""Interference-regime tests and their certifying witnesses.

Each check returns a :class:`Verdict`. A satisfied verdict carries a witness
(:class:`ContractionWitness`, a pair of them, :class:`RiccatiCertificate`, or
the log-det terms of a very-strong test) that can be re-verified from scratch
with its ``reverify`` method.

Contraction factorizations ``G = A F + B`` with ``sigma_max(A) <= 1`` and
``B S = 0`` are decided exactly. Writing ``Q`` for an orthonormal basis of
``range(S)``, such a pair exists iff ``(GQ)^H GQ <= (FQ)^H FQ`` (Douglas'
factorization lemma), and then ``A = GQ pinv(FQ)``, ``B = G - A F`` is one.
With ``S`` nonsingular this forces ``B = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from . import matlib
from .channel import (
    ChannelInstance,
    NullOffsetSpace,
    is_zic,
    matrix_to_json,
    membership_B,
    null_offset_space,
    offset_residual,
    offset_space,
)
from .errors import BadOffset, NoConvergence, NotLeftInvertible, NotPositiveDefinite, NotZIC, ShapeMismatch
from .matlib import DEFAULT_TOL, ToleranceConfig


class Regime(str, enum.Enum):
    VERY_STRONG_Z = "VeryStrongZ"
    VERY_STRONG = "VeryStrong"
    ALIGNED_STRONG_Z = "AlignedStrongZ"
    ALIGNED_STRONG = "AlignedStrong"
    NOISY_Z = "NoisyZ"
    NOISY_TWO_SIDED = "NoisyTwoSided"
    MIXED_ALIGNED = "MixedAligned"


class Status(str, enum.Enum):
    SATISFIED = "satisfied"
    BOUNDARY = "satisfied-within-tolerance"
    NOT_SATISFIED = "not-satisfied"
    NOT_FOUND = "not-satisfied-via-constructive-search"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one regime test.

    ``margin`` is positive inside the regime; ``conclusive`` is False when a
    failure only means the constructive witness search came up empty.
    """

    regime: Regime
    status: Status
    margin: float
    witness: Any = None
    conclusive: bool = True
    note: str = ""

    @property
    def satisfied(self) -> bool:
        return self.status in (Status.SATISFIED, Status.BOUNDARY)

    def to_mapping(self) -> dict:
        out = {
            "status": self.status.value,
            "satisfied": self.satisfied,
            "margin": _num(self.margin),
            "conclusive": self.conclusive,
        }
        if self.note:
            out["note"] = self.note
        if self.witness is not None:
            out["witness"] = _witness_mapping(self.witness)
        return out


def _num(x):
    x = float(x)
    if np.isnan(x):
        return None
    if np.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _witness_mapping(w):
    if hasattr(w, "to_mapping"):
        return w.to_mapping()
    if isinstance(w, tuple):
        return [_witness_mapping(x) for x in w]
    if isinstance(w, Mapping):
        return {k: _witness_mapping(v) for k, v in w.items()}
    if isinstance(w, np.ndarray):
        return matrix_to_json(w)
    if isinstance(w, (float, int, np.floating)):
        return _num(w)
    return w


def _status(margin, slack, strict=False):
    if strict:
        return Status.SATISFIED if margin > slack else Status.NOT_SATISFIED
    if margin >= slack:
        return Status.SATISFIED
    if margin >= -slack:
        return Status.BOUNDARY
    return Status.NOT_SATISFIED


# --------------------------------------------------------------- very strong

def _ld(M, tol):
    return matlib.logdet_hpd(M, tol)


def very_strong_margins(inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Log-det terms of both very-strong conditions and their margins ``m1``, ``m2``."""
    r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
    Q1 = inst.H1 @ inst.S1 @ inst.H1.conj().T
    I2 = inst.H2 @ inst.S2 @ inst.H2.conj().T
    I3 = inst.H3 @ inst.S1 @ inst.H3.conj().T
    Q4 = inst.H4 @ inst.S2 @ inst.H4.conj().T
    e1, e2 = np.eye(r1), np.eye(r2)
    t = {
        "mac1": _ld(e1 + Q1 + I2, tol),
        "user1": _ld(e1 + Q1, tol),
        "mac2": _ld(e2 + I3 + Q4, tol),
        "user2": _ld(e2 + Q4, tol),
    }
    t["m1"] = t["mac1"] - t["user1"] - t["user2"]
    t["m2"] = t["mac2"] - t["user2"] - t["user1"]
    return t


def check_very_strong(inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> Verdict:
    """Very strong interference: each receiver can decode the interferer first.

    Two-sided channels need both margins nonnegative; when a cross link is
    identically zero only the remaining receiver's condition applies.
    """
    t = very_strong_margins(inst, tol)
    slack = tol.eig_floor * (1.0 + max(abs(t["mac1"]), abs(t["mac2"]), abs(t["user1"]), abs(t["user2"])))
    zic = is_zic(inst)
    if zic == 0:
        regime, margin = Regime.VERY_STRONG, min(t["m1"], t["m2"])
    elif zic == 3:
        regime, margin = Regime.VERY_STRONG_Z, t["m1"]
    else:
        regime, margin = Regime.VERY_STRONG_Z, t["m2"]
    return Verdict(regime, _status(margin, slack), margin, witness=t)


# ---------------------------------------------------------------- contraction

@dataclass(frozen=True, eq=False)
class ContractionWitness:
    """Certificate for ``target = A @ factor + B`` with ``A`` a contraction and ``B S = 0``.

    ``feasible`` is False when no such pair exists (or the supplied offset
    fails); ``reason`` then says which check failed. ``margin`` is the
    contraction slack ``1 - sigma_max(A)`` of the minimal-norm factor, which
    has the same sign as the Douglas test but stays informative when ``F`` is
    wide (``F^H F - G^H G`` then always has a kernel). ``loewner_margin`` is
    ``lambda_min`` of that difference.
    """

    target: np.ndarray
    factor: np.ndarray
    S: np.ndarray
    A: np.ndarray
    B: np.ndarray
    sigma_max_A: float
    offset_residual: float
    factor_residual: float
    margin: float
    loewner_margin: float
    slack: float
    feasible: bool
    rule: str
    reason: str = ""

    @classmethod
    def from_pair(cls, G, F, S, A, B, tol: ToleranceConfig = DEFAULT_TOL, rule: str = "given"):
        """Witness for an externally supplied pair, e.g. a printed one."""
        G, F, S, A, B = (matlib.as_cmatrix(x) for x in (G, F, S, A, B))
        sig = matlib.sigma_max(A)
        off, res = offset_residual(B, S), factor_residual(G, A, F, B)
        ok = sig <= 1.0 + tol.eig_floor and off <= tol.eq_tol and res <= tol.eq_tol
        return cls(G, F, S, A, B, sig, off, res, 1.0 - sig, float("nan"), tol.eig_floor, ok, rule)

    def reverify(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        """Recompute every witness property from the stored matrices."""
        sig = matlib.sigma_max(self.A)
        off = offset_residual(self.B, self.S)
        res = factor_residual(self.target, self.A, self.factor, self.B)
        return sig <= 1.0 + tol.eig_floor and off <= tol.eq_tol and res <= tol.eq_tol

    def to_mapping(self) -> dict:
        return {
            "feasible": self.feasible,
            "rule": self.rule,
            "A": matrix_to_json(self.A),
            "B": matrix_to_json(self.B),
            "sigma_max_A": _num(self.sigma_max_A),
            "offset_residual": _num(self.offset_residual),
            "factor_residual": _num(self.factor_residual),
            "margin": _num(self.margin),
            "loewner_margin": _num(self.loewner_margin),
            **({"reason": self.reason} if self.reason else {}),
        }


def factor_residual(G, A, F, B) -> float:
    """``||G - A F - B||_F / (1 + ||G||_F)``."""
    G = np.asarray(G)
    return float(np.linalg.norm(G - A @ F - B) / (1.0 + np.linalg.norm(G)))


def solve_contraction(
    G,
    F,
    space: NullOffsetSpace,
    B_override=None,
    tol: ToleranceConfig = DEFAULT_TOL,
    strict: bool = False,
) -> ContractionWitness:
    """Find ``A``, ``B`` with ``G = A F + B``, ``sigma_max(A) <= 1``, ``B`` in ``space``.

    Without an override the decision is exact (see module docstring). With
    ``B_override`` the test is ``(G-B)^H (G-B) <= F^H F`` and ``A = (G-B) pinv(F)``,
    re-checked against the affine equation since ``F`` may be rank deficient.
    ``strict`` demands ``sigma_max(A) < 1 - eig_floor``, i.e. a strict Loewner
    inequality on the directions the input can excite.
    """
    G = matlib.as_cmatrix(G, "G")
    F = matlib.as_cmatrix(F, "F")
    S = space.S
    if G.shape[1] != F.shape[1] or F.shape[1] != S.shape[0]:
        raise ShapeMismatch(f"G {G.shape}, F {F.shape} and S {S.shape} are inconsistent")

    if B_override is None:
        Q = space.range_basis
        GQ, FQ = G @ Q, F @ Q
        lhs, rhs = GQ.conj().T @ GQ, FQ.conj().T @ FQ
        margin = matlib.loewner_margin(lhs, rhs, tol) if Q.shape[1] else 0.0
        A = GQ @ matlib.pinv(FQ, tol) if Q.shape[1] else np.zeros((G.shape[0], F.shape[0]), complex)
        B = G - A @ F
        rule = "projected"
    else:
        B = matlib.as_cmatrix(B_override, "B")
        if B.shape != G.shape:
            raise ShapeMismatch(f"offset {B.shape} does not match target {G.shape}")
        if not membership_B(B, space, tol):
            raise BadOffset(f"offset fails B S = 0 (residual {offset_residual(B, S):.3g})")
        D = G - B
        lhs, rhs = D.conj().T @ D, F.conj().T @ F
        margin = matlib.loewner_margin(lhs, rhs, tol)
        A = D @ matlib.pinv(F, tol)
        rule = "override"

    sig = matlib.sigma_max(A)
    off = offset_residual(B, S)
    res = factor_residual(G, A, F, B)
    # the minimal-norm A is a contraction iff the Douglas test passes
    bad = max(res, off)
    cmargin = 1.0 - sig if bad <= tol.eq_tol else min(float(margin), -bad)
    reasons = []
    if strict and not cmargin > tol.eig_floor:
        reasons.append(f"strict contraction margin {cmargin:.3g} not positive")
    elif cmargin < -tol.eig_floor:
        reasons.append(f"Loewner margin {margin:.3g}, sigma_max(A) = {sig:.6g} > 1")
    if off > tol.eq_tol:
        reasons.append(f"offset residual {off:.3g}")
    if res > tol.eq_tol:
        reasons.append(f"factorization residual {res:.3g}")
    return ContractionWitness(
        G, F, S, A, B, sig, off, res, cmargin, float(margin), tol.eig_floor, not reasons, rule,
        "; ".join(reasons),
    )


def _contraction_verdict(regime, witnesses, strict_flags, exact, note=""):
    margins, stats = [], []
    for w, strict in zip(witnesses, strict_flags):
        margins.append(w.margin)
        if not w.feasible:
            stats.append(Status.NOT_SATISFIED)
        else:
            stats.append(_status(w.margin, w.slack, strict))
    margin = min(margins)
    if all(s == Status.SATISFIED for s in stats):
        status = Status.SATISFIED
    elif all(s in (Status.SATISFIED, Status.BOUNDARY) for s in stats):
        status = Status.BOUNDARY
    else:
        status = Status.NOT_SATISFIED if exact else Status.NOT_FOUND
        bad = "; ".join(w.reason for w in witnesses if w.reason)
        note = f"{note}; {bad}" if note and bad else (note or bad)
    witness = witnesses[0] if len(witnesses) == 1 else tuple(witnesses)
    return Verdict(regime, status, margin, witness, conclusive=exact, note=note)


def _offsets(offsets):
    offsets = dict(offsets or {})
    return offsets.get("B1"), offsets.get("B2")


def check_aligned_strong(
    inst: ChannelInstance, offsets: Mapping | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> Verdict:
    """Aligned strong interference: ``H1 = A1 H3 + B1`` and ``H4 = A2 H2 + B2``.

    A one-sided channel (``H3 = 0``) only needs the second factorization;
    with ``H2 = 0`` only the first.
    """
    B1, B2 = _offsets(offsets)
    sp1, sp2 = null_offset_space(inst, 1), null_offset_space(inst, 2)
    exact = B1 is None and B2 is None
    zic = is_zic(inst)
    if zic == 3:
        w = solve_contraction(inst.H4, inst.H2, sp2, B2, tol)
        return _contraction_verdict(Regime.ALIGNED_STRONG_Z, [w], [False], exact)
    if zic == 2:
        w = solve_contraction(inst.H1, inst.H3, sp1, B1, tol)
        return _contraction_verdict(Regime.ALIGNED_STRONG_Z, [w], [False], exact, "users swapped (H2 = 0)")
    w1 = solve_contraction(inst.H1, inst.H3, sp1, B1, tol)
    w2 = solve_contraction(inst.H4, inst.H2, sp2, B2, tol)
    return _contraction_verdict(Regime.ALIGNED_STRONG, [w1, w2], [False, False], exact)


def check_noisy_zic(
    inst: ChannelInstance, B2=None, tol: ToleranceConfig = DEFAULT_TOL
) -> Verdict:
    """Noisy interference of a one-sided channel: ``H2 = K H4 + B`` with ``K`` a contraction.

    The witness stores ``K`` as ``A``; the matrix called ``A`` in the
    sum-capacity bound is ``K^H``. Requires ``H3`` identically zero.
    """
    if np.any(inst.H3):
        raise NotZIC("H3 is not identically zero")
    w = solve_contraction(inst.H2, inst.H4, null_offset_space(inst, 2), B2, tol)
    return _contraction_verdict(Regime.NOISY_Z, [w], [False], B2 is None)


def check_mixed(
    inst: ChannelInstance, offsets: Mapping | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> Verdict:
    """Mixed aligned interference.

    Receiver 2 strong (``H1 = A1 H3 + B1``) and receiver 1 weak
    (``H2 = A2^H H4 + B2``, strict margin). If that orientation fails the
    mirrored one is tried; the verdict note records which one holds.
    """
    B1, B2 = _offsets(offsets)
    exact = B1 is None and B2 is None
    sp1, sp2 = null_offset_space(inst, 1), null_offset_space(inst, 2)
    strong = solve_contraction(inst.H1, inst.H3, sp1, B1, tol)
    weak = solve_contraction(inst.H2, inst.H4, sp2, B2, tol, strict=True)
    v = _contraction_verdict(Regime.MIXED_ALIGNED, [strong, weak], [False, True], exact,
                             "orientation 1: receiver 1 weak, receiver 2 strong")
    if v.satisfied or not exact:
        return v
    strong2 = solve_contraction(inst.H4, inst.H2, sp2, None, tol)
    weak2 = solve_contraction(inst.H3, inst.H1, sp1, None, tol, strict=True)
    v2 = _contraction_verdict(Regime.MIXED_ALIGNED, [strong2, weak2], [False, True], exact,
                              "orientation 2: receiver 2 weak, receiver 1 strong")
    return v2 if v2.satisfied else v


def mixed_orientation(v: Verdict) -> int:
    return 2 if v.note.startswith("orientation 2") else 1


# ------------------------------------------------------------ noisy two-sided

@dataclass(frozen=True, eq=False)
class NoisyFactors:
    """``A1``, ``A2`` solving the two affine noisy-interference equations, with their offsets."""

    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    rule: str


def _noisy_factor(G, Hd, N, space, B, rule, tol):
    """Solve ``G = K N^{-1} Hd + B`` for ``K``; returns ``(K, B)``.

    ``rule`` is ``"zero"`` (B = 0 unless given) or ``"projected"``.
    """
    F = np.linalg.solve(N, Hd)
    if B is not None:
        B = matlib.as_cmatrix(B, "B")
        if B.shape != G.shape:
            raise ShapeMismatch(f"offset {B.shape} does not match {G.shape}")
        if not membership_B(B, space, tol):
            raise BadOffset(f"offset fails B S = 0 (residual {offset_residual(B, space.S):.3g})")
    elif rule == "zero":
        B = np.zeros_like(G)
    if B is not None:
        if matlib.is_left_invertible(Hd, tol):
            # closed form K = (G - B)(Hd^H Hd)^{-1} Hd^H N
            K = np.linalg.solve(Hd.conj().T @ Hd, (G - B).conj().T).conj().T @ Hd.conj().T @ N
        else:
            K = (G - B) @ matlib.pinv(F, tol)
    else:
        Q = space.range_basis
        if Q.shape[1]:
            K = (G @ Q) @ matlib.pinv(F @ Q, tol)
        else:
            K = np.zeros((G.shape[0], F.shape[0]), complex)
        B = G - K @ F
    res = factor_residual(G, K, F, B)
    off = offset_residual(B, space.S)
    if res > tol.eq_tol or off > tol.eq_tol:
        raise NotLeftInvertible(
            f"no exact factorization (residual {res:.3g}, offset residual {off:.3g}); "
            "direct link is not left-invertible"
        )
    return K, B


def build_noisy_A(
    inst: ChannelInstance, B1=None, B2=None, tol: ToleranceConfig = DEFAULT_TOL, rule: str = "zero"
) -> NoisyFactors:
    """Matrices ``A1`` (r1 x r2) and ``A2`` (r2 x r1) with

        H3 = A1^H (I + H2 S2 H2^H)^{-1} H1 + B1,
        H2 = A2^H (I + H3 S1 H3^H)^{-1} H4 + B2.

    For left-invertible ``H1`` the first is
    ``A1 = (I + H2 S2 H2^H) H1 (H1^H H1)^{-1} (H3^H - B1^H)``, and likewise
    for ``A2``. Offsets default to zero (``rule="zero"``) or to the
    range-projected construction (``rule="projected"``); given offsets win.
    """
    r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
    N1 = np.eye(r1) + inst.H2 @ inst.S2 @ inst.H2.conj().T
    N2 = np.eye(r2) + inst.H3 @ inst.S1 @ inst.H3.conj().T
    sp1, sp2 = null_offset_space(inst, 1), null_offset_space(inst, 2)
    K1, B1 = _noisy_factor(inst.H3, inst.H1, N1, sp1, B1, rule, tol)
    K2, B2 = _noisy_factor(inst.H2, inst.H4, N2, sp2, B2, rule, tol)
    return NoisyFactors(K1.conj().T, K2.conj().T, B1, B2, rule)


@dataclass(frozen=True, eq=False)
class RiccatiTest:
    M1: np.ndarray
    M2: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    Phi1: np.ndarray | None
    Phi2: np.ndarray | None
    radius1: float
    radius2: float
    feasible: bool
    reason: str = ""


def riccati_feasible(A1, A2, tol: ToleranceConfig = DEFAULT_TOL) -> RiccatiTest:
    """Numerical-radius test ``radius(Phi_i) <= 1/2`` with

        Phi1 = M1^{-1/2} A1^H A2^H M1^{-1/2},  M1 = I - A1^H A1 - A2 A2^H
        Phi2 = M2^{-1/2} A2^H A1^H M2^{-1/2},  M2 = I - A1 A1^H - A2^H A2

    ``M1``, ``M2`` must be positive definite; otherwise the test fails at once.
    """
    A1 = matlib.as_cmatrix(A1, "A1")
    A2 = matlib.as_cmatrix(A2, "A2")
    if A2.shape != A1.shape[::-1]:
        raise ShapeMismatch(f"A1 {A1.shape} and A2 {A2.shape} are not transposed shapes")
    r1, r2 = A1.shape
    M1 = np.eye(r2) - A1.conj().T @ A1 - A2 @ A2.conj().T
    M2 = np.eye(r1) - A1 @ A1.conj().T - A2.conj().T @ A2
    M1, M2 = 0.5 * (M1 + M1.conj().T), 0.5 * (M2 + M2.conj().T)
    W1 = A1.conj().T @ A2.conj().T
    W2 = A2.conj().T @ A1.conj().T
    lam = min(np.linalg.eigvalsh(M1)[0], np.linalg.eigvalsh(M2)[0])
    if lam <= tol.eig_floor:
        return RiccatiTest(M1, M2, W1, W2, None, None, np.inf, np.inf, False,
                           f"M not positive definite (lambda_min {lam:.3g})")
    R1, R2 = matlib.inv_sqrtm_hpd(M1, tol), matlib.inv_sqrtm_hpd(M2, tol)
    Phi1, Phi2 = R1 @ W1 @ R1, R2 @ W2 @ R2
    rad1, rad2 = matlib.numerical_radius(Phi1, tol), matlib.numerical_radius(Phi2, tol)
    ok = max(rad1, rad2) <= 0.5 + tol.eig_floor
    return RiccatiTest(M1, M2, W1, W2, Phi1, Phi2, rad1, rad2, ok,
                       "" if ok else f"radius {max(rad1, rad2):.6g} > 1/2")


def riccati_checks(A1, A2, Sigma1, Sigma2, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
    """Substitution residuals, positivity and the ``A_i^H A_i <= Sigma_i`` margins of a candidate pair."""
    A1, A2 = np.asarray(A1), np.asarray(A2)
    out = {"residual": np.inf, "pd": False, "lower1": -np.inf, "lower2": -np.inf}
    try:
        l1 = np.linalg.eigvalsh(0.5 * (Sigma1 + Sigma1.conj().T))[0]
        l2 = np.linalg.eigvalsh(0.5 * (Sigma2 + Sigma2.conj().T))[0]
        out["pd"] = bool(l1 > 0 and l2 > 0)
        if not out["pd"]:
            return out
        E1 = Sigma1 - (np.eye(Sigma1.shape[0]) - A2 @ np.linalg.solve(Sigma2, A2.conj().T))
        E2 = Sigma2 - (np.eye(Sigma2.shape[0]) - A1 @ np.linalg.solve(Sigma1, A1.conj().T))
    except np.linalg.LinAlgError:
        return out
    out["residual"] = float(max(np.linalg.norm(E1), np.linalg.norm(E2)))
    out["lower1"] = float(np.linalg.eigvalsh(Sigma1 - A1.conj().T @ A1)[0])
    out["lower2"] = float(np.linalg.eigvalsh(Sigma2 - A2.conj().T @ A2)[0])
    return out


def riccati_solve(A1, A2, tol: ToleranceConfig = DEFAULT_TOL):
    """Positive definite ``(Sigma1, Sigma2)`` with

        Sigma1 = I - A2 Sigma2^{-1} A2^H,   Sigma2 = I - A1 Sigma1^{-1} A1^H,
        A1^H A1 <= Sigma1,  A2^H A2 <= Sigma2.

    Alternating fixed point from the identity, damped if the step grows twice.
    Raises :class:`NoConvergence` with the final residual otherwise.
    """
    A1 = matlib.as_cmatrix(A1, "A1")
    A2 = matlib.as_cmatrix(A2, "A2")
    S1, S2, it, residual, status = matlib.riccati_fixed_point(A1, A2, tol)
    if status == 2:
        raise NoConvergence("iterate lost positive definiteness", residual=residual, iterations=it)
    if status == 1:
        raise NoConvergence(f"no convergence in {it} iterations", residual=residual, iterations=it)
    S1, S2 = 0.5 * (S1 + S1.conj().T), 0.5 * (S2 + S2.conj().T)
    chk = riccati_checks(A1, A2, S1, S2, tol)
    floor = tol.eig_floor * (1.0 + np.linalg.norm(S1, 2))
    if not chk["pd"] or chk["residual"] > tol.riccati_tol or min(chk["lower1"], chk["lower2"]) < -floor:
        raise NoConvergence("fixed point fails the certificate checks", residual=chk["residual"], iterations=it)
    return S1, S2


@dataclass(frozen=True, eq=False)
class RiccatiCertificate:
    """Everything needed to re-check a noisy-interference claim for a two-sided channel."""

    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    Phi1: np.ndarray | None
    Phi2: np.ndarray | None
    radius1: float
    radius2: float
    feasible: bool
    offset_rule: str
    Sigma1: np.ndarray | None = None
    Sigma2: np.ndarray | None = None
    riccati_residual: float = float("nan")
    note: str = ""

    def reverify(self, inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> dict:
        """Independent recomputation of every claim; ``result["ok"]`` aggregates."""
        r1, r2 = inst.H1.shape[0], inst.H4.shape[0]
        N1 = np.eye(r1) + inst.H2 @ inst.S2 @ inst.H2.conj().T
        N2 = np.eye(r2) + inst.H3 @ inst.S1 @ inst.H3.conj().T
        e1 = inst.H3 - self.A1.conj().T @ np.linalg.solve(N1, inst.H1) - self.B1
        e2 = inst.H2 - self.A2.conj().T @ np.linalg.solve(N2, inst.H4) - self.B2
        out = {
            "eq1_residual": float(np.linalg.norm(e1) / (1 + np.linalg.norm(inst.H3))),
            "eq2_residual": float(np.linalg.norm(e2) / (1 + np.linalg.norm(inst.H2))),
            "offset1_residual": offset_residual(self.B1, inst.S1),
            "offset2_residual": offset_residual(self.B2, inst.S2),
        }
        test = riccati_feasible(self.A1, self.A2, tol)
        out["radius1"], out["radius2"] = test.radius1, test.radius2
        ok = (
            max(out["eq1_residual"], out["eq2_residual"], out["offset1_residual"], out["offset2_residual"])
            <= tol.eq_tol
            and test.feasible == self.feasible
            and bool(np.isclose(test.radius1, self.radius1, rtol=0, atol=1e-9))
            and bool(np.isclose(test.radius2, self.radius2, rtol=0, atol=1e-9))
        )
        if self.Sigma1 is not None:
            chk = riccati_checks(self.A1, self.A2, self.Sigma1, self.Sigma2, tol)
            out.update({f"sigma_{k}": v for k, v in chk.items()})
            floor = tol.eig_floor * (1.0 + np.linalg.norm(self.Sigma1, 2))
            ok = ok and chk["pd"] and chk["residual"] <= tol.riccati_tol and min(chk["lower1"], chk["lower2"]) >= -floor
        out["ok"] = bool(ok)
        return out

    def to_mapping(self) -> dict:
        out = {
            "feasible": self.feasible,
            "offset_rule": self.offset_rule,
            "A1": matrix_to_json(self.A1),
            "A2": matrix_to_json(self.A2),
            "B1": matrix_to_json(self.B1),
            "B2": matrix_to_json(self.B2),
            "radius1": _num(self.radius1),
            "radius2": _num(self.radius2),
        }
        if self.Phi1 is not None:
            out["Phi1"] = matrix_to_json(self.Phi1)
            out["Phi2"] = matrix_to_json(self.Phi2)
        if self.Sigma1 is not None:
            out["Sigma1"] = matrix_to_json(self.Sigma1)
            out["Sigma2"] = matrix_to_json(self.Sigma2)
            out["riccati_residual"] = _num(self.riccati_residual)
        if self.note:
            out["note"] = self.note
        return out


def noisy_certificate(
    inst: ChannelInstance, B1=None, B2=None, tol: ToleranceConfig = DEFAULT_TOL
) -> RiccatiCertificate:
    """Best certificate from the offset candidates (given offsets, zero, range-projected)."""
    if B1 is not None or B2 is not None:
        rules = ["zero"]
    else:
        rules = ["zero", "projected"]
    built, errors = [], []
    for rule in rules:
        try:
            f = build_noisy_A(inst, B1, B2, tol, rule=rule)
        except NotLeftInvertible as exc:
            errors.append(f"{rule}: {exc}")
            continue
        if built and all(np.allclose(f.A1, g.A1) and np.allclose(f.A2, g.A2) for g, _ in built):
            continue
        built.append((f, riccati_feasible(f.A1, f.A2, tol)))
        if built[-1][1].feasible:
            break
    if not built:
        raise NotLeftInvertible("; ".join(errors))
    f, test = next(((f, t) for f, t in built if t.feasible), min(built, key=lambda p: max(p[1].radius1, p[1].radius2)))
    rule = "given" if (B1 is not None or B2 is not None) else f.rule
    cert = dict(
        A1=f.A1, A2=f.A2, B1=f.B1, B2=f.B2, M1=test.M1, M2=test.M2, W1=test.W1, W2=test.W2,
        Phi1=test.Phi1, Phi2=test.Phi2, radius1=test.radius1, radius2=test.radius2,
        feasible=test.feasible, offset_rule=rule, note=test.reason,
    )
    if test.feasible:
        try:
            S1, S2 = riccati_solve(f.A1, f.A2, tol)
        except NoConvergence as exc:
            cert["note"] = f"Riccati fixed point: {exc} (residual {exc.residual:.3g})"
        else:
            cert.update(Sigma1=S1, Sigma2=S2,
                        riccati_residual=riccati_checks(f.A1, f.A2, S1, S2, tol)["residual"])
    return RiccatiCertificate(**cert)


def check_noisy_two_sided(
    inst: ChannelInstance, B1=None, B2=None, tol: ToleranceConfig = DEFAULT_TOL
) -> Verdict:
    """Noisy interference (treating interference as noise is sum-rate optimal).

    Builds ``A1``, ``A2`` from the affine equations and applies the
    numerical-radius test; a failure is only a failure of the tried offsets.
    """
    try:
        cert = noisy_certificate(inst, B1, B2, tol)
    except NotLeftInvertible as exc:
        return Verdict(Regime.NOISY_TWO_SIDED, Status.NOT_FOUND, -np.inf, None, False, str(exc))
    margin = 0.5 - max(cert.radius1, cert.radius2)
    if cert.feasible:
        status = Status.SATISFIED if margin >= 0 else Status.BOUNDARY
    else:
        status = Status.NOT_FOUND
    return Verdict(Regime.NOISY_TWO_SIDED, status, margin, cert, conclusive=False, note=cert.note)


# ------------------------------------------------------------------- Markov

def check_markov_condition(Sx, H, G, Su, Suv, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Gaussian Markov chain ``x -> Hx + u -> Gx + v`` test: ``Sx G^H = Sx H^H Su^{-1} Suv``.

    ``Su`` is the covariance of ``u`` and ``Suv`` the cross-covariance ``E[u v^H]``.
    """
    Sx, H, G = (matlib.as_cmatrix(x, n) for x, n in ((Sx, "Sx"), (H, "H"), (G, "G")))
    Su, Suv = matlib.as_cmatrix(Su, "Su"), matlib.as_cmatrix(Suv, "Suv")
    w = np.linalg.eigvalsh(0.5 * (Su + Su.conj().T))
    if w[0] <= tol.eig_floor * max(1.0, abs(w[-1])):
        raise NotPositiveDefinite("Su must be positive definite")
    left = Sx @ G.conj().T
    right = Sx @ H.conj().T @ np.linalg.solve(Su, Suv)
    if left.shape != right.shape:
        raise ShapeMismatch(f"{left.shape} vs {right.shape}")
    scale = 1.0 + np.linalg.norm(left) + np.linalg.norm(right)
    return bool(np.linalg.norm(left - right) <= tol.eq_tol * scale)


def reverify_witness(verdict: Verdict, inst: ChannelInstance, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Independent re-check of the witness behind a satisfied verdict."""
    w = verdict.witness
    if w is None:
        return not verdict.satisfied
    if isinstance(w, ContractionWitness):
        return w.reverify(tol) or not verdict.satisfied
    if isinstance(w, tuple):
        return all(x.reverify(tol) for x in w) or not verdict.satisfied
    if isinstance(w, RiccatiCertificate):
        return w.reverify(inst, tol)["ok"]
    if isinstance(w, Mapping):  # very strong log-det terms
        fresh = very_strong_margins(inst, tol)
        return all(abs(fresh[k] - w[k]) <= 1e-12 * (1 + abs(w[k])) for k in fresh)
    return False


# ------------------------------------------------------------------ classify

@dataclass(frozen=True)
class RegimeReport:
    label: str | None
    verdicts: dict = field(default_factory=dict)

    def satisfied(self) -> list[Regime]:
        return [r for r, v in self.verdicts.items() if v.satisfied]

    def __getitem__(self, regime) -> Verdict:
        return self.verdicts[Regime(regime)]

    def to_mapping(self) -> dict:
        return {
            "label": self.label,
            "satisfied": [r.value for r in self.satisfied()],
            "regimes": {r.value: v.to_mapping() for r, v in self.verdicts.items()},
        }


def _na(regime, note):
    return Verdict(regime, Status.NOT_APPLICABLE, float("nan"), note=note)


def classify(
    inst: ChannelInstance, offsets: Mapping | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> RegimeReport:
    """Evaluate all seven regimes; they are not mutually exclusive."""
    B1, B2 = _offsets(offsets)
    zic = is_zic(inst)
    v = {}
    vs = check_very_strong(inst, tol)
    if zic:
        v[Regime.VERY_STRONG_Z] = vs
        v[Regime.VERY_STRONG] = _na(Regime.VERY_STRONG, "requires H2 != 0 and H3 != 0")
    else:
        v[Regime.VERY_STRONG_Z] = _na(Regime.VERY_STRONG_Z, "requires a zero cross link")
        v[Regime.VERY_STRONG] = vs
    al = check_aligned_strong(inst, offsets, tol)
    if zic:
        v[Regime.ALIGNED_STRONG_Z] = al
        v[Regime.ALIGNED_STRONG] = _na(Regime.ALIGNED_STRONG, "one-sided channel")
    else:
        v[Regime.ALIGNED_STRONG_Z] = _na(Regime.ALIGNED_STRONG_Z, "requires a zero cross link")
        v[Regime.ALIGNED_STRONG] = al
    if zic == 3:
        v[Regime.NOISY_Z] = check_noisy_zic(inst, B2, tol)
    elif zic == 2:
        sw = check_noisy_zic(inst.swap_users(), B1, tol)
        v[Regime.NOISY_Z] = Verdict(sw.regime, sw.status, sw.margin, sw.witness, sw.conclusive,
                                    "users swapped (H2 = 0)")
    else:
        v[Regime.NOISY_Z] = _na(Regime.NOISY_Z, "requires a zero cross link")
    v[Regime.NOISY_TWO_SIDED] = check_noisy_two_sided(inst, B1, B2, tol)
    v[Regime.MIXED_ALIGNED] = check_mixed(inst, offsets, tol)
    return RegimeReport(inst.label, {r: v[r] for r in Regime})


__all__ = [
    "ContractionWitness",
    "NoisyFactors",
    "Regime",
    "RegimeReport",
    "RiccatiCertificate",
    "RiccatiTest",
    "Status",
    "Verdict",
    "build_noisy_A",
    "check_aligned_strong",
    "check_markov_condition",
    "check_mixed",
    "check_noisy_two_sided",
    "check_noisy_zic",
    "check_very_strong",
    "classify",
    "factor_residual",
    "mixed_orientation",
    "noisy_certificate",
    "offset_space",
    "riccati_checks",
    "riccati_feasible",
    "riccati_solve",
    "reverify_witness",
    "solve_contraction",
    "very_strong_margins",
]
