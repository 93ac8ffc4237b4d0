"""Two-user MIMO Gaussian interference channel instances.

Receiver 1 sees ``y1 = H1 x1 + H2 x2 + z1`` and receiver 2 sees
``y2 = H3 x1 + H4 x2 + z2`` with unit-covariance noise; input ``x_i`` has
covariance at most ``S_i`` in Loewner order.

Instances are read from and written to a JSON document::

    {"label": "...", "H1": [[1, 0], [0, 1]], "H2": ..., "H3": ..., "H4": ...,
     "S1": ..., "S2": ..., "power": [P1, P2], "offsets": {"B1": ..., "B2": ...}}

Each entry is a real number or a ``[re, im]`` pair. ``label``, ``power`` and
``offsets`` are optional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from . import matlib
from .errors import ConstraintError, DimensionError, ParseError, ShapeMismatch
from .matlib import DEFAULT_TOL, ToleranceConfig

MATRIX_KEYS = ("H1", "H2", "H3", "H4", "S1", "S2")


def _freeze(M: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=np.complex128, copy=True)
    M.setflags(write=False)
    return M


@dataclass(frozen=True, eq=False)
class ChannelInstance:
    """Validated, immutable channel ``(H1, H2, H3, H4, S1, S2)``.

    ``H1`` is r1 x t1, ``H2`` r1 x t2, ``H3`` r2 x t1, ``H4`` r2 x t2 and
    ``S_i`` is t_i x t_i Hermitian PSD.
    """

    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    H4: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    label: str | None = None
    power: tuple[float, float] | None = None
    offsets: Mapping[str, np.ndarray] = field(default_factory=dict)
    tol: ToleranceConfig = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        for key in MATRIX_KEYS:
            try:
                M = matlib.as_cmatrix(getattr(self, key), key)
            except ValueError as exc:
                raise ParseError(str(exc)) from None
            object.__setattr__(self, key, _freeze(M))
        r1, t1 = self.H1.shape
        r2, t2 = self.H4.shape
        expected = {
            "H2": (r1, t2),
            "H3": (r2, t1),
            "S1": (t1, t1),
            "S2": (t2, t2),
        }
        for key, shape in expected.items():
            if getattr(self, key).shape != shape:
                raise DimensionError(
                    f"{key} has shape {getattr(self, key).shape}, expected {shape} "
                    f"(r1={r1}, t1={t1}, r2={r2}, t2={t2})"
                )
        if min(r1, t1, r2, t2) < 1:
            raise DimensionError("every dimension must be at least 1")
        for key in ("S1", "S2"):
            S = getattr(self, key)
            if not matlib.is_hermitian(S, self.tol):
                raise ConstraintError(f"{key} is not Hermitian")
            w = np.linalg.eigvalsh(0.5 * (S + S.conj().T))
            if w[0] < -self.tol.eig_floor * max(1.0, float(np.abs(w).max())):
                raise ConstraintError(f"{key} is not positive semidefinite (eigenvalue {w[0]:.6g})")
        offsets = {}
        for key, B in dict(self.offsets).items():
            if key not in ("B1", "B2"):
                raise ParseError(f"unknown offset key {key!r}")
            B = _freeze(matlib.as_cmatrix(B, key))
            t = t1 if key == "B1" else t2
            if B.shape[1] != t:
                raise DimensionError(f"{key} must have {t} columns, got {B.shape}")
            offsets[key] = B
        object.__setattr__(self, "offsets", offsets)
        if self.power is not None:
            p = tuple(float(x) for x in self.power)
            if len(p) != 2 or min(p) < 0:
                raise ConstraintError("power must be two nonnegative numbers")
            object.__setattr__(self, "power", p)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        """``(t1, t2, r1, r2)``."""
        return self.H1.shape[1], self.H4.shape[1], self.H1.shape[0], self.H4.shape[0]

    def swap_users(self) -> "ChannelInstance":
        """Relabel user 1 as user 2 and vice versa."""
        offsets = {}
        if "B1" in self.offsets:
            offsets["B2"] = self.offsets["B1"]
        if "B2" in self.offsets:
            offsets["B1"] = self.offsets["B2"]
        power = None if self.power is None else (self.power[1], self.power[0])
        return ChannelInstance(
            self.H4, self.H3, self.H2, self.H1, self.S2, self.S1,
            label=self.label, power=power, offsets=offsets, tol=self.tol,
        )

    def with_covariances(self, S1, S2) -> "ChannelInstance":
        return ChannelInstance(
            self.H1, self.H2, self.H3, self.H4, S1, S2,
            label=self.label, power=self.power, offsets=self.offsets, tol=self.tol,
        )

    def __eq__(self, other):
        if not isinstance(other, ChannelInstance):
            return NotImplemented
        return (
            all(np.array_equal(getattr(self, k), getattr(other, k)) for k in MATRIX_KEYS)
            and self.label == other.label
            and self.power == other.power
            and self.offsets.keys() == other.offsets.keys()
            and all(np.array_equal(self.offsets[k], other.offsets[k]) for k in self.offsets)
        )

    __hash__ = None


def is_zic(inst: ChannelInstance) -> int:
    """Which cross link is structurally absent.

    Returns 3 if ``H3`` is identically zero (the orientation the one-sided
    tests use), 2 if only ``H2`` is, and 0 for a two-sided channel. Exact zeros
    only; no tolerance.
    """
    if not np.any(inst.H3):
        return 3
    if not np.any(inst.H2):
        return 2
    return 0


# ---------------------------------------------------------------- documents

def _parse_entry(x, where):
    if isinstance(x, bool):
        raise ParseError(f"{where}: boolean is not a number")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ParseError(f"{where}: entry must be a number or [re, im], got {x!r}")


def parse_matrix(rows, name: str = "matrix") -> np.ndarray:
    """Matrix from the document's array-of-rows form."""
    if isinstance(rows, (int, float)) and not isinstance(rows, bool):
        rows = [[rows]]
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{name} must be a non-empty array of rows")
    if not isinstance(rows[0], list):
        raise ParseError(f"{name} must be an array of rows")
    width = len(rows[0])
    if width == 0:
        raise ParseError(f"{name} has an empty row")
    out = np.empty((len(rows), width), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != width:
            raise ParseError(f"{name}: row {i} is ragged or not an array")
        for j, x in enumerate(row):
            out[i, j] = _parse_entry(x, f"{name}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise ParseError(f"{name} has non-finite entries")
    return out


def _entry_json(z: complex):
    if z.imag == 0.0:
        return float(z.real)
    return [float(z.real), float(z.imag)]


def matrix_to_json(M) -> list:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim < 2:
        M = M.reshape(1, -1)
    return [[_entry_json(complex(z)) for z in row] for row in M]


def instance_from_mapping(doc: Mapping[str, Any], tol: ToleranceConfig = DEFAULT_TOL) -> ChannelInstance:
    if not isinstance(doc, Mapping):
        raise ParseError("instance document must be a JSON object")
    missing = [k for k in MATRIX_KEYS if k not in doc]
    if missing:
        raise ParseError(f"missing fields: {', '.join(missing)}")
    mats = {k: parse_matrix(doc[k], k) for k in MATRIX_KEYS}
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError("label must be a string")
    power = doc.get("power")
    if power is not None:
        if not (isinstance(power, list) and len(power) == 2):
            raise ParseError("power must be [P1, P2]")
    offsets_doc = doc.get("offsets") or {}
    if not isinstance(offsets_doc, Mapping):
        raise ParseError("offsets must be an object")
    offsets = {k: parse_matrix(v, k) for k, v in offsets_doc.items()}
    return ChannelInstance(**mats, label=label, power=power, offsets=offsets, tol=tol)


def load_instance(document, tol: ToleranceConfig = DEFAULT_TOL) -> ChannelInstance:
    """Parse and validate an instance from JSON text, bytes or an already-decoded mapping."""
    if isinstance(document, (str, bytes, bytearray)):
        try:
            document = json.loads(document)
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    return instance_from_mapping(document, tol)


def read_instance(path, tol: ToleranceConfig = DEFAULT_TOL) -> ChannelInstance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return load_instance(text, tol)


def instance_to_mapping(inst: ChannelInstance) -> dict:
    doc: dict[str, Any] = {}
    if inst.label is not None:
        doc["label"] = inst.label
    for k in MATRIX_KEYS:
        doc[k] = matrix_to_json(getattr(inst, k))
    if inst.power is not None:
        doc["power"] = list(inst.power)
    if inst.offsets:
        doc["offsets"] = {k: matrix_to_json(v) for k, v in sorted(inst.offsets.items())}
    return doc


def serialize(inst: ChannelInstance, indent: int | None = None) -> str:
    """Canonical JSON text; ``load_instance(serialize(x)) == x``."""
    return json.dumps(instance_to_mapping(inst), indent=indent)


# ------------------------------------------------------------ offset spaces

@dataclass(frozen=True, eq=False)
class NullOffsetSpace:
    """Matrices ``B`` with ``S_user B^H = 0``, described by bases of ``null(S)`` and ``range(S)``."""

    user: int
    S: np.ndarray
    basis: np.ndarray
    range_basis: np.ndarray
    projector_range: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def offset_space(S, user: int = 0, tol: ToleranceConfig = DEFAULT_TOL) -> NullOffsetSpace:
    S = matlib.as_cmatrix(S, "S")
    N = matlib.null_basis(S, tol)
    R = matlib.range_basis(S, tol)
    P = R @ R.conj().T
    return NullOffsetSpace(user, _freeze(S), _freeze(N), _freeze(R), _freeze(0.5 * (P + P.conj().T)))


def null_offset_space(inst: ChannelInstance, user: int) -> NullOffsetSpace:
    if user not in (1, 2):
        raise ValueError("user must be 1 or 2")
    return offset_space(inst.S1 if user == 1 else inst.S2, user, inst.tol)


def offset_residual(candidate, S) -> float:
    """``||B S||_F / ((1 + ||S||_F)(1 + ||B||_F))``."""
    B = np.asarray(candidate)
    return float(
        np.linalg.norm(B @ S) / ((1.0 + np.linalg.norm(S)) * (1.0 + np.linalg.norm(B)))
    )


def membership_B(candidate, space: NullOffsetSpace, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``candidate`` lies in the offset set of ``space`` (``B S = 0``)."""
    B = matlib.as_cmatrix(candidate, "B")
    if B.shape[1] != space.S.shape[0]:
        raise ShapeMismatch(f"B has {B.shape[1]} columns, S is {space.S.shape[0]}x{space.S.shape[0]}")
    return offset_residual(B, space.S) <= tol.eq_tol
