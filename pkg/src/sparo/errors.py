"""Parametric logical-error model and layer-wise accumulation.

Every rate is a multiple of the suppression factor
``Lambda = A * (p / p_th) ** ((d + 1) / 2)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .trace import CAT_ROTATION, CAT_WAIT, ROTATION, OpRecord, ScheduleTrace

VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class ErrorModelParams:
    d: int = 9
    p: float = 1e-3
    p_th: float = 0.01
    A: float = 0.1
    alpha_ppm: float = 1.0
    beta_ppm: float = 1.0
    alpha_move: float = 1.0
    beta_move: float = 0.5
    gamma_idle: float = 0.3
    y_penalty: float = 2.0

    def __post_init__(self) -> None:
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError("code distance must be odd and >= 3")
        if self.p <= 0 or self.p_th <= 0:
            raise ValueError("error rates must be positive")
        for f in fields(self):
            if f.name not in ("d",) and getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    def with_distance(self, d: int) -> ErrorModelParams:
        return replace(self, d=d)

    @classmethod
    def from_json(cls, data: dict) -> ErrorModelParams:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown error-model keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> ErrorModelParams:
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_json(self) -> dict:
        return asdict(self)


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def suppression(params: ErrorModelParams) -> float:
    """Lambda; warns when p is at or above threshold."""
    if params.p >= params.p_th:
        warnings.warn("p >= p_th: the suppression formula is outside its regime", stacklevel=2)
    return params.A * (params.p / params.p_th) ** ((params.d + 1) / 2)


# ``lambda`` is a keyword, so the alias carries a trailing underscore
lambda_ = suppression


def p_ppm(params: ErrorModelParams, ell: int, is_y: bool = False) -> float:
    if ell < 1:
        raise ValueError("a PPM needs at least one ancilla tile")
    val = suppression(params) * (params.alpha_ppm * ell + params.beta_ppm)
    return _clamp(val * (params.y_penalty if is_y else 1.0))


def p_move(params: ErrorModelParams, n_tiles: int) -> float:
    if n_tiles < 1:
        raise ValueError("a move spans at least one tile")
    return _clamp(suppression(params) * (params.alpha_move * n_tiles + params.beta_move))


def p_idle_layer(params: ErrorModelParams, idle_qubits: int, duration: int = 1) -> float:
    if idle_qubits < 0:
        raise ValueError("idle qubit count must be non-negative")
    per = _clamp(suppression(params) * params.gamma_idle)
    return 1.0 - (1.0 - per) ** (idle_qubits * duration)


def op_error(params: ErrorModelParams, op: OpRecord) -> float:
    if op.kind == ROTATION:
        base = p_move(params, op.move_tiles)
    else:
        base = p_ppm(params, op.ell, op.is_y)
    return 1.0 - (1.0 - base) * (1.0 - _clamp(op.extra_error))


@dataclass(frozen=True)
class LayerErrorRecord:
    t: int
    P_op: float
    P_idle: float
    p_L: float
    E_op: float
    E_rotation: float
    E_waitT: float
    E_idle_other: float

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ErrorBreakdown:
    E_waitT_total: float = 0.0
    E_rotation_total: float = 0.0
    E_op_total: float = 0.0
    E_idle_other_total: float = 0.0
    p_L_total: float = 0.0
    records: list[LayerErrorRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def first_order(self) -> float:
        return self.E_waitT_total + self.E_rotation_total + self.E_op_total

    def to_json(self, baseline: ErrorBreakdown | None = None, records: bool = False) -> dict:
        out = {
            "E_waitT": self.E_waitT_total,
            "E_rotation": self.E_rotation_total,
            "E_op": self.E_op_total,
            "E_idle_other": self.E_idle_other_total,
            "p_L_total": self.p_L_total,
            "warnings": list(self.warnings),
        }
        if baseline is not None and baseline.p_L_total > 0:
            out["relative_to_baseline"] = {
                "E_waitT": self.E_waitT_total / baseline.p_L_total,
                "E_rotation": self.E_rotation_total / baseline.p_L_total,
                "E_op": self.E_op_total / baseline.p_L_total,
                "p_L_total": self.p_L_total / baseline.p_L_total,
            }
        if records:
            out["records"] = [r.to_json() for r in self.records]
        return out


def accumulate(trace: ScheduleTrace, params: ErrorModelParams) -> ErrorBreakdown:
    """Layer-wise union of step failures plus a first-order category split.

    Each step's p_L is split between its operation part and its idle part in
    proportion to P_op and P_idle. WaitT steps charge everything to E_waitT,
    rotation steps to E_rotation; idle error in other steps is tracked as
    E_idle_other and folded into E_op.
    """
    out = ErrorBreakdown()
    survive = 1.0
    lam = suppression(params)
    per_idle = _clamp(lam * params.gamma_idle)
    for s in trace.steps:
        ok = 1.0
        for o in s.ops:
            ok *= 1.0 - op_error(params, o)
        P_op = 1.0 - ok
        P_idle = 1.0 - (1.0 - per_idle) ** (s.n_idle * s.duration)
        p_L = 1.0 - (1.0 - P_op) * (1.0 - P_idle)
        denom = P_op + P_idle
        op_share = p_L * P_op / denom if denom > 0 else 0.0
        idle_share = p_L - op_share
        e_op = e_rot = e_wait = e_other = 0.0
        if s.category == CAT_WAIT:
            e_wait = p_L
        elif s.category == CAT_ROTATION:
            e_rot = p_L
        else:
            e_op, e_other = op_share, idle_share
        rec = LayerErrorRecord(s.start, P_op, P_idle, p_L, e_op + e_other, e_rot, e_wait, e_other)
        out.records.append(rec)
        out.E_op_total += rec.E_op
        out.E_rotation_total += e_rot
        out.E_waitT_total += e_wait
        out.E_idle_other_total += e_other
        survive *= 1.0 - p_L
        if p_L > VALIDITY_LIMIT:
            out.warnings.append(f"step at t={s.start} has p_L={p_L:.3g} > {VALIDITY_LIMIT}")
    out.p_L_total = 1.0 - survive
    return out


def log_survival(trace: ScheduleTrace, params: ErrorModelParams) -> float:
    """-log(1 - p_L_total) without clamping; ranks configurations past saturation."""
    lam = suppression(params)
    per_idle = _clamp(lam * params.gamma_idle)
    total = 0.0
    log_idle = -math.log1p(-per_idle) if per_idle < 1 else math.inf
    for s in trace.steps:
        for o in s.ops:
            e = op_error(params, o)
            total += -math.log1p(-e) if e < 1 else math.inf
        total += log_idle * s.n_idle * s.duration
    return total
