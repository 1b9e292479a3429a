"""Execution trace records shared by the scheduler and the error model."""

from __future__ import annotations

from dataclasses import dataclass, field

PPM = "Ppm"
ROTATION = "Rotation"
Y_GADGET = "YGadget"
TERMINAL = "TerminalMeasure"

# step categories
CAT_OP = "Op"
CAT_ROTATION = "Rotation"
CAT_WAIT = "WaitT"
CAT_MEASURE = "Measure"


@dataclass(frozen=True)
class OpRecord:
    kind: str
    qubits: tuple[int, ...]
    ell: int = 0
    tiles: frozenset = frozenset()
    magic: bool = False
    is_y: bool = False
    port: tuple[int, int] | None = None
    source: int = -1  # rotation index, measurement index, or -1
    move_tiles: int = 0  # patch-move distance for Rotation ops
    extra_error: float = 0.0  # e.g. magic-state infidelity
    terminals: tuple = ()  # routing terminals, kept for re-routing estimates

    def to_json(self) -> dict:
        out = {"kind": self.kind, "qubits": list(self.qubits), "source": self.source}
        if self.kind == ROTATION:
            out["move_tiles"] = self.move_tiles
        else:
            out["ell_anc"] = self.ell
            out["tiles"] = sorted([list(t) for t in self.tiles])
            out["magic"] = self.magic
            if self.port is not None:
                out["port"] = list(self.port)
        return out


@dataclass(frozen=True)
class Step:
    start: int
    duration: int
    category: str
    ops: tuple[OpRecord, ...]
    n_idle: int

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "duration": self.duration,
            "category": self.category,
            "n_idle": self.n_idle,
            "ops": [o.to_json() for o in self.ops],
        }


@dataclass
class ScheduleTrace:
    n_qubits: int
    steps: list[Step] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def _sum(self, category: str) -> int:
        return sum(s.duration for s in self.steps if s.category == category)

    @property
    def t_op(self) -> int:
        return self._sum(CAT_OP)

    @property
    def t_rotation(self) -> int:
        return self._sum(CAT_ROTATION)

    @property
    def t_wait(self) -> int:
        return self._sum(CAT_WAIT)

    @property
    def t_measure(self) -> int:
        return self._sum(CAT_MEASURE)

    @property
    def t_total(self) -> int:
        return self.t_op + self.t_rotation + self.t_wait

    @property
    def makespan(self) -> int:
        return sum(s.duration for s in self.steps)

    @property
    def magic_consumed(self) -> int:
        return sum(o.magic for s in self.steps for o in s.ops)

    def totals(self) -> dict:
        return {
            "T_op": self.t_op,
            "T_rotation": self.t_rotation,
            "T_waitT": self.t_wait,
            "T_measure": self.t_measure,
            "T_total": self.t_total,
            "makespan": self.makespan,
        }

    def check(self) -> None:
        """Assert the per-step disjointness and timing invariants."""
        t = 0
        for s in self.steps:
            if s.start != t:
                raise AssertionError(f"step at {s.start} does not follow previous end {t}")
            t += s.duration
            seen_q: set[int] = set()
            seen_t: set = set()
            ports: set = set()
            for o in s.ops:
                if seen_q & set(o.qubits):
                    raise AssertionError(f"qubit clash at t={s.start}")
                seen_q |= set(o.qubits)
                if seen_t & o.tiles:
                    raise AssertionError(f"tile clash at t={s.start}")
                seen_t |= o.tiles
                if o.port is not None:
                    if o.port in ports:
                        raise AssertionError(f"port clash at t={s.start}")
                    ports.add(o.port)
            if s.n_idle != self.n_qubits - len(seen_q):
                raise AssertionError(f"idle count mismatch at t={s.start}")

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "totals": self.totals(),
            "steps": [s.to_json() for s in self.steps],
        }
