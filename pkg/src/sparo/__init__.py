"""Surface-code Pauli-based computation compiler and resource optimizer."""

__version__ = "0.1.0"

from .allocator import allocate, marginal_gain, quantify, sweep
from .circuit import Circuit, Gate, load_circuit, parse_circuit
from .errors import ErrorBreakdown, ErrorModelParams, accumulate
from .layout import Layout, build_layout, intermediate_layout, minimal_layout
from .pauli import PauliRotation, PauliString
from .pipeline import CompileResult, Compiler, compile_program
from .refsim import verify
from .scheduler import FactoryParams, SchedulerParams, schedule
from .transpile import PbcProgram, transpile

__all__ = [
    "Circuit",
    "CompileResult",
    "Compiler",
    "ErrorBreakdown",
    "ErrorModelParams",
    "FactoryParams",
    "Gate",
    "Layout",
    "PauliRotation",
    "PauliString",
    "PbcProgram",
    "SchedulerParams",
    "accumulate",
    "allocate",
    "build_layout",
    "compile_program",
    "intermediate_layout",
    "load_circuit",
    "marginal_gain",
    "minimal_layout",
    "parse_circuit",
    "quantify",
    "schedule",
    "sweep",
    "transpile",
    "verify",
]
