"""Executable runtime and verifier for CAN-style BDI agents with transparent
intention status, quantitative progress estimates, and attention-directing
motivation rules."""

from .lang import CanrtError, CompiledAgent
from .parser import ParseError, ValidationError, parse_program
from .beliefs import apply_effects, entails
from .semantics import (
    AgentConfig,
    EventRecord,
    Intention,
    agent_step,
    agent_step_legacy,
    initial_config,
    intention_step,
    is_blocked,
)
from .progress import (
    CurrentTrace,
    FullTrace,
    ProgressEstimate,
    TraceElement,
    compile_traces,
    estimate_progress,
    update_trace,
)
from .explorer import TransitionSystem, canonical_form, explore
from .ctl import check, parse_ctl, parse_properties

__all__ = [
    "AgentConfig",
    "CanrtError",
    "CompiledAgent",
    "CurrentTrace",
    "EventRecord",
    "FullTrace",
    "Intention",
    "ParseError",
    "ProgressEstimate",
    "TraceElement",
    "TransitionSystem",
    "ValidationError",
    "agent_step",
    "agent_step_legacy",
    "apply_effects",
    "canonical_form",
    "check",
    "compile_traces",
    "entails",
    "estimate_progress",
    "explore",
    "initial_config",
    "intention_step",
    "is_blocked",
    "parse_ctl",
    "parse_program",
    "parse_properties",
    "update_trace",
]
