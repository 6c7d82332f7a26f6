"""Simulation and certificate checking for hybrid systems with memory."""

from __future__ import annotations

from .certificates import CertificateSpec, run_suite
from .errors import HymemError
from .hybrid_time import HybridArc, HybridTime, HybridTimeDomain, InputSignal, MemoryArc, validate_domain
from .report import CheckReport, Tol
from .system import SimConfig, Solution, SystemDef, simulate
from .toolkit import ComparisonFunction

__all__ = [
    "CertificateSpec",
    "CheckReport",
    "ComparisonFunction",
    "HybridArc",
    "HybridTime",
    "HybridTimeDomain",
    "HymemError",
    "InputSignal",
    "MemoryArc",
    "SimConfig",
    "Solution",
    "SystemDef",
    "Tol",
    "run_suite",
    "simulate",
    "validate_domain",
]
