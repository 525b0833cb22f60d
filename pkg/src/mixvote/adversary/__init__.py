"""Passive t-bounded adversary: corruption sets, views and exact audits."""

from .audit import (
    FAIL,
    INTRACTABLE,
    PASS,
    AuditScenario,
    CaseResult,
    Experiment,
    audit_anonymity,
    audit_privacy,
    negative_controls,
    product_experiment,
    run_cases,
)
from .enumerate import Intractable
from .views import CorruptionSet, ViewTranscript, all_subsets, capture

__all__ = [
    "AuditScenario", "CaseResult", "CorruptionSet", "Experiment", "FAIL", "INTRACTABLE", "Intractable",
    "PASS", "ViewTranscript", "all_subsets", "audit_anonymity", "audit_privacy", "capture",
    "negative_controls", "product_experiment", "run_cases",
]
