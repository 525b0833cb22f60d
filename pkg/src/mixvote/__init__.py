"""Share-based MIX networks for code voting, with an exact adversary-view auditor."""

__version__ = "0.1.0"
