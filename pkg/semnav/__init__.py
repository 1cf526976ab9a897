"""
SemNav desk-scale object-goal navigation

Frontier mapping, confidence-weighted semantic value fusion and
expected-cost frontier planning inside a deterministic grid world.
"""

__version__ = "1.0.0"
