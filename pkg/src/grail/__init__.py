"""Graded linear logic with quantitative equality.

Grades, syntax and a derivation checker, finite doctrine instances, the
Lipschitz completion at grid scale, metric models and the ``grail`` CLI.
"""

__version__ = "0.1.0"
