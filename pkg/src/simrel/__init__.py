"""Desk-scale program-equivalence workbench.

Three small calculi (untyped combinatory logic, its fine-grain call-by-value
refinement, and a typed call-by-push-value language with recursive types and
binary nondeterministic choice) share one checking kernel: weak-transition
closures, greatest-simulation fixpoints, step-indexed logical-relation chains,
and a brute-force contextual-preorder oracle.

Everything is pure: terms are immutable, checkers return verdict values, and
no module mutates shared state.
"""

__version__ = "0.1.0"
