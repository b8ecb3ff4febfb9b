"""Exact p-adic orbifold volumes of split toric quotient stacks, lambda-rings
of counting functions with plethystic operations, and refined BPS invariants
of symmetric quivers."""

__version__ = "0.1.0"
