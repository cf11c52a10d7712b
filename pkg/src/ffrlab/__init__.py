"""Verification laboratory for Fourier extension/restriction estimates
on quadratic varieties over finite fields."""

from ffrlab.field import FieldError, FiniteField, field_for_order, smallest_irreducible

__all__ = [
    "FieldError",
    "FiniteField",
    "field_for_order",
    "smallest_irreducible",
]
