"""Commutative automorphic loops of exponent 2 from Lie algebras over F2."""

__version__ = "0.1.0"
