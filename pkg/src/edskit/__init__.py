"""Symbolic toolkit for exterior differential systems and variational calculus."""

__version__ = "0.1.0"
