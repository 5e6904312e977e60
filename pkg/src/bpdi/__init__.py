"""Termwise gradient-cancellation diagnostics for variational circuits on Ising models."""

__version__ = "0.1.0"
