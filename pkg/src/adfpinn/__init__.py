"""Exact boundary-condition neural PDE solvers built on approximate distance fields."""

import jax

jax.config.update("jax_enable_x64", True)

__version__ = "0.1.0"
