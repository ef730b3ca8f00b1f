"""Adaptive hyperbolic cross density estimation and goodness-of-fit testing."""

from ._core import Model, OutOfCubeError, draw, fit, gof_test, selfcheck, set_threads

__all__ = ["Model", "OutOfCubeError", "draw", "fit", "gof_test", "selfcheck", "set_threads"]
