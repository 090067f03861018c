"""Numerical lab for the fourth-order flow du/dt + (-Laplace)^2 u = div F(grad u)."""

__version__ = "0.1.0"
