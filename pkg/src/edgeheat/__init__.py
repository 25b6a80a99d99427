"""Heat kernels and heat-trace asymptotics for inverse-square operators with algebraic boundary conditions."""

__version__ = "0.1.0"

