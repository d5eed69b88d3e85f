"""Exact and numerical vortex solutions on constant-curvature surfaces."""
