"""Numerical oracle: direct integration of the lab-frame equations and Floquet analysis."""
