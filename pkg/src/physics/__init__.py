"""Closed-form Penning-trap dynamics: trap frequencies, laser cooling, axialization, driven response."""
