"""Models package for the penning-axial toolkit."""
