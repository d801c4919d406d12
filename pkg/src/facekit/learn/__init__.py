"""Dimensionality reduction, linear models, and the cross-validation protocol."""
