"""Core module for configuration, errors and numerical kernels."""
