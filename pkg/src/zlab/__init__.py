"""Deformed Fourier transforms of Polya-frequency measures.

Core pipeline: characteristic functions of the exponential/Gaussian product
class -> their frequency densities and total-positivity certificates -> the
induced even measures on the line -> the deformed transforms Z_b(z) whose
real zeros, zero flows, and spectral statistics the CLI exposes.
"""

__version__ = "0.1.0"
