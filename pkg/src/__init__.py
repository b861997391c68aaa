"""
Package initializer for the quantum loss-discrimination toolkit.

Gaussian-state bounds for telling a lossy channel from an ideal one with
coherent or EPR transmitters, plus growth and memory-readout models.

This allows running the CLI as:
    python -m src.main
"""

__version__ = "0.1.0"
