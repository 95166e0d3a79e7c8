"""Unique-localizability probabilities for collaborative positioning in
Poisson cellular networks."""

__version__ = "0.1.0"
