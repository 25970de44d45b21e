"""Recursive Bayesian symbol-posterior estimation for RSVP typing, with
signal preprocessing, trainable evidence models, a synthetic dataset
generator, and a simulated typing harness."""

__version__ = "0.1.0"
