"""Accessible information of binary quantum ensembles: measures, measurements,
a multistart estimate of the accessible information and closed-form bounds."""

__all__ = [
    "errors",
    "matcore",
    "ensembles",
    "measures",
    "measurements",
    "accinfo",
    "bounds",
    "properties",
    "sweeps",
    "cli",
]
