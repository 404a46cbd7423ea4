__all__ = [
    "arith",
    "bal",
    "cfengine",
    "spectral",
    "symmetry",
    "irregular",
    "curve",
    "approx",
    "cli",
    "config",
    "errors",
    "jobs",
    "registry",
]
