"""EM-based GLRT detectors for signals with partially known symbols."""

from ._emglrt import (
    EmglrtError,
    detectors,
    gerlach_steiner,
    glrt_det,
    glrt_gauss,
    kelly,
    kmr,
    mcwhorter,
    run_point,
    synthesize,
    version,
)

__version__ = version()

__all__ = [
    "EmglrtError",
    "detectors",
    "gerlach_steiner",
    "glrt_det",
    "glrt_gauss",
    "kelly",
    "kmr",
    "mcwhorter",
    "run_point",
    "synthesize",
    "version",
]
