"""Rate estimation for periodic phenomena captured by event cameras."""

from ._evrate import (
    EvrateError,
    estimate,
    fft_baseline,
    read_events,
    simple_baseline,
    synth,
    write_events,
)

__all__ = [
    "EvrateError",
    "estimate",
    "fft_baseline",
    "read_events",
    "simple_baseline",
    "synth",
    "write_events",
]
