"""Unit conversions. Everything inside the package is linear scale (watts,
power ratios); dB and dBm appear only at I/O boundaries."""

import math


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_w: float) -> float:
    if x_w <= 0.0:
        raise ValueError("power must be positive")
    return 10.0 * math.log10(x_w) + 30.0


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("ratio must be positive")
    return 10.0 * math.log10(x)


def gain_from_distance(d_m: float, alpha: float = 4.0) -> float:
    """Geometric path-loss gain d^(-alpha) for a distance in meters."""
    if d_m <= 0.0:
        raise ValueError(f"distance must be positive, got {d_m}")
    return d_m ** (-alpha)
