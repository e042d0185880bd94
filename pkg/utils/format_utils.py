"""
Formatting utilities for numbers, durations and file values
"""
import math


def format_duration(seconds_float):
    """Format a wall time for console output"""
    if seconds_float is None:
        return "0.00s"
    if seconds_float < 60:
        return f"{seconds_float:.2f}s"
    minutes = int(seconds_float // 60)
    seconds = seconds_float - minutes * 60
    return f"{minutes}m{seconds:05.2f}s"


def format_value(value):
    """Integers without a fraction, everything else as a round-trip float"""
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def format_gap(gap):
    """Percent gap with two decimals; undefined cells stay empty"""
    if gap is None or (isinstance(gap, float) and math.isnan(gap)):
        return ""
    return f"{gap:.2f}"


def round_half_up(value):
    """Round to the nearest integer, halves away from zero"""
    if value >= 0:
        return int(math.floor(value + 0.5))
    return -int(math.floor(-value + 0.5))
