"""Integer-nanosecond time constants and helpers.

All simulation time is int nanoseconds. Floats never enter time arithmetic;
conversions from human units happen here, once, at the edges.
"""

from __future__ import annotations

NS_PER_US = 1_000
NS_PER_MS = 1_000_000
NS_PER_S = 1_000_000_000

# LTE frame geometry: 10 ms radio frame, 1 ms subframes, 0.5 ms slots,
# 7 OFDM symbols per slot.
SLOT_NS = 500_000
SUBFRAME_NS = 1_000_000
FRAME_NS = 10_000_000
SYMBOLS_PER_SLOT = 7
SLOTS_PER_SUBFRAME = 2
SUBFRAMES_PER_FRAME = 10

# 802.11 CTS-to-self on-air time; also the first element of the LTE-u preamble.
CTS_TO_SELF_NS = 44_000

# Regulatory figures checked by the compliance auditor.
MAX_OCCUPANCY_NS = 9_500_000       # hard cap per channel occupancy
OCCUPANCY_RANGE_NS = (1_000_000, 10_000_000)
MIN_IDLE_FRACTION = 0.05           # idle between bursts, relative to the cap
MIN_CCA_NS = 20_000                # shortest lawful CCA observation window


def us(value: int) -> int:
    return value * NS_PER_US


def ms(value: int) -> int:
    return value * NS_PER_MS


def round_half_up(numerator: int, denominator: int) -> int:
    """Integer round-half-up of numerator/denominator (both positive)."""
    return (2 * numerator + denominator) // (2 * denominator)
