"""Deterministic per-node random streams.

Every random decision in the simulator comes from a SplitMix64 stream owned by
one node, so event interleaving can never change what a node draws. Scenarios
may pin the first draws of a node (forced draws) to reproduce published
timelines exactly.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """The SplitMix64 output finalizer: two xor-shift-multiplies and a fold."""
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """SplitMix64 generator: additive state walk plus a two-multiply finalizer."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_below(self, bound: int) -> int:
        """Unbiased draw from [0, bound) by masked rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        mask = (1 << (bound - 1).bit_length()) - 1
        while True:
            value = self.next_u64() & mask
            if value < bound:
                return value

    def next_unit(self) -> float:
        """Uniform float in [0, 1) with 53 significant bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)


class NodeStream:
    """A node's draw source: an optional forced prefix, then SplitMix64.

    Forced draws are consumed one per bounded draw and must already lie in
    range; they exist so scenarios can pin contention outcomes.
    """

    def __init__(self, seed: int, forced: list[int] | None = None) -> None:
        self._gen = SplitMix64(seed)
        self._forced = list(forced or [])

    def draw_below(self, bound: int) -> int:
        if self._forced:
            value = self._forced.pop(0)
            if not 0 <= value < bound:
                raise ValueError(f"forced draw {value} outside [0, {bound})")
            return value
        return self._gen.next_below(bound)

    def exponential_ns(self, mean_ns: float) -> int:
        """Exponential inter-arrival, rounded to a positive int ns."""
        u = self._gen.next_unit()
        return max(1, round(-math.log1p(-u) * mean_ns))


def cell_stream_seed(seed: int, cell_id: int) -> int:
    """LTE-u countdown stream seed: scenario/cell seed XOR physical cell id."""
    return (seed ^ cell_id) & MASK64


def wifi_stream_seed(seed: int, node_index: int) -> int:
    """Per-station stream seed: the (index+1)-th output of a master stream.

    The finalizer matters: raw `seed + k*GAMMA` seeds would put every station
    on the same additive state walk, merely offset, and stations that have
    made the same number of draws would then draw identical values forever —
    a lockstep that turns every contention into a repeat collision.
    """
    return mix64((seed + GAMMA * (node_index + 1)) & MASK64)


def traffic_stream_seed(node_seed: int) -> int:
    """Arrival-process stream for a node, decoupled from its contention draws."""
    return (node_seed ^ MIX2) & MASK64
