"""Shipped scenarios.

The four ``fig*`` names are the published-timeline reproductions the command
line exposes for replay against golden traces; the rest exercise longer-run
behaviour (duty cycling, fairness, reservation honoring, mixed deployments).
All of them pin seeds, and the short ones also pin contention draws, so their
traces are stable byte for byte.
"""

from __future__ import annotations

from .scenario import (LteuCellSpec, Scenario, SimulationSpec, TopologySpec,
                       TrafficSpec, WifiNodeSpec)

US = 1_000
MS = 1_000_000


def full_mesh(n: int) -> TopologySpec:
    matrix = [[i != j for j in range(n)] for i in range(n)]
    return TopologySpec(energy=matrix, decode=[row[:] for row in matrix])


def _scripted(arrivals: list[int], bits: int) -> TrafficSpec:
    return TrafficSpec(mode="scripted", frame_bits=bits, arrivals_ns=arrivals)


def three_station_backoff() -> Scenario:
    """Three contending stations show draw, freeze and resume of countdowns.

    C finds the channel idle and sends its first frame a bare DIFS after
    arrival (no draw); A and B arrive during that frame. After C's ACK all
    three draw (A 14, B 10, C 16 pinned), B wins, A and C freeze at 4 and 6
    remaining, then resume and finish in counter order.
    """
    return Scenario(
        simulation=SimulationSpec(name="fig2", seed=2, horizon_ns=2 * MS),
        wifi_nodes=[
            WifiNodeSpec(name="A", peer="AP", forced_backoffs=[14],
                         traffic=_scripted([150 * US], 10_800)),
            WifiNodeSpec(name="B", peer="AP", forced_backoffs=[10],
                         traffic=_scripted([160 * US], 10_800)),
            WifiNodeSpec(name="C", peer="AP", forced_backoffs=[16],
                         traffic=_scripted([50 * US, 170 * US], 10_800)),
            WifiNodeSpec(name="AP"),
        ],
        topology=full_mesh(4),
    )


def solo_cell_clear_channel() -> Scenario:
    """One cell on a clear channel: preamble at slot 1, nine data subframes."""
    return Scenario(
        simulation=SimulationSpec(name="fig5b", seed=3, horizon_ns=100 * MS),
        lteu_cells=[LteuCellSpec(name="L0",
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=full_mesh(1),
    )


def cell_defers_to_wifi() -> Scenario:
    """A Wi-Fi exchange straddles the designated CCA; the cell counts down.

    The station's frame covers slot 1 of the cell's subframe, so the first
    check is busy; the pinned countdown of 3 lands the transmission three
    clear checks after the exchange ends, still inside the second slot.
    """
    return Scenario(
        simulation=SimulationSpec(name="fig5c", seed=4, horizon_ns=10_400_000),
        wifi_nodes=[
            WifiNodeSpec(name="W1", peer="W2",
                         traffic=_scripted([400 * US], 4_644)),
            WifiNodeSpec(name="W2"),
        ],
        lteu_cells=[LteuCellSpec(name="L0", forced_countdowns=[3],
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=full_mesh(3),
    )


def countdown_spans_subframes() -> Scenario:
    """Back-to-back Wi-Fi frames stretch the cell's countdown across subframes.

    The count of 4 is drawn in the one clear check between the station's two
    frames, freezes through the second frame, resumes once its ACK is done
    and expires in subframe 4 — which then becomes the cell's designated
    subframe for the following attempt.
    """
    return Scenario(
        simulation=SimulationSpec(name="fig6", seed=5, horizon_ns=16 * MS),
        wifi_nodes=[
            WifiNodeSpec(name="W1", peer="W2", forced_backoffs=[6],
                         traffic=_scripted([400 * US, 400 * US], 103_680)),
            WifiNodeSpec(name="W2"),
        ],
        lteu_cells=[LteuCellSpec(name="L0", forced_countdowns=[4],
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=full_mesh(3),
    )


def late_grab_short_burst() -> Scenario:
    """Channel clears just before a boundary: the 8.5-subframe burst shape.

    The cell only hears the station (its peer's ACK is out of range), so the
    channel looks clear 25 us after the long frame ends. With a pinned
    countdown of 0 the grab lands 25 us before the boundary — too little for
    a preamble, so the preamble extends one slot and the data span drops to
    seventeen slots.
    """
    hears = [
        #        W1     W2     L0
        [False, True,  True],    # W1 ->
        [True,  False, False],   # W2 ->
        [False, False, False],   # L0 ->
    ]
    return Scenario(
        simulation=SimulationSpec(name="late-grab", seed=6,
                                  horizon_ns=13_200_000),
        wifi_nodes=[
            WifiNodeSpec(name="W1", peer="W2",
                         traffic=_scripted([400 * US], 189_864)),
            WifiNodeSpec(name="W2"),
        ],
        lteu_cells=[LteuCellSpec(name="L0", forced_countdowns=[0],
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=TopologySpec(energy=hears, decode=[row[:] for row in hears]),
    )


def solo_duty_cycle() -> Scenario:
    """A lone saturated cell for one second: busy share must be exactly 95%."""
    return Scenario(
        simulation=SimulationSpec(name="duty-solo", seed=7, horizon_ns=1_000 * MS),
        lteu_cells=[LteuCellSpec(name="L0",
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=full_mesh(1),
    )


def wifi_fairness() -> Scenario:
    """Four identical saturated stations share one receiver for ten seconds."""
    stations = [
        WifiNodeSpec(name=f"S{i}", peer="AP",
                     traffic=TrafficSpec(frame_bits=108_000))
        for i in range(1, 5)
    ]
    return Scenario(
        simulation=SimulationSpec(name="wifi-fairness", seed=8,
                                  horizon_ns=10_000 * MS),
        wifi_nodes=stations + [WifiNodeSpec(name="AP")],
        topology=full_mesh(5),
    )


def reservation_respect() -> Scenario:
    """Sporadic Wi-Fi against a saturated cell; stations must honor the
    reservation carried by the cell's channel-grab signalling."""
    return Scenario(
        simulation=SimulationSpec(name="nav-respect", seed=9,
                                  horizon_ns=3_000 * MS),
        wifi_nodes=[
            WifiNodeSpec(name="W1", peer="W2",
                         traffic=TrafficSpec(mode="poisson", frame_bits=54_000,
                                             mean_interarrival_ns=30 * MS)),
            WifiNodeSpec(name="W2"),
        ],
        lteu_cells=[LteuCellSpec(name="L0",
                                 traffic=TrafficSpec(frame_bits=180_000))],
        topology=full_mesh(3),
    )


def mixed_deployment() -> Scenario:
    """Two saturated Wi-Fi links plus two cells on staggered subframes."""
    return Scenario(
        simulation=SimulationSpec(name="mixed-coex", seed=11,
                                  horizon_ns=10_000 * MS),
        wifi_nodes=[
            WifiNodeSpec(name="W1", peer="W2",
                         traffic=TrafficSpec(frame_bits=108_000)),
            WifiNodeSpec(name="W2"),
            WifiNodeSpec(name="W3", peer="W4",
                         traffic=TrafficSpec(frame_bits=108_000)),
            WifiNodeSpec(name="W4"),
        ],
        lteu_cells=[
            LteuCellSpec(name="L0", cell_id=0, lbt_subframe_index=0,
                         traffic=TrafficSpec(frame_bits=180_000)),
            LteuCellSpec(name="L1", cell_id=1, lbt_subframe_index=5,
                         traffic=TrafficSpec(frame_bits=180_000)),
        ],
        topology=full_mesh(6),
    )


BUILTIN_FACTORIES = {
    "fig2": three_station_backoff,
    "fig5b": solo_cell_clear_channel,
    "fig5c": cell_defers_to_wifi,
    "fig6": countdown_spans_subframes,
    "late-grab": late_grab_short_burst,
    "duty-solo": solo_duty_cycle,
    "wifi-fairness": wifi_fairness,
    "nav-respect": reservation_respect,
    "mixed-coex": mixed_deployment,
}

# The short pinned-draw scenarios whose full traces are committed.
GOLDEN_NAMES = ("fig2", "fig5b", "fig5c", "fig6")


def list_builtins() -> list[str]:
    return list(BUILTIN_FACTORIES)


def get_builtin(name: str) -> Scenario:
    try:
        factory = BUILTIN_FACTORIES[name]
    except KeyError:
        known = ", ".join(BUILTIN_FACTORIES)
        raise KeyError(f"no builtin scenario {name!r} (known: {known})") from None
    return factory()
