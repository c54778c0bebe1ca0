"""Secrecy energy efficiency optimisation for MISO and SISO wiretap links."""

from ._seeopt import (
    ChannelPair,
    NoisePowers,
    SeeoptError,
    SystemConfig,
    generate_channel,
    noise_powers,
    path_loss_db,
    secrecy_ee,
    secrecy_rate_miso,
    secrecy_rate_siso,
    siso_grid_optimum,
    siso_zeta_of_eta,
    solve_miso_noqos,
    solve_miso_qos,
    solve_miso_zf,
    solve_siso,
    tradeoff_miso,
)
from ._seeopt import run_scenario as _run_scenario

__all__ = [
    "ChannelPair",
    "NoisePowers",
    "SeeoptError",
    "SystemConfig",
    "generate_channel",
    "noise_powers",
    "path_loss_db",
    "run_scenario",
    "secrecy_ee",
    "secrecy_rate_miso",
    "secrecy_rate_siso",
    "siso_grid_optimum",
    "siso_zeta_of_eta",
    "solve_miso_noqos",
    "solve_miso_qos",
    "solve_miso_zf",
    "solve_siso",
    "tradeoff_miso",
]


def run_scenario(**settings):
    """Run a seeded batch. Keys match the scenario-file keys, e.g.
    run_scenario(method="miso-zf", antennas=2, trials=10, sweep="eta0=0,1").

    Returns (rows, summary), each a list of dicts.
    """
    pairs = [(key, str(value)) for key, value in settings.items()]
    return _run_scenario(pairs)
