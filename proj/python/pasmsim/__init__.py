"""Link-level simulator for pinching-antenna spatial multiplexing.

Thin wrapper over the compiled extension: system/sweep configuration,
Monte-Carlo BER sweeps, analytical union bounds, the fixed-array baseline,
and one-shot detector calls on user-supplied channels.
"""

from ._pasmsim import (  # noqa: F401
    BerRecord,
    Config,
    DetectionResult,
    SweepConfig,
    VampParams,
    __version__,
    config_from_json,
    config_to_json,
    constellation,
    crossing_power_dbm,
    csv_string,
    detect,
    flops,
    map_bits,
    profile,
    profiles,
    run_bound,
    run_pssm_baseline,
    run_sweep,
    spectral_efficiency,
)

__all__ = [
    "BerRecord",
    "Config",
    "DetectionResult",
    "SweepConfig",
    "VampParams",
    "config_from_json",
    "config_to_json",
    "constellation",
    "crossing_power_dbm",
    "csv_string",
    "detect",
    "flops",
    "map_bits",
    "profile",
    "profiles",
    "run_bound",
    "run_pssm_baseline",
    "run_sweep",
    "spectral_efficiency",
]
