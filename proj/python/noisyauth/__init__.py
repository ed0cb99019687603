from ._core import (
    Dmc,
    NiScheme,
    ProtocolInstance,
    binary_entropy,
    capacity,
    choose_anchor,
    hull_distance,
    ni_rate,
    ni_setup,
    run_experiment_json,
    run_honest,
    run_replay,
    run_type1,
    run_type2,
    setup,
    statistical_distance,
    theta,
)

__all__ = [
    "Dmc",
    "NiScheme",
    "ProtocolInstance",
    "binary_entropy",
    "capacity",
    "choose_anchor",
    "hull_distance",
    "ni_rate",
    "ni_setup",
    "run_experiment_json",
    "run_honest",
    "run_replay",
    "run_type1",
    "run_type2",
    "setup",
    "statistical_distance",
    "theta",
]
