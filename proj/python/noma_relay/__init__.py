"""NOMA cooperative relay simulator."""

from ._core import (
    ConfigError,
    ConstraintViolation,
    ContractViolation,
    DomainError,
    Scenario,
    af_end_to_end,
    degree_of_asymmetry,
    df_compose,
    maxmin_select,
    preset_names,
    preset_text,
    rate_from_sinr,
    relay_asymmetry,
    run_trials,
    sic_sinr_chain,
    sweep_csv,
)

__all__ = [
    "ConfigError",
    "ConstraintViolation",
    "ContractViolation",
    "DomainError",
    "Scenario",
    "af_end_to_end",
    "degree_of_asymmetry",
    "df_compose",
    "maxmin_select",
    "preset_names",
    "preset_text",
    "rate_from_sinr",
    "relay_asymmetry",
    "run_trials",
    "sic_sinr_chain",
    "sweep_csv",
]
