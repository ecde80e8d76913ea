"""Levinson identities for critical-decay potentials."""

from ._core import (
    Channel,
    ChannelSet,
    Error,
    PotentialSpec,
    Segment,
    __version__,
    bessel_jy,
    born_phase,
    build_channels,
    c_nu,
    classify_threshold,
    count_negative_eigenvalues,
    critical_coupling,
    extract_g11,
    extract_gnu0,
    gamma,
    kernel,
    levinson_check,
    phase_curve,
    phase_shift,
    run,
    scenario_hash,
    validate,
    zero_energy_coefficients,
    zero_energy_kernel,
)


def error_kind(err: Error) -> str:
    """Stable kind name of a toolkit error, e.g. 'PositivityViolation'."""
    return str(err).split(":", 1)[0]


__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
