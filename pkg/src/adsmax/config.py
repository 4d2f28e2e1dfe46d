"""Default numerical tolerances, overridable at runtime."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    null: float = 1e-9          # quadric / null-cone membership
    form: float = 1e-8          # G^T J G - J for SO0(2,2) elements
    reality: float = 1e-7       # imaginary part allowed before stripping
    cauchy: float = 1e-5        # ray-limit stopping tolerance
    newton: float = 1e-12       # chart inversion


DEFAULT = Tolerances()
_current = DEFAULT


def get() -> Tolerances:
    return _current


def set_tolerances(**kwargs) -> Tolerances:
    """Override selected tolerances globally (used by the CLI ``--tol`` flag)."""
    global _current
    for k, v in kwargs.items():
        if v <= 0:
            raise ValueError(f"tolerance {k} must be positive, got {v}")
    _current = replace(_current, **kwargs)
    return _current


def reset() -> None:
    global _current
    _current = DEFAULT
