"""Default tolerances and their override mechanism.

Every tolerance used by the numeric modules lives here so that a single
config document can override them consistently.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # mass-1 / mean-zero checks against a materialised density
    mass: float = 1e-6
    # orthogonality of projection residuals, relative to the vector norm
    orth: float = 1e-8
    # final remainder norm below which a path diagnostic may report
    # "converging"
    path: float = 1e-4
    # absolute residual on directional-derivative slopes
    grad: float = 1e-5
    # principal-angle deviation allowed in subspace comparisons
    sub: float = 1e-6
    # relative residual for inference-function equivalence
    equiv: float = 1e-6
    # per-component root residual scale; the solver uses root * q
    root: float = 1e-8

    def override(self, **kwargs: float) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            from .errors import ConfigurationError

            raise ConfigurationError(
                f"unknown tolerance keys: {sorted(unknown)}; known: {sorted(known)}"
            )
        for key, value in kwargs.items():
            if not (float(value) > 0.0):
                from .errors import ConfigurationError

                raise ConfigurationError(f"tolerance {key!r} must be > 0, got {value}")
        return replace(self, **{k: float(v) for k, v in kwargs.items()})


DEFAULT_TOL = Tolerances()
