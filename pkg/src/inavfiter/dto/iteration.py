from typing import Annotated, Any, Literal, Self

import annotated_types
from pydantic import model_validator
from pydantic.alias_generators import to_camel

from .abstract import AbstractDTO

__all__ = ("IterConfig", "DEFAULT_ITER_CONFIG")

Degree = Annotated[int, annotated_types.Ge(0)]

DEFAULT_SAMPLES = 8

# degree fields filled from the sample count when omitted
_DERIVED_DEGREES = {
    "n_omega": -1,
    "n_f": -1,
    "m_q": 1,
    "m_v": 1,
    "m_p": 1,
}


class IterConfig(AbstractDTO):
    """
    Fitting and functional-iteration settings of one update interval.

    Omitted fit degrees default to ``n_samples - 1`` and omitted truncation
    degrees to ``n_samples + 1``.

    Attributes:
        n_samples: Samples per update interval (``N``).
        n_omega: Degree of the fitted angular velocity.
        n_f: Degree of the fitted specific force.
        m_q: Truncation degree of the attitude series.
        m_v: Truncation degree of the velocity series.
        m_p: Truncation degree of the position series.
        m_g: Degree of the gravity approximation.
        nodes: Number of cosine nodes for the gravity approximation (``P``).
        max_iter: Iteration cap per process; ``None`` means ``n_samples + 1``.
        tol: Threshold on the coefficient discrepancy between two iterates.
        order: ``standard`` updates velocity from the previous position;
            ``swapped`` updates position first and feeds its gravity into the
            velocity update.
    """

    n_samples: Annotated[int, annotated_types.Ge(2)] = DEFAULT_SAMPLES
    n_omega: Degree = DEFAULT_SAMPLES - 1
    n_f: Degree = DEFAULT_SAMPLES - 1
    m_q: Degree = DEFAULT_SAMPLES + 1
    m_v: Degree = DEFAULT_SAMPLES + 1
    m_p: Degree = DEFAULT_SAMPLES + 1
    m_g: Degree = 5
    nodes: Annotated[int, annotated_types.Ge(1)] = 5
    max_iter: Annotated[int, annotated_types.Ge(1)] | None = None
    tol: Annotated[float, annotated_types.Gt(0)] = 1e-16
    order: Literal["standard", "swapped"] = "standard"

    @model_validator(mode="before")
    @classmethod
    def derive_degrees(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        n = data.get("nSamples", data.get("n_samples"))
        if not isinstance(n, int) or isinstance(n, bool):
            return data
        data = dict(data)
        for name, offset in _DERIVED_DEGREES.items():
            if name not in data and to_camel(name) not in data:
                data[name] = max(n + offset, 0)
        return data

    @model_validator(mode="after")
    def check_degrees(self) -> Self:
        for name in ("n_omega", "n_f"):
            if getattr(self, name) > self.n_samples - 1:
                raise ValueError(
                    "%s must not exceed nSamples - 1 = %d"
                    % (to_camel(name), self.n_samples - 1)
                )
        if self.nodes < self.m_g:
            raise ValueError("nodes must be at least mG = %d" % self.m_g)
        return self

    @property
    def iteration_cap(self) -> int:
        return self.max_iter if self.max_iter is not None else self.n_samples + 1

    @classmethod
    def for_samples(cls, n_samples: int, **overrides: object) -> Self:
        """Default configuration for ``n_samples`` per interval."""
        return cls.model_validate({"n_samples": n_samples, **overrides})


DEFAULT_ITER_CONFIG = IterConfig()
