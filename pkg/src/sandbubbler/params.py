"""Design parameters and pattern templates.

A pattern run is configured by :class:`DesignParams`, one instance per
burrow.  The four templates change how trench lengths and pellet spacing
are derived; all other parameters are shared.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace


class InvalidParameterError(ValueError):
    """A design, canvas, or palette parameter is outside its valid range."""


class Template(enum.Enum):
    """Generation regime for a single burrow."""

    RTL = "rtl"  # random trench length
    GTL = "gtl"  # growing trench length
    CCR = "ccr"  # concentric rings: pellet-free gaps along each trench
    BTG = "btg"  # burrow-to-trench gap: pellets start away from the center

    @classmethod
    def from_string(cls, name: str) -> "Template":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(t.value for t in cls)
            raise InvalidParameterError(
                f"unknown template {name!r} (expected one of: {valid})"
            ) from None


@dataclass(frozen=True)
class DesignParams:
    """All knobs governing one burrow's pellet generation.

    Defaults produce patterns of natural-looking density: three burrows
    scattered near the origin, up to 50 trenches each, pellets every 0.25
    world units along trenches of mean length 25.

    ``noise_mean_choices`` is a finite set; one element is drawn uniformly
    per burrow and shifts all of that burrow's pellets coherently.
    """

    num_burrows: int = 3
    burrow_coord_mean: float = 0.0
    burrow_coord_variance: float = 7.0
    max_trenches: int = 50
    pellet_distance: float = 0.25
    noise_mean_choices: tuple[float, ...] = (-1.0, 0.0, 1.0)
    noise_variance: float = 0.3
    trench_length_mean: float = 25.0
    trench_length_variance: float = 1.0
    growth_rate: float = 2.0  # GTL: per-trench increase of the mean length
    num_gaps: int = 3  # CCR
    gap_width: float = 4.0  # CCR
    burrow_gap: float = 8.0  # BTG
    template: Template = Template.RTL

    def __post_init__(self) -> None:
        choices = self.noise_mean_choices
        if isinstance(choices, (int, float)):
            choices = (float(choices),)
        else:
            choices = tuple(float(c) for c in choices)
        object.__setattr__(self, "noise_mean_choices", choices)
        if not isinstance(self.template, Template):
            object.__setattr__(self, "template", Template.from_string(self.template))
        self._validate()

    def _validate(self) -> None:
        if self.num_burrows < 1:
            raise InvalidParameterError("num_burrows must be >= 1")
        if self.max_trenches < 1:
            raise InvalidParameterError("max_trenches must be >= 1")
        if self.pellet_distance <= 0:
            raise InvalidParameterError("pellet_distance must be > 0")
        if not self.noise_mean_choices:
            raise InvalidParameterError("noise_mean_choices must be non-empty")
        for name in (
            "burrow_coord_variance",
            "noise_variance",
            "trench_length_variance",
            "gap_width",
            "burrow_gap",
        ):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be >= 0")
        if self.num_gaps < 0:
            raise InvalidParameterError("num_gaps must be >= 0")

    def with_template(self, template: Template) -> "DesignParams":
        return replace(self, template=template)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Template):
                value = value.value
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DesignParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(f"unknown parameter(s): {sorted(unknown)}")
        kwargs = dict(data)
        if "template" in kwargs and not isinstance(kwargs["template"], Template):
            kwargs["template"] = Template.from_string(kwargs["template"])
        if "noise_mean_choices" in kwargs:
            kwargs["noise_mean_choices"] = tuple(kwargs["noise_mean_choices"])
        return cls(**kwargs)


#: Parameter names an external caller (config file, guidance action) may set.
PARAMETER_NAMES = tuple(f.name for f in fields(DesignParams))
