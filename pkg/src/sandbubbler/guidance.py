"""Measure-guided pattern generation.

The feedback loop: after each burrow is placed, the cumulative image is
measured; whenever the guiding measure falls short of a calibrated
expectation, one measure-increasing action is drawn at random from a
lookup table and applied to the next burrow's parameters.  Settings are
kept when the measure is on target or the table has nothing to offer.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .params import PARAMETER_NAMES, DesignParams, InvalidParameterError, Template
from .pattern import BurrowPattern, Pattern, generate_burrow
from .raster import CanvasSpec, Palette, rasterize
from .measures import DEFAULT_THRESHOLD, measure_all

MEASURE_IDS = ("bfl", "rrz", "frd")


class ActionKind(enum.Enum):
    SWITCH_TEMPLATE = "switch_template"
    SET_PARAMETER = "set_parameter"


_INT_PARAMS = ("num_burrows", "max_trenches", "num_gaps")


@dataclass(frozen=True)
class Action:
    """One measure-increasing intervention on the next burrow's params.

    Parameter actions are steps, not absolute targets: multiply by
    ``scale`` or add ``delta``, then clamp to [lower, upper].  Repeated
    applications keep walking the parameter until a bound stops it.
    """

    kind: ActionKind
    template: Optional[Template] = None
    name: Optional[str] = None
    scale: Optional[float] = None
    delta: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind is ActionKind.SWITCH_TEMPLATE:
            if not isinstance(self.template, Template):
                raise InvalidParameterError("switch_template needs a Template")
        else:
            if self.name not in PARAMETER_NAMES:
                raise InvalidParameterError(f"unknown parameter {self.name!r}")
            if (self.scale is None) == (self.delta is None):
                raise InvalidParameterError(
                    "set_parameter needs exactly one of scale or delta"
                )

    def apply(self, params: DesignParams) -> DesignParams:
        if self.kind is ActionKind.SWITCH_TEMPLATE:
            return replace(params, template=self.template)
        value = getattr(params, self.name)
        value = value * self.scale if self.scale is not None else value + self.delta
        if self.lower is not None:
            value = max(value, self.lower)
        if self.upper is not None:
            value = min(value, self.upper)
        if self.name in _INT_PARAMS:
            value = int(round(value))
        return replace(params, **{self.name: value})

    def describe(self) -> str:
        if self.kind is ActionKind.SWITCH_TEMPLATE:
            return f"switch_template:{self.template.value}"
        if self.scale is not None:
            return f"set_parameter:{self.name}*{self.scale:g}"
        return f"set_parameter:{self.name}{self.delta:+g}"

    def to_dict(self) -> dict:
        if self.kind is ActionKind.SWITCH_TEMPLATE:
            return {"kind": self.kind.value, "template": self.template.value}
        return {
            "kind": self.kind.value,
            "name": self.name,
            "scale": self.scale,
            "delta": self.delta,
            "lower": self.lower,
            "upper": self.upper,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Action":
        kind = ActionKind(data["kind"])
        if kind is ActionKind.SWITCH_TEMPLATE:
            return cls(kind=kind, template=Template.from_string(data["template"]))
        return cls(
            kind=kind,
            name=data["name"],
            scale=data.get("scale"),
            delta=data.get("delta"),
            lower=data.get("lower"),
            upper=data.get("upper"),
        )


# step sizes and bounds for parameter actions, keyed by (name, direction);
# bounds follow the sweep ranges except the trench floor of 1
PARAMETER_STEPS: dict[tuple[str, str], dict] = {
    ("max_trenches", "down"): {"scale": 0.5, "lower": 1.0},
    ("max_trenches", "up"): {"scale": 2.0, "upper": 100.0},
    ("pellet_distance", "down"): {"delta": -0.1, "lower": 0.05},
    ("pellet_distance", "up"): {"delta": 0.1, "upper": 1.0},
    ("num_burrows", "down"): {"delta": -1.0, "lower": 2.0},
    ("num_burrows", "up"): {"delta": 1.0, "upper": 10.0},
}


@dataclass(frozen=True)
class LookupTable:
    """Per-measure lists of calibrated measure-increasing actions.

    ``deltas`` records each action's calibrated mean improvement over
    the default configuration (the supporting evidence); ``flagged``
    lists measures for which no improving action was found (their entry
    is empty and guidance keeps settings).
    """

    entries: dict[str, tuple[Action, ...]]
    deltas: dict[str, tuple[float, ...]]
    flagged: tuple[str, ...] = ()

    def entry(self, measure: str) -> tuple[Action, ...]:
        return self.entries.get(measure.lower(), ())

    def to_dict(self) -> dict:
        return {
            "entries": {
                m: [a.to_dict() for a in acts] for m, acts in self.entries.items()
            },
            "deltas": {m: list(d) for m, d in self.deltas.items()},
            "flagged": list(self.flagged),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "LookupTable":
        return cls(
            entries={
                m: tuple(Action.from_dict(a) for a in acts)
                for m, acts in data["entries"].items()
            },
            deltas={m: tuple(d) for m, d in data.get("deltas", {}).items()},
            flagged=tuple(data.get("flagged", ())),
        )

    @classmethod
    def empty(cls) -> "LookupTable":
        return cls(entries={}, deltas={}, flagged=tuple(MEASURE_IDS))


@dataclass(frozen=True)
class Expectation:
    """Calibrated mean of one measure at a reference configuration."""

    measure: str
    value: float
    sample_size: int

    def __post_init__(self) -> None:
        if self.sample_size < 1:
            raise InvalidParameterError("sample_size must be >= 1")

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "value": self.value,
            "sample_size": self.sample_size,
        }


@dataclass(frozen=True)
class ControlRecord:
    """One guidance decision: measured value vs expectation, action taken."""

    burrow: int
    measure: str
    value: float
    expectation: float
    action: str  # "kept" or an Action.describe() string
    template: str


CONTROL_CSV_HEADER = "burrow,measure,value,expectation,action"


@dataclass(frozen=True)
class ControlLog:
    records: tuple[ControlRecord, ...]

    def actions_taken(self) -> int:
        return sum(1 for r in self.records if r.action != "kept")

    def to_csv(self) -> str:
        lines = [CONTROL_CSV_HEADER]
        for r in self.records:
            lines.append(
                f"{r.burrow},{r.measure},{r.value!r},{r.expectation!r},{r.action}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = []
        for r in self.records:
            verdict = "on target, kept" if r.action == "kept" else f"applied {r.action}"
            lines.append(
                f"burrow {r.burrow} [{r.template}]: {r.measure}={r.value:.4f} "
                f"vs expected {r.expectation:.4f} -> {verdict}"
            )
        return "\n".join(lines) + "\n"


def calibrate_expectations(
    measure: str,
    configs: Sequence[DesignParams],
    n: int,
    m: int,
    seed: int,
    canvas: Optional[CanvasSpec] = None,
    palette: Optional[Palette] = None,
    detection_threshold: float = DEFAULT_THRESHOLD,
) -> Expectation:
    """Mean of a measure over n seeded images x m random hues per config.

    Uses the same sampling protocol as the parameter sweep, so an
    expectation is directly comparable with sweep cell means.
    """
    from .sweep import sample_measures  # late import, sweep builds on guidance types

    if n < 1 or m < 1:
        raise InvalidParameterError("n and m must be >= 1")
    canvas = canvas or CanvasSpec()
    palette = palette or Palette()
    measure = measure.lower()
    values: list[float] = []
    for c_idx, cfg in enumerate(configs):
        samples = sample_measures(
            cfg, canvas, palette, n, m, seed, (c_idx,),
            detection_threshold=detection_threshold,
        )
        values.extend(samples[measure])
    return Expectation(
        measure=measure, value=float(np.mean(values)), sample_size=len(values)
    )


def build_lookup_table(rows: Sequence, min_delta: float = 0.0) -> LookupTable:
    """Distill sweep results into per-measure increasing actions.

    ``rows`` are SweepRow records covering all four templates and the
    three swept parameters.  For each measure, the baseline is the mean
    at the default configuration (default template at default parameter
    values); the entry holds every action whose sweep mean beats the
    baseline by more than min_delta, sorted by improvement, with the
    deltas kept as evidence.  Measures with no improving candidate get
    an empty, flagged entry.
    """
    from .sweep import DEFAULT_GRIDS  # grid definitions live with the sweep

    if not rows:
        raise InvalidParameterError("empty sweep results")
    defaults = DesignParams()
    default_template = defaults.template
    default_noise = defaults.noise_variance

    covered_templates = {r.template for r in rows}
    covered_params = {r.parameter for r in rows}
    need_templates = {t.value for t in Template}
    need_params = set(DEFAULT_GRIDS)
    if not need_templates <= covered_templates or not need_params <= covered_params:
        raise InvalidParameterError(
            "sweep must cover all templates and swept parameters; missing "
            f"templates={sorted(need_templates - covered_templates)} "
            f"parameters={sorted(need_params - covered_params)}"
        )

    entries: dict[str, tuple[Action, ...]] = {}
    deltas: dict[str, tuple[float, ...]] = {}
    flagged: list[str] = []
    for measure in MEASURE_IDS:
        at_noise = [r for r in rows if r.noise_variance == default_noise and r.measure == measure]
        # baseline: default-template rows at each parameter's default value
        base_rows = [
            r for r in at_noise
            if r.template == default_template.value
            and r.value == getattr(defaults, r.parameter)
        ]
        if not base_rows:
            raise InvalidParameterError(
                f"sweep lacks default-configuration rows for measure {measure}"
            )
        baseline = float(np.mean([r.mean for r in base_rows]))

        candidates: list[tuple[float, Action]] = []
        for template in Template:
            if template is default_template:
                continue
            t_rows = [
                r for r in at_noise
                if r.template == template.value
                and r.value == getattr(defaults, r.parameter)
            ]
            if t_rows:
                mean = float(np.mean([r.mean for r in t_rows]))
                if mean > baseline + min_delta:
                    candidates.append(
                        (mean - baseline,
                         Action(ActionKind.SWITCH_TEMPLATE, template=template))
                    )
        for param in sorted(need_params):
            p_rows = [
                r for r in at_noise
                if r.template == default_template.value
                and r.parameter == param
                and r.value != getattr(defaults, param)
                and r.mean > baseline + min_delta
            ]
            if not p_rows:
                continue
            best_row = max(p_rows, key=lambda r: r.mean)
            direction = "down" if best_row.value < getattr(defaults, param) else "up"
            step = PARAMETER_STEPS[(param, direction)]
            candidates.append(
                (best_row.mean - baseline,
                 Action(ActionKind.SET_PARAMETER, name=param, **step))
            )
        if not candidates:
            entries[measure] = ()
            deltas[measure] = ()
            flagged.append(measure)
            continue
        kept = sorted(candidates, key=lambda pair: (-pair[0], pair[1].describe()))
        entries[measure] = tuple(a for _, a in kept)
        deltas[measure] = tuple(d for d, _ in kept)
    return LookupTable(entries=entries, deltas=deltas, flagged=tuple(flagged))


def guided_generate(
    initial: DesignParams,
    measure: str,
    table: LookupTable,
    expectation: Expectation,
    max_burrows: int,
    canvas: CanvasSpec,
    palette: Palette,
    seed: int,
    detection_threshold: float = DEFAULT_THRESHOLD,
) -> tuple[Pattern, np.ndarray, ControlLog]:
    """Run the feedback loop for max_burrows burrows.

    One seeded stream drives all generation; the only extra consumption
    versus an unguided run is one integer draw per applied action, so a
    run with an empty table is byte-identical to plain generation with
    the same seed and params.
    """
    if max_burrows < 1:
        raise InvalidParameterError("max_burrows must be >= 1")
    measure = measure.lower()
    if measure not in MEASURE_IDS:
        raise InvalidParameterError(f"unknown measure {measure!r}")
    rng = np.random.default_rng(seed)
    params = initial
    burrows: list[BurrowPattern] = []
    params_used: list[DesignParams] = []
    records: list[ControlRecord] = []
    order = 0
    image: Optional[np.ndarray] = None
    for i in range(1, max_burrows + 1):
        burrow = generate_burrow(params, i, rng, order_start=order)
        order += burrow.pellet_count
        burrows.append(burrow)
        params_used.append(params)
        partial = Pattern(
            burrows=tuple(burrows), seed=int(seed), params_per_burrow=tuple(params_used)
        )
        image = rasterize(partial, canvas, palette)
        report = measure_all(
            image, background=canvas.background, detection_threshold=detection_threshold
        )
        value = report.value(measure)
        action_label = "kept"
        if value < expectation.value:
            actions = table.entry(measure)
            if actions:
                chosen = actions[int(rng.integers(len(actions)))]
                params = chosen.apply(params)
                action_label = chosen.describe()
        records.append(
            ControlRecord(
                burrow=i,
                measure=measure,
                value=value,
                expectation=expectation.value,
                action=action_label,
                template=burrow.template.value,
            )
        )
    pattern = Pattern(
        burrows=tuple(burrows), seed=int(seed), params_per_burrow=tuple(params_used)
    )
    return pattern, image, ControlLog(records=tuple(records))
