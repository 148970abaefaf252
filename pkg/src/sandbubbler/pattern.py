"""Pellet-pattern geometry generation.

A pattern is a set of burrows scattered around the origin.  Each burrow
spawns trenches at equidistant angles between two random directions, and
pellets are laid along each trench at regular radial offsets plus
independent Gaussian jitter on both axes.  Four templates vary the
trench-length and spacing rules:

* RTL: every trench length is drawn from one normal distribution.
* GTL: the length distribution's mean grows linearly with trench index.
* CCR: pellet-free ring-shaped gaps are cut out of each trench.
* BTG: pellets start only beyond a fixed gap around the burrow center.

All randomness flows through a single numpy ``Generator`` consumed in a
fixed, documented order (see :func:`generate_burrow`), so a
``(seed, params)`` pair fully determines the output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .params import DesignParams, InvalidParameterError, Template

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Pellet:
    """One placed pellet with its provenance indices.

    Indices are 1-based: burrow i, trench j within the burrow, ring k
    along the trench.  ``order_stamp`` is a global 0-based placement
    counter, strictly increasing in generation order.
    """

    x: float
    y: float
    burrow_index: int
    trench_index: int
    ring_index: int
    order_stamp: int

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Trench:
    """One trench: direction, sampled length, and pre-noise pellet offsets.

    ``gaps`` records the pellet-free intervals cut out by the CCR
    template as (start, end) pairs; empty for other templates.
    """

    angle: float
    length: float
    radial_coords: tuple[float, ...]
    gaps: tuple[tuple[float, float], ...] = ()

    @property
    def pellet_count(self) -> int:
        return len(self.radial_coords)


@dataclass(eq=False)
class BurrowPattern:
    """All geometry generated for one burrow.

    Final (noised) pellet positions live in ``positions``, a (M, 2)
    float array in generation order; ``trench_index`` / ``ring_index``
    carry the matching 1-based provenance and ``order_start`` the global
    stamp of the first pellet.  :attr:`pellets` materializes them as
    :class:`Pellet` objects on demand.
    """

    burrow_index: int
    center: tuple[float, float]
    template: Template
    num_trenches: int
    noise_mean: float
    noise_variance: float
    trenches: tuple[Trench, ...]
    positions: np.ndarray
    trench_index: np.ndarray
    ring_index: np.ndarray
    order_start: int = 0

    @property
    def pellet_count(self) -> int:
        return int(self.positions.shape[0])

    @cached_property
    def pellets(self) -> tuple[Pellet, ...]:
        xs = self.positions[:, 0]
        ys = self.positions[:, 1]
        return tuple(
            Pellet(
                x=float(xs[n]),
                y=float(ys[n]),
                burrow_index=self.burrow_index,
                trench_index=int(self.trench_index[n]),
                ring_index=int(self.ring_index[n]),
                order_stamp=self.order_start + n,
            )
            for n in range(self.pellet_count)
        )

    def to_dict(self) -> dict:
        return {
            "index": self.burrow_index,
            "center": [float(self.center[0]), float(self.center[1])],
            "template": self.template.value,
            "num_trenches": self.num_trenches,
            "noise_mean": self.noise_mean,
            "noise_variance": self.noise_variance,
            "order_start": self.order_start,
            "trenches": [
                {
                    "index": j + 1,
                    "angle": t.angle,
                    "length": t.length,
                    "gaps": [[s, e] for s, e in t.gaps],
                    "radial_coords": list(t.radial_coords),
                }
                for j, t in enumerate(self.trenches)
            ],
            "pellets": [
                {
                    "trench": int(self.trench_index[n]),
                    "ring": int(self.ring_index[n]),
                    "x": float(self.positions[n, 0]),
                    "y": float(self.positions[n, 1]),
                    "order": self.order_start + n,
                }
                for n in range(self.pellet_count)
            ],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BurrowPattern):
            return NotImplemented
        return self.to_dict() == other.to_dict()


@dataclass(eq=False)
class Pattern:
    """A full multi-burrow pattern plus the inputs that produced it."""

    burrows: tuple[BurrowPattern, ...]
    seed: int
    params_per_burrow: tuple[DesignParams, ...]

    @property
    def pellet_count(self) -> int:
        return sum(b.pellet_count for b in self.burrows)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "params_per_burrow": [p.to_dict() for p in self.params_per_burrow],
            "burrows": [b.to_dict() for b in self.burrows],
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        """Serialize deterministically; identical patterns give identical bytes."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def pellet_location(
    center: tuple[float, float],
    theta: float,
    r: float,
    noise_mean: float,
    noise_variance: float,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """Place one pellet at radius r along direction theta, plus noise.

    The two noise terms are independent draws from
    Normal(noise_mean, noise_variance); variance 0 degenerates to the
    mean exactly.
    """
    if noise_variance < 0:
        raise InvalidParameterError("noise_variance must be >= 0")
    sigma = math.sqrt(noise_variance)
    nx = rng.normal(noise_mean, sigma)
    ny = rng.normal(noise_mean, sigma)
    return (
        center[0] + r * math.cos(theta) + nx,
        center[1] + r * math.sin(theta) + ny,
    )


def trench_angles(num_trenches: int, theta_first: float, theta_last: float) -> list[float]:
    """Equidistant angles from theta_first to theta_last, inclusive.

    Interpolation is linear in the reals (no shortest-arc wrapping);
    callers reduce mod 2*pi where needed.  A single trench sits at
    theta_first.
    """
    if num_trenches < 1:
        raise InvalidParameterError("num_trenches must be >= 1")
    if num_trenches == 1:
        return [theta_first]
    step = (theta_last - theta_first) / (num_trenches - 1)
    return [theta_first + j * step for j in range(num_trenches)]


def draw_gaps(
    params: DesignParams, trench_length: float, rng: np.random.Generator
) -> tuple[tuple[float, float], ...]:
    """Draw the CCR template's pellet-free intervals for one trench.

    Start positions are uniform on [0, length - gap_width], clamped to
    [0, 0] for trenches shorter than one gap.  Gaps may overlap.
    """
    high = max(0.0, trench_length - params.gap_width)
    starts = rng.uniform(0.0, high, size=params.num_gaps)
    return tuple((float(s), float(s) + params.gap_width) for s in starts)


def radial_coordinates(
    template: Template,
    params: DesignParams,
    trench_length: float,
    rng: Optional[np.random.Generator] = None,
    *,
    gaps: Optional[Sequence[tuple[float, float]]] = None,
) -> np.ndarray:
    """Pre-noise radial pellet offsets along one trench, increasing.

    The base grid is offset + k*d for k = 1..floor(length/d), where the
    offset is ``burrow_gap`` for BTG and 0 otherwise.  For CCR, any
    offset strictly inside a gap interval is dropped; gaps are drawn
    from ``rng`` unless injected via ``gaps``.
    """
    if trench_length < 0:
        raise InvalidParameterError("trench_length must be >= 0")
    d = params.pellet_distance
    count = int(math.floor(trench_length / d))
    offset = params.burrow_gap if template is Template.BTG else 0.0
    coords = offset + d * np.arange(1, count + 1, dtype=np.float64)
    if template is Template.CCR:
        if gaps is None:
            if rng is None:
                raise InvalidParameterError("CCR needs an rng or explicit gaps")
            gaps = draw_gaps(params, trench_length, rng)
        keep = np.ones(count, dtype=bool)
        for start, end in gaps:
            keep &= ~((coords > start) & (coords < end))
        coords = coords[keep]
    return coords


def sample_trench_length(
    template: Template,
    params: DesignParams,
    trench_index: int,
    rng: np.random.Generator,
) -> float:
    """Draw one trench length, clamped below at 0.

    GTL grows the mean linearly with the 1-based trench index; the other
    templates share a fixed mean.
    """
    if trench_index < 1:
        raise InvalidParameterError("trench_index must be >= 1")
    mean = params.trench_length_mean
    if template is Template.GTL:
        mean = mean + (trench_index - 1) * params.growth_rate
    draw = rng.normal(mean, math.sqrt(params.trench_length_variance))
    return max(0.0, float(draw))


def generate_burrow(
    params: DesignParams,
    burrow_index: int,
    rng: np.random.Generator,
    order_start: int = 0,
) -> BurrowPattern:
    """Generate one burrow's full geometry from the shared stream.

    Stream consumption order (fixed for reproducibility):

    1. center x, center y ~ Normal(coord mean, coord variance)
    2. trench count ~ uniform integer on [1, max_trenches]
    3. first angle, last angle ~ uniform on [0, 2*pi)
    4. noise mean ~ uniform choice from noise_mean_choices (one draw,
       applied to every pellet of this burrow)
    5. per trench: length draw, then CCR gap starts (CCR only), then one
       (K, 2) block of pellet noise
    """
    template = params.template
    coord_sigma = math.sqrt(params.burrow_coord_variance)
    cx = float(rng.normal(params.burrow_coord_mean, coord_sigma))
    cy = float(rng.normal(params.burrow_coord_mean, coord_sigma))
    num_trenches = int(rng.integers(1, params.max_trenches + 1))
    theta_first = float(rng.uniform(0.0, TWO_PI))
    theta_last = float(rng.uniform(0.0, TWO_PI))
    choices = params.noise_mean_choices
    noise_mean = float(choices[int(rng.integers(len(choices)))])
    noise_sigma = math.sqrt(params.noise_variance)

    angles = trench_angles(num_trenches, theta_first, theta_last)
    trenches: list[Trench] = []
    xs: list[np.ndarray] = []
    ys: list[np.ndarray] = []
    trench_ids: list[np.ndarray] = []
    ring_ids: list[np.ndarray] = []
    for j, angle in enumerate(angles, start=1):
        length = sample_trench_length(template, params, j, rng)
        gaps: tuple[tuple[float, float], ...] = ()
        if template is Template.CCR:
            gaps = draw_gaps(params, length, rng)
        coords = radial_coordinates(template, params, length, gaps=gaps)
        k = coords.shape[0]
        noise = rng.normal(noise_mean, noise_sigma, size=(k, 2))
        xs.append(cx + coords * math.cos(angle) + noise[:, 0])
        ys.append(cy + coords * math.sin(angle) + noise[:, 1])
        trench_ids.append(np.full(k, j, dtype=np.int32))
        ring_ids.append(np.arange(1, k + 1, dtype=np.int32))
        trenches.append(
            Trench(
                angle=angle % TWO_PI,
                length=length,
                radial_coords=tuple(float(c) for c in coords),
                gaps=gaps,
            )
        )

    if xs:
        positions = np.column_stack(
            (np.concatenate(xs), np.concatenate(ys))
        )
        trench_arr = np.concatenate(trench_ids)
        ring_arr = np.concatenate(ring_ids)
    else:
        positions = np.empty((0, 2), dtype=np.float64)
        trench_arr = np.empty(0, dtype=np.int32)
        ring_arr = np.empty(0, dtype=np.int32)

    return BurrowPattern(
        burrow_index=burrow_index,
        center=(cx, cy),
        template=template,
        num_trenches=num_trenches,
        noise_mean=noise_mean,
        noise_variance=params.noise_variance,
        trenches=tuple(trenches),
        positions=positions,
        trench_index=trench_arr,
        ring_index=ring_arr,
        order_start=order_start,
    )


def generate_pattern(
    configs: DesignParams | Sequence[DesignParams],
    seed: int,
) -> Pattern:
    """Generate a full pattern from one seeded stream.

    ``configs`` is either one DesignParams (expanded to its num_burrows)
    or an explicit per-burrow sequence.  Burrows are generated in order
    from a single ``default_rng(seed)`` stream.
    """
    if isinstance(configs, DesignParams):
        configs = [configs] * configs.num_burrows
    configs = tuple(configs)
    if not configs:
        raise InvalidParameterError("need at least one per-burrow config")
    rng = np.random.default_rng(seed)
    burrows: list[BurrowPattern] = []
    order = 0
    for i, cfg in enumerate(configs, start=1):
        burrow = generate_burrow(cfg, i, rng, order_start=order)
        order += burrow.pellet_count
        burrows.append(burrow)
    return Pattern(burrows=tuple(burrows), seed=int(seed), params_per_burrow=configs)
