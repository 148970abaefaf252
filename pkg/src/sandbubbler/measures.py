"""Computational aesthetic measures on RGB pixel buffers.

Three measures, each mapping an image to a scalar:

* BFL: closeness of the sorted 9-bin luminosity histogram to the
  Benford digit distribution, scaled so 0 is the constant image and 1
  is an exact match.
* RRZ: Kullback-Leibler divergence between the observed distribution of
  suprathreshold color-gradient responses (100 bins) and the normal
  distribution fitted to those responses.  Large values mean the
  response histogram is far from a bell curve.
* FRD: closeness of the box-counting fractal dimension to 1.35, the
  value aesthetic images are reported to cluster around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels

#: Benford digit distribution and the L1 distance attained by a
#: constant-luminosity histogram against it.
H_B = np.array((0.301, 0.176, 0.125, 0.097, 0.079, 0.067, 0.058, 0.051, 0.046))
D_MAX = 1.398

DEFAULT_THRESHOLD = 0.01
BOX_SIZES = (256, 128, 64, 32, 16, 8, 4, 2)


class UndefinedDimensionError(ValueError):
    """Box counting found no foreground pixels."""


def luminosity(pixel: tuple[float, float, float]) -> float:
    """Perceptual luminance of one RGB pixel, channels in 0..255."""
    r, g, b = pixel
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def _luminosity_array(image: np.ndarray) -> np.ndarray:
    img = image.astype(np.float64)
    lum = 0.2126 * img[:, :, 0] + 0.7152 * img[:, :, 1] + 0.0722 * img[:, :, 2]
    # guard the histogram's fixed [0, 255] range against float spill
    return np.clip(lum, 0.0, 255.0)


def luminosity_histogram(image: np.ndarray) -> np.ndarray:
    """Normalized 9-bin histogram of pixel luminosity, sorted descending."""
    lum = _luminosity_array(image)
    counts, _ = np.histogram(lum, bins=9, range=(0.0, 255.0))
    hist = counts / lum.size
    return np.sort(hist)[::-1]


def benford_measure(image: np.ndarray) -> float:
    """BFL: 1 - L1(H_I, H_B)/d_max, clamped to [0, 1]."""
    h_i = luminosity_histogram(image)
    d_total = float(np.abs(h_i - H_B).sum())
    return min(1.0, max(0.0, 1.0 - d_total / D_MAX))


@dataclass(frozen=True)
class GradientDistribution:
    """Observed vs fitted-normal distribution of gradient responses."""

    p: np.ndarray
    q: np.ndarray
    mu: float
    variance: float
    edges: np.ndarray
    n_retained: int


def gradient_distribution(
    image: np.ndarray, detection_threshold: float = DEFAULT_THRESHOLD
) -> Optional[GradientDistribution]:
    """Histogram suprathreshold gradient responses against a fitted normal.

    Channels are scaled to [0, 1]; central differences at interior
    pixels give a combined stimulus S, and responses R = S/T0 with
    R <= 1 are discarded.  Returns None when fewer than two responses
    survive or they are all equal (degenerate; the measure is 0 then).

    q is the fitted Normal(mu, variance) integrated over the same bin
    edges; empty q bins facing nonempty p bins are floored at 1e-12
    before renormalization so the divergence stays finite.
    """
    scaled = image.astype(np.float64) / 255.0
    stimulus = kernels.gradient_stimulus(scaled)
    responses = stimulus.ravel() / detection_threshold
    retained = responses[responses > 1.0]
    if retained.size < 2:
        return None
    lo = float(retained.min())
    hi = float(retained.max())
    if lo == hi:
        return None
    counts, edges = np.histogram(retained, bins=100, range=(lo, hi))
    p = counts / retained.size
    mu = float(retained.mean())
    variance = float(retained.var())
    sigma = math.sqrt(variance)
    denom = sigma * math.sqrt(2.0)
    cdf = np.array([0.5 * (1.0 + math.erf((e - mu) / denom)) for e in edges])
    q = np.diff(cdf)
    q[(q == 0.0) & (p > 0.0)] = 1e-12
    q = q / q.sum()
    return GradientDistribution(
        p=p, q=q, mu=mu, variance=variance, edges=edges, n_retained=int(retained.size)
    )


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """Discrete KL divergence sum(p * ln(p/q)) over bins with p > 0."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    mask = p > 0.0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def bell_curve_measure(
    image: np.ndarray, detection_threshold: float = DEFAULT_THRESHOLD
) -> float:
    """RRZ: KL divergence of gradient responses from their fitted normal.

    Degenerate gradient distributions (flat images) give 0 by
    convention.  The value is not amplified by any factor.
    """
    dist = gradient_distribution(image, detection_threshold)
    if dist is None:
        return 0.0
    # KL >= 0 by Gibbs' inequality; clamp float residue near zero
    return max(0.0, kl_divergence(dist.p, dist.q))


@dataclass(frozen=True)
class BoxCountResult:
    """Box-counting regression: sizes, occupied counts, slope, fit quality."""

    sizes: tuple[int, ...]
    counts: tuple[int, ...]
    d: float
    r_squared: float


def fractal_dimension(
    image: np.ndarray, background: tuple[int, int, int] = (255, 255, 255)
) -> BoxCountResult:
    """Box-counting dimension of the non-background pixel set.

    Foreground is every pixel differing from the background color in
    any channel.  Counts over box sizes 256..2 are fitted by least
    squares in log-log space.
    """
    if image.shape[0] != 512 or image.shape[1] != 512:
        raise ValueError("box counting expects a 512x512 image")
    bg = np.array(background, dtype=np.uint8)
    foreground = np.any(image != bg, axis=2)
    if not foreground.any():
        raise UndefinedDimensionError("image has no foreground pixels")
    counts = [kernels.box_occupancy(foreground, size) for size in BOX_SIZES]
    x = np.log(1.0 / np.array(BOX_SIZES, dtype=np.float64))
    y = np.log(np.array(counts, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return BoxCountResult(
        sizes=BOX_SIZES, counts=tuple(int(c) for c in counts),
        d=float(slope), r_squared=r_squared,
    )


def frd_measure(d: float) -> float:
    """FRD: max(0, 1 - |1.35 - d|)."""
    return max(0.0, 1.0 - abs(1.35 - d))


@dataclass(frozen=True)
class MeasureReport:
    """The three measures plus the intermediates worth logging."""

    bfl: float
    rrz: float
    frd: float
    d: Optional[float]
    r_squared: Optional[float]
    detection_threshold: float
    background: tuple[int, int, int]
    frd_defined: bool

    def value(self, measure: str) -> float:
        return {"bfl": self.bfl, "rrz": self.rrz, "frd": self.frd}[measure.lower()]

    def to_dict(self) -> dict:
        return {
            "bfl": self.bfl,
            "rrz": self.rrz,
            "frd": self.frd,
            "d": self.d,
            "r_squared": self.r_squared,
            "detection_threshold": self.detection_threshold,
            "background": list(self.background),
            "frd_defined": self.frd_defined,
        }


def measure_all(
    image: np.ndarray,
    background: tuple[int, int, int] = (255, 255, 255),
    detection_threshold: float = DEFAULT_THRESHOLD,
) -> MeasureReport:
    """All three measures on one image.

    An all-background image has no fractal dimension; FRD is reported
    as 0 with frd_defined False and d, r_squared left empty.
    """
    bfl = benford_measure(image)
    rrz = bell_curve_measure(image, detection_threshold)
    try:
        box = fractal_dimension(image, background)
        frd = frd_measure(box.d)
        return MeasureReport(
            bfl=bfl, rrz=rrz, frd=frd, d=box.d, r_squared=box.r_squared,
            detection_threshold=detection_threshold, background=tuple(background),
            frd_defined=True,
        )
    except UndefinedDimensionError:
        return MeasureReport(
            bfl=bfl, rrz=rrz, frd=0.0, d=None, r_squared=None,
            detection_threshold=detection_threshold, background=tuple(background),
            frd_defined=False,
        )


MEASURE_CSV_HEADER = "image_id,BFL,RRZ,FRD,d,R2,T0,background"


def measure_csv_row(image_id: str, report: MeasureReport) -> str:
    """One CSV row matching MEASURE_CSV_HEADER; empty cells for undefined."""
    d = "" if report.d is None else repr(report.d)
    r2 = "" if report.r_squared is None else repr(report.r_squared)
    bg = ":".join(str(c) for c in report.background)
    return (
        f"{image_id},{report.bfl!r},{report.rrz!r},{report.frd!r},"
        f"{d},{r2},{report.detection_threshold!r},{bg}"
    )
