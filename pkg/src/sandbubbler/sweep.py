"""Parameter sweeps over templates, densities, and noise levels.

A sweep cell fixes one template, one value of one swept parameter, and
one noise variance, then averages each measure over n seeded patterns
rendered at m random base hues.  Cell seeds derive from a master seed
and the cell's grid position, so results are independent of execution
order and reproducible run to run.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .measures import DEFAULT_THRESHOLD, measure_all
from .params import DesignParams, InvalidParameterError, Template
from .pattern import generate_pattern
from .raster import CanvasSpec, Palette, rasterize
from .seeds import child_rng, child_seed

# paper-range grids; each includes the parameter's default value
DEFAULT_GRIDS: dict[str, tuple[float, ...]] = {
    "num_burrows": (2, 3, 6, 10),
    "max_trenches": (20, 50, 100),
    "pellet_distance": (0.05, 0.25, 1.0),
}

NOISE_VARIANCES = (0.3, 0.8)

DESK_N, DESK_M = 20, 10
PAPER_N, PAPER_M = 100, 70

SWEEP_CSV_HEADER = "template,parameter,value,noise_variance,measure,mean,std,n,m"


@dataclass(frozen=True)
class SweepRow:
    template: str
    parameter: str
    value: float
    noise_variance: float
    measure: str
    mean: float
    std: float
    n: int
    m: int

    def sort_key(self) -> tuple:
        return (
            self.parameter,
            self.value,
            self.template,
            self.noise_variance,
            self.measure,
        )

    def to_csv(self) -> str:
        return (
            f"{self.template},{self.parameter},{self.value!r},"
            f"{self.noise_variance!r},{self.measure},{self.mean!r},"
            f"{self.std!r},{self.n},{self.m}"
        )

    @classmethod
    def from_csv(cls, line: str) -> "SweepRow":
        parts = line.rstrip("\n").split(",")
        if len(parts) != 9:
            raise InvalidParameterError(f"malformed sweep row: {line!r}")
        return cls(
            template=parts[0],
            parameter=parts[1],
            value=float(parts[2]),
            noise_variance=float(parts[3]),
            measure=parts[4],
            mean=float(parts[5]),
            std=float(parts[6]),
            n=int(parts[7]),
            m=int(parts[8]),
        )


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    lines = [SWEEP_CSV_HEADER]
    lines.extend(r.to_csv() for r in rows)
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> list[SweepRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_CSV_HEADER:
        raise InvalidParameterError("not a sweep CSV (bad header)")
    return [SweepRow.from_csv(ln) for ln in lines[1:]]


def sample_measures(
    params: DesignParams,
    canvas: CanvasSpec,
    palette: Palette,
    n: int,
    m: int,
    master_seed: int,
    path: tuple[int, ...],
    detection_threshold: float = DEFAULT_THRESHOLD,
) -> dict[str, np.ndarray]:
    """n seeded patterns x m random base hues -> per-measure sample arrays.

    Pattern i uses seed child(master, *path, i); its hue h comes from
    child(master, *path, i, h).  The same protocol backs sweeps,
    expectation calibration, and the density experiments, so their
    numbers are directly comparable.
    """
    if n < 1 or m < 1:
        raise InvalidParameterError("n and m must be >= 1")
    out = {"bfl": [], "rrz": [], "frd": []}
    for i in range(n):
        pattern = generate_pattern(params, child_seed(master_seed, *path, i))
        for h in range(m):
            hue = float(child_rng(master_seed, *path, i, h).uniform())
            image = rasterize(pattern, canvas, replace(palette, base_hue=hue))
            report = measure_all(
                image,
                background=canvas.background,
                detection_threshold=detection_threshold,
            )
            out["bfl"].append(report.bfl)
            out["rrz"].append(report.rrz)
            out["frd"].append(report.frd)
    return {k: np.asarray(v) for k, v in out.items()}


def _cell_rows(job) -> list[SweepRow]:
    (p_idx, v_idx, t_idx, s_idx, param, value, template, noise, base, canvas,
     palette, n, m, master, threshold) = job
    cfg = replace(
        base,
        template=template,
        noise_variance=noise,
        **{param: int(value) if param != "pellet_distance" else value},
    )
    samples = sample_measures(
        cfg, canvas, palette, n, m, master,
        (p_idx, v_idx, t_idx, s_idx),
        detection_threshold=threshold,
    )
    rows = []
    for measure in ("bfl", "rrz", "frd"):
        vals = samples[measure]
        rows.append(
            SweepRow(
                template=template.value,
                parameter=param,
                value=float(value),
                noise_variance=float(noise),
                measure=measure,
                mean=float(vals.mean()),
                std=float(vals.std()),
                n=n,
                m=m,
            )
        )
    return rows


def run_sweep(
    n: int = DESK_N,
    m: int = DESK_M,
    master_seed: int = 0,
    grids: Optional[dict[str, Sequence[float]]] = None,
    templates: Sequence[Template] = tuple(Template),
    noise_variances: Sequence[float] = NOISE_VARIANCES,
    base: Optional[DesignParams] = None,
    canvas: Optional[CanvasSpec] = None,
    palette: Optional[Palette] = None,
    detection_threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> list[SweepRow]:
    """Full grid sweep; rows come back sorted by grid key.

    Cell seeds are derived from the cell's grid indices, so any worker
    count (or restricted template list) reproduces the same rows for
    the same master seed.
    """
    grids = {k: tuple(v) for k, v in (grids or DEFAULT_GRIDS).items()}
    for name in grids:
        if name not in DEFAULT_GRIDS:
            raise InvalidParameterError(f"unsupported sweep parameter {name!r}")
    base = base or DesignParams()
    canvas = canvas or CanvasSpec()
    palette = palette or Palette()
    jobs = []
    grid_names = sorted(DEFAULT_GRIDS)  # stable p_idx even for partial grids
    for param, values in sorted(grids.items()):
        p_idx = grid_names.index(param)
        for v_idx, value in enumerate(values):
            for template in templates:
                t_idx = list(Template).index(template)
                for s_idx, noise in enumerate(noise_variances):
                    jobs.append(
                        (p_idx, v_idx, t_idx, s_idx, param, value, template,
                         noise, base, canvas, palette, n, m, master_seed,
                         detection_threshold)
                    )
    rows: list[SweepRow] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell in pool.map(_cell_rows, jobs):
                rows.extend(cell)
    else:
        for job in jobs:
            rows.extend(_cell_rows(job))
    rows.sort(key=SweepRow.sort_key)
    return rows
