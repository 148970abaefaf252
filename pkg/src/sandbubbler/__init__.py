"""Sand-bubbler-crab-inspired generative art.

Stochastic radial pellet patterns, rendered to 512x512 RGB images and
scored by three computational aesthetic measures (BFL, RRZ, FRD); a
feedback loop steers generation toward a chosen measure.
"""

from .params import DesignParams, InvalidParameterError, Template
from .pattern import (
    BurrowPattern,
    Pattern,
    Pellet,
    Trench,
    generate_burrow,
    generate_pattern,
    pellet_location,
    radial_coordinates,
    sample_trench_length,
    trench_angles,
)
from .raster import CanvasSpec, Palette, colorize, hsv_to_rgb, rasterize, world_to_pixel
from .measures import (
    BoxCountResult,
    GradientDistribution,
    MeasureReport,
    UndefinedDimensionError,
    bell_curve_measure,
    benford_measure,
    fractal_dimension,
    frd_measure,
    gradient_distribution,
    kl_divergence,
    luminosity,
    measure_all,
)
from .png_io import png_bytes, read_png, write_png
from .seeds import child_rng, child_seed
from .guidance import (
    Action,
    ActionKind,
    ControlLog,
    ControlRecord,
    Expectation,
    LookupTable,
    build_lookup_table,
    calibrate_expectations,
    guided_generate,
)
from .sweep import SweepRow, parse_sweep_csv, run_sweep, sample_measures, sweep_csv

__version__ = "0.1.0"

__all__ = [
    "DesignParams",
    "InvalidParameterError",
    "Template",
    "Pellet",
    "Trench",
    "BurrowPattern",
    "Pattern",
    "pellet_location",
    "trench_angles",
    "radial_coordinates",
    "sample_trench_length",
    "generate_burrow",
    "generate_pattern",
    "CanvasSpec",
    "Palette",
    "world_to_pixel",
    "hsv_to_rgb",
    "colorize",
    "rasterize",
    "luminosity",
    "benford_measure",
    "gradient_distribution",
    "kl_divergence",
    "bell_curve_measure",
    "fractal_dimension",
    "frd_measure",
    "measure_all",
    "MeasureReport",
    "GradientDistribution",
    "BoxCountResult",
    "UndefinedDimensionError",
    "png_bytes",
    "read_png",
    "write_png",
    "child_seed",
    "child_rng",
    "Action",
    "ActionKind",
    "ControlLog",
    "ControlRecord",
    "Expectation",
    "LookupTable",
    "build_lookup_table",
    "calibrate_expectations",
    "guided_generate",
    "SweepRow",
    "run_sweep",
    "sample_measures",
    "sweep_csv",
    "parse_sweep_csv",
    "__version__",
]
