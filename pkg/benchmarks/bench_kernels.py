"""Kernel backend benchmark: numba versus the pure-numpy fallback.

Times the three hot kernels on representative workloads and a full
render-and-measure pipeline pass, asserting along the way that both
backends return identical results.  Run directly:

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from sandbubbler import kernels
from sandbubbler.kernels import _numba, _numpy
from sandbubbler.params import DesignParams
from sandbubbler.pattern import generate_pattern
from sandbubbler.raster import CanvasSpec, Palette
from sandbubbler import raster
from sandbubbler.measures import measure_all


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_stamp(repeat):
    rng = np.random.default_rng(0)
    n = 5000
    cx = rng.integers(-30, 542, size=n).astype(np.int64)
    cy = rng.integers(-30, 542, size=n).astype(np.int64)
    colors = rng.integers(0, 256, size=(n, 3), dtype=np.uint8)
    base = np.zeros((512, 512, 3), dtype=np.uint8)

    images = {}
    times = {}
    for name, impl in (("numpy", _numpy), ("numba", _numba)):
        def run(impl=impl):
            img = base.copy()
            impl.stamp_discs(img, cx, cy, 28, colors)
            images[name] = img

        run()  # warm-up compiles the jitted version
        times[name] = timeit(run, repeat)
    assert np.array_equal(images["numpy"], images["numba"])
    return "stamp_discs (5000 discs, r=28)", times


def bench_gradient(repeat):
    rng = np.random.default_rng(1)
    scaled = rng.random((512, 512, 3))
    results = {}
    times = {}
    for name, impl in (("numpy", _numpy), ("numba", _numba)):
        def run(impl=impl, name=name):
            results[name] = impl.gradient_stimulus(scaled)

        run()
        times[name] = timeit(run, repeat)
    assert np.array_equal(results["numpy"], results["numba"])
    return "gradient_stimulus (512x512x3)", times


def bench_boxes(repeat):
    rng = np.random.default_rng(2)
    fg = rng.random((512, 512)) < 0.2
    sizes = (256, 128, 64, 32, 16, 8, 4, 2)
    results = {}
    times = {}
    for name, impl in (("numpy", _numpy), ("numba", _numba)):
        def run(impl=impl, name=name):
            results[name] = [impl.box_occupancy(fg, s) for s in sizes]

        run()
        times[name] = timeit(run, repeat)
    assert results["numpy"] == results["numba"]
    return "box_occupancy (8 grid sizes)", times


def bench_pipeline(repeat):
    # raster and measures share the kernels module, so swapping its
    # attributes switches the whole pipeline between backends
    pattern = generate_pattern(DesignParams(num_burrows=6), 7)
    spec = CanvasSpec()
    palette = Palette()
    images = {}
    times = {}
    saved = (kernels.stamp_discs, kernels.gradient_stimulus, kernels.box_occupancy)
    try:
        for name, impl in (("numpy", _numpy), ("numba", _numba)):
            kernels.stamp_discs = impl.stamp_discs
            kernels.gradient_stimulus = impl.gradient_stimulus
            kernels.box_occupancy = impl.box_occupancy

            def run(name=name):
                img = raster.rasterize(pattern, spec, palette)
                measure_all(img, background=spec.background)
                images[name] = img

            run()
            times[name] = timeit(run, repeat)
    finally:
        kernels.stamp_discs, kernels.gradient_stimulus, kernels.box_occupancy = saved
    assert np.array_equal(images["numpy"], images["numba"])
    return "render + all measures (6 burrows)", times


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions, best-of (default 5)")
    args = parser.parse_args()

    print(f"{'workload':<36} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for bench in (bench_stamp, bench_gradient, bench_boxes, bench_pipeline):
        label, times = bench(args.repeat)
        ratio = times["numpy"] / times["numba"]
        print(
            f"{label:<36} {times['numpy'] * 1e3:>8.1f}ms "
            f"{times['numba'] * 1e3:>8.1f}ms {ratio:>7.1f}x"
        )
    print("\nall backend outputs verified identical")


if __name__ == "__main__":
    main()
