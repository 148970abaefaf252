"""Command-line harness: generate, measure, sweep, build-table, guided.

Exit codes: 0 success, 2 bad config/parameters, 3 I/O failure,
4 image dimension mismatch.  Every artifact-producing command writes a
JSON sidecar echoing the fully resolved configuration, so a run can be
reproduced from its outputs alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .guidance import (
    LookupTable,
    Expectation,
    MEASURE_IDS,
    build_lookup_table,
    calibrate_expectations,
    guided_generate,
)
from .measures import (
    DEFAULT_THRESHOLD,
    MEASURE_CSV_HEADER,
    measure_all,
    measure_csv_row,
)
from .params import DesignParams, InvalidParameterError, Template
from .pattern import generate_pattern
from .png_io import read_png, write_png
from .raster import CanvasSpec, Palette, rasterize
from .seeds import child_rng, child_seed
from .sweep import (
    DESK_M,
    DESK_N,
    PAPER_M,
    PAPER_N,
    parse_sweep_csv,
    run_sweep,
    sample_measures,
    sweep_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DIMENSION = 4

DEFAULT_SEED = 0
DEFAULT_MAX_BURROWS = 6

COMPARISON_CSV_HEADER = "variant,measure,mean,std,n,m"


class DimensionMismatch(Exception):
    pass


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidParameterError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InvalidParameterError(f"config {path} must hold a JSON object")
    return cfg


class Resolved:
    """Config file merged with CLI flags; flags win."""

    def __init__(self, ns: argparse.Namespace):
        cfg = _load_config(getattr(ns, "config", None))
        self.raw = cfg
        self.params = DesignParams.from_dict(cfg.get("params", {}))
        if getattr(ns, "template", None):
            self.params = self.params.with_template(Template.from_string(ns.template))
        self.canvas = CanvasSpec.from_dict(cfg.get("canvas", {}))
        self.palette = Palette.from_dict(cfg.get("palette", {}))
        seed = getattr(ns, "seed", None)
        if seed is None:
            seed = cfg.get("seed", DEFAULT_SEED)
        self.seed = int(seed)
        n = getattr(ns, "n", None)
        m = getattr(ns, "m", None)
        if getattr(ns, "paper_scale", False):
            n = n if n is not None else PAPER_N
            m = m if m is not None else PAPER_M
        self.n = int(n) if n is not None else int(cfg.get("n", DESK_N))
        self.m = int(m) if m is not None else int(cfg.get("m", DESK_M))
        if self.n < 1 or self.m < 1:
            raise InvalidParameterError("n and m must be >= 1")
        out = getattr(ns, "out", None) or cfg.get("out") or "."
        self.out = Path(out)
        self.count = int(getattr(ns, "count", None) or cfg.get("count", 1))
        if self.count < 1:
            raise InvalidParameterError("count must be >= 1")
        self.max_burrows = int(cfg.get("max_burrows", DEFAULT_MAX_BURROWS))
        self.workers = int(cfg.get("workers", 1))
        self.threshold = float(cfg.get("detection_threshold", DEFAULT_THRESHOLD))
        self.table_path = Path(cfg.get("table", "table.json"))
        self.sweep_csv_path = cfg.get("sweep_csv")
        self.measure = getattr(ns, "measure", None)

    def echo(self, **extra) -> dict:
        out = {
            "seed": self.seed,
            "params": self.params.to_dict(),
            "canvas": self.canvas.to_dict(),
            "palette": self.palette.to_dict(),
            "n": self.n,
            "m": self.m,
            "max_burrows": self.max_burrows,
            "detection_threshold": self.threshold,
        }
        out.update(extra)
        return out


def _ensure_outdir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write_probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {path} is not writable: {exc}") from exc


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _json_dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def cmd_generate(ns: argparse.Namespace) -> int:
    cfg = Resolved(ns)
    _ensure_outdir(cfg.out)
    for k in range(cfg.count):
        pattern_seed = child_seed(cfg.seed, k)
        pattern = generate_pattern(cfg.params, pattern_seed)
        image = rasterize(pattern, cfg.canvas, cfg.palette)
        stem = f"img{k:03d}_{pattern_seed}"
        write_png(cfg.out / f"{stem}.png", image)
        sidecar = cfg.echo(
            run_id=f"img{k:03d}",
            pattern_seed=int(pattern_seed),
            pattern=pattern.to_dict(),
        )
        _write_text(cfg.out / f"{stem}.json", _json_dumps(sidecar))
        print(f"wrote {cfg.out / stem}.png")
    return EXIT_OK


def cmd_measure(ns: argparse.Namespace) -> int:
    cfg = Resolved(ns)
    rows = [MEASURE_CSV_HEADER]
    code = EXIT_OK
    for path in ns.images:
        try:
            image = read_png(path)
        except OSError as exc:
            print(f"error: cannot read {path}: {exc}", file=sys.stderr)
            rows.append(f"{path},,,,,,,")
            code = EXIT_IO
            continue
        if image.shape != (cfg.canvas.height, cfg.canvas.width, 3):
            print(
                f"error: {path} has dimensions {image.shape[1]}x{image.shape[0]}, "
                f"expected {cfg.canvas.width}x{cfg.canvas.height}",
                file=sys.stderr,
            )
            rows.append(f"{path},,,,,,,")
            if code == EXIT_OK:
                code = EXIT_DIMENSION
            continue
        report = measure_all(
            image,
            background=cfg.canvas.background,
            detection_threshold=cfg.threshold,
        )
        rows.append(measure_csv_row(path, report))
    text = "\n".join(rows) + "\n"
    if getattr(ns, "out", None):
        _ensure_outdir(cfg.out)
        _write_text(cfg.out / "measures.csv", text)
        print(f"wrote {cfg.out / 'measures.csv'}")
    else:
        sys.stdout.write(text)
    return code


def cmd_sweep(ns: argparse.Namespace) -> int:
    cfg = Resolved(ns)
    _ensure_outdir(cfg.out)
    templates: Sequence[Template] = tuple(Template)
    if getattr(ns, "template", None):
        templates = (Template.from_string(ns.template),)
    base = DesignParams.from_dict(cfg.raw.get("params", {}))
    rows = run_sweep(
        n=cfg.n,
        m=cfg.m,
        master_seed=cfg.seed,
        grids=cfg.raw.get("grids"),
        templates=templates,
        base=base,
        canvas=cfg.canvas,
        palette=cfg.palette,
        detection_threshold=cfg.threshold,
        workers=cfg.workers,
    )
    _write_text(cfg.out / "sweep.csv", sweep_csv(rows))
    sidecar = cfg.echo(templates=[t.value for t in templates], rows=len(rows))
    _write_text(cfg.out / "sweep.json", _json_dumps(sidecar))
    print(f"wrote {cfg.out / 'sweep.csv'} ({len(rows)} rows)")
    return EXIT_OK


def cmd_build_table(ns: argparse.Namespace) -> int:
    cfg = Resolved(ns)
    _ensure_outdir(cfg.out)
    if cfg.sweep_csv_path:
        try:
            text = Path(cfg.sweep_csv_path).read_text()
        except OSError as exc:
            raise OSError(f"cannot read sweep CSV {cfg.sweep_csv_path}: {exc}") from exc
        rows = parse_sweep_csv(text)
    else:
        rows = run_sweep(
            n=cfg.n,
            m=cfg.m,
            master_seed=cfg.seed,
            base=cfg.params,
            canvas=cfg.canvas,
            palette=cfg.palette,
            detection_threshold=cfg.threshold,
            workers=cfg.workers,
        )
    table = build_lookup_table(rows)
    expectations = {}
    for measure in MEASURE_IDS:
        exp = calibrate_expectations(
            measure,
            [cfg.params],
            cfg.n,
            cfg.m,
            cfg.seed,
            canvas=cfg.canvas,
            palette=cfg.palette,
            detection_threshold=cfg.threshold,
        )
        expectations[measure] = exp.to_dict()
    payload = {
        "table": table.to_dict(),
        "expectations": expectations,
        "calibration": cfg.echo(),
    }
    out_path = cfg.out / "table.json"
    _write_text(out_path, _json_dumps(payload))
    flagged = ", ".join(table.flagged) if table.flagged else "none"
    print(f"wrote {out_path} (flagged measures: {flagged})")
    return EXIT_OK


def _load_table(cfg: Resolved) -> tuple[LookupTable, dict[str, Expectation]]:
    path = cfg.table_path
    if not path.exists():
        raise InvalidParameterError(
            f"lookup table {path} not found; run `sandbubbler sweep` and "
            "`sandbubbler build-table` first"
        )
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParameterError(f"cannot load table {path}: {exc}") from exc
    table = LookupTable.from_dict(payload["table"])
    expectations = {
        m: Expectation(
            measure=m,
            value=float(d["value"]),
            sample_size=int(d["sample_size"]),
        )
        for m, d in payload["expectations"].items()
    }
    return table, expectations


def cmd_guided(ns: argparse.Namespace) -> int:
    cfg = Resolved(ns)
    _ensure_outdir(cfg.out)
    table, expectations = _load_table(cfg)
    guided_measures = (
        (cfg.measure,) if cfg.measure else MEASURE_IDS
    )
    template_list = tuple(Template)
    lines = [COMPARISON_CSV_HEADER]
    for v_idx, measure in enumerate(MEASURE_IDS):
        if measure not in guided_measures:
            continue
        expectation = expectations[measure]
        collected = {mid: [] for mid in MEASURE_IDS}
        exemplar_done = False
        for i in range(cfg.n):
            for h in range(cfg.m):
                run_seed = child_seed(cfg.seed, 1000 + v_idx, i, h)
                aux = child_rng(cfg.seed, 1000 + v_idx, i, h, 0)
                hue = float(aux.uniform())
                initial = cfg.params.with_template(
                    template_list[int(aux.integers(len(template_list)))]
                )
                pattern, image, log = guided_generate(
                    initial,
                    measure,
                    table,
                    expectation,
                    cfg.max_burrows,
                    cfg.canvas,
                    replace(cfg.palette, base_hue=hue),
                    run_seed,
                    detection_threshold=cfg.threshold,
                )
                report = measure_all(
                    image,
                    background=cfg.canvas.background,
                    detection_threshold=cfg.threshold,
                )
                for mid in MEASURE_IDS:
                    collected[mid].append(report.value(mid))
                if not exemplar_done:
                    stem = f"gc_{measure}_{run_seed}"
                    write_png(cfg.out / f"{stem}.png", image)
                    _write_text(cfg.out / f"{stem}_control.csv", log.to_csv())
                    _write_text(cfg.out / f"{stem}_control.txt", log.to_text())
                    exemplar_done = True
        for mid in MEASURE_IDS:
            vals = np.asarray(collected[mid])
            lines.append(
                f"gc_{measure},{mid},{float(vals.mean())!r},"
                f"{float(vals.std())!r},{cfg.n},{cfg.m}"
            )
    budget_params = replace(cfg.params, num_burrows=cfg.max_burrows)
    for t_idx, template in enumerate(template_list):
        samples = sample_measures(
            replace(budget_params, template=template),
            cfg.canvas,
            cfg.palette,
            cfg.n,
            cfg.m,
            cfg.seed,
            (2000 + t_idx,),
            detection_threshold=cfg.threshold,
        )
        for mid in MEASURE_IDS:
            vals = samples[mid]
            lines.append(
                f"{template.value},{mid},{float(vals.mean())!r},"
                f"{float(vals.std())!r},{cfg.n},{cfg.m}"
            )
    _write_text(cfg.out / "comparison.csv", "\n".join(lines) + "\n")
    sidecar = cfg.echo(
        table=str(cfg.table_path),
        guided=list(guided_measures),
    )
    _write_text(cfg.out / "guided.json", _json_dumps(sidecar))
    print(f"wrote {cfg.out / 'comparison.csv'}")
    return EXIT_OK


def _add_common(sub: argparse.ArgumentParser, *, seed=True, out=True) -> None:
    if seed:
        sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--config", type=str, default=None, metavar="PATH")
    if out:
        sub.add_argument("--out", type=str, default=None, metavar="DIR")


def _add_scale(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--n", type=int, default=None)
    sub.add_argument("--m", type=int, default=None)
    sub.add_argument("--paper-scale", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandbubbler",
        description="Sand-bubbler-crab-inspired generative art toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("generate", help="render seeded patterns to PNG")
    _add_common(p)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--template", choices=[t.value for t in Template], default=None)
    p.set_defaults(func=cmd_generate)

    p = subs.add_parser("measure", help="compute measures for PNG images")
    p.add_argument("images", nargs="+", metavar="PNG")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_measure)

    p = subs.add_parser("sweep", help="run the parameter sweep grid")
    _add_common(p)
    _add_scale(p)
    p.add_argument("--template", choices=[t.value for t in Template], default=None)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("build-table", help="distill a sweep into a lookup table")
    _add_common(p)
    _add_scale(p)
    p.set_defaults(func=cmd_build_table)

    p = subs.add_parser("guided", help="guided generation vs plain templates")
    _add_common(p)
    _add_scale(p)
    p.add_argument("--measure", choices=list(MEASURE_IDS), default=None)
    p.set_defaults(func=cmd_guided)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except InvalidParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
