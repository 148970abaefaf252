"""Feedback-loop tests: actions, lookup table, expectations, guided runs."""

import json
import math

import numpy as np
import pytest

from sandbubbler import (
    Action,
    ActionKind,
    CanvasSpec,
    DesignParams,
    Expectation,
    InvalidParameterError,
    LookupTable,
    Palette,
    Template,
    build_lookup_table,
    calibrate_expectations,
    generate_pattern,
    guided_generate,
    rasterize,
)
from sandbubbler.guidance import MEASURE_IDS, PARAMETER_STEPS
from sandbubbler.measures import measure_all
from sandbubbler.seeds import child_rng, child_seed
from sandbubbler.sweep import SweepRow, sample_measures

CANVAS = CanvasSpec()
PALETTE = Palette()


def make_rows(means, n=4, m=2, noise=(0.3, 0.8)):
    """Synthetic sweep rows: means maps (template, param, value, measure)."""
    rows = []
    grids = {
        "num_burrows": (2, 3, 6, 10),
        "max_trenches": (20, 50, 100),
        "pellet_distance": (0.05, 0.25, 1.0),
    }
    for param, values in grids.items():
        for value in values:
            for tpl in ("rtl", "gtl", "ccr", "btg"):
                for nv in noise:
                    for measure in MEASURE_IDS:
                        mean = means((tpl, param, value, measure))
                        rows.append(
                            SweepRow(
                                template=tpl,
                                parameter=param,
                                value=float(value),
                                noise_variance=nv,
                                measure=measure,
                                mean=mean,
                                std=0.01,
                                n=n,
                                m=m,
                            )
                        )
    return rows


class TestAction:
    def test_switch_template_apply(self):
        act = Action(ActionKind.SWITCH_TEMPLATE, template=Template.BTG)
        out = act.apply(DesignParams(template=Template.RTL))
        assert out.template is Template.BTG
        assert act.describe() == "switch_template:btg"

    def test_scale_step_clamps_at_floor(self):
        act = Action(
            ActionKind.SET_PARAMETER, name="max_trenches", scale=0.5, lower=1.0
        )
        p = DesignParams(max_trenches=5)
        p = act.apply(p)
        assert p.max_trenches == 2  # 2.5 rounds half to even
        for _ in range(6):
            p = act.apply(p)
        assert p.max_trenches == 1

    def test_delta_step_clamps_at_ceiling(self):
        act = Action(
            ActionKind.SET_PARAMETER, name="pellet_distance", delta=0.1, upper=1.0
        )
        p = DesignParams(pellet_distance=0.85)
        p = act.apply(p)
        assert p.pellet_distance == pytest.approx(0.95)
        p = act.apply(act.apply(p))
        assert p.pellet_distance == 1.0

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            Action(ActionKind.SWITCH_TEMPLATE)  # missing template
        with pytest.raises(InvalidParameterError):
            Action(ActionKind.SET_PARAMETER, name="nope", delta=1.0)
        with pytest.raises(InvalidParameterError):
            Action(ActionKind.SET_PARAMETER, name="max_trenches")
        with pytest.raises(InvalidParameterError):
            Action(ActionKind.SET_PARAMETER, name="max_trenches", scale=2.0, delta=1.0)

    def test_dict_round_trip(self):
        acts = [
            Action(ActionKind.SWITCH_TEMPLATE, template=Template.CCR),
            Action(ActionKind.SET_PARAMETER, name="num_burrows", delta=-1.0, lower=2.0),
            Action(ActionKind.SET_PARAMETER, name="max_trenches", scale=2.0, upper=100.0),
        ]
        for act in acts:
            assert Action.from_dict(act.to_dict()) == act

    def test_catalog_covers_swept_parameters_both_ways(self):
        for name in ("max_trenches", "pellet_distance", "num_burrows"):
            assert (name, "down") in PARAMETER_STEPS
            assert (name, "up") in PARAMETER_STEPS


class TestLookupTable:
    def test_json_round_trip(self):
        table = LookupTable(
            entries={
                "bfl": (Action(ActionKind.SWITCH_TEMPLATE, template=Template.BTG),),
                "rrz": (),
            },
            deltas={"bfl": (0.12,), "rrz": ()},
            flagged=("rrz",),
        )
        again = LookupTable.from_dict(json.loads(table.to_json()))
        assert again == table
        assert again.entry("BFL") == table.entries["bfl"]
        assert again.entry("frd") == ()

    def test_dominant_template_becomes_switch_action(self):
        def means(key):
            tpl, param, value, measure = key
            if measure == "bfl":
                return 0.8 if tpl == "btg" else 0.4
            return 0.5  # flat elsewhere: no improving action

        table = build_lookup_table(make_rows(means))
        bfl = table.entry("bfl")
        assert len(bfl) == 1
        assert bfl[0] == Action(ActionKind.SWITCH_TEMPLATE, template=Template.BTG)
        assert table.deltas["bfl"][0] == pytest.approx(0.4)
        assert set(table.flagged) == {"rrz", "frd"}

    def test_parameter_direction_maps_to_catalog_step(self):
        def means(key):
            tpl, param, value, measure = key
            if measure == "rrz" and tpl == "rtl" and param == "max_trenches":
                return {20: 0.9, 50: 0.5, 100: 0.2}[value]
            return 0.5

        table = build_lookup_table(make_rows(means))
        rrz = table.entry("rrz")
        assert rrz == (
            Action(ActionKind.SET_PARAMETER, name="max_trenches", scale=0.5, lower=1.0),
        )

    def test_all_improving_actions_kept_sorted_by_delta(self):
        def means(key):
            tpl, param, value, measure = key
            if measure != "frd":
                return 0.5
            if tpl == "btg":
                return 0.9
            if tpl == "rtl" and param == "pellet_distance" and value == 1.0:
                return 0.7
            return 0.5

        table = build_lookup_table(make_rows(means))
        described = [a.describe() for a in table.entry("frd")]
        assert described == [
            "switch_template:btg",
            "set_parameter:pellet_distance+0.1",
        ]
        assert list(table.deltas["frd"]) == pytest.approx([0.4, 0.2])

    def test_exact_tie_flags_measure(self):
        table = build_lookup_table(make_rows(lambda key: 0.5))
        assert set(table.flagged) == set(MEASURE_IDS)
        for measure in MEASURE_IDS:
            assert table.entry(measure) == ()

    def test_matches_brute_force_selection(self):
        """Entries equal an exhaustive comparison of sweep means."""
        rng = np.random.default_rng(123)
        values = {}

        def means(key):
            return values.setdefault(key, float(rng.uniform(0, 1)))

        rows = make_rows(means)
        table = build_lookup_table(rows)
        defaults = DesignParams()
        at_default = {
            (r.template, r.parameter, r.value, r.measure): r.mean
            for r in rows
            if r.noise_variance == defaults.noise_variance
        }
        for measure in MEASURE_IDS:
            baseline = np.mean(
                [
                    at_default[("rtl", p, float(getattr(defaults, p)), measure)]
                    for p in ("num_burrows", "max_trenches", "pellet_distance")
                ]
            )
            expected = set()
            for tpl in ("gtl", "ccr", "btg"):
                mean = np.mean(
                    [
                        at_default[(tpl, p, float(getattr(defaults, p)), measure)]
                        for p in ("num_burrows", "max_trenches", "pellet_distance")
                    ]
                )
                if mean > baseline:
                    expected.add(f"switch_template:{tpl}")
            for param, grid in (
                ("num_burrows", (2, 3, 6, 10)),
                ("max_trenches", (20, 50, 100)),
                ("pellet_distance", (0.05, 0.25, 1.0)),
            ):
                better = [
                    (at_default[("rtl", param, float(v), measure)], v)
                    for v in grid
                    if v != getattr(defaults, param)
                    and at_default[("rtl", param, float(v), measure)] > baseline
                ]
                if better:
                    _, best_value = max(better)
                    direction = "down" if best_value < getattr(defaults, param) else "up"
                    step = PARAMETER_STEPS[(param, direction)]
                    step_txt = (
                        f"*{step['scale']:g}"
                        if "scale" in step
                        else f"{step['delta']:+g}"
                    )
                    expected.add(f"set_parameter:{param}{step_txt}")
            assert {a.describe() for a in table.entry(measure)} == expected

    def test_missing_coverage_rejected(self):
        rows = [r for r in make_rows(lambda key: 0.5) if r.template != "btg"]
        with pytest.raises(InvalidParameterError, match="btg"):
            build_lookup_table(rows)
        with pytest.raises(InvalidParameterError):
            build_lookup_table([])


class TestCalibrateExpectations:
    def test_single_sample_equals_that_image(self):
        cfg = DesignParams()
        exp = calibrate_expectations("bfl", [cfg], 1, 1, seed=5)
        pattern = generate_pattern(cfg, child_seed(5, 0, 0))
        hue = float(child_rng(5, 0, 0, 0).uniform())
        from dataclasses import replace

        image = rasterize(pattern, CANVAS, replace(PALETTE, base_hue=hue))
        report = measure_all(image, background=CANVAS.background)
        assert exp.value == pytest.approx(report.bfl, abs=1e-12)
        assert exp.sample_size == 1
        assert exp.measure == "bfl"

    def test_mean_over_configs_matches_sample_protocol(self):
        cfgs = [DesignParams(), DesignParams(template=Template.CCR)]
        exp = calibrate_expectations("frd", cfgs, 2, 2, seed=9)
        vals = []
        for c_idx, cfg in enumerate(cfgs):
            vals.extend(sample_measures(cfg, CANVAS, PALETTE, 2, 2, 9, (c_idx,))["frd"])
        assert exp.value == pytest.approx(float(np.mean(vals)), abs=1e-12)
        assert exp.sample_size == 8

    def test_invalid_counts_rejected(self):
        with pytest.raises(InvalidParameterError):
            calibrate_expectations("bfl", [DesignParams()], 0, 1, seed=0)

    def test_expectation_requires_samples(self):
        with pytest.raises(InvalidParameterError):
            Expectation(measure="bfl", value=0.5, sample_size=0)


def small_table():
    return LookupTable(
        entries={
            "bfl": (
                Action(ActionKind.SWITCH_TEMPLATE, template=Template.CCR),
                Action(ActionKind.SET_PARAMETER, name="max_trenches", scale=0.5, lower=1.0),
            )
        },
        deltas={"bfl": (0.1, 0.05)},
    )


class TestGuidedGenerate:
    def test_never_acts_when_expectation_minus_inf(self):
        exp = Expectation("bfl", -math.inf, 1)
        _, _, log = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 4, CANVAS, PALETTE, seed=3
        )
        assert log.actions_taken() == 0
        assert all(r.action == "kept" for r in log.records)

    def test_acts_every_burrow_when_expectation_plus_inf(self):
        exp = Expectation("bfl", math.inf, 1)
        _, _, log = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 5, CANVAS, PALETTE, seed=3
        )
        assert log.actions_taken() == 5
        assert len(log.records) == 5

    def test_empty_table_matches_unguided_run_exactly(self):
        params = DesignParams(num_burrows=4)
        exp = Expectation("bfl", math.inf, 1)
        pattern, image, log = guided_generate(
            params, "bfl", LookupTable.empty(), exp, 4, CANVAS, PALETTE, seed=17
        )
        plain = generate_pattern(params, 17)
        assert pattern == plain
        np.testing.assert_array_equal(image, rasterize(plain, CANVAS, PALETTE))
        assert log.actions_taken() == 0

    def test_rerun_reproduces_log_and_image(self):
        exp = Expectation("bfl", 0.5, 10)
        a = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 4, CANVAS, PALETTE, seed=8
        )
        b = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 4, CANVAS, PALETTE, seed=8
        )
        assert a[0] == b[0]
        np.testing.assert_array_equal(a[1], b[1])
        assert a[2] == b[2]

    def test_branch_condition_matches_log(self):
        """(value < expectation) iff an action was applied (table non-empty)."""
        exp = Expectation("bfl", 0.42, 10)
        _, _, log = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 6, CANVAS, PALETTE, seed=2
        )
        for rec in log.records:
            assert (rec.value < rec.expectation) == (rec.action != "kept")

    def test_applied_actions_come_from_table(self):
        table = small_table()
        valid = {a.describe() for a in table.entry("bfl")}
        exp = Expectation("bfl", math.inf, 1)
        _, _, log = guided_generate(
            DesignParams(), "bfl", table, exp, 6, CANVAS, PALETTE, seed=4
        )
        assert {r.action for r in log.records} <= valid

    def test_log_values_match_recomputed_cumulative_measures(self):
        """Each logged value equals measure_all on the image so far."""
        from sandbubbler.pattern import Pattern

        exp = Expectation("frd", 0.45, 10)
        pattern, _, log = guided_generate(
            DesignParams(), "frd", small_table(), exp, 3, CANVAS, PALETTE, seed=6
        )
        for k, rec in enumerate(log.records, start=1):
            partial = Pattern(
                burrows=pattern.burrows[:k],
                seed=pattern.seed,
                params_per_burrow=pattern.params_per_burrow[:k],
            )
            img = rasterize(partial, CANVAS, PALETTE)
            report = measure_all(img, background=CANVAS.background)
            assert rec.value == pytest.approx(report.value("frd"), abs=1e-12)

    def test_switch_action_changes_following_burrows(self):
        table = LookupTable(
            entries={"bfl": (Action(ActionKind.SWITCH_TEMPLATE, template=Template.BTG),)},
            deltas={"bfl": (0.1,)},
        )
        exp = Expectation("bfl", math.inf, 1)
        pattern, _, log = guided_generate(
            DesignParams(template=Template.RTL), "bfl", table, exp, 3,
            CANVAS, PALETTE, seed=1,
        )
        assert [b.template for b in pattern.burrows] == [
            Template.RTL, Template.BTG, Template.BTG,
        ]
        assert [r.template for r in log.records] == ["rtl", "btg", "btg"]

    def test_unknown_measure_rejected(self):
        with pytest.raises(InvalidParameterError):
            guided_generate(
                DesignParams(), "brightness", small_table(),
                Expectation("bfl", 0.5, 1), 2, CANVAS, PALETTE, seed=0,
            )

    def test_control_log_serializations(self):
        exp = Expectation("bfl", math.inf, 1)
        _, _, log = guided_generate(
            DesignParams(), "bfl", small_table(), exp, 3, CANVAS, PALETTE, seed=5
        )
        csv = log.to_csv()
        lines = csv.strip().splitlines()
        assert lines[0] == "burrow,measure,value,expectation,action"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "1"
        assert first[1] == "bfl"
        assert float(first[2]) == log.records[0].value
        text = log.to_text()
        assert "burrow 1" in text
        assert "applied" in text
