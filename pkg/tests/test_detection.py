import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kitti_line
from modcam.detection import (
    BoundingBox,
    DetectionSet,
    Matching,
    MatchedPair,
    TimingModel,
    compute_metrics,
    iou,
    match_detections,
    parse_kitti_labels,
    scenario_latency,
)
from modcam.errors import EvalError, ParseError
from modcam.imaging import ScenarioMode


def box(j1, k1, j2, k2, label="Car", **kw) -> BoundingBox:
    return BoundingBox(j1, k1, j2, k2, label, **kw)


class TestBoundingBox:
    def test_inverted_corners_rejected(self):
        with pytest.raises(ValueError):
            box(10, 0, 5, 5)

    def test_negative_coords_rejected(self):
        with pytest.raises(ValueError):
            box(-1, 0, 5, 5)

    def test_score_range(self):
        with pytest.raises(ValueError):
            box(0, 0, 1, 1, score=1.5)


class TestParseKittiLabels:
    def test_reference_line(self):
        text = ("Car 0.00 0 -1.58 587.01 173.33 614.12 200.12 "
                "1.65 1.67 3.64 -0.65 1.71 46.70 -1.59")
        ds = parse_kitti_labels(text, "000001")
        assert len(ds.boxes) == 1
        b = ds.boxes[0]
        assert b.label == "Car" and not b.excluded
        assert (b.j1, b.k1, b.j2, b.k2) == (587.01, 173.33, 614.12, 200.12)

    def test_empty_file(self):
        assert parse_kitti_labels("", "000000").boxes == []

    def test_dont_care_flagged_excluded(self):
        text = ("DontCare -1 -1 -10 503.89 169.71 590.61 190.13 "
                "-1 -1 -1 -1000 -1000 -1000 -10")
        ds = parse_kitti_labels(text, "000002")
        assert ds.boxes[0].excluded
        assert (ds.boxes[0].j1, ds.boxes[0].k2) == (503.89, 190.13)

    def test_malformed_line_reports_number(self):
        good = kitti_line("Car", 0, 0, 10, 10)
        with pytest.raises(ParseError, match="line 2"):
            parse_kitti_labels(good + "\nCar 0.0 0\n", "x")

    def test_unparseable_float_reports_number(self):
        bad = "Car 0.00 0 -1.58 oops 173.33 614.12 200.12 1 1 1 1 1 1 1"
        with pytest.raises(ParseError, match="line 1"):
            parse_kitti_labels(bad, "x")

    def test_sixteenth_field_read_as_score(self):
        line = kitti_line("Car", 0, 0, 10, 10) + " 0.87"
        ds = parse_kitti_labels(line, "x")
        assert ds.boxes[0].score == 0.87

    def test_blank_lines_skipped(self):
        text = "\n" + kitti_line("Car", 1, 1, 5, 5) + "\n\n"
        assert len(parse_kitti_labels(text, "x").boxes) == 1

    def test_image_id_required(self):
        with pytest.raises(ValueError):
            DetectionSet("")


class TestIou:
    def test_identical(self):
        assert iou(box(0, 0, 10, 10), box(0, 0, 10, 10)) == 1.0

    def test_disjoint(self):
        assert iou(box(0, 0, 10, 10), box(20, 20, 30, 30)) == 0.0

    def test_quarter_overlap(self):
        assert iou(box(0, 0, 10, 10), box(5, 5, 15, 15)) == pytest.approx(
            25.0 / 175.0, abs=1e-12
        )

    def test_degenerate_zero_area(self):
        assert iou(box(5, 5, 5, 5), box(5, 5, 5, 5)) == 0.0

    coords = st.tuples(
        st.floats(0, 100), st.floats(0, 100),
        st.floats(0, 100), st.floats(0, 100),
    ).map(lambda t: (min(t[0], t[2]), min(t[1], t[3]),
                     max(t[0], t[2]), max(t[1], t[3])))

    @settings(max_examples=200, deadline=None)
    @given(a=coords, b=coords)
    def test_symmetric_and_bounded(self, a, b):
        ba, bb = box(*a), box(*b)
        v = iou(ba, bb)
        assert v == iou(bb, ba)
        assert 0.0 <= v <= 1.0 + 1e-12


class TestMatching:
    def test_perfect_match(self):
        preds = DetectionSet("i", [box(0, 0, 10, 10)])
        truth = DetectionSet("i", [box(0, 0, 10, 10)])
        m = match_detections(preds, truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (1, 0, 0)
        assert m.pairs[0].iou == 1.0

    def test_prediction_without_truth(self):
        m = match_detections(DetectionSet("i", [box(0, 0, 10, 10)]),
                             DetectionSet("i"), 0.5)
        assert (m.tp, m.fp, m.fn) == (0, 1, 0)

    def test_greedy_prefers_higher_iou(self):
        truth = DetectionSet("i", [box(0, 0, 10, 10)])
        preds = DetectionSet("i", [box(0, 0, 10, 6), box(0, 0, 10, 8)])
        m = match_detections(preds, truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (1, 1, 0)
        assert m.pairs[0].pred_index == 1  # the 0.8 pair wins
        assert m.pairs[0].iou == pytest.approx(0.8, abs=1e-12)

    def test_class_aware(self):
        preds = DetectionSet("i", [box(0, 0, 10, 10, "Pedestrian")])
        truth = DetectionSet("i", [box(0, 0, 10, 10, "Car")])
        m = match_detections(preds, truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (0, 1, 1)

    def test_image_id_mismatch(self):
        with pytest.raises(EvalError):
            match_detections(DetectionSet("a"), DetectionSet("b"), 0.5)

    def test_dont_care_truth_not_counted_missing(self):
        truth = DetectionSet("i", [box(0, 0, 10, 10, "DontCare", excluded=True)])
        m = match_detections(DetectionSet("i"), truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (0, 0, 0)

    def test_prediction_over_dont_care_discarded(self):
        truth = DetectionSet("i", [box(0, 0, 10, 10, "DontCare", excluded=True)])
        preds = DetectionSet("i", [box(0, 0, 10, 10, "Car")])
        m = match_detections(preds, truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (0, 0, 0)

    def test_below_threshold_not_matched(self):
        preds = DetectionSet("i", [box(0, 0, 10, 4)])  # iou 0.4
        truth = DetectionSet("i", [box(0, 0, 10, 10)])
        m = match_detections(preds, truth, 0.5)
        assert (m.tp, m.fp, m.fn) == (0, 1, 1)

    def test_one_to_one_and_order_invariant(self):
        rng = random.Random(0)
        for _ in range(30):
            n_truth = rng.randint(0, 5)
            n_pred = rng.randint(0, 5)
            truths = []
            for _ in range(n_truth):
                x, y = rng.uniform(0, 50), rng.uniform(0, 50)
                truths.append(box(x, y, x + rng.uniform(5, 20), y + rng.uniform(5, 20)))
            preds = []
            for _ in range(n_pred):
                if truths and rng.random() < 0.7:
                    t = rng.choice(truths)
                    dx, dy = rng.uniform(-3, 3), rng.uniform(-3, 3)
                    preds.append(box(max(0.0, t.j1 + dx), max(0.0, t.k1 + dy),
                                     t.j2 + dx, t.k2 + dy))
                else:
                    x, y = rng.uniform(0, 50), rng.uniform(0, 50)
                    preds.append(box(x, y, x + 5, y + 5))
            m = match_detections(DetectionSet("i", preds), DetectionSet("i", truths), 0.5)
            assert len({p.pred_index for p in m.pairs}) == m.tp
            assert len({p.truth_index for p in m.pairs}) == m.tp
            assert m.tp + m.fp == n_pred
            assert m.tp + m.fn == n_truth

            shuffled = list(preds)
            rng.shuffle(shuffled)
            m2 = match_detections(DetectionSet("i", shuffled), DetectionSet("i", truths), 0.5)
            assert (m2.tp, m2.fp, m2.fn) == (m.tp, m.fp, m.fn)


class TestComputeMetrics:
    def test_single_perfect(self):
        preds = DetectionSet("i", [box(0, 0, 10, 10)])
        truth = DetectionSet("i", [box(0, 0, 10, 10)])
        r = compute_metrics([match_detections(preds, truth, 0.5)])
        assert (r.mean_iou, r.f1, r.accuracy) == (1.0, 1.0, 1.0)
        assert (r.tp, r.fp, r.fn) == (1, 0, 0)

    def test_all_misses(self):
        m = Matching("i", pairs=[], fp_labels=["Car", "Car"],
                     fn_labels=["Car", "Car", "Car"])
        r = compute_metrics([m])
        assert (r.f1, r.accuracy) == (0.0, 0.0)

    def test_hand_computed_mixed_case(self):
        truth = DetectionSet("i", [box(0, 0, 10, 10), box(20, 0, 30, 10),
                                   box(50, 50, 60, 60)])
        preds = DetectionSet("i", [box(0, 0, 10, 6),     # iou 0.6
                                   box(20, 0, 30, 8),    # iou 0.8
                                   box(80, 80, 90, 90)])  # fp
        r = compute_metrics([match_detections(preds, truth, 0.5)])
        assert (r.tp, r.fp, r.fn) == (2, 1, 1)
        assert r.mean_iou == pytest.approx(0.7, abs=1e-12)
        assert r.f1 == pytest.approx(2.0 * 2 / (2 * 2 + 1 + 1), abs=1e-12)
        assert r.accuracy == pytest.approx(0.5, abs=1e-12)

    def test_per_class_breakdown(self):
        truth = DetectionSet("i", [box(0, 0, 10, 10, "Car"),
                                   box(20, 20, 30, 30, "Pedestrian")])
        preds = DetectionSet("i", [box(0, 0, 10, 10, "Car")])
        r = compute_metrics([match_detections(preds, truth, 0.5)])
        assert r.per_class["Car"].tp == 1 and r.per_class["Car"].f1 == 1.0
        assert r.per_class["Pedestrian"].fn == 1
        assert r.per_class["Pedestrian"].f1 == 0.0

    def test_empty_input_rejected(self):
        with pytest.raises(EvalError):
            compute_metrics([])

    @settings(max_examples=300, deadline=None)
    @given(tp=st.integers(0, 40), fp=st.integers(0, 40), fn=st.integers(0, 40))
    def test_f1_at_least_accuracy(self, tp, fp, fn):
        m = Matching("i",
                     pairs=[MatchedPair(i, i, "Car", 1.0) for i in range(tp)],
                     fp_labels=["Car"] * fp, fn_labels=["Car"] * fn)
        r = compute_metrics([m])
        assert r.f1 >= r.accuracy or math.isclose(r.f1, r.accuracy)

    def test_aggregation_over_images(self):
        m1 = Matching("a", pairs=[MatchedPair(0, 0, "Car", 0.9)], fp_labels=["Car"])
        m2 = Matching("b", fn_labels=["Car"])
        r = compute_metrics([m1, m2])
        assert (r.tp, r.fp, r.fn) == (1, 1, 1)
        assert r.mean_iou == pytest.approx(0.9)


class TestScenarioLatency:
    def test_ideal_hdr_from_reference_row(self):
        model = TimingModel(capture_ms=33.0, hdr_exposures=3, spud_ms=5.1,
                            detect_ms=23.85)
        assert scenario_latency(model, ScenarioMode.IDEAL_HDR) == pytest.approx(
            122.85, abs=1e-9
        )

    def test_recovery_composition(self):
        model = TimingModel(capture_ms=33.0, hdr_exposures=3, spud_ms=5.1,
                            detect_ms=23.85)
        assert scenario_latency(model, ScenarioMode.RECOVERY) == pytest.approx(
            61.95, abs=1e-9
        )

    def test_capture_only(self):
        model = TimingModel(capture_ms=33.0, detect_ms=0.0)
        assert scenario_latency(model, ScenarioMode.SATURATED) == 33.0
        assert scenario_latency(model, ScenarioMode.MODULO) == 33.0

    def test_mode_differences(self):
        model = TimingModel(capture_ms=33.0, hdr_exposures=3, spud_ms=5.1,
                            detect_ms=17.0)
        sat = scenario_latency(model, ScenarioMode.SATURATED)
        rec = scenario_latency(model, ScenarioMode.RECOVERY)
        hdr = scenario_latency(model, ScenarioMode.IDEAL_HDR)
        assert rec - sat == pytest.approx(model.spud_ms, abs=1e-9)
        assert hdr - sat == pytest.approx(
            (model.hdr_exposures - 1) * model.capture_ms, abs=1e-9
        )
        assert rec < hdr  # recovery beats multi-exposure whenever spud < 66 ms

    def test_negative_components_rejected(self):
        with pytest.raises(ValueError):
            TimingModel(capture_ms=-1.0)
