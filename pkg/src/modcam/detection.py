"""Ground-truth parsing, box matching, detection metrics and the latency model."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EvalError, ParseError
from .imaging import ScenarioMode

# KITTI label columns: type truncated occluded alpha x1 y1 x2 y2 h w l X Y Z ry (+score)
_KITTI_MIN_FIELDS = 15
_EXCLUDED_CLASS = "DontCare"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box with top-left (j1, k1), bottom-right (j2, k2).

    ``excluded`` marks don't-care regions that never count as matches,
    false positives or false negatives.
    """

    j1: float
    k1: float
    j2: float
    k2: float
    label: str
    score: float = 1.0
    excluded: bool = False

    def __post_init__(self) -> None:
        if not (self.j1 <= self.j2 and self.k1 <= self.k2):
            raise ValueError(f"inverted box corners: {self}")
        if min(self.j1, self.k1) < 0:
            raise ValueError(f"negative box coordinates: {self}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score outside [0, 1]: {self.score}")

    @property
    def area(self) -> float:
        return (self.j2 - self.j1) * (self.k2 - self.k1)


@dataclass
class DetectionSet:
    """All boxes attached to one image."""

    image_id: str
    boxes: list[BoundingBox] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.image_id:
            raise ValueError("image_id must be nonempty")


@dataclass(frozen=True)
class MatchedPair:
    pred_index: int
    truth_index: int
    label: str
    iou: float


@dataclass
class Matching:
    """Outcome of matching one image's predictions against its truths."""

    image_id: str
    pairs: list[MatchedPair] = field(default_factory=list)
    fp_labels: list[str] = field(default_factory=list)
    fn_labels: list[str] = field(default_factory=list)

    @property
    def tp(self) -> int:
        return len(self.pairs)

    @property
    def fp(self) -> int:
        return len(self.fp_labels)

    @property
    def fn(self) -> int:
        return len(self.fn_labels)


@dataclass(frozen=True)
class ClassMetrics:
    tp: int
    fp: int
    fn: int
    mean_iou: float
    f1: float
    accuracy: float


@dataclass(frozen=True)
class MetricsReport:
    mean_iou: float
    f1: float
    accuracy: float
    tp: int
    fp: int
    fn: int
    per_class: dict[str, ClassMetrics]


@dataclass(frozen=True)
class TimingModel:
    """Additive latency model: capture, optional recovery, detector inference.

    A conventional HDR capture needs ``hdr_exposures`` exposures; single-shot
    scenarios need one.  All figures in milliseconds.
    """

    capture_ms: float = 33.0
    hdr_exposures: int = 3
    spud_ms: float = 0.0
    detect_ms: float = 0.0

    def __post_init__(self) -> None:
        if min(self.capture_ms, self.spud_ms, self.detect_ms) < 0 or self.hdr_exposures < 0:
            raise ValueError("timing components must be nonnegative")


def parse_kitti_labels(text: str, image_id: str) -> DetectionSet:
    """Parse KITTI-format label text into a detection set.

    One object per line, whitespace separated; the class is the first token
    and the pixel box is tokens five through eight.  Don't-care lines are
    kept but flagged excluded.  A trailing sixteenth field, when present, is
    read as a confidence score.
    """
    boxes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) < _KITTI_MIN_FIELDS:
            raise ParseError(
                f"line {lineno}: expected >= {_KITTI_MIN_FIELDS} fields, got {len(tokens)}"
            )
        label = tokens[0]
        try:
            j1, k1, j2, k2 = (float(t) for t in tokens[4:8])
            score = float(tokens[15]) if len(tokens) > 15 else 1.0
            boxes.append(
                BoundingBox(j1, k1, j2, k2, label, score=score,
                            excluded=label == _EXCLUDED_CLASS)
            )
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    return DetectionSet(image_id=image_id, boxes=boxes)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0 when disjoint or degenerate."""
    w = min(a.j2, b.j2) - max(a.j1, b.j1)
    h = min(a.k2, b.k2) - max(a.k1, b.k1)
    if w <= 0 or h <= 0:
        return 0.0
    inter = w * h
    union = a.area + b.area - inter
    return inter / union if union > 0 else 0.0


def match_detections(
    preds: DetectionSet, truth: DetectionSet, iou_min: float = 0.5
) -> Matching:
    """Greedy one-to-one, class-aware matching in descending IoU order.

    Ties break on ascending (prediction index, truth index), so the result
    does not depend on input ordering beyond the indices themselves.
    Predictions overlapping a don't-care region at or above the threshold
    are discarded rather than counted as false positives; don't-care truths
    never count as false negatives.
    """
    if preds.image_id != truth.image_id:
        raise EvalError(f"image_id mismatch: {preds.image_id!r} vs {truth.image_id!r}")

    eligible = [(ti, t) for ti, t in enumerate(truth.boxes) if not t.excluded]
    dont_care = [t for t in truth.boxes if t.excluded]

    candidates = []
    for pi, p in enumerate(preds.boxes):
        for ti, t in eligible:
            if p.label != t.label:
                continue
            overlap = iou(p, t)
            if overlap >= iou_min:
                candidates.append((-overlap, pi, ti))
    candidates.sort()

    matched_preds: set[int] = set()
    matched_truths: set[int] = set()
    pairs = []
    for neg_overlap, pi, ti in candidates:
        if pi in matched_preds or ti in matched_truths:
            continue
        matched_preds.add(pi)
        matched_truths.add(ti)
        pairs.append(MatchedPair(pi, ti, preds.boxes[pi].label, -neg_overlap))

    fp_labels = []
    for pi, p in enumerate(preds.boxes):
        if pi in matched_preds:
            continue
        if any(iou(p, dc) >= iou_min for dc in dont_care):
            continue
        fp_labels.append(p.label)
    fn_labels = [t.label for ti, t in eligible if ti not in matched_truths]
    return Matching(truth.image_id, pairs=pairs, fp_labels=fp_labels, fn_labels=fn_labels)


def _rates(tp: int, fp: int, fn: int, ious: list[float]) -> tuple[float, float, float]:
    mean_iou = sum(ious) / len(ious) if ious else 0.0
    f1 = 2.0 * tp / (2.0 * tp + fp + fn) if (2 * tp + fp + fn) > 0 else 0.0
    accuracy = tp / (tp + fp + fn) if (tp + fp + fn) > 0 else 0.0
    return mean_iou, f1, accuracy


def compute_metrics(matchings: list[Matching]) -> MetricsReport:
    """Aggregate matchings into overall and per-class IoU / F1 / accuracy.

    Mean IoU averages over matched pairs only; F1 and accuracy follow the
    counting formulas 2tp/(2tp+fp+fn) and tp/(tp+fp+fn).
    """
    if not matchings:
        raise EvalError("no matchings to aggregate")
    tp = sum(m.tp for m in matchings)
    fp = sum(m.fp for m in matchings)
    fn = sum(m.fn for m in matchings)
    ious = [pair.iou for m in matchings for pair in m.pairs]

    per_class: dict[str, ClassMetrics] = {}
    labels = sorted(
        {pair.label for m in matchings for pair in m.pairs}
        | {lab for m in matchings for lab in m.fp_labels}
        | {lab for m in matchings for lab in m.fn_labels}
    )
    for lab in labels:
        ctp = sum(1 for m in matchings for pair in m.pairs if pair.label == lab)
        cfp = sum(1 for m in matchings for l in m.fp_labels if l == lab)
        cfn = sum(1 for m in matchings for l in m.fn_labels if l == lab)
        cious = [pair.iou for m in matchings for pair in m.pairs if pair.label == lab]
        c_iou, c_f1, c_acc = _rates(ctp, cfp, cfn, cious)
        per_class[lab] = ClassMetrics(ctp, cfp, cfn, c_iou, c_f1, c_acc)

    mean_iou, f1, accuracy = _rates(tp, fp, fn, ious)
    return MetricsReport(mean_iou, f1, accuracy, tp, fp, fn, per_class)


def scenario_latency(model: TimingModel, mode: ScenarioMode) -> float:
    """End-to-end milliseconds for one scenario.

    Single-shot scenarios pay one capture plus detection; recovery adds the
    unwrapping solve; the multi-exposure HDR reference pays one capture per
    exposure.
    """
    if mode is ScenarioMode.IDEAL_HDR:
        return model.hdr_exposures * model.capture_ms + model.detect_ms
    if mode is ScenarioMode.RECOVERY:
        return model.capture_ms + model.spud_ms + model.detect_ms
    return model.capture_ms + model.detect_ms
