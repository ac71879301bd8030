"""Evaluation metrics: attachment scores, tag P/R/F1, token accuracy."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .conllu import Sentence
from .errors import DataError


@dataclass
class LabelScore:
    precision: float
    recall: float
    f1: float
    count: int


@dataclass
class EvalReport:
    """Bundle of percentage metrics; unused slots stay ``None``.

    ``per_label`` maps a label to its :class:`LabelScore`; the reserved
    key ``"average"`` holds the count-weighted average over gold labels.
    """

    uas: float | None = None
    las: float | None = None
    pos_acc: float | None = None
    per_label: dict[str, LabelScore] = field(default_factory=dict)

    def to_json(self) -> str:
        payload: dict = {}
        for name in ("uas", "las", "pos_acc"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        if self.per_label:
            payload["per_label"] = {
                label: vars(score) for label, score in self.per_label.items()
            }
        return json.dumps(payload, indent=2, sort_keys=True)


def _pct(hits: int, total: int) -> float:
    return 100.0 * hits / total if total else 0.0


def attachment_scores(gold: list[Sentence], pred: list[Sentence]) -> EvalReport:
    """UAS/LAS (and POS accuracy when tags are present) over all tokens.

    Punctuation is not excluded: every token counts.  Sentence counts and
    per-sentence token counts must match.
    """
    if len(gold) != len(pred):
        raise DataError(
            f"sentence count mismatch: gold {len(gold)} vs pred {len(pred)}"
        )
    total = uas_hits = las_hits = 0
    pos_total = pos_hits = 0
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise DataError(
                f"sentence {i}: token count mismatch: gold {len(g)} vs pred {len(p)}"
            )
        for gt, pt in zip(g, p):
            total += 1
            if gt.head == pt.head:
                uas_hits += 1
                if gt.deprel == pt.deprel:
                    las_hits += 1
            if gt.upos is not None and pt.upos is not None:
                pos_total += 1
                if gt.upos == pt.upos:
                    pos_hits += 1
    return EvalReport(
        uas=_pct(uas_hits, total),
        las=_pct(las_hits, total),
        pos_acc=_pct(pos_hits, pos_total) if pos_total else None,
    )


def label_prf(gold: list, pred: list) -> EvalReport:
    """Per-label precision/recall/F1 plus a count-weighted average row.

    Works for any hashable labels (language tags, POS tags, deprels);
    labels are stringified for the report keys.
    """
    if len(gold) != len(pred):
        raise DataError(f"length mismatch: gold {len(gold)} vs pred {len(pred)}")
    labels = sorted({str(x) for x in gold} | {str(x) for x in pred})
    gold_s = [str(x) for x in gold]
    pred_s = [str(x) for x in pred]
    per_label: dict[str, LabelScore] = {}
    for label in labels:
        tp = sum(1 for g, p in zip(gold_s, pred_s) if g == label and p == label)
        gold_n = sum(1 for g in gold_s if g == label)
        pred_n = sum(1 for p in pred_s if p == label)
        precision = _pct(tp, pred_n)
        recall = _pct(tp, gold_n)
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_label[label] = LabelScore(precision, recall, f1, gold_n)

    total = len(gold_s)
    if total:
        avg = LabelScore(
            precision=sum(s.precision * s.count for s in per_label.values()) / total,
            recall=sum(s.recall * s.count for s in per_label.values()) / total,
            f1=sum(s.f1 * s.count for s in per_label.values()) / total,
            count=total,
        )
        per_label["average"] = avg
    return EvalReport(per_label=per_label)


def token_accuracy(gold: list[str], pred: list[str]) -> float:
    """Percent of positions where gold and predicted strings match exactly."""
    if len(gold) != len(pred):
        raise DataError(f"length mismatch: gold {len(gold)} vs pred {len(pred)}")
    return _pct(sum(1 for g, p in zip(gold, pred) if g == p), len(gold))
