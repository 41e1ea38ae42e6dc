"""Scoring a segmentation against synthetic ground truth."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pipeline import CardSegmentation, PipelineConfig, card_boxes, process_card
from .raster import Rect
from .skew import SkewConfig, refine_skew
from .synthcard import GroundTruth, corpus, paragraph_region


def iou(a: Rect, b: Rect) -> float:
    ix = min(a.x1, b.x1) - max(a.x, b.x)
    iy = min(a.y1, b.y1) - max(a.y, b.y)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def iou_matrix(truth: list[Rect], pred: list[Rect]) -> np.ndarray:
    if not truth or not pred:
        return np.zeros((len(truth), len(pred)))
    t = np.array([[r.x, r.y, r.x1, r.y1] for r in truth], dtype=np.float64)
    p = np.array([[r.x, r.y, r.x1, r.y1] for r in pred], dtype=np.float64)
    ix = np.clip(np.minimum(t[:, None, 2], p[None, :, 2]) - np.maximum(t[:, None, 0], p[None, :, 0]), 0, None)
    iy = np.clip(np.minimum(t[:, None, 3], p[None, :, 3]) - np.maximum(t[:, None, 1], p[None, :, 1]), 0, None)
    inter = ix * iy
    at = (t[:, 2] - t[:, 0]) * (t[:, 3] - t[:, 1])
    ap = (p[:, 2] - p[:, 0]) * (p[:, 3] - p[:, 1])
    return inter / (at[:, None] + ap[None, :] - inter)


@dataclass
class CardScore:
    n_truth: int
    n_correct: int
    n_pred: int

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_truth if self.n_truth else 1.0


def score_card(result: CardSegmentation, gt: GroundTruth, min_iou: float = 0.5) -> CardScore:
    """A ground-truth character is correct when exactly one predicted box
    overlaps it at IoU >= ``min_iou``."""
    _, _, pred = card_boxes(result)
    truth = [b for line in gt.char_boxes for b in line]
    m = iou_matrix(truth, pred) >= min_iou
    correct = int((m.sum(axis=1) == 1).sum()) if truth else 0
    return CardScore(len(truth), correct, len(pred))


@dataclass
class CorpusReport:
    n_cards: int
    n_truth: int
    n_correct: int
    per_card: list[CardScore]

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_truth if self.n_truth else 1.0


def corpus_accuracy(n: int = 200, seed: int = 42, cfg: PipelineConfig = PipelineConfig(),
                    ranges=None, min_iou: float = 0.5) -> CorpusReport:
    scores = [score_card(process_card(img, cfg), gt, min_iou)
              for img, gt in corpus(n, seed, ranges)]
    return CorpusReport(n, sum(s.n_truth for s in scores),
                        sum(s.n_correct for s in scores), scores)


@dataclass
class SkewReport:
    errors: np.ndarray  # |estimated - true| per region, centidegrees

    def within(self, tol: int = 100) -> float:
        return float((self.errors <= tol).mean())

    @property
    def median(self) -> float:
        return float(np.median(self.errors))


def skew_recovery(n: int = 100, seed: int = 1000, cfg: SkewConfig = SkewConfig(),
                  min_width: int = 300) -> SkewReport:
    """Skew error over ``n`` synthetic paragraph regions (seeds seed..seed+n-1)."""
    errs = []
    for i in range(n):
        region, angle = paragraph_region(seed + i, min_width=min_width)
        errs.append(abs(refine_skew(region, cfg).angle - angle))
    return SkewReport(np.array(errs, dtype=np.int64))
