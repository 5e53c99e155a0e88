"""Positive / negative / base accuracy protocol, transfer between languages, and reports.

A *decider* is any callable mapping a quadruple to a decision (``True`` /
``"valid"`` for valid). Deciders may also offer ``decide_many(quads)`` for
batched evaluation; the CNN decider does.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .augment import augment_for_eval
from .classifier import VALID
from .corpus import AnalogyDataset, AnalogyQuadruple
from .model import AnalogyModel

CSV_HEADER = ["language", "source", "target", "mode", "pos_acc", "neg_acc", "base_acc",
              "n_base", "n_pos", "n_neg", "seed"]
MODES = ("native", "transfer_full", "transfer_partial")
CATEGORIES = ("base", "positive", "negative")


@dataclass
class Metrics:
    pos_acc: float
    neg_acc: float
    base_acc: float
    n_base: int
    n_pos: int
    n_neg: int
    language: str = ""
    source: str = ""
    target: str = ""
    mode: str = "native"
    seed: int | None = None
    # share of base quadruples whose 8 equivalent forms all got the same decision
    symmetry_rate: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("pos_acc", "neg_acc", "base_acc"):
            v = getattr(self, name)
            if not 0.0 <= v <= 100.0:
                raise ValueError(f"{name}={v} outside [0, 100]")

    def category(self, name: str) -> float:
        return {"base": self.base_acc, "positive": self.pos_acc, "negative": self.neg_acc}[name]

    def row(self) -> list[str]:
        return [self.language, self.source, self.target, self.mode, f"{self.pos_acc:.4f}",
                f"{self.neg_acc:.4f}", f"{self.base_acc:.4f}", str(self.n_base), str(self.n_pos),
                str(self.n_neg), "" if self.seed is None else str(self.seed)]


def _is_valid(decision) -> bool:
    if isinstance(decision, str):
        return decision == VALID
    return bool(decision)


def decide_all(decider, quads: Sequence[AnalogyQuadruple]) -> np.ndarray:
    many = getattr(decider, "decide_many", None)
    if many is not None:
        out = many(quads)
    else:
        out = [decider(q) for q in quads]
    return np.array([_is_valid(d) for d in out], dtype=bool)


class CNNDecider:
    def __init__(self, model: AnalogyModel, threshold: float = 0.5):
        if not 0.0 < threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")
        self.model, self.threshold = model, threshold

    def decide_many(self, quads) -> np.ndarray:
        return self.model.predict(quads) >= self.threshold

    def __call__(self, q) -> bool:
        return bool(self.decide_many([q])[0])


def evaluate_classifier(decider, test: AnalogyDataset | Iterable[AnalogyQuadruple], language: str = "",
                        mode: str = "native", source: str = "", target: str = "", seed: int | None = None,
                        dedup_conflicts: bool = False) -> Metrics:
    quads = list(test.quadruples if isinstance(test, AnalogyDataset) else test)
    if not quads:
        raise ValueError("cannot evaluate on an empty test set")
    if not language and isinstance(test, AnalogyDataset):
        language = test.language
    sets = [augment_for_eval(q, dedup_conflicts) for q in quads]
    positives = [p for s in sets for p in s.positives]
    negatives = [n for s in sets for n in s.negatives]
    pos = decide_all(decider, positives)
    neg = decide_all(decider, negatives)
    base = decide_all(decider, quads)
    if not dedup_conflicts:
        assert len(positives) == 8 * len(quads) and len(negatives) == 24 * len(quads)
    symmetric = pos.reshape(len(quads), 8)
    sym_rate = 100.0 * float(np.mean(symmetric.all(axis=1) | (~symmetric).all(axis=1)))
    return Metrics(
        pos_acc=100.0 * float(pos.mean()),
        neg_acc=100.0 * float((~neg).mean()) if len(neg) else 100.0,
        base_acc=100.0 * float(base.mean()),
        n_base=len(quads), n_pos=len(positives), n_neg=len(negatives),
        language=language, source=source, target=target, mode=mode, seed=seed, symmetry_rate=sym_rate,
    )


def transfer_full(source_ckpt, target_test, source: str = "", target: str = "", threshold: float = 0.5,
                  seed: int | None = None) -> Metrics:
    """Source embedder and source classifier on target data."""
    source = source or source_ckpt.language
    return evaluate_classifier(CNNDecider(source_ckpt.model, threshold), target_test, language=target,
                               mode="transfer_full", source=source, target=target, seed=seed)


def transfer_partial(source_ckpt, target_ckpt, target_test, source: str = "", target: str = "",
                     threshold: float = 0.5, seed: int | None = None) -> Metrics:
    """Target embedder feeding the source classifier."""
    model = AnalogyModel.from_parts(target_ckpt.model.embedder, source_ckpt.model.classifier)
    source = source or source_ckpt.language
    target = target or target_ckpt.language
    return evaluate_classifier(CNNDecider(model, threshold), target_test, language=target,
                               mode="transfer_partial", source=source, target=target, seed=seed)


def metrics_csv(metrics: Sequence[Metrics]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for m in metrics:
        w.writerow(m.row())
    return buf.getvalue()


def metrics_table(metrics: Sequence[Metrics]) -> str:
    head = f"{'language':<12}{'source':<12}{'target':<12}{'mode':<18}{'pos':>9}{'neg':>9}{'base':>9}{'N':>8}"
    lines = [head, "-" * len(head)]
    for m in metrics:
        lines.append(f"{m.language:<12}{m.source:<12}{m.target:<12}{m.mode:<18}"
                     f"{m.pos_acc:>9.2f}{m.neg_acc:>9.2f}{m.base_acc:>9.2f}{m.n_base:>8}")
    return "\n".join(lines) + "\n"


def transfer_matrix_csv(metrics: Sequence[Metrics], mode: str, category: str) -> str:
    cells = {(m.source, m.target): m.category(category) for m in metrics if m.mode == mode}
    sources = sorted({s for s, _ in cells})
    targets = sorted({t for _, t in cells})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["source"] + targets)
    for s in sources:
        w.writerow([s] + [f"{cells[(s, t)]:.4f}" if (s, t) in cells else "" for t in targets])
    return buf.getvalue()


def emit_report(metrics: Sequence[Metrics], out_dir, prefix: str = "metrics") -> list[Path]:
    """Write ``<prefix>.csv`` and ``<prefix>.txt``, plus one S x T matrix per transfer mode and category."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def put(name, text):
        path = out_dir / name
        path.write_bytes(text.encode("utf-8"))
        written.append(path)

    put(f"{prefix}.csv", metrics_csv(metrics))
    put(f"{prefix}.txt", metrics_table(metrics))
    for mode in ("transfer_full", "transfer_partial"):
        if any(m.mode == mode for m in metrics):
            for cat in CATEGORIES:
                put(f"{prefix}_{mode}_{cat}.csv", transfer_matrix_csv(metrics, mode, cat))
    return written
