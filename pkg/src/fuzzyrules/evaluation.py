"""Cross-validation, scaling benchmarks, and significance testing.

``cross_validate`` computes normalization statistics from the training
folds only and applies them to the held-out fold; that avoids prediction
leakage but differs from the global up-front scaling used in the original
experimental protocol, so ``paper_normalization=True`` restores the global
behavior for reproduction runs.  Every report records which mode produced
it.

``benchmark_scaling`` grows a dataset prefix by prefix (or attribute block
by attribute block) and times induction and extraction separately for each
requested method, one method at a time on a monotonic clock.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import stdtr

from .classifier import RuleClassifier, TrainConfig, predict_batch, train
from .table import FuzzyDecisionTable, normalize_min_max, split_folds, split_subgroups

# classifier method = inducer + extraction strategy pairing
METHOD_CONFIGS: dict[str, tuple[str, str]] = {
    "cvrc": ("cvr", "gfrc"),
    "a-cvrc": ("a-cvr", "gfrc"),
    "bsrc": ("cvr", "bsrc"),
    "a-bsrc": ("a-cvr", "bsrc"),
    "lem2": ("cvr", "lem2"),
    "a-lem2": ("a-cvr", "lem2"),
    "vcdomle": ("cvr", "vcdomle"),
    "a-vcdomle": ("a-cvr", "vcdomle"),
}

_ACCELERATED_OF = {
    "cvrc": "a-cvrc",
    "bsrc": "a-bsrc",
    "lem2": "a-lem2",
    "vcdomle": "a-vcdomle",
}


@dataclass
class EvalReport:
    """Fold-wise accuracies plus enough context to reproduce the run."""

    accuracies: list[float]
    mean: float
    std: float
    rule_counts: list[int]
    config: TrainConfig
    k: int
    seed: int
    stratified: bool
    normalization_mode: str            # "train-only" or "global"
    fingerprint: dict
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        from dataclasses import asdict
        doc = asdict(self)
        doc["config"] = asdict(self.config)
        return doc

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    def to_flat_csv(self, path, dataset: str = "") -> None:
        method = f"{self.config.inducer}+{self.config.extractor}"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dataset", "n_prefix", "method", "phase", "seconds",
                             "rules", "accuracy_mean", "accuracy_std"])
            writer.writerow([dataset, self.fingerprint["n"], method, "cv", "",
                             float(np.mean(self.rule_counts)), self.mean, self.std])


@dataclass
class TimingRow:
    prefix_size: int
    method: str
    induce_seconds: float
    extract_seconds: float
    rule_count: int


@dataclass
class TimingReport:
    """Per-prefix wall times and rule counts, plus induction speedups for
    each accelerated/unaccelerated pair that was benchmarked together."""

    rows: list[TimingRow]
    speedups: list[dict]
    axis: str
    g: int
    seed: int
    fingerprint: dict

    def rows_for(self, method: str) -> list[TimingRow]:
        return [r for r in self.rows if r.method == method]

    def to_csv(self, path, dataset: str = "") -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dataset", "n_prefix", "method", "induce_seconds",
                             "extract_seconds", "rules"])
            for r in self.rows:
                writer.writerow([dataset, r.prefix_size, r.method,
                                 f"{r.induce_seconds:.6f}",
                                 f"{r.extract_seconds:.6f}", r.rule_count])

    def to_flat_csv(self, path, dataset: str = "") -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["dataset", "n_prefix", "method", "phase", "seconds",
                             "rules", "accuracy_mean", "accuracy_std"])
            for r in self.rows:
                for phase, seconds in (("induction", r.induce_seconds),
                                       ("extraction", r.extract_seconds)):
                    writer.writerow([dataset, r.prefix_size, r.method, phase,
                                     f"{seconds:.6f}", r.rule_count, "", ""])

    def to_json(self, path) -> None:
        from dataclasses import asdict
        doc = {
            "axis": self.axis, "g": self.g, "seed": self.seed,
            "fingerprint": self.fingerprint,
            "rows": [asdict(r) for r in self.rows],
            "speedups": self.speedups,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def cross_validate(table: FuzzyDecisionTable, config: TrainConfig, k: int,
                   seed: int, stratified: bool = False,
                   paper_normalization: bool = False,
                   threads: int = 1) -> EvalReport:
    """k-fold cross-validation of one training configuration.

    A fold whose training part misses a class is still evaluated; the
    condition is recorded as a warning in the report.
    """
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    notes: list[str] = []
    full = normalize_min_max(table) if paper_normalization else table
    folds = split_folds(table, k, seed, stratified)
    accuracies: list[float] = []
    rule_counts: list[int] = []
    for fold in range(k):
        tr = folds.train_indices(fold)
        te = folds.test_indices(fold)
        missing = set(int(c) for c in table.labels[te]) - set(int(c) for c in table.labels[tr])
        if missing:
            names = [table.class_names[c] for c in sorted(missing)]
            notes.append(f"fold {fold}: classes absent from training: {names}")
        if paper_normalization:
            train_tab = full.subset(tr)
        else:
            train_tab = normalize_min_max(table.subset(tr))
        clf = train(train_tab, config, threads=threads)
        pred, _, _ = predict_batch(clf, table.values[te])
        accuracies.append(float(np.mean(pred == table.labels[te])))
        rule_counts.append(len(clf.rules))
    mean = float(np.mean(accuracies))
    std = float(np.std(accuracies, ddof=1))
    return EvalReport(
        accuracies=accuracies, mean=mean, std=std, rule_counts=rule_counts,
        config=config, k=k, seed=seed, stratified=stratified,
        normalization_mode="global" if paper_normalization else "train-only",
        fingerprint=table.fingerprint(), warnings=notes,
    )


def benchmark_scaling(table: FuzzyDecisionTable, methods: Sequence[str],
                      g: int, seed: int, alpha: float = 0.0,
                      beta: float = 0.01, delta: int = 0,
                      axis: str = "instances", threads: int = 1,
                      progress=None) -> TimingReport:
    """Time each method on growing prefixes of the table.

    ``axis="instances"`` grows seeded near-equal row blocks;
    ``axis="attributes"`` grows consecutive attribute blocks over all rows.
    Methods run strictly one after another so wall times stay comparable;
    ``progress`` (if given) receives one text line per finished prefix.
    """
    for m in methods:
        if m not in METHOD_CONFIGS:
            raise ValueError(f"unknown method {m!r}; choose from "
                             f"{sorted(METHOD_CONFIGS)}")
    if axis not in ("instances", "attributes"):
        raise ValueError(f"axis must be 'instances' or 'attributes', got {axis!r}")

    norm = normalize_min_max(table)
    prefixes: list[tuple[int, FuzzyDecisionTable]] = []
    if axis == "instances":
        blocks = split_subgroups(norm, g, seed)
        acc: list[int] = []
        for block in blocks:
            acc.extend(int(i) for i in block)
            if acc:
                prefixes.append((len(acc), norm.subset(sorted(acc))))
    else:
        base, rem = norm.m // g, norm.m % g
        start, cols = 0, []
        for b in range(g):
            size = base + (1 if b < rem else 0)
            cols.extend(range(start, start + size))
            start += size
            if cols:
                prefixes.append((len(cols), norm.select_attributes(list(cols))))

    rows: list[TimingRow] = []
    speedups: list[dict] = []
    for size, sub in prefixes:
        by_method: dict[str, TimingRow] = {}
        for method in methods:
            inducer, extractor = METHOD_CONFIGS[method]
            cfg = TrainConfig(alpha=alpha, inducer=inducer, extractor=extractor,
                              beta=beta, delta=delta, seed=seed)
            timers: dict[str, float] = {}
            clf = train(sub, cfg, threads=threads, timers=timers)
            row = TimingRow(prefix_size=size, method=method,
                            induce_seconds=timers.get("induce", 0.0),
                            extract_seconds=timers.get("extract", 0.0),
                            rule_count=len(clf.rules))
            rows.append(row)
            by_method[method] = row
        for base_m, accel_m in _ACCELERATED_OF.items():
            if base_m in by_method and accel_m in by_method:
                b, a = by_method[base_m], by_method[accel_m]
                ratio = (b.induce_seconds / a.induce_seconds
                         if a.induce_seconds > 0 else math.inf)
                speedups.append({"prefix_size": size,
                                 "pair": f"{base_m}/{accel_m}",
                                 "induction_speedup": ratio})
        if progress is not None:
            progress(f"prefix {size}: " + ", ".join(
                f"{m}={by_method[m].induce_seconds + by_method[m].extract_seconds:.2f}s"
                for m in methods))
    return TimingReport(rows=rows, speedups=speedups, axis=axis, g=g,
                        seed=seed, fingerprint=table.fingerprint())


def welch_t_test(sample_a: Sequence[float],
                 sample_b: Sequence[float]) -> tuple[float, float, bool]:
    """Welch's unequal-variance t-test, two-sided.

    Returns (t, p, significant at 0.05).  Two samples with zero variance
    and equal means give p = 1 by convention (no evidence of difference);
    zero variance with distinct means gives p = 0.
    """
    a = np.asarray(list(sample_a), dtype=np.float64)
    b = np.asarray(list(sample_b), dtype=np.float64)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least 2 values")
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    ma, mb = float(np.mean(a)), float(np.mean(b))
    if va == 0.0 and vb == 0.0:
        if ma == mb:
            return 0.0, 1.0, False
        return math.copysign(math.inf, ma - mb), 0.0, True
    sa, sb = va / a.size, vb / b.size
    t = (ma - mb) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa ** 2 / (a.size - 1) + sb ** 2 / (b.size - 1))
    p = 2.0 * float(stdtr(df, -abs(t)))
    return t, p, p < 0.05
