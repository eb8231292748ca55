"""End-to-end rule classifiers: train, predict, save, load.

``train`` composes an inducer (cvr / a-cvr / dvr) with an extraction
strategy (gfrc / lem2 / vcdomle).  ``train_bsrc`` is the batch-sample
variant: it induces rules for small seeded batches and extracts greedily
between batches, so large tables never need a full induction pass before
the first rules appear.  With batch fraction 1 and cover threshold 0 it
degenerates to exactly the a-cvr + gfrc pipeline, which the test suite
asserts as set-and-order equality.

Models serialize to a versioned JSON document carrying the rules, the
normalization bounds and the training configuration; a round trip preserves
every prediction bit for bit.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .approximation import check_alpha
from .exceptions import DataError, FormatError, VersionError
from .extraction import (EXTRACTORS, InducedRule, RuleSet, cover_matrix,
                         matching_degree)
from .induction import INDUCERS, _METHODS as _INDUCER_FNS, induce_all
from .table import FuzzyDecisionTable

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Training knobs; beta/delta/seed only matter for the bsrc extractor."""

    alpha: float = 0.0
    inducer: str = "a-cvr"
    extractor: str = "gfrc"
    beta: float = 0.01
    delta: int = 0
    seed: int = 42

    def __post_init__(self):
        check_alpha(self.alpha, induction=True)
        if self.inducer not in INDUCERS:
            raise ValueError(f"unknown inducer {self.inducer!r}; choose from {INDUCERS}")
        if self.extractor not in (*EXTRACTORS, "bsrc"):
            raise ValueError(f"unknown extractor {self.extractor!r}; "
                             f"choose from {(*EXTRACTORS, 'bsrc')}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must lie in (0, 1], got {self.beta}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")


@dataclass(frozen=True)
class RuleClassifier:
    """A trained, immutable rule model."""

    rules: RuleSet
    normalization: list[tuple[float, float]]
    attribute_names: list[str]
    class_names: list[str]
    config: TrainConfig

    @property
    def m(self) -> int:
        return len(self.normalization)

    def rule_records(self) -> list[dict]:
        return [{
            "owner": r.owner,
            "attributes": list(r.attributes),
            "values": list(r.values),
            "label": self.class_names[r.label],
            "radius": r.radius,
            "cover_degree": r.cover_degree,
        } for r in self.rules.rules]


class PredictionResult(NamedTuple):
    label: str
    rule: InducedRule
    matching_degree: float
    clamped: bool           # true when the raw input fell outside the
                            # training range and was clamped after scaling


def _require_trainable(table: FuzzyDecisionTable) -> None:
    if not table.is_normalized:
        raise ValueError("training requires a normalized table; "
                         "run normalize_min_max first")


def train(table: FuzzyDecisionTable, config: TrainConfig,
          threads: int = 1, timers: Optional[dict] = None) -> RuleClassifier:
    """Induce a rule per instance, then extract a near-minimal subset.

    ``timers``, when given, accumulates wall seconds under the keys
    "induce" and "extract" (used by the scaling benchmark).
    """
    _require_trainable(table)
    if config.extractor == "bsrc":
        return train_bsrc(table, config, timers=timers)

    t0 = time.perf_counter()
    reducts = induce_all(table, config.alpha, method=config.inducer,
                         threads=threads)
    t1 = time.perf_counter()
    pool = RuleSet.from_reducts(reducts, config.alpha)
    rules = EXTRACTORS[config.extractor](pool, table)
    t2 = time.perf_counter()
    if timers is not None:
        timers["induce"] = timers.get("induce", 0.0) + (t1 - t0)
        timers["extract"] = timers.get("extract", 0.0) + (t2 - t1)
    return RuleClassifier(
        rules=rules,
        normalization=list(table.normalization),
        attribute_names=list(table.attribute_names),
        class_names=list(table.class_names),
        config=config,
    )


def train_bsrc(table: FuzzyDecisionTable, config: TrainConfig,
               timers: Optional[dict] = None) -> RuleClassifier:
    """Batch-sample training.

    Repeats until the instance pool drains: sample ceil(beta * |T|)
    instances without replacement (seeded), induce their rules, then
    greedily move rules whose cover degree exceeds delta into the result,
    deleting covered rules and instances.  Cover degrees count covered
    items among the candidate rules' generators and the instances still in
    the pool.
    """
    _require_trainable(table)
    if config.extractor != "bsrc":
        raise ValueError("train_bsrc requires extractor='bsrc'")
    inducer = _INDUCER_FNS[config.inducer]
    rng = np.random.default_rng(config.seed)
    t_induce = 0.0
    t_extract = 0.0

    remaining = list(range(table.n))
    red: list[InducedRule] = []
    omega: list[InducedRule] = []
    while remaining:
        size = math.ceil(config.beta * len(remaining))
        pick = rng.choice(len(remaining), size=size, replace=False)
        batch = sorted(remaining[i] for i in pick)
        batch_set = set(batch)
        remaining = [t for t in remaining if t not in batch_set]

        t0 = time.perf_counter()
        red.extend(InducedRule.from_reduct(inducer(table, config.alpha, x))
                   for x in batch)
        red.sort(key=lambda r: r.owner)
        t_induce += time.perf_counter() - t0

        t0 = time.perf_counter()
        items = np.array(sorted({r.owner for r in red} | set(remaining)),
                         dtype=np.int64)
        M = cover_matrix(red, table, cols=items)
        item_pos = {int(v): i for i, v in enumerate(items)}
        rule_active = np.ones(len(red), dtype=bool)
        item_active = np.ones(items.size, dtype=bool)
        while rule_active.any():
            idx = np.flatnonzero(rule_active)
            degrees = M[np.ix_(idx, item_active)].sum(axis=1)
            pos = int(np.argmax(degrees))        # ties: lowest owner (red sorted)
            if degrees[pos] <= config.delta:
                break
            best = idx[pos]
            omega.append(red[best].with_cover(int(degrees[pos])))
            item_active &= ~M[best]
            item_active[item_pos[red[best].owner]] = False
            covered_rule = np.array([M[best, item_pos[r.owner]] for r in red])
            rule_active &= ~covered_rule
            rule_active[best] = False
        red = [red[i] for i in np.flatnonzero(rule_active)]
        remaining = [t for t in remaining if item_active[item_pos[t]]]
        t_extract += time.perf_counter() - t0

    if timers is not None:
        timers["induce"] = timers.get("induce", 0.0) + t_induce
        timers["extract"] = timers.get("extract", 0.0) + t_extract
    return RuleClassifier(
        rules=RuleSet(tuple(omega), config.alpha),
        normalization=list(table.normalization),
        attribute_names=list(table.attribute_names),
        class_names=list(table.class_names),
        config=config,
    )


def _normalize_row(normalization: Sequence[tuple[float, float]],
                   raw: np.ndarray) -> tuple[np.ndarray, bool]:
    lo = np.array([b[0] for b in normalization])
    hi = np.array([b[1] for b in normalization])
    span = hi - lo
    z = np.zeros_like(raw, dtype=np.float64)
    ok = span > 0
    z[ok] = (raw[ok] - lo[ok]) / span[ok]
    clipped = np.clip(z, 0.0, 1.0)
    return clipped, bool((clipped != z).any())


def predict(classifier: RuleClassifier, raw_instance: Sequence[float]) -> PredictionResult:
    """Classify one raw instance by its best-matching rule.

    The instance is scaled with the stored training bounds (clamped to
    [0, 1] when out of range) and assigned the label of the rule with the
    highest matching similarity; ties fall to the higher cover degree,
    then to the earlier rule in selection order.
    """
    raw = np.asarray(list(raw_instance), dtype=np.float64)
    if raw.shape != (classifier.m,):
        raise ValueError(f"expected {classifier.m} attribute values, got {raw.shape}")
    if not classifier.rules.rules:
        raise DataError("classifier has no rules")
    z, clamped = _normalize_row(classifier.normalization, raw)
    best = None
    for rule in classifier.rules.rules:
        deg = matching_degree(rule, z)
        if best is None or deg > best[0] or (deg == best[0]
                                             and rule.cover_degree > best[1].cover_degree):
            best = (deg, rule)
    deg, rule = best
    return PredictionResult(label=classifier.class_names[rule.label],
                            rule=rule, matching_degree=deg, clamped=clamped)


def predict_batch(classifier: RuleClassifier,
                  raw_matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized prediction: returns (label ids, winning rule positions,
    matching degrees) for a matrix of raw instances."""
    raw = np.asarray(raw_matrix, dtype=np.float64)
    if raw.ndim != 2 or raw.shape[1] != classifier.m:
        raise ValueError(f"expected an n x {classifier.m} matrix, got {raw.shape}")
    if not classifier.rules.rules:
        raise DataError("classifier has no rules")
    lo = np.array([b[0] for b in classifier.normalization])
    hi = np.array([b[1] for b in classifier.normalization])
    span = hi - lo
    z = np.zeros_like(raw)
    ok = span > 0
    z[:, ok] = (raw[:, ok] - lo[ok]) / span[ok]
    z = np.clip(z, 0.0, 1.0)

    rules = classifier.rules.rules
    D = np.ones((len(rules), z.shape[0]))
    for i, rule in enumerate(rules):
        if rule.attributes:
            sims = 1.0 - np.abs(z[:, list(rule.attributes)] - np.asarray(rule.values))
            D[i] = sims.min(axis=1)
    # tie-break rank: higher cover degree first, then earlier selection order
    order = sorted(range(len(rules)),
                   key=lambda i: (-rules[i].cover_degree, i))
    rank = np.empty(len(rules), dtype=np.int64)
    rank[order] = np.arange(len(rules))
    best_deg = D.max(axis=0)
    masked_rank = np.where(D == best_deg, rank[:, None], len(rules) + 1)
    winner = masked_rank.argmin(axis=0)
    labels = np.array([rules[w].label for w in winner], dtype=np.int64)
    return labels, winner, best_deg


def save_model(classifier: RuleClassifier, path) -> None:
    """Write the model as deterministic, versioned JSON."""
    doc = {
        "version": MODEL_SCHEMA_VERSION,
        "alpha": classifier.config.alpha,
        "config": asdict(classifier.config),
        "normalization": [[lo, hi] for lo, hi in classifier.normalization],
        "attribute_names": classifier.attribute_names,
        "class_names": classifier.class_names,
        "rules": classifier.rule_records(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _field(doc: dict, name: str, kind, where: str):
    if name not in doc:
        raise FormatError("missing required field", field=f"{where}{name}")
    value = doc[name]
    if kind is not None and not isinstance(value, kind):
        raise FormatError(f"expected {kind.__name__}", field=f"{where}{name}")
    return value


def load_model(path) -> RuleClassifier:
    """Load a model written by ``save_model``; strict about schema."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("model document must be a JSON object")

    version = _field(doc, "version", int, "")
    if version != MODEL_SCHEMA_VERSION:
        raise VersionError(f"unsupported model schema version {version}; "
                           f"this build reads version {MODEL_SCHEMA_VERSION}")

    cfg_doc = _field(doc, "config", dict, "")
    try:
        config = TrainConfig(**cfg_doc)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad training config: {exc}", field="config") from exc

    normalization = [(float(lo), float(hi))
                     for lo, hi in _field(doc, "normalization", list, "")]
    attribute_names = [str(s) for s in _field(doc, "attribute_names", list, "")]
    class_names = [str(s) for s in _field(doc, "class_names", list, "")]
    if len(normalization) != len(attribute_names):
        raise FormatError("normalization and attribute_names lengths differ",
                          field="normalization")

    rules = []
    for i, rec in enumerate(_field(doc, "rules", list, "")):
        where = f"rules[{i}]."
        label_name = _field(rec, "label", str, where)
        if label_name not in class_names:
            raise FormatError(f"unknown class {label_name!r}", field=where + "label")
        attributes = tuple(int(a) for a in _field(rec, "attributes", list, where))
        values = tuple(float(v) for v in _field(rec, "values", list, where))
        if len(attributes) != len(values):
            raise FormatError("attributes and values lengths differ",
                              field=where + "values")
        if any(not 0 <= a < len(attribute_names) for a in attributes):
            raise FormatError("attribute index out of range", field=where + "attributes")
        rules.append(InducedRule(
            owner=int(_field(rec, "owner", int, where)),
            attributes=attributes,
            values=values,
            label=class_names.index(label_name),
            radius=float(_field(rec, "radius", None, where)),
            alpha=config.alpha,
            cover_degree=int(_field(rec, "cover_degree", int, where)),
        ))
    return RuleClassifier(
        rules=RuleSet(tuple(rules), config.alpha),
        normalization=normalization,
        attribute_names=attribute_names,
        class_names=class_names,
        config=config,
    )
