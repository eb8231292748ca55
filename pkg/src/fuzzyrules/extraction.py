"""Cover semantics and near-minimal rule-set extraction.

A rule covers an instance when they share a class and the instance lies
strictly inside the rule's consistence ball: the separation of the instance
from the rule's generator on the rule's attributes stays below the radius.
Coverage is therefore the exact complement of discernibility at the
induction threshold, and every rule with radius > alpha covers itself.

Three strategies select a near-minimal subset from the induced pool:

* ``extract_gfrc``    - forward adding: repeatedly take the rule covering
                        the most not-yet-covered generators.
* ``extract_lem2``    - backward deleting: drop a rule when another
                        still-present rule covers its generator.
* ``extract_vcdomle`` - backward deleting on instance covers: drop a rule
                        when the instances it covers are covered by the
                        union of the other surviving rules.

All tie-breaks are deterministic (maximum cover degree, then lowest
generator index) so differential tests can assert exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .induction import Reduct
from .operators import np_separation, np_similarity
from .table import FuzzyDecisionTable


@dataclass(frozen=True)
class InducedRule:
    """A reduct plus the cover degree assigned during extraction."""

    owner: int
    attributes: tuple[int, ...]
    values: tuple[float, ...]
    label: int
    radius: float
    alpha: float
    cover_degree: int = 0

    @classmethod
    def from_reduct(cls, reduct: Reduct) -> "InducedRule":
        return cls(owner=reduct.owner, attributes=reduct.attributes,
                   values=reduct.values, label=reduct.label,
                   radius=reduct.radius, alpha=reduct.alpha)

    def with_cover(self, cover: int) -> "InducedRule":
        return replace(self, cover_degree=int(cover))


@dataclass(frozen=True)
class RuleSet:
    """An ordered rule collection; owners are unique."""

    rules: tuple[InducedRule, ...]
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        owners = [r.owner for r in self.rules]
        if len(set(owners)) != len(owners):
            raise ValueError("duplicate rule owners in rule set")

    def __len__(self) -> int:
        return len(self.rules)

    def owners(self) -> list[int]:
        return [r.owner for r in self.rules]

    @classmethod
    def from_reducts(cls, reducts: Sequence[Reduct], alpha: float) -> "RuleSet":
        return cls(tuple(InducedRule.from_reduct(r) for r in reducts), alpha)


def matching_degree(rule: InducedRule, row: np.ndarray) -> float:
    """Similarity of an instance row to the rule's prototype on its
    attributes; 1.0 for an empty antecedent."""
    if not rule.attributes:
        return 1.0
    sims = np_similarity(np.asarray(rule.values), row[list(rule.attributes)])
    return float(sims.min())


def rule_covers_instance(rule: InducedRule, table: FuzzyDecisionTable,
                         y: int) -> bool:
    """Same class and strictly inside the generator's consistence ball."""
    if int(table.labels[y]) != rule.label:
        return False
    sim = matching_degree(rule, table.values[y])
    return bool(np_separation(sim, rule.alpha) < rule.radius)


def rule_covers_rule(r: InducedRule, s: InducedRule,
                     table: FuzzyDecisionTable) -> bool:
    """A rule covers another rule when it covers the other's generator."""
    return rule_covers_instance(r, table, s.owner)


def cover_degree_rules(rule: InducedRule, pool: RuleSet,
                       table: FuzzyDecisionTable) -> int:
    """Number of pool rules covered by ``rule`` (itself included)."""
    return sum(1 for s in pool.rules if rule_covers_rule(rule, s, table))


def cover_matrix(rules: Sequence[InducedRule], table: FuzzyDecisionTable,
                 cols: Optional[Sequence[int]] = None) -> np.ndarray:
    """Boolean matrix: entry [i, j] = rule i covers instance cols[j].

    ``cols`` defaults to all table instances.  This is the shared kernel
    behind every extraction strategy.
    """
    cols = np.arange(table.n) if cols is None else np.asarray(list(cols), dtype=np.int64)
    out = np.zeros((len(rules), cols.size), dtype=bool)
    col_labels = table.labels[cols]
    col_values = table.values[cols]
    for i, rule in enumerate(rules):
        if rule.attributes:
            sims = np_similarity(np.asarray(rule.values),
                                 col_values[:, list(rule.attributes)]).min(axis=1)
        else:
            sims = np.ones(cols.size)
        out[i] = (col_labels == rule.label) & (np_separation(sims, rule.alpha)
                                               < rule.radius)
    return out


def _sorted_pool(pool: RuleSet) -> list[InducedRule]:
    return sorted(pool.rules, key=lambda r: r.owner)


def extract_gfrc(pool: RuleSet, table: FuzzyDecisionTable) -> RuleSet:
    """Forward-adding extraction by maximum cover degree.

    Each round moves the rule covering the most still-present generators
    into the result (ties: lowest generator index), then drops every rule
    whose generator it covers.  Selected rules record their selection-time
    cover degree.
    """
    if not pool.rules:
        raise ValueError("cannot extract from an empty rule pool")
    rules = _sorted_pool(pool)
    owners = np.array([r.owner for r in rules])
    M = cover_matrix(rules, table, cols=owners)
    active = np.ones(len(rules), dtype=bool)
    selected: list[InducedRule] = []
    while active.any():
        idx = np.flatnonzero(active)
        degrees = M[np.ix_(idx, idx)].sum(axis=1)
        pos = int(np.argmax(degrees))            # first max = lowest owner
        best = idx[pos]
        selected.append(rules[best].with_cover(int(degrees[pos])))
        active &= ~M[best]
        active[best] = False
    return RuleSet(tuple(selected), pool.alpha)


def extract_lem2(pool: RuleSet, table: FuzzyDecisionTable) -> RuleSet:
    """Backward deletion: one pass in owner order, dropping any rule whose
    generator is covered by another still-present rule."""
    if not pool.rules:
        raise ValueError("cannot extract from an empty rule pool")
    rules = _sorted_pool(pool)
    owners = np.array([r.owner for r in rules])
    M = cover_matrix(rules, table, cols=owners)
    np.fill_diagonal(M, False)                   # self-cover never deletes
    active = np.ones(len(rules), dtype=bool)
    for i in range(len(rules)):
        if M[active, i].any():
            active[i] = False
    survivors = [rules[i] for i in np.flatnonzero(active)]
    return _with_survivor_covers(survivors, table, pool.alpha)


def extract_vcdomle(pool: RuleSet, table: FuzzyDecisionTable) -> RuleSet:
    """Backward deletion on instance covers: drop a rule when every training
    instance it covers is also covered by some other surviving rule.

    Deleting under this test never changes the union of covered instances,
    so training coverage is preserved exactly.  Rules covering nothing are
    dropped unconditionally (an empty cover is contained in anything).
    """
    if not pool.rules:
        raise ValueError("cannot extract from an empty rule pool")
    rules = _sorted_pool(pool)
    M = cover_matrix(rules, table)               # rules x all instances
    counts = M.sum(axis=0)                       # covering rules per instance
    active = np.ones(len(rules), dtype=bool)
    for i in range(len(rules)):
        covered = M[i]
        if np.all(counts[covered] >= 2):         # someone else covers each
            active[i] = False
            counts[covered] -= 1
    survivors = [rules[i] for i in np.flatnonzero(active)]
    return _with_survivor_covers(survivors, table, pool.alpha)


def _with_survivor_covers(survivors: list[InducedRule],
                          table: FuzzyDecisionTable, alpha: float) -> RuleSet:
    """Recompute cover degrees of the surviving rules against each other."""
    if not survivors:
        return RuleSet((), alpha)
    owners = np.array([r.owner for r in survivors])
    M = cover_matrix(survivors, table, cols=owners)
    degrees = M.sum(axis=1)
    return RuleSet(tuple(r.with_cover(int(d)) for r, d in zip(survivors, degrees)),
                   alpha)


def covered_instances(ruleset: RuleSet, table: FuzzyDecisionTable) -> set[int]:
    """All training instances covered by at least one rule of the set."""
    if not ruleset.rules:
        return set()
    M = cover_matrix(ruleset.rules, table)
    return set(int(j) for j in np.flatnonzero(M.any(axis=0)))


EXTRACTORS = {
    "gfrc": extract_gfrc,
    "lem2": extract_lem2,
    "vcdomle": extract_vcdomle,
}
