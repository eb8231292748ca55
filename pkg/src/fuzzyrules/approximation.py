"""Fuzzy-rough approximations and the consistence degree.

The consistence degree of an instance x on attribute subset B is the minimum
separation S(N(sim_B(x, y)), alpha) over all instances y with a different
label.  Geometrically it is the radius of the largest ball around x (in the
similarity metric on B) that contains no differently-labeled instance.  It
equals the robust lower approximation of x's own decision class evaluated
at x, which is the property test that pins both implementations together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .operators import np_separation, np_similarity
from .table import FuzzyDecisionTable


@dataclass(frozen=True)
class FuzzySet:
    """Membership degrees over a table's instances."""

    membership: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "membership",
                           np.asarray(self.membership, dtype=np.float64))
        if self.membership.ndim != 1:
            raise ValueError("membership must be a 1-d sequence")
        if self.membership.min() < 0.0 or self.membership.max() > 1.0:
            raise ValueError("membership degrees must lie in [0, 1]")

    @classmethod
    def crisp(cls, indices, n: int) -> "FuzzySet":
        mem = np.zeros(n)
        mem[list(indices)] = 1.0
        return cls(mem)

    @classmethod
    def decision_class_of(cls, table: FuzzyDecisionTable, x: int) -> "FuzzySet":
        """Indicator of the instances sharing x's label (includes x)."""
        return cls((table.labels == table.labels[x]).astype(np.float64))


def check_alpha(alpha: float, induction: bool = False) -> float:
    """Validate a robustness threshold.

    Generic approximation operators accept alpha in [0, 1]; the induction
    entry points additionally reject alpha = 1, which would make every
    separation test vacuous.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if induction and alpha >= 1.0:
        raise ValueError(f"induction requires alpha in [0, 1), got {alpha}")
    return alpha


def _subset_sims(table: FuzzyDecisionTable, B: Sequence[int], x: int) -> np.ndarray:
    """Similarity of x to every instance on subset B (1.0 for empty B)."""
    cols = list(B)
    if not cols:
        return np.ones(table.n)
    sims = np_similarity(table.values[x, cols], table.values[:, cols])
    return sims.min(axis=1)


def lower_classic(table: FuzzyDecisionTable, B: Sequence[int],
                  A: FuzzySet, x: int) -> float:
    """inf over u of max{1 - sim_B(x, u), A(u)}."""
    sims = _subset_sims(table, B, x)
    return float(np.min(np.maximum(1.0 - sims, A.membership)))


def upper_classic(table: FuzzyDecisionTable, B: Sequence[int],
                  A: FuzzySet, x: int) -> float:
    """sup over u of min{sim_B(x, u), A(u)}."""
    sims = _subset_sims(table, B, x)
    return float(np.max(np.minimum(sims, A.membership)))


def lower_robust(table: FuzzyDecisionTable, B: Sequence[int], A: FuzzySet,
                 alpha: float, x: int) -> float:
    """Robust lower approximation of A at x.

    Splits the universe at membership alpha: low-membership instances are
    separated at level alpha, high-membership ones at their own membership.
    Empty infima count as 1.
    """
    alpha = check_alpha(alpha)
    sims = _subset_sims(table, B, x)
    mem = A.membership
    low = mem <= alpha
    parts = []
    if low.any():
        parts.append(np.min(np_separation(sims[low], alpha)))
    if (~low).any():
        parts.append(np.min(np.minimum(1.0, (1.0 - sims[~low]) + mem[~low])))
    return float(min(parts)) if parts else 1.0


def upper_robust(table: FuzzyDecisionTable, B: Sequence[int], A: FuzzySet,
                 alpha: float, x: int) -> float:
    """Robust upper approximation of A at x (dual of lower_robust).

    Uses the residuation sigma(a, b) = max{0, b - a}; empty suprema count
    as 0.  No inducer consumes this operator; it is provided for coverage.
    """
    alpha = check_alpha(alpha)
    sims = _subset_sims(table, B, x)
    mem = A.membership
    n_alpha = 1.0 - alpha
    high = mem >= n_alpha
    parts = []
    if high.any():
        parts.append(np.max(np.maximum(0.0, n_alpha - (1.0 - sims[high]))))
    if (~high).any():
        parts.append(np.max(np.maximum(0.0, mem[~high] - (1.0 - sims[~high]))))
    return float(max(parts)) if parts else 0.0


def consistence_degree(table: FuzzyDecisionTable, B: Sequence[int],
                       alpha: float, x: int) -> float:
    """Minimum separation of x from its differently-labeled instances on B.

    Returns 1 when no differently-labeled instance exists (empty minimum),
    so single-class tables make every instance maximally consistent.
    """
    alpha = check_alpha(alpha)
    het = table.labels != table.labels[x]
    if not het.any():
        return 1.0
    sims = _subset_sims(table, B, x)
    return float(np.min(np_separation(sims[het], alpha)))


def consistence_degree_restricted(table: FuzzyDecisionTable, B: Sequence[int],
                                  alpha: float, x: int,
                                  universe: Sequence[int]) -> float:
    """Consistence degree of x computed inside a sub-universe."""
    alpha = check_alpha(alpha)
    universe = np.asarray(sorted(set(int(u) for u in universe)), dtype=np.int64)
    if universe.size and (universe[0] < 0 or universe[-1] >= table.n):
        raise IndexError("universe contains out-of-range instance indices")
    het = universe[table.labels[universe] != table.labels[x]]
    if het.size == 0:
        return 1.0
    cols = list(B)
    if not cols:
        sims = np.ones(het.size)
    else:
        sims = np_similarity(table.values[x, cols], table.values[het][:, cols]).min(axis=1)
    return float(np.min(np_separation(sims, alpha)))


def sig1(table: FuzzyDecisionTable, a: int, B: Sequence[int],
         x: int, alpha: float) -> float:
    """Significance of adding attribute a to B for instance x.

    The gain in consistence degree on the full universe; non-negative by
    monotonicity (clamped at 0 against floating error).
    """
    B = list(B)
    if a in B:
        raise ValueError(f"attribute {a} is already in B")
    gain = (consistence_degree(table, B + [a], alpha, x)
            - consistence_degree(table, B, alpha, x))
    return max(0.0, gain)
