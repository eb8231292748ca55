"""Łukasiewicz fuzzy operators and similarity kernels.

Every approximation in this package reduces to three ingredients: a bounded
t-norm/t-conorm pair, the standard negator, and a per-attribute similarity
1 - |v1 - v2| aggregated over attribute subsets by minimum.  The scalar
functions here validate their inputs; the ``np_*`` helpers are the unchecked
vectorized kernels used by the induction hot paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def _check_unit(value: float, name: str) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


def degree(value: float) -> float:
    """Validate a membership degree: a real in [0, 1]."""
    return _check_unit(value, "degree")


def t_norm(a: float, b: float) -> float:
    """Bounded (Łukasiewicz) conjunction: max{0, a + b - 1}."""
    a = _check_unit(a, "a")
    b = _check_unit(b, "b")
    return max(0.0, a + b - 1.0)


def t_conorm(a: float, b: float) -> float:
    """Bounded (Łukasiewicz) disjunction: min{1, a + b}."""
    a = _check_unit(a, "a")
    b = _check_unit(b, "b")
    return min(1.0, a + b)


def negator(a: float) -> float:
    """Standard negation 1 - a."""
    return 1.0 - _check_unit(a, "a")


def s_residuation(a: float, b: float) -> float:
    """Residuation of the bounded disjunction: max{0, b - a}.

    This is the unique sigma with sigma(a, b) <= c  iff  b <= S(a, c),
    which keeps the two discernibility formulations used by the inducers
    interchangeable (see the adjunction property test).
    """
    a = _check_unit(a, "a")
    b = _check_unit(b, "b")
    return max(0.0, b - a)


def residuated_implication(a: float, b: float) -> float:
    """Łukasiewicz implication min{1 - a + b, 1}."""
    a = _check_unit(a, "a")
    b = _check_unit(b, "b")
    return min(1.0 - a + b, 1.0)


def attribute_similarity(v1: float, v2: float) -> float:
    """Similarity of two normalized attribute values: 1 - |v1 - v2|.

    Raises ValueError when an input falls outside [0, 1]; that signals
    un-normalized data upstream.
    """
    v1 = _check_unit(v1, "v1")
    v2 = _check_unit(v2, "v2")
    return 1.0 - abs(v1 - v2)


def subset_similarity(table, B: Sequence[int], i: int, j: int) -> float:
    """Similarity of instances i and j on attribute subset B (min-aggregated).

    The empty subset has similarity 1 by the empty-min convention: with no
    attribute to tell them apart, any two instances look identical.
    """
    values = table.values
    n = values.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"instance index out of range: i={i}, j={j}, n={n}")
    cols = list(B)
    if not cols:
        return 1.0
    row_i = values[i, cols]
    row_j = values[j, cols]
    return float(np.min(1.0 - np.abs(row_i - row_j)))


@dataclass(frozen=True)
class OperatorFamily:
    """A named, pluggable t-norm/t-conorm/negator/residuation bundle."""

    name: str
    t_norm: Callable[[float, float], float]
    t_conorm: Callable[[float, float], float]
    negator: Callable[[float], float]
    s_residuation: Callable[[float, float], float]
    residuated_implication: Callable[[float, float], float]


LUKASIEWICZ = OperatorFamily(
    name="lukasiewicz",
    t_norm=t_norm,
    t_conorm=t_conorm,
    negator=negator,
    s_residuation=s_residuation,
    residuated_implication=residuated_implication,
)

_FAMILIES = {LUKASIEWICZ.name: LUKASIEWICZ}


def family(tag: str) -> OperatorFamily:
    """Look up an operator family by tag. Only 'lukasiewicz' is built in."""
    try:
        return _FAMILIES[tag]
    except KeyError:
        raise ValueError(
            f"unknown operator family {tag!r}; available: {sorted(_FAMILIES)}"
        ) from None


# ---------------------------------------------------------------------------
# Vectorized kernels (no validation; inputs are trusted normalized arrays).
# All induction paths must go through these two functions so that the
# accelerated and unaccelerated inducers perform bit-identical arithmetic.
# ---------------------------------------------------------------------------

def np_similarity(row: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Per-attribute similarities of one instance row against many rows.

    Returns an array shaped like ``rows``: 1 - |row - rows|.
    """
    return 1.0 - np.abs(rows - row)


def np_separation(sim, alpha: float):
    """Separation degree S(N(sim), alpha) = min{1, (1 - sim) + alpha}.

    This is the quantity every discernibility test compares against a
    consistence degree.  Works elementwise on arrays and on scalars.
    """
    return np.minimum(1.0, (1.0 - sim) + alpha)
