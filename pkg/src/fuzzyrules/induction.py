"""Per-instance attribute-value reduction (rule induction).

Three inducers produce, for each instance, a minimal attribute subset that
preserves its consistence degree:

* ``cvr_reduct``   - greedy forward selection by significance, evaluated on
                     the full universe every iteration, then a backward
                     deletion pass.
* ``acvr_reduct``  - the accelerated twin: each instance keeps a *key set*
                     of differently-labeled instances not yet separated at
                     the consistence threshold.  Significance is evaluated
                     on the key set only, which shrinks monotonically as
                     attributes are added.  Selection order and result are
                     exactly equal to ``cvr_reduct`` by construction (both
                     run through the same arithmetic kernels), which the
                     test suite asserts without tolerance.
* ``dvr_reduct``   - an independent set-cover style reducer over an explicit
                     discernibility vector; used as a validity oracle.

Tie-breaking everywhere is "lowest attribute index among maxima", which is
what makes the accelerated/unaccelerated equality a testable exact property.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .approximation import check_alpha
from .operators import np_separation, np_similarity
from .table import FuzzyDecisionTable, find_inconsistent

INDUCERS = ("cvr", "a-cvr", "dvr")


@dataclass(frozen=True)
class Reduct:
    """A per-instance value reduction: the antecedent of one induced rule.

    ``attributes`` is kept in selection order so the accelerated and plain
    inducers can be compared for exact equality; validity under the
    minimality conditions is order-independent.
    """

    owner: int
    attributes: tuple[int, ...]
    values: tuple[float, ...]
    label: int
    radius: float            # consistence degree of the owner on all attributes
    alpha: float

    def to_record(self, class_names: Sequence[str]) -> dict:
        return {
            "instance": self.owner,
            "attributes": list(self.attributes),
            "values": list(self.values),
            "label": class_names[self.label],
            "radius": self.radius,
        }


@dataclass(frozen=True)
class KeyState:
    """Partition of an instance's differently-labeled instances.

    ``discernible`` holds those already separated from the owner at the
    consistence threshold by the current attribute set; ``key`` holds the
    remainder - the only instances that can still change the consistence
    degree as the attribute set grows.
    """

    owner: int
    current_B: tuple[int, ...]
    discernible: frozenset[int]
    key: frozenset[int]
    con_full: float


@dataclass(frozen=True)
class DiscernibilityVector:
    """For each differently-labeled instance j, the attributes that
    separate the owner from j at the owner's consistence threshold."""

    owner: int
    entries: dict[int, frozenset[int]]


def _con_from_sims(sims: np.ndarray, alpha: float) -> float:
    """Minimum separation over a similarity vector.

    The separation degree is weakly decreasing in similarity, so the
    minimum over per-instance separations equals the separation of the
    single maximal similarity; one reduction instead of a full pass.
    """
    return float(np_separation(sims.max(), alpha))


class _InstanceContext:
    """Shared per-instance precomputation: similarity of the owner to every
    differently-labeled instance, one column per attribute."""

    __slots__ = ("x", "het", "simmat", "sim_c", "con_c", "alpha", "n_attrs")

    def __init__(self, table: FuzzyDecisionTable, alpha: float, x: int):
        self.x = x
        self.alpha = alpha
        self.n_attrs = table.m
        self.het = np.flatnonzero(table.labels != table.labels[x])
        if self.het.size:
            self.simmat = np_similarity(table.values[x], table.values[self.het])
            self.sim_c = self.simmat.min(axis=1)
            self.con_c = _con_from_sims(self.sim_c, alpha)
        else:
            self.simmat = np.empty((0, table.m))
            self.sim_c = np.empty(0)
            self.con_c = 1.0

    def con_on(self, attrs: Sequence[int]) -> float:
        """Consistence degree of the owner on an attribute subset."""
        if not self.het.size:
            return 1.0
        cols = list(attrs)
        sims = self.simmat[:, cols].min(axis=1) if cols else np.ones(self.het.size)
        return _con_from_sims(sims, self.alpha)


def _backward_delete(ctx: _InstanceContext, selected: list[int]) -> list[int]:
    """Drop attributes whose removal keeps the consistence degree at the
    full-attribute value.  Scans in selection order; deletions take effect
    immediately, which guarantees no single removable attribute remains."""
    kept = list(selected)
    for b in selected:
        rest = [c for c in kept if c != b]
        if ctx.con_on(rest) == ctx.con_c:
            kept = rest
    return kept


def _finish(table: FuzzyDecisionTable, ctx: _InstanceContext,
            attrs: list[int]) -> Reduct:
    return Reduct(
        owner=ctx.x,
        attributes=tuple(attrs),
        values=tuple(float(table.values[ctx.x, a]) for a in attrs),
        label=int(table.labels[ctx.x]),
        radius=ctx.con_c,
        alpha=ctx.alpha,
    )


def cvr_reduct(table: FuzzyDecisionTable, alpha: float, x: int) -> Reduct:
    """Greedy value reduction driven by full-universe significance."""
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    if not ctx.het.size:
        return _finish(table, ctx, [])

    sim_b = np.ones(ctx.het.size)
    con_b = float(np_separation(sim_b, alpha).min())
    lef = list(range(ctx.n_attrs))
    selected: list[int] = []
    while con_b < ctx.con_c:
        cand = np.minimum(sim_b[:, None], ctx.simmat[:, lef])
        cons = np_separation(cand, alpha).min(axis=0)
        sigs = np.maximum(0.0, cons - con_b)
        best = int(np.argmax(sigs))          # first max = lowest attribute index
        a = lef.pop(best)
        selected.append(a)
        sim_b = np.minimum(sim_b, ctx.simmat[:, a])
        con_b = float(cons[best])
    return _finish(table, ctx, _backward_delete(ctx, selected))


def _acvr_forward(ctx: _InstanceContext,
                  trace: Optional[list] = None) -> list[int]:
    """Forward phase on the shrinking key set.

    The newly-discernible test after each selection is applied to current
    key members only; instances already discernible are never rescanned.
    """
    alpha = ctx.alpha
    key = np.arange(ctx.het.size)
    sim_b = np.ones(ctx.het.size)
    still = np_separation(sim_b, alpha) < ctx.con_c
    key, sim_b = key[still], sim_b[still]
    lef = list(range(ctx.n_attrs))
    selected: list[int] = []
    if trace is not None:
        trace.append((tuple(selected), key.copy()))
    while key.size:
        con_b = float(np_separation(sim_b, alpha).min())
        cand = np.minimum(sim_b[:, None], ctx.simmat[np.ix_(key, lef)])
        charges = np_separation(cand, alpha)
        cons = charges.min(axis=0)
        key_survives = (charges < ctx.con_c).any(axis=0)
        # Adding a kills the key set -> the gain is measured up to the
        # full-attribute consistence degree, not the restricted minimum.
        sigs = np.maximum(0.0, np.where(key_survives, cons - con_b,
                                        ctx.con_c - con_b))
        best = int(np.argmax(sigs))
        a = lef.pop(best)
        selected.append(a)
        sim_b = np.minimum(sim_b, ctx.simmat[key, a])
        still = np_separation(sim_b, alpha) < ctx.con_c
        key, sim_b = key[still], sim_b[still]
        if trace is not None:
            trace.append((tuple(selected), key.copy()))
    return selected


def acvr_reduct(table: FuzzyDecisionTable, alpha: float, x: int) -> Reduct:
    """Key-set accelerated value reduction; result equals ``cvr_reduct``."""
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    if not ctx.het.size:
        return _finish(table, ctx, [])
    selected = _acvr_forward(ctx)
    return _finish(table, ctx, _backward_delete(ctx, selected))


def acvr_reduct_trace(table: FuzzyDecisionTable, alpha: float,
                      x: int) -> tuple[Reduct, list[KeyState]]:
    """Like ``acvr_reduct`` but also returns the key-set state after the
    initial scan and after every selection (for monotonicity checks)."""
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    if not ctx.het.size:
        return _finish(table, ctx, []), [
            KeyState(owner=x, current_B=(), discernible=frozenset(),
                     key=frozenset(), con_full=1.0)
        ]
    raw_trace: list = []
    selected = _acvr_forward(ctx, trace=raw_trace)
    het = ctx.het
    states = []
    all_het = frozenset(int(i) for i in het)
    for B, key_local in raw_trace:
        key_global = frozenset(int(het[i]) for i in key_local)
        states.append(KeyState(
            owner=x, current_B=B,
            discernible=all_het - key_global,
            key=key_global,
            con_full=ctx.con_c,
        ))
    return _finish(table, ctx, _backward_delete(ctx, selected)), states


def build_key_state(table: FuzzyDecisionTable, alpha: float, x: int,
                    B: Sequence[int]) -> KeyState:
    """Partition x's differently-labeled instances into discernible and key
    sets for attribute subset B."""
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    cols = list(B)
    if not ctx.het.size:
        return KeyState(owner=x, current_B=tuple(cols), discernible=frozenset(),
                        key=frozenset(), con_full=1.0)
    sims = ctx.simmat[:, cols].min(axis=1) if cols else np.ones(ctx.het.size)
    disc = np_separation(sims, alpha) >= ctx.con_c
    return KeyState(
        owner=x,
        current_B=tuple(cols),
        discernible=frozenset(int(i) for i in ctx.het[disc]),
        key=frozenset(int(i) for i in ctx.het[~disc]),
        con_full=ctx.con_c,
    )


def sig2(table: FuzzyDecisionTable, a: int, B: Sequence[int], x: int,
         state: KeyState, alpha: float) -> float:
    """Relative significance of attribute a, evaluated on the key set.

    Three cases: while the key set stays nonempty the gain is the increase
    of the restricted consistence degree; when adding a empties the key set
    the gain is measured up to the full consistence degree; with an already
    empty key set every attribute is worthless (0).
    """
    alpha = check_alpha(alpha, induction=True)
    B = list(B)
    if a in B:
        raise ValueError(f"attribute {a} is already in B")
    if not state.key:
        return 0.0
    key = np.asarray(sorted(state.key), dtype=np.int64)
    vx = table.values[x]
    sims_b = (np_similarity(vx[B], table.values[key][:, B]).min(axis=1)
              if B else np.ones(key.size))
    con_b = float(np_separation(sims_b, alpha).min())
    sims_ba = np.minimum(sims_b, np_similarity(vx[a], table.values[key, a]))
    charges = np_separation(sims_ba, alpha)
    if (charges < state.con_full).any():
        gain = float(charges.min()) - con_b
    else:
        gain = state.con_full - con_b
    return max(0.0, gain)


def discernibility_vector(table: FuzzyDecisionTable, alpha: float,
                          x: int) -> DiscernibilityVector:
    """Attributes separating x from each differently-labeled instance at
    x's consistence threshold (residuation-form membership test)."""
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    entries: dict[int, frozenset[int]] = {}
    if ctx.het.size:
        member = np.maximum(0.0, ctx.con_c - (1.0 - ctx.simmat)) <= alpha
        for row, j in enumerate(ctx.het):
            entries[int(j)] = frozenset(int(a) for a in np.flatnonzero(member[row]))
    return DiscernibilityVector(owner=x, entries=entries)


def dvr_reduct(table: FuzzyDecisionTable, alpha: float, x: int) -> Reduct:
    """Set-cover value reduction over the explicit discernibility vector.

    Core attributes (singleton entries) are taken first, then a greedy
    cover by count of uncovered entries; superfluous attributes are removed
    by the same backward deletion pass as the greedy inducers.  The result
    is a valid reduction but need not match ``cvr_reduct`` attribute for
    attribute.
    """
    alpha = check_alpha(alpha, induction=True)
    ctx = _InstanceContext(table, alpha, x)
    if not ctx.het.size:
        return _finish(table, ctx, [])

    member = np.maximum(0.0, ctx.con_c - (1.0 - ctx.simmat)) <= alpha
    active = np.flatnonzero(member.any(axis=1))       # entries still to cover
    singleton = active[member[active].sum(axis=1) == 1]
    core = sorted({int(np.flatnonzero(member[row])[0]) for row in singleton})

    selected = list(core)
    if core:
        covered = member[:, core].any(axis=1)
        active = active[~covered[active]]
    lef = [a for a in range(ctx.n_attrs) if a not in set(core)]
    while active.size:
        counts = member[np.ix_(active, lef)].sum(axis=0)
        best = int(np.argmax(counts))                 # first max = lowest index
        a = lef.pop(best)
        selected.append(a)
        active = active[~member[active, a]]
    return _finish(table, ctx, _backward_delete(ctx, selected))


def reduct_is_valid(table: FuzzyDecisionTable, reduct: Reduct) -> bool:
    """Check both minimality conditions against the consistence degree on
    the full universe: the subset preserves it, and no single attribute can
    be dropped without changing it."""
    from .approximation import consistence_degree

    attrs = list(reduct.attributes)
    con_c = consistence_degree(table, range(table.m), reduct.alpha, reduct.owner)
    if consistence_degree(table, attrs, reduct.alpha, reduct.owner) != con_c:
        return False
    for b in attrs:
        rest = [c for c in attrs if c != b]
        if consistence_degree(table, rest, reduct.alpha, reduct.owner) == con_c:
            return False
    return True


_METHODS = {
    "cvr": cvr_reduct,
    "a-cvr": acvr_reduct,
    "dvr": dvr_reduct,
}


def induce_all(table: FuzzyDecisionTable, alpha: float, method: str = "a-cvr",
               threads: int = 1) -> list[Reduct]:
    """Induce one reduct per instance, in instance order.

    Warns (without dropping anything) when the table contains instances
    with identical condition values but different labels: their consistence
    radius degenerates to alpha and the resulting rules cover nothing.
    """
    alpha = check_alpha(alpha, induction=True)
    try:
        fn = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown induction method {method!r}; "
                         f"choose one of {INDUCERS}") from None

    bad = find_inconsistent(table)
    if bad:
        shown = ", ".join(str(i) for i in bad[:10])
        more = "" if len(bad) <= 10 else f" (and {len(bad) - 10} more)"
        warnings.warn(
            f"{len(bad)} instances share identical condition values with a "
            f"different label: {shown}{more}; their consistence radius "
            f"degenerates to alpha={alpha} and the induced rules cover "
            f"nothing. Run drop_inconsistent first.",
            UserWarning, stacklevel=2)

    def one(x: int) -> Reduct:
        try:
            return fn(table, alpha, x)
        except Exception as exc:
            raise RuntimeError(f"induction failed at instance {x}: {exc}") from exc

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(table.n)))
    return [one(x) for x in range(table.n)]
