"""Decision-table ingestion, normalization, consistency filtering, splitting.

A table is an n x m matrix of condition values plus a crisp label per row.
Induction requires values normalized to [0, 1]; ``load_csv`` returns a raw
table and ``normalize_min_max`` produces the normalized one, remembering the
per-attribute (min, max) so unseen instances can be mapped the same way at
prediction time.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .exceptions import DataError, ParseError


@dataclass
class FuzzyDecisionTable:
    """Instances over condition attributes C and one crisp decision label.

    ``normalization`` is None for raw tables; after min-max scaling it holds
    the original (min, max) per attribute.  Tables are treated as immutable
    once constructed.
    """

    values: np.ndarray                      # n x m float64
    labels: np.ndarray                      # n int64, dense ids 0..k-1
    attribute_names: list[str]
    class_names: list[str]                  # index = class id
    normalization: Optional[list[tuple[float, float]]] = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.values.ndim != 2:
            raise DataError("values must be a 2-d matrix")
        n, m = self.values.shape
        if n < 1 or m < 1:
            raise DataError(f"table must have n >= 1 and m >= 1, got {n} x {m}")
        if self.labels.shape != (n,):
            raise DataError("labels length must equal the number of instances")
        if len(self.attribute_names) != m:
            raise DataError("attribute_names length must equal the number of attributes")
        if self.labels.min() < 0 or self.labels.max() >= len(self.class_names):
            raise DataError("labels must be dense ids into class_names")
        if self.normalization is not None:
            if len(self.normalization) != m:
                raise DataError("normalization must hold one (min, max) per attribute")
            if self.values.min() < 0.0 or self.values.max() > 1.0:
                raise DataError("normalized values must lie in [0, 1]")
        self.values.setflags(write=False)
        self.labels.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @property
    def k(self) -> int:
        return len(self.class_names)

    @property
    def is_normalized(self) -> bool:
        return self.normalization is not None

    def subset(self, rows: Sequence[int]) -> "FuzzyDecisionTable":
        """New table containing the given rows (same attribute metadata)."""
        rows = np.asarray(list(rows), dtype=np.int64)
        return FuzzyDecisionTable(
            values=self.values[rows].copy(),
            labels=self.labels[rows].copy(),
            attribute_names=list(self.attribute_names),
            class_names=list(self.class_names),
            normalization=None if self.normalization is None else list(self.normalization),
        )

    def select_attributes(self, cols: Sequence[int]) -> "FuzzyDecisionTable":
        """New table restricted to the given attribute columns."""
        cols = list(cols)
        return FuzzyDecisionTable(
            values=self.values[:, cols].copy(),
            labels=self.labels.copy(),
            attribute_names=[self.attribute_names[c] for c in cols],
            class_names=list(self.class_names),
            normalization=None if self.normalization is None
            else [self.normalization[c] for c in cols],
        )

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.values).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        h.update("\x00".join(self.class_names).encode("utf-8"))
        return h.hexdigest()

    def fingerprint(self) -> dict:
        return {"n": self.n, "m": self.m, "classes": self.k, "sha256": self.content_hash()}


def from_normalized(values, labels, attribute_names=None, class_names=None) -> FuzzyDecisionTable:
    """Build a table directly from already-normalized values.

    Convenience for fixtures and synthetic data: normalization metadata is
    the identity (0, 1) per attribute.  ``labels`` may be any hashable
    values; they are densified in sorted order.
    """
    values = np.asarray(values, dtype=np.float64)
    if class_names is None:
        names = sorted({str(l) for l in labels})
        ids = {name: i for i, name in enumerate(names)}
        labels = np.array([ids[str(l)] for l in labels], dtype=np.int64)
        class_names = names
    else:
        labels = np.asarray(labels, dtype=np.int64)
    if attribute_names is None:
        attribute_names = [f"a{j + 1}" for j in range(values.shape[1])]
    return FuzzyDecisionTable(
        values=values,
        labels=labels,
        attribute_names=list(attribute_names),
        class_names=list(class_names),
        normalization=[(0.0, 1.0)] * values.shape[1],
    )


def load_csv(path, has_header: bool = True,
             label_column: Union[int, str, None] = None) -> FuzzyDecisionTable:
    """Load a raw (un-normalized) table from a comma-separated file.

    The label column defaults to the last column and may be selected by
    index or, with a header, by name.  Condition cells must parse as
    decimal reals; cells are trimmed; missing values are a parse error.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"empty input file: {path}")

    header = None
    if has_header:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"no data rows in {path}")

    arity = len(rows[0])
    if arity < 2:
        raise ParseError("need at least one condition column and one label column", row=1)
    for r, row in enumerate(rows):
        if len(row) != arity:
            raise ParseError(f"expected {arity} cells, found {len(row)}",
                             row=r + 1 + (1 if has_header else 0))

    if label_column is None:
        label_idx = arity - 1
    elif isinstance(label_column, int):
        label_idx = label_column if label_column >= 0 else arity + label_column
        if not 0 <= label_idx < arity:
            raise DataError(f"label column index {label_column} out of range for arity {arity}")
    else:
        if header is None:
            raise DataError("label column by name requires a header row")
        try:
            label_idx = header.index(label_column)
        except ValueError:
            raise DataError(f"label column {label_column!r} not found in header") from None

    cond_idx = [j for j in range(arity) if j != label_idx]
    n = len(rows)
    values = np.empty((n, len(cond_idx)), dtype=np.float64)
    raw_labels = []
    for r, row in enumerate(rows):
        file_row = r + 1 + (1 if has_header else 0)
        for c, j in enumerate(cond_idx):
            cell = row[j].strip()
            if not cell:
                raise ParseError("missing value", row=file_row, column=j + 1)
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise ParseError(f"cannot parse {cell!r} as a real number",
                                 row=file_row, column=j + 1) from None
        raw_labels.append(row[label_idx].strip())

    class_names = sorted(set(raw_labels))
    ids = {name: i for i, name in enumerate(class_names)}
    labels = np.array([ids[l] for l in raw_labels], dtype=np.int64)

    if header is not None:
        attribute_names = [header[j] for j in cond_idx]
    else:
        attribute_names = [f"a{c + 1}" for c in range(len(cond_idx))]

    return FuzzyDecisionTable(
        values=values,
        labels=labels,
        attribute_names=attribute_names,
        class_names=class_names,
        normalization=None,
    )


def normalize_min_max(table: FuzzyDecisionTable) -> FuzzyDecisionTable:
    """Map each attribute column into [0, 1] by (v - min) / (max - min).

    Constant columns map to 0.0 and are kept so attribute indices stay
    stable.  Already-normalized tables are returned unchanged, which makes
    the operation idempotent.
    """
    if table.is_normalized:
        return table
    mins = table.values.min(axis=0)
    maxs = table.values.max(axis=0)
    span = maxs - mins
    out = np.zeros_like(table.values)
    nonconst = span > 0
    out[:, nonconst] = (table.values[:, nonconst] - mins[nonconst]) / span[nonconst]
    return FuzzyDecisionTable(
        values=out,
        labels=table.labels.copy(),
        attribute_names=list(table.attribute_names),
        class_names=list(table.class_names),
        normalization=[(float(lo), float(hi)) for lo, hi in zip(mins, maxs)],
    )


def drop_inconsistent(table: FuzzyDecisionTable) -> tuple[FuzzyDecisionTable, int]:
    """Remove every instance whose exact condition row also occurs with a
    different label.  All members of a conflicting duplicate group go;
    same-label duplicates stay.  Returns (filtered table, removed count).
    """
    groups: dict[bytes, set[int]] = {}
    for i in range(table.n):
        key = table.values[i].tobytes()
        groups.setdefault(key, set()).add(int(table.labels[i]))
    keep = [i for i in range(table.n)
            if len(groups[table.values[i].tobytes()]) == 1]
    removed = table.n - len(keep)
    if removed == 0:
        return table, 0
    if not keep:
        raise DataError("all instances are inconsistent; nothing left to induce from")
    return table.subset(keep), removed


def find_inconsistent(table: FuzzyDecisionTable) -> list[int]:
    """Indices of instances that share a condition row with another class."""
    groups: dict[bytes, set[int]] = {}
    for i in range(table.n):
        key = table.values[i].tobytes()
        groups.setdefault(key, set()).add(int(table.labels[i]))
    return [i for i in range(table.n)
            if len(groups[table.values[i].tobytes()]) > 1]


@dataclass(frozen=True)
class FoldAssignment:
    """Deterministic fold labels for each instance."""

    fold_of: np.ndarray            # n ints in 0..k-1
    k: int
    seed: int
    stratified: bool = False

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["instance_index", "fold"])
            for i, f in enumerate(self.fold_of):
                writer.writerow([i, int(f)])


def split_folds(table: FuzzyDecisionTable, k: int, seed: int,
                stratified: bool = False) -> FoldAssignment:
    """Assign instances to k folds pseudo-randomly but reproducibly.

    Plain mode shuffles and deals round-robin, so fold sizes differ by at
    most one.  Stratified mode deals each class round-robin separately,
    balancing every class across folds to within one instance.
    """
    if k < 2:
        raise ValueError(f"fold count must be >= 2, got {k}")
    if k > table.n:
        raise ValueError(f"fold count {k} exceeds instance count {table.n}")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(table.n, dtype=np.int64)
    if stratified:
        for cls in range(table.k):
            members = np.flatnonzero(table.labels == cls)
            order = rng.permutation(members)
            fold_of[order] = np.arange(order.size) % k
    else:
        order = rng.permutation(table.n)
        fold_of[order] = np.arange(table.n) % k
    return FoldAssignment(fold_of=fold_of, k=k, seed=seed, stratified=stratified)


def split_subgroups(table: FuzzyDecisionTable, g: int, seed: int) -> list[np.ndarray]:
    """Split instance indices into g near-equal blocks (seeded shuffle).

    Remainder instances are distributed one per block from the first block,
    so block sizes differ by at most one.  Prefix unions of the blocks form
    the growing datasets used by the scaling benchmark.
    """
    if g < 1:
        raise ValueError(f"group count must be >= 1, got {g}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(table.n)
    base = table.n // g
    rem = table.n % g
    blocks = []
    start = 0
    for b in range(g):
        size = base + (1 if b < rem else 0)
        blocks.append(np.sort(order[start:start + size]))
        start += size
    return blocks
