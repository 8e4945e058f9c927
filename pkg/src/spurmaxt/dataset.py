"""Grouped multivariate samples: CSV ingestion, validation and group means."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParseError, SchemaError, ValidationError


@dataclass(frozen=True)
class GroupedDataset:
    """Samples for groups ``0..m``; group 0 is the control.

    ``groups[u]`` is an ``n_u x p`` float array. ``labels[u]`` keeps the label
    the group carried in the source file.
    """

    groups: tuple
    variable_names: tuple = ()
    labels: tuple = ()

    def __post_init__(self):
        groups = tuple(np.array(g, dtype=float, ndmin=2) for g in self.groups)
        for g in groups:
            g.setflags(write=False)
        object.__setattr__(self, "groups", groups)
        if len(groups) < 2:
            raise ValidationError("need >= 2 groups (one control and at least one case)")
        p = groups[0].shape[1]
        if p < 1:
            raise ValidationError("need at least one variable")
        for u, g in enumerate(groups):
            if g.ndim != 2 or g.shape[1] != p:
                raise ValidationError(f"group {u} has {g.shape[-1]} variables, expected {p}")
            if g.shape[0] < 2:
                raise ValidationError(f"group {u} has n<2 (n={g.shape[0]})")
            if not np.all(np.isfinite(g)):
                raise ValidationError(f"group {u} contains non-finite values")
        names = tuple(self.variable_names) or tuple(f"v{j + 1}" for j in range(p))
        if len(names) != p:
            raise ValidationError(f"{len(names)} variable names for {p} variables")
        object.__setattr__(self, "variable_names", names)
        labels = tuple(self.labels) or tuple(range(len(groups)))
        if len(labels) != len(groups) or len(set(labels)) != len(labels):
            raise ValidationError("group labels must be unique, one per group")
        object.__setattr__(self, "labels", labels)

    @property
    def m(self):
        """Number of case groups."""
        return len(self.groups) - 1

    @property
    def p(self):
        return self.groups[0].shape[1]

    @property
    def sizes(self):
        return tuple(g.shape[0] for g in self.groups)

    def n(self, u):
        return self.groups[u].shape[0]

    def swap_groups(self, a, b):
        """Dataset with groups ``a`` and ``b`` exchanged."""
        groups = list(self.groups)
        labels = list(self.labels)
        groups[a], groups[b] = groups[b], groups[a]
        labels[a], labels[b] = labels[b], labels[a]
        return GroupedDataset(tuple(groups), self.variable_names, tuple(labels))

    def select_variables(self, columns):
        columns = list(columns)
        return GroupedDataset(
            tuple(g[:, columns] for g in self.groups),
            tuple(self.variable_names[c] for c in columns),
            self.labels,
        )


@dataclass(frozen=True)
class GroupSummary:
    means: np.ndarray
    pooled_pair_means: dict = field(default_factory=dict)
    global_pooled_means: np.ndarray = None


def _pooled_mean(groups):
    total = sum(g.sum(axis=0) for g in groups)
    return total / sum(g.shape[0] for g in groups)


def summarize(ds):
    means = np.vstack([g.mean(axis=0) for g in ds.groups])
    pairs = {s: _pooled_mean((ds.groups[0], ds.groups[s])) for s in range(1, ds.m + 1)}
    return GroupSummary(means, pairs, _pooled_mean(ds.groups))


def _open_text(source, encoding="utf-8"):
    if isinstance(source, (str, os.PathLike)):
        return open(source, newline="", encoding=encoding), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode(encoding)), False
    if isinstance(source, io.TextIOBase):
        return source, False
    # binary stream
    return io.TextIOWrapper(source, encoding=encoding, newline=""), False


def _parse_label(cell, row):
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f"group label {cell!r} is not an integer", row) from None
    if not value.is_integer():
        raise ParseError(f"group label {cell!r} is not an integer", row)
    return int(value)


def load_csv(source, delimiter=",", header=True, group_column="group", control_label=0):
    """Read a wide-format CSV: one row per sample, one integer group column.

    ``source`` may be a path, bytes, a binary stream or a text stream. Groups
    are renumbered with ``control_label`` first, then the remaining labels in
    ascending order. Without a header, ``group_column`` must be a column index.
    """
    stream, owned = _open_text(source)
    try:
        rows = list(csv.reader(stream, delimiter=delimiter))
    except csv.Error as exc:
        raise ParseError(str(exc)) from None
    finally:
        if owned:
            stream.close()

    first_data_row = 1
    if header:
        if not rows:
            raise SchemaError("empty input: no header row")
        head = [c.strip() for c in rows[0]]
        rows = rows[1:]
        first_data_row = 2
        if isinstance(group_column, int):
            gcol = group_column
        elif group_column in head:
            gcol = head.index(group_column)
        else:
            raise SchemaError(f"group column {group_column!r} not found in header {head}")
        width = len(head)
    else:
        if not isinstance(group_column, int):
            raise SchemaError("without a header the group column must be given by index")
        gcol = group_column
        width = len(rows[0]) if rows else 0
        head = [f"v{j}" for j in range(width)]
    if not 0 <= gcol < max(width, 1):
        raise SchemaError(f"group column index {gcol} out of range")
    if width < 2:
        raise SchemaError("need a group column and at least one numeric column")

    var_cols = [c for c in range(width) if c != gcol]
    names = [head[c] for c in var_cols]
    if not header:
        names = [f"v{j + 1}" for j in range(len(var_cols))]

    labels = []
    values = []
    for offset, row in enumerate(rows):
        lineno = first_data_row + offset
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", lineno)
        labels.append(_parse_label(row[gcol].strip(), lineno))
        vals = []
        for c in var_cols:
            cell = row[c].strip()
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r} in column {head[c]!r}", lineno) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r} in column {head[c]!r}", lineno)
            vals.append(v)
        values.append(vals)

    if not values:
        raise ValidationError("no data rows")
    labels = np.asarray(labels)
    values = np.asarray(values, dtype=float)
    distinct = sorted(set(labels.tolist()))
    if len(distinct) < 2:
        raise ValidationError("need >= 2 groups")
    if control_label not in distinct:
        raise ValidationError(f"control label {control_label} not present (labels: {distinct})")
    order = [control_label] + [lab for lab in distinct if lab != control_label]
    groups = []
    for u, lab in enumerate(order):
        g = values[labels == lab]
        if g.shape[0] < 2:
            raise ValidationError(f"group {u} (label {lab}) has n<2")
        groups.append(g)
    return GroupedDataset(tuple(groups), tuple(names), tuple(order))


def write_csv(ds, target, delimiter=",", group_column="group"):
    """Inverse of :func:`load_csv` (original labels are written back)."""
    owned = isinstance(target, (str, os.PathLike))
    stream = open(target, "w", newline="", encoding="utf-8") if owned else target
    try:
        writer = csv.writer(stream, delimiter=delimiter, lineterminator="\n")
        writer.writerow([group_column, *ds.variable_names])
        for lab, g in zip(ds.labels, ds.groups):
            for row in g:
                writer.writerow([lab, *(repr(float(v)) for v in row)])
    finally:
        if owned:
            stream.close()
