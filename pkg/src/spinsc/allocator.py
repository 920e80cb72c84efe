"""Generator-array sizing and switch-matrix allocation.

The switch controller walks the conflict sets in order and hands every
terminal the first free generator row of its probability level, re-using
rows across non-conflicting terminals.  Row choices avoid all conflict-graph
neighbors of a terminal, so a produced matrix is legal by construction; a
conflict set that needs more rows of one level than the array provides
raises CapacityExceeded.

A standalone verifier re-checks the three legality conditions (one row per
column, no conflicting pair on a shared row, level match) from the matrix
alone, independent of how it was built.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

from .logic import conflict_neighbors
from .sbg import SbgArraySpec, SbgMode
from .stochastic import Bitstream


class CapacityExceeded(RuntimeError):
    """A conflict set demands more rows of one level than the array holds."""

    def __init__(self, level: float, message: str) -> None:
        super().__init__(message)
        self.level = level


class UnknownLevel(KeyError):
    """An assignment value is not one of the array's probability levels."""


@dataclass(frozen=True)
class SwitchMatrix:
    """M x N' binary control matrix: rows are generators, columns terminals.

    Row i corresponds to the i-th unit of the array built from the same
    SbgArraySpec (level-major order, the order build_array emits).
    """

    control: np.ndarray          # uint8, shape (M, N')
    row_levels: tuple[float, ...]
    col_terminals: tuple[str, ...]

    @property
    def num_rows(self) -> int:
        return int(self.control.shape[0])

    @property
    def num_cols(self) -> int:
        return int(self.control.shape[1])

    def row_of(self, terminal: str) -> int:
        j = self.col_terminals.index(terminal)
        rows = np.flatnonzero(self.control[:, j])
        if rows.size != 1:
            raise ValueError(f"column {terminal!r} has {rows.size} active rows")
        return int(rows[0])

    def rows_in_use(self) -> list[int]:
        return [int(r) for r in np.flatnonzero(self.control.any(axis=1))]


def quantize_to_levels(value: float, levels: tuple[float, ...] | list[float]) -> float:
    """Nearest array level; exact midpoints resolve to the lower level."""
    if not levels:
        raise ValueError("no levels configured")
    pos = bisect_left(levels, value)
    if pos == 0:
        return levels[0]
    if pos == len(levels):
        return levels[-1]
    below, above = levels[pos - 1], levels[pos]
    return below if value - below <= above - value else above


def quantize_assignment(values: dict[str, float],
                        levels: tuple[float, ...] | list[float]) -> dict[str, float]:
    levels = sorted(levels)
    return {t: quantize_to_levels(v, levels) for t, v in values.items()}


def _level_demands(assignment: dict[str, float],
                   conflict_sets: list[frozenset[str]]) -> dict[float, int]:
    """Worst per-conflict-set demand for each level under one assignment."""
    demand: dict[float, int] = {}
    for group in conflict_sets:
        per_level: dict[float, int] = {}
        for t in group:
            lvl = assignment[t]
            per_level[lvl] = per_level.get(lvl, 0) + 1
        for lvl, count in per_level.items():
            demand[lvl] = max(demand.get(lvl, 0), count)
    return demand


def _greedy_usage(assignment: dict[str, float],
                  conflict_sets: list[frozenset[str]],
                  terminal_order: list[str]) -> dict[float, int]:
    """Rows per level the first-fit controller consumes, capacity unbounded."""
    adj = conflict_neighbors(conflict_sets)
    order = {t: i for i, t in enumerate(terminal_order)}
    assigned: dict[str, tuple[float, int]] = {}
    used: dict[float, int] = {}

    def place(t: str) -> None:
        lvl = assignment[t]
        blocked = {assigned[nb][1] for nb in adj.get(t, ()) if nb in assigned
                   and assigned[nb][0] == lvl}
        row = 0
        while row in blocked:
            row += 1
        assigned[t] = (lvl, row)
        used[lvl] = max(used.get(lvl, 0), row + 1)

    for group in conflict_sets:
        for t in sorted(group, key=order.__getitem__):
            if t not in assigned:
                place(t)
    for t in terminal_order:
        if t not in assigned:
            place(t)
    return used


def size_array(conflict_sets: list[frozenset[str]],
               levels: list[float],
               policy: str = "trace",
               trace: list[dict[str, float]] | None = None,
               terminal_order: list[str] | None = None,
               mode: SbgMode = SbgMode.SELF_CONTROL) -> SbgArraySpec:
    """Choose per-level multiplicities phi(i).

    "worst_case": phi(i) = size of the largest conflict set, for every level.
    "trace": phi(i) = rows the first-fit controller actually consumes, taken
    over a calibration trace of input assignments (each quantized to the
    levels); this always covers the worst per-set demand.  Falls back to
    worst_case when no trace is supplied.
    """
    levels_sorted = tuple(sorted(set(levels)))
    if not levels_sorted:
        raise ValueError("at least one level is required")
    max_set = max((len(s) for s in conflict_sets), default=1)

    if policy == "worst_case" or (policy == "trace" and not trace):
        multiplicity = tuple(max_set for _ in levels_sorted)
        return SbgArraySpec(levels_sorted, multiplicity, mode)
    if policy != "trace":
        raise ValueError(f"unknown sizing policy {policy!r}")

    assert trace is not None
    need: dict[float, int] = {}
    for raw in trace:
        assignment = quantize_assignment(raw, levels_sorted)
        order = terminal_order or sorted(assignment)
        usage = _greedy_usage(assignment, conflict_sets, order)
        for lvl, rows in usage.items():
            need[lvl] = max(need.get(lvl, 0), rows)
    multiplicity = tuple(max(need.get(lvl, 0), 1) for lvl in levels_sorted)
    return SbgArraySpec(levels_sorted, multiplicity, mode)


def allocate(assignment: dict[str, float], spec: SbgArraySpec,
             conflict_sets: list[frozenset[str]],
             terminal_order: list[str] | None = None) -> SwitchMatrix:
    """Produce the control matrix for one (already quantized) assignment.

    Conflict sets are processed in input order and terminals within a set in
    ascending order, so identical inputs always yield identical matrices.
    """
    terminals = terminal_order or sorted(assignment)
    if set(terminals) != set(assignment):
        raise ValueError("terminal order must cover exactly the assignment keys")
    for group in conflict_sets:
        missing = group - set(terminals)
        if missing:
            raise ValueError(f"conflict set members missing from assignment: {sorted(missing)}")
    level_index = {lvl: i for i, lvl in enumerate(spec.levels)}
    for t, lvl in assignment.items():
        if lvl not in level_index:
            raise UnknownLevel(f"terminal {t!r} requests {lvl}, not an array level")

    rows_by_level = spec.rows_by_level()
    adj = conflict_neighbors(conflict_sets)
    order = {t: i for i, t in enumerate(terminals)}
    assigned: dict[str, int] = {}

    def place(t: str) -> None:
        lvl = assignment[t]
        rows = rows_by_level[lvl]
        blocked = {assigned[nb] for nb in adj.get(t, ()) if nb in assigned}
        for row in rows:
            if row not in blocked:
                assigned[t] = row
                return
        raise CapacityExceeded(
            lvl, f"conflict sets demand more than {len(rows)} rows of level {lvl}")

    for group in conflict_sets:
        for t in sorted(group, key=order.__getitem__):
            if t not in assigned:
                place(t)
    for t in terminals:
        if t not in assigned:
            place(t)

    control = np.zeros((spec.total_units, len(terminals)), dtype=np.uint8)
    for j, t in enumerate(terminals):
        control[assigned[t], j] = 1
    control.flags.writeable = False
    return SwitchMatrix(control=control,
                        row_levels=tuple(spec.row_levels()),
                        col_terminals=tuple(terminals))


def route(matrix: SwitchMatrix, row_streams: list[Bitstream]) -> dict[str, Bitstream]:
    """Deliver each terminal the unique row stream its column selects."""
    if len(row_streams) != matrix.num_rows:
        raise ValueError("one stream per matrix row is required")
    lengths = {len(s) for s in row_streams}
    if len(lengths) > 1:
        raise ValueError("row streams must share one length")
    out: dict[str, Bitstream] = {}
    for j, terminal in enumerate(matrix.col_terminals):
        row = int(np.flatnonzero(matrix.control[:, j])[0])
        out[terminal] = row_streams[row]
    return out


def verify_allocation(matrix: SwitchMatrix,
                      conflict_sets: list[frozenset[str]],
                      assignment: dict[str, float]) -> list[str]:
    """Standalone legality check; returns human-readable violations.

    Checks, from the matrix alone: every column selects exactly one row; no
    two members of one conflict set share a row; every terminal's row
    generates its requested probability level.
    """
    problems: list[str] = []
    col_sums = matrix.control.sum(axis=0)
    for j, s in enumerate(col_sums):
        if s != 1:
            problems.append(f"column {matrix.col_terminals[j]!r} selects {int(s)} rows")
    if problems:
        return problems

    row_of = {t: matrix.row_of(t) for t in matrix.col_terminals}
    for group in conflict_sets:
        seen: dict[int, str] = {}
        for t in sorted(group):
            row = row_of[t]
            if row in seen:
                problems.append(
                    f"conflicting terminals {seen[row]!r} and {t!r} share row {row}")
            else:
                seen[row] = t
    for t, lvl in assignment.items():
        if matrix.row_levels[row_of[t]] != lvl:
            problems.append(
                f"terminal {t!r} requests {lvl} but row {row_of[t]} generates "
                f"{matrix.row_levels[row_of[t]]}")
    return problems


def cost_metrics(t_per_sbg: int, n_terminals: int, m_units: int,
                 n_clustered: int) -> tuple[float, float]:
    """Architecture-level improvement ratios.

    K_energy = M/N compares generator-array energy against one generator per
    terminal; K_cmos = (T*M + M*N')/(T*N) compares transistor budgets
    including the switch-matrix overhead.
    """
    if t_per_sbg <= 0 or n_terminals <= 0 or m_units <= 0 or n_clustered < 0:
        raise ValueError("cost metric inputs must be positive (N' non-negative)")
    k_energy = m_units / n_terminals
    k_cmos = (t_per_sbg * m_units + m_units * n_clustered) / (t_per_sbg * n_terminals)
    return k_energy, k_cmos
