"""Outranking machinery: concordance and discordance indices, threshold
relations, cycle collapse and dominated-alternative elimination.

Concordance of a over b sums the weights of criteria where a scores at
least as well as b (ties count for both directions). Discordance is the
largest opposing gap, normalized by the criterion's full scale range.
Missing cells contribute to neither side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .decision import ScoreMatrix
from .errors import InvalidValueError, WeightMismatchError
from .typology import MISSING
from .weighting import WeightVector

#: Default iterative relaxation: concordance level falls 0.9 -> 0.5 while
#: the discordance level rises as its complement.
DEFAULT_SCHEDULE_LEVELS = (0.9, 0.8, 0.7, 0.6, 0.5)


def _check_weights(scores: ScoreMatrix, weights: WeightVector) -> None:
    criterion_ids = {c.id for c in scores.criteria}
    if set(weights.ids()) != criterion_ids:
        raise WeightMismatchError(
            "weights must cover the criteria exactly",
            weights=sorted(weights.ids()), criteria=sorted(criterion_ids),
        )


@dataclass(frozen=True)
class IndexMatrix:
    """n x n pairwise index with an undefined diagonal."""

    alternatives: tuple[str, ...]
    values: np.ndarray  # float array, NaN on the diagonal

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        arr = np.array(self.values, dtype=float)
        n = len(self.alternatives)
        if arr.shape != (n, n):
            raise InvalidValueError(
                f"matrix shape {arr.shape} does not fit {n} alternatives"
            )
        np.fill_diagonal(arr, np.nan)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def value(self, a: str, b: str) -> float:
        i = self.alternatives.index(a)
        j = self.alternatives.index(b)
        return float(self.values[i, j])

    def off_diagonal(self) -> Iterable[tuple[str, str, float]]:
        for i, a in enumerate(self.alternatives):
            for j, b in enumerate(self.alternatives):
                if i != j:
                    yield a, b, float(self.values[i, j])

    def row_max(self, a: str) -> float:
        i = self.alternatives.index(a)
        row = np.delete(self.values[i], i)
        return float(np.nanmax(row)) if row.size else 0.0

    def to_rows(self, decimals: int | None = 2) -> list[list[float | None]]:
        out: list[list[float | None]] = []
        for i in range(len(self.alternatives)):
            row: list[float | None] = []
            for j in range(len(self.alternatives)):
                v = self.values[i, j]
                if math.isnan(v):
                    row.append(None)
                else:
                    row.append(round(float(v), decimals) if decimals is not None else float(v))
            out.append(row)
        return out


class ConcordanceMatrix(IndexMatrix):
    def validate(self, require_pair_sums: bool = True) -> list[str]:
        """Data checks for externally supplied matrices.

        Every entry must lie in [0, 1]; with weak-inequality concordance
        each symmetric pair of a complete matrix sums to at least 1.
        """
        problems = []
        for a, b, v in self.off_diagonal():
            if not 0.0 <= v <= 1.0:
                problems.append(f"c({a},{b})={v} outside [0,1]")
        if require_pair_sums:
            n = len(self.alternatives)
            for i in range(n):
                for j in range(i + 1, n):
                    s = self.values[i, j] + self.values[j, i]
                    if s < 1.0 - 1e-9:
                        problems.append(
                            f"c({self.alternatives[i]},{self.alternatives[j]}) + "
                            f"c({self.alternatives[j]},{self.alternatives[i]}) = {s} < 1"
                        )
        return problems


class DiscordanceMatrix(IndexMatrix):
    def validate(self) -> list[str]:
        problems = []
        for a, b, v in self.off_diagonal():
            if not 0.0 <= v <= 1.0:
                problems.append(f"d({a},{b})={v} outside [0,1]")
        return problems


def matrix_from_rows(
    kind: str, alternatives: Sequence[str], rows: Sequence[Sequence[float | None]]
) -> ConcordanceMatrix | DiscordanceMatrix:
    """Build an index matrix from row-major data (None on the diagonal)."""
    arr = np.array(
        [[np.nan if v is None else float(v) for v in row] for row in rows], dtype=float
    )
    cls = ConcordanceMatrix if kind == "concordance" else DiscordanceMatrix
    return cls(alternatives=tuple(alternatives), values=arr)


def concordance_matrix(scores: ScoreMatrix, weights: WeightVector) -> ConcordanceMatrix:
    """c(a, b) = total weight of criteria where a scores >= b.

    Criteria with a missing cell on either side are excluded from both
    directions, so their weight counts for neither alternative.
    """
    _check_weights(scores, weights)
    n = len(scores.alternatives)
    if n < 2:
        raise InvalidValueError("concordance needs at least 2 alternatives", n=n)
    ids = [c.id for c in scores.criteria]
    weight_row = np.array([weights[cid] for cid in ids], dtype=float)
    cells = np.array(
        [[np.nan if v is MISSING else float(v) for v in row] for row in scores.cells],
        dtype=float,
    )
    values = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            both = ~np.isnan(cells[i]) & ~np.isnan(cells[j])
            at_least = both & (cells[i] >= cells[j])
            values[i, j] = float(np.sum(weight_row[at_least]))
    return ConcordanceMatrix(alternatives=scores.alternatives, values=values)


def discordance_matrix(scores: ScoreMatrix) -> DiscordanceMatrix:
    """d(a, b) = max over criteria where b beats a of the gap divided by
    the criterion's full scale range; 0 when no criterion opposes.

    Criteria with missing cells are skipped pairwise; a zero-range
    criterion is excluded entirely with a warning.
    """
    n = len(scores.alternatives)
    if n < 2:
        raise InvalidValueError("discordance needs at least 2 alternatives", n=n)
    usable: list[int] = []
    spans: list[float] = []
    for j, criterion in enumerate(scores.criteria):
        lo, hi = scores.ranges[criterion.id]
        span = hi - lo
        if span <= 0:
            warnings.warn(
                f"criterion {criterion.id!r} has a zero score range and is "
                f"excluded from discordance",
                stacklevel=2,
            )
            continue
        usable.append(j)
        spans.append(span)
    cells = np.array(
        [[np.nan if v is MISSING else float(v) for v in row] for row in scores.cells],
        dtype=float,
    )
    values = np.full((n, n), np.nan)
    span_row = np.array(spans, dtype=float)
    sub = cells[:, usable] if usable else np.empty((n, 0))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            gaps = (sub[j] - sub[i]) / span_row if usable else np.empty(0)
            gaps = gaps[~np.isnan(gaps)]
            opposing = gaps[gaps > 0]
            values[i, j] = float(opposing.max()) if opposing.size else 0.0
    return DiscordanceMatrix(alternatives=scores.alternatives, values=values)


def excluded_weight_matrix(scores: ScoreMatrix, weights: WeightVector) -> IndexMatrix:
    """Per ordered pair, the total weight of criteria skipped for missing
    cells (reported so nobody mistakes silence for evidence)."""
    _check_weights(scores, weights)
    n = len(scores.alternatives)
    ids = [c.id for c in scores.criteria]
    weight_row = np.array([weights[cid] for cid in ids], dtype=float)
    cells = np.array(
        [[np.nan if v is MISSING else float(v) for v in row] for row in scores.cells],
        dtype=float,
    )
    values = np.full((n, n), np.nan)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            skipped = np.isnan(cells[i]) | np.isnan(cells[j])
            values[i, j] = float(np.sum(weight_row[skipped]))
    return IndexMatrix(alternatives=scores.alternatives, values=values)


@dataclass(frozen=True)
class ThresholdSchedule:
    """Ordered (concordance level, discordance level) pairs: the
    concordance level never rises and the discordance level never falls."""

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        steps = tuple((float(c), float(d)) for c, d in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise InvalidValueError("threshold schedule must not be empty")
        for c, d in steps:
            if not (0.0 <= c <= 1.0 and 0.0 <= d <= 1.0):
                raise InvalidValueError(
                    f"threshold pair ({c}, {d}) outside [0,1]", concordance=c, discordance=d
                )
        for (c0, d0), (c1, d1) in zip(steps, steps[1:]):
            if c1 > c0 + 1e-12 or d1 < d0 - 1e-12:
                raise InvalidValueError(
                    "schedule must relax monotonically (concordance down, discordance up)",
                    steps=[list(s) for s in steps],
                )

    def to_json_list(self) -> list[list[float]]:
        return [[c, d] for c, d in self.steps]

    @classmethod
    def default(cls) -> "ThresholdSchedule":
        return cls(tuple((c, round(1.0 - c, 10)) for c in DEFAULT_SCHEDULE_LEVELS))

    @classmethod
    def from_json_list(cls, doc: Sequence[Sequence[float]]) -> "ThresholdSchedule":
        return cls(tuple((float(c), float(d)) for c, d in doc))


@dataclass(frozen=True)
class OutrankingRelation:
    """Directed pairs (a outranks b) at one threshold pair, plus the pairs
    left incomparable (no edge either way)."""

    alternatives: tuple[str, ...]
    concordance_level: float
    discordance_level: float
    edges: frozenset[tuple[str, str]]
    incomparable: tuple[tuple[str, str], ...] = field(default=())

    def outranks(self, a: str, b: str) -> bool:
        return (a, b) in self.edges

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "concordance_level": self.concordance_level,
            "discordance_level": self.discordance_level,
            "edges": [list(e) for e in sorted(self.edges)],
            "incomparable": [list(p) for p in self.incomparable],
        }


def outranking_at(
    concordance: ConcordanceMatrix,
    discordance: DiscordanceMatrix,
    concordance_level: float,
    discordance_level: float,
) -> OutrankingRelation:
    """Edge (a, b) iff c(a,b) >= concordance level and d(a,b) <= discordance
    level; pairs with no edge either way are reported incomparable."""
    for name, level in (("concordance", concordance_level), ("discordance", discordance_level)):
        if not 0.0 <= level <= 1.0:
            raise InvalidValueError(f"{name} level {level} outside [0,1]", level=level)
    if concordance.alternatives != discordance.alternatives:
        raise InvalidValueError("matrices disagree on alternatives")
    alts = concordance.alternatives
    edges = set()
    for a, b, c_ab in concordance.off_diagonal():
        if c_ab >= concordance_level - 1e-12 and discordance.value(a, b) <= discordance_level + 1e-12:
            edges.add((a, b))
    incomparable = tuple(
        (alts[i], alts[j])
        for i in range(len(alts))
        for j in range(i + 1, len(alts))
        if (alts[i], alts[j]) not in edges and (alts[j], alts[i]) not in edges
    )
    return OutrankingRelation(
        alternatives=alts,
        concordance_level=concordance_level,
        discordance_level=discordance_level,
        edges=frozenset(edges),
        incomparable=incomparable,
    )


def strongly_connected_components(
    nodes: Sequence[str], edges: Iterable[tuple[str, str]]
) -> list[tuple[str, ...]]:
    """Kosaraju's two-pass SCC, iterative; components come out ordered by
    their smallest member for determinism."""
    forward: dict[str, list[str]] = {n: [] for n in nodes}
    backward: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        forward[a].append(b)
        backward[b].append(a)

    visited: set[str] = set()
    finish_order: list[str] = []
    for start in nodes:
        if start in visited:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        visited.add(start)
        while stack:
            node, idx = stack.pop()
            if idx < len(forward[node]):
                stack.append((node, idx + 1))
                nxt = forward[node][idx]
                if nxt not in visited:
                    visited.add(nxt)
                    stack.append((nxt, 0))
            else:
                finish_order.append(node)

    assigned: set[str] = set()
    components: list[tuple[str, ...]] = []
    for start in reversed(finish_order):
        if start in assigned:
            continue
        component = []
        stack2 = [start]
        assigned.add(start)
        while stack2:
            node = stack2.pop()
            component.append(node)
            for nxt in backward[node]:
                if nxt not in assigned:
                    assigned.add(nxt)
                    stack2.append(nxt)
        components.append(tuple(sorted(component)))
    components.sort(key=lambda c: c[0])
    return components


@dataclass(frozen=True)
class EliminationStep:
    """One schedule step: the relation, cycle groups, and who survived."""

    concordance_level: float
    discordance_level: float
    considered: tuple[str, ...]
    edges: frozenset[tuple[str, str]]
    tied_groups: tuple[tuple[str, ...], ...]
    kernel: tuple[str, ...]
    removed: dict[str, tuple[str, ...]]  # alternative -> outranking witnesses

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "concordance_level": self.concordance_level,
            "discordance_level": self.discordance_level,
            "considered": list(self.considered),
            "edges": [list(e) for e in sorted(self.edges)],
            "tied_groups": [list(g) for g in self.tied_groups],
            "kernel": list(self.kernel),
            "removed": {alt: list(w) for alt, w in sorted(self.removed.items())},
        }


def eliminate_dominated(relation: OutrankingRelation, considered: Sequence[str]) -> EliminationStep:
    """Collapse directed cycles into tied groups, then keep the kernel:
    internally stable (no edges inside) and externally stable (every
    removed alternative is outranked by a survivor, possibly via its group).
    """
    nodes = [a for a in relation.alternatives if a in set(considered)]
    node_set = set(nodes)
    edges = {(a, b) for a, b in relation.edges if a in node_set and b in node_set}

    components = strongly_connected_components(nodes, edges)
    group_of: dict[str, int] = {}
    for gi, comp in enumerate(components):
        for member in comp:
            group_of[member] = gi
    group_edges: set[tuple[int, int]] = set()
    for a, b in edges:
        ga, gb = group_of[a], group_of[b]
        if ga != gb:
            group_edges.add((ga, gb))

    # Kernel of the condensation DAG: a group joins iff no predecessor
    # group joined; process in topological order (dominators first).
    predecessors: dict[int, set[int]] = {gi: set() for gi in range(len(components))}
    successors: dict[int, set[int]] = {gi: set() for gi in range(len(components))}
    for ga, gb in group_edges:
        predecessors[gb].add(ga)
        successors[ga].add(gb)
    order: list[int] = []
    indegree = {gi: len(predecessors[gi]) for gi in predecessors}
    ready = sorted(gi for gi, deg in indegree.items() if deg == 0)
    while ready:
        gi = ready.pop(0)
        order.append(gi)
        for gj in sorted(successors[gi]):
            indegree[gj] -= 1
            if indegree[gj] == 0:
                ready.append(gj)
        ready.sort()
    in_kernel: dict[int, bool] = {}
    for gi in order:
        in_kernel[gi] = not any(in_kernel[gp] for gp in predecessors[gi])

    kernel_alts = sorted(
        member for gi, comp in enumerate(components) if in_kernel[gi] for member in comp
    )
    survivors = set(kernel_alts)
    removed: dict[str, tuple[str, ...]] = {}
    for gi, comp in enumerate(components):
        if in_kernel[gi]:
            continue
        kernel_predecessor_groups = [gp for gp in predecessors[gi] if in_kernel[gp]]
        for member in comp:
            direct = sorted(a for a, b in edges if b == member and a in survivors)
            if direct:
                removed[member] = tuple(direct)
            else:
                # witnessed through the cycle group: survivors outranking
                # some member of the same group
                via_group = sorted(
                    a
                    for gp in kernel_predecessor_groups
                    for a in components[gp]
                    if any((a, other) in edges for other in comp)
                )
                removed[member] = tuple(via_group)

    tied = tuple(comp for comp in components if len(comp) > 1)
    return EliminationStep(
        concordance_level=relation.concordance_level,
        discordance_level=relation.discordance_level,
        considered=tuple(nodes),
        edges=frozenset(edges),
        tied_groups=tied,
        kernel=tuple(kernel_alts),
        removed=removed,
    )
