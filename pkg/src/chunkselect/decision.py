"""Decision matrix construction, direction-aware ordinal scoring and
min-max normalization.

Ordinal cells map to their 1-based rank in preference order (worst = 1,
best = L); a minimize direction reverses the domain order. Numeric cells
pass through, sign-flipped under minimize. Missing cells propagate.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Sequence

from .errors import (
    InvalidValueError,
    MissingCellError,
    UndescribedCellError,
    UnknownIdError,
)
from .method_base import Repository
from .typology import MISSING, MISSING_TOKEN, Typology, Value

DIRECTIONS = ("maximize", "minimize", "explicit-order")

_DIRECTION_SUFFIX = {"maximize": "max", "minimize": "min", "explicit-order": "ord"}


@dataclass(frozen=True)
class Criterion:
    """A characteristic used to compare alternatives.

    ``direction`` is ``maximize``, ``minimize`` or ``explicit-order``; the
    latter carries ``order``, the full preference-ordered label list (worst
    first). ``levels`` and ``scale_size`` are filled in when the criterion
    is bound to a typology by ``build_matrix``.
    """

    id: str
    direction: str = "maximize"
    order: tuple[str, ...] | None = None
    levels: tuple[str, ...] | None = None
    scale_size: int | None = None
    kind: str | None = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise InvalidValueError(
                f"unknown direction {self.direction!r} for criterion {self.id!r}",
                criterion=self.id, direction=self.direction,
            )
        if self.order is not None:
            object.__setattr__(self, "order", tuple(self.order))
        if self.direction == "explicit-order" and not self.order:
            raise InvalidValueError(
                f"criterion {self.id!r} uses explicit-order but gives no order",
                criterion=self.id,
            )
        if self.levels is not None:
            object.__setattr__(self, "levels", tuple(self.levels))

    @property
    def is_ordinal(self) -> bool:
        return self.kind == "ordinal"

    def preference_order(self) -> tuple[str, ...]:
        """Labels worst-first according to the direction."""
        if self.direction == "explicit-order":
            return self.order  # type: ignore[return-value]
        if self.levels is None:
            raise InvalidValueError(
                f"criterion {self.id!r} is not bound to a domain", criterion=self.id
            )
        if self.direction == "maximize":
            return self.levels
        return tuple(reversed(self.levels))

    def to_json_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"id": self.id, "direction": self.direction}
        if self.order is not None:
            doc["order"] = list(self.order)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict[str, Any]) -> "Criterion":
        return cls(
            id=doc["id"],
            direction=doc.get("direction", "maximize"),
            order=tuple(doc["order"]) if doc.get("order") else None,
        )


def bind_criterion(criterion: Criterion, typology: Typology) -> Criterion:
    """Attach the characteristic's domain to the criterion and validate it."""
    characteristic = typology.get(criterion.id)
    domain = characteristic.domain
    if domain.kind == "numeric":
        if criterion.direction == "explicit-order":
            raise InvalidValueError(
                f"criterion {criterion.id!r} is numeric and cannot use explicit-order",
                criterion=criterion.id,
            )
        return replace(criterion, levels=None, scale_size=None, kind="numeric")
    if criterion.direction == "explicit-order":
        if sorted(criterion.order or ()) != sorted(domain.levels):
            raise InvalidValueError(
                f"criterion {criterion.id!r} explicit order must list every domain "
                f"label exactly once",
                criterion=criterion.id,
                order=list(criterion.order or ()),
                levels=list(domain.levels),
            )
    elif domain.kind == "nominal":
        raise InvalidValueError(
            f"criterion {criterion.id!r} is nominal; give an explicit-order",
            criterion=criterion.id,
        )
    return replace(
        criterion, levels=domain.levels, scale_size=len(domain.levels), kind=domain.kind
    )


@dataclass(frozen=True)
class DecisionMatrix:
    """Rectangular alternatives x criteria table of raw valuations."""

    alternatives: tuple[str, ...]
    criteria: tuple[Criterion, ...]
    cells: tuple[tuple[Value, ...], ...]  # rows follow alternatives

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "cells", tuple(tuple(row) for row in self.cells))
        if len(self.cells) != len(self.alternatives) or any(
            len(row) != len(self.criteria) for row in self.cells
        ):
            raise InvalidValueError("decision matrix must be rectangular")

    def value_at(self, alternative_id: str, criterion_id: str) -> Value:
        return self.cells[self._alt_index(alternative_id)][self._crit_index(criterion_id)]

    def _alt_index(self, alternative_id: str) -> int:
        try:
            return self.alternatives.index(alternative_id)
        except ValueError:
            raise UnknownIdError(f"unknown alternative {alternative_id!r}", id=alternative_id)

    def _crit_index(self, criterion_id: str) -> int:
        for i, c in enumerate(self.criteria):
            if c.id == criterion_id:
                return i
        raise UnknownIdError(f"unknown criterion {criterion_id!r}", id=criterion_id)

    def column(self, criterion_id: str) -> tuple[Value, ...]:
        j = self._crit_index(criterion_id)
        return tuple(row[j] for row in self.cells)


@dataclass(frozen=True)
class ScoreMatrix:
    """Numeric scores in the same shape, plus each criterion's score range.

    ``ranges`` maps criterion id to (min score, max score) on the
    criterion's full scale: (1, L) for an L-level ordinal, the observed
    extremes for numeric criteria, (0.0, 1.0) once normalized.
    """

    alternatives: tuple[str, ...]
    criteria: tuple[Criterion, ...]
    cells: tuple[tuple[Any, ...], ...]  # numbers or MISSING
    ranges: dict[str, tuple[float, float]] = field(default_factory=dict)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "cells", tuple(tuple(row) for row in self.cells))
        object.__setattr__(self, "ranges", dict(self.ranges))

    def value_at(self, alternative_id: str, criterion_id: str) -> Any:
        i = self.alternatives.index(alternative_id)
        j = [c.id for c in self.criteria].index(criterion_id)
        return self.cells[i][j]

    def column(self, criterion_id: str) -> tuple[Any, ...]:
        j = [c.id for c in self.criteria].index(criterion_id)
        return tuple(row[j] for row in self.cells)

    def row(self, alternative_id: str) -> tuple[Any, ...]:
        return self.cells[self.alternatives.index(alternative_id)]

    def has_missing(self) -> bool:
        return any(cell is MISSING for row in self.cells for cell in row)

    def missing_cells(self) -> list[tuple[str, str]]:
        out = []
        for i, alt in enumerate(self.alternatives):
            for j, crit in enumerate(self.criteria):
                if self.cells[i][j] is MISSING:
                    out.append((alt, crit.id))
        return out


def build_matrix(
    repo: Repository,
    alternatives: Sequence[str],
    criteria: Sequence[Criterion],
) -> DecisionMatrix:
    """Mirror repository valuations into a rectangular decision matrix.

    Every alternative must carry a valuation (possibly MISSING) for every
    criterion; a chunk that is simply not described on a criterion raises
    ``UndescribedCellError`` naming the pair.
    """
    bound = tuple(bind_criterion(c, repo.typology) for c in criteria)
    rows = []
    for alt_id in alternatives:
        chunk = repo.get(alt_id)
        row = []
        for criterion in bound:
            if criterion.id not in chunk.valuations:
                raise UndescribedCellError(
                    f"chunk {alt_id!r} is not described on criterion {criterion.id!r}",
                    alternative=alt_id, criterion=criterion.id,
                )
            value = chunk.valuations[criterion.id]
            if value is not MISSING and criterion.kind != "numeric":
                if value not in (criterion.levels or ()):
                    raise InvalidValueError(
                        f"value {value!r} of chunk {alt_id!r} not on criterion "
                        f"{criterion.id!r} scale",
                        alternative=alt_id, criterion=criterion.id, value=value,
                    )
            row.append(value)
        rows.append(tuple(row))
    return DecisionMatrix(alternatives=tuple(alternatives), criteria=bound, cells=tuple(rows))


def score(matrix: DecisionMatrix) -> ScoreMatrix:
    """Map raw valuations to numeric scores per the criterion directions."""
    columns: list[list[Any]] = []
    ranges: dict[str, tuple[float, float]] = {}
    for j, criterion in enumerate(matrix.criteria):
        raw = [row[j] for row in matrix.cells]
        if criterion.kind == "numeric":
            sign = -1.0 if criterion.direction == "minimize" else 1.0
            col = [MISSING if v is MISSING else sign * float(v) for v in raw]
            present = [v for v in col if v is not MISSING]
            ranges[criterion.id] = (
                (min(present), max(present)) if present else (0.0, 0.0)
            )
        else:
            pref = criterion.preference_order()
            position = {label: rank + 1 for rank, label in enumerate(pref)}
            col = [MISSING if v is MISSING else position[v] for v in raw]
            ranges[criterion.id] = (1.0, float(len(pref)))
        columns.append(col)
    rows = tuple(
        tuple(columns[j][i] for j in range(len(matrix.criteria)))
        for i in range(len(matrix.alternatives))
    )
    return ScoreMatrix(
        alternatives=matrix.alternatives,
        criteria=matrix.criteria,
        cells=rows,
        ranges=ranges,
    )


def normalize(scores: ScoreMatrix, criteria: Iterable[str] | None = None) -> ScoreMatrix:
    """Min-max rescale each criterion column to [0, 1].

    Constant columns map to 1.0 for every alternative. A missing cell in a
    column being normalized is an error naming the cell.
    """
    wanted = set(criteria) if criteria is not None else {c.id for c in scores.criteria}
    columns: list[list[Any]] = []
    ranges = dict(scores.ranges)
    for j, criterion in enumerate(scores.criteria):
        col = [row[j] for row in scores.cells]
        if criterion.id not in wanted:
            columns.append(col)
            continue
        for i, v in enumerate(col):
            if v is MISSING:
                raise MissingCellError(
                    f"cannot normalize criterion {criterion.id!r}: missing cell at "
                    f"alternative {scores.alternatives[i]!r}",
                    alternative=scores.alternatives[i], criterion=criterion.id,
                )
        lo, hi = min(col), max(col)
        if math.isclose(lo, hi):
            columns.append([1.0] * len(col))
        else:
            columns.append([(v - lo) / (hi - lo) for v in col])
        ranges[criterion.id] = (0.0, 1.0)
    rows = tuple(
        tuple(columns[j][i] for j in range(len(scores.criteria)))
        for i in range(len(scores.alternatives))
    )
    return ScoreMatrix(
        alternatives=scores.alternatives,
        criteria=scores.criteria,
        cells=rows,
        ranges=ranges,
        normalized=True,
    )


def matrix_to_csv(matrix: DecisionMatrix | ScoreMatrix) -> str:
    """Audit export: criterion ids with direction suffix as header, one row
    per alternative, missing cells empty."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    header = ["alternative"] + [
        f"{c.id}:{_DIRECTION_SUFFIX[c.direction]}" for c in matrix.criteria
    ]
    writer.writerow(header)
    for i, alt in enumerate(matrix.alternatives):
        row = [alt]
        for cell in matrix.cells[i]:
            row.append("" if cell is MISSING else cell)
        writer.writerow(row)
    return buffer.getvalue()


def score_cell_json(value: Any) -> Any:
    """JSON spelling for one score cell (MISSING becomes its token)."""
    return MISSING_TOKEN if value is MISSING else value
