"""Criterion weight elicitation: SMART importance scores, SWING points and
trade-off indifference ratios, each as a one-shot computation and as a
resumable question/answer session.

All three techniques end in the same place: a non-negative weight per
criterion, normalized to sum 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from .errors import (
    DisconnectedJudgmentsError,
    InvalidValueError,
    MalformedAnswerError,
    SessionCompleteError,
    StrategyNotImplementedError,
)

TECHNIQUES = ("smart", "swing", "tradeoff")

#: Max |log cycle residual| tolerated before trade-off judgments are
#: flagged inconsistent.
DEFAULT_CONSISTENCY_TOLERANCE = 0.05


@dataclass(frozen=True)
class WeightVector:
    """Normalized criterion weights: non-negative, summing to 1."""

    weights: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        if not self.weights:
            raise InvalidValueError("weight vector needs at least one criterion")
        total = math.fsum(self.weights.values())
        if any(w < 0 for w in self.weights.values()):
            raise InvalidValueError("weights must be non-negative", weights=dict(self.weights))
        if abs(total - 1.0) > 1e-9:
            raise InvalidValueError(
                f"weights must sum to 1, got {total}", total=total
            )

    def __getitem__(self, criterion_id: str) -> float:
        return self.weights[criterion_id]

    def __contains__(self, criterion_id: str) -> bool:
        return criterion_id in self.weights

    def ids(self) -> tuple[str, ...]:
        return tuple(self.weights)

    def isclose(self, other: "WeightVector", tolerance: float = 1e-9) -> bool:
        return set(self.weights) == set(other.weights) and all(
            abs(self.weights[k] - other.weights[k]) <= tolerance for k in self.weights
        )

    def to_json_dict(self) -> dict[str, float]:
        return dict(self.weights)

    @classmethod
    def from_raw(cls, raw: Mapping[str, float]) -> "WeightVector":
        """Normalize arbitrary non-negative magnitudes to sum 1."""
        total = math.fsum(raw.values())
        if total <= 0:
            raise InvalidValueError("raw weights must have a positive sum", total=total)
        return cls({k: v / total for k, v in raw.items()})

    @classmethod
    def uniform(cls, criteria: Sequence[str]) -> "WeightVector":
        n = len(criteria)
        if n == 0:
            raise InvalidValueError("cannot build uniform weights over no criteria")
        return cls({c: 1.0 / n for c in criteria})


def smart_weights(importances: Mapping[str, float]) -> WeightVector:
    """Relative importance analysis: each criterion gets a score in [1, 100],
    weights are the scores divided by their sum."""
    if not importances:
        raise InvalidValueError("smart needs at least one criterion")
    for cid, s in importances.items():
        if not isinstance(s, (int, float)) or isinstance(s, bool) or not 1 <= s <= 100:
            raise InvalidValueError(
                f"importance for {cid!r} must lie in [1, 100], got {s!r}",
                criterion=cid, value=s,
            )
    return WeightVector.from_raw(importances)


def swing_weights(
    improvement_order: Sequence[str], points: Mapping[str, float]
) -> WeightVector:
    """Swing from a worst-case profile: the criterion to improve first
    anchors at 100 points, the rest get at most that, non-increasing along
    the order; weights are points divided by their sum."""
    order = list(improvement_order)
    if not order:
        raise InvalidValueError("swing needs at least one criterion")
    if len(set(order)) != len(order):
        raise InvalidValueError("improvement order repeats a criterion", order=order)
    if set(order) != set(points):
        raise InvalidValueError(
            "points must cover the improvement order exactly",
            order=order, points=sorted(points),
        )
    first = order[0]
    if points[first] != 100:
        raise InvalidValueError(
            f"first-improved criterion {first!r} must get 100 points, got {points[first]!r}",
            criterion=first, value=points[first],
        )
    previous = None
    for cid in order:
        p = points[cid]
        if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0 < p <= 100:
            raise InvalidValueError(
                f"points for {cid!r} must lie in (0, 100], got {p!r}", criterion=cid, value=p
            )
        if previous is not None and p > previous:
            raise InvalidValueError(
                f"points must be non-increasing along the order; {cid!r} got {p} "
                f"after {previous}",
                criterion=cid, value=p, previous=previous,
            )
        previous = p
    return WeightVector.from_raw(points)


@dataclass(frozen=True)
class TradeoffJudgment:
    """Indifference ratio between two criteria: ratio = w_a / w_b."""

    criterion_a: str
    criterion_b: str
    ratio: float

    def __post_init__(self):
        if self.criterion_a == self.criterion_b:
            raise InvalidValueError(
                "a trade-off judgment needs two distinct criteria",
                criterion=self.criterion_a,
            )
        if not (isinstance(self.ratio, (int, float)) and self.ratio > 0):
            raise InvalidValueError(
                f"trade-off ratio must be positive, got {self.ratio!r}", ratio=self.ratio
            )

    def to_json_dict(self) -> dict[str, Any]:
        return {"a": self.criterion_a, "b": self.criterion_b, "ratio": self.ratio}


@dataclass(frozen=True)
class ConsistencyReport:
    """Log-ratio residuals of the judgments not used by the spanning tree."""

    residuals: tuple[tuple[TradeoffJudgment, float], ...]
    tolerance: float

    @property
    def max_abs_residual(self) -> float:
        return max((abs(r) for _, r in self.residuals), default=0.0)

    @property
    def consistent(self) -> bool:
        return self.max_abs_residual <= self.tolerance

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "consistent": self.consistent,
            "max_abs_residual": self.max_abs_residual,
            "tolerance": self.tolerance,
            "residuals": [
                {"judgment": j.to_json_dict(), "log_residual": r} for j, r in self.residuals
            ],
        }


@dataclass(frozen=True)
class TradeoffResult:
    weights: WeightVector
    consistency: ConsistencyReport


def tradeoff_weights(
    criteria: Sequence[str],
    judgments: Sequence[TradeoffJudgment],
    tolerance: float = DEFAULT_CONSISTENCY_TOLERANCE,
) -> TradeoffResult:
    """Solve pairwise indifference ratios for weights.

    The first criterion anchors the scale; every other weight is the
    product of ratios along a shortest judgment path to it. Judgments that
    close a cycle only feed the consistency report: a residual is the log
    of (stated ratio / ratio implied by the tree), and any |residual| above
    ``tolerance`` flags the set inconsistent. Weights are returned either way.
    """
    criteria = list(criteria)
    if not criteria:
        raise InvalidValueError("tradeoff needs at least one criterion")
    if len(set(criteria)) != len(criteria):
        raise InvalidValueError("criteria list repeats an id", criteria=criteria)
    known = set(criteria)
    for j in judgments:
        if j.criterion_a not in known or j.criterion_b not in known:
            raise InvalidValueError(
                "judgment references a criterion outside the list",
                a=j.criterion_a, b=j.criterion_b,
            )

    # Adjacency with ratio value[neighbor] = value[node] * factor.
    adjacency: dict[str, list[tuple[str, float, int]]] = {c: [] for c in criteria}
    for idx, j in enumerate(judgments):
        # ratio = w_a / w_b, so w_b = w_a / ratio and w_a = w_b * ratio.
        adjacency[j.criterion_a].append((j.criterion_b, 1.0 / j.ratio, idx))
        adjacency[j.criterion_b].append((j.criterion_a, j.ratio, idx))

    reference = criteria[0]
    value: dict[str, float] = {reference: 1.0}
    tree_edges: set[int] = set()
    frontier = [reference]
    while frontier:
        next_frontier = []
        for node in frontier:
            for neighbor, factor, idx in adjacency[node]:
                if neighbor not in value:
                    value[neighbor] = value[node] * factor
                    tree_edges.add(idx)
                    next_frontier.append(neighbor)
        frontier = next_frontier

    unreachable = [c for c in criteria if c not in value]
    if unreachable:
        raise DisconnectedJudgmentsError(
            "judgments do not connect all criteria; unreachable: "
            + ", ".join(sorted(unreachable)),
            unreachable=sorted(unreachable),
        )

    residuals = []
    for idx, j in enumerate(judgments):
        if idx in tree_edges:
            continue
        implied = value[j.criterion_a] / value[j.criterion_b]
        residuals.append((j, math.log(j.ratio / implied)))

    weights = WeightVector.from_raw(value)
    ordered = WeightVector({c: weights[c] for c in criteria})
    return TradeoffResult(
        weights=ordered,
        consistency=ConsistencyReport(residuals=tuple(residuals), tolerance=tolerance),
    )


# --- resumable sessions ----------------------------------------------------


@dataclass(frozen=True)
class Question:
    """One pending elicitation question."""

    key: str
    prompt: str
    expects: str  # "number" | "order"
    criterion: str | None = None

    def to_json_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"key": self.key, "prompt": self.prompt, "expects": self.expects}
        if self.criterion is not None:
            doc["criterion"] = self.criterion
        return doc


@dataclass(frozen=True)
class ElicitationSession:
    """Immutable question/answer state for one weighting technique.

    ``session_answer`` returns a new session; the transcript only grows.
    Once complete the session carries the WeightVector the matching
    one-shot operation would produce for the same transcript.
    """

    technique: str
    criteria: tuple[str, ...]
    transcript: tuple[tuple[Question, Any], ...] = ()
    pending: Question | None = None
    weights: WeightVector | None = None
    consistency: ConsistencyReport | None = None
    cycle_checks: int = 0

    @property
    def complete(self) -> bool:
        return self.weights is not None

    def to_json_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "technique": self.technique,
            "criteria": list(self.criteria),
            "qa": [
                {"question": q.to_json_dict(),
                 "answer": list(a) if isinstance(a, tuple) else a}
                for q, a in self.transcript
            ],
        }
        if self.pending is not None:
            doc["pending"] = self.pending.to_json_dict()
        if self.weights is not None:
            doc["weights"] = self.weights.to_json_dict()
        if self.consistency is not None:
            doc["consistency"] = self.consistency.to_json_dict()
        return doc

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, ensure_ascii=False)


def _smart_question(criterion: str) -> Question:
    return Question(
        key=f"smart:{criterion}",
        prompt=f"Importance of criterion '{criterion}' on a 1-100 scale:",
        expects="number",
        criterion=criterion,
    )


def _swing_order_question(criteria: Sequence[str]) -> Question:
    return Question(
        key="swing:order",
        prompt=(
            "All criteria sit at their worst level. List every criterion id in the "
            "order you would improve them, first to improve first "
            f"(criteria: {', '.join(criteria)}):"
        ),
        expects="order",
    )


def _swing_points_question(criterion: str, cap: float) -> Question:
    return Question(
        key=f"swing:{criterion}",
        prompt=(
            f"Points in (0, 100] for improving criterion '{criterion}' next "
            f"(at most {cap:g}):"
        ),
        expects="number",
        criterion=criterion,
    )


def _tradeoff_question(reference: str, criterion: str) -> Question:
    return Question(
        key=f"tradeoff:{reference}/{criterion}",
        prompt=(
            f"At your indifference point, how many times more important is "
            f"'{reference}' than '{criterion}'? (positive ratio w_{reference}/w_{criterion})"
        ),
        expects="number",
        criterion=criterion,
    )


def _tradeoff_check_question(a: str, b: str) -> Question:
    return Question(
        key=f"tradeoff-check:{a}/{b}",
        prompt=(
            f"Consistency check: at indifference, how many times more important is "
            f"'{a}' than '{b}'? (positive ratio w_{a}/w_{b})"
        ),
        expects="number",
        criterion=b,
    )


def session_start(
    technique: str, criteria: Sequence[str], cycle_checks: int = 0
) -> ElicitationSession:
    """Open an elicitation session; may complete immediately when no
    questions are needed (e.g. SWING or trade-off over one criterion)."""
    if technique == "fuzzy":
        raise StrategyNotImplementedError(
            "the 'by fuzzy weighting' strategy is not implemented", strategy="fuzzy"
        )
    if technique not in TECHNIQUES:
        raise InvalidValueError(f"unknown technique {technique!r}", technique=technique)
    criteria = tuple(criteria)
    if not criteria:
        raise InvalidValueError("a session needs at least one criterion")
    if len(set(criteria)) != len(criteria):
        raise InvalidValueError("criteria list repeats an id", criteria=list(criteria))

    session = ElicitationSession(
        technique=technique, criteria=criteria, cycle_checks=cycle_checks
    )
    if technique == "smart":
        return replace(session, pending=_smart_question(criteria[0]))
    if technique == "swing":
        if len(criteria) == 1:
            return replace(session, weights=WeightVector({criteria[0]: 1.0}))
        return replace(session, pending=_swing_order_question(criteria))
    # tradeoff
    if len(criteria) == 1:
        return replace(
            session,
            weights=WeightVector({criteria[0]: 1.0}),
            consistency=ConsistencyReport(residuals=(), tolerance=DEFAULT_CONSISTENCY_TOLERANCE),
        )
    return replace(session, pending=_tradeoff_question(criteria[0], criteria[1]))


def _parse_number(answer: Any) -> float:
    if isinstance(answer, bool) or not isinstance(answer, (int, float, str)):
        raise MalformedAnswerError(f"expected a number, got {answer!r}", answer=answer)
    if isinstance(answer, str):
        try:
            answer = float(answer.strip())
        except ValueError:
            raise MalformedAnswerError(f"expected a number, got {answer!r}", answer=answer)
    return float(answer)


def _parse_order(answer: Any, criteria: Sequence[str]) -> tuple[str, ...]:
    if isinstance(answer, str):
        parts = [p.strip() for p in answer.replace(",", " ").split() if p.strip()]
    elif isinstance(answer, (list, tuple)):
        parts = [str(p) for p in answer]
    else:
        raise MalformedAnswerError(
            f"expected an ordered id list, got {answer!r}", answer=answer
        )
    if sorted(parts) != sorted(criteria):
        raise MalformedAnswerError(
            "order must list every criterion exactly once",
            answer=parts, criteria=list(criteria),
        )
    return tuple(parts)


def _smart_answers(session: ElicitationSession) -> dict[str, float]:
    return {q.criterion: a for q, a in session.transcript if q.key.startswith("smart:")}


def _swing_order(session: ElicitationSession) -> tuple[str, ...] | None:
    for q, a in session.transcript:
        if q.key == "swing:order":
            return tuple(a)
    return None


def _swing_points(session: ElicitationSession) -> dict[str, float]:
    return {
        q.criterion: a
        for q, a in session.transcript
        if q.key.startswith("swing:") and q.criterion is not None
    }


def _tradeoff_judgments(session: ElicitationSession) -> list[TradeoffJudgment]:
    judgments = []
    for q, a in session.transcript:
        if q.key.startswith(("tradeoff:", "tradeoff-check:")):
            pair = q.key.split(":", 1)[1]
            a_id, b_id = pair.split("/", 1)
            judgments.append(TradeoffJudgment(a_id, b_id, a))
    return judgments


def session_answer(session: ElicitationSession, answer: Any) -> ElicitationSession:
    """Record an answer to the pending question and advance the session.

    A malformed answer raises and leaves the session value unchanged (it is
    immutable; simply keep using it).
    """
    if session.complete:
        raise SessionCompleteError("session is already complete")
    question = session.pending
    assert question is not None

    if question.expects == "order":
        parsed: Any = _parse_order(answer, session.criteria)
    else:
        parsed = _parse_number(answer)
        if question.key.startswith("smart:") and not 1 <= parsed <= 100:
            raise MalformedAnswerError(
                f"importance must lie in [1, 100], got {parsed}", answer=parsed
            )
        if question.key.startswith("swing:"):
            cap = _swing_cap(session)
            if not 0 < parsed <= cap:
                raise MalformedAnswerError(
                    f"points must lie in (0, {cap:g}], got {parsed}", answer=parsed
                )
        if question.key.startswith(("tradeoff:", "tradeoff-check:")) and parsed <= 0:
            raise MalformedAnswerError(
                f"ratio must be positive, got {parsed}", answer=parsed
            )

    transcript = session.transcript + ((question, parsed),)
    advanced = replace(session, transcript=transcript, pending=None)
    return _advance(advanced)


def _swing_cap(session: ElicitationSession) -> float:
    points = _swing_points(session)
    order = _swing_order(session)
    if not order or not points:
        return 100.0
    answered = [points[c] for c in order if c in points]
    return answered[-1] if answered else 100.0


def _advance(session: ElicitationSession) -> ElicitationSession:
    if session.technique == "smart":
        answers = _smart_answers(session)
        for cid in session.criteria:
            if cid not in answers:
                return replace(session, pending=_smart_question(cid))
        return replace(session, weights=smart_weights(answers))

    if session.technique == "swing":
        order = _swing_order(session)
        if order is None:
            return replace(session, pending=_swing_order_question(session.criteria))
        points = dict(_swing_points(session))
        points[order[0]] = 100.0  # anchor, never asked
        for cid in order[1:]:
            if cid not in points:
                return replace(
                    session, pending=_swing_points_question(cid, _swing_cap(session))
                )
        return replace(session, weights=swing_weights(order, points))

    # tradeoff: a star of n-1 ratios from the reference, then optional checks
    judgments = _tradeoff_judgments(session)
    reference = session.criteria[0]
    asked_star = {j.criterion_b for j in judgments if j.criterion_a == reference}
    for cid in session.criteria[1:]:
        if cid not in asked_star:
            return replace(session, pending=_tradeoff_question(reference, cid))
    others = session.criteria[1:]
    check_pairs = [
        (others[i], others[i + 1]) for i in range(min(session.cycle_checks, len(others) - 1))
    ]
    answered_checks = set()
    for q, _ in session.transcript:
        if q.key.startswith("tradeoff-check:"):
            a_id, b_id = q.key.split(":", 1)[1].split("/", 1)
            answered_checks.add((a_id, b_id))
    for a_id, b_id in check_pairs:
        if (a_id, b_id) not in answered_checks:
            return replace(session, pending=_tradeoff_check_question(a_id, b_id))
    result = tradeoff_weights(session.criteria, judgments)
    return replace(session, weights=result.weights, consistency=result.consistency)


def session_from_json_dict(doc: Mapping[str, Any]) -> ElicitationSession:
    """Rebuild a session from its transcript document by replaying answers."""
    technique = doc["technique"]
    criteria = tuple(doc["criteria"])
    cycle_checks = int(doc.get("cycle_checks", 0))
    session = session_start(technique, criteria, cycle_checks=cycle_checks)
    for qa in doc.get("qa", ()):
        session = session_answer(session, qa["answer"])
    return session
