"""Project-characteristics catalog: value domains, the built-in typology,
profile validation and user extension.

The built-in catalog groups 29 characteristics into four dimensions
(organisational, human, application-domain, development-strategy). Catalog
values are immutable; extending the catalog returns a new ``Typology``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Mapping

from .errors import DuplicateIdError, InvalidValueError, ParseError, UnknownIdError

DIMENSIONS = (
    "organisational",
    "human",
    "application-domain",
    "development-strategy",
)

#: Characteristics whose profile entries may hold several labels at once.
#: "Variable artefacts" enumerates whole dimensions, so a project can
#: plausibly tick more than one; single-label entries stay valid.
MULTI_SELECT_CHARACTERISTICS = frozenset({"variable-artefacts"})


class _Missing:
    """Singleton marker for a valuation that is explicitly not applicable."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "MISSING"

    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self


MISSING = _Missing()

#: JSON spelling of the MISSING marker.
MISSING_TOKEN = "__missing__"

Value = Any  # str | int | float | tuple[str, ...] | _Missing


@dataclass(frozen=True)
class ValueDomain:
    """Set of admissible values for one characteristic.

    ``kind`` is ``ordinal`` (ordered labels, least preferred first),
    ``nominal`` (unordered labels) or ``numeric`` (non-negative numbers,
    no labels).
    """

    kind: str
    levels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("ordinal", "nominal", "numeric"):
            raise InvalidValueError(f"unknown domain kind {self.kind!r}", kind=self.kind)
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.kind == "numeric":
            if self.levels:
                raise InvalidValueError("numeric domains carry no labels", levels=list(self.levels))
        else:
            if len(self.levels) < 2:
                raise InvalidValueError(
                    f"{self.kind} domains need at least 2 levels", levels=list(self.levels)
                )
            if len(set(self.levels)) != len(self.levels):
                raise InvalidValueError("domain levels must be distinct", levels=list(self.levels))

    def contains(self, value: Value) -> bool:
        if self.kind == "numeric":
            return isinstance(value, (int, float)) and not isinstance(value, bool) and value >= 0
        return value in self.levels

    def to_json_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "levels": list(self.levels)}

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "ValueDomain":
        return cls(kind=doc["kind"], levels=tuple(doc.get("levels") or ()))


def ordinal(*levels: str) -> ValueDomain:
    return ValueDomain("ordinal", levels)


def nominal(*levels: str) -> ValueDomain:
    return ValueDomain("nominal", levels)


def numeric() -> ValueDomain:
    return ValueDomain("numeric")


LOW_NORMAL_HIGH = ordinal("low", "normal", "high")


@dataclass(frozen=True)
class Characteristic:
    """One catalogued project (or method) characteristic."""

    id: str
    name: str
    dimension: str
    domain: ValueDomain
    facets: tuple[ValueDomain, ...] = ()
    source: frozenset[int] = frozenset()
    builtin: bool = False

    def __post_init__(self):
        if self.dimension not in DIMENSIONS:
            raise InvalidValueError(
                f"unknown dimension {self.dimension!r} for characteristic {self.id!r}",
                dimension=self.dimension,
            )
        object.__setattr__(self, "facets", tuple(self.facets))
        object.__setattr__(self, "source", frozenset(self.source))
        if self.builtin and not self.source:
            raise InvalidValueError(
                f"built-in characteristic {self.id!r} needs a source set", id=self.id
            )

    def accepts(self, value: Value, include_facets: bool = True) -> bool:
        """True when ``value`` lies in the primary domain (or a facet)."""
        if self.domain.contains(value):
            return True
        if include_facets:
            return any(f.contains(value) for f in self.facets)
        return False

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "name": self.name,
            "dimension": self.dimension,
            "kind": self.domain.kind,
            "levels": list(self.domain.levels),
            "facets": [f.to_json_dict() for f in self.facets],
            "source": sorted(self.source),
            "builtin": self.builtin,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "Characteristic":
        try:
            return cls(
                id=doc["id"],
                name=doc["name"],
                dimension=doc["dimension"],
                domain=ValueDomain(kind=doc["kind"], levels=tuple(doc.get("levels") or ())),
                facets=tuple(ValueDomain.from_json_dict(f) for f in doc.get("facets", ())),
                source=frozenset(doc.get("source", ())),
                builtin=bool(doc.get("builtin", False)),
            )
        except KeyError as exc:
            raise ParseError(f"characteristic document misses field {exc}", document=dict(doc))


@dataclass(frozen=True)
class Typology:
    """Immutable catalog of characteristics, kept in table order."""

    characteristics: tuple[Characteristic, ...]
    _by_id: Mapping[str, Characteristic] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "characteristics", tuple(self.characteristics))
        index: dict[str, Characteristic] = {}
        for ch in self.characteristics:
            if ch.id in index:
                raise DuplicateIdError(f"duplicate characteristic id {ch.id!r}", id=ch.id)
            index[ch.id] = ch
        object.__setattr__(self, "_by_id", index)

    def __iter__(self) -> Iterator[Characteristic]:
        return iter(self.characteristics)

    def __len__(self) -> int:
        return len(self.characteristics)

    def __contains__(self, characteristic_id: str) -> bool:
        return characteristic_id in self._by_id

    def get(self, characteristic_id: str) -> Characteristic:
        try:
            return self._by_id[characteristic_id]
        except KeyError:
            raise UnknownIdError(
                f"unknown characteristic {characteristic_id!r}", id=characteristic_id
            )

    def by_dimension(self, dimension: str) -> tuple[Characteristic, ...]:
        return tuple(c for c in self.characteristics if c.dimension == dimension)

    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.characteristics)

    def to_json_list(self) -> list[dict[str, Any]]:
        return [c.to_json_dict() for c in self.characteristics]

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_list(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_json_list(cls, docs: Iterable[Mapping[str, Any]]) -> "Typology":
        return cls(tuple(Characteristic.from_json_dict(d) for d in docs))

    @classmethod
    def from_json(cls, text: str) -> "Typology":
        try:
            docs = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"typology document is not valid JSON: {exc}", line=exc.lineno)
        if not isinstance(docs, list):
            raise ParseError("typology document must be a JSON array")
        return cls.from_json_list(docs)


def _builtin(id: str, name: str, dimension: str, domain: ValueDomain,
             source: Iterable[int], facets: Iterable[ValueDomain] = ()) -> Characteristic:
    return Characteristic(
        id=id, name=name, dimension=dimension, domain=domain,
        facets=tuple(facets), source=frozenset(source), builtin=True,
    )


_BUILTIN_CHARACTERISTICS: tuple[Characteristic, ...] = (
    # organisational
    _builtin("management-commitment", "Management commitment", "organisational",
             LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("importance", "Importance", "organisational", LOW_NORMAL_HIGH, (1, 3)),
    _builtin("impact", "Impact", "organisational", LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("time-pressure", "Time pressure", "organisational", LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("shortage-of-resources", "Shortage of resources", "organisational",
             LOW_NORMAL_HIGH, (1, 2, 3),
             facets=(nominal("human", "means"),
                     nominal("financial resources", "human resources",
                             "temporal resources", "informational resources"))),
    _builtin("size", "Size", "organisational", LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("level-of-innovation", "Level of innovation", "organisational",
             LOW_NORMAL_HIGH, (1, 2, 3),
             facets=(nominal("business innovation", "technology innovation"),)),
    # human
    _builtin("resistance-and-conflict", "Resistance and conflict", "human",
             LOW_NORMAL_HIGH, (1, 3)),
    _builtin("expertise", "Expertise (knowledge, experience, and skills)", "human",
             LOW_NORMAL_HIGH, (1, 2, 3),
             facets=(nominal("tester", "developer", "designer", "analyst"),)),
    _builtin("clarity-and-stability", "Clarity and stability", "human",
             LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("user-involvement", "User involvement", "human",
             nominal("real", "virtual"), (2, 3)),
    _builtin("stakeholder-number", "Stakeholder number", "human", numeric(), (3,)),
    # application-domain
    _builtin("formality", "Formality", "application-domain", LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("relationships", "Relationships", "application-domain", LOW_NORMAL_HIGH, (1, 3)),
    _builtin("dependency", "Dependency", "application-domain", LOW_NORMAL_HIGH, (1, 2, 3)),
    _builtin("complexity", "Complexity", "application-domain", LOW_NORMAL_HIGH, (1, 3)),
    _builtin("application-type", "Application type", "application-domain",
             nominal("intra-organization application", "inter-organization application",
                     "organization-customer application"), (2, 3)),
    _builtin("application-technology", "Application technology", "application-domain",
             nominal("application to develop includes a database",
                     "application to develop is distributed",
                     "application to develop includes a GUI"), (2, 3)),
    _builtin("dividing-project", "Dividing project", "application-domain",
             nominal("one single system", "establishing system-oriented subprojects",
                     "establishing process-oriented subprojects",
                     "establishing hybrid subprojects"), (1, 2, 3)),
    _builtin("repetitiveness", "Repetitiveness", "application-domain", LOW_NORMAL_HIGH, (3,)),
    _builtin("variability", "Variability", "application-domain", LOW_NORMAL_HIGH, (3,)),
    _builtin("variable-artefacts", "Variable artefacts", "application-domain",
             nominal("organisational", "human", "application domain", "development strategy"),
             (3,)),
    # development-strategy
    _builtin("source-system", "Source system", "development-strategy",
             nominal("code reuse", "functional domain reuse", "interface reuse"), (2, 3),
             facets=(ordinal("weak", "medium", "strong"),)),
    _builtin("project-organization", "Project organization", "development-strategy",
             nominal("standard", "adapted"), (1, 2, 3)),
    _builtin("development-strategy", "Development strategy", "development-strategy",
             nominal("outsourcing", "iterative", "prototyping", "phase-wise", "tile-wise"),
             (1, 2, 3)),
    _builtin("realization-strategy", "Realization strategy", "development-strategy",
             nominal("at once", "incremental", "concurrent", "overlapping"), (1, 2, 3)),
    _builtin("delivery-strategy", "Delivery strategy", "development-strategy",
             nominal("at once", "incremental", "evolutionary"), (1, 2, 3)),
    _builtin("tracing-project", "Tracing project", "development-strategy",
             ordinal("weak", "strong"), (1, 2, 3)),
    _builtin("goal-number", "Goal number", "development-strategy",
             nominal("one goal", "multi-goals"), (3,)),
)

_BUILTIN_TYPOLOGY = Typology(_BUILTIN_CHARACTERISTICS)


def load_builtin_typology() -> Typology:
    """Return the built-in catalog (29 characteristics, table order)."""
    return _BUILTIN_TYPOLOGY


def extend_typology(typology: Typology, characteristic: Characteristic) -> Typology:
    """Return a new catalog with ``characteristic`` appended (builtin=False)."""
    if characteristic.id in typology:
        raise DuplicateIdError(
            f"characteristic {characteristic.id!r} already in catalog", id=characteristic.id
        )
    added = replace(characteristic, builtin=False)
    return Typology(typology.characteristics + (added,))


@dataclass(frozen=True)
class ProjectProfile:
    """Chosen characteristic values for one project.

    Entries map characteristic id to a value; ids listed in ``critical``
    are the project's flagged critical aspects.
    """

    entries: Mapping[str, Value] = field(default_factory=dict)
    critical: frozenset[str] = frozenset()

    def __post_init__(self):
        normalized = {}
        for key, value in dict(self.entries).items():
            if isinstance(value, list):
                value = tuple(value)
            normalized[key] = value
        object.__setattr__(self, "entries", normalized)
        object.__setattr__(self, "critical", frozenset(self.critical))

    def to_json_dict(self) -> dict[str, Any]:
        entries = {
            k: (list(v) if isinstance(v, tuple) else v) for k, v in self.entries.items()
        }
        return {"entries": entries, "critical": sorted(self.critical)}

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "ProjectProfile":
        return cls(entries=dict(doc.get("entries", {})),
                   critical=frozenset(doc.get("critical", ())))


@dataclass(frozen=True)
class ProfileIssue:
    characteristic_id: str
    problem: str  # "unknown-characteristic" | "out-of-domain"
    value: Value = None

    def to_json_dict(self) -> dict[str, Any]:
        value = list(self.value) if isinstance(self.value, tuple) else self.value
        return {"characteristic_id": self.characteristic_id,
                "problem": self.problem, "value": value}


def validate_profile(
    profile: ProjectProfile,
    typology: Typology,
    multi_select: frozenset[str] = MULTI_SELECT_CHARACTERISTICS,
) -> list[ProfileIssue]:
    """List every profile entry with an unknown id or out-of-domain value.

    An empty report means the profile is valid. Inputs are not mutated.
    """
    issues: list[ProfileIssue] = []
    for cid in sorted(profile.entries):
        value = profile.entries[cid]
        if cid not in typology:
            issues.append(ProfileIssue(cid, "unknown-characteristic", value))
            continue
        characteristic = typology.get(cid)
        if isinstance(value, tuple):
            ok = (
                cid in multi_select
                and len(value) > 0
                and len(set(value)) == len(value)
                and all(characteristic.accepts(v) for v in value)
            )
        else:
            ok = value is not MISSING and characteristic.accepts(value)
        if not ok:
            issues.append(ProfileIssue(cid, "out-of-domain", value))
    return issues
