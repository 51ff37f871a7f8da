"""Method-chunk repository: storage, profile-driven candidate retrieval and
JSON persistence.

A repository pairs a typology with the chunks described against it. Loaded
repositories are immutable snapshots; ``add_chunk`` returns a new value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping

from .errors import (
    DuplicateIdError,
    InvalidValuationError,
    ParseError,
    UnknownIdError,
)
from .typology import (
    MISSING,
    MISSING_TOKEN,
    ProjectProfile,
    Typology,
    Value,
)


@dataclass(frozen=True)
class MethodChunk:
    """A reusable method part described by characteristic valuations."""

    id: str
    name: str
    descriptor: str = ""
    valuations: Mapping[str, Value] = field(default_factory=dict)
    citation: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "valuations", dict(self.valuations))

    def valuation(self, characteristic_id: str) -> Value:
        """Value for a characteristic; KeyError when the chunk is not described on it."""
        return self.valuations[characteristic_id]

    def to_json_dict(self) -> dict[str, Any]:
        vals = {
            k: (MISSING_TOKEN if v is MISSING else v) for k, v in self.valuations.items()
        }
        return {
            "id": self.id,
            "name": self.name,
            "descriptor": self.descriptor,
            "valuations": vals,
            "citation": self.citation,
        }

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "MethodChunk":
        try:
            raw = doc["valuations"]
        except KeyError:
            raise ParseError("chunk document misses 'valuations'", document=dict(doc))
        vals = {k: (MISSING if v == MISSING_TOKEN else v) for k, v in raw.items()}
        try:
            return cls(
                id=doc["id"],
                name=doc["name"],
                descriptor=doc.get("descriptor", ""),
                valuations=vals,
                citation=doc.get("citation"),
            )
        except KeyError as exc:
            raise ParseError(f"chunk document misses field {exc}", document=dict(doc))


def _check_valuations(chunk: MethodChunk, typology: Typology) -> None:
    for cid, value in chunk.valuations.items():
        if cid not in typology:
            raise InvalidValuationError(
                f"chunk {chunk.id!r} references unknown characteristic {cid!r}",
                chunk=chunk.id, characteristic=cid,
            )
        if value is MISSING:
            continue
        characteristic = typology.get(cid)
        if not characteristic.domain.contains(value):
            raise InvalidValuationError(
                f"chunk {chunk.id!r} has out-of-domain value {value!r} "
                f"for characteristic {cid!r}",
                chunk=chunk.id, characteristic=cid, value=value,
            )


@dataclass(frozen=True)
class Repository:
    """Immutable collection of method chunks plus the typology they use."""

    typology: Typology
    chunks: tuple[MethodChunk, ...] = ()
    _by_id: Mapping[str, MethodChunk] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "chunks", tuple(self.chunks))
        index: dict[str, MethodChunk] = {}
        for chunk in self.chunks:
            if chunk.id in index:
                raise DuplicateIdError(f"duplicate chunk id {chunk.id!r}", id=chunk.id)
            _check_valuations(chunk, self.typology)
            index[chunk.id] = chunk
        object.__setattr__(self, "_by_id", index)

    def __len__(self) -> int:
        return len(self.chunks)

    def __iter__(self) -> Iterator[MethodChunk]:
        return iter(self.chunks)

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._by_id

    def get(self, chunk_id: str) -> MethodChunk:
        try:
            return self._by_id[chunk_id]
        except KeyError:
            raise UnknownIdError(f"unknown chunk {chunk_id!r}", id=chunk_id)

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "typology": self.typology.to_json_list(),
            "chunks": [c.to_json_dict() for c in self.chunks],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_json_dict(cls, doc: Mapping[str, Any]) -> "Repository":
        if "typology" not in doc or "chunks" not in doc:
            raise ParseError("repository document needs 'typology' and 'chunks'")
        typology = Typology.from_json_list(doc["typology"])
        chunks = tuple(MethodChunk.from_json_dict(c) for c in doc["chunks"])
        return cls(typology=typology, chunks=chunks)

    @classmethod
    def from_json(cls, text: str) -> "Repository":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"repository document is not valid JSON: {exc}",
                line=exc.lineno, column=exc.colno,
            )
        return cls.from_json_dict(doc)


def add_chunk(repo: Repository, chunk: MethodChunk) -> Repository:
    """Return a repository with ``chunk`` appended.

    Raises ``DuplicateIdError`` or ``InvalidValuationError`` (naming the
    offending characteristic) when the chunk does not fit.
    """
    if chunk.id in repo:
        raise DuplicateIdError(f"duplicate chunk id {chunk.id!r}", id=chunk.id)
    _check_valuations(chunk, repo.typology)
    return Repository(typology=repo.typology, chunks=repo.chunks + (chunk,))


@dataclass(frozen=True)
class CandidateMatch:
    chunk: MethodChunk
    matches: int


def _entry_matches(profile_value: Value, chunk_value: Value) -> bool:
    if chunk_value is MISSING:
        return False
    if isinstance(profile_value, tuple):
        return chunk_value in profile_value
    return chunk_value == profile_value


def query_by_profile(repo: Repository, profile: ProjectProfile) -> list[CandidateMatch]:
    """Order all chunks by how many profile entries their valuations equal.

    Nothing is excluded: the multicriteria stage discriminates, this
    pre-filter only orders. Ties break by ascending chunk id; result length
    always equals the repository size.
    """
    results = []
    for chunk in repo:
        count = 0
        for cid, wanted in profile.entries.items():
            have = chunk.valuations.get(cid)
            if have is not None and _entry_matches(wanted, have):
                count += 1
        results.append(CandidateMatch(chunk=chunk, matches=count))
    results.sort(key=lambda m: (-m.matches, m.chunk.id))
    return results


def save_repository(repo: Repository, path: str | Path) -> None:
    Path(path).write_text(repo.to_json() + "\n", encoding="utf-8")


def load_repository(path: str | Path) -> Repository:
    """Load a repository file.

    Malformed JSON raises ``ParseError`` with line/column context; chunks
    that fail validation raise ``InvalidValuationError``/``DuplicateIdError``
    naming the offending chunk.
    """
    text = Path(path).read_text(encoding="utf-8")
    return Repository.from_json(text)
