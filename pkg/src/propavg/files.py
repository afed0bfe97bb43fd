"""JSON documents for instances, allocations and solve results.

Instance::

    {"agents": 3, "goods": 4, "valuations": [[10, 7, 7, 6], ...]}

Allocation: either ``{"allocation": [[0], [1, 3], [2]]}`` (a result file
works too) or the bare list of per-agent good lists.

Result::

    {"allocation": [[...], ...],
     "certificates": {"PROPAVG": [{"agent": 0, "lhs": .., "rhs": .., "satisfied": true}, ...]},
     "trace": [{"depth": 0, "iterations": 2, ...}, ...]}

Output is always ``json.dumps(..., indent=2, sort_keys=True)`` plus a newline,
so equal documents are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from .errors import InputError
from .fairness import Notion, SatisfactionReport
from .instance import Allocation, Instance


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _loads(text: str, what: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} is not valid JSON: {exc}") from None


def read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def instance_to_dict(inst: Instance) -> dict:
    return {"agents": inst.n_agents, "goods": inst.n_goods, "valuations": [list(r) for r in inst.values]}


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InputError("instance document must be a JSON object")
    missing = {"agents", "goods", "valuations"} - doc.keys()
    if missing:
        raise InputError(f"instance document lacks {sorted(missing)}")
    rows = doc["valuations"]
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InputError("valuations must be a list of rows")
    return Instance(doc["agents"], doc["goods"], tuple(tuple(r) for r in rows))


def dump_instance(inst: Instance) -> str:
    return dumps(instance_to_dict(inst))


def load_instance(text: str) -> Instance:
    return instance_from_dict(_loads(text, "instance file"))


def allocation_from_doc(doc: Any) -> Allocation:
    if isinstance(doc, dict):
        if "allocation" not in doc:
            raise InputError("allocation document lacks 'allocation'")
        doc = doc["allocation"]
    if not isinstance(doc, list) or not all(isinstance(b, list) for b in doc):
        raise InputError("allocation must be a list of good-index lists")
    for b in doc:
        for g in b:
            if isinstance(g, bool) or not isinstance(g, int):
                raise InputError(f"good index {g!r} is not an integer")
        if len(set(b)) != len(b):
            raise InputError(f"bundle {b} lists a good twice")
    return Allocation.from_lists(doc)


def load_allocation(text: str) -> Allocation:
    return allocation_from_doc(_loads(text, "allocation file"))


@dataclass
class ResultFile:
    allocation: list[list[int]]
    certificates: dict[str, list[dict]] = field(default_factory=dict)
    trace: list[dict] = field(default_factory=list)

    @classmethod
    def build(cls, alloc: Allocation, reports: list[SatisfactionReport], trace: list[dict]) -> "ResultFile":
        certs = {r.notion.value: [c.to_dict() for c in r.certificates] for r in reports}
        return cls(alloc.to_lists(), certs, trace)

    def to_dict(self) -> dict:
        return {"allocation": self.allocation, "certificates": self.certificates, "trace": self.trace}

    @classmethod
    def from_dict(cls, doc: Any) -> "ResultFile":
        if not isinstance(doc, dict) or "allocation" not in doc:
            raise InputError("result document must be an object with 'allocation'")
        alloc = allocation_from_doc(doc)
        certs = doc.get("certificates", {})
        for name in certs:
            Notion.parse(name)
        return cls(alloc.to_lists(), certs, doc.get("trace", []))

    def dumps(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def loads(cls, text: str) -> "ResultFile":
        return cls.from_dict(_loads(text, "result file"))
