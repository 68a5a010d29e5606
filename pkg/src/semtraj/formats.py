"""On-disk formats.

trajectories  JSON Lines, ``{"id": <uint64>, "places": [<name>, ...]}``
forest        TSV with a ``#levels=n`` header, then ``name<TAB>c1<TAB>...<TAB>cn``
encoded       JSON Lines, ``{"id": ..., "encs": ["1.1.1", null, ...]}`` (null = UNKNOWN)
candidates    CSV ``id1,id2``
scored pairs  CSV ``id1,id2,score,m1,...,mn``, sorted, score with 6 decimals
communities   JSON Lines, ``{"members": [ids ascending]}``, sorted
report        JSON document
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable
from pathlib import Path

import numpy as np

from .encoder import ForestSource
from .evaluation import EvalReport
from .model import (
    Community,
    EncodedTrajectory,
    Encoding,
    InputFormatError,
    MalformedForest,
    Trajectory,
    canonical_pair,
    unknown_encoding,
)
from .similarity import ScoredPairTable


def _open_w(path):
    return open(path, "w", encoding="utf-8", newline="\n")


def _jsonl(path) -> Iterable[tuple[int, dict]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise InputFormatError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def read_trajectories(path) -> list[Trajectory]:
    out = []
    seen: set[int] = set()
    for lineno, obj in _jsonl(path):
        tid, places = obj.get("id"), obj.get("places")
        if isinstance(tid, bool) or not isinstance(tid, int):
            raise InputFormatError(f"{path}:{lineno}: id must be an integer")
        if not isinstance(places, list) or not all(isinstance(p, str) for p in places):
            raise InputFormatError(f"{path}:{lineno}: places must be a list of strings")
        if tid in seen:
            raise InputFormatError(f"{path}:{lineno}: duplicate id {tid}")
        seen.add(tid)
        try:
            out.append(Trajectory(tid, tuple(places)))
        except InputFormatError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_trajectories(path, trajectories: Iterable[Trajectory]) -> None:
    with _open_w(path) as fh:
        for t in trajectories:
            fh.write(json.dumps({"id": t.id, "places": list(t.places)}, ensure_ascii=False) + "\n")


def read_forest(path) -> ForestSource:
    rows = []
    levels = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("#levels="):
                    try:
                        levels = int(line.split("=", 1)[1])
                    except ValueError as exc:
                        raise MalformedForest(f"{path}:{lineno}: bad header {line!r}") from exc
                continue
            name, *codes = line.split("\t")
            try:
                rows.append((name, tuple(int(c) for c in codes)))
            except ValueError as exc:
                raise MalformedForest(f"{path}:{lineno}: non-integer code") from exc
            if levels is not None and len(codes) != levels:
                raise MalformedForest(f"{path}:{lineno}: expected {levels} codes, got {len(codes)}")
    if levels is None:
        raise MalformedForest(f"{path}: missing #levels=n header")
    return ForestSource(rows)


def write_forest(path, source: ForestSource) -> None:
    levels = len(source.rows[0][1]) if source.rows else 0
    with _open_w(path) as fh:
        fh.write(f"#levels={levels}\n")
        for name, codes in source.rows:
            fh.write(name + "\t" + "\t".join(str(c) for c in codes) + "\n")


def write_encoded(path, ets: Iterable[EncodedTrajectory]) -> None:
    with _open_w(path) as fh:
        for et in ets:
            encs = [None if e.is_unknown else ".".join(str(c) for c in e) for e in et.encs]
            fh.write(json.dumps({"id": et.id, "encs": encs}) + "\n")


def read_encoded(path, levels: int) -> list[EncodedTrajectory]:
    out = []
    for lineno, obj in _jsonl(path):
        try:
            encs = tuple(unknown_encoding(levels) if e is None else Encoding(int(c) for c in e.split("."))
                         for e in obj["encs"])
            out.append(EncodedTrajectory(int(obj["id"]), encs))
        except (KeyError, ValueError, AttributeError, TypeError) as exc:
            raise InputFormatError(f"{path}:{lineno}: malformed encoded trajectory") from exc
    return out


def write_candidates(path, pairs: Iterable[tuple[int, int]]) -> None:
    with _open_w(path) as fh:
        fh.write("id1,id2\n")
        for a, b in sorted(pairs):
            fh.write(f"{a},{b}\n")


def read_candidates(path) -> list[tuple[int, int]]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, 1):
            if lineno == 1 and row and row[0] == "id1":
                continue
            try:
                out.append(canonical_pair(int(row[0]), int(row[1])))
            except (IndexError, ValueError) as exc:
                raise InputFormatError(f"{path}:{lineno}: malformed pair row") from exc
    return out


def write_scored(path, table: ScoredPairTable) -> None:
    order = np.lexsort((table.id2, table.id1))
    levels = table.matches.shape[1]
    with _open_w(path) as fh:
        fh.write("id1,id2,score," + ",".join(f"m{h}" for h in range(1, levels + 1)) + "\n")
        for i in order.tolist():
            m = ",".join(str(int(x)) for x in table.matches[i])
            fh.write(f"{int(table.id1[i])},{int(table.id2[i])},{table.score[i]:.6f},{m}\n")


def read_scored(path) -> ScoredPairTable:
    id1, id2, score, matches = [], [], [], []
    levels = 0
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, 1):
            if lineno == 1 and row and row[0] == "id1":
                levels = len(row) - 3
                continue
            try:
                id1.append(int(row[0]))
                id2.append(int(row[1]))
                score.append(float(row[2]))
                matches.append([int(x) for x in row[3:]])
            except (IndexError, ValueError) as exc:
                raise InputFormatError(f"{path}:{lineno}: malformed scored row") from exc
    if not id1:
        return ScoredPairTable.empty(levels)
    return ScoredPairTable(id1, id2, score, np.array(matches, dtype=np.int32).reshape(len(id1), -1))


def write_communities(path, communities: Iterable[Community]) -> None:
    with _open_w(path) as fh:
        for c in sorted(communities):
            fh.write(json.dumps({"members": list(c.members)}) + "\n")


def read_communities(path) -> list[Community]:
    out = []
    for lineno, obj in _jsonl(path):
        try:
            out.append(Community(tuple(int(m) for m in obj["members"])))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputFormatError(f"{path}:{lineno}: malformed community") from exc
    return out


def write_report(path, report: EvalReport) -> None:
    Path(path).write_text(report.to_json() + "\n", encoding="utf-8")
