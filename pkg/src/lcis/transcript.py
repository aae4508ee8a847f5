"""Round-by-round record of an online run.

A transcript stores, for each round t = 1..n, the selected vertex pair, the
edge bits revealed in that round and the update decision.  ``reveal1[k]`` is
the edge status between the newly selected vertex of G1 and the k-th vertex
processed before it (processing order); likewise ``reveal2`` for G2.

On disk a transcript is JSON lines, one object per round::

    {"t": 3, "select": [2, 2], "reveal1": "01", "reveal2": "11", "add": [2, 0]}

``add`` is ``null`` for a no-op round.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .iso import Solution


@dataclass
class RoundRecord:
    t: int
    select: tuple[int, int]
    reveal1: np.ndarray
    reveal2: np.ndarray
    add: Optional[tuple[int, int]] = None

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "select": list(self.select),
            "reveal1": _bits_to_str(self.reveal1),
            "reveal2": _bits_to_str(self.reveal2),
            "add": None if self.add is None else list(self.add),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RoundRecord":
        add = obj.get("add")
        return cls(
            t=int(obj["t"]),
            select=(int(obj["select"][0]), int(obj["select"][1])),
            reveal1=_str_to_bits(obj["reveal1"]),
            reveal2=_str_to_bits(obj["reveal2"]),
            add=None if add is None else (int(add[0]), int(add[1])),
        )


def _bits_to_str(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits, dtype=bool).tolist())


def _str_to_bits(s: str) -> np.ndarray:
    if set(s) - {"0", "1"}:
        raise ValueError(f"bad bit string {s!r}")
    return np.frombuffer(s.encode(), dtype=np.uint8) == ord("1")


@dataclass
class Transcript:
    n: int
    rounds: list[RoundRecord] = field(default_factory=list)

    def processed(self, t: Optional[int] = None) -> tuple[list[int], list[int]]:
        """Processing order (P1, P2) after ``t`` rounds (default: all)."""
        rs = self.rounds if t is None else self.rounds[:t]
        return [r.select[0] for r in rs], [r.select[1] for r in rs]

    def additions(self, t: Optional[int] = None) -> list[tuple[int, int]]:
        rs = self.rounds if t is None else self.rounds[:t]
        return [r.add for r in rs if r.add is not None]

    def sizes(self) -> list[int]:
        """|S^(t)| for t = 1..len(rounds)."""
        out, k = [], 0
        for r in self.rounds:
            k += r.add is not None
            out.append(k)
        return out

    def solution(self, t: Optional[int] = None) -> Solution:
        adds = self.additions(t)
        return Solution([a for a, _ in adds], [b for _, b in adds])

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_json()) + "\n" for r in self.rounds)

    @classmethod
    def from_jsonl(cls, text: str, n: Optional[int] = None) -> "Transcript":
        rounds = [RoundRecord.from_json(json.loads(line))
                  for line in text.splitlines() if line.strip()]
        return cls(len(rounds) if n is None else n, rounds)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    @classmethod
    def load(cls, path, n: Optional[int] = None) -> "Transcript":
        with open(path) as fh:
            return cls.from_jsonl(fh.read(), n)
