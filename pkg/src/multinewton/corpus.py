"""The eight benchmark equations with their published reference results."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .solver import Problem

# (name, expression, x0, seed root, {m: (iterations, evaluations, coc)}, known discrepancy)
_TABLE = [
    ("f1", "x^5 + x^4 + 4*x^2 - 15", "1.6", "1.347",
     {1: (9, 18, 2), 2: (4, 12, 4), 3: (2, 8, 5.66), 4: (2, 10, 7.6)}, False),
    ("f2", "sin(x) - x/3", "2.0", "2.278",
     {1: (23, 46, 1), 2: (10, 30, 1), 3: (7, 21, 1), 4: (6, 30, 1)}, True),
    ("f3", "10*x*exp(-x^2) - 1", "1.8", "1.679",
     {1: (10, 20, 2), 2: (4, 12, 3.99), 3: (3, 12, 6.21), 4: (3, 15, 8.22)}, False),
    ("f4", "cos(x) - x", "1.0", "0.739",
     {1: (9, 18, 2), 2: (4, 12, 3.99), 3: (3, 12, 5.90), 4: (3, 15, 8.10)}, False),
    ("f5", "exp(-x^2 + x + 2) - 1", "-0.5", "-1.000",
     {1: (11, 22, 2), 2: (5, 15, 3.99), 3: (4, 16, 5.99), 4: (3, 15, 6.75)}, False),
    ("f6", "exp(-x) + cos(x)", "2.0", "1.746",
     {1: (9, 18, 2), 2: (4, 12, 3.99), 3: (3, 12, 5.99), 4: (2, 10, 8.10)}, False),
    ("f7", "ln(x^2 + x + 2) - x + 1", "3.2", "4.152",
     {1: (10, 20, 2), 2: (4, 12, 3.99), 3: (3, 12, 6.19), 4: (3, 15, 8.19)}, False),
    ("f8", "arcsin(x^2 - 1) - x/2 + 1", "1.0", "0.5948",
     {1: (10, 20, 2), 2: (4, 12, 4.01), 3: (3, 12, 6.35), 4: (3, 15, 8.36)}, False),
]


@dataclass(frozen=True)
class Expected:
    iterations: int
    evaluations: int
    coc: float


@dataclass(frozen=True)
class CorpusEntry:
    problem: Problem
    text: str
    expected: dict
    known_discrepancy: bool = False

    @property
    def name(self):
        return self.problem.name


def _build():
    entries = []
    for name, text, x0, seed, expected, discrepancy in _TABLE:
        problem = Problem.from_text(name, text, x0, reference_root=seed)
        table = {m: Expected(*row) for m, row in expected.items()}
        entries.append(CorpusEntry(problem, text, table, discrepancy))
    return tuple(entries)


_ENTRIES = _build()


def builtin_problems() -> list[CorpusEntry]:
    """All eight entries in published order."""
    return list(_ENTRIES)


def get(name: str) -> CorpusEntry:
    for entry in _ENTRIES:
        if entry.name == name:
            return entry
    raise KeyError(f"no corpus entry {name!r}; choose from {[e.name for e in _ENTRIES]}")


def catalog() -> list[dict]:
    """One plain record per entry, suitable for JSON export."""
    return [
        {
            "name": e.name,
            "expression": e.text,
            "x0": e.problem.x0,
            "seed_root": e.problem.reference_root,
            "known_discrepancy": e.known_discrepancy,
            "expected": {
                str(m): {"iterations": x.iterations, "evaluations": x.evaluations, "coc": x.coc}
                for m, x in sorted(e.expected.items())
            },
        }
        for e in _ENTRIES
    ]


def catalog_json(indent: int | None = 2) -> str:
    return json.dumps(catalog(), indent=indent)
