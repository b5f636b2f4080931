"""Registered arithmetic function symbols and primitive relations."""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable


def next_odd(n: int) -> int:
    """Least odd number >= n."""
    return n if n % 2 else n + 1


@dataclass(frozen=True)
class Function:
    name: str
    arity: int
    fn: Callable[..., int]


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    decide: Callable[..., bool]
    describe: str


FUNCTIONS: dict[str, Function] = {
    f.name: f
    for f in [
        Function("add", 2, lambda a, b: a + b),
        Function("mul", 2, lambda a, b: a * b),
        Function("sub", 2, lambda a, b: max(a - b, 0)),
        Function("mod", 2, lambda a, b: a % b if b else a),
        Function("pred", 1, lambda a: max(a - 1, 0)),
        Function("next_odd", 1, next_odd),
        Function("fact", 1, factorial),
    ]
}


def _divsucc(x: int, y: int) -> bool:
    # y divides x+1, read over positive divisors: y = 0 imposes nothing
    return y == 0 or (x + 1) % y == 0


RELATIONS: dict[str, Relation] = {
    r.name: r
    for r in [
        Relation("le", 2, lambda a, b: a <= b, "a <= b"),
        Relation("lt", 2, lambda a, b: a < b, "a < b"),
        Relation("ge", 2, lambda a, b: a >= b, "a >= b"),
        Relation("equal", 2, lambda a, b: a == b, "a = b"),
        Relation("divsucc", 2, _divsucc, "b divides a+1 (b > 0)"),
        Relation("even", 1, lambda a: a % 2 == 0, "a is even"),
        Relation("odd", 1, lambda a: a % 2 == 1, "a is odd"),
        Relation("always", 0, lambda: True, "true"),
        Relation("never", 0, lambda: False, "false"),
    ]
}
