"""Augmented diagrams: a Jacobi diagram plus isolated vertices weighted by primes.

The degree of an augmented diagram is its total vertex count. The true set of
weights is every prime; all computations take an explicit finite
``PrimeSupport``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

from . import jacobi
from .jacobi import CanonicalDiagram
from .linking import is_prime


@dataclass(frozen=True)
class PrimeSupport:
    primes: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(int(p) for p in self.primes)
        for p in ps:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
        if len(set(ps)) != len(ps):
            raise ValueError("duplicate primes in support")
        object.__setattr__(self, "primes", tuple(sorted(ps)))

    @classmethod
    def parse(cls, text: str) -> "PrimeSupport":
        text = text.strip()
        return cls(tuple(int(t) for t in text.split(",")) if text else ())

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


@dataclass(frozen=True, order=True)
class AugmentedDiagram:
    jacobi_part: CanonicalDiagram
    weights: tuple[int, ...]

    def __post_init__(self):
        ws = tuple(sorted(int(w) for w in self.weights))
        for w in ws:
            if not is_prime(w):
                raise ValueError(f"weight {w} is not prime")
        object.__setattr__(self, "weights", ws)

    @property
    def degree(self) -> int:
        return self.jacobi_part.vertex_count + len(self.weights)

    def to_json(self) -> dict:
        return {"jacobi": self.jacobi_part.diagram().to_json(), "weights": list(self.weights)}

    @classmethod
    def from_json(cls, obj) -> "AugmentedDiagram":
        if isinstance(obj, str):
            obj = json.loads(obj)
        cd, sign = jacobi.canonicalize(jacobi.JacobiDiagram.from_json(obj["jacobi"]))
        if sign == 0:
            raise ValueError("jacobi part is zero in the diagram space")
        return cls(cd, tuple(obj["weights"]))


def multiset_count(m: int, r: int) -> int:
    """Multisets of size r drawn from m items."""
    if r == 0:
        return 1
    return comb(m + r - 1, r) if m else 0


def dim_augmented(n: int, support: PrimeSupport, use_cache: bool = True) -> int:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return sum(jacobi.dim(k, use_cache) * multiset_count(len(support), n - 2 * k)
               for k in range(n // 2 + 1))


def enumerate_augmented(n: int, support: PrimeSupport, use_cache: bool = True) -> list[AugmentedDiagram]:
    """Pairs (quotient basis element of A_k, weight multiset of size n - 2k)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for k in range(n // 2 + 1):
        basis = jacobi.space(k, use_cache).basis()
        for ws in combinations_with_replacement(support.primes, n - 2 * k):
            out.extend(AugmentedDiagram(b, ws) for b in basis)
    return out
