"""Index sets, dual systems and the coproduct on the algebra of invariants.

``C_1`` is a finite set of primes, ``C_{2m}`` has one opaque label per basis
element of the connected diagram space in degree m, and ``C_k`` is empty for
odd k > 1. ``T_n`` is ``C_n`` together with the product indices: strictly
increasing sequences of pairs (k, i) with 0 < k < n and positive
multiplicities whose weighted sum is n.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import jacobi
from .augmented import PrimeSupport, dim_augmented
from .bracket import (DEFAULT, Evaluator, FormalSum, InvariantExpr, ManifoldModel, Monomial, S3, Symbol,
                      make_monomial, mono_degree, mono_mul, mono_str, prime_model, surgery_generator)


class DualSystemError(ArithmeticError):
    pass


@dataclass(frozen=True)
class IndexUniverse:
    """Ordered label lists ``C[k]`` for 1 <= k <= max_degree."""

    C: tuple[tuple, ...]  # C[k - 1] = labels of degree k

    @classmethod
    def build(cls, max_degree: int, support: PrimeSupport, use_cache: bool = True) -> "IndexUniverse":
        C = []
        for k in range(1, max_degree + 1):
            if k == 1:
                C.append(tuple(support.primes))
            elif k % 2 == 0:
                C.append(tuple(f"c{j}" for j in range(jacobi.connected_dim(k // 2, use_cache))))
            else:
                C.append(())
        return cls(tuple(C))

    @classmethod
    def from_sizes(cls, support: PrimeSupport, even_sizes: dict[int, int], max_degree: int) -> "IndexUniverse":
        """Universe with explicit |C_{2m}| (no diagram computation)."""
        C = []
        for k in range(1, max_degree + 1):
            if k == 1:
                C.append(tuple(support.primes))
            elif k % 2 == 0:
                C.append(tuple(f"c{j}" for j in range(even_sizes.get(k, 0))))
            else:
                C.append(())
        return cls(tuple(C))

    @property
    def max_degree(self) -> int:
        return len(self.C)

    def labels(self, k: int) -> tuple:
        if not 1 <= k <= self.max_degree:
            raise ValueError(f"degree {k} outside the universe (max {self.max_degree})")
        return self.C[k - 1]

    def pairs(self, below: int) -> list[tuple[int, object]]:
        """All (k, i) with 0 < k < below, in the lexicographic order on (k, position)."""
        return [(k, i) for k in range(1, below) for i in self.labels(k)]

    def symbol(self, k: int, i) -> Symbol:
        return Symbol(k, i)


@dataclass(frozen=True)
class MultiIndex:
    ks: tuple[int, ...]
    labels: tuple
    eps: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(k * e for k, e in zip(self.ks, self.eps))

    def pairs(self):
        return tuple(zip(self.ks, self.labels))

    def __str__(self):
        return index_str(self)


@dataclass(frozen=True)
class Additive:
    """An element of C_k."""

    k: int
    label: object

    @property
    def degree(self) -> int:
        return self.k

    def __str__(self):
        return str(Symbol(self.k, self.label))


Index = Additive | MultiIndex


def enumerate_product_indices(n: int, u: IndexUniverse) -> list[MultiIndex]:
    pairs = u.pairs(n)
    out = []

    def rec(start, remaining, chosen):
        if remaining == 0:
            out.append(MultiIndex(tuple(p[0] for p, _ in chosen), tuple(p[1] for p, _ in chosen),
                                  tuple(e for _, e in chosen)))
            return
        for j in range(start, len(pairs)):
            k = pairs[j][0]
            if k > remaining:
                break
            for e in range(1, remaining // k + 1):
                chosen.append((pairs[j], e))
                rec(j + 1, remaining - e * k, chosen)
                chosen.pop()

    rec(0, n, [])
    return out


def enumerate_Tn(n: int, u: IndexUniverse) -> list[Index]:
    if n < 1:
        raise ValueError("T_n needs n >= 1")
    return [Additive(n, i) for i in u.labels(n)] + enumerate_product_indices(n, u)


def lambda_of(idx: Index) -> InvariantExpr:
    if isinstance(idx, Additive):
        return InvariantExpr.symbol(Symbol(idx.k, idx.label))
    powers = {Symbol(k, i): e for k, i, e in zip(idx.ks, idx.labels, idx.eps)}
    return InvariantExpr({make_monomial(powers): 1})


def index_str(idx: Index) -> str:
    return str(lambda_of(idx))


def base_generator(k: int, label) -> FormalSum:
    """G^{(k)}_{k,i} for i in C_k: M_p - S^3 in degree 1, X_{k,i} - S^3 for even k."""
    prim = prime_model(label) if k == 1 else surgery_generator(k, label)
    return FormalSum.of(ManifoldModel((prim,))) - FormalSum.of(S3)


def g_tilde(idx: MultiIndex) -> FormalSum:
    out = FormalSum.of(S3)
    for k, i, e in zip(idx.ks, idx.labels, idx.eps):
        out = out.connect(base_generator(k, i).connect_power(e))
    return out


def followers(n: int, idx: Index, u: IndexUniverse) -> list[MultiIndex]:
    """The product indices of degree n that dominate ``idx``."""
    if isinstance(idx, Additive):
        if n % idx.k or n // idx.k < 2:
            return []
        return [MultiIndex((idx.k,), (idx.label,), (n // idx.k,))]
    out = []
    for cand in enumerate_product_indices(n, u):
        if cand.ks == idx.ks and cand.labels == idx.labels and all(a >= b for a, b in zip(cand.eps, idx.eps)):
            out.append(cand)
    return out


def dual_system(n: int, u: IndexUniverse, evaluator: Evaluator = DEFAULT) -> dict[tuple[int, Index], FormalSum]:
    """G^{(n)}_{k,i} for 0 < k <= n and i in T_k, built level by level."""
    if n > u.max_degree:
        raise ValueError("universe too small for the requested degree")
    G: dict[tuple[int, Index], FormalSum] = {}
    for m in range(1, n + 1):
        level = {}
        for idx in enumerate_Tn(m, u):
            if isinstance(idx, Additive):
                level[(m, idx)] = base_generator(m, idx.label)
            else:
                gt = g_tilde(idx)
                norm = evaluator.evaluate(lambda_of(idx), gt)
                if norm == 0:
                    raise DualSystemError(f"zero normalizer for {index_str(idx)}")
                level[(m, idx)] = gt * (1 / norm)
        for (k, i), g in list(G.items()):
            for iota in followers(m, i, u):
                c = evaluator.evaluate(lambda_of(iota), g)
                if c:
                    g = g - level[(m, iota)] * c
            G[(k, i)] = g
        G.update(level)
    return G


def duality_matrix(n: int, u: IndexUniverse, evaluator: Evaluator = DEFAULT):
    """(indices, M) with M[r][c] = lambda_r(G^{(n)}_c) over all indices of degree 1..n."""
    G = dual_system(n, u, evaluator)
    keys = [(k, idx) for k in range(1, n + 1) for idx in enumerate_Tn(k, u)]
    M = [[evaluator.evaluate(lambda_of(r[1]), G[c]) for c in keys] for r in keys]
    return keys, M


def is_identity(M) -> bool:
    return all(M[r][c] == (1 if r == c else 0) for r in range(len(M)) for c in range(len(M)))


def dimension_check(n: int, support: PrimeSupport, use_cache: bool = True) -> tuple[int, int]:
    u = IndexUniverse.build(n, support, use_cache)
    return len(enumerate_Tn(n, u)), dim_augmented(n, support, use_cache)


# -- tensors and the coproduct ---------------------------------------------

class TensorExpr:
    """Q-linear combination of tensors of monomials, all of the same arity."""

    __slots__ = ("arity", "terms")

    def __init__(self, arity: int, terms=None):
        self.arity = arity
        self.terms: dict[tuple[Monomial, ...], Fraction] = {}
        for key, c in (terms or {}).items():
            self._add(key, Fraction(c))

    def _add(self, key, c):
        if len(key) != self.arity:
            raise ValueError("tensor arity mismatch")
        v = self.terms.get(key, 0) + c
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def __add__(self, other: "TensorExpr") -> "TensorExpr":
        out = TensorExpr(self.arity, self.terms)
        for k, c in other.terms.items():
            out._add(k, c)
        return out

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        if isinstance(c, TensorExpr):
            if c.arity != self.arity:
                raise ValueError("tensor arity mismatch")
            out = TensorExpr(self.arity)
            for a, x in self.terms.items():
                for b, y in c.terms.items():
                    out._add(tuple(mono_mul(p, q) for p, q in zip(a, b)), x * y)
            return out
        c = Fraction(c)
        return TensorExpr(self.arity, {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, TensorExpr) and self.arity == other.arity and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def swap(self) -> "TensorExpr":
        return TensorExpr(self.arity, {tuple(reversed(k)): c for k, c in self.terms.items()})

    def apply_at(self, pos: int, f) -> "TensorExpr":
        """Apply a map monomial -> TensorExpr in tensor slot ``pos``."""
        out = None
        for key, c in self.terms.items():
            img = f(key[pos])
            if out is None:
                out = TensorExpr(self.arity - 1 + img.arity)
            for sub, d in img.terms.items():
                out._add(key[:pos] + sub + key[pos + 1:], c * d)
        return out if out is not None else TensorExpr(self.arity + 1)

    def evaluate(self, models, evaluator: Evaluator = DEFAULT) -> Fraction:
        total = Fraction(0)
        for key, c in self.terms.items():
            v = c
            for mono, model in zip(key, models):
                v *= evaluator.on_model(InvariantExpr({mono: 1}), model)
                if not v:
                    break
            total += v
        return total

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: tuple((mono_degree(m), mono_str(m)) for m in t[0]))

    def __str__(self):
        return " + ".join(f"{c}*" + " (x) ".join(mono_str(m) for m in k) for k, c in self.sorted_terms()) or "0"

    __repr__ = __str__


def coproduct_monomial(m: Monomial) -> TensorExpr:
    """Binomial formula: sum over 0 <= eta <= eps of prod C(eps, eta) m^eta (x) m^(eps - eta)."""
    out = TensorExpr(2)
    syms = [s for s, _ in m]
    eps = [e for _, e in m]
    for eta in itertools.product(*(range(e + 1) for e in eps)):
        c = 1
        for e, h in zip(eps, eta):
            c *= comb(e, h)
        left = make_monomial(dict(zip(syms, eta)))
        right = make_monomial({s: e - h for s, e, h in zip(syms, eps, eta)})
        out._add((left, right), Fraction(c))
    return out


def coproduct(e: InvariantExpr) -> TensorExpr:
    out = TensorExpr(2)
    for m, c in e.terms.items():
        out = out + coproduct_monomial(m) * c
    return out


def coproduct_multiplicative(e: InvariantExpr) -> TensorExpr:
    """Independent route: multiply Delta(s) = s (x) 1 + 1 (x) s over the factors."""
    out = TensorExpr(2)
    for m, c in e.terms.items():
        t = TensorExpr(2, {((), ()): 1})
        for s, k in m:
            prim = TensorExpr(2, {((((s, 1),)), ()): 1, ((), ((s, 1),)): 1})
            for _ in range(k):
                t = t * prim
        out = out + t * c
    return out


def coassociativity_defect(e: InvariantExpr) -> TensorExpr:
    d = coproduct(e)
    return d.apply_at(0, coproduct_monomial) - d.apply_at(1, coproduct_monomial)


def is_primitive(e: InvariantExpr) -> bool:
    one: Monomial = ()
    expected = TensorExpr(2)
    for m, c in e.terms.items():
        expected._add((m, one), c)
        expected._add((one, m), c)
    return coproduct(e) == expected


def primitive_decompose(e: InvariantExpr) -> tuple[InvariantExpr, InvariantExpr]:
    """(additive part, product part): monomials of total exponent 1 and >= 2."""
    if e.terms.get((), 0):
        raise ValueError("expression has a constant term; subtract its value on S^3 first")
    add = InvariantExpr({m: c for m, c in e.terms.items() if sum(k for _, k in m) == 1})
    rest = InvariantExpr({m: c for m, c in e.terms.items() if sum(k for _, k in m) >= 2})
    return add, rest


def monomials_up_to(max_degree: int, u: IndexUniverse) -> list[Monomial]:
    """Every nonconstant monomial of weighted degree <= max_degree in the universe's symbols."""
    syms = [Symbol(k, i) for k, i in u.pairs(max_degree + 1)]
    out = []

    def rec(j, remaining, powers):
        if j == len(syms):
            if powers:
                out.append(make_monomial(powers))
            return
        s = syms[j]
        for e in range(remaining // s.k + 1):
            if e:
                powers[s] = e
            rec(j + 1, remaining - e * s.k, powers)
            powers.pop(s, None)

    rec(0, max_degree, {})
    return out
