"""Formal linear combinations of connected-sum models and their brackets.

A ``ManifoldModel`` is a multiset of primitive summands (the empty multiset is
S^3); connected sum is multiset union. Brackets expand surgery data into the
alternating sum over subsets. Invariants are polynomials in additive symbols
``lambda_{k,i}``; ``nu_p`` is ``lambda_{1,p}``. An additive symbol evaluates
on a model as the sum of its values on the summands, and a monomial as the
product of its factors' values on the same model.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import NamedTuple, Union

from .homology import GroupPresentation, TRIVIAL_GROUP, connected_sum as group_sum, cyclic_group
from .linalg import parse_number
from .linking import Linking, is_prime, valuation


class EvaluationError(ValueError):
    pass


class Symbol(NamedTuple):
    k: int
    i: Union[int, str]

    def __str__(self):
        return f"nu_{self.i}" if self.k == 1 else f"lam_{self.k}_{self.i}"


def nu(p: int) -> Symbol:
    return Symbol(1, p)


Payload = Union[Linking, GroupPresentation, None]


@dataclass(frozen=True, order=True)
class Primitive:
    """A connected-sum summand; ``tag`` = (k, i) marks an abstract generator with the delta table."""

    label: str
    tag: Symbol | None = field(default=None, compare=False)
    payload: Payload = field(default=None, compare=False, repr=False)

    def order(self) -> int | None:
        if isinstance(self.payload, Linking):
            return self.payload.size
        if isinstance(self.payload, GroupPresentation):
            return self.payload.order()
        return None

    def group(self) -> GroupPresentation | None:
        if isinstance(self.payload, GroupPresentation):
            return self.payload
        if isinstance(self.payload, Linking):
            g = TRIVIAL_GROUP
            for d in self.payload.orders:
                g = group_sum(g, cyclic_group(d))
            return g
        return None


def prime_model(p: int) -> Primitive:
    """M_p: a rational homology sphere with H_1 = Z_p (lens space L(p,1))."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return Primitive(f"g{p}", Symbol(1, p), cyclic_group(p))


def surgery_generator(k: int, i: str) -> Primitive:
    """Abstract summand X with [S^3; Gamma_{k,i}] modelled as X - S^3."""
    return Primitive(f"G{k}_{i}", Symbol(k, i))


def lens_primitive(label: str, linking: Linking) -> Primitive:
    return Primitive(label, None, linking)


_LABEL_G = re.compile(r"^g(\d+)$")
_LABEL_GAMMA = re.compile(r"^G(\d+)_(.+)$")


def primitive_from_label(label: str) -> Primitive:
    m = _LABEL_G.match(label)
    if m and is_prime(int(m.group(1))):
        return prime_model(int(m.group(1)))
    m = _LABEL_GAMMA.match(label)
    if m:
        return surgery_generator(int(m.group(1)), m.group(2))
    return Primitive(label)


@dataclass(frozen=True, order=True)
class ManifoldModel:
    summands: tuple[Primitive, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "summands", tuple(sorted(self.summands)))

    @property
    def key(self) -> str:
        return "#".join(p.label for p in self.summands) or "S3"

    def labels(self) -> list[str]:
        return [p.label for p in self.summands]

    def connect(self, other: "ManifoldModel | Primitive") -> "ManifoldModel":
        extra = (other,) if isinstance(other, Primitive) else other.summands
        return ManifoldModel(self.summands + extra)

    def concrete_group(self) -> GroupPresentation:
        g = TRIVIAL_GROUP
        for p in self.summands:
            h = p.group()
            if h is None:
                raise EvaluationError(f"summand {p.label} has no concrete payload")
            g = group_sum(g, h)
        return g

    @classmethod
    def parse(cls, text: str) -> "ManifoldModel":
        text = text.strip()
        if text in ("", "S3"):
            return S3
        return cls(tuple(primitive_from_label(t) for t in re.split(r"[#,]", text) if t))

    def __repr__(self):
        return f"ManifoldModel({self.key})"


S3 = ManifoldModel(())


class FormalSum:
    """Finite Q-linear combination of models; zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[ManifoldModel, Fraction] = {}
        for m, c in (terms or {}).items():
            self._add(m, Fraction(c))

    def _add(self, m, c):
        v = self.terms.get(m, 0) + c
        if v:
            self.terms[m] = v
        else:
            self.terms.pop(m, None)

    @classmethod
    def of(cls, model: ManifoldModel, coeff=1) -> "FormalSum":
        return cls({model: coeff})

    def __add__(self, other: "FormalSum") -> "FormalSum":
        out = FormalSum(self.terms)
        for m, c in other.terms.items():
            out._add(m, c)
        return out

    def __neg__(self):
        return FormalSum({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = Fraction(c)
        return FormalSum({m: v * c for m, v in self.terms.items()}) if c else FormalSum()

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def connect(self, other: "FormalSum") -> "FormalSum":
        """Bilinear extension of connected sum."""
        out = FormalSum()
        for m, a in self.terms.items():
            for n, b in other.terms.items():
                out._add(m.connect(n), a * b)
        return out

    def connect_power(self, e: int) -> "FormalSum":
        out = FormalSum.of(S3)
        for _ in range(e):
            out = out.connect(self)
        return out

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0].summands), t[0].labels()))

    def to_json(self) -> dict:
        return {"terms": [{"model": m.labels(), "coeff": f"{c.numerator}/{c.denominator}"}
                          for m, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, obj) -> "FormalSum":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls({ManifoldModel(tuple(primitive_from_label(l) for l in t["model"])): parse_number(t["coeff"])
                    for t in obj["terms"]})

    def __repr__(self):
        return " + ".join(f"{c}*[{m.key}]" for m, c in self.sorted_terms()) or "0"


def bracket(base: ManifoldModel, data) -> FormalSum:
    """sum over subsets I of data of (-1)^|I| base # data_I."""
    out = FormalSum()
    data = list(data)
    for r in range(len(data) + 1):
        for sub in itertools.combinations(range(len(data)), r):
            m = base
            for j in sub:
                m = m.connect(data[j])
            out._add(m, Fraction((-1) ** r))
    return out


# -- invariant expressions -------------------------------------------------

Monomial = tuple[tuple[Symbol, int], ...]


def _mono_key(m: Monomial):
    return tuple((s.k, str(s.i).zfill(12) if isinstance(s.i, int) else s.i, e) for s, e in m)


def _sym_key(s: Symbol):
    return (s.k, str(s.i).zfill(12) if isinstance(s.i, int) else "~" + s.i)


def make_monomial(powers: dict[Symbol, int]) -> Monomial:
    return tuple(sorted(((s, e) for s, e in powers.items() if e), key=lambda t: _sym_key(t[0])))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return make_monomial(d)


def mono_degree(m: Monomial) -> int:
    return sum(s.k * e for s, e in m)


def mono_str(m: Monomial) -> str:
    return "*".join(str(s) if e == 1 else f"{s}^{e}" for s, e in m) or "1"


_TERM_SPLIT = re.compile(r"(?=[+-])")
_FACTOR = re.compile(r"^(nu_(\d+)|lam_(\d+)_([A-Za-z0-9.]+))(?:\^(\d+))?$")
_COEF = re.compile(r"^\d+(/\d+)?$")


class InvariantExpr:
    """Polynomial with rational coefficients in additive symbols."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self.terms[m] = self.terms.get(m, 0) + c
                if not self.terms[m]:
                    del self.terms[m]

    @classmethod
    def symbol(cls, s: Symbol) -> "InvariantExpr":
        return cls({((s, 1),): 1})

    @classmethod
    def constant(cls, c) -> "InvariantExpr":
        return cls({(): c})

    @classmethod
    def parse(cls, text: str) -> "InvariantExpr":
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty expression")
        out = cls()
        for chunk in _TERM_SPLIT.split(s):
            if not chunk:
                continue
            sign = -1 if chunk[0] == "-" else 1
            chunk = chunk.lstrip("+-")
            coef = Fraction(sign)
            powers: dict[Symbol, int] = {}
            for f in chunk.split("*"):
                if _COEF.match(f):
                    coef *= Fraction(f)
                    continue
                m = _FACTOR.match(f)
                if not m:
                    raise ValueError(f"cannot parse factor {f!r}")
                if m.group(2):
                    sym = Symbol(1, int(m.group(2)))
                else:
                    k, i = int(m.group(3)), m.group(4)
                    sym = Symbol(k, int(i) if k == 1 and i.isdigit() else i)
                powers[sym] = powers.get(sym, 0) + int(m.group(5) or 1)
            out = out + cls({make_monomial(powers): coef})
        return out

    def __add__(self, other):
        out = InvariantExpr(self.terms)
        for m, c in other.terms.items():
            v = out.terms.get(m, 0) + c
            if v:
                out.terms[m] = v
            else:
                out.terms.pop(m, None)
        return out

    def __neg__(self):
        return InvariantExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, InvariantExpr):
            return InvariantExpr({m: c * Fraction(other) for m, c in self.terms.items()})
        out = InvariantExpr()
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out = out + InvariantExpr({mono_mul(a, b): x * y})
        return out

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = InvariantExpr.constant(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, InvariantExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def symbols(self) -> set[Symbol]:
        return {s for m in self.terms for s, _ in m}

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (mono_degree(t[0]), _mono_key(t[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            body = mono_str(m)
            if c == 1 and m:
                parts.append(body)
            elif c == -1 and m:
                parts.append("-" + body)
            else:
                parts.append(f"{c}" if not m else f"{c}*{body}")
        return "+".join(parts).replace("+-", "-")

    __repr__ = __str__


class Evaluator:
    """Looks up additive symbol values on primitives.

    Order: explicit table override, abstract-generator delta table, concrete
    payload (nu_p only, via the p-adic valuation of |H_1|).
    """

    def __init__(self, tables: dict[str, dict[Symbol, Fraction]] | None = None, mode: str = "auto"):
        if mode not in ("auto", "table", "payload"):
            raise ValueError(f"unknown evaluation mode {mode!r}")
        self.tables = tables or {}
        self.mode = mode

    def value(self, sym: Symbol, prim: Primitive) -> Fraction:
        t = self.tables.get(prim.label)
        if t is not None and sym in t:
            return Fraction(t[sym])
        if prim.tag is not None and self.mode != "payload":
            return Fraction(int(prim.tag == sym))
        if prim.payload is not None and sym.k == 1 and self.mode != "table":
            order = prim.order()
            if order is None:
                raise EvaluationError(f"{sym} is undefined on {prim.label}: infinite H_1")
            return Fraction(valuation(order, sym.i))
        raise EvaluationError(f"no value for symbol {sym} on primitive {prim.label}")

    def symbol_on(self, sym: Symbol, model: ManifoldModel) -> Fraction:
        return sum((self.value(sym, p) for p in model.summands), Fraction(0))

    def on_model(self, e: InvariantExpr, model: ManifoldModel) -> Fraction:
        cache: dict[Symbol, Fraction] = {}
        total = Fraction(0)
        for m, c in e.terms.items():
            v = c
            for s, k in m:
                if s not in cache:
                    cache[s] = self.symbol_on(s, model)
                v *= cache[s] ** k
            total += v
        return total

    def evaluate(self, e: InvariantExpr, s: FormalSum) -> Fraction:
        return sum((c * self.on_model(e, m) for m, c in s.terms.items()), Fraction(0))


DEFAULT = Evaluator()


def evaluate(e: InvariantExpr, s: FormalSum, evaluator: Evaluator = DEFAULT) -> Fraction:
    return evaluator.evaluate(e, s)


def product_identity_sides(lam: InvariantExpr, mu: InvariantExpr, base: ManifoldModel, data,
                           evaluator: Evaluator = DEFAULT) -> tuple[Fraction, Fraction]:
    """(lambda mu [base; I], sum_J lambda[base; J] mu[base(J); I minus J])."""
    data = list(data)
    lhs = evaluator.evaluate(lam * mu, bracket(base, data))
    rhs = Fraction(0)
    n = len(data)
    for r in range(n + 1):
        for J in itertools.combinations(range(n), r):
            inJ = set(J)
            moved = base
            for j in J:
                moved = moved.connect(data[j])
            a = evaluator.evaluate(lam, bracket(base, [data[j] for j in J]))
            if a:
                rhs += a * evaluator.evaluate(mu, bracket(moved, [data[j] for j in range(n) if j not in inJ]))
    return lhs, rhs


def verify_product_identity(lam, mu, base, data, evaluator: Evaluator = DEFAULT) -> bool:
    lhs, rhs = product_identity_sides(lam, mu, base, data, evaluator)
    return lhs == rhs


def nu_p_concrete(model: ManifoldModel, p: int) -> int:
    """nu_p from the order of the connected-sum homology (Smith form, not the summand tables)."""
    order = model.concrete_group().order()
    if order is None:
        raise EvaluationError("model is not a rational homology sphere")
    return valuation(order, p)


def star_relation_check(a: ManifoldModel, b: ManifoldModel) -> bool:
    """Every nu_p vanishes on (a#b - S^3) - (a - S^3) - (b - S^3), using concrete orders."""
    diff = (FormalSum.of(a.connect(b)) - FormalSum.of(S3)) - (FormalSum.of(a) - FormalSum.of(S3)) \
        - (FormalSum.of(b) - FormalSum.of(S3))
    primes = set()
    for m in (a, b):
        order = m.concrete_group().order()
        if order is None:
            raise EvaluationError("model is not a rational homology sphere")
        primes.update(p for p in range(2, order + 1) if order % p == 0 and is_prime(p))
    for p in sorted(primes):
        if sum((c * nu_p_concrete(m, p) for m, c in diff.terms.items()), Fraction(0)) != 0:
            return False
    return True


def surjections(p: int, q: int):
    """All surjective maps {0..p-1} -> {0..q-1}, as tuples of images."""
    for f in itertools.product(range(q), repeat=p):
        if len(set(f)) == q:
            yield f


def surjection_expansion_sides(additives: list[InvariantExpr], brackets: list[FormalSum],
                        evaluator: Evaluator = DEFAULT) -> tuple[Fraction, Fraction]:
    """Product of additive invariants on a connected sum of brackets, expanded and by surjections."""
    total = FormalSum.of(S3)
    for b in brackets:
        total = total.connect(b)
    product = InvariantExpr.constant(1)
    for lam in additives:
        product = product * lam
    lhs = evaluator.evaluate(product, total)
    rhs = Fraction(0)
    q = len(brackets)
    for f in surjections(len(additives), q):
        term = Fraction(1)
        for l in range(q):
            factor = InvariantExpr.constant(1)
            for i, img in enumerate(f):
                if img == l:
                    factor = factor * additives[i]
            term *= evaluator.evaluate(factor, brackets[l])
            if not term:
                break
        rhs += term
    return lhs, rhs
