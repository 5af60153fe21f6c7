"""Linkings: finite abelian groups with a nondegenerate symmetric Q/Z-valued form.

A ``Linking`` is stored on cyclic generators ``g_1..g_r`` of orders
``d_1..d_r`` with Gram entries ``phi(g_i, g_j)`` reduced into [0, 1).
``normalize`` splits it into cyclic prime-power pieces.

Sign convention: the linking form of the manifold obtained by surgery on a
framed link with linking matrix L is taken to be ``-L^{-1} mod 1``.

``MIRANDA_TABLE`` fixes one standard choice of Gram values for the six
2-adic generator kinds.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

from .linalg import IntMatrix, determinant, format_number, parse_number, rational_inverse, smith_normal_form

ISO_BOUND = 2 ** 10


class LinkingError(ValueError):
    pass


class CapacityError(LinkingError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    n = abs(n)
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class Linking:
    orders: tuple[int, ...]
    gram: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        orders = tuple(int(d) for d in self.orders)
        gram = tuple(tuple(_mod1(parse_number(x)) for x in row) for row in self.gram)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "gram", gram)
        r = len(orders)
        if len(gram) != r or any(len(row) != r for row in gram):
            raise LinkingError("gram must be a square matrix matching the generators")
        if any(d < 1 for d in orders):
            raise LinkingError("generator orders must be positive")
        for i in range(r):
            for j in range(r):
                if gram[i][j] != gram[j][i]:
                    raise LinkingError("gram is not symmetric")
                if (orders[i] * gram[i][j]).denominator != 1:
                    raise LinkingError(f"order {orders[i]} does not kill phi(g{i}, g{j})")

    @property
    def size(self) -> int:
        return prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    def pair(self, x, y) -> Fraction:
        return _mod1(sum(x[i] * y[j] * self.gram[i][j]
                         for i in range(self.rank) for j in range(self.rank)))

    def elements(self):
        return itertools.product(*(range(d) for d in self.orders))

    def is_nondegenerate(self, bound: int = ISO_BOUND) -> bool:
        """Brute force: no nonzero element pairs trivially with every generator."""
        if self.size > bound:
            raise CapacityError(f"|H| = {self.size} exceeds the brute-force bound {bound}")
        r = self.rank
        for x in self.elements():
            if any(x) and all(_mod1(sum(x[i] * self.gram[i][j] for i in range(r))) == 0
                              for j in range(r)):
                return False
        return True

    def normalize(self) -> "Linking":
        """Orthogonal split into cyclic generators of prime-power order (order-1 ones dropped)."""
        gens = []  # (prime, position, multiplier, order)
        for i, d in enumerate(self.orders):
            for p, a in sorted(factorize(d).items()):
                gens.append((p, i, d // p ** a, p ** a))
        gens.sort(key=lambda t: (t[0], t[1]))
        orders = tuple(t[3] for t in gens)
        gram = tuple(tuple(_mod1(a[2] * b[2] * self.gram[a[1]][b[1]]) for b in gens) for a in gens)
        return Linking(orders, gram)

    def to_json(self) -> dict:
        return {"orders": list(self.orders),
                "gram": [[format_number(x) for x in row] for row in self.gram]}

    @classmethod
    def from_json(cls, obj) -> "Linking":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["orders"]), tuple(tuple(parse_number(x) for x in row) for row in obj["gram"]))


TRIVIAL = Linking((), ())


def cyclic(order: int, value) -> Linking:
    return Linking((order,), ((Fraction(value),),))


def smallest_nonresidue(m: int) -> int:
    """Smallest positive unit mod m that is not a square mod m."""
    squares = {(x * x) % m for x in range(m) if gcd(x, m) == 1}
    for x in range(1, m):
        if gcd(x, m) == 1 and x not in squares:
            return x
    raise LinkingError(f"every unit is a square modulo {m}")


def wall_generator(kind: str, p: int, k: int) -> Linking:
    """Wall's generators A_{p^k} (1/p^k) and B_{p^k} (x/p^k, x a non-residue) for odd p."""
    if not is_prime(p):
        raise LinkingError(f"{p} is not prime")
    if p == 2:
        raise LinkingError("p = 2: use miranda_generator")
    if k < 1:
        raise LinkingError("k must be positive")
    q = p ** k
    kind = kind.upper()
    if kind == "A":
        return cyclic(q, Fraction(1, q))
    if kind == "B":
        return cyclic(q, Fraction(smallest_nonresidue(q), q))
    raise LinkingError(f"unknown Wall generator kind {kind!r}")


# Numerators over 2^k. Cyclic kinds act on Z_{2^k}; E and F on Z_{2^k}^2.
MIRANDA_TABLE = {
    "A": ((1,),),
    "B": ((-1,),),
    "C": ((5,),),
    "D": ((-5,),),
    "E": ((0, 1), (1, 0)),
    "F": ((2, 1), (1, 2)),
}


def miranda_generator(kind: str, k: int) -> Linking:
    kind = kind.upper()
    if kind not in MIRANDA_TABLE:
        raise LinkingError(f"unknown 2-adic generator kind {kind!r}")
    if k < 1:
        raise LinkingError("k must be positive")
    q = 2 ** k
    num = MIRANDA_TABLE[kind]
    return Linking(tuple(q for _ in num), tuple(tuple(Fraction(x, q) for x in row) for row in num))


def orthogonal_sum(a: Linking, b: Linking) -> Linking:
    ra, rb = a.rank, b.rank
    gram = [list(row) + [Fraction(0)] * rb for row in a.gram]
    gram += [[Fraction(0)] * ra + list(row) for row in b.gram]
    return Linking(a.orders + b.orders, tuple(tuple(r) for r in gram))


def multiple(a: Linking, n: int) -> Linking:
    out = TRIVIAL
    for _ in range(n):
        out = orthogonal_sum(out, a)
    return out


def nu_p(l: Linking, p: int) -> int:
    if not is_prime(p):
        raise LinkingError(f"{p} is not prime")
    return valuation(l.size, p)


@dataclass(frozen=True)
class TwoEquivClass:
    valuations: tuple[tuple[int, int], ...]  # sorted (prime, nu_p), nu_p > 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.valuations)

    def __add__(self, other: "TwoEquivClass") -> "TwoEquivClass":
        d = self.as_dict()
        for p, v in other.valuations:
            d[p] = d.get(p, 0) + v
        return TwoEquivClass(tuple(sorted(d.items())))


def two_equivalence_class(l: Linking) -> TwoEquivClass:
    """The class sum_p nu_p * G_p, recorded by its valuations."""
    return TwoEquivClass(tuple(sorted(factorize(l.size).items())))


def _abelian_invariants(orders) -> tuple[int, ...]:
    """Elementary divisors as a sorted tuple of prime powers."""
    out = []
    for d in orders:
        for p, a in factorize(d).items():
            out.append(p ** a)
    return tuple(sorted(out))


def is_isomorphic(a: Linking, b: Linking, bound: int = ISO_BOUND) -> bool:
    """Exhaustive search for a group isomorphism carrying one pairing to the other.

    Generator images are chosen one at a time; candidates must have order
    dividing the source order and reproduce every Gram entry with the images
    already chosen. Injectivity is automatic (the source form is
    nondegenerate), so equal orders make any such homomorphism bijective.
    """
    if a.size > bound or b.size > bound:
        raise CapacityError(f"group order exceeds the brute-force bound {bound}")
    if a.size != b.size or _abelian_invariants(a.orders) != _abelian_invariants(b.orders):
        return False
    if a.size == 1:
        return True
    # integer pairing on b: phi_b(x, y) = (x^T G y mod N) / N
    N = 1
    for row in b.gram:
        for x in row:
            N = N * x.denominator // gcd(N, x.denominator)
    for row in a.gram:
        for x in row:
            N = N * x.denominator // gcd(N, x.denominator)
    G = [[int(x * N) for x in row] for row in b.gram]
    rb = b.rank
    elems = list(b.elements())

    def pair_b(x, y):
        return sum(x[i] * G[i][j] * y[j] for i in range(rb) for j in range(rb) if x[i] and y[j]) % N

    def order_divides(x, d):
        return all((d * x[i]) % b.orders[i] == 0 for i in range(rb))

    target = [[int(x * N) % N for x in row] for row in a.gram]
    cands = [[x for x in elems if order_divides(x, d) and pair_b(x, x) == target[i][i]]
             for i, d in enumerate(a.orders)]
    chosen: list[tuple[int, ...]] = []

    def rec(i):
        if i == a.rank:
            return True
        for x in cands[i]:
            if all(pair_b(x, chosen[j]) == target[i][j] for j in range(i)):
                chosen.append(x)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    return rec(0)


def from_framing_matrix(L: IntMatrix) -> Linking:
    """Linking of the rational homology sphere given by surgery on framing matrix L.

    Group: coker L with orders from the Smith form (unit factors dropped).
    Form: -L^{-1} in the cokernel generators, reduced mod 1.
    """
    if L.rows != L.cols:
        raise LinkingError("framing matrix must be square")
    if any(L[i, j] != L[j, i] for i in range(L.rows) for j in range(L.cols)):
        raise LinkingError("framing matrix must be symmetric")
    if L.rows == 0:
        return TRIVIAL
    if determinant(L) == 0:
        raise LinkingError("singular framing matrix: not a rational homology sphere")
    s = smith_normal_form(L)
    # U L V = D, so Z^r / L Z^r ~ Z^r / D Z^r via x -> U x; generator i is U^{-1} e_i
    Uinv = rational_inverse(s.U)
    Linv = rational_inverse(L)
    n = L.rows
    keep = [i for i, d in enumerate(s.d) if d != 1]
    gens = [[Uinv[r][i] for r in range(n)] for i in keep]
    gram = []
    for gi in gens:
        w = [sum(Linv[r][c] * gi[c] for c in range(n)) for r in range(n)]
        gram.append([_mod1(-sum(gj[r] * w[r] for r in range(n))) for gj in gens])
    return Linking(tuple(s.d[i] for i in keep), tuple(tuple(r) for r in gram)).normalize()
