"""Independent reference implementations used only by the tests.

None of these call into the package's elimination, Smith form or diagram
canonicalization code.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd


def bareiss_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    A = [list(map(int, r)) for r in rows]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    rank, prev = 0, 1
    for c in range(n):
        piv = next((r for r in range(rank, m) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, m):
            for j in range(c + 1, n):
                A[r][j] = (A[r][j] * A[rank][c] - A[r][c] * A[rank][j]) // prev
            A[r][c] = 0
        prev = A[rank][c]
        rank += 1
        if rank == m:
            break
    return rank


def rational_rank(rows) -> int:
    """Rank of a rational matrix: clear denominators then Bareiss."""
    out = []
    for r in rows:
        r = [Fraction(x) for x in r]
        den = 1
        for x in r:
            den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return bareiss_rank(out)


def det(M) -> Fraction:
    n = len(M)
    A = [[Fraction(x) for x in r] for r in M]
    d = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return d


def determinantal_invariant_factors(M) -> list[int]:
    """d_k / d_{k-1} where d_k is the gcd of all k x k minors (zeros past the rank)."""
    m = len(M)
    n = len(M[0]) if m else 0
    divisors = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                g = gcd(g, int(det([[M[r][c] for c in cs] for r in rs])))
        divisors.append(g)
    out = []
    for k in range(1, len(divisors)):
        out.append(0 if divisors[k] == 0 else divisors[k] // divisors[k - 1])
    return out


# -- brute-force diagram space for tiny degrees --------------------------------

def _matchings(items):
    if not items:
        yield ()
        return
    a = items[0]
    for i in range(1, len(items)):
        rest = items[1:i] + items[i + 1:]
        for m in _matchings(rest):
            yield ((a, items[i]),) + m


def _partner_tuple(pairs, size):
    p = [0] * size
    for a, b in pairs:
        p[a], p[b] = b, a
    return tuple(p)


def _apply(perm, partner):
    out = [0] * len(partner)
    for h, q in enumerate(partner):
        out[perm[h]] = perm[q]
    return tuple(out)


def _symmetry_generators(nv):
    """(half-edge permutation, sign) generating all relabelings of nv oriented vertices."""
    size = 3 * nv
    gens = []
    for v in range(nv):
        rot = list(range(size))
        rot[3 * v], rot[3 * v + 1], rot[3 * v + 2] = 3 * v + 1, 3 * v + 2, 3 * v
        gens.append((rot, 1))
        ref = list(range(size))
        ref[3 * v + 1], ref[3 * v + 2] = 3 * v + 2, 3 * v + 1
        gens.append((ref, -1))
    for v in range(nv - 1):
        sw = list(range(size))
        for s in range(3):
            sw[3 * v + s], sw[3 * v + 3 + s] = 3 * v + 3 + s, 3 * v + s
        gens.append((sw, 1))
    return gens


def _ihx(partner, a):
    """The three Lie-form terms for the internal edge at half-edge a (u != v)."""
    b = partner[a]
    u, v = a // 3, b // 3
    ra, rb = a % 3, b % 3
    su = [3 * u + (ra + 1) % 3, 3 * u + (ra + 2) % 3]
    sv = [3 * v + (rb + 1) % 3, 3 * v + (rb + 2) % 3]
    slots = su + sv  # leg positions x, y, z, w
    pos = {s: j for j, s in enumerate(slots)}
    terms = []
    for order in ((0, 1, 2, 3), (1, 2, 0, 3), (2, 0, 1, 3)):
        # leg order[j] is placed at slot j
        new_slot = {order[j]: slots[j] for j in range(4)}
        p = list(partner)
        for leg in range(4):
            far = partner[slots[leg]]
            if far in pos:
                p[new_slot[leg]] = new_slot[pos[far]]
            else:
                p[new_slot[leg]] = far
                p[far] = new_slot[leg]
        terms.append(tuple(p))
    return terms


def brute_force_dim(n: int) -> tuple[int, int]:
    """(number of isomorphism classes, dim A_n) from raw matchings; n <= 2."""
    nv = 2 * n
    size = 3 * nv
    if n == 0:
        return 1, 1
    all_p = [_partner_tuple(m, size) for m in _matchings(list(range(size)))]
    index = {p: i for i, p in enumerate(all_p)}
    parent = list(range(len(all_p)))
    sign_to_parent = [1] * len(all_p)

    def find(i):
        s = 1
        path = []
        while parent[i] != i:
            path.append(i)
            s *= sign_to_parent[i]
            i = parent[i]
        root = i
        # path compression with signs
        acc = s
        for j in path:
            nxt_sign = sign_to_parent[j]
            parent[j], sign_to_parent[j] = root, acc
            acc *= nxt_sign
        return root, s

    zero_roots = set()
    for i, p in enumerate(all_p):
        for perm, sg in _symmetry_generators(nv):
            j = index[_apply(perm, p)]
            ri, si = find(i)
            rj, sj = find(j)
            # D_i = sg * D_j
            if ri == rj:
                if si != sg * sj:
                    zero_roots.add(ri)
            else:
                parent[ri] = rj
                sign_to_parent[ri] = si * sg * sj
    roots = {}
    for i in range(len(all_p)):
        r, _ = find(i)
        roots.setdefault(r, len(roots))
    zero = {find(r)[0] for r in zero_roots}
    live = sorted(r for r in roots if r not in zero)
    col = {r: j for j, r in enumerate(live)}
    rows = []
    for p in all_p:
        for a in range(size):
            if a // 3 == p[a] // 3:
                continue
            row = [0] * len(live)
            for t in _ihx(p, a):
                r, s = find(index[t])
                if r in col:
                    row[col[r]] += s
            if any(row):
                rows.append(row)
    return len(roots), len(live) - bareiss_rank(rows)


# -- linkings -----------------------------------------------------------------

def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def odd_homogeneous_class(numerators, p: int) -> tuple[int, int]:
    """(rank, Legendre symbol of the determinant) classifies a diagonal form on (Z_{p^k})^r, p odd."""
    d = 1
    for a in numerators:
        d *= a
    return len(numerators), legendre(d, p)
