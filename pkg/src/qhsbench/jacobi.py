"""Jacobi diagrams modulo AS and IHX.

A diagram of degree n has 2n trivalent vertices and 6n half-edges. Vertex
``v`` is a triple of half-edge ids whose cyclic order is its orientation;
``edges`` pair the half-edges up.

Canonical form
--------------
Each connected component is encoded by a breadth-first relabelling: pick a
start vertex, the half-edge to put in slot 0 and an orientation for it, then
visit the slots of labelled vertices in order. A newly met vertex gets the
next label, the half-edge through which it was reached becomes its slot 0,
and its orientation (the order of its two remaining half-edges) is a branch
choice. The code of a relabelling lists, for every new half-edge label
0..6n-1, the label of its partner. The canonical code is the
lexicographically least code over all starts and branch choices, found by
branch-and-bound. Choosing the reversed order at a vertex is one AS move, so
the parity of reversals that produced the least code is the sign relating
the input to the canonical representative; a class reachable with both
parities equals its own negative and is zero.

Disconnected diagrams are the sorted multiset of their component codes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from . import cache
from .linalg import RatMatrix, RowReducer, format_number, parse_number

log = logging.getLogger(__name__)

Code = tuple[int, ...]


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class JacobiDiagram:
    vertices: tuple[tuple[int, int, int], ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(int(h) for h in v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(int(h) for h in e) for e in self.edges))
        nv = len(self.vertices)
        if nv % 2:
            raise DiagramError("a Jacobi diagram has an even number of vertices")
        hs = [h for v in self.vertices for h in v]
        if any(len(v) != 3 for v in self.vertices):
            raise DiagramError("every vertex must have exactly three half-edges")
        if sorted(hs) != list(range(3 * nv)):
            raise DiagramError("vertex half-edges must be exactly 0..6n-1, each once")
        es = [h for e in self.edges for h in e]
        if any(len(e) != 2 for e in self.edges) or sorted(es) != list(range(3 * nv)):
            raise DiagramError("edges must be a perfect matching of the half-edges")

    @property
    def degree(self) -> int:
        return len(self.vertices) // 2

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def partner(self) -> list[int]:
        p = [0] * (3 * len(self.vertices))
        for a, b in self.edges:
            p[a] = b
            p[b] = a
        return p

    def flip(self, v: int) -> "JacobiDiagram":
        """Reverse the cyclic order at vertex ``v`` (one AS move)."""
        vs = list(self.vertices)
        a, b, c = vs[v]
        vs[v] = (a, c, b)
        return JacobiDiagram(tuple(vs), self.edges)

    def relabel(self, vperm, rotations, hmap=None) -> "JacobiDiagram":
        """Orientation-preserving relabelling: vertex v -> vperm[v], rotated by rotations[v]."""
        nv = len(self.vertices)
        new_vertices = [None] * nv
        mapping = {}
        for v, trip in enumerate(self.vertices):
            r = rotations[v] % 3
            rot = trip[r:] + trip[:r]
            nvtx = vperm[v]
            new_vertices[nvtx] = tuple(3 * nvtx + s for s in range(3))
            for s, h in enumerate(rot):
                mapping[h] = 3 * nvtx + s
        edges = tuple(sorted(tuple(sorted((mapping[a], mapping[b]))) for a, b in self.edges))
        return JacobiDiagram(tuple(new_vertices), edges)

    def to_json(self) -> dict:
        return {"degree": self.degree, "vertices": [list(v) for v in self.vertices],
                "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj) -> "JacobiDiagram":
        d = cls(tuple(tuple(v) for v in obj["vertices"]), tuple(tuple(e) for e in obj["edges"]))
        if "degree" in obj and obj["degree"] != d.degree:
            raise DiagramError(f"degree {obj['degree']} does not match {len(d.vertices)} vertices")
        return d

    @classmethod
    def from_partner(cls, partner) -> "JacobiDiagram":
        nv = len(partner) // 3
        edges = tuple((h, partner[h]) for h in range(len(partner)) if h < partner[h])
        return cls(tuple((3 * v, 3 * v + 1, 3 * v + 2) for v in range(nv)), edges)


# -- canonical codes ---------------------------------------------------------

class _Graph:
    __slots__ = ("triples", "partner", "vert_of", "pos_of")

    def __init__(self, triples, partner):
        self.triples = triples
        self.partner = partner
        self.vert_of = {}
        self.pos_of = {}
        for v, t in enumerate(triples):
            for s, h in enumerate(t):
                self.vert_of[h] = v
                self.pos_of[h] = s

    def components(self) -> list[list[int]]:
        seen = set()
        comps = []
        for v0 in range(len(self.triples)):
            if v0 in seen:
                continue
            comp, stack = [], [v0]
            seen.add(v0)
            while stack:
                v = stack.pop()
                comp.append(v)
                for h in self.triples[v]:
                    w = self.vert_of[self.partner[h]]
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps


class _CodeSearch:
    """Branch-and-bound for the least BFS code of one connected component.

    With ``target`` set, the search only decides whether some code is
    strictly smaller than ``target`` and stops at the first one found.
    """

    def __init__(self, g: _Graph, comp: list[int], target: Code | None = None):
        self.g = g
        self.comp = comp
        self.n3 = 3 * len(comp)
        self.best: list[int] | None = list(target) if target is not None else None
        self.parities: set[int] = set()
        self.decide_only = target is not None
        self.found_smaller = False

    def run(self):
        for v0 in self.comp:
            for r0 in range(3):
                for f0 in (0, 1):
                    state = -1 if self.best is None else 0
                    self._walk([], {v0: 0}, [v0], {v0: r0}, {v0: f0}, f0, 0, state)
                    if self.found_smaller:
                        return self
        return self

    def _prefix_state(self, code) -> int:
        best = self.best
        if best is None:
            return -1
        head = best[:len(code)]
        return (code > head) - (code < head)

    def _walk(self, code, labels, order, rot, flip, parity, step, state):
        # state compares code with best[:len(code)]: -1 smaller, 0 equal
        g = self.g
        n0 = len(code)
        try:
            while step < self.n3:
                i, s = divmod(step, 3)
                v = order[i]
                r = rot[v]
                h = g.triples[v][(r + s) % 3 if not flip[v] else (r - s) % 3]
                q = g.partner[h]
                w = g.vert_of[q]
                fresh = w not in labels
                if fresh:
                    val = 3 * len(order)
                else:
                    rw = rot[w]
                    sl = (g.pos_of[q] - rw) % 3 if not flip[w] else (rw - g.pos_of[q]) % 3
                    val = 3 * labels[w] + sl
                if state == 0:
                    b = self.best[step]
                    if val > b:
                        return
                    if val < b:
                        if self.decide_only:
                            self.found_smaller = True
                            return
                        state = -1
                code.append(val)
                step += 1
                if fresh:
                    labels[w] = len(order)
                    order.append(w)
                    rot[w] = g.pos_of[q]
                    for f in (0, 1):
                        flip[w] = f
                        self._walk(code, labels, order, rot, flip, parity ^ f, step, state)
                        if self.found_smaller:
                            break
                        state = self._prefix_state(code)
                        if state > 0:
                            break
                    order.pop()
                    del labels[w], rot[w], flip[w]
                    return
            if state < 0:
                self.best = list(code)
                self.parities = {parity}
            else:
                self.parities.add(parity)
        finally:
            del code[n0:]


def _component_code(g: _Graph, comp: list[int]) -> tuple[Code, int | None]:
    """Least code of a component and the reversal parity reaching it (None if both do)."""
    s = _CodeSearch(g, comp).run()
    code = tuple(s.best)
    if len(s.parities) > 1:
        return code, None
    return code, next(iter(s.parities))


def _code_graph(code: Code) -> _Graph:
    nv = len(code) // 3
    return _Graph([(3 * v, 3 * v + 1, 3 * v + 2) for v in range(nv)], list(code))


def _is_canonical_code(code: Code) -> bool:
    g = _code_graph(code)
    s = _CodeSearch(g, list(range(len(code) // 3)), target=code).run()
    return not s.found_smaller


def _key_of(components: tuple[Code, ...]) -> str:
    return "|".join(",".join(map(str, c)) for c in components)


def _sort_components(codes) -> tuple[Code, ...]:
    return tuple(sorted(codes, key=lambda c: (len(c), c)))


@dataclass(frozen=True, order=True)
class CanonicalDiagram:
    """A canonical representative of an (unoriented) isomorphism class.

    ``self_negating`` marks classes equal to their own negative under AS.
    """

    components: tuple[Code, ...]
    self_negating: bool = field(default=False, compare=False)

    @property
    def key(self) -> str:
        return _key_of(self.components)

    @property
    def sign_class(self) -> str:
        return "self_negating" if self.self_negating else "plus_minus_distinct"

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.components) // 3

    @property
    def degree(self) -> int:
        return self.vertex_count // 2

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    def diagram(self) -> JacobiDiagram:
        partner = []
        off = 0
        for c in self.components:
            partner.extend(x + off for x in c)
            off += len(c)
        return JacobiDiagram.from_partner(partner)

    @classmethod
    def from_key(cls, key: str) -> "CanonicalDiagram":
        comps = tuple(tuple(int(x) for x in part.split(",")) for part in key.split("|")) if key else ()
        d, _ = canonicalize(CanonicalDiagram(_sort_components(comps)).diagram())
        if d.key != key:
            raise DiagramError(f"{key!r} is not a canonical key")
        return d

    def __repr__(self):
        flag = ", self_negating" if self.self_negating else ""
        return f"CanonicalDiagram({self.key!r}{flag})"


EMPTY = CanonicalDiagram(())


def canonicalize(d: JacobiDiagram) -> tuple[CanonicalDiagram, int]:
    """Return ``(canonical, sign)`` with ``d == sign * canonical`` in A_n.

    ``sign`` is 0 exactly when the class is self-negating.
    """
    g = _Graph(list(d.vertices), d.partner())
    comps = []
    sign = 1
    zero = False
    for comp in g.components():
        code, par = _component_code(g, comp)
        comps.append(code)
        if par is None:
            zero = True
        elif par:
            sign = -sign
    cd = CanonicalDiagram(_sort_components(comps), self_negating=zero)
    return cd, 0 if zero else sign


# -- enumeration -------------------------------------------------------------

def _bfs_codes(nv: int):
    """All BFS codes (every branch taken unreversed) of connected graphs on nv vertices."""
    n3 = 3 * nv
    partner = [-1] * n3
    count = [1]

    def rec(step):
        while step < n3 and partner[step] >= 0:
            step += 1
        if step == n3:
            if count[0] == nv:
                yield tuple(partner)
            return
        if step >= 3 * count[0]:
            # every labelled slot is matched: the graph closed up early
            return
        labelled_end = 3 * count[0]
        for t in range(step + 1, labelled_end):
            if partner[t] < 0:
                partner[step] = t
                partner[t] = step
                yield from rec(step + 1)
                partner[step] = partner[t] = -1
        if count[0] < nv:
            t = 3 * count[0]
            count[0] += 1
            partner[step] = t
            partner[t] = step
            yield from rec(step + 1)
            partner[step] = partner[t] = -1
            count[0] -= 1

    if nv == 0:
        return
    yield from rec(0)


@lru_cache(maxsize=None)
def connected_classes(vertex_count: int) -> tuple[CanonicalDiagram, ...]:
    """One canonical diagram per connected trivalent graph on ``vertex_count`` vertices."""
    out = []
    for code in _bfs_codes(vertex_count):
        if _is_canonical_code(code):
            g = _code_graph(code)
            c2, par = _component_code(g, list(range(vertex_count)))
            assert c2 == code
            out.append(CanonicalDiagram((code,), self_negating=par is None))
    out.sort(key=lambda d: d.components)
    log.debug("connected classes on %d vertices: %d", vertex_count, len(out))
    return tuple(out)


def enumerate_diagrams(n: int) -> list[CanonicalDiagram]:
    """All classes of degree-n diagrams (self-negating ones included and flagged)."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    pieces = []  # (degree, diagram)
    for k in range(1, n + 1):
        pieces.extend((k, d) for d in connected_classes(2 * k))
    out = []

    def rec(start, remaining, chosen):
        if remaining == 0:
            comps = _sort_components(c for d in chosen for c in d.components)
            out.append(CanonicalDiagram(comps, self_negating=any(d.self_negating for d in chosen)))
            return
        for idx in range(start, len(pieces)):
            k, d = pieces[idx]
            if k <= remaining:
                chosen.append(d)
                rec(idx, remaining - k, chosen)
                chosen.pop()

    rec(0, n, [])
    out.sort(key=lambda d: (len(d.components), d.components))
    return out


# -- vectors -----------------------------------------------------------------

class DiagramVector:
    """Finite Q-combination of canonical diagrams; self-negating terms are dropped."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms: dict[str, Fraction] = {}
        if terms:
            for k, v in dict(terms).items():
                self._add(k, Fraction(v))

    def _add(self, key, v):
        if isinstance(key, CanonicalDiagram):
            if key.self_negating:
                return
            key = key.key
        nv = self.terms.get(key, 0) + v
        if nv:
            self.terms[key] = nv
        else:
            self.terms.pop(key, None)

    @classmethod
    def of(cls, d: JacobiDiagram, coeff=1) -> "DiagramVector":
        cd, sign = canonicalize(d)
        v = cls()
        if sign:
            v._add(cd, Fraction(coeff) * sign)
        return v

    @classmethod
    def basis(cls, cd: CanonicalDiagram) -> "DiagramVector":
        v = cls()
        v._add(cd, Fraction(1))
        return v

    def __add__(self, other):
        out = DiagramVector(self.terms)
        for k, v in other.terms.items():
            out._add(k, v)
        return out

    def __sub__(self, other):
        return self + other * -1

    def __mul__(self, c):
        c = Fraction(c)
        return DiagramVector({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, DiagramVector) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"DiagramVector({self.terms!r})"

    def to_json(self) -> dict:
        return {"terms": [{"diagram": k, "coeff": format_number(v)} for k, v in sorted(self.terms.items())]}

    @classmethod
    def from_json(cls, obj) -> "DiagramVector":
        return cls({t["diagram"]: parse_number(t["coeff"]) for t in obj["terms"]})


def disjoint_union(a: DiagramVector, b: DiagramVector) -> DiagramVector:
    out = DiagramVector()
    for ka, va in a.terms.items():
        ca = CanonicalDiagram.from_key(ka).components if ka else ()
        for kb, vb in b.terms.items():
            cb = CanonicalDiagram.from_key(kb).components if kb else ()
            # codes are already canonical per component, so sorting suffices
            out._add(_key_of(_sort_components(ca + cb)), va * vb)
    return out


# -- IHX ---------------------------------------------------------------------

def _ihx_terms(d: JacobiDiagram, h: int, g: int) -> list[JacobiDiagram]:
    """The three trees on the four legs around the internal edge {h, g}.

    Local labelling: rotate the endpoint u so h sits in slot 0, giving the
    cyclic order (h, x, y); likewise (g, z, w) at v. T(a,b|c,d) is the
    diagram with u = (h, a, b) and v = (g, c, d). The relation is

        T(x,y|z,w) + T(y,z|x,w) + T(z,x|y,w) = 0,

    the cyclic (Jacobi) sum over x, y, z with w fixed; the first term is
    the input diagram itself.
    """
    partner = d.partner()
    verts = list(d.vertices)
    vert_of = {hh: v for v, t in enumerate(verts) for hh in t}
    u, v = vert_of[h], vert_of[g]
    tu, tv = verts[u], verts[v]
    iu, iv = tu.index(h), tv.index(g)
    _, x, y = tu[iu:] + tu[:iu]
    _, z, w = tv[iv:] + tv[:iv]
    slots = (x, y, z, w)
    out = []
    for legs in ((x, y, z, w), (y, z, x, w), (z, x, y, w)):
        slot_of = dict(zip(legs, slots))
        p = list(partner)
        for leg in legs:
            s = slot_of[leg]
            t = partner[leg]
            t = slot_of.get(t, t)
            p[s] = t
            p[t] = s
        nverts = list(verts)
        nverts[u] = (h, x, y)
        nverts[v] = (g, z, w)
        edges = tuple((a, p[a]) for a in range(len(p)) if a < p[a])
        out.append(JacobiDiagram(tuple(nverts), edges))
    return out


def ihx_relations_for(cd: CanonicalDiagram) -> list[DiagramVector]:
    d = cd.diagram()
    vert_of = {hh: v for v, t in enumerate(d.vertices) for hh in t}
    rels = []
    for a, b in d.edges:
        if vert_of[a] == vert_of[b]:
            continue
        vec = DiagramVector()
        for term in _ihx_terms(d, a, b):
            vec = vec + DiagramVector.of(term)
        if vec:
            rels.append(vec)
    return rels


def ihx_relations(n: int) -> list[DiagramVector]:
    if n < 1:
        raise ValueError("IHX relations need degree >= 1")
    return [r for cd in enumerate_diagrams(n) for r in ihx_relations_for(cd)]


# -- quotient spaces ---------------------------------------------------------

@dataclass(frozen=True)
class DiagramSpace:
    degree: int
    spanning: tuple[CanonicalDiagram, ...]
    relation_basis: RatMatrix  # RREF of the relation span, columns = spanning
    pivots: tuple[int, ...]

    @property
    def quotient_dim(self) -> int:
        return len(self.spanning) - len(self.pivots)

    @property
    def index(self) -> dict[str, int]:
        return {d.key: i for i, d in enumerate(self.spanning)}

    def basis(self) -> list[CanonicalDiagram]:
        """Diagrams on non-pivot columns; their images form a basis of the quotient."""
        piv = set(self.pivots)
        return [d for i, d in enumerate(self.spanning) if i not in piv]

    def normal_form(self, vec: DiagramVector) -> DiagramVector:
        """Reduce modulo the relation span; idempotent, kills every relation."""
        idx = self.index
        row = {}
        for k, v in vec.terms.items():
            if k not in idx:
                raise DiagramError(f"{k!r} is not a degree-{self.degree} spanning diagram")
            row[idx[k]] = v
        for r, p in enumerate(self.pivots):
            f = row.get(p)
            if f:
                for j, v in self.relation_basis.row(r).items():
                    nv = row.get(j, 0) - f * v
                    if nv:
                        row[j] = nv
                    else:
                        row.pop(j, None)
        return DiagramVector({self.spanning[j].key: v for j, v in row.items()})

    def to_json(self) -> dict:
        return {"degree": self.degree, "spanning": [d.key for d in self.spanning],
                "relations": self.relation_basis.to_json(), "pivots": list(self.pivots)}

    @classmethod
    def from_json(cls, obj) -> "DiagramSpace":
        spanning = tuple(CanonicalDiagram(_sort_components(
            tuple(tuple(int(x) for x in part.split(",")) for part in k.split("|")) if k else ()))
            for k in obj["spanning"])
        return cls(obj["degree"], spanning, RatMatrix.from_json(obj["relations"]), tuple(obj["pivots"]))


def _build_space(n: int) -> DiagramSpace:
    diagrams = enumerate_diagrams(n)
    spanning = tuple(d for d in diagrams if not d.self_negating)
    idx = {d.key: i for i, d in enumerate(spanning)}
    red = RowReducer()
    for cd in diagrams:
        for rel in ihx_relations_for(cd):
            red.add({idx[k]: v for k, v in rel.terms.items()})
    rows = red.rref_rows()
    pivots = tuple(sorted(red.pivot_rows))
    return DiagramSpace(n, spanning, RatMatrix(rows, cols=len(spanning)), pivots)


_SPACES: dict[int, DiagramSpace] = {}


def space(n: int, use_cache: bool = True) -> DiagramSpace:
    """A_n as spanning diagrams modulo the RREF of all AS/IHX relations."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if use_cache and n in _SPACES:
        return _SPACES[n]
    sp = None
    key = ("jacobi", "space", str(n))
    if use_cache:
        payload = cache.load(key)
        if payload is not None:
            sp = DiagramSpace.from_json(payload)
    if sp is None:
        sp = _build_space(n)
        if use_cache:
            cache.store(key, sp.to_json())
    if use_cache:
        _SPACES[n] = sp
    return sp


def dim(n: int, use_cache: bool = True) -> int:
    return space(n, use_cache).quotient_dim


def connected_dim(n: int, use_cache: bool = True) -> int:
    """Dimension of the image in A_n of the connected diagrams."""
    if n < 1:
        raise ValueError("connected_dim needs degree >= 1")
    sp = space(n, use_cache)
    idx = sp.index
    red = RowReducer()
    for d in sp.spanning:
        if d.is_connected:
            nf = sp.normal_form(DiagramVector.basis(d))
            red.add({idx[k]: v for k, v in nf.terms.items()})
    return red.rank


def connected_basis(n: int, use_cache: bool = True) -> list[CanonicalDiagram]:
    """Connected diagrams whose images form a basis of A_n^c (greedy in key order)."""
    sp = space(n, use_cache)
    idx = sp.index
    red = RowReducer()
    out = []
    for d in sp.spanning:
        if d.is_connected:
            nf = sp.normal_form(DiagramVector.basis(d))
            if red.add({idx[k]: v for k, v in nf.terms.items()}):
                out.append(d)
    return out


def multiset_dim(n: int, connected_dims: dict[int, int]) -> int:
    """Number of multisets of connected basis elements with degrees summing to n."""
    # coefficient of x^n in prod_k (1 - x^k)^(-c_k)
    poly = [1] + [0] * n
    for k in range(1, n + 1):
        c = connected_dims.get(k, 0)
        if not c:
            continue
        new = [0] * (n + 1)
        for base in range(n + 1):
            if not poly[base]:
                continue
            for m in range(0, (n - base) // k + 1):
                new[base + m * k] += poly[base] * comb(c + m - 1, m)
        poly = new
    return poly[n]


def reconstructed_dim(n: int, use_cache: bool = True) -> int:
    return multiset_dim(n, {k: connected_dim(k, use_cache) for k in range(1, n + 1)})


def theta() -> JacobiDiagram:
    return JacobiDiagram(((0, 1, 2), (3, 4, 5)), ((0, 3), (1, 4), (2, 5)))


def dumbbell() -> JacobiDiagram:
    return JacobiDiagram(((0, 1, 2), (3, 4, 5)), ((0, 1), (2, 3), (4, 5)))


def all_matchings(n_half: int):
    """Every perfect matching of 0..n_half-1 (brute force, for small cross-checks)."""
    def rec(rest):
        if not rest:
            yield ()
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            for m in rec(rest[1:i] + rest[i + 1:]):
                yield ((a, b),) + m
    yield from rec(tuple(range(n_half)))
