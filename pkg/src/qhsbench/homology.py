"""First-homology models of 3-manifold pieces and Mayer-Vietoris gluing.

A ``GroupPresentation`` is the cokernel of its relation rows. A
``PieceWithBoundary`` adds, for a boundary of genus g, the images in H_1 of a
symplectic basis ``alpha_1..alpha_g, beta_1..beta_g``. Boundary coordinates
are ordered (alpha_1, ..., alpha_g, beta_1, ..., beta_g).

An identification matrix ``S`` sends boundary basis curve ``c`` of the first
piece to ``sum_j S[j][c] * basis_j`` of the second; gluing adds the relation
``image_a(c) = image_b(S c)`` for every c. ``S`` must satisfy ``S^T J S = J``
for the standard symplectic ``J``.

A link exterior is a piece whose boundary is a union of tori. Torus ``t`` of
an exterior with ``g`` tori owns coordinates ``t`` (meridian) and ``g + t``
(longitude); ``attach`` glues a genus-1 piece into one torus and returns the
exterior of the remaining tori.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .linalg import IntMatrix, RowReducer, integer_kernel, rational_inverse, smith_normal_form
from .linking import valuation


class HomologyError(ValueError):
    pass


def _as_matrix(relations, ncols: int) -> IntMatrix:
    if isinstance(relations, IntMatrix):
        if relations.cols != ncols:
            raise HomologyError("relation width does not match the generator count")
        return relations
    return IntMatrix([list(r) for r in relations], cols=ncols)


@dataclass(frozen=True)
class GroupPresentation:
    generators: tuple[str, ...]
    relations: IntMatrix

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relations", _as_matrix(self.relations, len(gens)))

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def invariant_factors(self) -> tuple[int, ...]:
        """Cyclic decomposition of the cokernel: nontrivial factors, 0 for each free summand."""
        s = smith_normal_form(self.relations)
        d = list(s.d) + [0] * (self.ngens - len(s.d))
        return tuple(sorted((x for x in d if x != 1), key=lambda x: (x == 0, x)))

    def free_rank(self) -> int:
        return sum(1 for x in self.invariant_factors() if x == 0)

    def torsion(self) -> tuple[int, ...]:
        return tuple(x for x in self.invariant_factors() if x)

    def is_finite(self) -> bool:
        return self.free_rank() == 0

    def order(self) -> int | None:
        """|H|, or None when the group is infinite."""
        if not self.is_finite():
            return None
        return prod(self.torsion())

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "relations": self.relations.tolist()}

    @classmethod
    def from_json(cls, obj) -> "GroupPresentation":
        if isinstance(obj, str):
            obj = json.loads(obj)
        gens = tuple(obj["generators"])
        return cls(gens, IntMatrix(obj.get("relations", []), cols=len(gens)))


TRIVIAL_GROUP = GroupPresentation((), IntMatrix([], cols=0))


def cyclic_group(n: int, name: str = "x") -> GroupPresentation:
    return GroupPresentation((name,), IntMatrix([[n]]))


def _merge_names(a, b) -> tuple[str, ...]:
    names = list(a)
    taken = set(names)
    for n in b:
        m = n
        while m in taken:
            m += "'"
        taken.add(m)
        names.append(m)
    return tuple(names)


def _block(a: IntMatrix, b: IntMatrix) -> list[list[int]]:
    rows = [list(r) + [0] * b.cols for r in a.tolist()]
    rows += [[0] * a.cols + list(r) for r in b.tolist()]
    return rows


def connected_sum(a: GroupPresentation, b: GroupPresentation) -> GroupPresentation:
    return GroupPresentation(_merge_names(a.generators, b.generators),
                             IntMatrix(_block(a.relations, b.relations), cols=a.ngens + b.ngens))


@dataclass(frozen=True)
class PieceWithBoundary:
    h1: GroupPresentation
    alpha: tuple[tuple[int, ...], ...]
    beta: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        alpha = tuple(tuple(int(x) for x in v) for v in self.alpha)
        beta = tuple(tuple(int(x) for x in v) for v in self.beta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if len(alpha) != len(beta):
            raise HomologyError("need as many alpha curves as beta curves")
        for v in alpha + beta:
            if len(v) != self.h1.ngens:
                raise HomologyError("boundary image has the wrong length")

    @property
    def genus(self) -> int:
        return len(self.alpha)

    def boundary_images(self) -> list[tuple[int, ...]]:
        """Images of the boundary basis in coordinate order."""
        return list(self.alpha) + list(self.beta)

    def to_json(self) -> dict:
        out = self.h1.to_json()
        out["boundary"] = {"alpha": [list(v) for v in self.alpha], "beta": [list(v) for v in self.beta]}
        return out

    @classmethod
    def from_json(cls, obj) -> "PieceWithBoundary":
        if isinstance(obj, str):
            obj = json.loads(obj)
        h1 = GroupPresentation.from_json(obj)
        bd = obj.get("boundary", {"alpha": [], "beta": []})
        return cls(h1, tuple(map(tuple, bd["alpha"])), tuple(map(tuple, bd["beta"])))


def symplectic_form(g: int) -> list[list[int]]:
    return [[(1 if j == i + g else -1 if i == j + g else 0) for j in range(2 * g)] for i in range(2 * g)]


def is_symplectic(S: IntMatrix) -> bool:
    if S.rows != S.cols or S.rows % 2:
        return False
    J = IntMatrix(symplectic_form(S.rows // 2), cols=S.rows)
    return S.transpose() @ J @ S == J


def d_torus(d: int) -> PieceWithBoundary:
    """H_1 = Z_d alpha + Z gamma with alpha -> alpha and beta -> d gamma."""
    if d < 1:
        raise HomologyError("d must be positive")
    return PieceWithBoundary(GroupPresentation(("alpha", "gamma"), IntMatrix([[d, 0]])),
                             ((1, 0),), ((0, d),))


def handlebody(g: int) -> PieceWithBoundary:
    """Standard genus-g handlebody: alphas bound discs, betas map to the free basis."""
    gens = tuple(f"c{i}" for i in range(g))
    unit = [tuple(int(i == j) for j in range(g)) for i in range(g)]
    return PieceWithBoundary(GroupPresentation(gens, IntMatrix([], cols=g)),
                             tuple((0,) * g for _ in range(g)), tuple(unit))


def solid_torus() -> PieceWithBoundary:
    return handlebody(1)


def with_summand(piece: PieceWithBoundary, extra: GroupPresentation) -> PieceWithBoundary:
    """Interior connected sum with a closed manifold of first homology ``extra``."""
    pad = (0,) * extra.ngens
    return PieceWithBoundary(connected_sum(piece.h1, extra),
                             tuple(v + pad for v in piece.alpha), tuple(v + pad for v in piece.beta))


def unknot_exterior() -> PieceWithBoundary:
    """H_1 = Z mu; meridian -> mu, longitude -> 0."""
    return PieceWithBoundary(GroupPresentation(("mu",), IntMatrix([], cols=1)), ((1,),), ((0,),))


def hopf_exterior() -> PieceWithBoundary:
    """H_1 = Z mu + Z mu'; each longitude is the other component's meridian."""
    return PieceWithBoundary(GroupPresentation(("mu", "mu'"), IntMatrix([], cols=2)),
                             ((1, 0), (0, 1)), ((0, 1), (1, 0)))


def split_unlink_exterior() -> PieceWithBoundary:
    """H_1 = Z mu + Z mu'; both longitudes null-homologous."""
    return PieceWithBoundary(GroupPresentation(("mu", "mu'"), IntMatrix([], cols=2)),
                             ((1, 0), (0, 1)), ((0, 0), (0, 0)))


def _glue_relations(a: PieceWithBoundary, a_coords, b: PieceWithBoundary, S: IntMatrix):
    na, nb = a.h1.ngens, b.h1.ngens
    rows = _block(a.h1.relations, b.h1.relations)
    a_img = a.boundary_images()
    b_img = b.boundary_images()
    for c, ac in enumerate(a_coords):
        lhs = a_img[ac]
        rhs = [sum(S[j, c] * b_img[j][x] for j in range(S.rows)) for x in range(nb)]
        rows.append(list(lhs) + [-x for x in rhs])
    return GroupPresentation(_merge_names(a.h1.generators, b.h1.generators),
                             IntMatrix(rows, cols=na + nb))


def _check_ident(S, g: int) -> IntMatrix:
    S = S if isinstance(S, IntMatrix) else IntMatrix(S)
    if S.rows != 2 * g or S.cols != 2 * g:
        raise HomologyError(f"identification must be {2 * g}x{2 * g}")
    if not is_symplectic(S):
        raise HomologyError("identification does not preserve the intersection form")
    return S


def glue(a: PieceWithBoundary, b: PieceWithBoundary, ident) -> GroupPresentation:
    """H_1 of the closed manifold a cup_S b."""
    if a.genus != b.genus:
        raise HomologyError("pieces have different boundary genus")
    S = _check_ident(ident, a.genus)
    return _glue_relations(a, range(2 * a.genus), b, S)


def attach(exterior: PieceWithBoundary, torus: int, piece: PieceWithBoundary, ident=None) -> PieceWithBoundary:
    """Glue a genus-1 piece into one boundary torus; the other tori stay as boundary."""
    g = exterior.genus
    if piece.genus != 1:
        raise HomologyError("attach takes a genus-1 piece")
    if not 0 <= torus < g:
        raise HomologyError(f"torus index {torus} out of range")
    S = _check_ident(ident if ident is not None else IntMatrix.identity(2), 1)
    h1 = _glue_relations(exterior, (torus, g + torus), piece, S)
    pad = (0,) * piece.h1.ngens
    keep = [t for t in range(g) if t != torus]
    return PieceWithBoundary(h1, tuple(exterior.alpha[t] + pad for t in keep),
                             tuple(exterior.beta[t] + pad for t in keep))


def close(piece: PieceWithBoundary) -> GroupPresentation:
    if piece.genus:
        raise HomologyError("piece still has boundary")
    return piece.h1


@dataclass(frozen=True)
class LagrangianData:
    d: tuple[int, ...]
    torsion: tuple[int, ...]


def _free_projection(piece: PieceWithBoundary):
    """Boundary images projected to the free quotient H_1/Tors, one row per free coordinate."""
    s = smith_normal_form(piece.h1.relations)
    n = piece.h1.ngens
    # rows span R; R V = U^-1 D, so x -> x V carries H_1 onto Z^n / row(D)
    free = [j for j in range(n) if j >= len(s.d) or s.d[j] == 0]
    imgs = piece.boundary_images()
    P = [[sum(v[i] * s.V[i, j] for i in range(n)) for v in imgs] for j in free]
    return P, len(free)


def lagrangian_invariants(piece: PieceWithBoundary) -> LagrangianData:
    g = piece.genus
    if piece.h1.free_rank() != g:
        raise HomologyError(f"not a rational homology handlebody: H_1 has rank "
                            f"{piece.h1.free_rank()}, boundary genus {g}")
    P, r = _free_projection(piece)
    if g == 0:
        return LagrangianData((), piece.h1.torsion())
    s = smith_normal_form(IntMatrix(P, cols=2 * g))
    d = tuple(x for x in s.d if x)
    if len(d) != g:
        raise HomologyError("boundary does not span the free part rationally")
    return LagrangianData(d, piece.h1.torsion())


def lagrangian_lattices(piece: PieceWithBoundary):
    """(L^T, L^Z) bases in boundary coordinates.

    L^Z is the kernel of H_1(boundary) -> H_1(piece); L^T is the preimage of torsion.
    """
    g = piece.genus
    P, _ = _free_projection(piece)
    LT = integer_kernel(IntMatrix(P, cols=2 * g)) if P else [list(r) for r in IntMatrix.identity(2 * g).tolist()]
    n = piece.h1.ngens
    R = piece.h1.relations
    imgs = piece.boundary_images()
    # x in L^Z  iff  sum x_c img_c - R^T t = 0 for some integer t
    M = [[imgs[c][i] for c in range(2 * g)] + [-R[k, i] for k in range(R.rows)] for i in range(n)]
    if n == 0:
        gens = IntMatrix.identity(2 * g).tolist()
    else:
        gens = [v[:2 * g] for v in integer_kernel(IntMatrix(M, cols=2 * g + R.rows))]
    return LT, gens


def lagrangian_index(piece: PieceWithBoundary) -> int:
    """|L^T / L^Z| from the two kernel lattices, independent of the Smith form of the projection."""
    LT, LZ = lagrangian_lattices(piece)
    g = piece.genus
    if len(LT) != g:
        raise HomologyError("L^T does not have rank g")
    # coordinates of L^Z generators in the L^T basis: pick g independent boundary coordinates
    cols = _independent_columns(LT)
    B = [[LT[a][c] for c in cols] for a in range(g)]
    Binv = rational_inverse(IntMatrix(B, cols=g).transpose())
    coords = []
    for v in LZ:
        x = [sum(Binv[i][j] * v[cols[j]] for j in range(g)) for i in range(g)]
        if any(Fraction(t).denominator != 1 for t in x):
            raise HomologyError("L^Z is not contained in L^T")
        coords.append([int(t) for t in x])
    s = smith_normal_form(IntMatrix(coords, cols=g))
    nz = [x for x in s.d if x]
    if len(nz) != g:
        raise HomologyError("L^Z does not have rank g")
    return prod(nz)


def _independent_columns(rows: list[list[int]]) -> list[int]:
    red = RowReducer()
    cols = []
    ncols = len(rows[0])
    for c in range(ncols):
        if red.add({i: Fraction(rows[i][c]) for i in range(len(rows)) if rows[i][c]}):
            cols.append(c)
    return cols


def mu_p(piece: PieceWithBoundary, p: int) -> int:
    """v_p(d(T) |Tors H_1(T)|) for a genus-1 rational homology torus."""
    if piece.genus != 1:
        raise HomologyError("mu_p is defined for genus-1 pieces")
    lag = lagrangian_invariants(piece)
    return valuation(lag.d[0] * prod(lag.torsion), p)


def random_torus_piece(rng, max_d: int = 6, max_torsion: int = 5, max_twist: int = 3) -> PieceWithBoundary:
    """T_d # (closed summand with H_1 = Z_r), longitude reframed: alpha -> alpha, beta -> k alpha + d gamma.

    Only realizable pieces are produced: for these the Lagrangian index and
    the Smith form of the projection to H_1/Tors agree.
    """
    d = rng.randint(1, max_d)
    r = rng.randint(1, max_torsion)
    k = rng.randint(-max_twist, max_twist)
    h1 = GroupPresentation(("alpha", "gamma", "t"), IntMatrix([[d, 0, 0], [0, 0, r]]))
    return PieceWithBoundary(h1, ((1, 0, 0),), ((k, d, 0),))


def random_lp_identification(rng, max_twist: int = 4) -> IntMatrix:
    """Symplectic map fixing the line of alpha: sign times a Dehn twist along alpha."""
    e = rng.choice((1, -1))
    k = rng.randint(-max_twist, max_twist)
    return IntMatrix([[e, e * k], [0, e]])


def double_replacement_orders(exterior: PieceWithBoundary, a_new: PieceWithBoundary, a_ident,
                              b_new: PieceWithBoundary, b_ident) -> tuple:
    """|H_1| of M, M(A'), M(B'), M(A', B') where M fills a two-torus exterior with solid tori."""
    if exterior.genus != 2:
        raise HomologyError("double replacement needs a two-torus exterior")
    I = IntMatrix.identity(2)
    st = solid_torus()

    def fill(x, sx, y, sy):
        return close(attach(attach(exterior, 0, x, sx), 0, y, sy)).order()

    return (fill(st, I, st, I), fill(a_new, a_ident, st, I),
            fill(st, I, b_new, b_ident), fill(a_new, a_ident, b_new, b_ident))


def multiplicativity_holds(orders) -> bool:
    """|H(M)| |H(M(A',B'))| == |H(M(A'))| |H(M(B'))| (all four finite)."""
    m, a, b, ab = orders
    if None in orders:
        return False
    return m * ab == a * b
