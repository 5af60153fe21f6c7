"""Command-line front end.

Every command prints one JSON document (sorted keys) or, with ``--table``, an
aligned text table. Exit status: 0 success, 1 domain error, 2 usage error.
Exact rationals and matrix entries are printed as strings; counts stay JSON
integers.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, augmented, bracket, cache, homology, hopf, jacobi, linking
from .linalg import IntMatrix, format_number


class UsageError(Exception):
    pass


def _load_json(arg: str):
    """Inline JSON (starting with '{' or '[') or a path to a JSON file."""
    text = arg.strip()
    if text[:1] in "{[":
        return json.loads(text)
    return json.loads(Path(arg).read_text(encoding="utf-8"))


def _matrix(arg: str) -> IntMatrix:
    return IntMatrix.from_json(_load_json(arg))


def _primes(text: str) -> augmented.PrimeSupport:
    try:
        return augmented.PrimeSupport.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- command bodies: each returns a JSON-ready payload ------------------------

def cmd_jacobi_dim(a):
    return {"degree": a.n, "dim": jacobi.dim(a.n, not a.no_cache)}


def cmd_jacobi_connected(a):
    return {"degree": a.n, "connected_dim": jacobi.connected_dim(a.n, not a.no_cache),
            "reconstructed_dim": jacobi.reconstructed_dim(a.n, not a.no_cache),
            "dim": jacobi.dim(a.n, not a.no_cache)}


def cmd_jacobi_basis(a):
    sp = jacobi.space(a.n, not a.no_cache)
    return {"degree": a.n, "basis": [d.key for d in sp.basis()], "spanning": len(sp.spanning)}


def cmd_aug_dim(a):
    return {"dim": augmented.dim_augmented(a.n, _primes(a.primes), not a.no_cache)}


def cmd_linking_normalize(a):
    return linking.Linking.from_json(_load_json(a.file)).normalize().to_json()


def cmd_linking_sum(a):
    return linking.orthogonal_sum(linking.Linking.from_json(_load_json(a.file1)),
                                  linking.Linking.from_json(_load_json(a.file2))).to_json()


def cmd_linking_iso(a):
    x = linking.Linking.from_json(_load_json(a.file1))
    y = linking.Linking.from_json(_load_json(a.file2))
    return {"isomorphic": linking.is_isomorphic(x, y)}


def cmd_linking_class(a):
    cls = linking.two_equivalence_class(linking.Linking.from_json(_load_json(a.file)))
    return {"valuations": {str(p): v for p, v in cls.valuations}}


def cmd_linking_from_framing(a):
    return linking.from_framing_matrix(_matrix(a.file)).to_json()


def _group_payload(g: homology.GroupPresentation):
    order = g.order()
    return {"invariant_factors": list(g.invariant_factors()), "order": order, "finite": order is not None}


def cmd_homology_glue(a):
    pa = homology.PieceWithBoundary.from_json(_load_json(a.a))
    pb = homology.PieceWithBoundary.from_json(_load_json(a.b))
    ident = _matrix(a.ident) if a.ident else IntMatrix.identity(2 * pa.genus)
    return _group_payload(homology.glue(pa, pb, ident))


def cmd_homology_lagrangian(a):
    piece = homology.PieceWithBoundary.from_json(_load_json(a.piece))
    lag = homology.lagrangian_invariants(piece)
    return {"d": list(lag.d), "torsion": list(lag.torsion), "index": homology.lagrangian_index(piece)}


def cmd_homology_mu_p(a):
    piece = homology.PieceWithBoundary.from_json(_load_json(a.piece))
    return {"p": a.p, "mu_p": homology.mu_p(piece, a.p)}


def cmd_bracket_eval(a):
    expr = bracket.InvariantExpr.parse(a.expr)
    base = bracket.ManifoldModel.parse(a.base)
    data = [bracket.primitive_from_label(t) for t in a.data.split(",") if t] if a.data else []
    s = bracket.bracket(base, data)
    return {"expr": str(expr), "bracket": s.to_json(), "value": format_number(bracket.evaluate(expr, s))}


def _universe(n, primes, no_cache):
    return hopf.IndexUniverse.build(n, _primes(primes), not no_cache)


def cmd_hopf_tn(a):
    idx = hopf.enumerate_Tn(a.n, _universe(a.n, a.primes, a.no_cache))
    return {"n": a.n, "count": len(idx), "indices": [hopf.index_str(i) for i in idx]}


def cmd_hopf_duality(a):
    keys, M = hopf.duality_matrix(a.n, _universe(a.n, a.primes, a.no_cache))
    return {"n": a.n, "indices": [hopf.index_str(i) for _, i in keys],
            "matrix": [[format_number(x) for x in row] for row in M], "identity": hopf.is_identity(M)}


def cmd_hopf_coproduct(a):
    t = hopf.coproduct(bracket.InvariantExpr.parse(a.expr))
    return {"terms": [{"left": bracket.mono_str(k[0]), "right": bracket.mono_str(k[1]), "coeff": format_number(c)}
                      for k, c in t.sorted_terms()]}


def cmd_hopf_dim_check(a):
    tn, aug = hopf.dimension_check(a.n, _primes(a.primes), not a.no_cache)
    return {"tn": tn, "aug": aug, "equal": tn == aug}


# -- output -----------------------------------------------------------------

def render_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def render_table(payload) -> str:
    """Key/value table; a list of equal-length lists becomes a grid."""
    lines = []
    if isinstance(payload, dict):
        width = max((len(k) for k in payload), default=0)
        for k in sorted(payload):
            v = payload[k]
            if isinstance(v, list) and v and all(isinstance(r, list) for r in v):
                lines.append(k)
                cells = [[_cell(x) for x in r] for r in v]
                w = max((len(c) for r in cells for c in r), default=1)
                lines.extend("  " + " ".join(c.rjust(w) for c in r) for r in cells)
            else:
                lines.append(f"{k.ljust(width)}  {_cell(v)}")
    else:
        lines.append(_cell(payload))
    return "\n".join(lines) + "\n"


# -- parser -----------------------------------------------------------------

CACHEABLE = {"jacobi", "aug", "hopf"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    # SUPPRESS keeps a subcommand's defaults from overwriting flags given before it
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=argparse.SUPPRESS,
                     help="JSON output (default)")
    fmt.add_argument("--table", dest="fmt", action="store_const", const="table", default=argparse.SUPPRESS,
                     help="aligned table output")
    common.add_argument("--no-cache", action="store_true", default=argparse.SUPPRESS,
                        help="bypass the on-disk cache")

    p = argparse.ArgumentParser(prog="qhsbench", parents=[common],
                                description="Exact computations with Jacobi diagrams, linkings and homology models.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    top = p.add_subparsers(dest="group", required=True, metavar="{jacobi,aug,linking,homology,bracket,hopf}")

    def group(name, help_text):
        g = top.add_parser(name, help=help_text, parents=[common])
        return g.add_subparsers(dest="command", required=True)

    def leaf(sub, name, func, help_text):
        c = sub.add_parser(name, help=help_text, parents=[common])
        c.set_defaults(func=func)
        return c

    def degree(c, name="n"):
        c.add_argument(name, type=int)

    j = group("jacobi", "diagram spaces A_n")
    degree(leaf(j, "dim", cmd_jacobi_dim, "dimension of A_n"))
    degree(leaf(j, "connected-dim", cmd_jacobi_connected, "connected dimension and reconstruction check"))
    degree(leaf(j, "basis", cmd_jacobi_basis, "canonical keys of a quotient basis"))

    a = group("aug", "augmented diagram spaces")
    c = leaf(a, "dim", cmd_aug_dim, "dimension over a finite prime support")
    degree(c)
    c.add_argument("--primes", required=True)

    l = group("linking", "linkings on finite abelian groups")
    leaf(l, "normalize", cmd_linking_normalize, "split into prime-power cyclic pieces").add_argument("file")
    leaf(l, "class", cmd_linking_class, "2-equivalence class (p-adic valuations)").add_argument("file")
    c = leaf(l, "sum", cmd_linking_sum, "orthogonal sum")
    c.add_argument("file1")
    c.add_argument("file2")
    c = leaf(l, "iso", cmd_linking_iso, "decide isomorphism by exhaustive search")
    c.add_argument("file1")
    c.add_argument("file2")
    leaf(l, "from-framing", cmd_linking_from_framing, "linking of a surgery presentation").add_argument("file")

    h = group("homology", "first homology of glued pieces")
    c = leaf(h, "glue", cmd_homology_glue, "Mayer-Vietoris gluing")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--ident", help="symplectic identification matrix (JSON or file); default identity")
    leaf(h, "lagrangian", cmd_homology_lagrangian, "Lagrangian elementary divisors").add_argument("piece")
    c = leaf(h, "mu-p", cmd_homology_mu_p, "mu_p of a genus-1 piece")
    c.add_argument("piece")
    c.add_argument("-p", type=int, required=True)

    b = group("bracket", "brackets and invariant evaluation")
    c = leaf(b, "eval", cmd_bracket_eval, "evaluate an invariant on a bracket")
    c.add_argument("--expr", required=True)
    c.add_argument("--base", default="S3")
    c.add_argument("--data", default="")

    hp = group("hopf", "index sets, dual systems and the coproduct")
    for name, func, text in (("tn", cmd_hopf_tn, "enumerate T_n"),
                             ("duality", cmd_hopf_duality, "evaluation matrix of the dual system"),
                             ("dim-check", cmd_hopf_dim_check, "compare |T_n| with the augmented dimension")):
        c = leaf(hp, name, func, text)
        degree(c)
        c.add_argument("--primes", required=True)
    leaf(hp, "coproduct", cmd_hopf_coproduct, "coproduct of an expression").add_argument("expr")
    return p


def _cache_key(args) -> tuple[str, ...]:
    fields = {k: v for k, v in vars(args).items() if k not in ("func", "fmt", "no_cache")}
    return ("cli", json.dumps(fields, sort_keys=True))


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.fmt = getattr(args, "fmt", "json")
    args.no_cache = getattr(args, "no_cache", False)
    if args.no_cache:
        cache.disable(True)
    try:
        payload = None
        use_cli_cache = args.group in CACHEABLE and not args.no_cache
        if use_cli_cache:
            payload = cache.load(_cache_key(args))
        if payload is None:
            payload = args.func(args)
            if use_cli_cache:
                cache.store(_cache_key(args), payload)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(f"qhsbench: error: {exc}", file=stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, KeyError) as exc:
        print(f"qhsbench: error: {exc}", file=stderr)
        return 1
    finally:
        if args.no_cache:
            cache.disable(False)
    stdout.write(render_table(payload) if args.fmt == "table" else render_json(payload))
    return 0


def main() -> None:
    sys.exit(run())
