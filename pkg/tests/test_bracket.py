import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhsbench.bracket import (S3, EvaluationError, Evaluator, FormalSum, InvariantExpr, ManifoldModel, Primitive,
                              bracket, evaluate, lens_primitive, nu, nu_p_concrete, prime_model,
                              product_identity_sides, surjection_expansion_sides, star_relation_check, surgery_generator,
                              surjections, verify_product_identity)
from qhsbench.linking import cyclic, orthogonal_sum, wall_generator

NU2, NU3 = InvariantExpr.symbol(nu(2)), InvariantExpr.symbol(nu(3))
ABSTRACT_SYMBOLS = [nu(2), nu(3), nu(5)]


def model(*prims):
    return ManifoldModel(tuple(prims))


def random_abstract(rng, count=4, symbols=ABSTRACT_SYMBOLS):
    """Untagged primitives whose additive values come only from a random table."""
    prims = [Primitive(f"X{j}") for j in range(count)]
    tables = {p.label: {s: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for s in symbols} for p in prims}
    return prims, Evaluator(tables)


def random_expr(rng, degree, symbols=ABSTRACT_SYMBOLS):
    """Random polynomial whose monomials all have exactly ``degree`` factors."""
    e = InvariantExpr()
    for _ in range(rng.randint(1, 3)):
        term = InvariantExpr.constant(rng.randint(-3, 3) or 1)
        for _ in range(degree):
            term = term * InvariantExpr.symbol(rng.choice(symbols))
        e = e + term
    return e


def test_bracket_examples():
    g2, g3 = prime_model(2), prime_model(3)
    assert bracket(S3, []) == FormalSum.of(S3)
    assert bracket(S3, [g2]) == FormalSum.of(S3) - FormalSum.of(model(g2))
    four = bracket(S3, [g2, g3])
    assert len(four.terms) == 4
    assert four.terms[S3] == 1 and four.terms[model(g2, g3)] == 1
    assert four.terms[model(g2)] == -1 and four.terms[model(g3)] == -1


def test_evaluation_examples():
    g2, g3 = prime_model(2), prime_model(3)
    for p in (2, 3, 5, 7):
        assert evaluate(InvariantExpr.symbol(nu(p)), bracket(S3, [prime_model(p)])) == -1
    assert evaluate(NU2 * NU3, bracket(S3, [g2, g3])) == 1
    # degree-two expression on three data vanishes
    assert evaluate(NU2 * NU3 + NU2 * NU2, bracket(S3, [g2, g3, g2])) == 0


def test_expression_parsing():
    e = InvariantExpr.parse("nu_2^2 + 3/2*nu_2*nu_3 - lam_2_c0")
    assert e == NU2 * NU2 + NU2 * NU3 * Fraction(3, 2) - InvariantExpr.parse("lam_2_c0")
    assert e.degree == 2
    assert InvariantExpr.parse(str(e)) == e
    with pytest.raises(ValueError):
        InvariantExpr.parse("nu_2 + foo")


def test_recursion_on_data():
    rng = random.Random(1)
    pool = [prime_model(p) for p in (2, 3, 5)] + [surgery_generator(2, "c0")]
    for _ in range(40):
        base = model(*rng.sample(pool, rng.randint(0, 2)))
        data = [rng.choice(pool) for _ in range(rng.randint(0, 3))]
        d = rng.choice(pool)
        assert bracket(base, data + [d]) == bracket(base, data) - bracket(base.connect(d), data)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 5]), max_size=3), st.lists(st.sampled_from([2, 3, 5]), max_size=3),
       st.integers(-5, 5), st.integers(-5, 5))
def test_evaluation_is_linear(xs, ys, a, b):
    e = NU2 * NU3 + NU2 - InvariantExpr.symbol(nu(5)) * 2
    x = bracket(S3, [prime_model(p) for p in xs])
    y = bracket(model(prime_model(2)), [prime_model(p) for p in ys])
    assert evaluate(e, x * a + y * b) == a * evaluate(e, x) + b * evaluate(e, y)


def test_table_and_payload_paths_agree():
    rng = random.Random(4)
    for _ in range(30):
        prims = [prime_model(rng.choice((2, 3, 5, 7))) for _ in range(rng.randint(0, 4))]
        m = model(*prims)
        for p in (2, 3, 5, 7):
            sym = InvariantExpr.symbol(nu(p))
            by_table = Evaluator(mode="table").on_model(sym, m)
            by_payload = Evaluator(mode="payload").on_model(sym, m)
            assert by_table == by_payload == nu_p_concrete(m, p)


def test_lens_payload_evaluates_nu_p():
    form = orthogonal_sum(wall_generator("A", 3, 2), cyclic(4, Fraction(1, 4)))
    m = model(lens_primitive("L36", form))
    assert evaluate(NU3, FormalSum.of(m)) == 2
    assert evaluate(NU2, FormalSum.of(m)) == 2


def test_missing_entry_names_symbol_and_label():
    with pytest.raises(EvaluationError, match="lam_2_c0.*X9"):
        evaluate(InvariantExpr.parse("lam_2_c0"), FormalSum.of(model(Primitive("X9"))))
    with pytest.raises(ValueError):
        Evaluator(mode="bogus")


def test_delta_table_normalization():
    g = surgery_generator(2, "c0")
    assert evaluate(InvariantExpr.parse("lam_2_c0"), bracket(S3, [g])) == -1
    assert evaluate(InvariantExpr.parse("lam_2_c1"), bracket(S3, [g])) == 0
    assert evaluate(NU2, bracket(S3, [g])) == 0


def test_product_identity_examples():
    g2, g3 = prime_model(2), prime_model(3)
    assert verify_product_identity(NU2, NU2, S3, [g2, g2])
    assert verify_product_identity(NU2, NU3, S3, [g3])
    lhs, rhs = product_identity_sides(NU2, NU3, S3, [g2, g3, g2])
    assert lhs == rhs == 0


def test_product_identity_random_abstract():
    rng = random.Random(12)
    for _ in range(25):
        prims, ev = random_abstract(rng)
        lam, mu = random_expr(rng, rng.randint(1, 2)), random_expr(rng, rng.randint(1, 2))
        base = model(*rng.sample(prims, rng.randint(0, 2)))
        data = [rng.choice(prims) for _ in range(rng.randint(0, 3))]
        assert verify_product_identity(lam, mu, base, data, ev)
        many = [rng.choice(prims) for _ in range(lam.degree + mu.degree + 1)]
        assert product_identity_sides(lam, mu, base, many, ev) == (0, 0)


def test_star_relation():
    g2, g3 = prime_model(2), prime_model(3)
    assert star_relation_check(model(g2), model(g3))
    assert star_relation_check(S3, model(g3))
    rng = random.Random(8)
    for j in range(20):
        a = model(lens_primitive(f"La{j}", cyclic(rng.randint(2, 30), Fraction(1, 1))))
        b = model(lens_primitive(f"Lb{j}", cyclic(rng.randint(2, 30), Fraction(1, 1))))
        assert star_relation_check(a, b)


def test_surjection_counts():
    # Stirling numbers of the second kind times q!
    assert [len(list(surjections(3, q))) for q in (1, 2, 3)] == [1, 6, 6]
    assert len(list(surjections(2, 3))) == 0


def test_surjection_expansion_random():
    rng = random.Random(21)
    for _ in range(20):
        prims, ev = random_abstract(rng)
        p, q = rng.randint(1, 3), rng.randint(1, 3)
        adds = [InvariantExpr.symbol(rng.choice(ABSTRACT_SYMBOLS)) for _ in range(p)]
        brs = [bracket(model(*rng.sample(prims, rng.randint(0, 1))),
                       [rng.choice(prims) for _ in range(rng.randint(1, 2))]) for _ in range(q)]
        lhs, rhs = surjection_expansion_sides(adds, brs, ev)
        assert lhs == rhs


def test_formal_sum_json_roundtrip():
    s = bracket(model(prime_model(2)), [prime_model(3), surgery_generator(2, "c0")]) * Fraction(1, 3)
    obj = s.to_json()
    assert obj["terms"][0]["coeff"] == "1/3"
    assert FormalSum.from_json(obj) == s
    assert ManifoldModel.parse("g3#g2") == model(prime_model(2), prime_model(3))
    assert ManifoldModel.parse("S3") == S3
