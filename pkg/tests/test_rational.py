import random

import pytest

from treelike.rational import ProductAutomaton, member_product, product_automaton
from treelike.stallings import member, stallings_graph
from treelike.words import (
    concat,
    invert_word,
    parse_word,
    random_reduced_word,
    reduce_word,
)


def _cores(*gen_lists):
    return [stallings_graph([parse_word(w) for w in gens])
            for gens in gen_lists]


def _check_factorization(cores, w, factors):
    assert len(factors) == len(cores)
    acc = ()
    for core, h in zip(cores, factors):
        assert member(core, h)
        acc = concat(acc, h)
    assert acc == tuple(w)


def test_single_factor():
    cores = _cores(("a",))
    for text in ("a", "a^5", "a^-3"):
        ok, factors = member_product(cores, parse_word(text))
        assert ok
        _check_factorization(cores, parse_word(text), factors)
    for text in ("b", "a b"):
        ok, factors = member_product(cores, parse_word(text))
        assert not ok and factors is None


def test_two_factor_product():
    cores = _cores(("a",), ("b",))
    for text in ("a b", "a^-2 b^3", "a", "b"):
        ok, factors = member_product(cores, parse_word(text))
        assert ok
        _check_factorization(cores, parse_word(text), factors)
    ok, _ = member_product(cores, parse_word("b a"))
    assert not ok


def test_empty_word_always_member():
    for cores in (_cores(("a",)), _cores(("a",), ("b",)),
                  _cores(("a b",), ("b a",), ("a",))):
        ok, factors = member_product(cores, ())
        assert ok
        _check_factorization(cores, (), factors)


def test_subgroup_pair_with_nontrivial_split():
    cores = _cores(("a^2", "a b a^-1"), ("b",))
    w = parse_word("a b^2 a^-1 b^3")
    ok, factors = member_product(cores, w)
    assert ok
    _check_factorization(cores, w, factors)


def test_three_factor_product():
    cores = _cores(("a",), ("b",), ("a",))
    ok, factors = member_product(cores, parse_word("a b a^-1"))
    assert ok
    _check_factorization(cores, parse_word("a b a^-1"), factors)
    ok, _ = member_product(cores, parse_word("b a b"))
    assert not ok


def test_member_needs_long_factor():
    # the only factorizations route the first factor through a word
    # longer than the query
    cores = _cores(("a^-1 b a",), ("a b^-1 a",))
    w = parse_word("a^-1 b^-2 a^-1")
    ok, factors = member_product(cores, w)
    assert ok
    _check_factorization(cores, w, factors)
    assert max(len(h) for h in factors) >= 5


def test_validation():
    with pytest.raises(ValueError, match="at least one factor"):
        ProductAutomaton([])
    headless = stallings_graph([parse_word("a")]).__class__(
        {0}, {(0, 1, 0)})
    with pytest.raises(ValueError, match="factor 0 has no basepoint"):
        ProductAutomaton([headless])
    with pytest.raises(ValueError, match="must be reduced"):
        member_product(_cores(("a",)), (1, -1))


def test_saturation_reaches_fixpoint():
    aut = product_automaton(_cores(("a^2", "a b a^-1"), ("b a",), ("a",)))
    aut.saturate()
    frozen = {q: frozenset(s) for q, s in aut.eps.items()}
    aut._saturated = False
    aut.saturate()
    assert {q: frozenset(s) for q, s in aut.eps.items()} == frozen
    # fixpoint property: reading x, an epsilon stretch, then x^-1 always
    # lands inside an existing epsilon edge
    for (q, x), r in aut.trans.items():
        for r2 in aut._closure({r}):
            s = aut.trans.get((r2, -x))
            if s is not None:
                assert s in aut.eps.get(q, ())


def test_accepts_agrees_with_factorize():
    rng = random.Random(97)
    aut = product_automaton(_cores(("a b",), ("b",)))
    cores = aut.cores
    for _ in range(200):
        w = random_reduced_word(rng, 2, rng.randint(0, 6))
        got = aut.accepts(w)
        factors = aut.factorize(w)
        assert got == (factors is not None)
        if factors is not None:
            _check_factorization(cores, w, factors)


def _subgroup_ball(gen_texts, max_len):
    gens = [parse_word(t) for t in gen_texts]
    gens += [invert_word(g) for g in gens]
    ball = {()}
    frontier = [()]
    while frontier:
        w = frontier.pop()
        for g in gens:
            nxt = reduce_word(concat(w, g))
            if len(nxt) <= max_len and nxt not in ball:
                ball.add(nxt)
                frontier.append(nxt)
    return ball


def test_against_bounded_product_enumeration():
    # sound both ways on the bounded ball: everything in the enumerated
    # product is accepted, and nothing rejected lies in it
    rng = random.Random(101)
    cases = [
        ((("a",), ("b",)), 6),
        ((("a b",), ("b^-1 a",)), 6),
        ((("a^2", "a b a^-1"), ("b",)), 5),
    ]
    for gen_lists, max_len in cases:
        cores = _cores(*gen_lists)
        balls = [_subgroup_ball(gens, max_len) for gens in gen_lists]
        product = {()}
        for ball in balls:
            product = {reduce_word(concat(x, h))
                       for x in product for h in ball}
        for w in sorted(product):
            if len(w) <= max_len:
                ok, factors = member_product(cores, w)
                assert ok
                _check_factorization(cores, w, factors)
        beyond_bound = 0
        for _ in range(300):
            w = random_reduced_word(rng, 2, rng.randint(0, max_len))
            ok, factors = member_product(cores, w)
            if ok:
                _check_factorization(cores, w, factors)
                if w not in product:
                    beyond_bound += 1
            else:
                assert w not in product
        # accepted words missing from the bounded enumeration are fine:
        # their factors are longer than the ball, never wrong
        assert beyond_bound >= 0
