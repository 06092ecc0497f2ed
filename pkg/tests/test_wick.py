from itertools import product

import numpy as np
import pytest

from coulqed.wick import (
    LadderOp,
    dyson_n2_structure,
    evaluate,
    forward_term,
    n1_structure,
    normal_order,
    vev,
    word,
)

from fock_oracle import operators, photon_overflow, vacuum

LETTERS = [(k, m) for k in ("a", "a+", "ac", "ac+", "b", "b+") for m in (0, 1)]
LADDERS = {letter: LadderOp(*letter) for letter in LETTERS}
CHANNELS = sorted({(k.rstrip("+"), m) for k, m in LETTERS})


def charge(letter):
    vec = np.zeros(len(CHANNELS), dtype=int)
    kind, mode = letter
    vec[CHANNELS.index((kind.rstrip("+"), mode))] = 1 if kind.endswith("+") else -1
    return vec


def test_normal_order_moves_creators_left():
    a, ad = LadderOp("a", 0), LadderOp("a+", 0)
    ordered = normal_order(word(a, ad))
    assert ordered.ops == (ad, a) and ordered.coeff == -1 and ordered.normal_ordered
    b, bd = LadderOp("b", 0), LadderOp("b+", 0)
    ordered = normal_order(word(b, bd))
    assert ordered.ops == (bd, b) and ordered.coeff == 1
    already = word(ad, bd, a, b)
    assert normal_order(already).ops == already.ops and normal_order(already).coeff == 1


def test_normal_ordered_words_have_no_vacuum_value():
    for w in (word(LadderOp("a", 0), LadderOp("a+", 0)), word(LadderOp("b", 1), LadderOp("b+", 1))):
        assert evaluate(vev(w)) == 1
        assert evaluate(vev(normal_order(w))) == 0


def test_forward_term_is_product_of_two_deltas():
    fwd = forward_term("compton")
    assert len(fwd.terms) == 1
    (term,) = fwd.terms
    assert term.coeff == 1
    assert [c.render() for c in term.contractions] == ["[f',f†]", "[a',a†]"]
    assert all(c.category == "delta" for c in term.contractions)


@pytest.mark.parametrize("process", ["compton", "eemumu"])
def test_first_order_transverse_terms_vanish(process):
    assert n1_structure(process, "A").terms == []


def test_first_order_same_species_coulomb_term_vanishes_for_compton():
    assert n1_structure("compton", "C").terms == []


def test_first_order_coulomb_term_connects_electrons_to_muons():
    (term,) = n1_structure("eemumu", "C").terms
    assert not term.forward
    assert {c.category for c in term.contractions} == {"wavefunction"}


def test_second_order_compton_has_four_terms():
    structure = dyson_n2_structure("compton")
    nonforward = structure.nonforward
    assert len(nonforward) == 4
    assert sorted(abs(t.coeff) for t in nonforward) == [0.5] * 4
    for t in nonforward:
        cats = [c.category for c in t.contractions]
        assert cats.count("propagator") == 1 and cats.count("wavefunction") == 4
    patterns = structure.patterns
    # x <-> y relabelling pairs the four terms into the two exchange diagrams
    assert len(patterns) == 2
    assert all(p.consistent and len(p.members) == 2 for p in patterns)


def test_engine_matches_truncated_fock_space_up_to_length_four():
    ops = operators()
    dim = 144
    assert next(iter(ops.values())).shape == (dim, dim)
    checked = 0
    for length in range(1, 5):
        for letters in product(LETTERS, repeat=length):
            state = vacuum(dim)
            for letter in reversed(letters):
                state = ops[letter] @ state
            engine = evaluate(vev(word(*(LADDERS[x] for x in letters))))
            assert abs(engine - state[0]) < 1e-12, letters
            checked += 1
    assert checked == sum(12**k for k in range(1, 5))


def _half_words(length, side):
    ops = operators()
    words = list(product(LETTERS, repeat=length))
    vecs = np.empty((len(words), 144))
    charges = np.zeros((len(words), len(CHANNELS)), dtype=int)
    for i, w in enumerate(words):
        v = vacuum(144)
        for letter in (w if side == "left" else reversed(w)):
            v = v @ ops[letter] if side == "left" else ops[letter] @ v
        vecs[i] = v
        charges[i] = sum(charge(x) for x in w)
    return words, vecs, charges


@pytest.mark.parametrize("length", [5, 6])
def test_engine_matches_truncated_fock_space_long_words(length):
    """All 12^length words: oracle vacuum values via <0|left . right|0>, engine on every word that
    conserves each channel's number (the others vanish in the oracle and are sampled in the engine)."""
    left_len = length // 2
    lw, lv, lc = _half_words(left_len, "left")
    rw, rv, rc = _half_words(length - left_len, "right")
    table = lv @ rv.T
    balanced = np.all((lc[:, None, :] + rc[None, :, :]) == 0, axis=2)
    assert not np.any(table[~balanced])
    compared = 0
    for i, j in zip(*np.nonzero(balanced)):
        letters = lw[i] + rw[j]
        if photon_overflow(letters):
            continue
        engine = evaluate(vev(word(*(LADDERS[x] for x in letters))))
        assert abs(engine - table[i, j]) < 1e-12, letters
        compared += 1
    rng = np.random.default_rng(length)
    unbalanced = np.argwhere(~balanced)
    for i, j in unbalanced[rng.choice(len(unbalanced), 3000, replace=False)]:
        assert evaluate(vev(word(*(LADDERS[x] for x in lw[i] + rw[j])))) == 0
    assert compared > 0 if length % 2 == 0 else compared == 0
