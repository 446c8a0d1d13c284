import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.pipeline import make_pipeline

from bal3xor.sampler import GenConfig, XorClause, XorSkeleton, generate_batch, generate_instance
from bal3xor.streams import Stream, child_rng
from bal3xor.translate import (
    BLOCK_SIGNS,
    Clause3,
    CnfFormula,
    DimacsError,
    NotInWindowError,
    XorToCnf,
    cnf_file_name,
    encoding_length,
    format_dimacs,
    invert,
    parse_dimacs,
    read_dimacs,
    translate,
    write_dimacs,
    xor_to_block,
)

from .oracles import cnf_models, xor_models


@st.composite
def skeletons(draw, max_n=14, max_m=20):
    n = draw(st.integers(3, max_n))
    m = draw(st.integers(0, max_m))
    triples = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=3, max_size=3, unique=True),
                            min_size=m, max_size=m))
    rhs = draw(st.lists(st.integers(0, 1), min_size=m, max_size=m))
    return XorSkeleton(n, tuple(XorClause(tuple(sorted(t)), r) for t, r in zip(triples, rhs)))


def test_block_for_even_parity():
    lits = [c.to_dimacs() for c in xor_to_block(XorClause((0, 1, 2), 0))]
    # forbids the odd-parity points, ordered by sign triple
    assert lits == [[1, 2, -3], [1, -2, 3], [-1, 2, 3], [-1, -2, -3]]
    assert {tuple(c) for c in lits} == {(-1, 2, 3), (1, -2, 3), (1, 2, -3), (-1, -2, -3)}


def test_block_for_odd_parity_is_complement():
    even = {c.signs for c in xor_to_block(XorClause((0, 1, 2), 0))}
    odd = {c.signs for c in xor_to_block(XorClause((0, 1, 2), 1))}
    assert even | odd == set(itertools.product((0, 1), repeat=3))
    assert not even & odd
    assert list(BLOCK_SIGNS[1]) == sorted(BLOCK_SIGNS[1])


@pytest.mark.parametrize("rhs", [0, 1])
def test_block_has_exactly_the_xor_models(rhs):
    block = xor_to_block(XorClause((0, 1, 2), rhs))
    models = [a for a in itertools.product((0, 1), repeat=3) if all(c.satisfied_by(a) for c in block)]
    assert len(models) == 4
    assert all(sum(a) % 2 == rhs for a in models)


def test_empty_instance():
    psi = translate(XorSkeleton(5, ()))
    assert psi.m_prime == 0 and psi.n == 5
    assert invert(psi) == XorSkeleton(5, ())


def test_label_equality_exhaustive(rng):
    for label in (0, 1, 1, 0):
        inst = generate_instance(12, 14, label, rng)
        psi = translate(inst)
        cnf = cnf_models(12, [c.to_dimacs() for c in psi.clauses])
        xor = xor_models(12, [(c.vars, c.rhs) for c in inst.clauses])
        assert np.array_equal(cnf, xor)
        assert bool(cnf.any()) == bool(label)


def test_size_accounting(rng):
    inst = generate_instance(250, 251, 1, rng)
    psi = translate(inst)
    assert psi.m_prime == 1004 == 4 * inst.m
    assert psi.n == inst.n
    # N' / N is a fixed constant: 4 clauses of 3 indices vs 1 clause of 3 indices
    assert encoding_length(250, 4 * 251) == 4 * encoding_length(250, 251)
    assert encoding_length(60, 61) == 366 and encoding_length(150, 151) == 1208


@settings(max_examples=200, deadline=None)
@given(skeletons())
def test_round_trip_is_identity(phi):
    psi = translate(phi)
    assert invert(psi) == phi
    assert translate(invert(psi)) == psi
    assert psi.m_prime == 4 * phi.m


@settings(max_examples=100, deadline=None)
@given(skeletons(max_n=10, max_m=8))
def test_translation_preserves_models(phi):
    psi = translate(phi)
    assert np.array_equal(cnf_models(phi.n, [c.to_dimacs() for c in psi.clauses]),
                          xor_models(phi.n, [(c.vars, c.rhs) for c in phi.clauses]))


def test_distinct_instances_have_distinct_images():
    # injectivity on the full slice n=4, m=2 (all clause pairs and rhs vectors)
    triples = list(itertools.combinations(range(4), 3))
    seen = {}
    for t1, t2 in itertools.product(triples, repeat=2):
        for r1, r2 in itertools.product((0, 1), repeat=2):
            phi = XorSkeleton(4, (XorClause(t1, r1), XorClause(t2, r2)))
            psi = translate(phi)
            assert psi not in seen
            seen[psi] = phi
    assert len(seen) == 16 * 4


def test_invert_hand_built_block():
    psi = parse_dimacs("p cnf 3 4\n-1 2 3 0\n1 -2 3 0\n1 2 -3 0\n-1 -2 -3 0\n")
    # clause order inside the block is canonicalised before reading
    canonical = CnfFormula(3, sorted(psi.clauses, key=lambda c: c.signs))
    assert invert(canonical) == XorSkeleton(3, (XorClause((0, 1, 2), 0),))


def test_invert_rejects_three_patterns():
    good = translate(XorSkeleton(4, (XorClause((0, 1, 2), 0), XorClause((1, 2, 3), 1))))
    bad = list(good.clauses)
    bad[1] = bad[0]
    with pytest.raises(NotInWindowError) as err:
        invert(CnfFormula(4, bad))
    assert err.value.block == 0


def test_invert_rejects_mixed_triples_and_counts():
    good = translate(XorSkeleton(4, (XorClause((0, 1, 2), 0), XorClause((1, 2, 3), 1))))
    mixed = list(good.clauses)
    mixed[5] = Clause3((0, 2, 3), mixed[5].signs)
    with pytest.raises(NotInWindowError) as err:
        invert(CnfFormula(4, mixed))
    assert err.value.block == 1
    with pytest.raises(NotInWindowError):
        invert(CnfFormula(4, good.clauses[:7]))


def test_single_sign_flip_leaves_window():
    psi = translate(XorSkeleton(5, (XorClause((0, 2, 4), 1),)))
    for i in range(4):
        for pos in range(3):
            clauses = list(psi.clauses)
            signs = list(clauses[i].signs)
            signs[pos] ^= 1
            clauses[i] = Clause3(clauses[i].vars, tuple(signs))
            with pytest.raises(NotInWindowError):
                invert(CnfFormula(5, clauses))


# --- DIMACS -----------------------------------------------------------------

def test_dimacs_empty_and_literal_format():
    assert format_dimacs(CnfFormula(0, ())) == "p cnf 0 0\n"
    assert Clause3((0, 1, 2), (1, 0, 0)).to_dimacs() == [-1, 2, 3]


def test_dimacs_header_and_name():
    inst = generate_batch(GenConfig(9, 11, 2, master_seed=8))[1]
    text = format_dimacs(translate(inst))
    lines = text.splitlines()
    assert lines[:7] == ["c n=9", "c m=11", "c m_prime=44", "c seed=8", "c rep=1",
                         f"c label={inst.label}", f"c tprime={inst.corank}"]
    assert lines[7] == "p cnf 9 44"
    assert all(line.endswith(" 0") for line in lines[8:])
    assert cnf_file_name(9, 1) == "bal3xor_n9_rep001.cnf"


def test_dimacs_round_trip_bytes(tmp_path):
    for inst in generate_batch(GenConfig(20, 26, 6, master_seed=2)):
        psi = translate(inst)
        path = tmp_path / cnf_file_name(inst.n, inst.rep)
        write_dimacs(psi, path)
        back = read_dimacs(path)
        assert back == psi and dict(back.meta) == dict(psi.meta)
        again = tmp_path / "again.cnf"
        write_dimacs(back, again)
        assert again.read_bytes() == path.read_bytes()


def test_dimacs_without_comments():
    psi = parse_dimacs("p cnf 3 4\n1 2 -3 0\n1 -2 3 0\n-1 2 3 0\n-1 -2 -3 0\n")
    assert invert(psi) == XorSkeleton(3, (XorClause((0, 1, 2), 0),))


@pytest.mark.parametrize("text, lineno", [
    ("p cnf 3 1\n1 2 x 0\n", 2),
    ("1 2 3 0\np cnf 3 1\n", 1),
    ("p cnf 3 1\n1 2 4 0\n", 2),
    ("p cnf 3\n", 1),
    ("p cnf 3 1\np cnf 3 1\n", 2),
])
def test_dimacs_errors_carry_line_numbers(text, lineno):
    with pytest.raises(DimacsError) as err:
        parse_dimacs(text)
    assert err.value.lineno == lineno


@pytest.mark.parametrize("text", [
    "p cnf 3 2\n1 2 3 0\n",
    "p cnf 3 1\n1 2 3\n",
    "c nothing\n",
    "p cnf 3 1\n1 2 0\n",
    "p cnf 3 1\n2 1 3 0\n",
])
def test_dimacs_structural_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


# --- estimator --------------------------------------------------------------

def test_transformer_round_trip():
    batch = generate_batch(GenConfig(10, 13, 4, master_seed=1))
    enc = XorToCnf()
    cnfs = enc.fit_transform(batch)
    assert [c.m_prime for c in cnfs] == [52] * 4
    back = enc.inverse_transform(cnfs)
    assert back == [x.skeleton() for x in batch]


def test_transformer_in_pipeline():
    phis = [XorSkeleton(4, (XorClause((0, 1, 3), 1),))]
    pipe = make_pipeline(XorToCnf())
    assert pipe.fit(phis).transform(phis)[0] == translate(phis[0])


def test_transformer_validate_flags_non_canonical():
    psi = translate(XorSkeleton(3, (XorClause((0, 1, 2), 0),)))
    shuffled = CnfFormula(3, psi.clauses[::-1])
    with pytest.raises(NotInWindowError):
        XorToCnf().inverse_transform([shuffled])


def test_many_random_round_trips():
    rng = child_rng(5, Stream.AUX)
    for _ in range(300):
        n = int(rng.integers(3, 40))
        m = int(rng.integers(0, 60))
        triples = [tuple(sorted(rng.choice(n, 3, replace=False).tolist())) for _ in range(m)]
        phi = XorSkeleton(n, tuple(XorClause(t, int(rng.integers(0, 2))) for t in triples))
        assert invert(parse_dimacs(format_dimacs(translate(phi)))) == phi
