import pytest

from circuits.circuit import eval_word, gate_matrix
from exact.linalg import ExactMatrix
from exact.ring import I, ONE
from subgroups.factor import (FACTOR_GROUPS, NotInD, NotMember, decode_phase_function, factor, monomial_split)
from subgroups.normal_forms import (CNormal, CQDNormal, CQNormal, DNormal, EBlock, K0CDNormal, K0DNormal,
                                    PDNormal, PNormal, QDNormal, QNormal)


def _random_d(rng):
    return DNormal(tuple(int(v) for v in rng.integers(0, 4, 7)) + (int(rng.integers(0, 2)),))


def _random_q(rng):
    return QNormal(*(int(v) for v in rng.integers(0, 2, 4)))


def _random_c(rng):
    return CNormal(int(rng.integers(0, 4)), int(rng.integers(0, 3)), int(rng.integers(0, 2)))


def _random_e(rng):
    return EBlock(*(int(v) for v in rng.integers(0, 3, 4)))


def test_ccz_decodes_to_the_cubic_term():
    assert factor("D", gate_matrix("CCZ")) == DNormal.of(n7=1)
    assert factor("D", gate_matrix("CS02")) == DNormal.of(n6=1)
    assert factor("D", gate_matrix("i")) == DNormal.of(n0=1)


def test_odd_cubic_coefficient_is_outside_d():
    f = [0] * 7 + [1]
    with pytest.raises(NotInD):
        decode_phase_function(f)
    with pytest.raises(NotMember):
        factor("D", ExactMatrix.diagonal([ONE] * 7 + [I]))


def test_d_rejects_permutations():
    with pytest.raises(NotMember):
        factor("D", gate_matrix("X0"))


def test_q_and_c_generators():
    assert factor("Q", gate_matrix("X0")) == QNormal(a=1)
    assert factor("Q", gate_matrix("CCX0")) == QNormal(d=1)
    assert factor("C", gate_matrix("X1")) == CNormal(c4=1)
    assert factor("C", gate_matrix("CX12")) == CNormal(c2=1)


def test_group_mismatches_are_not_members():
    with pytest.raises(NotMember):
        factor("Q", gate_matrix("X1"))
    with pytest.raises(NotMember):
        factor("C", gate_matrix("X0"))
    with pytest.raises(NotMember):
        factor("P", gate_matrix("S0"))
    with pytest.raises(NotMember):
        factor("K0D", gate_matrix("K1"))
    with pytest.raises(NotMember):
        factor("PD", gate_matrix("K0"))


def test_wrong_shape_is_not_a_member():
    with pytest.raises(NotMember):
        factor("D", ExactMatrix.identity(4))


def test_unknown_group():
    with pytest.raises(ValueError):
        factor("K0W", gate_matrix("K0"))


@pytest.mark.parametrize("group,normal_forms", [("Q", [QNormal(a, b, c, d) for a in range(2) for b in range(2)
                                                        for c in range(2) for d in range(2)]),
                                                 ("C", CNormal.all())])
def test_exhaustive_round_trips(group, normal_forms):
    for nf in normal_forms:
        assert factor(group, eval_word(nf.word())) == nf


def test_d_round_trips(rng):
    for _ in range(100):
        d = _random_d(rng)
        assert factor("D", eval_word(d.word())) == d


def test_p_family_round_trips(tables, rng):
    for _ in range(40):
        c, q, d = _random_c(rng), _random_q(rng), _random_d(rng)
        p = PNormal(int(rng.integers(0, 105)), c, q)
        assert factor("P", eval_word(p.word(tables)), tables) == p
        assert factor("PD", eval_word(PDNormal(p, d).word(tables)), tables) == PDNormal(p, d)
        assert factor("CQ", eval_word(CQNormal(c, q).word()), tables) == CQNormal(c, q)
        assert factor("QD", eval_word(QDNormal(q, d).word()), tables) == QDNormal(q, d)
        cqd = CQDNormal(CQNormal(c, q), d)
        assert factor("CQD", eval_word(cqd.word()), tables) == cqd


def test_k0_blocks_round_trip(tables, rng):
    for _ in range(15):
        k = K0DNormal(_random_e(rng), _random_d(rng), _random_q(rng))
        assert factor("K0D", eval_word(k.word()), tables) == k
        kc = K0CDNormal(k, _random_c(rng))
        assert factor("K0CD", eval_word(kc.word()), tables) == kc


def test_single_k0():
    assert factor("K0D", gate_matrix("K0")) == K0DNormal(EBlock(e4=1))
    assert factor("K0CD", eval_word("K0 X1")) == K0CDNormal(K0DNormal(EBlock(e4=1)), CNormal(c4=1))


def test_w_normal_form_spells_a_shortest_word(tables):
    w = factor("W", gate_matrix("SWAP01"), tables)
    assert w.spelled == "SWAP01"
    assert eval_word(w.word()) == gate_matrix("SWAP01")


def test_monomial_split_puts_phases_on_the_right():
    m = eval_word("X0 CS01 SWAP12")
    perm, d = monomial_split(m)
    assert perm.is_permutation()
    assert perm @ eval_word(d.word()) == m


def test_every_factor_group_accepts_the_identity(tables):
    for group in FACTOR_GROUPS:
        nf = factor(group, ExactMatrix.identity(8), tables)
        assert len(nf.word(tables)) == 0


def test_d_tuple_lists_only_nonzero_exponents():
    assert DNormal.of(n7=1).to_dict() == {"n7": 1}
    assert DNormal.of(n1=2, n4=3).to_dict() == {"n1": 2, "n4": 3}
    assert DNormal.of().to_dict() == {}
