import pytest

from conftest import preset
from semigroup_gka.adversary import (
    CROSS_SUM,
    PURE,
    QUOTIENT,
    attack_gsap4,
    break_via_sap,
    contains_key,
    label_transcript,
    reduction_pair,
    solve_dhsap_via_sap,
    solve_sap_bruteforce,
)
from semigroup_gka.exceptions import FullSetLeakError, ProtocolError, UnlabeledElementError
from semigroup_gka.protocols import (
    BROADCAST,
    ProtocolMessage,
    Transcript,
    derive_rng,
    gsap2_run,
    gsap4_run,
    run_protocol,
)


def private_keys(result):
    return {i: p.private_g for i, p in result.session.participants.items()}


class TestLabels:
    @pytest.mark.parametrize("protocol", ["gsap1", "gsap2", "gsap3"])
    def test_pure_payloads_get_proper_subsets(self, protocol, desk):
        for n in range(2, 7):
            result = run_protocol(protocol, desk, n, seed=n)
            labels = label_transcript(result.transcript, desk, private_keys(result))
            assert len(labels) == sum(len(m.payload) for m in result.transcript.messages)
            everyone = frozenset(range(1, n + 1))
            for label in labels:
                assert label.form == PURE
                assert label.subset < everyone
            assert not contains_key(result.transcript, desk, result.key)

    def test_gsap2_upflow_starts_with_the_empty_set(self, desk):
        result = gsap2_run(desk, 3, seed=0)
        first = label_transcript(result.transcript, desk, private_keys(result))[0]
        assert first.subset == frozenset()
        assert first.describe() == "{∅}"

    def test_gsap3_prime_d_values_are_quotients(self, desk):
        result = run_protocol("gsap3p", desk, 4, seed=1)
        labels = label_transcript(result.transcript, desk, private_keys(result))
        d_labels = [
            label for label in labels
            if result.transcript.messages[label.seq - 1].step == "d-value"
        ]
        assert len(d_labels) == 3
        for label in d_labels:
            assert label.form == QUOTIENT
            assert label.subset == frozenset({1, 2, 3})
        reply = [label for label in labels if label.seq == len(result.transcript)]
        assert [label.form for label in reply] == [QUOTIENT] * 4 + [PURE]
        assert reply[3].pivot == 4 and reply[3].describe() == "Φ({4,4})^-1·Φ({1,2,3,4})"
        assert reply[4].subset == frozenset({4})
        assert not contains_key(result.transcript, desk, result.key)

    def test_gsap4_second_round_is_cross_sums(self, desk):
        result = gsap4_run(desk, 5, j=2, seed=3)
        labels = label_transcript(result.transcript, desk, private_keys(result))
        d_labels = [label for label in labels if label.seq == len(result.transcript)]
        assert len(d_labels) == 4
        assert all(label.form == CROSS_SUM and label.pivot == 2 for label in d_labels)
        assert all(len(label.subset) == 3 for label in d_labels)

    def fake(self, backend, element):
        transcript = Transcript(backend.public_config())
        transcript.append(ProtocolMessage("gsap2", 0, 1, 1, BROADCAST, (element,), step="x", seq=1))
        return transcript

    def test_full_set_leak(self, desk):
        result = gsap2_run(desk, 4, seed=5)
        with pytest.raises(FullSetLeakError) as info:
            label_transcript(self.fake(desk, result.key), desk, private_keys(result))
        assert info.value.seq == 1

    def test_unexplained_element(self, desk):
        result = gsap2_run(desk, 3, seed=5)
        stray = desk.act(desk.sample_g(derive_rng("stray", "x")), desk.base())
        with pytest.raises(UnlabeledElementError):
            label_transcript(self.fake(desk, stray), desk, private_keys(result))


class TestGsap4Attack:
    def test_recovers_the_key(self, toy):
        for n in range(3, 7):
            for seed in range(10):
                result = gsap4_run(toy, n, seed=seed)
                attack = attack_gsap4(result.transcript)
                assert attack.feasible
                assert attack.key == result.key

    def test_recovers_the_key_on_a_desk_group(self, desk):
        result = gsap4_run(desk, 5, j=1, seed=7)
        assert attack_gsap4(result.transcript, desk).key == result.key

    def test_recovers_the_key_on_the_matrix_ring(self, epm_toy):
        # |S| = 8, so n - 2 must be odd
        for n in (3, 5):
            result = gsap4_run(epm_toy, n, seed=2)
            assert attack_gsap4(result.transcript).key == result.key

    def test_infeasible_without_the_order(self, rsa):
        result = gsap4_run(rsa, 4, seed=1)
        attack = attack_gsap4(result.transcript)
        assert not attack.feasible
        assert attack.key is None
        assert "order" in attack.reason

    def test_infeasible_when_n_minus_two_shares_a_factor(self):
        result = gsap4_run(preset("toy-7"), 5, seed=1)
        attack = attack_gsap4(result.transcript)
        assert not attack.feasible
        assert "invertible" in attack.reason

    def test_order_given_out_of_band(self, toy):
        result = gsap4_run(toy, 4, seed=3)
        assert attack_gsap4(result.transcript, order=11).key == result.key

    def test_needs_a_gsap4_transcript(self, toy):
        with pytest.raises(ProtocolError):
            attack_gsap4(gsap2_run(toy, 3).transcript)

    def test_group_size_check(self, toy):
        with pytest.raises(ProtocolError):
            attack_gsap4(gsap4_run(toy, 4).transcript, n=5)


class TestSap:
    def test_bruteforce(self, toy, g, s):
        assert solve_sap_bruteforce(toy, s(4), s(8), bound=10) == g(7)

    def test_bound_is_respected(self, toy, s):
        assert solve_sap_bruteforce(toy, s(4), s(8), bound=5) is None

    def test_dhsap(self, toy, s):
        assert solve_dhsap_via_sap(toy, s(4), s(16), s(18), bound=10) == s(2)

    @pytest.mark.parametrize("protocol", ["gsap1", "gsap2", "gsap3"])
    def test_reduction_recovers_the_session_key(self, protocol, toy):
        for n in range(2, 6):
            for seed in range(5):
                result = run_protocol(protocol, toy, n, seed)
                assert break_via_sap(result.transcript, toy, bound=10) == result.key

    def test_reduction_on_the_matrix_ring(self, epm_toy):
        result = gsap2_run(epm_toy, 3, seed=4)
        key = break_via_sap(result.transcript, epm_toy, bound=64)
        assert key == result.key

    def test_reduction_pair_is_public(self, toy, g):
        result = run_protocol("gsap3", toy, 3, private_elements=g(2, 3, 5))
        c1, finalize_input = reduction_pair(result.transcript)
        assert c1 == toy.act(g(2), toy.base())
        assert toy.act(g(2), finalize_input) == result.key

    def test_no_reduction_for_gsap4(self, toy):
        with pytest.raises(ProtocolError):
            reduction_pair(gsap4_run(toy, 3).transcript)
