import pytest

from conftest import COMPATIBLE, preset
from semigroup_gka.exceptions import ConfigError, ProtocolError, UnsupportedCapabilityError
from semigroup_gka.protocols import (
    BROADCAST,
    GSAP3,
    GSAP4,
    PROTOCOLS,
    MessageBus,
    ProtocolMessage,
    check_compatible,
    dh_exchange,
    gsap1_run,
    gsap2_run,
    gsap3_run,
    gsap3p_run,
    gsap4_run,
    run_protocol,
)

SEEDS = range(50)

MESSAGES = {
    "gsap1": lambda n: 2 * (n - 1),
    "gsap2": lambda n: n,
    "gsap3": lambda n: 2 * n - 1,
    "gsap3p": lambda n: 2 * n - 1,
    "gsap4": lambda n: n + 1,
}

ROUNDS = {
    "gsap1": lambda n: 2 * (n - 1),
    "gsap2": lambda n: n,
    "gsap3": lambda n: n + 1,
    "gsap3p": lambda n: n + 1,
    "gsap4": lambda n: 2,
}


def sizes(protocol):
    return range(PROTOCOLS[protocol].min_n, 7)


# payload length of every message, in transcript order
PAYLOADS = {
    "gsap1": lambda n: list(range(1, n)) + list(range(n - 1, 0, -1)),
    "gsap2": lambda n: [i + 1 for i in range(1, n)] + [n],
    "gsap3": lambda n: [1] * (n - 1) + [1] * (n - 1) + [n],
    "gsap3p": lambda n: [1] * (n - 1) + [1] * (n - 1) + [n],
    "gsap4": lambda n: [1] * n + [n - 1],
}

PAYLOAD_TOTAL = {
    "gsap1": lambda n: n * (n - 1),
    "gsap2": lambda n: (n - 1) * (n + 2) // 2 + n,
    "gsap3": lambda n: 3 * n - 2,
    "gsap3p": lambda n: 3 * n - 2,
    "gsap4": lambda n: 2 * n - 1,
}


class TestKeyAgreement:
    @pytest.mark.parametrize("protocol,backend_name", COMPATIBLE)
    def test_every_member_derives_the_oracle_key(self, protocol, backend_name):
        backend = preset(backend_name)
        for n in sizes(protocol):
            for seed in SEEDS:
                result = run_protocol(protocol, backend, n, seed)
                assert sorted(result.keys) == list(range(1, n + 1))
                assert result.agreed, (n, seed)
                assert result.key == result.oracle_key, (n, seed)

    def test_oracle_is_product_of_all_private_elements(self, toy):
        for protocol in ("gsap1", "gsap2", "gsap3", "gsap3p"):
            result = run_protocol(protocol, toy, 4, seed=3)
            privates = [p.private_g for p in result.session.participants.values()]
            assert result.oracle_key == toy.act(toy.compose_all(privates), toy.base())

    @pytest.mark.parametrize("run", [gsap1_run, gsap2_run, gsap3_run, gsap3p_run])
    def test_fixed_vector(self, run, toy, g, s):
        assert run(toy, 3, private_elements=g(2, 3, 5)).key == s(9)

    def test_gsap4_fixed_vector(self, toy, g, s):
        result = gsap4_run(toy, 4, j=1, private_elements=g(2, 3, 5, 7))
        assert result.key == s(9)
        assert result.session.actor == 1

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_gsap4_any_broadcaster(self, toy, j):
        result = gsap4_run(toy, 3, j=j, seed=11)
        assert result.agreed and result.key == result.oracle_key

    def test_two_party_gsap1_matches_diffie_hellman(self, toy):
        result = gsap1_run(toy, 2, seed=8)
        a, b = (result.session.member(i).private_g for i in (1, 2))
        exchange = dh_exchange(toy, a, b)
        assert exchange.agreed
        assert exchange.alice_shared == result.key

    def test_runs_are_deterministic(self, desk):
        first = gsap2_run(desk, 5, seed="abc")
        second = gsap2_run(desk, 5, seed="abc")
        assert first.transcript == second.transcript
        assert first.key == second.key
        assert gsap2_run(desk, 5, seed="abd").key != first.key


class TestTranscriptShape:
    @pytest.mark.parametrize("protocol", sorted(PROTOCOLS))
    def test_message_and_round_counts(self, protocol, toy):
        for n in sizes(protocol):
            result = run_protocol(protocol, toy, n, seed=1)
            assert len(result.transcript) == MESSAGES[protocol](n)
            assert len(result.transcript.rounds(0)) == ROUNDS[protocol](n)

    @pytest.mark.parametrize("protocol", sorted(PROTOCOLS))
    def test_round_barrier_order(self, protocol, toy):
        messages = run_protocol(protocol, toy, 5, seed=2).transcript.messages
        assert [m.seq for m in messages] == list(range(1, len(messages) + 1))
        order = [(m.epoch, m.round) for m in messages]
        assert order == sorted(order)

    @pytest.mark.parametrize("protocol", sorted(PROTOCOLS))
    def test_payload_sizes(self, protocol, toy):
        for n in sizes(protocol):
            messages = run_protocol(protocol, toy, n, seed=3).transcript.messages
            assert [len(m.payload) for m in messages] == PAYLOADS[protocol](n)
            assert sum(len(m.payload) for m in messages) == PAYLOAD_TOTAL[protocol](n)

    @pytest.mark.parametrize("n", range(2, 7))
    def test_upflow_from_u_i_carries_closed_form_lengths(self, n, toy):
        for protocol, expected in (("gsap1", lambda i: i), ("gsap2", lambda i: i + 1)):
            upflow = [m for m in run_protocol(protocol, toy, n, seed=n).transcript.messages
                      if m.step == "upflow"]
            assert [m.sender for m in upflow] == list(range(1, n))
            for message in upflow:
                assert len(message.payload) == expected(message.sender)

    @pytest.mark.parametrize("n", range(3, 7))
    def test_gsap4_second_round_has_one_value_per_other_member(self, n, toy):
        j = 2
        messages = gsap4_run(toy, n, j=j, seed=n).transcript.messages
        d_values = messages[-1]
        assert d_values.sender == j
        assert d_values.slots == tuple(i for i in range(1, n + 1) if i != j)
        assert len(d_values.payload) == n - 1

    def test_only_the_gsap3_prime_reply_carries_aux(self, toy):
        for protocol in ("gsap3", "gsap3p"):
            messages = run_protocol(protocol, toy, 4, seed=1).transcript.messages
            carrying = [m.step for m in messages if m.aux is not None]
            assert carrying == (["reply"] if protocol == "gsap3p" else [])

    def test_gsap4_has_two_broadcast_rounds(self, toy):
        result = gsap4_run(toy, 6, seed=4)
        first, second = result.transcript.rounds(0)
        assert all(m.is_broadcast for m in result.transcript.messages)
        assert [m.step for m in result.transcript.messages if m.round == second] == ["d-values"]

    def test_gsap2_broadcast_has_one_slot_per_member(self, toy):
        broadcast = gsap2_run(toy, 4, seed=0).transcript.messages[-1]
        assert broadcast.recipient == BROADCAST
        assert broadcast.slots == (1, 2, 3, 4)

    def test_gsap3_prime_reply_publishes_aux(self, toy, g):
        result = gsap3p_run(toy, 3, private_elements=g(2, 3, 5))
        reply = result.transcript.messages[-1]
        assert reply.step == "reply"
        assert reply.aux == toy.act(g(5), toy.base())
        assert len(reply.payload) == 3


class TestValidation:
    def test_gsap3_needs_inverses(self, epm_toy):
        with pytest.raises(UnsupportedCapabilityError):
            GSAP3(epm_toy)
        with pytest.raises(UnsupportedCapabilityError):
            check_compatible("gsap3", epm_toy)

    def test_gsap3_prime_needs_a_group(self, rsa):
        with pytest.raises(UnsupportedCapabilityError):
            run_protocol("gsap3p", rsa, 3)

    def test_group_size(self, toy):
        with pytest.raises(ProtocolError):
            gsap1_run(toy, 1)
        with pytest.raises(ProtocolError):
            gsap4_run(toy, 2)

    def test_gsap4_broadcaster_range(self, toy):
        with pytest.raises(ProtocolError):
            GSAP4(toy, j=5).run(4)

    def test_private_element_count(self, toy, g):
        with pytest.raises(ProtocolError):
            gsap2_run(toy, 3, private_elements=g(2, 3))

    def test_key_is_set_once_per_epoch(self, toy, s):
        result = gsap2_run(toy, 3, seed=4)
        user = result.session.member(2)
        with pytest.raises(ProtocolError):
            user.set_key(0, s(9))
        assert user.derived_key == result.key
        user.set_key(1, s(9))
        with pytest.raises(ProtocolError):
            user.set_key(1, s(9))
        with pytest.raises(ProtocolError):
            user.set_key(0, s(9))

    def test_unknown_protocol(self, toy):
        with pytest.raises(ConfigError):
            run_protocol("gsap9", toy, 3)


class TestMessageBus:
    def message(self, round_no=1, sender=1, recipient=2, payload=()):
        return ProtocolMessage("test", 0, round_no, sender, recipient, tuple(payload), step="x")

    def test_messages_wait_for_the_round_to_close(self):
        bus = MessageBus({}, [1, 2, 3])
        bus.begin_round(0, 1)
        bus.send(self.message())
        assert bus.receive(2) == []
        assert len(bus.pending()) == 1
        delivered = bus.end_round()
        assert [m.seq for m in delivered] == [1]
        assert len(bus.receive(2)) == 1
        assert len(bus.transcript) == 1

    def test_broadcast_skips_the_sender(self):
        bus = MessageBus({}, [1, 2, 3])
        bus.deliver_round(0, 1, [self.message(recipient=BROADCAST)])
        assert bus.receive(1) == []
        assert len(bus.receive(2)) == len(bus.receive(3)) == 1

    def test_send_outside_the_open_round(self):
        bus = MessageBus({}, [1, 2])
        with pytest.raises(ProtocolError):
            bus.send(self.message())
        bus.begin_round(0, 1)
        with pytest.raises(ProtocolError):
            bus.send(self.message(round_no=2))

    def test_rounds_only_move_forward(self):
        bus = MessageBus({}, [1, 2])
        bus.deliver_round(0, 2, [self.message(round_no=2)])
        with pytest.raises(ProtocolError):
            bus.begin_round(0, 1)
        with pytest.raises(ProtocolError):
            bus.begin_round(0, 2)
        bus.begin_round(1, 1)
        with pytest.raises(ProtocolError):
            bus.begin_round(1, 2)

    def test_unknown_parties(self):
        bus = MessageBus({}, [1, 2])
        bus.begin_round(0, 1)
        with pytest.raises(ProtocolError):
            bus.send(self.message(sender=7))
        with pytest.raises(ProtocolError):
            bus.send(self.message(recipient=7))

    def test_receive_one_insists_on_a_single_message(self):
        bus = MessageBus({}, [1, 2])
        bus.deliver_round(0, 1, [self.message(), self.message()])
        with pytest.raises(ProtocolError):
            bus.receive_one(2, "x")
