import json

import pytest

from conftest import preset
from semigroup_gka.adversary import attack_gsap4
from semigroup_gka.exceptions import TranscriptFormatError
from semigroup_gka.protocols import Transcript, gsap2_run, gsap3p_run, gsap4_run, run_protocol
from semigroup_gka.rekeying import RekeyEvent, rekey
from semigroup_gka.transcript_io import (
    dumps_transcript,
    export_keys,
    export_transcript,
    import_keys,
    import_transcript,
    loads_transcript,
    transcript_hash,
)


class TestRoundTrip:
    @pytest.mark.parametrize("protocol,backend_name", [
        ("gsap1", "toy-23"), ("gsap2", "epm-toy"), ("gsap3", "toy-209"),
        ("gsap3p", "epm-desk"), ("gsap4", "desk-64"),
    ])
    def test_export_then_import(self, protocol, backend_name, tmp_path):
        result = run_protocol(protocol, preset(backend_name), 4, seed=1)
        path = export_transcript(result.session.transcript, tmp_path / "t.jsonl")
        assert import_transcript(path) == result.session.transcript

    def test_epochs_survive(self, toy, tmp_path):
        result = gsap3p_run(toy, 4, seed=2)
        rekey(result, RekeyEvent.refresh())
        rekey(result, RekeyEvent.leave(1))
        transcript = result.session.transcript
        loaded = import_transcript(export_transcript(transcript, tmp_path / "t.jsonl"))
        assert loaded.epoch_markers == [
            {"epoch": 0, "event": "setup", "first_seq": 1},
            {"epoch": 1, "event": "refresh", "first_seq": 8},
            {"epoch": 2, "event": "leave(1)", "first_seq": 9},
        ]
        assert loaded.for_epoch(1) == transcript.for_epoch(1)

    def test_empty_transcript(self, toy):
        transcript = Transcript(toy.public_config())
        text = dumps_transcript(transcript)
        assert text.count("\n") == 1
        assert loads_transcript(text) == transcript

    def test_canonical_layout(self, toy, g):
        result = gsap2_run(toy, 2, private_elements=g(2, 3))
        header, first, second = dumps_transcript(result.transcript).splitlines()
        assert json.loads(header) == {
            "epochs": [{"epoch": 0, "event": "setup", "first_seq": 1}],
            "format": 1,
            "public_params": {"backend": "modexp-prime", "p": 23, "q": 11, "s": 4},
        }
        assert first == (
            '{"aux":null,"epoch":0,"payload":["000104","000110"],"protocol":"gsap2",'
            '"recipient":2,"round":1,"sender":1,"seq":1,"slots":[],"step":"upflow"}'
        )
        assert json.loads(second)["recipient"] == "broadcast"

    def test_exported_gsap4_transcript_feeds_the_attack(self, toy, tmp_path):
        result = gsap4_run(toy, 5, seed=6)
        path = export_transcript(result.transcript, tmp_path / "gsap4.jsonl")
        attack = attack_gsap4(import_transcript(path))
        assert attack.feasible and attack.key == result.key


class TestHash:
    def test_hash_is_a_function_of_the_run(self, desk):
        first = transcript_hash(gsap2_run(desk, 4, seed=1).transcript)
        assert first == transcript_hash(gsap2_run(desk, 4, seed=1).transcript)
        assert first != transcript_hash(gsap2_run(desk, 4, seed=2).transcript)
        assert len(first) == 64


class TestMalformed:
    def lines(self, toy):
        return dumps_transcript(gsap2_run(toy, 3, seed=0).transcript).splitlines()

    def test_bad_json(self, toy):
        lines = self.lines(toy)
        lines[2] = "{not json"
        with pytest.raises(TranscriptFormatError) as info:
            loads_transcript("\n".join(lines))
        assert info.value.line == 3

    def test_missing_field(self, toy):
        lines = self.lines(toy)
        record = json.loads(lines[1])
        del record["payload"]
        lines[1] = json.dumps(record)
        with pytest.raises(TranscriptFormatError) as info:
            loads_transcript("\n".join(lines))
        assert (info.value.line, info.value.field) == (2, "payload")

    def test_element_outside_s(self, toy):
        lines = self.lines(toy)
        record = json.loads(lines[1])
        record["payload"][0] = "000105"
        lines[1] = json.dumps(record)
        with pytest.raises(TranscriptFormatError) as info:
            loads_transcript("\n".join(lines))
        assert info.value.field == "payload"

    def test_sequence_must_increase(self, toy):
        lines = self.lines(toy)
        lines[1], lines[2] = lines[2], lines[1]
        with pytest.raises(TranscriptFormatError) as info:
            loads_transcript("\n".join(lines))
        assert info.value.field == "seq"

    def test_unknown_recipient(self, toy):
        lines = self.lines(toy)
        record = json.loads(lines[1])
        record["recipient"] = "everyone"
        lines[1] = json.dumps(record)
        with pytest.raises(TranscriptFormatError):
            loads_transcript("\n".join(lines))

    def test_header(self, toy):
        with pytest.raises(TranscriptFormatError):
            loads_transcript("")
        with pytest.raises(TranscriptFormatError):
            loads_transcript('{"format":2,"public_params":{},"epochs":[]}')
        with pytest.raises(TranscriptFormatError) as info:
            loads_transcript('{"format":1,"public_params":{"backend":"nope"},"epochs":[]}')
        assert info.value.field == "public_params"


class TestKeyFiles:
    def test_round_trip(self, toy, tmp_path):
        result = gsap2_run(toy, 3, seed=4)
        path = export_keys(result.session, tmp_path / "keys.json")
        keys = import_keys(path, toy)
        assert keys == {i: p.private_g for i, p in result.session.participants.items()}

    def test_epoch_zero_keys_survive_rekeying(self, toy, g, tmp_path):
        result = gsap2_run(toy, 3, private_elements=g(2, 3, 5))
        rekey(result, RekeyEvent.refresh(fresh_g=g(7)))
        rekey(result, RekeyEvent.leave(1, fresh_g=g(1)))
        path = export_keys(result.session, tmp_path / "keys.json")
        assert import_keys(path, toy) == {1: g(2), 2: g(3), 3: g(5)}
        current = import_keys(path, toy, epoch_0=False)
        assert current[1] == g(2)
        assert current[3] == g(2)

    def test_malformed_key_file(self, toy, tmp_path):
        path = tmp_path / "keys.json"
        path.write_text('{"private_keys": {}}')
        with pytest.raises(TranscriptFormatError):
            import_keys(path, toy)
