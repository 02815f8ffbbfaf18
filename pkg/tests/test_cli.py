import json

import pytest

from semigroup_gka.cli import EXIT_CAPABILITY, EXIT_ERROR, EXIT_INVARIANT, EXIT_IO, EXIT_OK, main
from semigroup_gka.config import SEED_ENV
from semigroup_gka.protocols import BROADCAST, ProtocolMessage, Transcript, gsap2_run, gsap4_run
from semigroup_gka.rekeying import RekeyEvent, rekey
from semigroup_gka.transcript_io import export_keys, export_transcript
from semigroup_gka.utils.logger import LOG_LEVEL_ENV


@pytest.fixture(autouse=True)
def clean_env(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(SEED_ENV, raising=False)
    monkeypatch.delenv(LOG_LEVEL_ENV, raising=False)


QUICK = ["--protocol", "gsap2", "--preset", "toy-23", "--n", "3", "--seed", "1"]


class TestRun:
    def test_writes_every_output(self, tmp_path, capsys):
        code = main(["run", *QUICK, "--out", "out/t.jsonl", "--keys-out", "out/keys.json",
                     "--summary-out", "out/summary.json"])
        assert code == EXIT_OK
        for name in ("t.jsonl", "keys.json", "summary.json"):
            assert (tmp_path / "out" / name).exists()
        summary = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert summary["epochs"][0]["matches_oracle"]
        assert "✅ epoch 0 (setup)" in capsys.readouterr().out

    def test_scenario_file(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps({
            "protocol": "gsap3p", "backend": {"preset": "epm-toy"}, "n": 4, "seed": 2,
            "events": [{"event": "refresh"}],
        }))
        assert main(["run", "--config", str(path), "--summary-out", "summary.json"]) == EXIT_OK
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert [e["event"] for e in summary["epochs"]] == ["setup", "refresh"]

    def test_rekey_events(self, tmp_path):
        code = main(["rekey", *QUICK, "--event", "refresh", "--event", "leave:2", "--event", "join",
                     "--summary-out", "summary.json"])
        assert code == EXIT_OK
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert [e["members"] for e in summary["epochs"]][-1] == [1, 3, 4]

    def test_rekey_without_events(self):
        assert main(["rekey", *QUICK]) == EXIT_ERROR

    def test_unknown_event(self):
        assert main(["rekey", *QUICK, "--event", "merge"]) == EXIT_ERROR

    def test_missing_capability(self, tmp_path):
        code = main(["run", "--protocol", "gsap3", "--preset", "epm-toy", "--n", "3", "--out", "t.jsonl"])
        assert code == EXIT_CAPABILITY
        assert not (tmp_path / "t.jsonl").exists()

    def test_missing_scenario_file(self):
        assert main(["run", "--config", "nowhere.json"]) == EXIT_IO

    def test_seed_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "9")
        args = ["run", "--protocol", "gsap2", "--preset", "toy-23", "--n", "3"]
        assert main([*args, "--summary-out", "a.json"]) == EXIT_OK
        assert json.loads((tmp_path / "a.json").read_text())["seed"] == 9


class TestAdversaryCommands:
    def test_attack_gsap4(self, toy, tmp_path):
        result = gsap4_run(toy, 5, seed=3)
        export_transcript(result.transcript, tmp_path / "gsap4.jsonl")
        code = main(["attack-gsap4", "--transcript", "gsap4.jsonl", "--out", "attack.json"])
        assert code == EXIT_OK
        document = json.loads((tmp_path / "attack.json").read_text())
        assert document == {"feasible": True, "key": toy.s_hex(result.key)}

    def test_sap_brute(self, tmp_path):
        code = main(["sap-brute", "--preset", "toy-23", "--x", "000104", "--y", "000108",
                     "--bound", "10", "--out", "sap.json"])
        assert code == EXIT_OK
        assert json.loads((tmp_path / "sap.json").read_text()) == {"found": True, "g": "000107"}

    def test_label(self, toy, tmp_path):
        result = gsap2_run(toy, 4, seed=2)
        export_transcript(result.transcript, tmp_path / "t.jsonl")
        export_keys(result.session, tmp_path / "keys.json")
        code = main(["label", "--transcript", "t.jsonl", "--keys", "keys.json", "--out", "labels.json"])
        assert code == EXIT_OK
        labels = json.loads((tmp_path / "labels.json").read_text())
        assert labels[0]["label"] == "{∅}"

    def test_label_catches_a_leaked_key(self, toy, g, tmp_path):
        result = gsap2_run(toy, 3, private_elements=g(2, 3, 5))
        leaked = Transcript(toy.public_config())
        leaked.append(ProtocolMessage("gsap2", 0, 1, 1, BROADCAST, (result.key,), step="x", seq=1))
        export_transcript(leaked, tmp_path / "t.jsonl")
        export_keys(result.session, tmp_path / "keys.json")
        code = main(["label", "--transcript", "t.jsonl", "--keys", "keys.json"])
        assert code == EXIT_INVARIANT

    def test_label_only_reads_the_setup_epoch(self, toy, tmp_path):
        result = gsap2_run(toy, 3, seed=2)
        rekey(result, RekeyEvent.refresh())
        rekey(result, RekeyEvent.refresh())
        export_transcript(result.session.transcript, tmp_path / "t.jsonl")
        export_keys(result.session, tmp_path / "keys.json")
        args = ["label", "--transcript", "t.jsonl", "--keys", "keys.json"]
        assert main([*args, "--epoch", "2"]) == EXIT_ERROR
        assert main([*args, "--out", "labels.json"]) == EXIT_OK
        labels = json.loads((tmp_path / "labels.json").read_text())
        assert len(labels) == sum(len(m.payload) for m in result.session.transcript.for_epoch(0).messages)

    def test_tampered_transcript(self, tmp_path):
        (tmp_path / "t.jsonl").write_text("{not json\n")
        assert main(["attack-gsap4", "--transcript", "t.jsonl"]) == EXIT_IO

    def test_missing_transcript(self):
        assert main(["attack-gsap4", "--transcript", "missing.jsonl"]) == EXIT_IO


class TestElGamal:
    def test_decrypt_fixed_vector(self, tmp_path):
        code = main(["elgamal", "decrypt", "--preset", "toy-23", "--private", "000103",
                     "--c", "000110", "--d", "000112", "--out", "m.json"])
        assert code == EXIT_OK
        assert json.loads((tmp_path / "m.json").read_text()) == {"message": "000109"}

    def test_keygen_then_encrypt_then_decrypt(self, tmp_path):
        assert main(["elgamal", "keygen", "--preset", "desk-64", "--seed", "4", "--out", "k.json"]) == EXIT_OK
        pair = json.loads((tmp_path / "k.json").read_text())
        message = pair["public"]
        assert main(["elgamal", "encrypt", "--preset", "desk-64", "--seed", "5",
                     "--public", pair["public"], "--message", message, "--out", "ct.json"]) == EXIT_OK
        ct = json.loads((tmp_path / "ct.json").read_text())
        assert main(["elgamal", "decrypt", "--preset", "desk-64", "--private", pair["private"],
                     "--c", ct["c"], "--d", ct["d"], "--out", "m.json"]) == EXIT_OK
        assert json.loads((tmp_path / "m.json").read_text()) == {"message": message}

    def test_missing_arguments(self):
        assert main(["elgamal", "encrypt", "--preset", "toy-23"]) == EXIT_ERROR

    def test_needs_a_group(self):
        assert main(["elgamal", "keygen", "--preset", "toy-209"]) == EXIT_CAPABILITY
