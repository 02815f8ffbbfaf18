import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from .backends.base import ActionBackend, SElement
from .config import ScenarioConfig
from .exceptions import InvariantViolation
from .models import EpochSummaryDict, ScenarioDict, SummaryDict
from .protocols import GSAP4, SessionResult, Transcript, run_protocol
from .rekeying import RekeyEvent, rekey
from .transcript_io import export_keys, export_transcript, transcript_hash

logger = logging.getLogger(__name__)


@dataclass
class ScenarioOutcome:
    """Every epoch of one scenario run."""
    backend: ActionBackend
    results: List[SessionResult]
    transcript: Transcript
    epoch_keys: Dict[int, SElement] = field(default_factory=dict)
    summary: Optional[SummaryDict] = None

    @property
    def final(self) -> SessionResult:
        return self.results[-1]

    @property
    def all_match_oracle(self) -> bool:
        return all(r.agreed and r.key == r.oracle_key for r in self.results)


class ScenarioRunner:
    """Runs a protocol and its rekey events, then checks every epoch against its oracle key."""

    def __init__(self, config: ScenarioConfig, strict: bool = True):
        self.config = config
        self.strict = strict
        # capability gate: raises before any message exists
        self.backend = config.build_backend()

    def run(self) -> ScenarioOutcome:
        config = self.config
        logger.info("Running %s n=%d on %s", config.protocol, config.n, self.backend.descriptor)
        result = run_protocol(config.protocol, self.backend, config.n, config.seed, j=config.j)
        session = result.session
        if config.c is not None and config.protocol != GSAP4.tag:
            session.actor = config.c
        events = config.rekey_events(self.backend)
        results = [result]
        for event in events:
            results.append(rekey(session, event))

        outcome = ScenarioOutcome(
            backend=self.backend,
            results=results,
            transcript=session.transcript,
            epoch_keys={r.epoch: r.key for r in results if r.agreed},
        )
        outcome.summary = self.summarize(outcome, [None] + events)
        if self.strict:
            self.check(outcome)
        self.write_outputs(outcome)
        return outcome

    def summarize(self, outcome: ScenarioOutcome, events: List[Optional[RekeyEvent]]) -> SummaryDict:
        backend = self.backend
        epochs: List[EpochSummaryDict] = []
        for result, event in zip(outcome.results, events):
            first = next(iter(result.keys.values()))
            epochs.append({
                "epoch": result.epoch,
                "event": "setup" if event is None else event.describe(),
                "members": sorted(result.keys),
                "key": backend.s_hex(first),
                "oracle_key": backend.s_hex(result.oracle_key),
                "agreed": result.agreed,
                "matches_oracle": result.agreed and first == result.oracle_key,
                "messages": len(result.transcript),
            })
        return {
            "protocol": self.config.protocol,
            "backend": backend.descriptor,
            "n": self.config.n,
            "seed": self.config.seed,
            "transcript_hash": transcript_hash(outcome.transcript, backend),
            "epochs": epochs,
        }

    def check(self, outcome: ScenarioOutcome) -> None:
        for result in outcome.results:
            if not result.agreed:
                raise InvariantViolation(f"epoch {result.epoch}: members derived different keys")
            if result.key != result.oracle_key:
                raise InvariantViolation(f"epoch {result.epoch}: the agreed key differs from the oracle key")

    def write_outputs(self, outcome: ScenarioOutcome) -> None:
        outputs = self.config.outputs
        if "transcript" in outputs:
            export_transcript(outcome.transcript, outputs["transcript"], self.backend)
        if "keys" in outputs:
            export_keys(outcome.final.session, outputs["keys"])
        if "summary" in outputs:
            path = Path(outputs["summary"])
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(json.dumps(outcome.summary, indent=2) + "\n", encoding="utf-8")


def run_scenario(config: Union[ScenarioConfig, ScenarioDict, str, Path],
                 strict: bool = True, default_seed: int = 0) -> ScenarioOutcome:
    """Run a scenario given as a ScenarioConfig, a dict or a JSON file path."""
    if isinstance(config, (str, Path)):
        config = ScenarioConfig.from_file(config, default_seed)
    elif isinstance(config, dict):
        config = ScenarioConfig.from_dict(config, default_seed)
    return ScenarioRunner(config, strict).run()
