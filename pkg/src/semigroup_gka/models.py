from typing import Any, Dict, List, Optional, TypedDict, Union


class BackendDict(TypedDict, total=False):
    backend: str
    preset: str
    p: int
    q: int
    s: Any
    m: int
    M: List[List[int]]
    seed: int
    degree: int
    period_threshold: int
    period_cap: int


class EventDict(TypedDict, total=False):
    event: str
    actor: int
    index: int
    g_seed: int
    fresh_seed: int


class OutputsDict(TypedDict, total=False):
    transcript: str
    keys: str
    summary: str


class ScenarioDict(TypedDict, total=False):
    protocol: str
    backend: BackendDict
    n: int
    j: int
    c: int
    seed: int
    events: List[EventDict]
    outputs: OutputsDict


class EpochMarkerDict(TypedDict):
    epoch: int
    event: str
    first_seq: int


class TranscriptHeaderDict(TypedDict):
    format: int
    public_params: Dict[str, Any]
    epochs: List[EpochMarkerDict]


class TranscriptRecordDict(TypedDict):
    seq: int
    protocol: str
    epoch: int
    round: int
    step: str
    sender: int
    recipient: Union[int, str]
    slots: List[int]
    payload: List[str]
    aux: Optional[str]


class EpochSummaryDict(TypedDict):
    epoch: int
    event: str
    members: List[int]
    key: str
    oracle_key: str
    agreed: bool
    matches_oracle: bool
    messages: int


class SummaryDict(TypedDict):
    protocol: str
    backend: str
    n: int
    seed: Any
    transcript_hash: str
    epochs: List[EpochSummaryDict]
