"""Transcript files.

One JSON object per line: a header with the public parameters and epoch
markers, then one record per delivered message. Keys are sorted and
elements are hex encoded, so equal transcripts give equal bytes.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .backends import build_backend
from .backends.base import ActionBackend, GElement
from .exceptions import ConfigError, GkaError, TranscriptFormatError
from .models import TranscriptHeaderDict, TranscriptRecordDict
from .protocols.session import BROADCAST, GroupSession, ProtocolMessage, Transcript

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
PathLike = Union[str, Path]


def _dumps(document: Dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _record(backend: ActionBackend, message: ProtocolMessage) -> TranscriptRecordDict:
    return {
        "seq": message.seq,
        "protocol": message.protocol,
        "epoch": message.epoch,
        "round": message.round,
        "step": message.step,
        "sender": message.sender,
        "recipient": "broadcast" if message.is_broadcast else message.recipient,
        "slots": list(message.slots),
        "payload": [backend.s_hex(e) for e in message.payload],
        "aux": None if message.aux is None else backend.s_hex(message.aux),
    }


def dumps_transcript(transcript: Transcript, backend: Optional[ActionBackend] = None) -> str:
    if backend is None:
        backend = build_backend(transcript.public_params)
    header: TranscriptHeaderDict = {
        "format": FORMAT_VERSION,
        "public_params": transcript.public_params,
        "epochs": transcript.epoch_markers,
    }
    lines = [_dumps(header)]
    lines.extend(_dumps(_record(backend, m)) for m in transcript.messages)
    return "\n".join(lines) + "\n"


def transcript_hash(transcript: Transcript, backend: Optional[ActionBackend] = None) -> str:
    """SHA-256 of the canonical export."""
    return hashlib.sha256(dumps_transcript(transcript, backend).encode()).hexdigest()


def export_transcript(transcript: Transcript, path: PathLike,
                      backend: Optional[ActionBackend] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_transcript(transcript, backend), encoding="utf-8")
    logger.info("Wrote %d messages to %s", len(transcript), path)
    return path


def _field(document: Dict[str, Any], name: str, kind, line: int):
    if name not in document:
        raise TranscriptFormatError("missing field", line, name)
    value = document[name]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise TranscriptFormatError(f"expected {getattr(kind, '__name__', kind)}", line, name)
    return value


def _parse_message(backend: ActionBackend, document: Dict[str, Any], line: int) -> ProtocolMessage:
    recipient = _field(document, "recipient", (int, str), line)
    if isinstance(recipient, str):
        if recipient != "broadcast":
            raise TranscriptFormatError(f"unknown recipient '{recipient}'", line, "recipient")
        recipient = BROADCAST

    def element(text: Any, name: str):
        if not isinstance(text, str):
            raise TranscriptFormatError("expected a hex string", line, name)
        try:
            return backend.s_from_hex(text)
        except ValueError as e:
            raise TranscriptFormatError(str(e), line, name) from e

    payload = tuple(element(t, "payload") for t in _field(document, "payload", list, line))
    slots = _field(document, "slots", list, line)
    if not all(isinstance(s, int) for s in slots):
        raise TranscriptFormatError("slots must be integers", line, "slots")
    aux = document.get("aux")
    return ProtocolMessage(
        protocol=_field(document, "protocol", str, line),
        epoch=_field(document, "epoch", int, line),
        round=_field(document, "round", int, line),
        sender=_field(document, "sender", int, line),
        recipient=recipient,
        payload=payload,
        step=_field(document, "step", str, line),
        slots=tuple(slots),
        aux=None if aux is None else element(aux, "aux"),
        seq=_field(document, "seq", int, line),
    )


def loads_transcript(text: str) -> Transcript:
    """Parse an exported transcript; errors name the line and field."""
    documents = []
    for number, raw in enumerate(text.splitlines(), 1):
        if not raw.strip():
            continue
        try:
            document = json.loads(raw)
        except json.JSONDecodeError as e:
            raise TranscriptFormatError(f"invalid JSON: {e.msg}", number) from e
        if not isinstance(document, dict):
            raise TranscriptFormatError("expected a JSON object", number)
        documents.append((number, document))
    if not documents:
        raise TranscriptFormatError("missing header", 1)

    line, header = documents[0]
    if _field(header, "format", int, line) != FORMAT_VERSION:
        raise TranscriptFormatError(f"unsupported format {header['format']}", line, "format")
    params = _field(header, "public_params", dict, line)
    markers = _field(header, "epochs", list, line)
    try:
        backend = build_backend(params)
    except (ConfigError, GkaError, ValueError) as e:
        raise TranscriptFormatError(f"unusable public parameters: {e}", line, "public_params") from e

    transcript = Transcript(params, epoch_markers=markers)
    for line, document in documents[1:]:
        message = _parse_message(backend, document, line)
        try:
            transcript.append(message)
        except GkaError as e:
            raise TranscriptFormatError(str(e), line, "seq") from e
    return transcript


def import_transcript(path: PathLike) -> Transcript:
    return loads_transcript(Path(path).read_text(encoding="utf-8"))


# -- oracle key files -----------------------------------------------------------

def export_keys(session: GroupSession, path: PathLike) -> Path:
    """Write every private element the session ever used (test instrumentation)."""
    backend = session.backend
    users = {**session.departed, **session.participants}
    document = {
        "public_params": backend.public_config(),
        "private_keys": {str(i): backend.g_hex(u.private_g) for i, u in sorted(users.items())},
        "epoch_0_keys": {str(i): backend.g_hex(g) for i, g in sorted(_initial_keys(session).items())},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def _initial_keys(session: GroupSession) -> Dict[int, GElement]:
    return {int(name[1:]): g for name, g in session.initial_factors.items()}


def import_keys(path: PathLike, backend: ActionBackend, epoch_0: bool = True) -> Dict[int, GElement]:
    """Private elements by user index; `epoch_0` selects the ones used in the setup epoch."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
        table = document["epoch_0_keys" if epoch_0 else "private_keys"]
        return {int(i): backend.g_from_hex(text) for i, text in table.items()}
    except (KeyError, TypeError, ValueError) as e:
        raise TranscriptFormatError(f"malformed key file: {e}", field="private_keys") from e
