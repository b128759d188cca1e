"""Bit-exact file containers: binary embedding files and JSONL alignments.

Embedding container layout (all integers little-endian):

    magic   4 bytes  b"EMB1"
    version u16      currently 1
    count   u32      number of sequences
    then per sequence:
        id_len  u16            UTF-8 byte length of the id
        id      id_len bytes
        rows    u32
        cols    u32
        data    rows*cols IEEE-754 float32, little-endian, row-major

Alignment files are JSON Lines: one object per utterance with the keys
``id, n_frames, n_tokens, alignment, score, method, valid`` where ``valid``
holds the ``monotonic`` and ``surjective`` flags. Items that failed upstream
are recorded as ``{"id": ..., "error": ...}`` lines so a partial run still
produces a complete, diffable file.
"""

from __future__ import annotations

import json
import struct
from typing import Iterable, Mapping

import numpy as np

from .errors import FormatError
from .sequences import EmbeddingSequence

__all__ = [
    "EMBEDDING_MAGIC",
    "EMBEDDING_VERSION",
    "write_embedding_file",
    "read_embedding_file",
    "alignment_record",
    "error_record",
    "write_alignment_file",
    "read_alignment_file",
    "read_alignment_map",
]

EMBEDDING_MAGIC = b"EMB1"
EMBEDDING_VERSION = 1


def write_embedding_file(
    path, sequences: Mapping[str, EmbeddingSequence] | Iterable[tuple[str, EmbeddingSequence]]
) -> None:
    """Write id/sequence pairs in their given order."""
    items = list(sequences.items()) if isinstance(sequences, Mapping) else list(sequences)
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<HI", EMBEDDING_VERSION, len(items)))
        for uid, seq in items:
            id_bytes = uid.encode("utf-8")
            if len(id_bytes) > 0xFFFF:
                raise FormatError(f"id too long ({len(id_bytes)} bytes): {uid[:32]}...")
            fh.write(struct.pack("<H", len(id_bytes)))
            fh.write(id_bytes)
            fh.write(struct.pack("<II", seq.length, seq.dim))
            fh.write(np.ascontiguousarray(seq.data, dtype="<f4").tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise FormatError(f"truncated file while reading {what}")
    return buf


def read_embedding_file(path) -> dict[str, EmbeddingSequence]:
    """Read an embedding container, preserving sequence order.

    Raises:
        FormatError: on a wrong magic, unsupported version, duplicate ids,
            or truncated payloads.
    """
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != EMBEDDING_MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}")
        version, count = struct.unpack("<HI", _read_exact(fh, 6, "header"))
        if version != EMBEDDING_VERSION:
            raise FormatError(f"unsupported version {version}")
        out: dict[str, EmbeddingSequence] = {}
        for k in range(count):
            (id_len,) = struct.unpack("<H", _read_exact(fh, 2, f"id length #{k}"))
            uid = _read_exact(fh, id_len, f"id #{k}").decode("utf-8")
            rows, cols = struct.unpack("<II", _read_exact(fh, 8, f"shape of {uid!r}"))
            payload = _read_exact(fh, rows * cols * 4, f"data of {uid!r}")
            data = np.frombuffer(payload, dtype="<f4").reshape(rows, cols)
            if uid in out:
                raise FormatError(f"duplicate id {uid!r}")
            out[uid] = EmbeddingSequence(data.copy())
        if fh.read(1):
            raise FormatError("trailing bytes after the declared sequence count")
    return out


def alignment_record(
    uid: str,
    assignment,
    n_tokens: int,
    score: float,
    method: str,
    monotonic: bool,
    surjective: bool,
) -> dict:
    """Build one alignment line in the documented key order."""
    indices = [int(a) for a in np.asarray(assignment)]
    return {
        "id": uid,
        "n_frames": len(indices),
        "n_tokens": int(n_tokens),
        "alignment": indices,
        "score": float(score),
        "method": method,
        "valid": {"monotonic": bool(monotonic), "surjective": bool(surjective)},
    }


def error_record(uid: str, message: str) -> dict:
    return {"id": uid, "error": message}


def write_alignment_file(path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def read_alignment_file(path) -> list[dict]:
    """Read JSONL alignment records; error lines are passed through as-is.

    Raises:
        FormatError: on malformed JSON or records violating the schema
            (missing id, alignment length disagreeing with ``n_frames``,
            token indices out of range).
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict) or "id" not in record:
                raise FormatError(f"{path}:{lineno}: record must be an object with an id")
            if "error" in record:
                records.append(record)
                continue
            if "alignment" not in record:
                raise FormatError(f"{path}:{lineno}: record has neither alignment nor error")
            alignment = record["alignment"]
            n_frames = record.get("n_frames", len(alignment))
            if len(alignment) != n_frames:
                raise FormatError(
                    f"{path}:{lineno}: alignment length {len(alignment)} != n_frames {n_frames}"
                )
            n_tokens = record.get("n_tokens")
            if n_tokens is not None and alignment and max(alignment) >= n_tokens:
                raise FormatError(
                    f"{path}:{lineno}: token index {max(alignment)} out of range for "
                    f"n_tokens {n_tokens}"
                )
            records.append(record)
    return records


def read_alignment_map(path) -> dict[str, dict]:
    """Alignment records keyed by id (error lines included)."""
    out: dict[str, dict] = {}
    for record in read_alignment_file(path):
        uid = record["id"]
        if uid in out:
            raise FormatError(f"duplicate alignment id {uid!r} in {path}")
        out[uid] = record
    return out
