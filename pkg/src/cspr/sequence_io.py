"""FASTA ingestion and basic nucleotide sequence utilities.

Bases are held as an uppercase ``str`` over ``ACGT`` and exposed as small
integer codes (A=0, C=1, G=2, T=3) for counting. With this coding the
complement of code ``c`` is ``3 - c``.
"""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Literal, TextIO

import numpy as np

ALPHABET = "ACGT"
Topology = Literal["circular", "linear"]

_COMPLEMENT = str.maketrans("ACGT", "TGCA")
_CODE_LUT = np.full(256, 255, dtype=np.uint8)
for _i, _b in enumerate(ALPHABET.encode()):
    _CODE_LUT[_b] = _i
_WS = re.compile(rb"\s+")
_NON_ACGT = re.compile(rb"[^ACGT]")


class Nucleotide(enum.IntEnum):
    A = 0
    C = 1
    G = 2
    T = 3

    @property
    def complement(self) -> "Nucleotide":
        return Nucleotide(3 - self.value)


class FastaFormatError(ValueError):
    """Raised for structurally malformed FASTA input."""


class SequenceContentError(ValueError):
    """Raised when a record contains a symbol outside ACGT under ``ambiguity='error'``."""

    def __init__(self, message: str, record_id: str | None = None, position: int | None = None):
        super().__init__(message)
        self.record_id = record_id
        self.position = position


@dataclass(frozen=True)
class IngestionPolicy:
    ambiguity: Literal["skip", "error"] = "skip"
    default_topology: Topology = "circular"

    def __post_init__(self):
        if self.ambiguity not in ("skip", "error"):
            raise ValueError(f"unknown ambiguity policy {self.ambiguity!r}")
        if self.default_topology not in ("circular", "linear"):
            raise ValueError(f"unknown topology {self.default_topology!r}")


@dataclass(frozen=True)
class Sequence:
    """An immutable nucleotide sequence over ``ACGT``.

    ``skipped_positions`` records how many non-ACGT symbols were dropped while
    reading the record.
    """

    id: str
    bases: str
    topology: Topology = "circular"
    skipped_positions: int = 0
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.topology not in ("circular", "linear"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if len(self.bases) < 2:
            raise SequenceContentError(
                f"sequence {self.id!r} has {len(self.bases)} bases; at least 2 are required",
                record_id=self.id,
            )
        if _NON_ACGT.search(self.bases.encode("ascii", "replace")):
            raise SequenceContentError(f"sequence {self.id!r} contains symbols outside ACGT", record_id=self.id)

    def __len__(self) -> int:
        return len(self.bases)

    def __str__(self) -> str:
        return self.bases

    @cached_property
    def codes(self) -> np.ndarray:
        """Read-only ``uint8`` array of base codes (A=0, C=1, G=2, T=3)."""
        out = _CODE_LUT[np.frombuffer(self.bases.encode("ascii"), dtype=np.uint8)]
        out.flags.writeable = False
        return out

    @classmethod
    def from_codes(cls, id: str, codes: np.ndarray, topology: Topology = "circular") -> "Sequence":
        codes = np.asarray(codes, dtype=np.uint8)
        if codes.size and codes.max() > 3:
            raise ValueError("codes must lie in 0..3")
        bases = np.frombuffer(b"ACGT", dtype=np.uint8)[codes].tobytes().decode("ascii")
        return cls(id=id, bases=bases, topology=topology)

    def rotate(self, k: int) -> "Sequence":
        """Circular rotation so that position ``k`` becomes position 0."""
        k %= len(self.bases)
        return Sequence(self.id, self.bases[k:] + self.bases[:k], self.topology, self.skipped_positions)


def gc_content(s: Sequence | str) -> float:
    bases = s.bases if isinstance(s, Sequence) else s.upper()
    if not bases:
        raise ValueError("GC content of an empty sequence is undefined")
    return (bases.count("G") + bases.count("C")) / len(bases)


def reverse_complement(s: Sequence) -> Sequence:
    return Sequence(
        id=s.id,
        bases=s.bases.translate(_COMPLEMENT)[::-1],
        topology=s.topology,
        skipped_positions=s.skipped_positions,
        description=s.description,
    )


def _finish_record(
    header: bytes, chunks: list[bytes], policy: IngestionPolicy
) -> Sequence:
    header_text = header.decode("utf-8", "replace").strip()
    rid, _, desc = header_text.partition(" ")
    raw = _WS.sub(b"", b"".join(chunks)).upper()
    skipped = 0
    bad = _NON_ACGT.search(raw)
    if bad is not None:
        if policy.ambiguity == "error":
            pos = bad.start()
            raise SequenceContentError(
                f"record {rid!r}: symbol {chr(raw[pos])!r} outside ACGT at position {pos}",
                record_id=rid,
                position=pos,
            )
        cleaned = _NON_ACGT.sub(b"", raw)
        skipped = len(raw) - len(cleaned)
        raw = cleaned
    return Sequence(
        id=rid,
        bases=raw.decode("ascii"),
        topology=policy.default_topology,
        skipped_positions=skipped,
        description=desc.strip(),
    )


def iter_fasta(stream: BinaryIO | TextIO | Iterable, policy: IngestionPolicy | None = None) -> Iterator[Sequence]:
    """Lazily yield one :class:`Sequence` per FASTA record.

    Accepts binary or text streams (or any iterable of lines). CR/LF line
    endings and lowercase bases are tolerated.
    """
    policy = policy or IngestionPolicy()
    header: bytes | None = None
    chunks: list[bytes] = []
    for lineno, line in enumerate(stream, start=1):
        if isinstance(line, str):
            line = line.encode("utf-8")
        line = line.rstrip(b"\r\n")
        if line.startswith(b">"):
            if header is not None:
                yield _finish_record(header, chunks, policy)
            header, chunks = line[1:], []
        elif line.strip():
            if header is None:
                raise FastaFormatError(f"line {lineno}: sequence data before the first '>' header")
            chunks.append(line)
    if header is not None:
        yield _finish_record(header, chunks, policy)


def parse_fasta(stream: BinaryIO | TextIO | Iterable, policy: IngestionPolicy | None = None) -> list[Sequence]:
    return list(iter_fasta(stream, policy))


def read_fasta(path: str | Path, policy: IngestionPolicy | None = None) -> list[Sequence]:
    with open(path, "rb") as fh:
        return parse_fasta(fh, policy)


def write_fasta(sequences: Iterable[Sequence], stream: TextIO | None = None, width: int = 70) -> str | None:
    """Write records as FASTA; returns the text when ``stream`` is None."""
    own = stream is None
    out = io.StringIO() if own else stream
    for s in sequences:
        header = s.id if not s.description else f"{s.id} {s.description}"
        out.write(f">{header}\n")
        for i in range(0, len(s.bases), width):
            out.write(s.bases[i : i + width])
            out.write("\n")
    return out.getvalue() if own else None
