"""Best-known energy registry with record verification.

The registry is a UTF-8 TSV file (``#`` comments) with columns
``L, E_best, C_L, skew, F, RLE``. Rows are keyed by (L, skew): the skew row
holds the best skew-symmetric energy, the non-skew row the best energy found
without that constraint. ``F`` and ``RLE`` are optional.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .sequence import (
    BinarySequence,
    RleSolution,
    SkewHalf,
    energy,
    expand_skew,
    merit_from_energy,
    rle_decode,
    rle_encode,
)

COLUMNS = ("L", "E_best", "C_L", "skew", "F", "RLE")
MERIT_TOLERANCE = 5e-5


class RegistryFormatError(ValueError):
    pass


class RegistryRejected(ValueError):
    """A proposed record does not improve the stored best energy."""


@dataclass(frozen=True)
class RegistryEntry:
    L: int
    energy: int
    count: int
    skew: bool
    merit: float | None = None
    rle: RleSolution | None = None

    @property
    def key(self) -> tuple[int, bool]:
        return (self.L, self.skew)


def default_registry_path() -> Path:
    return Path(str(resources.files("labs") / "data" / "registry.tsv"))


def _parse_row(fields: list[str], lineno: int) -> RegistryEntry:
    if len(fields) != len(COLUMNS):
        raise RegistryFormatError(f"line {lineno}: expected {len(COLUMNS)} columns, got {len(fields)}")
    try:
        L = int(fields[0])
        e = int(fields[1])
        count = int(fields[2])
        skew = fields[3].strip()
        if skew not in ("0", "1"):
            raise ValueError(f"skew flag must be 0 or 1, got {skew!r}")
        merit = float(fields[4]) if fields[4].strip() else None
        rle = RleSolution.parse(fields[5]) if fields[5].strip() else None
    except ValueError as exc:
        raise RegistryFormatError(f"line {lineno}: {exc}") from exc
    if L < 1 or e < 0 or count < 0:
        raise RegistryFormatError(f"line {lineno}: negative or zero field")
    return RegistryEntry(L, e, count, skew == "1", merit, rle)


class BestKnownRegistry:
    def __init__(self, entries: dict[tuple[int, bool], RegistryEntry] | None = None):
        self.entries: dict[tuple[int, bool], RegistryEntry] = dict(entries or {})

    @classmethod
    def parse(cls, text: str) -> "BestKnownRegistry":
        entries = {}
        header_seen = False
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            fields = line.rstrip("\n").split("\t")
            if not header_seen and fields[0] == "L":
                if tuple(f.strip() for f in fields) != COLUMNS:
                    raise RegistryFormatError(f"line {lineno}: unexpected header {fields}")
                header_seen = True
                continue
            entry = _parse_row(fields, lineno)
            if entry.key in entries:
                raise RegistryFormatError(f"line {lineno}: duplicate row for L={entry.L}, skew={int(entry.skew)}")
            entries[entry.key] = entry
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path | None = None) -> "BestKnownRegistry":
        path = default_registry_path() if path is None else Path(path)
        return cls.parse(path.read_text(encoding="utf-8"))

    def dumps(self) -> str:
        buf = io.StringIO()
        buf.write("# Best-known LABS energies; see the package README for column meanings.\n")
        w = csv.writer(buf, delimiter="\t", lineterminator="\n")
        w.writerow(COLUMNS)
        for key in sorted(self.entries):
            e = self.entries[key]
            w.writerow([e.L, e.energy, e.count, int(e.skew),
                        "" if e.merit is None else f"{e.merit:.4f}",
                        "" if e.rle is None else str(e.rle)])
        return buf.getvalue()

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def get(self, L: int, skew: bool = True) -> RegistryEntry | None:
        return self.entries.get((L, skew))

    def target(self, L: int, skew: bool = True) -> int:
        """Best-known energy to use as a solver target.

        A non-skew search may use the skew value when no separate non-skew
        value is recorded, since every skew solution is also a candidate.
        """
        entry = self.get(L, skew)
        if entry is None and not skew:
            entry = self.get(L, True)
        if entry is None:
            raise KeyError(f"no best-known value for L={L} (skew={skew})")
        return entry.energy

    def propose(self, coord: SkewHalf | BinarySequence | str, skew: bool = True) -> RegistryEntry:
        """Commit a strictly better solution, or raise RegistryRejected."""
        if skew:
            half = coord if isinstance(coord, SkewHalf) else SkewHalf(str(coord))
            seq = expand_skew(half)
        else:
            seq = coord if isinstance(coord, BinarySequence) else BinarySequence(str(coord))
            half = None
        L = len(seq)
        e = energy(seq)
        old = self.get(L, skew)
        if old is not None and e >= old.energy:
            raise RegistryRejected(f"L={L}: energy {e} does not beat the stored {old.energy}")
        rle = None
        if half is not None:
            bits = half.bits
            if bits[0] == "1":
                # complement keeps the energy and gives the leading run of 0's
                bits = bits.translate(str.maketrans("01", "10"))
            rle = rle_encode(bits)
        entry = RegistryEntry(L, e, 1, skew, round(merit_from_energy(L, e), 4), rle)
        self.entries[entry.key] = entry
        return entry


@dataclass(frozen=True)
class RowCheck:
    L: int
    skew: bool
    ok: bool
    energy: int | None
    merit: float | None
    message: str = ""


@dataclass(frozen=True)
class VerificationReport:
    rows: tuple[RowCheck, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def failures(self) -> tuple[RowCheck, ...]:
        return tuple(r for r in self.rows if not r.ok)

    def lines(self) -> list[str]:
        out = []
        for r in self.rows:
            status = "PASS" if r.ok else "FAIL"
            detail = f"E={r.energy} F={r.merit:.4f}" if r.energy is not None else ""
            out.append(f"{status} L={r.L} skew={int(r.skew)} {detail} {r.message}".rstrip())
        return out


def check_entry(entry: RegistryEntry) -> RowCheck:
    if entry.rle is None:
        raise ValueError("entry has no solution to check")
    if entry.skew:
        lp = (entry.L + 1) // 2
        if entry.rle.implied_half_length != lp:
            return RowCheck(entry.L, True, False, None, None,
                            f"runs sum to {entry.rle.implied_half_length}, expected {lp}")
        seq = expand_skew(rle_decode(entry.rle, lp))
    else:
        if entry.rle.implied_half_length != entry.L:
            return RowCheck(entry.L, False, False, None, None,
                            f"runs sum to {entry.rle.implied_half_length}, expected {entry.L}")
        seq = BinarySequence(rle_decode(entry.rle).bits)
    e = energy(seq)
    f = merit_from_energy(entry.L, e)
    problems = []
    if e != entry.energy:
        problems.append(f"energy {e} != stored {entry.energy}")
    if entry.merit is not None and abs(f - entry.merit) > MERIT_TOLERANCE:
        problems.append(f"F {f:.6f} differs from stored {entry.merit}")
    return RowCheck(entry.L, entry.skew, not problems, e, f, "; ".join(problems))


def verify_registry(registry: BestKnownRegistry | str | Path | None = None) -> VerificationReport:
    """Decode and re-evaluate every entry that carries a solution."""
    if not isinstance(registry, BestKnownRegistry):
        registry = BestKnownRegistry.load(registry)
    rows = [check_entry(e) for _, e in sorted(registry.entries.items()) if e.rle is not None]
    return VerificationReport(tuple(rows))


def emit_merit_table(registry: BestKnownRegistry) -> str:
    """CSV of (L, E, F, 1/L), one row per L using its lowest recorded energy."""
    best: dict[int, int] = {}
    for entry in registry.entries.values():
        if entry.L not in best or entry.energy < best[entry.L]:
            best[entry.L] = entry.energy
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["L", "E", "F", "inv_L"])
    for L in sorted(best):
        e = best[L]
        w.writerow([L, e, f"{merit_from_energy(L, e):.4f}", f"{1.0 / L:.8f}"])
    return buf.getvalue()


def table_subset(registry: BestKnownRegistry, with_solution: bool = True) -> BestKnownRegistry:
    return BestKnownRegistry({k: e for k, e in registry.entries.items()
                              if (e.rle is not None) == with_solution})


__all__ = [
    "BestKnownRegistry",
    "RegistryEntry",
    "RegistryFormatError",
    "RegistryRejected",
    "RowCheck",
    "VerificationReport",
    "check_entry",
    "default_registry_path",
    "emit_merit_table",
    "table_subset",
    "verify_registry",
]
