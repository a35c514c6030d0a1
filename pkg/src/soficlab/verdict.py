"""Three-valued verdicts shared by the period and decision modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

YES = "YES"
NO = "NO"
UNKNOWN = "UNKNOWN"

EXIT_CODES = {YES: 0, NO: 1, UNKNOWN: 2}


def jsonable(x):
    """Best-effort conversion of certificates to JSON-friendly values."""
    if hasattr(x, "to_dict"):
        return jsonable(x.to_dict())
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator, "approx": float(x)}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return x


@dataclass
class Verdict3:
    """YES with a certificate, NO with a witness, or UNKNOWN with the bound reached."""

    verdict: str
    witness: dict | None = None
    certificate: dict | None = None
    checked_up_to: int | None = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.verdict not in EXIT_CODES:
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == NO and not self.witness:
            raise ValueError("a NO verdict needs a witness")

    @classmethod
    def yes(cls, certificate=None, checked_up_to=None, notes=()):
        return cls(YES, None, certificate, checked_up_to, list(notes))

    @classmethod
    def no(cls, witness, checked_up_to=None, notes=()):
        return cls(NO, witness, None, checked_up_to, list(notes))

    @classmethod
    def unknown(cls, checked_up_to=None, notes=(), certificate=None):
        return cls(UNKNOWN, None, certificate, checked_up_to, list(notes))

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def __bool__(self):
        return self.verdict == YES

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witness": jsonable(self.witness),
                "certificate": jsonable(self.certificate),
                "checked_up_to": self.checked_up_to, "notes": list(self.notes)}


def conjunction(parts: list) -> Verdict3:
    """Combine named sub-verdicts: any NO wins, all YES gives YES, else UNKNOWN."""
    for name, v in parts:
        if v.verdict == NO:
            w = dict(v.witness)
            w.setdefault("condition", name)
            return Verdict3.no(w, v.checked_up_to, v.notes)
    cert = {name: v.certificate for name, v in parts}
    notes = [f"{name}: {n}" for name, v in parts for n in v.notes]
    if all(v.verdict == YES for _, v in parts):
        return Verdict3.yes(cert, notes=notes)
    open_ = [name for name, v in parts if v.verdict == UNKNOWN]
    return Verdict3.unknown(notes=notes + [f"undecided: {', '.join(open_)}"], certificate=cert)
