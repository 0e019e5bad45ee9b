"""Grading lattices and finite windows.

Two grading modes are supported.  COARSE is the standard Z-grading with
deg(x_i) = 1.  FINE refines it to Z^n with deg(x_i) = e_i; every
construction in the package (derivative actions, duals, the Euler
operator) is homogeneous for the finer grading, and modules whose
Z-pieces are infinite dimensional still have finite pieces per
multidegree.

Labels are plain tuples of ints of length spec.rank (length 1 in COARSE
mode).  A Window is a finite lattice box plus per-axis vanishing flags:
"vanish_below[i]" asserts that every piece with label[i] < lo[i] is
zero, and dually for "vanish_above".  A label is *covered* when it lies
in the box or some flag forces it to be zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Iterator

Label = tuple[int, ...]


class Mode(Enum):
    COARSE = "coarse"
    FINE = "fine"


def ladd(a: Label, b: Label) -> Label:
    return tuple(x + y for x, y in zip(a, b))


def lsub(a: Label, b: Label) -> Label:
    return tuple(x - y for x, y in zip(a, b))


def lneg(a: Label) -> Label:
    return tuple(-x for x in a)


@dataclass(frozen=True)
class GradingSpec:
    """Variable count, grading mode and the derived lattice data."""

    n: int
    mode: Mode

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one variable")

    @property
    def rank(self) -> int:
        return 1 if self.mode is Mode.COARSE else self.n

    def zero(self) -> Label:
        return (0,) * self.rank

    def deg(self, i: int) -> Label:
        """Degree of the variable x_{i+1} in the grading lattice."""
        if not 0 <= i < self.n:
            raise ValueError(f"variable index {i} out of range")
        if self.mode is Mode.COARSE:
            return (1,)
        return tuple(1 if j == i else 0 for j in range(self.n))

    @property
    def d_total(self) -> Label:
        """Degree of the product x1*...*xn."""
        return (self.n,) if self.mode is Mode.COARSE else (1,) * self.n

    def eps(self, label: Label) -> int:
        """Total-degree functional on the lattice."""
        return sum(label)

    def monomial_degree(self, exponents: tuple[int, ...]) -> Label:
        if len(exponents) != self.n:
            raise ValueError("exponent vector of the wrong length")
        if self.mode is Mode.COARSE:
            return (sum(exponents),)
        return tuple(exponents)

    def check_label(self, label) -> Label:
        label = tuple(label)
        if len(label) != self.rank or not all(isinstance(v, int) for v in label):
            raise ValueError(f"bad label {label!r} for rank {self.rank}")
        return label

    # JSON helpers: COARSE labels render as plain ints, FINE as lists.
    def label_to_json(self, label: Label):
        return label[0] if self.mode is Mode.COARSE else list(label)

    def label_from_json(self, data) -> Label:
        if self.mode is Mode.COARSE:
            return (int(data),)
        return tuple(int(v) for v in data)

    def to_json_dict(self) -> dict:
        return {"n": self.n, "mode": self.mode.value}

    @classmethod
    def from_json_dict(cls, data: dict) -> "GradingSpec":
        return cls(int(data["n"]), Mode(data["mode"]))


@dataclass(frozen=True)
class Window:
    """A finite lattice box with per-axis vanishing flags."""

    lo: Label
    hi: Label
    vanish_below: tuple[bool, ...]
    vanish_above: tuple[bool, ...]

    def __post_init__(self):
        r = len(self.lo)
        if not (len(self.hi) == len(self.vanish_below) == len(self.vanish_above) == r):
            raise ValueError("window fields of mismatched rank")
        if any(l > h for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"empty window box {self.lo}..{self.hi}")

    @property
    def rank(self) -> int:
        return len(self.lo)

    def in_box(self, label: Label) -> bool:
        return all(l <= v <= h for v, l, h in zip(label, self.lo, self.hi))

    def flagged_zero(self, label: Label) -> bool:
        """True when some vanishing flag forces the piece at label to be zero."""
        for v, l, h, below, above in zip(label, self.lo, self.hi,
                                         self.vanish_below, self.vanish_above):
            if below and v < l:
                return True
            if above and v > h:
                return True
        return False

    def covered(self, label: Label) -> bool:
        return self.in_box(label) or self.flagged_zero(label)

    def box_labels(self) -> Iterator[Label]:
        """All box labels in lexicographic order."""
        return product(*(range(l, h + 1) for l, h in zip(self.lo, self.hi)))

    @property
    def fully_flagged(self) -> bool:
        return all(self.vanish_below) and all(self.vanish_above)

    @property
    def has_uncovered(self) -> bool:
        return not self.fully_flagged

    def translate(self, shift: Label) -> "Window":
        """Window of the shifted presentation M(shift): box moved by -shift."""
        return Window(lsub(self.lo, shift), lsub(self.hi, shift),
                      self.vanish_below, self.vanish_above)

    def intersect(self, other: "Window") -> "Window":
        lo = tuple(max(a, b) for a, b in zip(self.lo, other.lo))
        hi = tuple(min(a, b) for a, b in zip(self.hi, other.hi))
        below = tuple(a and b for a, b in zip(self.vanish_below, other.vanish_below))
        above = tuple(a and b for a, b in zip(self.vanish_above, other.vanish_above))
        return Window(lo, hi, below, above)

    def to_json_dict(self, spec: GradingSpec) -> dict:
        return {
            "lo": spec.label_to_json(self.lo),
            "hi": spec.label_to_json(self.hi),
            "vanish_below": list(self.vanish_below),
            "vanish_above": list(self.vanish_above),
        }

    @classmethod
    def from_json_dict(cls, data: dict, spec: GradingSpec) -> "Window":
        return cls(spec.label_from_json(data["lo"]),
                   spec.label_from_json(data["hi"]),
                   tuple(bool(b) for b in data["vanish_below"]),
                   tuple(bool(b) for b in data["vanish_above"]))
