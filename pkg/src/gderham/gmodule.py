"""Finite-window degreewise presentations of graded Weyl-algebra modules.

A GradedPresentation records, for every grading label in a finite box,
the dimension of that piece together with the matrices of the
multiplication actions (x_i raises the label by deg(x_i)) and the
derivative actions (d_i lowers it by the same amount).  Vanishing flags
on the window extend the box by regions where all pieces are known to
be zero; everything else is honestly "uncovered" and any computation
that would need it raises UncoveredRegion.

Presentations are immutable after construction and all operations here
are pure, so per-label work can be farmed out to workers freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (IncompatibleSpecs, InhomogeneousOperator,
                     NotAMapOfPresentations, ShapeMismatch, UncoveredRegion)
from .grading import GradingSpec, Label, Mode, Window, ladd, lneg, lsub
from .linalg import ExactMatrix, block_diag
from .weyl import INHOMOGENEOUS, WeylOp, op_degree

ActionMaps = tuple[dict[Label, ExactMatrix], ...]


class GradedPresentation:
    """Degreewise model of a graded module over the Weyl algebra."""

    __slots__ = ("spec", "window", "_dims", "_x", "_dop", "basis_names")

    def __init__(self, spec: GradingSpec, window: Window,
                 dims: Mapping[Label, int],
                 x_actions: Sequence[Mapping[Label, ExactMatrix]],
                 dop_actions: Sequence[Mapping[Label, ExactMatrix]],
                 basis_names: Mapping[Label, Sequence[str]] | None = None):
        if window.rank != spec.rank:
            raise IncompatibleSpecs("window rank does not match grading rank")
        if len(x_actions) != spec.n or len(dop_actions) != spec.n:
            raise IncompatibleSpecs("need one action map per variable")
        self.spec = spec
        self.window = window
        clean_dims: dict[Label, int] = {}
        for label, dim in dims.items():
            label = spec.check_label(label)
            if dim < 0:
                raise ValueError(f"negative dimension at {label}")
            if not window.in_box(label):
                raise UncoveredRegion(f"piece dimension given outside the box: {label}")
            if dim:
                clean_dims[label] = dim
        self._dims = clean_dims
        self._x = self._clean_actions(x_actions, raise_label=True)
        self._dop = self._clean_actions(dop_actions, raise_label=False)
        self.basis_names = ({k: tuple(v) for k, v in basis_names.items()}
                            if basis_names else None)

    def _clean_actions(self, actions, raise_label: bool) -> ActionMaps:
        out = []
        for i, table in enumerate(actions):
            step = self.spec.deg(i)
            clean: dict[Label, ExactMatrix] = {}
            for label, matrix in table.items():
                label = self.spec.check_label(label)
                target = ladd(label, step) if raise_label else lsub(label, step)
                sdim = self.piece_dim_or_none(label)
                tdim = self.piece_dim_or_none(target)
                if sdim is None or tdim is None:
                    raise UncoveredRegion(
                        f"action at {label} touches an uncovered label")
                if matrix.rows != tdim or matrix.cols != sdim:
                    raise ShapeMismatch(
                        f"action at {label}: expected {tdim}x{sdim}, "
                        f"got {matrix.rows}x{matrix.cols}")
                if not matrix.is_zero():
                    clean[label] = matrix
            out.append(clean)
        return tuple(out)

    # -- pieces ----------------------------------------------------------

    def piece_dim_or_none(self, label: Label) -> int | None:
        """Dimension of the piece, or None when the label is uncovered."""
        if self.window.in_box(label):
            return self._dims.get(label, 0)
        if self.window.flagged_zero(label):
            return 0
        return None

    def piece_dim(self, label: Label) -> int:
        dim = self.piece_dim_or_none(label)
        if dim is None:
            raise UncoveredRegion(f"label {label} is outside the covered region")
        return dim

    def covered(self, label: Label) -> bool:
        return self.window.covered(label)

    def support(self) -> list[Label]:
        """In-box labels with nonzero pieces, sorted."""
        return sorted(self._dims)

    def dims(self) -> dict[Label, int]:
        return dict(self._dims)

    # -- action matrices ---------------------------------------------------

    def x_matrix(self, i: int, label: Label) -> ExactMatrix:
        """Matrix of x_{i+1} on the piece at label (target label + deg)."""
        target = ladd(label, self.spec.deg(i))
        sdim, tdim = self.piece_dim(label), self.piece_dim(target)
        stored = self._x[i].get(label)
        return stored if stored is not None else ExactMatrix(tdim, sdim)

    def dop_matrix(self, i: int, label: Label) -> ExactMatrix:
        """Matrix of d_{i+1} on the piece at label (target label - deg)."""
        target = lsub(label, self.spec.deg(i))
        sdim, tdim = self.piece_dim(label), self.piece_dim(target)
        stored = self._dop[i].get(label)
        return stored if stored is not None else ExactMatrix(tdim, sdim)

    # -- equality / serialization ------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedPresentation)
                and self.spec == other.spec and self.window == other.window
                and self._dims == other._dims
                and self._x == other._x and self._dop == other._dop)

    def __repr__(self) -> str:
        return (f"GradedPresentation(n={self.spec.n}, {self.spec.mode.value}, "
                f"box {self.window.lo}..{self.window.hi}, "
                f"{len(self._dims)} nonzero pieces)")

    def _actions_to_json(self, actions: ActionMaps) -> list:
        out = []
        for table in actions:
            rows = []
            for label in sorted(table):
                m = table[label]
                rows.append([self.spec.label_to_json(label),
                             [[r, c, str(v)] for r, c, v in m.entries()]])
            out.append(rows)
        return out

    def to_json_dict(self) -> dict:
        return {
            "spec": self.spec.to_json_dict(),
            "window": self.window.to_json_dict(self.spec),
            "dims": [[self.spec.label_to_json(lab), self._dims[lab]]
                     for lab in sorted(self._dims)],
            "x": self._actions_to_json(self._x),
            "dop": self._actions_to_json(self._dop),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True,
                          separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: dict) -> "GradedPresentation":
        spec = GradingSpec.from_json_dict(data["spec"])
        window = Window.from_json_dict(data["window"], spec)
        dims = {spec.label_from_json(lab): int(d) for lab, d in data["dims"]}

        def read_actions(rows, raise_label):
            tables = []
            for i, table_rows in enumerate(rows):
                step = spec.deg(i)
                table = {}
                for lab, triplets in table_rows:
                    label = spec.label_from_json(lab)
                    target = ladd(label, step) if raise_label else lsub(label, step)
                    entries = [(int(r), int(c), Fraction(v)) for r, c, v in triplets]
                    table[label] = ExactMatrix(dims.get(target, 0),
                                               dims.get(label, 0), entries)
                tables.append(table)
            return tables

        return cls(spec, window, dims,
                   read_actions(data["x"], True),
                   read_actions(data["dop"], False))

    @classmethod
    def from_json(cls, text: str) -> "GradedPresentation":
        return cls.from_json_dict(json.loads(text))


# -- validation ------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    label: Label
    relation: str  # "xx", "dd" or "dx"
    pair: tuple[int, int]
    defect: ExactMatrix


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    labels_checked: int = 0
    boundary_skips: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(m: GradedPresentation) -> ValidationReport:
    """Check every commutator relation that stays inside the covered region.

    x_i x_j = x_j x_i, d_i d_j = d_j d_i and d_i x_j - x_j d_i = delta_ij
    are verified on every box label whose composites are covered; labels
    where a composite leaves the covered region are counted as skips.
    """
    report = ValidationReport()
    spec = m.spec
    n = spec.n
    for a in m.window.box_labels():
        if m.piece_dim(a) == 0:
            continue
        checked_here = False
        for i in range(n):
            di = spec.deg(i)
            for j in range(n):
                dj = spec.deg(j)
                if i < j:
                    # x_i x_j = x_j x_i
                    if all(m.covered(lab) for lab in
                           (ladd(a, dj), ladd(a, di), ladd(ladd(a, di), dj))):
                        lhs = m.x_matrix(i, ladd(a, dj)) * m.x_matrix(j, a)
                        rhs = m.x_matrix(j, ladd(a, di)) * m.x_matrix(i, a)
                        if lhs != rhs:
                            report.violations.append(
                                Violation(a, "xx", (i, j), lhs - rhs))
                        checked_here = True
                    else:
                        report.boundary_skips += 1
                    # d_i d_j = d_j d_i
                    if all(m.covered(lab) for lab in
                           (lsub(a, dj), lsub(a, di), lsub(lsub(a, di), dj))):
                        lhs = m.dop_matrix(i, lsub(a, dj)) * m.dop_matrix(j, a)
                        rhs = m.dop_matrix(j, lsub(a, di)) * m.dop_matrix(i, a)
                        if lhs != rhs:
                            report.violations.append(
                                Violation(a, "dd", (i, j), lhs - rhs))
                        checked_here = True
                    else:
                        report.boundary_skips += 1
                # d_i x_j - x_j d_i = delta_ij
                mid = ladd(a, dj)
                if all(m.covered(lab) for lab in
                       (mid, lsub(mid, di), lsub(a, di))):
                    lhs = (m.dop_matrix(i, mid) * m.x_matrix(j, a)
                           - m.x_matrix(j, lsub(a, di)) * m.dop_matrix(i, a))
                    expected = (ExactMatrix.identity(m.piece_dim(a)) if i == j
                                else ExactMatrix(m.piece_dim(lsub(mid, di)),
                                                 m.piece_dim(a)))
                    if lhs != expected:
                        report.violations.append(
                            Violation(a, "dx", (i, j), lhs - expected))
                    checked_here = True
                else:
                    report.boundary_skips += 1
        if checked_here:
            report.labels_checked += 1
    return report


# -- structural operations ---------------------------------------------------

def shift(m: GradedPresentation, l: Label | int) -> GradedPresentation:
    """The shifted presentation with piece at a equal to the piece at a + l."""
    if isinstance(l, int):
        l = (l,) * m.spec.rank
    l = m.spec.check_label(l)
    dims = {lsub(a, l): d for a, d in m._dims.items()}
    x = [{lsub(a, l): mat for a, mat in table.items()} for table in m._x]
    dop = [{lsub(a, l): mat for a, mat in table.items()} for table in m._dop]
    names = ({lsub(a, l): v for a, v in m.basis_names.items()}
             if m.basis_names else None)
    return GradedPresentation(m.spec, m.window.translate(l), dims, x, dop, names)


def direct_sum(m: GradedPresentation, n: GradedPresentation) -> GradedPresentation:
    """Blockwise direct sum; the windows are intersected and flags and-ed."""
    if m.spec != n.spec:
        raise IncompatibleSpecs("direct sum over different grading specs")
    window = m.window.intersect(n.window)
    for summand in (m, n):
        for label in summand.support():
            if not window.in_box(label):
                raise UncoveredRegion(
                    f"nonzero piece at {label} falls outside the combined window")
    dims = {}
    x = [dict() for _ in range(m.spec.n)]
    dop = [dict() for _ in range(m.spec.n)]
    for a in window.box_labels():
        total = m.piece_dim(a) + n.piece_dim(a)
        if total:
            dims[a] = total
    for i in range(m.spec.n):
        step = m.spec.deg(i)
        for a in window.box_labels():
            if dims.get(a, 0) == 0:
                continue
            if window.covered(ladd(a, step)):
                mat = block_diag([m.x_matrix(i, a), n.x_matrix(i, a)])
                if not mat.is_zero():
                    x[i][a] = mat
            if window.covered(lsub(a, step)):
                mat = block_diag([m.dop_matrix(i, a), n.dop_matrix(i, a)])
                if not mat.is_zero():
                    dop[i][a] = mat
    names = None
    if m.basis_names and n.basis_names:
        names = {}
        for a in dims:
            names[a] = tuple(m.basis_names.get(a, ())) + tuple(n.basis_names.get(a, ()))
    return GradedPresentation(m.spec, window, dims, x, dop, names)


def _scalar_of(matrix: ExactMatrix) -> Fraction | None:
    """The scalar c when matrix == c*I, else None (matrix must be square)."""
    if matrix.rows != matrix.cols:
        return None
    if matrix.rows == 0:
        return Fraction(0)
    c = matrix.get(0, 0)
    if matrix != ExactMatrix.scalar(matrix.rows, c):
        return None
    return c


@dataclass
class EulerianReport:
    ok: bool
    labels_checked: int
    boundary_skips: int
    witness_label: Label | None = None
    defect: ExactMatrix | None = None


def is_eulerian(m: GradedPresentation) -> EulerianReport:
    """Whether sum_i x_i d_i acts as multiplication by the label's total degree.

    Checked on every box label whose composites stay covered; on failure
    the report carries a witness label and the defect matrix.
    """
    checked = skips = 0
    for a in m.window.box_labels():
        dim = m.piece_dim(a)
        if dim == 0:
            continue
        if not all(m.covered(lsub(a, m.spec.deg(i))) for i in range(m.spec.n)):
            skips += 1
            continue
        total = ExactMatrix(dim, dim)
        for i in range(m.spec.n):
            total = total + m.x_matrix(i, lsub(a, m.spec.deg(i))) * m.dop_matrix(i, a)
        expected = ExactMatrix.scalar(dim, m.spec.eps(a))
        checked += 1
        if total != expected:
            return EulerianReport(False, checked, skips, a, total - expected)
    return EulerianReport(True, checked, skips)


def euler_offsets(m: GradedPresentation) -> Label | None:
    """Constant offset of the Euler action, when there is one.

    COARSE: returns (c,) when sum_i x_i d_i = (eps(a) + c) * id on every
    checkable piece.  FINE: returns (c_1..c_n) when each x_i d_i
    individually acts as (a_i + c_i) * id.  Shifts of Eulerian modules
    have exactly such offsets; they drive window-completeness
    certification in the cohomology engine.
    """
    offsets: list[int] | None = None
    checked = 0
    for a in m.window.box_labels():
        dim = m.piece_dim(a)
        if dim == 0:
            continue
        if not all(m.covered(lsub(a, m.spec.deg(i))) for i in range(m.spec.n)):
            continue
        if m.spec.mode is Mode.COARSE:
            total = ExactMatrix(dim, dim)
            for i in range(m.spec.n):
                total = total + m.x_matrix(i, lsub(a, m.spec.deg(i))) * m.dop_matrix(i, a)
            c = _scalar_of(total)
            if c is None or c.denominator != 1:
                return None
            here = [int(c) - m.spec.eps(a)]
        else:
            here = []
            for i in range(m.spec.n):
                comp = m.x_matrix(i, lsub(a, m.spec.deg(i))) * m.dop_matrix(i, a)
                c = _scalar_of(comp)
                if c is None or c.denominator != 1:
                    return None
                here.append(int(c) - a[i])
        if offsets is None:
            offsets = here
        elif offsets != here:
            return None
        checked += 1
    return tuple(offsets) if checked else None


def apply_op(m: GradedPresentation, op: WeylOp, label: Label, vector: Sequence):
    """Evaluate a homogeneous operator on a vector in the piece at label.

    Returns (target_label, vector).  Raises UncoveredRegion when an
    intermediate label leaves the covered window and
    InhomogeneousOperator when the operator has mixed degree.
    """
    if op.n != m.spec.n:
        raise IncompatibleSpecs("operator over a different variable count")
    degree = op_degree(op, m.spec)
    if degree is INHOMOGENEOUS:
        raise InhomogeneousOperator(str(op))
    label = m.spec.check_label(label)
    if len(vector) != m.piece_dim(label):
        raise ShapeMismatch("vector length does not match the piece dimension")
    target = ladd(label, degree)
    out = [Fraction(0)] * m.piece_dim(target)
    for (a_exp, b_exp), coeff in op.terms():
        w = tuple(Fraction(v) for v in vector)
        lab = label
        for i in range(m.spec.n):
            for _ in range(b_exp[i]):
                w = m.dop_matrix(i, lab).matvec(w)
                lab = lsub(lab, m.spec.deg(i))
        for i in range(m.spec.n):
            for _ in range(a_exp[i]):
                w = m.x_matrix(i, lab).matvec(w)
                lab = ladd(lab, m.spec.deg(i))
        assert lab == target
        for k, v in enumerate(w):
            out[k] += coeff * v
    return target, tuple(out)


# -- maps between presentations ----------------------------------------------

class GradedMap:
    """A family of per-label matrices M_a -> N_{a+degree}."""

    __slots__ = ("source", "target", "degree", "_blocks")

    def __init__(self, source: GradedPresentation, target: GradedPresentation,
                 degree: Label | int, blocks: Mapping[Label, ExactMatrix]):
        if source.spec != target.spec:
            raise IncompatibleSpecs("map between different grading specs")
        if isinstance(degree, int):
            degree = (degree,) * source.spec.rank
        self.source = source
        self.target = target
        self.degree = source.spec.check_label(degree)
        clean: dict[Label, ExactMatrix] = {}
        for label, matrix in blocks.items():
            label = source.spec.check_label(label)
            sdim = source.piece_dim_or_none(label)
            tdim = target.piece_dim_or_none(ladd(label, self.degree))
            if sdim is None or tdim is None:
                raise NotAMapOfPresentations(
                    f"block at {label} touches an uncovered label")
            if matrix.rows != tdim or matrix.cols != sdim:
                raise NotAMapOfPresentations(
                    f"block at {label}: expected {tdim}x{sdim}, "
                    f"got {matrix.rows}x{matrix.cols}")
            if not matrix.is_zero():
                clean[label] = matrix
        self._blocks = clean

    @classmethod
    def identity(cls, m: GradedPresentation) -> "GradedMap":
        blocks = {a: ExactMatrix.identity(d) for a, d in m.dims().items()}
        return cls(m, m, m.spec.zero(), blocks)

    def block(self, label: Label) -> ExactMatrix:
        sdim = self.source.piece_dim(label)
        tdim = self.target.piece_dim(ladd(label, self.degree))
        stored = self._blocks.get(label)
        return stored if stored is not None else ExactMatrix(tdim, sdim)

    def stored_labels(self) -> list[Label]:
        return sorted(self._blocks)

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self o inner (inner applied first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise NotAMapOfPresentations("composition endpoints do not match")
        degree = ladd(self.degree, inner.degree)
        blocks = {}
        for a in inner.source.window.box_labels():
            mid = ladd(a, inner.degree)
            try:
                blocks[a] = self.block(mid) * inner.block(a)
            except UncoveredRegion:
                continue
        return GradedMap(inner.source, self.target, degree, blocks)

    def __eq__(self, other) -> bool:
        return (isinstance(other, GradedMap) and self.source == other.source
                and self.target == other.target and self.degree == other.degree
                and self._blocks == other._blocks)

    def is_zero(self) -> bool:
        return not self._blocks

    def is_d_linear(self):
        """(ok, witness): commutes with every x_i and d_i where covered."""
        spec = self.source.spec
        d = self.degree
        for a in self.source.window.box_labels():
            for i in range(spec.n):
                step = spec.deg(i)
                # x_i: N-side at a+d, source side at a
                if (self.source.covered(ladd(a, step))
                        and self.target.covered(ladd(a, d))
                        and self.target.covered(ladd(ladd(a, d), step))):
                    lhs = self.target.x_matrix(i, ladd(a, d)) * self.block(a)
                    rhs = self.block(ladd(a, step)) * self.source.x_matrix(i, a)
                    if lhs != rhs:
                        return False, (a, "x", i, lhs - rhs)
                if (self.source.covered(lsub(a, step))
                        and self.target.covered(ladd(a, d))
                        and self.target.covered(lsub(ladd(a, d), step))):
                    lhs = self.target.dop_matrix(i, ladd(a, d)) * self.block(a)
                    rhs = self.block(lsub(a, step)) * self.source.dop_matrix(i, a)
                    if lhs != rhs:
                        return False, (a, "d", i, lhs - rhs)
        return True, None
