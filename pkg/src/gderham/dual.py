"""The graded dual functor on presentations and on maps.

The dual of a presentation places the dual of the piece at -a-D at
label a, where D is the degree of x_1*...*x_n; with the dual basis kept
in the primal order this makes the dual of the polynomial ring literally
equal, matrix for matrix, to the inverse-monomial model of E.  The
multiplication actions dualise to plain transposes while the derivative
actions pick up a minus sign from transposition in the operator algebra:

    X_i^dual(a)   =  X_i(-a - deg_i - D)^T
    Dop_i^dual(a) = -Dop_i(-a + deg_i - D)^T

Windows reflect through -D with the vanishing flags swapped per axis,
so the default constructor windows are self-dual.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PreconditionFailed, UncoveredRegion
from .gmodule import GradedMap, GradedPresentation, is_eulerian
from .grading import Label, Mode, Window, ladd, lneg, lsub
from .linalg import ExactMatrix


def _reflect(m: GradedPresentation, label: Label) -> Label:
    return lsub(lneg(label), m.spec.d_total)


def dual_window(m: GradedPresentation) -> Window:
    w = m.window
    d = m.spec.d_total
    return Window(lsub(lneg(w.hi), d), lsub(lneg(w.lo), d),
                  w.vanish_above, w.vanish_below)


def matlis_dual(m: GradedPresentation) -> GradedPresentation:
    """The dual presentation; an involution on finite-window data."""
    spec = m.spec
    window = dual_window(m)
    dims = {}
    names = {} if m.basis_names else None
    for a in window.box_labels():
        d = m.piece_dim(_reflect(m, a))
        if d:
            dims[a] = d
            if names is not None:
                primal = m.basis_names.get(_reflect(m, a))
                if primal:
                    names[a] = tuple(f"({nm})*" for nm in primal)
    x = [dict() for _ in range(spec.n)]
    dop = [dict() for _ in range(spec.n)]
    for a in dims:
        for i in range(spec.n):
            step = spec.deg(i)
            if window.covered(ladd(a, step)):
                src = lsub(_reflect(m, a), step)
                mat = m.x_matrix(i, src).transpose()
                if not mat.is_zero():
                    x[i][a] = mat
            if window.covered(lsub(a, step)):
                src = ladd(_reflect(m, a), step)
                mat = m.dop_matrix(i, src).transpose().scale(-1)
                if not mat.is_zero():
                    dop[i][a] = mat
    return GradedPresentation(spec, window, dims, x, dop, names)


def dual_map(f: GradedMap) -> GradedMap:
    """Contravariant dual of a per-label map, same homogeneity degree."""
    source = matlis_dual(f.target)
    target = matlis_dual(f.source)
    blocks = {}
    for b in source.window.box_labels():
        primal_label = lsub(_reflect(f.target, b), f.degree)
        try:
            block = f.block(primal_label).transpose()
        except UncoveredRegion:
            continue
        if not block.is_zero():
            blocks[b] = block
    return GradedMap(source, target, f.degree, blocks)


def socle_label(m: GradedPresentation) -> Label:
    """The label carrying the residue coordinate: -n coarse, (-1..-1) fine."""
    return lneg(m.spec.d_total)


def residue(e: GradedPresentation, label: Label, vector) -> Fraction:
    """Coefficient of the socle coordinate of an element of E.

    Zero away from the socle label; at it, the piece must be a line and
    the returned value is the single coordinate.
    """
    label = e.spec.check_label(label)
    if label != socle_label(e):
        return Fraction(0)
    if e.piece_dim(label) != 1:
        raise PreconditionFailed("the socle piece is not one dimensional")
    if len(vector) != 1:
        raise PreconditionFailed("vector length does not match the socle piece")
    v = vector[0]
    return v if isinstance(v, Fraction) else Fraction(v)


def evaluation_check(m: GradedPresentation) -> bool:
    """Whether the double dual reproduces the presentation on the nose."""
    return matlis_dual(matlis_dual(m)) == m


def eulerian_dual_check(m: GradedPresentation) -> bool:
    """Dualising must preserve the Euler eigenvalue property."""
    if not is_eulerian(m).ok:
        raise PreconditionFailed("input presentation is not Eulerian")
    return is_eulerian(matlis_dual(m)).ok
