"""Finite-range translation-covariant potentials.

A potential is a finite list of canonical shapes (finite subsets of the
integers anchored with min 0) with value tables on symbol patterns.
Translation covariance is structural: the value on any translated set is
read off the canonical shape.  Tables are total by the convention that
unlisted patterns have value 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .exceptions import ValidationError
from .shifts import Alphabet, Point, Word

_COMPILED_TABLE_LIMIT = 65536


@dataclass(frozen=True)
class ShapeTable:
    """One canonical shape with its pattern values (missing patterns are 0)."""

    offsets: tuple[int, ...]
    values: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        offs = tuple(sorted(int(o) for o in self.offsets))
        if not offs:
            raise ValidationError("shape must be nonempty")
        if offs[0] != 0:
            raise ValidationError("canonical shape must have min offset 0")
        if len(set(offs)) != len(offs):
            raise ValidationError("shape offsets must be distinct")
        object.__setattr__(self, "offsets", offs)
        vals = {tuple(int(a) for a in k): float(v) for k, v in self.values.items()}
        for k in vals:
            if len(k) != len(offs):
                raise ValidationError("pattern length must match shape size")
        object.__setattr__(self, "values", vals)

    @property
    def span(self) -> int:
        return self.offsets[-1]

    @property
    def size(self) -> int:
        return len(self.offsets)

    @property
    def sup_norm(self) -> float:
        return max((abs(v) for v in self.values.values()), default=0.0)

    def value(self, pattern: tuple[int, ...]) -> float:
        return self.values.get(pattern, 0.0)


@dataclass(frozen=True)
class Potential:
    """Finite-range potential over a fixed alphabet."""

    alphabet: Alphabet
    span: int
    shapes: tuple[ShapeTable, ...]

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        if self.span < 0:
            raise ValidationError("range must be nonnegative")
        seen = set()
        for s in self.shapes:
            if s.span > self.span:
                raise ValidationError("shape exceeds the declared range")
            if s.offsets in seen:
                raise ValidationError(f"duplicate shape {s.offsets}")
            seen.add(s.offsets)

    def shape_value(self, shape: ShapeTable, letters_at) -> float:
        """Value of one shape on a configuration accessor anchored at 0."""
        return shape.value(tuple(letters_at(o) for o in shape.offsets))

    @cached_property
    def _kernel_form(self):
        """Dense flattened tables for the batch kernels, or None when some
        table would be unreasonably large (e.g. wide indicator shapes)."""
        K = len(self.alphabet)
        if not self.shapes:
            return None
        offs, offs_start, offs_len, tabs, tab_start = [], [], [], [], []
        for s in self.shapes:
            if K ** s.size > _COMPILED_TABLE_LIMIT:
                return None
            offs_start.append(len(offs))
            offs.extend(s.offsets)
            offs_len.append(s.size)
            tab_start.append(len(tabs))
            dense = np.zeros(K ** s.size)
            for pattern, v in s.values.items():
                code = 0
                for a in pattern:
                    code = code * K + a
                dense[code] = v
            tabs.extend(dense.tolist())
        return (np.array(offs, dtype=np.int64),
                np.array(offs_start, dtype=np.int64),
                np.array(offs_len, dtype=np.int64),
                np.array(tabs),
                np.array(tab_start, dtype=np.int64),
                K)


def zero_potential(alphabet: Alphabet) -> Potential:
    return Potential(alphabet, 0, ())


def add_potentials(a: Potential, b: Potential, coeff: float = 1.0) -> Potential:
    """The potential a + coeff * b (shapes merged by offsets)."""
    if a.alphabet != b.alphabet:
        raise ValidationError("potentials live on different alphabets")
    merged: dict[tuple[int, ...], dict[tuple[int, ...], float]] = {}
    for s in a.shapes:
        merged.setdefault(s.offsets, {}).update(s.values)
    for s in b.shapes:
        tab = merged.setdefault(s.offsets, {})
        for k, v in s.values.items():
            tab[k] = tab.get(k, 0.0) + coeff * v
    shapes = tuple(ShapeTable(o, t) for o, t in sorted(merged.items()))
    return Potential(a.alphabet, max(a.span, b.span), shapes)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def energy(potential: Potential, w: Word) -> float:
    """Total energy of a word: the sum of shape values over every translate
    of every canonical shape that fits inside the window.  Compensated
    summation keeps long windows exact enough for downstream exponentials."""
    terms = []
    lo, hi = w.start, w.end
    for s in potential.shapes:
        for a in range(lo, hi - s.span + 1):
            v = s.value(tuple(w.letters[a - lo + o] for o in s.offsets))
            if v != 0.0:
                terms.append(v)
    return math.fsum(terms)


def _config_accessor(x, positions: list[int]):
    if isinstance(x, Point):
        return x.symbol_at
    if isinstance(x, Word):
        for k in positions:
            if not x.start <= k <= x.end:
                raise ValidationError("configuration does not cover the regions")
        return x.symbol_at
    raise ValidationError("configuration must be a Word or Point")


def interaction(potential: Potential, lam: tuple[int, int],
                m_parts: Sequence[tuple[int, int]], x) -> float:
    """Interaction energy between the interval ``lam`` and the disjoint
    finite union of intervals ``m_parts``: the sum of shape values over
    translated shapes inside the union that meet both parts."""
    la, lb = lam
    if la > lb:
        raise ValidationError("empty interval")
    lam_set = set(range(la, lb + 1))
    m_set: set[int] = set()
    for (a, b) in m_parts:
        if a > b:
            raise ValidationError("empty interval in M")
        m_set.update(range(a, b + 1))
    if lam_set & m_set:
        raise ValidationError("not disjoint")
    union = lam_set | m_set
    sym = _config_accessor(x, sorted(union))
    lo, hi = min(union), max(union)
    terms = []
    for s in potential.shapes:
        for a in range(lo - s.span, hi + 1):
            cells = [a + o for o in s.offsets]
            if not all(c in union for c in cells):
                continue
            if not any(c in lam_set for c in cells):
                continue
            if not any(c in m_set for c in cells):
                continue
            v = s.value(tuple(sym(c) for c in cells))
            if v != 0.0:
                terms.append(v)
    return math.fsum(terms)


@dataclass(frozen=True)
class NormReport:
    """Summability norm, the crossing norm, and per-shape sup norms."""

    norm: float
    cross_norm: float
    per_shape: tuple[tuple[tuple[int, ...], float], ...]


def norms(potential: Potential) -> NormReport:
    """Exact norm data.

    ``norm`` sums sup norms over all translated shapes containing 0 (each
    canonical shape contributes size-many translates).  ``cross_norm`` sums
    sup norms over translates disjoint from [-1, 1] that meet both
    (-inf, -2] and [2, inf); the literal sum over all subsets of the
    complement of [-1, 1] diverges for any nonzero covariant potential, so
    only these crossing translates are counted (see README).
    """
    per = []
    total = 0.0
    cross = 0.0
    for s in potential.shapes:
        sup = s.sup_norm
        per.append((s.offsets, sup))
        total += s.size * sup
        for t in range(2 - s.span, -1):  # t <= -2 and t + span >= 2
            cells = {t + o for o in s.offsets}
            if cells & {-1, 0, 1}:
                continue
            if min(cells) <= -2 and max(cells) >= 2:
                cross += sup
    return NormReport(total, cross, tuple(per))


def phi_function(potential: Potential, x: Point, k: int) -> float:
    """The single-site function at T^k x: the sum over translated shapes
    containing the origin of value / size."""
    terms = []
    for s in potential.shapes:
        for o in s.offsets:
            # translate anchored so that offset o sits at position k
            v = s.value(tuple(x.symbol_at(k - o + oo) for oo in s.offsets))
            if v != 0.0:
                terms.append(v / s.size)
    return math.fsum(terms)


def boundary_norm_bound(potential: Potential, m: int) -> float:
    """Exact value of the boundary sum: for each translated shape through
    the origin, the number of positions in [-m, m] from which it overhangs
    the window, weighted by the sup norm.  Upper-bounds the sup of the
    interaction between [-m, m] and its complement."""
    if m < 0:
        raise ValidationError("m must be nonnegative")
    total = 0.0
    for s in potential.shapes:
        sup = s.sup_norm
        if sup == 0.0:
            continue
        for o in s.offsets:
            # translate A = S - o contains 0; count j with A + j not inside
            n_inside = 0
            for j in range(-m, m + 1):
                if j - o >= -m and j - o + s.span <= m:
                    n_inside += 1
            total += sup * ((2 * m + 1) - n_inside)
    return total


def norm_value(potential: Potential) -> float:
    """Shorthand for the summability norm."""
    return norms(potential).norm
