#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Finite measure spaces, point sets and scalar fields

Every point carries a strictly positive weight, so the measure of a set is the
sum of the weights of its members and every functional below is an exact
finite computation.
"""

import csv

import numpy as np
from cached_property import cached_property

from ballcalc.errors import SpaceError, InvariantViolation
from ballcalc.lib import write_csv
from ballcalc.log import get_logger

LOGGER = get_logger(__name__)

LP_IDENTITY_TOLERANCE = 1e-10


def _frozen(array):
    array.flags.writeable = False
    return array


class MeasureSpace(object):
    """The points 0..N-1 with their weights and optional coordinates"""

    def __init__(self, weights, coords=None, shape=None):
        weights = np.array(weights, dtype=float).reshape(-1)
        if weights.size < 1:
            raise SpaceError("A measure space needs at least one point")
        if not np.all(np.isfinite(weights)):
            raise SpaceError("Point weights must be finite")
        if np.any(weights <= 0):
            bad = int(np.flatnonzero(weights <= 0)[0])
            raise SpaceError("Point weights must be positive, point {} has weight {}".format(bad, weights[bad]))
        self.weights = _frozen(weights)
        if coords is not None:
            coords = np.array(coords, dtype=float)
            if coords.ndim == 1:
                coords = coords[:, None]
            if coords.shape[0] != weights.size:
                raise SpaceError("Got {} coordinates for {} points".format(coords.shape[0], weights.size))
            if not np.all(np.isfinite(coords)):
                raise SpaceError("Point coordinates must be finite")
            coords = _frozen(coords)
        self.coords = coords
        self.shape = tuple(shape) if shape is not None else None

    @classmethod
    def uniform(cls, size, coords=None, shape=None):
        return cls(np.full(size, 1.0 / size), coords=coords, shape=shape)

    @property
    def size(self):
        return self.weights.size

    def __len__(self):
        return self.size

    @cached_property
    def total(self):
        return float(self.weights.sum())

    @cached_property
    def is_uniform(self):
        return bool(np.all(self.weights == self.weights[0]))

    @property
    def dimension(self):
        return 0 if self.coords is None else self.coords.shape[1]

    def same_as(self, other):
        return self is other or (
            self.size == other.size and np.array_equal(self.weights, other.weights)
        )

    def everything(self):
        return PointSet(self, np.arange(self.size))

    def empty(self):
        return PointSet(self, ())

    def point_set(self, indices):
        return PointSet(self, indices)

    def field(self, values):
        return ScalarField(self, values)

    def constant(self, value):
        return ScalarField(self, np.full(self.size, float(value)))

    def __repr__(self):
        return "<MeasureSpace N={} total={:g}>".format(self.size, self.total)


class PointSet(object):
    """A subset of the points of a space, kept as sorted unique indices"""

    def __init__(self, space, indices):
        indices = np.unique(np.asarray(indices, dtype=np.int64).reshape(-1))
        if indices.size and (indices[0] < 0 or indices[-1] >= space.size):
            raise SpaceError("Point index out of range 0..{}: {}".format(
                space.size - 1, indices[0] if indices[0] < 0 else indices[-1]))
        self.space = space
        self.indices = _frozen(indices)

    @classmethod
    def from_mask(cls, space, mask):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (space.size,):
            raise SpaceError("Mask of shape {} for a space of {} points".format(mask.shape, space.size))
        return cls(space, np.flatnonzero(mask))

    @cached_property
    def mask(self):
        mask = np.zeros(self.space.size, dtype=bool)
        mask[self.indices] = True
        return _frozen(mask)

    @cached_property
    def measure(self):
        return float(self.space.weights[self.indices].sum())

    def __len__(self):
        return self.indices.size

    def __iter__(self):
        return iter(int(i) for i in self.indices)

    def __contains__(self, point):
        return 0 <= point < self.space.size and bool(self.mask[point])

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.space.same_as(other.space)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash(self.indices.tobytes())

    def _check(self, other):
        if not self.space.same_as(other.space):
            raise SpaceError("Point sets of different spaces")

    def union(self, other):
        self._check(other)
        return PointSet(self.space, np.union1d(self.indices, other.indices))

    def intersection(self, other):
        self._check(other)
        return PointSet(self.space, np.intersect1d(self.indices, other.indices, assume_unique=True))

    def difference(self, other):
        self._check(other)
        return PointSet(self.space, np.setdiff1d(self.indices, other.indices, assume_unique=True))

    def complement(self):
        return PointSet.from_mask(self.space, ~self.mask)

    def issubset(self, other):
        self._check(other)
        return bool(np.all(other.mask[self.indices]))

    def intersects(self, other):
        self._check(other)
        return bool(np.any(other.mask[self.indices]))

    def __repr__(self):
        return "<PointSet {} points, measure {:g}>".format(len(self), self.measure)


class ScalarField(object):
    """One finite real value per point of a space"""

    def __init__(self, space, values):
        values = np.array(values, dtype=float).reshape(-1)
        if values.size != space.size:
            raise SpaceError("Got {} values for a space of {} points".format(values.size, space.size))
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise SpaceError("Field values must be finite, point {} holds {}".format(bad, values[bad]))
        self.space = space
        self.values = _frozen(values)

    def _other_values(self, other):
        if isinstance(other, ScalarField):
            if not self.space.same_as(other.space):
                raise SpaceError("Fields of different spaces")
            return other.values
        return float(other)

    def __add__(self, other):
        return ScalarField(self.space, self.values + self._other_values(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ScalarField(self.space, self.values - self._other_values(other))

    def __rsub__(self, other):
        return ScalarField(self.space, self._other_values(other) - self.values)

    def __mul__(self, other):
        return ScalarField(self.space, self.values * self._other_values(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.space, -self.values)

    def __abs__(self):
        return ScalarField(self.space, np.abs(self.values))

    def __len__(self):
        return self.values.size

    def __getitem__(self, point):
        return float(self.values[point])

    def restricted(self, e):
        """The values over the members of e"""
        _check_same_space(self, e)
        return self.values[e.indices]

    def __repr__(self):
        return "<ScalarField N={}>".format(self.values.size)


def _check_same_space(f, e):
    if not f.space.same_as(e.space):
        raise SpaceError("The field and the point set live on different spaces")


def _whole(f, e):
    if e is None:
        return f.space.everything()
    _check_same_space(f, e)
    return e


def measure(s, e=None):
    """μ(e); also accepts a single PointSet argument"""
    if e is None:
        e = s
    elif not s.same_as(e.space):
        raise SpaceError("The point set does not belong to the space")
    return e.measure


def integrate(f, e=None):
    e = _whole(f, e)
    return float(np.dot(f.values[e.indices], f.space.weights[e.indices]))


def distribution_table(f, e=None):
    """The step representation of t -> μ{x in e: |f(x)| > t}

    Returns the increasing positive jump values v_1 < ... < v_m of |f| and the
    masses λ_i = μ{|f| >= v_i}, the value of the distribution on [v_{i-1}, v_i)
    with v_0 = 0.
    """
    e = _whole(f, e)
    values = np.abs(f.values[e.indices])
    weights = f.space.weights[e.indices]
    positive = values > 0
    jumps, inverse = np.unique(values[positive], return_inverse=True)
    masses_at = np.bincount(inverse, weights=weights[positive], minlength=jumps.size)
    tails = np.cumsum(masses_at[::-1])[::-1]
    return jumps, tails


def distribution(f, t, e=None):
    if t < 0:
        raise SpaceError("The distribution is defined for t >= 0, got {}".format(t))
    jumps, tails = distribution_table(f, e)
    i = np.searchsorted(jumps, t, side="right")
    return float(tails[i]) if i < jumps.size else 0.0


def _check_exponent(p):
    if not np.isfinite(p) or p < 1:
        raise SpaceError("The exponent must be a finite real >= 1, got {}".format(p))


def lp_norm_from_distribution(f, p, e=None):
    """p ∫ t^(p-1) λ_f(t) dt integrated exactly on the steps of λ_f"""
    _check_exponent(p)
    jumps, tails = distribution_table(f, e)
    if jumps.size == 0:
        return 0.0
    previous = np.concatenate(([0.0], jumps[:-1]))
    return float(np.sum((jumps ** p - previous ** p) * tails)) ** (1.0 / p)


def lp_norm_direct(f, p, e=None):
    _check_exponent(p)
    e = _whole(f, e)
    values = np.abs(f.values[e.indices])
    return float(np.dot(values ** p, f.space.weights[e.indices])) ** (1.0 / p)


def lp_norm(f, p, e=None):
    """The L^p norm, computed twice and cross-checked"""
    from_distribution = lp_norm_from_distribution(f, p, e)
    direct = lp_norm_direct(f, p, e)
    scale = max(from_distribution, direct)
    if abs(from_distribution - direct) > LP_IDENTITY_TOLERANCE * scale:
        raise InvariantViolation(
            "L^{} norm mismatch: {!r} from the distribution function, {!r} by direct summation".format(
                p, from_distribution, direct))
    return direct


def weak_lp_norm(f, p, e=None):
    """sup_t t λ_f(t)^(1/p), reached at the jump values of λ_f"""
    _check_exponent(p)
    jumps, tails = distribution_table(f, e)
    if jumps.size == 0:
        return 0.0
    return float(np.max(jumps * tails ** (1.0 / p)))


FIELD_COLUMNS = ["index", "weight", "value"]


def write_field_csv(path, field):
    space = field.space
    headers = list(FIELD_COLUMNS)
    if space.coords is not None:
        headers += ["coord{}".format(i) for i in range(space.dimension)]
    rows = []
    for i in range(space.size):
        row = [i, space.weights[i], field.values[i]]
        if space.coords is not None:
            row += list(space.coords[i])
        rows.append(row)
    return write_csv(path, headers, rows)


def read_field_csv(path, space=None):
    """Read a field written by write_field_csv

    Without a space, the space is rebuilt from the weight and coordinate
    columns. With a space, the weights of the file must match it.
    """
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            headers = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SpaceError("{} is empty".format(path))
        if headers[:3] != FIELD_COLUMNS:
            raise SpaceError("{}: expected the columns {}, got {}".format(path, ",".join(FIELD_COLUMNS), ",".join(headers)))
        rows = [row for row in reader if row]
    try:
        table = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as e:
        raise SpaceError("{}: {}".format(path, e))
    if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] != len(headers):
        raise SpaceError("{}: malformed rows".format(path))
    if not np.array_equal(table[:, 0], np.arange(table.shape[0])):
        raise SpaceError("{}: the index column must list 0..N-1 in order".format(path))
    weights = table[:, 1]
    if space is None:
        coords = table[:, 3:] if table.shape[1] > 3 else None
        space = MeasureSpace(weights, coords=coords)
    elif space.size != weights.size or not np.allclose(space.weights, weights, rtol=1e-9, atol=0):
        raise SpaceError("{}: the weights do not match the space of the basis".format(path))
    LOGGER.debug("Read {} values from {}".format(weights.size, path))
    return ScalarField(space, table[:, 2])
