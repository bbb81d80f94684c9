#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Ball-bases: finite families of sets with a hull map

A ball-basis is a family of sets of positive measure such that any two points
lie in a common ball and every ball B has a hull ball B* containing each ball
A with A∩B≠∅ and μ(A) <= 2μ(B). The shipped families supply their hull maps in
closed form, `validate_axioms` certifies them by an exhaustive pair scan.
"""

import copy
import itertools
import math

import networkx as nx
import numpy as np
from cached_property import cached_property

from ballcalc.errors import BasisError
from ballcalc.lib import parallel_map, chunks, intcomma, write_csv
from ballcalc.log import get_logger
from ballcalc.report import ValidationReport
from ballcalc.space import MeasureSpace, PointSet

LOGGER = get_logger(__name__)

MAX_DYADIC_LEVELS = 24
# number of (ball, ball) cells handled at once by the pair scans
SCAN_CELLS = 1 << 22
RELATIVE_SLACK = 1e-12


def _frozen(array):
    array.flags.writeable = False
    return array


class Ball(object):
    """A ball of a basis, identified by its id"""

    def __init__(self, basis, id):
        self.basis = basis
        self.id = int(id)

    @cached_property
    def members(self):
        return PointSet(self.basis.space, self.basis.members_of(self.id))

    @property
    def measure(self):
        return float(self.basis.measures[self.id])

    @property
    def size(self):
        return int(self.basis.sizes[self.id])

    @property
    def descriptor(self):
        return self.basis.descriptor(self.id)

    def __eq__(self, other):
        return isinstance(other, Ball) and other.basis is self.basis and other.id == self.id

    def __hash__(self):
        return hash((id(self.basis), self.id))

    def __repr__(self):
        return "<Ball {} {} measure={:g}>".format(self.id, self.basis.describe(self.id), self.measure)


def ball_id(ball):
    return ball.id if isinstance(ball, Ball) else int(ball)


def family_table(families):
    """Pad per point id lists into one array, -1 marking the padding"""
    width = max(len(ids) for ids in families) if len(families) else 0
    table = np.full((len(families), max(width, 1)), -1, dtype=np.int64)
    for x, ids in enumerate(families):
        table[x, :len(ids)] = ids
    return _frozen(table)


class BallBasis(object):
    """A finite family of balls over a MeasureSpace

    Balls are stored as one flat array of member indices, sliced by offsets.
    `per_point` holds the basis-structure: for each point the ids of the balls
    the maximal operators take their sup over. None means every ball
    containing the point.
    """
    kind = "generic"
    descriptor_names = ()

    def __init__(self, space, members, hull_ids, per_point=None, descriptors=None, name=None):
        members = [np.unique(np.asarray(m, dtype=np.int64).reshape(-1)) for m in members]
        if not members:
            raise BasisError("A ball-basis needs at least one ball")
        for i, m in enumerate(members):
            if m.size == 0:
                raise BasisError("Ball {} is empty".format(i))
            if m[0] < 0 or m[-1] >= space.size:
                raise BasisError("Ball {} has a member out of the space".format(i))
        self.space = space
        self.sizes = _frozen(np.array([m.size for m in members], dtype=np.int64))
        self.offsets = _frozen(np.concatenate(([0], np.cumsum(self.sizes)[:-1])).astype(np.int64))
        self.flat = _frozen(np.concatenate(members))
        self.measures = _frozen(np.add.reduceat(space.weights[self.flat], self.offsets))
        hull_ids = np.asarray(hull_ids, dtype=np.int64).reshape(-1)
        if hull_ids.size != len(members):
            raise BasisError("Got {} hull ids for {} balls".format(hull_ids.size, len(members)))
        if np.any(hull_ids < 0) or np.any(hull_ids >= len(members)):
            raise BasisError("Hull ids must designate balls of the basis")
        self.hull_ids = _frozen(hull_ids)
        if per_point is not None:
            if len(per_point) != space.size:
                raise BasisError("The basis-structure must list a family for each of the {} points".format(space.size))
            per_point = [_frozen(np.asarray(ids, dtype=np.int64)) for ids in per_point]
        self._per_point = per_point
        self._descriptors = descriptors
        self.name = name or self.kind

    def __len__(self):
        return self.sizes.size

    @property
    def count(self):
        return self.sizes.size

    def members_of(self, ball):
        i = ball_id(ball)
        return self.flat[self.offsets[i]:self.offsets[i] + self.sizes[i]]

    def ball(self, i):
        if not 0 <= i < self.count:
            raise BasisError("No ball with id {}".format(i))
        return Ball(self, i)

    def __iter__(self):
        return (Ball(self, i) for i in range(self.count))

    def hull(self, ball):
        return Ball(self, self.hull_ids[ball_id(ball)])

    def descriptor(self, i):
        if self._descriptors is None:
            return {}
        return dict(zip(self.descriptor_names, self._descriptors[i]))

    def describe(self, i):
        return " ".join("{}={}".format(k, v) for k, v in self.descriptor(i).items())

    @cached_property
    def membership(self):
        """Dense ball x point membership matrix"""
        m = np.zeros((self.count, self.space.size), dtype=bool)
        m[np.repeat(np.arange(self.count), self.sizes), self.flat] = True
        return _frozen(m)

    @cached_property
    def _counting(self):
        # float32 holds the intersection counts exactly below 2**24
        return self.membership.astype(np.float32)

    @cached_property
    def _weighted(self):
        return self.membership * self.space.weights[None, :]

    @cached_property
    def containing(self):
        """For each point, the ids of the balls containing it, increasing"""
        points, ids = np.nonzero(self.membership.T)
        counts = np.bincount(points, minlength=self.space.size)
        return [_frozen(a) for a in np.split(ids.astype(np.int64), np.cumsum(counts)[:-1])]

    @property
    def per_point(self):
        return self.containing if self._per_point is None else self._per_point

    @property
    def per_point_is_containing(self):
        return self._per_point is None

    @cached_property
    def containing_table(self):
        return family_table(self.containing)

    @cached_property
    def per_point_table(self):
        return self.containing_table if self._per_point is None else family_table(self._per_point)

    @cached_property
    def full_ids(self):
        return np.flatnonzero(self.sizes == self.space.size)

    @property
    def scan_ids(self):
        """Balls whose rows the validation scans, enough to cover every case"""
        return np.arange(self.count)

    @property
    def scan_points(self):
        return np.arange(self.space.size)

    @cached_property
    def _keys(self):
        """Measures compared exactly: point counts on uniform spaces"""
        if self.space.is_uniform:
            return self.sizes.astype(float), 0.0
        return self.measures, RELATIVE_SLACK

    def _intersections(self, rows, cols=None):
        """|A ∩ B| for A in rows and B in cols (all balls by default)"""
        right = self._counting if cols is None else self._counting[cols]
        return self._counting[rows] @ right.T

    def _intersection_measures(self, rows, counts):
        if self.space.is_uniform:
            return counts * self.space.weights[0]
        return self._weighted[rows] @ self.membership.T.astype(float)

    def integrals(self, values):
        """∫_B values dμ for every ball"""
        weighted = np.asarray(values, dtype=float) * self.space.weights
        return np.add.reduceat(weighted[self.flat], self.offsets)

    def averages(self, values):
        return self.integrals(values) / self.measures

    def minima(self, values):
        return np.minimum.reduceat(np.asarray(values, dtype=float)[self.flat], self.offsets)

    def maxima(self, values):
        return np.maximum.reduceat(np.asarray(values, dtype=float)[self.flat], self.offsets)

    def superset_ids(self, ball):
        """Ids of the balls containing the ball, itself included"""
        i = ball_id(ball)
        counts = self._counting @ self._counting[i]
        return np.flatnonzero(counts == self.sizes[i])

    def starred_max(self, values):
        """For each ball, the max of the per-ball values over its superballs"""
        values = np.asarray(values, dtype=float)
        rows = max(1, SCAN_CELLS // self.count)

        def block(sl):
            ids = np.arange(sl.start, sl.stop)
            contained = self._intersections(ids) == self.sizes[ids][:, None]
            return np.where(contained, values[None, :], -np.inf).max(axis=1)
        return np.concatenate(parallel_map(block, chunks(self.count, rows)))

    def distance_rows(self, balls):
        """d(y, B) = min μ(A) over balls A ⊇ B ∪ {y}, for every point y

        One row per requested ball, +inf where no ball contains B ∪ {y}.
        """
        keys, _ = self._keys
        rows = []
        for ball in balls:
            sups = self.superset_ids(ball)
            sups = sups[np.argsort(keys[sups], kind="stable")]
            sub = self.membership[sups]
            first = sub.argmax(axis=0)
            rows.append(np.where(sub.any(axis=0), self.measures[sups][first], np.inf))
        return np.array(rows).reshape(len(rows), self.space.size)

    def with_hull(self, hull_ids):
        """A copy of the basis with another hull map"""
        res = copy.copy(self)
        hull_ids = np.asarray(hull_ids, dtype=np.int64).reshape(-1)
        if hull_ids.size != self.count or np.any(hull_ids < 0) or np.any(hull_ids >= self.count):
            raise BasisError("Hull ids must designate balls of the basis")
        res.hull_ids = _frozen(hull_ids)
        res.translation_invariant = False
        res.__dict__.pop("constants", None)
        return res

    @cached_property
    def constants(self):
        """The measured constants K, eta_doubling, theta, eta_bs and beta"""
        return validate_axioms(self).constants

    def export(self, path):
        headers = ["id"] + list(self.descriptor_names) + ["size", "measure", "hull"]
        rows = [
            [i] + [self.descriptor(i)[name] for name in self.descriptor_names]
            + [int(self.sizes[i]), float(self.measures[i]), int(self.hull_ids[i])]
            for i in range(self.count)
        ]
        return write_csv(path, headers, rows)

    def __repr__(self):
        return "<{} {} balls over {} points>".format(self.__class__.__name__, self.count, self.space.size)


class ChainBasis(BallBasis):
    """A basis whose balls form a forest under inclusion, parents first

    Any two balls are either nested or disjoint, so the superballs of a ball are
    its ancestors and the balls containing a point form a chain.
    """

    def __init__(self, space, members, parents, hull_ids, descriptors=None, name=None):
        parents = np.asarray(parents, dtype=np.int64)
        if np.any(parents >= np.arange(parents.size)):
            raise BasisError("Parents must be listed before their children")
        self.parents = _frozen(parents)
        super(ChainBasis, self).__init__(space, members, hull_ids, per_point=None,
                                         descriptors=descriptors, name=name)

    @cached_property
    def depths(self):
        depths = np.zeros(self.count, dtype=np.int64)
        for i in range(self.count):
            if self.parents[i] >= 0:
                depths[i] = depths[self.parents[i]] + 1
        return _frozen(depths)

    def ancestors(self, ball):
        """The ball and its ancestors, from the ball up to its root"""
        i = ball_id(ball)
        res = [i]
        while self.parents[res[-1]] >= 0:
            res.append(int(self.parents[res[-1]]))
        return res

    def superset_ids(self, ball):
        return np.array(sorted(self.ancestors(ball)), dtype=np.int64)

    def starred_max(self, values):
        out = np.array(values, dtype=float)
        for depth in range(1, int(self.depths.max()) + 1 if self.count else 1):
            ids = np.flatnonzero(self.depths == depth)
            out[ids] = np.maximum(out[ids], out[self.parents[ids]])
        return out

    def distance_rows(self, balls):
        rows = np.full((len(balls), self.space.size), np.inf)
        for row, ball in zip(rows, balls):
            for a in self.ancestors(ball):
                members = self.members_of(a)
                unset = np.isinf(row[members])
                row[members[unset]] = self.measures[a]
        return rows


class DyadicBasis(ChainBasis):
    """Dyadic intervals of [0,1) down to length 2^-levels, over 2^levels cells"""
    kind = "dyadic"
    descriptor_names = ("level", "index")

    def __init__(self, levels):
        if levels < 0 or levels > MAX_DYADIC_LEVELS:
            raise BasisError("The dyadic basis supports 0 to {} levels, got {}".format(MAX_DYADIC_LEVELS, levels))
        self.levels = int(levels)
        n = 2 ** self.levels
        space = MeasureSpace.uniform(n, coords=np.arange(n) / float(n), shape=(n,))
        level_of = np.concatenate([np.full(2 ** k, k) for k in range(self.levels + 1)])
        index_of = np.concatenate([np.arange(2 ** k) for k in range(self.levels + 1)])
        block = 2 ** (self.levels - level_of)
        members = [np.arange(j * b, (j + 1) * b) for j, b in zip(index_of, block)]
        ids = np.arange(level_of.size)
        parents = np.where(ids > 0, (ids - 1) // 2, -1)
        hull_ids = np.maximum(parents, 0)
        self.level_of = _frozen(level_of)
        self.index_of = _frozen(index_of)
        super(DyadicBasis, self).__init__(
            space, members, parents, hull_ids,
            descriptors=list(zip(level_of.tolist(), index_of.tolist())),
            name="dyadic(L={})".format(self.levels),
        )

    def id_of(self, level, index):
        return 2 ** level - 1 + index

    def integrals(self, values):
        weighted = np.asarray(values, dtype=float) * self.space.weights
        prefix = np.concatenate(([0.0], np.cumsum(weighted)))
        block = 2 ** (self.levels - self.level_of)
        starts = self.index_of * block
        return prefix[starts + block] - prefix[starts]


class GridBasis(BallBasis):
    """Cubes or Euclidean balls of every integer radius on the torus (Z/n)^d

    Ball ids run radius first: id = (r - 1) * n^d + flat center index. The hull
    of B(x, r) is B(x, min(5r, top radius)).
    """
    kind = "grid"
    descriptor_names = ("center", "radius")
    # False once the hull map is replaced
    translation_invariant = True

    def __init__(self, dim, n, shape="cube", mode="centered"):
        if dim not in (1, 2):
            raise BasisError("Grid bases exist in dimension 1 or 2, got {}".format(dim))
        if n < 4:
            raise BasisError("A grid needs at least 4 points per axis, got {}".format(n))
        if shape not in ("cube", "ball"):
            raise BasisError("Unknown grid ball shape {}".format(shape))
        if mode not in ("centered", "uncentered"):
            raise BasisError("Unknown basis-structure mode {}".format(mode))
        self.dim, self.n, self.shape, self.mode = int(dim), int(n), shape, mode
        points = n ** dim
        grid = np.indices((n,) * dim).reshape(dim, -1).T
        self.grid = _frozen(grid)
        space = MeasureSpace.uniform(points, coords=grid / float(n), shape=(n,) * dim)
        if shape == "cube" or dim == 1:
            self.top_radius = n // 2
        else:
            self.top_radius = int(math.ceil(math.sqrt(dim) * n / 2.0))
        self.radii = _frozen(np.arange(1, self.top_radius + 1))
        members = []
        for r in self.radii:
            residues = self._residues(r)
            rows = np.sort(self._flat_index((grid[:, None, :] + residues[None, :, :]) % n), axis=1)
            members.extend(rows)
        hull_radius = np.minimum(5 * self.radii, self.top_radius)
        hull_ids = ((hull_radius - 1)[:, None] * points + np.arange(points)[None, :]).reshape(-1)
        if mode == "centered":
            per_point = [np.arange(self.radii.size) * points + x for x in range(points)]
        else:
            per_point = None
        descriptors = [(x, int(r)) for r in self.radii for x in range(points)]
        super(GridBasis, self).__init__(
            space, members, hull_ids, per_point=per_point, descriptors=descriptors,
            name="grid(d={},n={},{},{})".format(dim, n, shape, mode),
        )

    def _residues(self, r):
        """Displacements of B(0, r), reduced modulo n and deduplicated"""
        span = np.arange(-r, r + 1)
        deltas = np.array(list(itertools.product(span, repeat=self.dim)))
        if self.shape == "ball":
            deltas = deltas[(deltas ** 2).sum(axis=1) <= r * r]
        return np.unique(deltas % self.n, axis=0)

    def _flat_index(self, coords):
        res = coords[..., 0]
        for axis in range(1, self.dim):
            res = res * self.n + coords[..., axis]
        return res

    def id_of(self, center, radius):
        return (radius - 1) * self.n ** self.dim + center

    def center_of(self, ball):
        return ball_id(ball) % self.n ** self.dim

    def radius_of(self, ball):
        return ball_id(ball) // self.n ** self.dim + 1

    def is_full(self, radius):
        return 2 * radius + 1 >= self.n

    @property
    def is_cube(self):
        return self.shape == "cube" or self.dim == 1

    def centered_ids(self, point):
        return np.arange(self.radii.size) * self.n ** self.dim + point

    @property
    def scan_ids(self):
        # every check commutes with the translations of the torus
        if not self.translation_invariant:
            return super(GridBasis, self).scan_ids
        return self.centered_ids(0)

    @property
    def scan_points(self):
        if not self.translation_invariant:
            return super(GridBasis, self).scan_points
        return np.array([0])

    def integrals(self, values):
        if not self.is_cube:
            return super(GridBasis, self).integrals(values)
        n, dim = self.n, self.dim
        weighted = np.asarray(values, dtype=float) * self.space.weights
        if dim == 1:
            table = np.concatenate(([0.0], np.cumsum(np.tile(weighted, 2))))
        else:
            table = np.zeros((2 * n + 1, 2 * n + 1))
            table[1:, 1:] = np.tile(weighted.reshape(n, n), (2, 2)).cumsum(axis=0).cumsum(axis=1)
        res = []
        for r in self.radii:
            length = min(2 * r + 1, n)
            # full balls all read the same window so they get the same value
            starts = (self.grid - r) % n if length < n else np.zeros_like(self.grid)
            if dim == 1:
                a = starts[:, 0]
                res.append(table[a + length] - table[a])
            else:
                a, b = starts[:, 0], starts[:, 1]
                res.append(table[a + length, b + length] - table[a, b + length]
                           - table[a + length, b] + table[a, b])
        return np.concatenate(res)

    def superset_ids(self, ball):
        if not self.is_cube:
            return super(GridBasis, self).superset_ids(ball)
        points = self.n ** self.dim
        center, radius = self.center_of(ball), self.radius_of(ball)
        if self.is_full(radius):
            return self.full_ids
        res = []
        for r in range(radius, self.top_radius + 1):
            if self.is_full(r):
                res.append((r - 1) * points + np.arange(points))
                continue
            span = np.arange(-(r - radius), r - radius + 1)
            shifts = np.array(list(itertools.product(span, repeat=self.dim)))
            centers = np.unique(self._flat_index((self.grid[center][None, :] + shifts) % self.n))
            res.append((r - 1) * points + centers)
        return np.concatenate(res)

    def starred_max(self, values):
        if not self.is_cube:
            return super(GridBasis, self).starred_max(values)
        shape = (self.radii.size,) + (self.n,) * self.dim
        values = np.asarray(values, dtype=float).reshape(shape)
        out = values.copy()
        axes = tuple(range(self.dim))
        shifts = [s for s in itertools.product((-1, 0, 1), repeat=self.dim) if any(s)]
        for ri in range(self.radii.size - 2, -1, -1):
            above = out[ri + 1]
            best = above.copy()
            for s in shifts:
                best = np.maximum(best, np.roll(above, s, axis=axes))
            out[ri] = np.maximum(values[ri], best)
        return out.reshape(-1)

    def distance_rows(self, balls):
        if not self.is_cube:
            return super(GridBasis, self).distance_rows(balls)
        n = self.n
        rows = []
        for ball in balls:
            center, radius = self.center_of(ball), self.radius_of(ball)
            if self.is_full(radius):
                rows.append(np.full(self.space.size, self.space.total))
                continue
            gap = np.abs(self.grid - self.grid[center][None, :])
            gap = np.minimum(gap, n - gap)
            need = np.where(gap <= radius, radius, np.ceil((gap + radius) / 2.0)).max(axis=1)
            count = np.minimum(2 * need + 1, n) ** self.dim
            rows.append(count * self.space.weights[0])
        return np.array(rows).reshape(len(rows), self.space.size)


class MartingaleBasis(ChainBasis):
    """The blocks of nested partitions, hull = largest ancestor of at most twice the measure"""
    kind = "martingale"
    descriptor_names = ("level", "block")

    def __init__(self, space, tree, node_levels, name=None):
        self.tree = tree
        order = list(nx.topological_sort(tree))
        # parents first, then by level and block position
        order.sort(key=lambda node: node_levels[node])
        index = {node: i for i, node in enumerate(order)}
        members = [tree.nodes[node]["members"] for node in order]
        parents = []
        for node in order:
            preds = list(tree.predecessors(node))
            parents.append(index[preds[0]] if preds else -1)
        measures = np.array([space.weights[m].sum() for m in members])
        hull_ids = []
        for i, node in enumerate(order):
            hull = i
            for ancestor in nx.shortest_path(tree, _root_of(tree, node), node)[-2::-1]:
                if measures[index[ancestor]] <= 2 * measures[i] * (1 + RELATIVE_SLACK):
                    hull = index[ancestor]
                else:
                    break
            hull_ids.append(hull)
        super(MartingaleBasis, self).__init__(
            space, members, parents, hull_ids,
            descriptors=[node_levels[node] for node in order],
            name=name or "martingale({} blocks)".format(len(order)),
        )


def _root_of(tree, node):
    while True:
        preds = list(tree.predecessors(node))
        if not preds:
            return node
        node = preds[0]


def dyadic_basis(levels):
    """The dyadic basis and its space"""
    basis = DyadicBasis(levels)
    return basis.space, basis


def grid_torus_basis(dim, n, shape="cube", mode="centered"):
    basis = GridBasis(dim, n, shape=shape, mode=mode)
    return basis.space, basis


def martingale_basis(partition_tree, space=None):
    """Build the basis of the blocks of nested partitions

    partition_tree lists the partitions from the coarsest to the finest, each
    as a list of blocks of point indices. Each partition must refine the
    previous one and the finest must be made of singletons. A block repeating
    its parent block is kept once.
    """
    if not partition_tree:
        raise BasisError("At least one partition is needed")
    if space is None:
        space = MeasureSpace.uniform(sum(len(block) for block in partition_tree[0]))
    for level, partition in enumerate(partition_tree):
        flat = sorted(i for block in partition for i in block)
        if flat != list(range(space.size)):
            raise BasisError("Level {} is not a partition of the {} points".format(level, space.size))
    if any(len(block) != 1 for block in partition_tree[-1]):
        raise BasisError("The finest partition must be made of singletons")
    tree = nx.DiGraph()
    node_levels = {}
    owner = np.full(space.size, -1)
    for level, partition in enumerate(partition_tree):
        new_owner = np.full(space.size, -1)
        for position, block in enumerate(partition):
            block = np.array(sorted(block), dtype=np.int64)
            parents = set(owner[block].tolist())
            if level and len(parents) != 1:
                raise BasisError("Non-nested partitions: block {} of level {} straddles several blocks".format(
                    position, level))
            parent = parents.pop() if level else -1
            if parent >= 0 and np.array_equal(tree.nodes[parent]["members"], block):
                new_owner[block] = parent
                continue
            node = tree.number_of_nodes()
            tree.add_node(node, members=block)
            node_levels[node] = (level, position)
            if parent >= 0:
                tree.add_edge(parent, node)
            new_owner[block] = node
        owner = new_owner
    if not nx.is_branching(tree):
        raise BasisError("Non-nested partitions")
    basis = MartingaleBasis(space, tree, node_levels)
    LOGGER.debug("Built {} with {} balls".format(basis.name, intcomma(basis.count)))
    return basis


def random_partition_tree(leaves, seed, weights=None):
    """Random nested partitions of a random-weight space

    Every block of more than one point is cut into 2 or 3 consecutive parts,
    until only singletons remain.
    """
    rng = np.random.default_rng(seed)
    if weights is None:
        weights = rng.uniform(0.5, 2.0, size=leaves)
        weights = weights / weights.sum()
    space = MeasureSpace(weights, coords=np.arange(leaves) / float(leaves))
    levels = [[list(range(leaves))]]
    while any(len(block) > 1 for block in levels[-1]):
        partition = []
        for block in levels[-1]:
            if len(block) == 1:
                partition.append(block)
                continue
            parts = int(rng.integers(2, 4)) if len(block) >= 3 else 2
            cuts = np.sort(rng.choice(np.arange(1, len(block)), size=parts - 1, replace=False))
            partition.extend(list(p) for p in np.split(np.array(block), cuts))
        levels.append([[int(i) for i in block] for block in partition])
    return space, levels


def validate_axioms(b):
    """Check B1, B2, B4 and measure the constants of a basis

    The pair scans run over blocks of balls in worker threads, blocks being
    merged in id order so the report does not depend on the schedule.
    """
    report = ValidationReport(b.name)
    n_balls, n_points = b.count, b.space.size
    LOGGER.status("Validating {} ({} balls, {} points)".format(b.name, intcomma(n_balls), intcomma(n_points)))
    keys, slack = b._keys
    measures = b.measures

    bad = np.flatnonzero(~(np.isfinite(measures) & (measures > 0)))
    report.add("B1", bad.size == 0, float(measures.min()), int(bad[0]) if bad.size else None,
               "" if not bad.size else "ball {} has measure {}".format(bad[0], measures[bad[0]]))

    pairs = (b._counting.T @ b._counting) > 0
    uncovered = np.argwhere(~pairs)
    report.add("B2", uncovered.size == 0, None,
               tuple(int(v) for v in uncovered[0]) if uncovered.size else None,
               "" if not uncovered.size else "points {} and {} share no ball".format(*uncovered[0]))
    report.add("B3", True, None, None, "not checked: the shipped families generate the singletons")

    scan = b.scan_ids
    rows_per_block = max(1, SCAN_CELLS // n_balls)
    results = parallel_map(lambda sl: _scan_block(b, scan[sl], keys, slack),
                           chunks(scan.size, rows_per_block))

    b4_witness = next((r["b4_witness"] for r in results if r["b4_witness"] is not None), None)
    report.add("B4", b4_witness is None, None, b4_witness,
               "" if b4_witness is None else
               "ball {1} meets ball {0} with at most twice its measure but is not inside its hull {2}".format(
                   b4_witness[0], b4_witness[1], int(b.hull_ids[b4_witness[0]])))
    ratios = measures[b.hull_ids] / measures
    k_value = float(ratios.max())
    report.add("K", True, k_value, int(np.argmax(ratios)), "max μ(B*)/μ(B)")

    eta = max(r["eta"] for r in results)
    eta_witness = next((r["eta_witness"] for r in results if r["eta"] == eta), None)
    report.add("doubling", np.isfinite(eta), eta, eta_witness,
               "" if np.isfinite(eta) else "ball {} has no superball of between 2 and any times its measure".format(
                   eta_witness))

    theta = min(r["theta"] for r in results)
    theta_witness = next((r["theta_witness"] for r in results if r["theta"] == theta), None)
    report.add("regular", theta > 0, theta, theta_witness, "min μ(B*∩A)/μ(B*)")

    successors = np.concatenate([r["successor"] for r in results])
    beta, beta_witness, lower_witness = _growth(b, scan, successors)
    report.add("exhaustion", lower_witness is None, beta, beta_witness if lower_witness is None else lower_witness,
               "" if lower_witness is None else
               "ball {} has no successor of at least twice its measure before the whole space".format(lower_witness))

    g1_witness, eta_bs, eta_bs_witness = _basis_structure(b)
    report.add("G1", g1_witness is None, None, g1_witness,
               "" if g1_witness is None else "point {} is outside ball {} of its family".format(*g1_witness))
    report.add("G2", np.isfinite(eta_bs), eta_bs, eta_bs_witness,
               "" if np.isfinite(eta_bs) else "a ball containing point {} lies in no ball of its family".format(
                   eta_bs_witness))

    report.constant("K", k_value)
    report.constant("eta_doubling", eta)
    report.constant("theta", theta)
    report.constant("eta_bs", eta_bs)
    report.constant("beta", beta)
    report.constant("balls", n_balls)
    report.constant("points", n_points)
    return report


def _scan_block(b, ids, keys, slack):
    n_points = b.space.size
    key = keys[ids][:, None]
    sizes = b.sizes
    hulls = b.hull_ids[ids]
    inter = b._intersections(ids)
    inter_hull = b._intersections(hulls)
    meets = inter > 0
    res = {}

    qualifying = meets & (keys[None, :] <= 2 * key * (1 + slack))
    escaping = qualifying & (inter_hull < sizes[None, :])
    rows = np.flatnonzero(escaping.any(axis=1))
    res["b4_witness"] = (int(ids[rows[0]]), int(np.argmax(escaping[rows[0]]))) if rows.size else None

    contains = inter == sizes[ids][:, None]
    bigger = contains & (keys[None, :] >= 2 * key * (1 - slack))
    ratio = np.where(bigger, keys[None, :] / key, np.inf).min(axis=1)
    concerned = sizes[hulls] < n_points
    ratio = np.where(concerned, ratio, -np.inf)
    res["eta"] = float(ratio.max()) if ratio.size else -np.inf
    res["eta_witness"] = int(ids[np.argmax(ratio)]) if ratio.size else None
    if res["eta"] == -np.inf:
        res["eta"] = 0.0

    larger = meets & (keys[None, :] >= key * (1 - slack))
    hull_measures = b.measures[hulls][:, None]
    captured = b._intersection_measures(hulls, inter_hull) / hull_measures
    theta = np.where(larger, captured, np.inf).min(axis=1)
    res["theta"] = float(theta.min())
    res["theta_witness"] = int(ids[np.argmin(theta)])

    inside = inter_hull == sizes[hulls][:, None]
    candidates = inside & (keys[None, :] >= 2 * key * (1 - slack))
    fallback = np.where(inside, keys[None, :], np.inf).argmin(axis=1)
    chosen = np.where(candidates, keys[None, :], np.inf).argmin(axis=1)
    res["successor"] = np.where(candidates.any(axis=1), chosen, fallback)
    return res


def _growth(b, ids, successors):
    """Largest μ(next)/μ(G) over the steps not landing on the whole space"""
    n_points = b.space.size
    ratios = b.measures[successors] / b.measures[ids]
    final = b.sizes[successors] == n_points
    start = b.sizes[ids] < n_points
    steps = start & ~final
    keys, slack = b._keys
    short = steps & (keys[successors] < 2 * keys[ids] * (1 - slack))
    lower_witness = int(ids[np.flatnonzero(short)[0]]) if short.any() else None
    if steps.any():
        masked = np.where(steps, ratios, -np.inf)
        return float(masked.max()), int(ids[np.argmax(masked)]), lower_witness
    return 1.0, None, lower_witness


def _basis_structure(b):
    if b.per_point_is_containing:
        return None, 1.0, None
    membership = b.membership
    keys, _ = b._keys
    g1_witness = None
    for x, ids in enumerate(b.per_point):
        outside = ~membership[ids, x]
        if outside.any():
            g1_witness = (x, int(ids[np.argmax(outside)]))
            break

    def point_ratio(x):
        family = b.per_point[x]
        around = b.containing[x]
        if np.all(np.isin(around, family)):
            return 1.0
        inside = b._intersections(around, family) == b.sizes[around][:, None]
        best = np.where(inside, keys[family][None, :], np.inf).min(axis=1)
        return float((best / keys[around]).max())
    points = b.scan_points
    ratios = np.array(parallel_map(point_ratio, points))
    return g1_witness, float(ratios.max()), int(points[np.argmax(ratios)])


class ExhaustionSequence(object):
    def __init__(self, basis, ids):
        self.basis = basis
        self.ids = list(ids)
        measures = basis.measures[self.ids]
        self.ratios = list(measures[1:] / measures[:-1])
        final = len(self.ids) > 1 and basis.sizes[self.ids[-1]] == basis.space.size
        # the step into the whole space is exempt from the lower bound
        self.final_ratio = self.ratios[-1] if final else None
        inner = self.ratios[:-1] if final else self.ratios
        self.min_growth = float(min(inner)) if inner else None
        self.max_growth = float(max(self.ratios)) if self.ratios else None
        self.beta = float(max(inner)) if inner else 1.0

    @property
    def balls(self):
        return [self.basis.ball(i) for i in self.ids]

    def __len__(self):
        return len(self.ids)


def successor(b, ball):
    """The next ball of an exhaustion sequence after the ball"""
    i = ball_id(ball)
    keys, slack = b._keys
    hull = b.hull_ids[i]
    inside = b._intersections([hull])[0] == b.sizes[hull]
    candidates = inside & (keys >= 2 * keys[i] * (1 - slack))
    pool = candidates if candidates.any() else inside
    if not pool.any():
        raise BasisError("No ball contains the hull of ball {}".format(i))
    return int(np.where(pool, keys, np.inf).argmin())


def _check_two_balls(b, i):
    keys, slack = b._keys
    hull = b.hull_ids[i]
    meets = b._intersections([i])[0] > 0
    qualifying = meets & (keys <= 2 * keys[i] * (1 + slack))
    escaping = qualifying & (b._intersections([hull])[0] < b.sizes)
    if escaping.any():
        raise BasisError("The basis violates B4: ball {} meets ball {} but is not inside its hull {}".format(
            int(np.argmax(escaping)), i, int(hull)))


def exhaustion(b, seed):
    """The sequence G_1 = seed, G_(k+1) ⊇ G_k*, up to the whole space"""
    ids = [ball_id(seed)]
    while b.sizes[ids[-1]] < b.space.size:
        _check_two_balls(b, ids[-1])
        nxt = successor(b, ids[-1])
        if nxt == ids[-1] or b.measures[nxt] <= b.measures[ids[-1]]:
            raise BasisError("The exhaustion from ball {} stalls at ball {}".format(ids[0], nxt))
        ids.append(nxt)
    res = ExhaustionSequence(b, ids)
    LOGGER.debug("Exhaustion from ball {}: {} balls, growth {}..{}".format(
        ids[0], len(ids), res.min_growth, res.max_growth))
    return res


def greedy_cover(b, e, cover):
    """Pairwise disjoint balls picked from cover whose hulls cover e

    At each step the ball of largest measure among those disjoint from the
    already selected ones is picked, the smallest id first on ties; it is in
    particular larger than half the sup of the candidates.
    """
    ids = sorted(set(ball_id(ball) for ball in cover))
    if not ids:
        if len(e):
            raise BasisError("An empty cover does not cover a nonempty set")
        return []
    covered = b.membership[ids].any(axis=0)
    missing = e.indices[~covered[e.indices]]
    if missing.size:
        raise BasisError("The cover misses point {} of the set".format(int(missing[0])))
    keys, _ = b._keys
    ids = np.array(ids)
    available = np.ones(ids.size, dtype=bool)
    selected = []
    taken = np.zeros(b.space.size, dtype=bool)
    while available.any():
        pick = int(np.where(available, keys[ids], -np.inf).argmax())
        ball = int(ids[pick])
        selected.append(ball)
        taken[b.members_of(ball)] = True
        for j in np.flatnonzero(available):
            if taken[b.members_of(ids[j])].any():
                available[j] = False
    LOGGER.debug("Greedy cover selected {} of {} balls".format(len(selected), ids.size))
    return [b.ball(i) for i in selected]


def d_of(x, ball, b, flag=False):
    """d(x, B): the least measure of a ball containing B and x

    When no ball contains both, the value is the sentinel +inf. With `flag`,
    return (value, found) instead, found being False for the sentinel.
    """
    value = float(b.distance_rows([ball_id(ball)])[0][x])
    found = not math.isinf(value)
    if not found:
        LOGGER.warning("No ball of {} contains ball {} and point {}".format(b.name, ball_id(ball), x))
    return (value, found) if flag else value
