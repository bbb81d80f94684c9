#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Kernel structures: one unit-mass density φ_B per ball, under an envelope ω

A kernel structure attaches to each of its balls a nonnegative density φ_B
with ∫φ_B dμ = 1, comparable to 𝕀_B/μ(B) from below on B and dominated by
ω(d(x,B)/μ(B))/μ(B) off B, ω being a modulus of continuity.
"""

import math

import numpy as np
from cached_property import cached_property
from scipy import integrate

from ballcalc.basis import ChainBasis, DyadicBasis, GridBasis, ball_id, family_table
from ballcalc.errors import KernelError
from ballcalc.lib import chunks, createfile, csv_text, parallel_map
from ballcalc.log import get_logger
from ballcalc.report import ValidationReport

LOGGER = get_logger(__name__)

K1_TOLERANCE = 1e-10
SPARSE_THRESHOLD = 1e-15
DOUBLING_GRID = 2.0 ** (np.arange(256) / 4.0)
PANELS = 64
DIVERGENCE_SHARE = 1e-10
LN2 = math.log(2.0)
SCAN_CELLS = 1 << 22


def _log2_antiderivative(t):
    """A primitive of log2(1 + t)"""
    return ((1.0 + t) * np.log1p(t) - t) / LN2


class Modulus(object):
    """A non-increasing ω on [1, ∞) with ω(1) = 1"""
    name = "modulus"

    def __call__(self, t):
        return float(self.values(np.array([t], dtype=float))[0])

    def values(self, t):
        raise NotImplementedError()

    @cached_property
    def integral(self):
        raise NotImplementedError()

    @cached_property
    def doubling_constants(self):
        """(c0, c0'): max ω(2t)/ω(t) and max ω(t)/ω(2t) on the sample grid"""
        at = self.values(DOUBLING_GRID)
        twice = self.values(2 * DOUBLING_GRID)
        alive = at > 0
        c0 = float(np.max(twice[alive] / at[alive])) if alive.any() else 0.0
        if np.any(alive & (twice == 0)):
            c0_prime = math.inf
        else:
            c0_prime = float(np.max(at[alive] / twice[alive])) if alive.any() else 1.0
        return c0, c0_prime

    def __repr__(self):
        return "<{} {}>".format(self.__class__.__name__, self.name)


class StepModulus(Modulus):
    """ω = values[i] on [breaks[i], breaks[i+1]), tail beyond the last break"""

    def __init__(self, breaks, values, tail=0.0, name="step"):
        breaks = np.array(breaks, dtype=float)
        values = np.array(values, dtype=float)
        if breaks.size != values.size + 1 or breaks[0] != 1.0:
            raise KernelError("A step modulus needs breaks 1 = b_0 < ... < b_m around its m values")
        if np.any(np.diff(breaks) <= 0):
            raise KernelError("The breaks of a step modulus must increase")
        steps = np.concatenate(([1.0], values, [tail]))
        if np.any(steps < 0) or np.any(steps > 1) or np.any(np.diff(steps) > 0):
            raise KernelError("A modulus must be non-increasing with values in [0, 1]")
        self.breaks = breaks
        self.steps = values
        self.tail = float(tail)
        self.name = name

    def values(self, t):
        t = np.asarray(t, dtype=float)
        index = np.searchsorted(self.breaks, t, side="right") - 1
        padded = np.concatenate((self.steps, [self.tail]))
        res = padded[np.clip(index, 0, padded.size - 1)]
        return np.where(t <= 1.0, 1.0, res)

    @cached_property
    def integral(self):
        """1 + ∫_1^∞ ω(t) log2(1+t) dt, exact on the steps"""
        if self.tail > 0:
            return math.inf
        primitive = _log2_antiderivative(self.breaks)
        return float(1.0 + np.sum(self.steps * np.diff(primitive)))


class FunctionModulus(Modulus):
    """ω given in closed form, integrated by quadrature on dyadic panels"""

    def __init__(self, function, name="function"):
        self.function = function
        self.name = name

    def values(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t <= 1.0, 1.0, np.minimum(1.0, self.function(np.maximum(t, 1.0))))

    @cached_property
    def integral(self):
        def integrand(t):
            return float(self.function(t)) * math.log2(1.0 + t)
        panels = []
        for k in range(PANELS):
            value, _ = integrate.quad(integrand, 2.0 ** k, 2.0 ** (k + 1), limit=200, epsabs=1e-14, epsrel=1e-10)
            panels.append(value)
        total = sum(panels)
        if not math.isfinite(total) or panels[-1] > DIVERGENCE_SHARE * total:
            LOGGER.warning("I(ω) diverges for {}: the panel [2^{}, 2^{}] still carries {:g}".format(
                self.name, PANELS - 1, PANELS, panels[-1]))
            return math.inf
        return 1.0 + total


def indicator_modulus():
    """ω(1) = 1 and 0 beyond"""
    return StepModulus([1.0], [], name="indicator")


def i_omega(m):
    """I(ω) = 1 + ∫_1^∞ ω(t) log2(1+t) dt, +inf when it diverges"""
    return m.integral


class Profile(object):
    """A radial profile ξ: [0, ∞) -> [0, ∞)"""

    def __init__(self, name, function):
        self.name = name
        self.function = function

    def __call__(self, t):
        return np.asarray(self.function(np.asarray(t, dtype=float)), dtype=float)

    def __repr__(self):
        return "<Profile {}>".format(self.name)


def _positive(text, what):
    try:
        value = float(text)
    except ValueError:
        raise KernelError("Invalid {} parameter: {}".format(what, text))
    if not value > 0:
        raise KernelError("The {} parameter must be positive, got {}".format(what, text))
    return value


def profile_preset(preset):
    """indicator, power:p, geometric:q, plateau:p or the path of a (t, ξ(t)) CSV table"""
    name, _, parameter = preset.partition(":")
    if name == "indicator":
        return Profile("indicator", lambda t: (t <= 1.0).astype(float))
    if name == "power":
        p = _positive(parameter, "power")
        return Profile(preset, lambda t: (1.0 + t) ** -p)
    if name == "geometric":
        q = _positive(parameter, "geometric")
        if q >= 1:
            raise KernelError("The geometric profile needs 0 < q < 1, got {}".format(q))
        return Profile(preset, lambda t: q ** t)
    if name == "plateau":
        p = _positive(parameter, "plateau")
        return Profile(preset, lambda t: np.where(t <= 1.0, 1.0, np.maximum(t, 1.0) ** -p))
    return profile_table(preset)


def profile_table(path):
    """ξ = ξ_i on [t_i, t_(i+1)), the last value holding beyond the last row"""
    try:
        with open(path, "r") as f:
            rows = [line.strip().split(",") for line in f if line.strip() and not line.startswith("#")]
        if rows and not _is_number(rows[0][0]):
            rows = rows[1:]
        table = np.array([[float(v) for v in row[:2]] for row in rows], dtype=float)
    except (IOError, OSError, ValueError, IndexError) as e:
        raise KernelError("Cannot read the profile table {}: {}".format(path, e))
    if table.ndim != 2 or table.shape[0] == 0 or table[0, 0] != 0 or np.any(np.diff(table[:, 0]) <= 0):
        raise KernelError("{}: the t column must start at 0 and increase".format(path))
    ts, xis = table[:, 0], table[:, 1]
    return Profile(path, lambda t: xis[np.searchsorted(ts, t, side="right") - 1])


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def alpha_preset(preset, length):
    """indicator, geometric:q, power:p or the path of a one-value-per-line file"""
    name, _, parameter = preset.partition(":")
    k = np.arange(length, dtype=float)
    if name == "indicator":
        return np.where(k == 0, 1.0, 0.0)
    if name == "geometric":
        return _positive(parameter, "geometric") ** k
    if name == "power":
        return (k + 1.0) ** -_positive(parameter, "power")
    try:
        with open(preset, "r") as f:
            values = [float(line) for line in f if line.strip() and not line.startswith("#")]
    except (IOError, OSError, ValueError) as e:
        raise KernelError("Cannot read the sequence {}: {}".format(preset, e))
    values = np.array(values[:length], dtype=float)
    return np.concatenate((values, np.zeros(length - values.size)))


def j_alpha(alpha):
    """J(α) = Σ (k+1) α_k"""
    alpha = np.asarray(alpha, dtype=float)
    return float(np.sum((np.arange(alpha.size) + 1.0) * alpha))


def j_xi(xi, dim, n):
    """J(ξ) = Σ over the offsets y of the grid of ξ(|y|) log2(2+|y|)

    Raises KernelError when the radial integral of ξ(r) log(2+r) r^(d-1)
    diverges, whatever the grid size.
    """
    def integrand(r):
        return float(xi(np.array([r]))[0]) * math.log(2.0 + r) * r ** (dim - 1)
    panels = [integrate.quad(integrand, 0.0, 1.0, limit=200)[0]]
    for k in range(PANELS):
        panels.append(integrate.quad(integrand, 2.0 ** k, 2.0 ** (k + 1), limit=200, epsabs=1e-14, epsrel=1e-10)[0])
    total = sum(panels)
    if not math.isfinite(total) or panels[-1] > DIVERGENCE_SHARE * total:
        raise KernelError("J(ξ) diverges for the profile {} in dimension {}".format(xi.name, dim))
    offsets = _torus_norms(dim, n)
    return float(np.sum(xi(offsets) * np.log2(2.0 + offsets)))


def _torus_norms(dim, n):
    """Euclidean length of each displacement of the torus, by flat index"""
    axis = np.arange(n)
    axis = np.minimum(axis, n - axis).astype(float)
    if dim == 1:
        return axis
    return np.sqrt(axis[:, None] ** 2 + axis[None, :] ** 2).reshape(-1)


class KernelStructure(object):
    """Densities φ_B for the balls listed in ball_ids, under the envelope omega"""
    kind = "kernel"

    def __init__(self, basis, omega, ball_ids, name=None):
        self.basis = basis
        self.omega = omega
        self.ball_ids = np.array(sorted(set(int(i) for i in ball_ids)), dtype=np.int64)
        self._has = np.zeros(basis.count, dtype=bool)
        self._has[self.ball_ids] = True
        self.name = name or self.kind

    def has_kernel(self, ball):
        return bool(self._has[ball_id(ball)])

    def _check(self, ball):
        i = ball_id(ball)
        if not 0 <= i < self.basis.count or not self._has[i]:
            raise KernelError("Ball {} has no kernel in {}".format(i, self.name))
        return i

    def row(self, ball):
        """The density φ_B at every point"""
        raise NotImplementedError()

    def rows(self, balls):
        return np.array([self.row(ball) for ball in balls]).reshape(len(balls), self.basis.space.size)

    def averages(self, values):
        """∫ values φ_B dμ for every ball of the basis, nan where B has no kernel"""
        weighted = np.asarray(values, dtype=float) * self.basis.space.weights
        res = np.full(self.basis.count, np.nan)
        for sl in chunks(self.ball_ids.size, max(1, SCAN_CELLS // self.basis.space.size)):
            ids = self.ball_ids[sl]
            res[ids] = self.rows(ids) @ weighted
        return res

    def average(self, f, ball):
        return float(self.row(self._check(ball)) @ (f.values * self.basis.space.weights))

    @property
    def scan_ids(self):
        """Balls whose kernels the validation scans"""
        return self.ball_ids

    @property
    def declared(self):
        """Constants known by construction, if any"""
        return {}

    @cached_property
    def i_omega(self):
        return self.omega.integral

    @cached_property
    def constants(self):
        return validate_kernels(self, self.basis).constants

    def dump(self, path):
        """Write the nonzero weights as (ball, point, weight) CSV rows"""
        text = [csv_text(["ball", "point", "weight"], [])]
        for sl in chunks(self.ball_ids.size, max(1, SCAN_CELLS // self.basis.space.size)):
            ids = self.ball_ids[sl]
            block = self.rows(ids)
            balls, points = np.nonzero(block)
            rows = [[int(ids[b]), int(p), float(block[b, p])] for b, p in zip(balls, points)]
            text.append(csv_text([], rows).split("\r\n", 1)[1])
        return createfile(path, "".join(text), makedirs=True)

    def couple(self, per_point=None):
        return KBCouple(self, per_point)

    def __repr__(self):
        return "<{} {} on {}>".format(self.__class__.__name__, self.name, self.basis.name)


class DenseKernels(KernelStructure):
    """Kernels given explicitly as a mapping ball id -> density"""
    kind = "dense"

    def __init__(self, basis, densities, omega, name=None):
        super(DenseKernels, self).__init__(basis, omega, densities.keys(), name=name)
        self._rows = {}
        for i, row in densities.items():
            row = np.asarray(row, dtype=float).reshape(-1)
            if row.size != basis.space.size or np.any(row < 0) or not np.all(np.isfinite(row)):
                raise KernelError("The density of ball {} must be finite and nonnegative at every point".format(i))
            self._rows[int(i)] = row

    def row(self, ball):
        return self._rows[self._check(ball)]


class IndicatorKernels(KernelStructure):
    """φ_B = 𝕀_B / μ(B)"""
    kind = "indicator"

    def __init__(self, basis):
        super(IndicatorKernels, self).__init__(basis, indicator_modulus(), np.arange(basis.count),
                                               name="indicator")

    def row(self, ball):
        i = self._check(ball)
        res = np.zeros(self.basis.space.size)
        res[self.basis.members_of(i)] = 1.0 / self.basis.measures[i]
        return res

    def averages(self, values):
        return self.basis.averages(values)

    @property
    def declared(self):
        return {"c1": 1.0, "c2": 1.0}


def indicator_kernels(b):
    return IndicatorKernels(b)


class TranslationKernels(KernelStructure):
    """Translation invariant kernels on a grid torus, one profile per radius

    profiles maps a radius to the density of the kernel centered at the origin,
    indexed by flat displacement. Only the balls of those radii get a kernel.
    """
    kind = "translation"

    def __init__(self, basis, profiles, omega, name=None, j_value=None):
        if not isinstance(basis, GridBasis):
            raise KernelError("Translation invariant kernels need a grid basis, got {}".format(basis.name))
        points = basis.space.size
        self.profiles = {}
        ids = []
        for radius, profile in sorted(profiles.items()):
            if not 1 <= radius <= basis.top_radius:
                raise KernelError("No ball of radius {} in {}".format(radius, basis.name))
            self.profiles[int(radius)] = np.asarray(profile, dtype=float)
            ids.extend(basis.id_of(np.arange(points), radius))
        self.j_value = j_value
        super(TranslationKernels, self).__init__(basis, omega, ids, name=name)

    @cached_property
    def displacements(self):
        """Flat index of y - x for every pair of points (x, y)"""
        grid = self.basis.grid
        delta = (grid[None, :, :] - grid[:, None, :]) % self.basis.n
        return self.basis._flat_index(delta)

    def row(self, ball):
        i = self._check(ball)
        return self.profiles[self.basis.radius_of(i)][self.displacements[self.basis.center_of(i)]]

    def averages(self, values):
        weighted = np.asarray(values, dtype=float) * self.basis.space.weights
        res = np.full(self.basis.count, np.nan)
        points = self.basis.space.size
        for radius, profile in self.profiles.items():
            start = self.basis.id_of(0, radius)
            res[start:start + points] = profile[self.displacements] @ weighted
        return res

    @property
    def radii(self):
        return sorted(self.profiles)

    @property
    def scan_ids(self):
        # every kernel is a translate of the one centered at the origin
        return np.array([self.basis.id_of(0, radius) for radius in self.radii], dtype=np.int64)

    def centered_family(self):
        """For each point, its kernel balls ordered by radius"""
        return [
            np.array([self.basis.id_of(x, r) for r in self.radii], dtype=np.int64)
            for x in range(self.basis.space.size)
        ]

    @cached_property
    def centered_table(self):
        return family_table(self.centered_family())

    @cached_property
    def containing_table(self):
        """For each point, the kernel balls containing it"""
        return family_table([ids[self._has[ids]] for ids in self.basis.containing])


def _normalized(profile, weight):
    profile = profile / (profile.sum() * weight)
    profile[profile < SPARSE_THRESHOLD] = 0.0
    return profile


def convolution_kernels(b, xi):
    """φ_B(x,r)(y) = ξ(|y - x| / r), renormalized to unit mass on the torus"""
    if not isinstance(b, GridBasis):
        raise KernelError("Convolution kernels need a grid basis, got {}".format(b.name))
    reference = float(xi(np.array([1.0]))[0])
    if reference <= 0:
        raise KernelError("The profile {} must be positive at 1".format(xi.name))
    norms = _torus_norms(b.dim, b.n)
    samples = np.unique(np.concatenate([norms / r for r in b.radii]))
    sampled = xi(samples)
    if np.any(sampled < 0) or not np.all(np.isfinite(sampled)):
        raise KernelError("The profile {} must be finite and nonnegative".format(xi.name))
    increasing = np.flatnonzero(np.diff(sampled) > 1e-15 * max(1.0, sampled.max()))
    if increasing.size:
        t = samples[increasing[0] + 1]
        raise KernelError("The profile {} is not non-increasing: it grows at t={:g}".format(xi.name, t))
    j_value = j_xi(xi, b.dim, b.n)
    weight = b.space.weights[0]
    profiles = {int(r): _normalized(xi(norms / r), weight) for r in b.radii}
    dim = b.dim
    omega = FunctionModulus(lambda t: xi(np.asarray(t, dtype=float) ** (1.0 / dim)) / reference,
                            name="xi(t^(1/{}))".format(dim))
    ks = TranslationKernels(b, profiles, omega, name="convolution({})".format(xi.name), j_value=j_value)
    LOGGER.debug("Built {} with J(ξ)={:g}".format(ks.name, j_value))
    return ks


def fejer_radius(n_grid, degree):
    return max(1, n_grid // (2 * (degree + 1)))


def fejer_profile(n_grid, degree):
    """The discrete Fejér kernel F_m at the n_grid points of the circle"""
    theta = 2 * np.pi * np.arange(n_grid) / n_grid
    k = np.arange(-degree, degree + 1)
    coefficients = 1.0 - np.abs(k) / (degree + 1.0)
    return np.maximum(np.cos(np.outer(theta, k)) @ coefficients, 0.0)


def fejer_kernels(n_grid, degrees, basis=None):
    """Fejér kernels F_m, attached to the arcs of radius about n_grid/(2(m+1))"""
    degrees = sorted(set(int(m) for m in degrees))
    if not degrees:
        raise KernelError("At least one Fejér degree is needed")
    if degrees[0] < 0 or degrees[-1] > n_grid // 2:
        raise KernelError("Fejér degrees must lie in 0..{} on a grid of {} points".format(n_grid // 2, n_grid))
    b = basis if basis is not None else GridBasis(1, n_grid)
    if not isinstance(b, GridBasis) or b.dim != 1 or b.n != n_grid:
        raise KernelError("Fejér kernels live on the circle grid of {} points".format(n_grid))
    profiles = {}
    for m in degrees:
        radius = fejer_radius(n_grid, m)
        if radius in profiles:
            raise KernelError("Fejér degrees {} and another one share the radius {} on {} points".format(
                m, radius, n_grid))
        profiles[radius] = _normalized(fejer_profile(n_grid, m), b.space.weights[0])
    omega = FunctionModulus(lambda t: 4.0 / (1.0 + np.asarray(t, dtype=float)) ** 2, name="4/(1+t)^2")
    ks = TranslationKernels(b, profiles, omega, name="fejer({})".format(",".join(str(m) for m in degrees)))
    ks.degrees = degrees
    return ks


class ChainKernels(KernelStructure):
    """φ_I = Σ_j α_j 𝕀_(I_j)/μ(I_j) / Σ_j α_j over the ancestors I_j of I

    I_0 = I, I_1 its parent and so on up to the root.
    """
    kind = "chain"

    def __init__(self, basis, alpha):
        if not isinstance(basis, ChainBasis):
            raise KernelError("Chain weighted kernels need a basis with a parent chain, got {}".format(basis.name))
        alpha = np.asarray(alpha, dtype=float).reshape(-1)
        depth = int(basis.depths.max()) + 1
        if alpha.size < depth:
            alpha = np.concatenate((alpha, np.zeros(depth - alpha.size)))
        if np.any(alpha < 0) or not np.all(np.isfinite(alpha)):
            raise KernelError("The weights α must be finite and nonnegative")
        if not np.any(alpha > 0):
            raise KernelError("The weights α are all zero")
        if alpha[0] <= 0:
            raise KernelError("α_0 must be positive for the kernels to dominate 𝕀_I/μ(I)")
        self.alpha = alpha
        self.depth = depth
        # s_k = Σ_(j>=k) α_j 2^-j
        self.envelope_steps = np.cumsum((alpha * 0.5 ** np.arange(alpha.size))[::-1])[::-1]
        omega = StepModulus(2.0 ** np.arange(alpha.size + 1), self.envelope_steps / self.envelope_steps[0],
                            name="dyadic steps")
        super(ChainKernels, self).__init__(basis, omega, np.arange(basis.count),
                                           name="chain-weighted({} weights)".format(alpha.size))

    @cached_property
    def normalizers(self):
        """Σ_(j <= depth(I)) α_j for every ball"""
        return np.cumsum(self.alpha)[self.basis.depths]

    def raw_row(self, ball):
        i = self._check(ball)
        res = np.zeros(self.basis.space.size)
        for j, a in enumerate(self.basis.ancestors(i)):
            if self.alpha[j]:
                res[self.basis.members_of(a)] += self.alpha[j] / self.basis.measures[a]
        return res

    def row(self, ball):
        return self.raw_row(ball) / self.normalizers[ball_id(ball)]

    def averages(self, values):
        basis = self.basis
        averages = basis.averages(values)
        ancestor = np.arange(basis.count)
        total = self.alpha[0] * averages
        for j in range(1, self.depth):
            alive = basis.depths >= j
            if not alive.any():
                break
            ancestor = np.where(alive, basis.parents[np.maximum(ancestor, 0)], ancestor)
            total = total + np.where(alive, self.alpha[j] * averages[ancestor], 0.0)
        return total / self.normalizers

    @property
    def j_value(self):
        return j_alpha(self.alpha)


def dyadic_weighted_kernels(b, alpha):
    """Chain weighted kernels on a dyadic or martingale basis"""
    ks = ChainKernels(b, alpha)
    LOGGER.debug("Built {} on {}, J(α)={:g}".format(ks.name, b.name, ks.j_value))
    return ks


def envelope_check(ks):
    """max of φ_I(y)μ(I) / ω(d(y,I)/μ(I)) before normalization, at most 1 on dyadic bases"""
    if not isinstance(ks, ChainKernels):
        raise KernelError("The envelope check applies to chain weighted kernels")
    basis = ks.basis
    raw_omega = ks.envelope_steps[0]

    def block(sl):
        ids = ks.ball_ids[sl]
        raw = np.array([ks.raw_row(i) for i in ids]) * basis.measures[ids][:, None]
        t = basis.distance_rows(ids) / basis.measures[ids][:, None]
        bound = ks.omega.values(t) * raw_omega
        ratio = np.where(raw > 0, raw / np.where(bound > 0, bound, np.nan), 0.0)
        ratio = np.where(np.isnan(ratio), np.inf, ratio)
        return float(ratio.max())
    return max(parallel_map(block, chunks(ks.ball_ids.size, max(1, SCAN_CELLS // basis.space.size))))


class KBCouple(object):
    """Kernels plus, for each point, the family of balls the sup runs over"""

    def __init__(self, kernels, per_point=None):
        self.kernels = kernels
        if per_point is None:
            per_point = kernels.basis.per_point
        if len(per_point) != kernels.basis.space.size:
            raise KernelError("The basis-structure must list a family for each point")
        for x, ids in enumerate(per_point):
            ids = np.asarray(ids, dtype=np.int64)
            missing = ids[~kernels._has[ids]]
            if missing.size:
                raise KernelError("Ball {} of the family of point {} has no kernel".format(int(missing[0]), x))
        self.per_point = per_point

    @property
    def basis(self):
        return self.kernels.basis

    @cached_property
    def table(self):
        if self.per_point is self.kernels.basis.per_point:
            return self.kernels.basis.per_point_table
        return family_table(self.per_point)


def validate_kernels(ks, b):
    """Check K1, measure the tightest K2 constants and the envelope constants"""
    if b.count != ks.basis.count or b.space.size != ks.basis.space.size:
        raise KernelError("The kernels of {} do not belong to {}".format(ks.basis.name, b.name))
    report = ValidationReport(ks.name)
    weights = b.space.weights
    omega = ks.omega

    def block(ids):
        rows = ks.rows(ids)
        measures = b.measures[ids]
        residuals = np.abs(rows @ weights - 1.0)
        scaled = rows * measures[:, None]
        inside = b.membership[ids]
        lower = np.where(inside, scaled, np.inf).min(axis=1)
        envelope = omega.values(b.distance_rows(ids) / measures[:, None])
        upper = np.where(scaled > 0, scaled / np.where(envelope > 0, envelope, np.nan), 0.0)
        upper = np.where(np.isnan(upper), np.inf, upper)
        points = upper.argmax(axis=1)
        return residuals, lower, upper.max(axis=1), points

    scan = ks.scan_ids
    results = parallel_map(lambda sl: block(scan[sl]), chunks(scan.size, max(1, SCAN_CELLS // b.space.size)))
    residuals = np.concatenate([r[0] for r in results])
    lower = np.concatenate([r[1] for r in results])
    upper = np.concatenate([r[2] for r in results])
    upper_points = np.concatenate([r[3] for r in results])

    worst = int(np.argmax(residuals))
    report.add("K1", residuals[worst] < K1_TOLERANCE, float(residuals[worst]), int(scan[worst]),
               "" if residuals[worst] < K1_TOLERANCE else
               "the kernel of ball {} has mass {!r}".format(int(scan[worst]), float(ks.row(scan[worst]) @ weights)))
    weakest = int(np.argmin(lower))
    c1 = float(lower[weakest])
    report.add("K2-lower", c1 > 0, c1, int(scan[weakest]),
               "" if c1 > 0 else "the kernel of ball {} vanishes inside it".format(int(scan[weakest])))
    strongest = int(np.argmax(upper))
    c2 = float(upper[strongest])
    report.add("K2-upper", math.isfinite(c2), c2, (int(scan[strongest]), int(upper_points[strongest])),
               "" if math.isfinite(c2) else "ω vanishes where the kernel of ball {} is positive".format(
                   int(scan[strongest])))
    value = ks.i_omega
    report.add("I_omega", math.isfinite(value), value, None, "" if math.isfinite(value) else "I(ω) diverges")
    c0, c0_prime = omega.doubling_constants
    if isinstance(ks, ChainKernels) and isinstance(b, DyadicBasis):
        ratio = envelope_check(ks)
        report.add("envelope", ratio <= 1.0 + 1e-12, ratio, None,
                   "" if ratio <= 1.0 + 1e-12 else "the unnormalized kernels exceed their step envelope")
    report.constant("c1", c1)
    report.constant("c2", c2)
    report.constant("I_omega", value)
    report.constant("c0", c0)
    report.constant("c0_prime", c0_prime)
    j_value = getattr(ks, "j_value", None)
    if j_value is not None:
        report.constant("J", j_value)
    return report
