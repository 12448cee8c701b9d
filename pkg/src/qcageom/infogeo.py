"""Information distance between qubit subsystems and derived fields.

The central quantity is the pairwise distance

    delta(A, B) = 2 S(AB) - S(A) - S(B)        [bits]

which is 0 for pure product marginals, negative in the presence of
bipartite quantum correlations, and positive when classical uncertainty
in the joint system dominates.  It can be negative, so the geometry it
induces is pseudo-Riemannian rather than Riemannian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .statealg import (
    DensityMatrix,
    StateVector,
    partial_trace,
    von_neumann_entropy,
)

#: Sentinel for pairs that were not requested in a DistanceField.  Zero is a
#: meaningful distance (the "null distance" case), so it cannot double as a
#: missing-value marker.
UNCOMPUTED = float("nan")


def _reduced_entropy(joint: DensityMatrix, part: set[int]) -> float:
    if part == set(joint.labels):
        return von_neumann_entropy(joint)
    return von_neumann_entropy(partial_trace(joint, part))


def info_distance(joint: DensityMatrix, part_a: Iterable[int], part_b: Iterable[int]) -> float:
    """2 S(AB) - S(A) - S(B) over reductions of `joint`, in bits."""
    a, b = set(part_a), set(part_b)
    if not a or not b:
        raise ValueError("both parts must be nonempty")
    if a & b:
        raise ValueError("parts must be disjoint")
    missing = (a | b) - set(joint.labels)
    if missing:
        raise ValueError(f"labels {sorted(missing)!r} not in the joint state")
    s_ab = _reduced_entropy(joint, a | b)
    return 2.0 * s_ab - _reduced_entropy(joint, a) - _reduced_entropy(joint, b)


def mutual_information(joint: DensityMatrix, part_a: Iterable[int], part_b: Iterable[int]) -> float:
    """S(A) + S(B) - S(AB) in bits."""
    a, b = set(part_a), set(part_b)
    if not a or not b:
        raise ValueError("both parts must be nonempty")
    if a & b:
        raise ValueError("parts must be disjoint")
    missing = (a | b) - set(joint.labels)
    if missing:
        raise ValueError(f"labels {sorted(missing)!r} not in the joint state")
    return _reduced_entropy(joint, a) + _reduced_entropy(joint, b) - _reduced_entropy(joint, a | b)


def site_entropies(state: StateVector, labels: Sequence[int] | None = None) -> dict[int, float]:
    """Single-qubit reduced entropies S(q_i), in bits."""
    labels = tuple(labels) if labels is not None else state.labels
    return {lab: von_neumann_entropy(partial_trace(state, {lab})) for lab in labels}


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Symmetric matrix of pairwise distances over an ordered label list.

    Entries for pairs that were not computed hold NaN; the diagonal is
    exactly zero.
    """

    time_step: int
    labels: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        n = len(self.labels)
        if vals.shape != (n, n):
            raise ValueError(f"values shape {vals.shape} does not match {n} labels")
        asym = np.nanmax(np.abs(vals - vals.T), initial=0.0)
        if asym > 1e-10:
            raise ValueError(f"distance field asymmetric by {asym!r}")
        if np.any(np.diagonal(vals) != 0.0):
            raise ValueError("distance field diagonal must be exactly 0")
        both_nan = np.isnan(vals) & np.isnan(vals.T)
        if not np.all(np.isnan(vals) == both_nan):
            raise ValueError("NaN sentinel pattern must be symmetric")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", tuple(self.labels))

    def value(self, a: int, b: int) -> float:
        return float(self.values[self.labels.index(a), self.labels.index(b)])

    def computed_pairs(self) -> list[tuple[int, int]]:
        out = []
        for i in range(len(self.labels)):
            for j in range(i + 1, len(self.labels)):
                if not math.isnan(self.values[i, j]):
                    out.append((self.labels[i], self.labels[j]))
        return out


def _select_pairs(labels: tuple[int, ...], pairs) -> list[tuple[int, int]]:
    if pairs == "all_pairs":
        return [(a, b) for i, a in enumerate(labels) for b in labels[i + 1:]]
    if pairs == "nearest_neighbor":
        return [(labels[i], labels[i + 1]) for i in range(len(labels) - 1)]
    chosen = []
    for a, b in pairs:
        if a == b or a not in labels or b not in labels:
            raise ValueError(f"bad pair ({a!r}, {b!r})")
        chosen.append((a, b))
    if not chosen:
        raise ValueError("empty pair selection")
    return chosen


def distance_field(
    state: StateVector,
    pairs="all_pairs",
    include_boundary: bool = False,
    boundary_labels: Iterable[int] = (),
    time_step: int = 0,
) -> DistanceField:
    """Pairwise information distances from 2-qubit reductions of a pure state.

    `pairs` is "all_pairs", "nearest_neighbor" (chain adjacency in label
    order), or an explicit iterable of label pairs, e.g. the edge set of a
    slice complex.  Boundary labels are dropped unless `include_boundary`.
    """
    boundary = set(boundary_labels)
    labels = tuple(l for l in state.labels if include_boundary or l not in boundary)
    if len(labels) < 2:
        raise ValueError("need at least two labels for a distance field")
    values = np.full((len(labels), len(labels)), UNCOMPUTED)
    np.fill_diagonal(values, 0.0)
    index = {lab: i for i, lab in enumerate(labels)}
    for a, b in _select_pairs(labels, pairs):
        joint = partial_trace(state, {a, b})
        d = info_distance(joint, {a}, {b})
        values[index[a], index[b]] = d
        values[index[b], index[a]] = d
    return DistanceField(time_step=time_step, labels=labels, values=values)


@dataclass(frozen=True)
class BlockReport:
    """Structure of an all-pairs distance field split by its zero-graph.

    Sites land in one region when their mutual distance is below `tol`.
    The three-region signature of an entangled block in progress is two
    regions with every cross pair at least `positive_tol`.
    """

    regions: tuple[tuple[int, ...], ...]
    pattern_holds: bool
    cross_min: float | None
    note: str


def block_structure_report(
    field: DistanceField,
    tol: float = 1e-8,
    positive_tol: float = 1e-6,
    seed_site: int | None = None,
) -> BlockReport:
    """Partition sites by null distances and test the block pattern."""
    labels = field.labels
    n = len(labels)
    if np.any(np.isnan(field.values)):
        raise ValueError("block structure needs an all-pairs field")
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if abs(field.values[i, j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    regions = sorted(groups.values(), key=lambda g: (len(g), g))
    cross = [
        field.values[i, j]
        for gi in regions
        for gj in regions
        if gi is not gj
        for i in gi
        for j in gj
    ]
    cross_min = float(min(cross)) if cross else None
    ok = len(regions) == 2 and cross_min is not None and cross_min >= positive_tol
    for g in regions:
        for i in g:
            for j in g:
                if abs(field.values[i, j]) > tol:
                    ok = False
    if len(regions) == 1:
        note = "single null region: no positive boundary (uniform field)"
    elif ok:
        note = "two regions separated by a positive-distance boundary"
    else:
        note = "irregular pattern"
    region_labels = tuple(tuple(labels[i] for i in g) for g in regions)
    if seed_site is not None and len(region_labels) == 2:
        if seed_site in region_labels[1]:
            region_labels = (region_labels[1], region_labels[0])
    return BlockReport(regions=region_labels, pattern_holds=ok, cross_min=cross_min, note=note)


@dataclass(frozen=True)
class SweepCurve:
    """delta sampled over a strictly increasing parameter grid."""

    grid: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise ValueError("grid and values differ in length")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", tuple(float(z) for z in self.grid))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def sign_changes(self) -> list[tuple[float, float]]:
        """Grid intervals whose endpoint values have strictly opposite signs."""
        out = []
        for i in range(len(self.grid) - 1):
            v0, v1 = self.values[i], self.values[i + 1]
            if (v0 > 0 and v1 < 0) or (v0 < 0 and v1 > 0):
                out.append((self.grid[i], self.grid[i + 1]))
        return out


_BELL_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def werner_state(z: float) -> DensityMatrix:
    """(1-z) I/4 + z |b+><b+| on labels (0, 1)."""
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    rho = (1.0 - z) * np.eye(4, dtype=complex) / 4.0 + z * np.outer(_BELL_PLUS, _BELL_PLUS.conj())
    return DensityMatrix(rho, (0, 1))


def pure_family_state(z: float) -> StateVector:
    """sqrt(1-z)|00> + sqrt(z)(|01>+|10>), normalized by 1/sqrt(1+z).

    The raw two-parameter family has squared norm 1+z; the stated
    properties (zero distance only at z=0, negative elsewhere) hold for
    the normalized family, so normalization is applied here.
    """
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    amps = np.array([math.sqrt(1.0 - z), math.sqrt(z), math.sqrt(z), 0.0], dtype=complex)
    return StateVector(amps / math.sqrt(1.0 + z), (0, 1))


def werner_sweep(grid: Iterable[float]) -> SweepCurve:
    """delta(z) for the Werner family; +2 at z=0, -2 at z=1."""
    grid = tuple(grid)
    vals = [info_distance(werner_state(z), {0}, {1}) for z in grid]
    return SweepCurve(grid=grid, values=tuple(vals))


def pure_family_sweep(grid: Iterable[float]) -> SweepCurve:
    """delta(z) for the normalized pure family; 0 at z=0, negative beyond."""
    grid = tuple(grid)
    vals = []
    for z in grid:
        state = pure_family_state(z)
        vals.append(info_distance(partial_trace(state, {0, 1}), {0}, {1}))
    return SweepCurve(grid=grid, values=tuple(vals))


def werner_null_crossing(tol: float = 1e-8) -> float:
    """Bisect the unique z* in (1/3, 1) where the Werner delta changes sign."""
    lo, hi = 1.0 / 3.0, 1.0

    def f(z: float) -> float:
        return info_distance(werner_state(z), {0}, {1})

    flo = f(lo)
    if flo <= 0:
        raise ValueError("no sign change bracketed above z = 1/3")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
