"""Simplicial complexes on foliation slices and their GF(2) homology.

Two constructions are provided.  The nerve construction assigns one
vertex to the shadow (causal past projected onto the slice) of each
maximal element of a thickened anti-chain, and a simplex to every family
of shadows with a common wire.  The unitary-shadow construction keeps
the individual wires of the slice as vertices and lets every update
gate contribute the full simplex over the sites its rule neighborhood
reaches within the chosen number of global updates; this reflects the
static topology the update rules induce on the register.  With the
controlled-gate simplification, edges joining the two control sites of
a gate are removed unless some other gate's shadow also covers the
pair, which turns the one-update complex into a discrete line.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .causal import AntiChain, CausalPoset, Gate, Wire, thicken

BettiVector = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertex set plus a face-closed family of simplices."""

    vertices: tuple
    simplices: frozenset[frozenset]

    def __post_init__(self):
        verts = tuple(sorted(set(self.vertices)))
        object.__setattr__(self, "vertices", verts)
        simps = frozenset(frozenset(s) for s in self.simplices)
        vert_set = set(verts)
        for s in simps:
            if not s:
                raise ValueError("empty simplex")
            if not s <= vert_set:
                raise ValueError(f"simplex {sorted(s)!r} uses unknown vertices")
            for face in itertools.combinations(s, len(s) - 1):
                if face and frozenset(face) not in simps:
                    raise ValueError(f"face closure violated at {sorted(s)!r}")
        object.__setattr__(self, "simplices", simps)

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable], extra_vertices: Iterable = ()) -> "SimplicialComplex":
        """Downward closure of the given simplices plus isolated vertices."""
        simps = set()
        verts = set(extra_vertices)
        for m in maximal:
            m = tuple(set(m))
            verts.update(m)
            for k in range(1, len(m) + 1):
                for face in itertools.combinations(m, k):
                    simps.add(frozenset(face))
        for v in verts:
            simps.add(frozenset([v]))
        return cls(vertices=tuple(verts), simplices=frozenset(simps))

    @property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def k_simplices(self, k: int) -> list[frozenset]:
        return sorted((s for s in self.simplices if len(s) == k + 1),
                      key=lambda s: tuple(sorted(map(repr, s))))

    def edges(self) -> list[tuple]:
        return [tuple(sorted(e)) for e in self.k_simplices(1)]

    def maximal_simplices(self) -> list[frozenset]:
        return [s for s in self.simplices
                if not any(s < t for t in self.simplices)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (len(s) - 1) for s in self.simplices)

    def without_edges(self, removed: Iterable[tuple]) -> "SimplicialComplex":
        """Drop the given edges and every simplex containing one of them."""
        removed = {frozenset(e) for e in removed}
        kept = [s for s in self.simplices if not any(r <= s for r in removed)]
        return SimplicialComplex(vertices=self.vertices, simplices=frozenset(kept))

    def to_json_obj(self) -> dict:
        return {
            "vertices": [list(v) if isinstance(v, tuple) else v for v in self.vertices],
            "maximal_simplices": sorted(
                [sorted(list(x) if isinstance(x, tuple) else x for x in s)
                 for s in self.maximal_simplices()]
            ),
        }


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


def boundary_rank(complex_: SimplicialComplex, k: int) -> int:
    """Rank of the k-th boundary matrix over GF(2)."""
    if k <= 0 or k > complex_.dim:
        return 0
    faces = {s: i for i, s in enumerate(complex_.k_simplices(k - 1))}
    columns = []
    for s in complex_.k_simplices(k):
        mask = 0
        for face in itertools.combinations(sorted(s, key=repr), k):
            mask |= 1 << faces[frozenset(face)]
        columns.append(mask)
    return _gf2_rank(columns)


def betti(complex_: SimplicialComplex) -> BettiVector:
    """(b0, b1, ..., b_dim) over GF(2): b_k = dim C_k - rank d_k - rank d_{k+1}."""
    d = complex_.dim
    if d < 0:
        return ()
    ranks = [boundary_rank(complex_, k) for k in range(d + 2)]
    return tuple(
        len(complex_.k_simplices(k)) - ranks[k] - ranks[k + 1]
        for k in range(d + 1)
    )


def _strip_trailing_zeros(b: BettiVector) -> BettiVector:
    out = list(b)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _rule_gate_reachable(poset: CausalPoset, node, members: frozenset) -> bool:
    return any(
        isinstance(x, Gate) and x.kind == "rule"
        for x in poset.ancestors(node) & members
    )


def shadow_complex(poset: CausalPoset, base: AntiChain, i: int) -> SimplicialComplex:
    """Nerve of the causal shadows cast on `base` by a thickness-i band.

    Each maximal element of the thickened anti-chain whose history since
    the slice contains a genuine update gate casts its causal past onto
    the slice; identical shadows merge into one vertex.  Identity-only
    histories cast no shadow (they carry the wire, not the computation).
    """
    thick = thicken(poset, base, i)
    shadows = set()
    for m in thick.maximal_nodes:
        if not _rule_gate_reachable(poset, m, thick.members):
            continue
        past = poset.ancestors(m) & base.nodes
        if past:
            shadows.add(frozenset(past))
    if not shadows:
        raise ValueError("no update-gate shadows in the thickened anti-chain")
    vertex_of = {s: tuple(sorted(w.site for w in s)) for s in shadows}
    ordered = sorted(shadows, key=lambda s: vertex_of[s])
    simplices = set()
    for r in range(1, len(ordered) + 1):
        added = False
        for combo in itertools.combinations(ordered, r):
            common = frozenset.intersection(*combo)
            if common:
                simplices.add(frozenset(vertex_of[s] for s in combo))
                added = True
        if not added:
            break
    return SimplicialComplex(
        vertices=tuple(vertex_of[s] for s in ordered),
        simplices=frozenset(simplices),
    )


def _slice_sites(base: AntiChain) -> tuple[int, list[int]]:
    layers = {n.layer for n in base.nodes}
    if len(layers) != 1 or not all(isinstance(n, Wire) for n in base.nodes):
        raise ValueError("base must be a single-layer wire slice")
    return layers.pop(), sorted(n.site for n in base.nodes)


def _species_depth_above(poset: CausalPoset, base_layer: int) -> int:
    depth = 0
    for layer in range(base_layer + 1, poset.n_layers + 1):
        gates = [g for g in poset.gates if g.layer == layer]
        if any(g.kind == "phase" for g in gates):
            break
        depth += 1
    return depth


def unitary_shadow_complex(
    poset: CausalPoset,
    base: AntiChain,
    i: int,
    controlled_simplification: bool = False,
) -> SimplicialComplex:
    """Slice topology induced by the update gates of i global updates.

    Vertices are the individual wires (sites) of the slice.  A rule gate
    at site s, r species layers above the slice, contributes the simplex
    over sites s-w..s+w with w = ceil(r/2): the reach of its rule
    neighborhood measured in global updates.  One global update hence
    yields a chain of 2-simplices; thicker bands fatten the blocks while
    the global line topology persists.
    """
    if i < 1:
        raise ValueError("thickness must be >= 1")
    base_layer, sites = _slice_sites(base)
    available = _species_depth_above(poset, base_layer)
    if 2 * i > available:
        raise ValueError(
            f"thickness {i} needs {2 * i} species layers above layer {base_layer}, "
            f"only {available} available"
        )
    lo, hi = sites[0], sites[-1]
    site_set = set(sites)
    gate_shadows: list[tuple[Gate, frozenset[int]]] = []
    for g in poset.gates:
        r = g.layer - base_layer
        if g.kind != "rule" or not 1 <= r <= 2 * i:
            continue
        w = (r + 1) // 2
        span = frozenset(s for s in range(g.site - w, g.site + w + 1) if s in site_set)
        gate_shadows.append((g, span))
    complex_ = SimplicialComplex.from_maximal(
        [span for _, span in gate_shadows], extra_vertices=sites,
    )
    if not controlled_simplification:
        return complex_
    removed = []
    for g, span in gate_shadows:
        pair = (g.site - 1, g.site + 1)
        if pair[0] < lo or pair[1] > hi:
            continue
        covered = any(
            other is not g and pair[0] in other_span and pair[1] in other_span
            for other, other_span in gate_shadows
        )
        if not covered:
            removed.append(pair)
    return complex_.without_edges(removed)


@dataclass(frozen=True)
class StableComplexResult:
    """Outcome of scanning the thickness filtration for stable homology."""

    t_star: int | None
    complex: SimplicialComplex | None
    filtration: tuple[tuple[int, BettiVector], ...]
    note: str


def stable_complex(
    poset: CausalPoset,
    base: AntiChain,
    i_max: int,
    controlled_simplification: bool = False,
) -> StableComplexResult:
    """Earliest thickness whose complex is connected with settled Betti numbers.

    Returns the smallest t* with b0 = 1 and identical Betti vectors at
    t*, t*+1 and t*+2 (window bounded by i_max), plus the full filtration
    for inspection.  If the complex never becomes connected the register
    splits into separate computations and no t* is reported.
    """
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    base_layer, _ = _slice_sites(base)
    feasible = min(i_max, _species_depth_above(poset, base_layer) // 2)
    complexes: dict[int, SimplicialComplex] = {}
    filtration: list[tuple[int, BettiVector]] = []
    for t in range(1, feasible + 1):
        complexes[t] = unitary_shadow_complex(poset, base, t, controlled_simplification)
        filtration.append((t, betti(complexes[t])))
    bettis = {t: _strip_trailing_zeros(b) for t, b in filtration}
    t_star = None
    for t in range(1, feasible - 1):
        if bettis[t][0] != 1:
            continue
        if bettis[t] == bettis[t + 1] == bettis[t + 2]:
            t_star = t
            break
    if t_star is None:
        if any(b[0] == 1 for b in bettis.values()):
            note = f"no thickness in 1..{feasible} holds a stable Betti window"
        elif filtration:
            note = ("complex never becomes connected: treat the register as "
                    "separate computations")
        else:
            note = "trace too shallow for any thickness"
        return StableComplexResult(t_star=None, complex=None,
                                   filtration=tuple(filtration), note=note)
    return StableComplexResult(
        t_star=t_star,
        complex=complexes[t_star],
        filtration=tuple(filtration),
        note=f"stable from thickness {t_star}",
    )
