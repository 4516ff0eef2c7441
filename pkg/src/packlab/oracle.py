"""Exhaustive ground truth on small tori.

Exact counting of legal configurations and maximizers (depth-first search
with hard-core pruning), local-move detection on densest packings, the
Kagome hexagon flip, and growth-rate fits of maximizer counts that
classify lattices as laminated (L), laminated-with-slides (RL) or random
(R) packers. A branch-and-bound counter extends maximizer counts past the
full-enumeration cap using a greedy clique-cover bound.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .configuration import Configuration, IllegalInput, empty, is_legal
from .lattices import PeriodicGraph, build_lattice

try:
    from ._kernels import semiring_matmul
except ImportError:
    from ._kernels_py import semiring_matmul

ENUM_CAP = 36
COUNT_CAP = 400


class TooLarge(ValueError):
    """Torus beyond the enumeration cap."""


class NotMaximal(ValueError):
    """Move search requires a maximal (no addable site) legal configuration."""


class NotFlippable(ValueError):
    """Hexagon occupancy not in a flippable formation."""


@dataclass(frozen=True)
class EnumerationResult:
    dims: tuple[int, int]
    lattice: str
    legal_count: int
    max_occupancy: int
    maximizer_count: int
    max_density: Fraction
    maximizer_orbit_count: int | None = None  # translation-reduced


@dataclass(frozen=True)
class MoveReport:
    kind: str  # "flip" | "slide" | "single-site-exchange" | "none"
    count: int


def _site_masks(g: PeriodicGraph) -> list[int]:
    masks = [0] * g.site_count
    for a, b in zip(g.edges_a, g.edges_b):
        masks[a] |= 1 << int(b)
        masks[b] |= 1 << int(a)
    return masks


def _clique_cover(g: PeriodicGraph, masks: list[int]) -> list[int]:
    """Disjoint cliques (size ≤ 4, greedy) covering all sites, as bitmasks.

    Each clique holds at most one occupied site, so the number of cliques
    still holding an available site bounds the remaining occupancy.
    """
    n = g.site_count
    covered = 0
    cliques: list[int] = []

    def adjacent(a: int, b: int) -> bool:
        return bool(masks[a] >> b & 1)

    for u in range(n):
        if covered >> u & 1:
            continue
        cand = [v for v in g.neighbor_list(u) if not covered >> v & 1]
        best = [u]
        for i, a in enumerate(cand):
            if len(best) >= 4:
                break
            for b in cand[i + 1 :]:
                if not adjacent(a, b):
                    continue
                if len(best) < 3:
                    best = [u, a, b]
                for c in cand:
                    if c not in (a, b) and adjacent(c, a) and adjacent(c, b):
                        best = [u, a, b, c]
                        break
                if len(best) >= 4:
                    break
        if len(best) == 1 and cand:
            best = [u, cand[0]]
        mask = 0
        for v in best:
            mask |= 1 << v
        covered |= mask
        cliques.append(mask)
    return cliques


def enumerate_configs(g: PeriodicGraph, cap: int = ENUM_CAP) -> EnumerationResult:
    """Exact counts of all legal configurations by pruned depth-first search."""
    n = g.site_count
    if n > cap:
        raise TooLarge(f"{n} sites exceeds the full-enumeration cap {cap}")
    masks = _site_masks(g)

    legal = 0
    best = 0
    best_masks: list[int] = []
    sys.setrecursionlimit(max(10000, 4 * n))

    def dfs(avail: int, occ: int, chosen: int) -> None:
        nonlocal legal, best, best_masks
        if avail == 0:
            legal += 1
            if occ > best:
                best = occ
                best_masks = [chosen]
            elif occ == best:
                best_masks.append(chosen)
            return
        x = (avail & -avail).bit_length() - 1
        bit = 1 << x
        dfs(avail & ~bit, occ, chosen)
        dfs(avail & ~bit & ~masks[x], occ + 1, chosen | bit)

    dfs((1 << n) - 1, 0, 0)
    return EnumerationResult(
        dims=g.dims,
        lattice=g.spec.name,
        legal_count=legal,
        max_occupancy=best,
        maximizer_count=len(best_masks),
        max_density=Fraction(best, n),
        maximizer_orbit_count=_orbit_count(g, best_masks),
    )


def _translations(g: PeriodicGraph) -> list[np.ndarray]:
    l1, l2 = g.dims
    m = g.spec.sites_per_cell
    n = g.site_count
    base = np.arange(n)
    cells, s = np.divmod(base, m)
    cx, cy = np.divmod(cells, l2)
    perms = []
    for dx in range(l1):
        for dy in range(l2):
            perms.append((((cx + dx) % l1 * l2 + (cy + dy) % l2) * m + s))
    return perms


def _orbit_count(g: PeriodicGraph, masks_list: list[int]) -> int | None:
    if not masks_list or len(masks_list) > 100000:
        return None
    perms = _translations(g)
    n = g.site_count
    canon: set[int] = set()
    for cm in masks_list:
        sites = [i for i in range(n) if cm >> i & 1]
        rep = cm
        for perm in perms:
            moved = 0
            for i in sites:
                moved |= 1 << int(perm[i])
            rep = min(rep, moved)
        canon.add(rep)
    return len(canon)


# --- transfer-matrix counting ----------------------------------------------

TRANSFER_BIT_CAP = 24
TRANSFER_STATE_CAP = 3000
BRANCH_NODE_BUDGET = 3_000_000
_NEG = -(1 << 30)


class _BudgetExceeded(Exception):
    pass


def _layer_structure(
    g: PeriodicGraph, axis: int
) -> tuple[int, int, list[int], list[int]] | None:
    """Bit layout of one cell layer perpendicular to ``axis``.

    Returns (n_layers, bits, internal, ahead): ``internal[k]`` masks the
    same-layer neighbors of bit k and ``ahead[k]`` its neighbors one layer
    up. None when the scan direction is shorter than three layers or an
    edge would skip a layer.
    """
    l1, l2 = g.dims
    m = g.spec.sites_per_cell
    n_layers = l1 if axis == 0 else l2
    width = l2 if axis == 0 else l1
    if n_layers < 3:
        return None
    bits = width * m

    def locate(i: int) -> tuple[int, int]:
        cx, cy, s = g.site_cell(i)
        if axis == 0:
            return cx, cy * m + s
        return cy, cx * m + s

    internal = [0] * bits
    ahead = [0] * bits
    for a, b in zip(g.edges_a, g.edges_b):
        ta, ka = locate(int(a))
        tb, kb = locate(int(b))
        d = (tb - ta) % n_layers
        if d == 0:
            if ta == 0:
                internal[ka] |= 1 << kb
                internal[kb] |= 1 << ka
        elif d == 1:
            if ta == 0:
                ahead[ka] |= 1 << kb
        elif d == n_layers - 1:
            if tb == 0:
                ahead[kb] |= 1 << ka
        else:
            return None
    return n_layers, bits, internal, ahead


def _independent_states(bits: int, internal: list[int], cap: int) -> list[int] | None:
    states: list[int] = []

    def rec(k: int, taken: int, blocked: int) -> None:
        if len(states) > cap:
            return
        if k == bits:
            states.append(taken)
            return
        rec(k + 1, taken, blocked)
        if not blocked >> k & 1:
            rec(k + 1, taken | 1 << k, blocked | internal[k])

    rec(0, 0, 0)
    if len(states) > cap:
        return None
    return states


# Powers of a layer matrix are shared by every torus length over the same
# layer cross-section, so growth fits reuse them; one lattice is active at
# a time, and entries are evicted smallest-exponent-first.
_TRANSFER_POWERS: dict[tuple, dict[int, tuple[np.ndarray, np.ndarray]]] = {}


def _matrix_power(
    key: tuple, t_occ: np.ndarray, t_cnt: np.ndarray, e: int
) -> tuple[np.ndarray, np.ndarray]:
    cache = _TRANSFER_POWERS.get(key)
    if cache is None:
        _TRANSFER_POWERS.clear()
        cache = _TRANSFER_POWERS[key] = {1: (t_occ, t_cnt)}
    if e in cache:
        return cache[e]
    base = max(k for k in cache if k <= e)
    occ, cnt = cache[base]
    cur = base
    while cur < e:
        step = max(k for k in cache if k <= e - cur)
        so, sc = cache[step]
        occ, cnt = semiring_matmul(occ, cnt, so, sc)
        cur += step
        cache[cur] = (occ, cnt)
        if len(cache) > 4:
            for k in sorted(cache):
                if k not in (1, cur):
                    del cache[k]
                    break
    return occ, cnt


def transfer_count(
    g: PeriodicGraph, state_cap: int = TRANSFER_STATE_CAP
) -> tuple[int, int] | None:
    """(max_occupancy, maximizer_count) by transfer-matrix power, or None.

    Scans whole cell layers along one axis. Matrix entries live in the
    max-plus semiring extended with tie counts, so the L-th power's best
    diagonal entry counts the densest configurations exactly. Returns None
    when both axes give layers too wide to enumerate; callers then fall
    back to branch and bound.
    """
    plans = []
    for axis in (0, 1):
        st = _layer_structure(g, axis)
        if st is not None and st[1] <= TRANSFER_BIT_CAP:
            plans.append((axis, st))
    plans.sort(key=lambda p: p[1][1])
    for axis, (n_layers, bits, internal, ahead) in plans:
        states = _independent_states(bits, internal, state_cap)
        if states is None:
            continue
        sarr = np.array(states, dtype=np.int64)
        pops = np.array([int(s).bit_count() for s in states], dtype=np.int64)
        forb = np.array(
            [_mask_union(s, ahead) for s in states], dtype=np.int64
        )
        compat = (forb[:, None] & sarr[None, :]) == 0
        t_occ = np.where(compat, pops[None, :], _NEG)
        t_cnt = compat.astype(np.int64)
        width = g.dims[1] if axis == 0 else g.dims[0]
        key = (g.spec.name, axis, width)
        r_occ, r_cnt = _matrix_power(key, t_occ, t_cnt, n_layers)
        diag_occ = r_occ.diagonal()
        diag_cnt = r_cnt.diagonal()
        best = int(diag_occ.max())
        return best, int(diag_cnt[diag_occ == best].sum())
    return None


def _mask_union(state: int, ahead: list[int]) -> int:
    out = 0
    s = state
    while s:
        k = (s & -s).bit_length() - 1
        s &= s - 1
        out |= ahead[k]
    return out


def count_maximizers(
    g: PeriodicGraph,
    cap: int = COUNT_CAP,
    collect: bool = False,
    method: str = "auto",
    node_budget: int = BRANCH_NODE_BUDGET,
) -> tuple[int, int, list[int]]:
    """(max_occupancy, maximizer_count[, bitmasks]) for the densest packings.

    Two exact routes: branch and bound over a greedy clique cover, and a
    transfer-matrix power for layered tori. Neither dominates (the bound is
    sharp when maximizers are rigid, the matrix when layers are thin), so
    ``auto`` tries a node-budgeted branch first and falls over to the
    matrix when the search blows up. Requesting bitmasks forces branching.
    """
    if method not in ("auto", "branch", "transfer"):
        raise IllegalInput(f"unknown counting method {method!r}")
    if method == "transfer":
        res = transfer_count(g)
        if res is None:
            raise TooLarge("no axis admits a transfer-matrix scan")
        return res[0], res[1], []
    if method == "branch" or collect:
        return _branch_count(g, cap, collect, None)
    try:
        return _branch_count(g, cap, collect, node_budget)
    except _BudgetExceeded:
        res = transfer_count(g)
        if res is not None:
            return res[0], res[1], []
        return _branch_count(g, cap, collect, None)


def _branch_count(
    g: PeriodicGraph, cap: int, collect: bool, node_budget: int | None
) -> tuple[int, int, list[int]]:
    """Branches one clique of the cover at a time (occupy one member or
    none); prunes when occupancy plus the count of cliques still holding
    an available site cannot reach the best occupancy seen."""
    n = g.site_count
    if n > cap:
        raise TooLarge(f"{n} sites exceeds the counting cap {cap}")
    masks = _site_masks(g)
    cliques = _clique_cover(g, masks)
    ncl = len(cliques)
    sys.setrecursionlimit(max(10000, 8 * ncl + 100))

    # seed with the catalog packing so counting never restarts
    best = 0
    if g.spec.phases:
        best = int(g.class_sizes[g.spec.phases[0]])
    count = 0
    found: list[int] = []
    nodes = 0

    def dfs(i: int, avail: int, occ: int, chosen: int) -> None:
        nonlocal best, count, found, nodes
        nodes += 1
        if node_budget is not None and nodes > node_budget:
            raise _BudgetExceeded
        while i < ncl and not avail & cliques[i]:
            i += 1
        if i == ncl:
            if occ > best:
                best, count = occ, 1
                found = [chosen] if collect else found
            elif occ == best:
                count += 1
                if collect:
                    found.append(chosen)
            return
        room = occ
        for j in range(i, ncl):
            if avail & cliques[j]:
                room += 1
        if room < best:
            return
        members = avail & cliques[i]
        rest = avail & ~cliques[i]
        m = members
        while m:
            x = (m & -m).bit_length() - 1
            m &= m - 1
            dfs(i + 1, rest & ~masks[x], occ + 1, chosen | (1 << x))
        dfs(i + 1, rest, occ, chosen)

    dfs(0, (1 << n) - 1, 0, 0)
    if count == 0:
        # the seed itself was the unique optimum and was never re-found
        raise RuntimeError("bound seed exceeded every explored occupancy")
    return (best, count, found)


def maximizers(g: PeriodicGraph, cap: int = ENUM_CAP) -> list[Configuration]:
    """All densest configurations, ordered by their bit pattern."""
    n = g.site_count
    if n > cap:
        raise TooLarge(f"{n} sites exceeds the full-enumeration cap {cap}")
    _occ, _cnt, found = count_maximizers(g, cap=cap, collect=True)
    out = []
    for cm in sorted(found):
        c = empty(g)
        for i in range(n):
            if cm >> i & 1:
                c.bits[i] = 1
        out.append(c)
    return out


# --- local moves ----------------------------------------------------------

def _check_maximal(c: Configuration) -> None:
    g = c.graph
    if not is_legal(c):
        raise NotMaximal("configuration is not legal")
    occ_nbrs = np.concatenate([c.bits, [0]]).astype(np.int16)[g.neighbors].sum(axis=1)
    addable = (c.bits == 0) & (occ_nbrs == 0)
    if addable.any():
        raise NotMaximal(f"site {int(np.flatnonzero(addable)[0])} could be occupied")


def _exchange_moves(c: Configuration) -> list[tuple[int, int]]:
    """(from, to) singleton relocations preserving legality and occupancy."""
    g = c.graph
    bits_ext = np.concatenate([c.bits, [0]]).astype(np.int16)
    occ_nbr_count = bits_ext[g.neighbors].sum(axis=1)
    moves = []
    for y in np.flatnonzero((c.bits == 0) & (occ_nbr_count == 1)):
        nbrs = g.neighbor_list(int(y))
        x = next(v for v in nbrs if c.bits[v])
        moves.append((int(x), int(y)))
    return moves


def hexagons(g: PeriodicGraph) -> list[tuple[int, int]]:
    """Hexagon identifiers (one per cell) on the Kagome lattice."""
    if g.spec.name != "3.6.3.6":
        return []
    l1, l2 = g.dims
    return [(cx, cy) for cx in range(l1) for cy in range(l2)]


def _hexagon_triples(
    g: PeriodicGraph, hexagon: tuple[int, int]
) -> tuple[list[int], list[int]]:
    """The two alternating triples of the hexagon ring around a lattice hole."""
    cx, cy = hexagon
    tri_a = [
        g.site_index(cx + 1, cy, 2),
        g.site_index(cx, cy + 1, 0),
        g.site_index(cx, cy, 1),
    ]
    tri_b = [
        g.site_index(cx, cy + 1, 1),
        g.site_index(cx, cy, 2),
        g.site_index(cx + 1, cy, 0),
    ]
    return tri_a, tri_b


def flip(c: Configuration, hexagon: tuple[int, int]) -> Configuration:
    """Rotate a flippable three-particle formation around a Kagome hexagon."""
    g = c.graph
    if g.spec.name != "3.6.3.6":
        raise NotFlippable(f"no hexagon flips registered for {g.spec.name}")
    tri_a, tri_b = _hexagon_triples(g, hexagon)
    occ_a = all(c.bits[i] for i in tri_a)
    occ_b = all(c.bits[i] for i in tri_b)
    if occ_a == occ_b:
        raise NotFlippable(f"hexagon {hexagon} does not hold an alternating triple")
    src, dst = (tri_a, tri_b) if occ_a else (tri_b, tri_a)
    if any(c.bits[i] for i in dst):
        raise NotFlippable(f"hexagon {hexagon} target sites not all empty")
    out = c.copy()
    for i in src:
        out.bits[i] = 0
    for i in dst:
        out.bits[i] = 1
    if not is_legal(out):
        raise NotFlippable(f"hexagon {hexagon} flip blocked from outside")
    return out


def _flip_moves(c: Configuration) -> list[tuple[int, int]]:
    out = []
    for h in hexagons(c.graph):
        try:
            flip(c, h)
        except NotFlippable:
            continue
        out.append(h)
    return out


def find_local_moves(c: Configuration) -> list[MoveReport]:
    """Occupancy-preserving local rearrangements available in a densest state.

    Singleton relocations within hop radius 2 plus registered composite
    moves (the Kagome hexagon flip). Slides are non-local; see find_slides.
    """
    _check_maximal(c)
    reports = []
    flips = _flip_moves(c)
    if flips:
        reports.append(MoveReport("flip", len(flips)))
    exchanges = _exchange_moves(c)
    if exchanges:
        reports.append(MoveReport("single-site-exchange", len(exchanges)))
    if not reports:
        reports.append(MoveReport("none", 0))
    return reports


def _slide_lines(g: PeriodicGraph) -> list[list[int]]:
    """Registered full lines whose occupancy can shift by one step."""
    name = g.spec.name
    l1, l2 = g.dims
    lines: list[list[int]] = []
    if name == "Z2M":
        for cy in range(l2):
            lines.append([g.site_index(cx, cy, 0) for cx in range(l1)])
        for cx in range(l1):
            lines.append([g.site_index(cx, cy, 0) for cy in range(l2)])
    elif name == "3^3.4^2":
        for cy in range(l2):
            row: list[int] = []
            for cx in range(l1):
                row.append(g.site_index(cx, cy, 0))
                row.append(g.site_index(cx, cy, 1))
            lines.append(row)
    return lines


def find_slides(c: Configuration) -> MoveReport:
    """Full-line ±1 shifts preserving legality and occupancy."""
    _check_maximal(c)
    g = c.graph
    count = 0
    for line in _slide_lines(g):
        idx = np.asarray(line)
        for shift in (1, -1):
            trial = c.copy()
            trial.bits[idx] = np.roll(c.bits[idx], shift)
            if np.array_equal(trial.bits, c.bits):
                continue
            if is_legal(trial):
                count += 1
    return MoveReport("slide" if count else "none", count)


def flip_connectivity(g: PeriodicGraph, cap: int = ENUM_CAP) -> bool | None:
    """Whether flips connect all maximizers; None if no flips are registered."""
    if g.spec.name != "3.6.3.6":
        return None
    maxs = maximizers(g, cap=cap)
    keys = [c.bits.tobytes() for c in maxs]
    index = {k: i for i, k in enumerate(keys)}
    parent = list(range(len(maxs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, c in enumerate(maxs):
        for h in _flip_moves(c):
            j = index[flip(c, h).bits.tobytes()]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    roots = {find(i) for i in range(len(maxs))}
    return len(roots) == 1


# --- growth fits ----------------------------------------------------------

# Sizes chosen so every point is exactly countable in seconds. Lattices
# whose maximizer count is flat (L) tolerate strip growth; the laminated
# sliders (RL) need both dimensions growing or the perimeter law would
# masquerade as an area law.
GROWTH_DIMS: dict[str, tuple[tuple[int, int], ...]] = {
    "4^4": ((4, 4), (6, 6), (8, 8)),
    "6^3": ((3, 3), (6, 6), (9, 9)),
    "3^6": ((3, 3), (6, 6), (9, 9)),
    "4.8^2": ((2, 2), (4, 4), (6, 6)),
    "4.6.12": ((1, 1), (2, 2), (3, 3)),
    "3^2.4.3.4": ((3, 3), (6, 3), (9, 3)),
    "3^4.6": ((3, 3), (6, 3), (9, 3)),
    "3^3.4^2": ((3, 3), (6, 6), (12, 6)),
    "3.4.6.4": ((1, 1), (2, 2), (3, 3)),
    "3.6.3.6": ((3, 3), (3, 6), (3, 9)),
    "3.12^2": ((1, 1), (2, 2), (3, 3)),
    "Z2M": ((4, 4), (6, 6), (8, 8), (10, 10)),
    "UJ": ((4, 4), (6, 6), (8, 8)),
    "Q": ((2, 2), (3, 3), (4, 4), (5, 5)),
}

A_THRESHOLD = 0.02
B_THRESHOLD = 0.06


@dataclass(frozen=True)
class GrowthFit:
    lattice: str
    dims_list: tuple[tuple[int, int], ...]
    ns: tuple[float, ...]  # sqrt(site_count) per size
    log_counts: tuple[float, ...]
    a: float
    b: float
    c: float
    label: str  # "L" | "RL" | "R"
    entropy_kind: str  # "h1" | "h2"
    entropy_value: float  # nats; h2 normalized per cell


def growth_fit(
    lattice: str, dims_seq: Sequence[tuple[int, int]] | None = None
) -> GrowthFit:
    """Fit log(maximizer count) = a n^2 + b n + c over n = sqrt(sites)."""
    if dims_seq is None:
        dims_seq = GROWTH_DIMS[lattice]
    if len(dims_seq) < 3:
        raise IllegalInput("growth fit needs at least three sizes")
    ns: list[float] = []
    logs: list[float] = []
    spec = None
    for dims in dims_seq:
        g = build_lattice(lattice, dims)
        spec = g.spec
        _occ, cnt, _ = count_maximizers(g)
        ns.append(math.sqrt(g.site_count))
        logs.append(math.log(cnt))
    design = np.column_stack([np.square(ns), ns, np.ones(len(ns))])
    coeffs, *_ = np.linalg.lstsq(design, np.asarray(logs), rcond=None)
    a, b, c = (float(v) for v in coeffs)
    if a > A_THRESHOLD:
        label = "R"
    elif b > B_THRESHOLD:
        label = "RL"
    else:
        label = "L"
    if label == "R":
        kind, value = "h2", a * spec.sites_per_cell
    else:
        kind, value = "h1", max(b, 0.0) if label == "RL" else 0.0
    return GrowthFit(
        lattice=lattice,
        dims_list=tuple(tuple(d) for d in dims_seq),
        ns=tuple(ns),
        log_counts=tuple(logs),
        a=a,
        b=b,
        c=c,
        label=label,
        entropy_kind=kind,
        entropy_value=value,
    )
