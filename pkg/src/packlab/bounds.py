"""Density upper bounds, update-map voter curves, residual entropy values.

Three ways to reason about dense packings without long simulation runs:

* a second-shell maximization turning local geometry into an exact rational
  upper bound on packing density (``kissing_stats``, ``bound_tightness``);
* exhaustive or sampled curves for the one-cycle update map at full
  pressure, in singleton, doublet and single-sublattice-restricted form
  (``voter_curve``, ``doublet_voter_curve``, ``sublattice_restriction_curve``);
* residual entropies: the lattice-function integral for the Kagome packing
  family by quadrature, and the closed-form constants for the laminated and
  rotation-move families (``kagome_entropy``, ``entropy_constants``).

Everything here is deterministic; the empirical curve modes take explicit
seeds and the quadrature reports an error estimate alongside the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .configuration import IllegalInput, bernoulli_init, empty
from .engine import Pressure, full_cycle
from .lattices import CATALOG, PeriodicGraph, build_lattice, second_neighbor_shell
from .oracle import count_maximizers


class NonUniformDegree(ValueError):
    """Second-shell bound needs every site to have the same degree."""


class UnsupportedLattice(ValueError):
    """The requested curve is only defined for specific lattices."""


# --- second-shell density bound --------------------------------------------


@dataclass(frozen=True)
class KissingStats:
    """Second-shell occupancy maximization at one site.

    d is the (constant) vertex degree, n_y_max the per-neighbor maxima of
    occupied second-shell contacts, n the mean over neighbors at the joint
    maximum, and rho_bar = (n+1)/(n+1+d) the resulting density bound.
    """

    d: int
    n_y_max: tuple[int, ...]
    n: Fraction
    rho_bar: Fraction


def _independent_max_weight(adj: list[int], weight: list[int]) -> int:
    """Maximum total weight of an independent set, by pruned DFS.

    adj[i] is a bitmask of neighbors among the candidate sites. Sites are
    visited in order; the bound is the sum of weights still selectable.
    """
    n = len(adj)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + weight[i]
    best = 0

    def rec(i: int, blocked: int, total: int) -> None:
        nonlocal best
        if total + suffix[i] <= best:
            return
        if i == n:
            best = max(best, total)
            return
        if not blocked >> i & 1:
            rec(i + 1, blocked | adj[i], total + weight[i])
        rec(i + 1, blocked, total)

    rec(0, 0, 0)
    return best


def kissing_stats(g: PeriodicGraph, x: int | None = None) -> KissingStats:
    """Exact second-shell bound at site x (default: worst cell site).

    With the site itself occupied, its neighbors are forced empty and the
    only freedom is an independent set on the second shell. Maximizing the
    number of occupied second-shell contacts per neighbor gives n and the
    density bound rho_bar. The torus should be at least five cells across
    so the shell does not wrap onto itself.
    """
    profile = g.spec.degree_profile
    if len(set(profile)) != 1:
        raise NonUniformDegree(
            f"{g.spec.name} has degrees {sorted(set(profile))}; the bound needs one"
        )
    candidates = (
        [x]
        if x is not None
        else [g.site_index(0, 0, s) for s in range(g.spec.sites_per_cell)]
    )
    best: KissingStats | None = None
    for site in candidates:
        stats = _kissing_at(g, site)
        if best is None or stats.n > best.n:
            best = stats
    assert best is not None
    return best


def _kissing_at(g: PeriodicGraph, x: int) -> KissingStats:
    first = g.neighbor_list(x)
    d = len(first)
    shell = sorted(second_neighbor_shell(g, x))
    index = {s: i for i, s in enumerate(shell)}
    adj = [0] * len(shell)
    for i, s in enumerate(shell):
        for t in g.neighbor_list(s):
            j = index.get(t)
            if j is not None:
                adj[i] |= 1 << j
    # each shell site scores one point per first-ring site it touches
    weight = [0] * len(shell)
    contact = []  # per neighbor y, bitmask of its shell contacts
    for y in first:
        mask = 0
        for t in g.neighbor_list(y):
            j = index.get(t)
            if j is not None:
                weight[j] += 1
                mask |= 1 << j
        contact.append(mask)
    joint = _independent_max_weight(adj, weight)
    per_neighbor = []
    for mask in contact:
        sub = [i for i in range(len(shell)) if mask >> i & 1]
        sub_adj = [
            sum(1 << k for k, j in enumerate(sub) if adj[i] >> j & 1) for i in sub
        ]
        per_neighbor.append(_independent_max_weight(sub_adj, [1] * len(sub)))
    n = Fraction(joint, d)
    rho_bar = (n + 1) / (n + 1 + d)
    return KissingStats(d=d, n_y_max=tuple(per_neighbor), n=n, rho_bar=rho_bar)


def bound_tightness(g: PeriodicGraph) -> bool:
    """True when the enumerated densest packing reaches rho_bar exactly."""
    stats = kissing_stats(g)
    occ, _count, _ = count_maximizers(g)
    return Fraction(occ, g.site_count) == stats.rho_bar


# --- update-map voter curves ------------------------------------------------

VOTER_LATTICES = ("4^4", "6^3", "3^6")


@dataclass(frozen=True)
class VoterCurve:
    """Fraction of support patterns with k occupied that update to occupied.

    kind is "singleton", "doublet" or "restriction"; counts[k] is the number
    of legal patterns (exhaustive) or observations (empirical) at each k and
    fraction[k] is hits[k]/counts[k], nan where nothing was seen.
    """

    lattice: str
    kind: str
    support_size: int
    mode: str
    fraction: tuple[float, ...]
    counts: tuple[int, ...]
    hits: tuple[int, ...]


def curve_shape(curve: VoterCurve) -> dict:
    """Shape diagnostics: monotonicity, corner values, distance from the
    diagonal (small distance means the map barely amplifies a majority)."""
    ks = [k for k, c in enumerate(curve.counts) if c > 0]
    fr = [curve.fraction[k] for k in ks]
    monotone = all(b >= a - 1e-12 for a, b in zip(fr, fr[1:]))
    gap = max(
        (abs(f - k / curve.support_size) for k, f in zip(ks, fr)), default=0.0
    )
    return {
        "monotone": monotone,
        "corner_zero": bool(ks and ks[0] == 0 and fr[0] == 0.0),
        "corner_one": bool(ks and ks[-1] == curve.support_size and fr[-1] == 1.0),
        "diagonal_gap": gap,
    }


def _class_of(g: PeriodicGraph) -> np.ndarray:
    out = np.empty(g.site_count, dtype=np.int64)
    for k, sites in enumerate(g.class_sites):
        out[sites] = k
    return out


def _commensurate_dims(name: str, minimum: int = 10) -> tuple[int, int]:
    """Smallest torus at least `minimum` cells across on each axis."""
    px, py = CATALOG[name].period
    return (px * -(-minimum // px), py * -(-minimum // py))


def _rotated_schedule(n_classes: int, focal: int) -> tuple[int, ...]:
    """Full cycle visiting every class once with the focal class last."""
    return tuple((focal + 1 + i) % n_classes for i in range(n_classes))


def _singleton_support(g: PeriodicGraph, focal_class: int) -> tuple[int, list[int], tuple[int, ...]]:
    """(focal site, same-class support sites, schedule) for the cycle map.

    The support is the focal site plus its same-class sites two hops out:
    on the two-class lattices that is the full influence region of the
    cycle map, on the three-class one it is the designated restriction
    tuple (initial values further out are zeroed like any other site
    outside the tuple).
    """
    schedule = _rotated_schedule(g.n_classes, focal_class)
    x = int(g.class_sites[focal_class][0])
    class_of = _class_of(g)
    shell = second_neighbor_shell(g, x)
    support = sorted(s for s in shell if class_of[s] == focal_class)
    return x, [x] + support, schedule


def _apply_cycle(g: PeriodicGraph, bits: np.ndarray, schedule: tuple[int, ...]) -> np.ndarray:
    c = empty(g)
    c.bits[:] = bits
    full_cycle(g, c, Pressure(p=1.0), seed=0, cycle=0, schedule=schedule)
    return c.bits


def _curve_from_tallies(
    lattice: str, kind: str, mode: str, size: int, counts: list[int], hits: list[int]
) -> VoterCurve:
    fraction = tuple(
        h / c if c else float("nan") for h, c in zip(hits, counts)
    )
    return VoterCurve(
        lattice=lattice,
        kind=kind,
        support_size=size,
        mode=mode,
        fraction=fraction,
        counts=tuple(counts),
        hits=tuple(hits),
    )


def voter_curve(
    lattice: str,
    mode: str = "exhaustive",
    dims: tuple[int, int] | None = None,
    cycles: int = 300,
    seed: int = 1,
) -> VoterCurve:
    """Curve of the full-pressure cycle map on its same-class support.

    Exhaustive mode evaluates every assignment of the support tuple with all
    other sites empty and weights each pattern once; empirical mode tallies
    the patterns that occur in a full-pressure run from a random start.
    """
    if lattice not in VOTER_LATTICES:
        raise UnsupportedLattice(
            f"singleton curve defined for {', '.join(VOTER_LATTICES)}; got {lattice!r}"
        )
    if mode not in ("exhaustive", "empirical"):
        raise IllegalInput(f"mode must be exhaustive or empirical, got {mode!r}")
    g = build_lattice(lattice, dims if dims is not None else _commensurate_dims(lattice))
    x, support, schedule = _singleton_support(g, focal_class=0)
    size = len(support)
    counts = [0] * (size + 1)
    hits = [0] * (size + 1)
    if mode == "exhaustive":
        base = np.zeros(g.site_count, dtype=np.uint8)
        for pattern in range(1 << size):
            bits = base.copy()
            k = 0
            for i, s in enumerate(support):
                if pattern >> i & 1:
                    bits[s] = 1
                    k += 1
            out = _apply_cycle(g, bits, schedule)
            counts[k] += 1
            hits[k] += int(out[x])
        return _curve_from_tallies(lattice, "singleton", mode, size, counts, hits)

    focal_sites, support_idx = _translated_supports(g, x, support)
    counts_arr = np.zeros(size + 1, dtype=np.int64)
    hits_arr = np.zeros(size + 1, dtype=np.int64)
    c = bernoulli_init(g, 0.5, seed)
    for t in range(cycles):
        pre = c.bits.copy()
        full_cycle(g, c, Pressure(p=1.0), seed=seed, cycle=t, schedule=schedule)
        ks = pre[support_idx].sum(axis=1)
        post = c.bits[focal_sites]
        np.add.at(counts_arr, ks, 1)
        np.add.at(hits_arr, ks, post)
    return _curve_from_tallies(
        lattice, "singleton", mode, size, counts_arr.tolist(), hits_arr.tolist()
    )


def _translated_supports(
    g: PeriodicGraph, x: int, support: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Support index rows for every site in x's translation class."""
    cx0, cy0, s0 = g.site_cell(x)
    rel = []
    for s in support:
        cx, cy, si = g.site_cell(s)
        rel.append((cx - cx0, cy - cy0, si))
    X, Y = g.dims
    focal = []
    rows = []
    for site in g.class_sites[_class_of(g)[x]]:
        cx, cy, si = g.site_cell(int(site))
        if si != s0:
            continue
        focal.append(int(site))
        rows.append(
            [g.site_index((cx + dx) % X, (cy + dy) % Y, s) for dx, dy, s in rel]
        )
    return np.asarray(focal), np.asarray(rows)


# --- the doubled-site curve and its single-sublattice contrast --------------

_DOUBLET_ENTRIES = ((0, 0), (0, 1), (1, 0))


def _moore_pair_grid(g: PeriodicGraph) -> tuple[tuple[int, int], np.ndarray]:
    """Focal horizontal pair and the 3x3 grid of pairs two cells apart.

    Returns ((left, right) site indices, grid[j][i] = (left, right)) for the
    row-major 3x3 arrangement centered on the focal pair.
    """
    X, Y = g.dims
    cx0, cy0 = (X // 2) & ~1, (Y // 2) & ~1  # even-even anchor
    grid = np.empty((3, 3, 2), dtype=np.int64)
    for j, dy in enumerate((-2, 0, 2)):
        for i, dx in enumerate((-2, 0, 2)):
            a = g.site_index((cx0 + dx) % X, (cy0 + dy) % Y, 0)
            b = g.site_index((cx0 + dx + 1) % X, (cy0 + dy) % Y, 0)
            grid[j, i] = (a, b)
    return (int(grid[1, 1, 0]), int(grid[1, 1, 1])), grid


def doublet_voter_curve(
    mode: str = "exhaustive",
    dims: tuple[int, int] | None = None,
    cycles: int = 300,
    seed: int = 1,
) -> VoterCurve:
    """Curve of the cycle map on horizontal site pairs of the Moore lattice.

    Pairs take values (0,0), (0,1) or (1,0); the support is the 3x3 block of
    pairs spaced two rows and two columns apart, so slides along a row do not
    change the pattern. See sublattice_restriction_curve for the contrast
    curve on one sublattice alone.
    """
    if mode not in ("exhaustive", "empirical"):
        raise IllegalInput(f"mode must be exhaustive or empirical, got {mode!r}")
    g = build_lattice("Z2M", dims if dims is not None else _commensurate_dims("Z2M"))
    schedule = (2, 3, 0, 1)  # focal pair classes last
    (fa, fb), grid = _moore_pair_grid(g)
    counts = [0] * 10
    hits = [0] * 10
    if mode == "exhaustive":
        for pattern in product(range(3), repeat=9):
            vals = [_DOUBLET_ENTRIES[v] for v in pattern]
            if not _doublet_rows_legal(vals):
                continue
            bits = np.zeros(g.site_count, dtype=np.uint8)
            k = 0
            for (a, b), (va, vb) in zip(grid.reshape(9, 2), vals):
                bits[a], bits[b] = va, vb
                k += va | vb
            out = _apply_cycle(g, bits, schedule)
            counts[k] += 1
            hits[k] += int(out[fa] | out[fb])
        return _curve_from_tallies("Z2M", "doublet", mode, 9, counts, hits)

    pair_left, pair_rows = _pair_supports(g, grid)
    counts_arr = np.zeros(10, dtype=np.int64)
    hits_arr = np.zeros(10, dtype=np.int64)
    c = bernoulli_init(g, 0.3, seed)
    for t in range(cycles):
        pre = c.bits.copy()
        full_cycle(g, c, Pressure(p=1.0), seed=seed, cycle=t, schedule=schedule)
        occ = pre[pair_rows]  # (n_pairs, 9, 2)
        ks = (occ[:, :, 0] | occ[:, :, 1]).sum(axis=1)
        post = c.bits[pair_left[:, 0]] | c.bits[pair_left[:, 1]]
        np.add.at(counts_arr, ks, 1)
        np.add.at(hits_arr, ks, post)
    return _curve_from_tallies(
        "Z2M", "doublet", mode, 9, counts_arr.tolist(), hits_arr.tolist()
    )


def _doublet_rows_legal(vals: list[tuple[int, int]]) -> bool:
    """No right-1 immediately followed by left-1 within any row of pairs."""
    for j in range(3):
        row = vals[3 * j : 3 * j + 3]
        for (_, b_left), (a_right, _) in zip(row, row[1:]):
            if b_left and a_right:
                return False
    return True


def _pair_supports(g: PeriodicGraph, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(focal pairs, per-pair 3x3x2 support indices) over all even-even pairs."""
    X, Y = g.dims
    fa = grid[1, 1, 0]
    cx0, cy0, _ = g.site_cell(int(fa))
    pairs = []
    rows = []
    for cx in range(0, X, 2):
        for cy in range(0, Y, 2):
            shift_x, shift_y = cx - cx0, cy - cy0
            sup = np.empty((9, 2), dtype=np.int64)
            for r, (a, b) in enumerate(grid.reshape(9, 2)):
                ax, ay, _ = g.site_cell(int(a))
                bx, by, _ = g.site_cell(int(b))
                sup[r, 0] = g.site_index((ax + shift_x) % X, (ay + shift_y) % Y, 0)
                sup[r, 1] = g.site_index((bx + shift_x) % X, (by + shift_y) % Y, 0)
            pairs.append(sup[4])
            rows.append(sup)
    return np.asarray(pairs), np.asarray(rows)


def sublattice_restriction_curve(
    mode: str = "exhaustive",
    dims: tuple[int, int] | None = None,
    cycles: int = 300,
    seed: int = 1,
) -> VoterCurve:
    """Cycle-map curve on a single Moore sublattice (3x3 block, spacing 2).

    The contrast case for doublet_voter_curve: this restriction ignores the
    slide freedom, and its curve hugs the diagonal instead of showing any
    sharp majority amplification (see curve_shape's diagonal_gap).
    """
    if mode not in ("exhaustive", "empirical"):
        raise IllegalInput(f"mode must be exhaustive or empirical, got {mode!r}")
    g = build_lattice("Z2M", dims if dims is not None else _commensurate_dims("Z2M"))
    schedule = _rotated_schedule(4, 0)  # focal sublattice last
    X, Y = g.dims
    cx0, cy0 = (X // 2) & ~1, (Y // 2) & ~1
    support = [
        g.site_index((cx0 + dx) % X, (cy0 + dy) % Y, 0)
        for dy in (-2, 0, 2)
        for dx in (-2, 0, 2)
    ]
    x = support[4]
    counts = [0] * 10
    hits = [0] * 10
    if mode == "exhaustive":
        for pattern in range(1 << 9):
            bits = np.zeros(g.site_count, dtype=np.uint8)
            k = 0
            for i, s in enumerate(support):
                if pattern >> i & 1:
                    bits[s] = 1
                    k += 1
            out = _apply_cycle(g, bits, schedule)
            counts[k] += 1
            hits[k] += int(out[x])
        return _curve_from_tallies("Z2M", "restriction", mode, 9, counts, hits)

    focal_sites, support_idx = _translated_supports(g, x, support)
    counts_arr = np.zeros(10, dtype=np.int64)
    hits_arr = np.zeros(10, dtype=np.int64)
    c = bernoulli_init(g, 0.3, seed)
    for t in range(cycles):
        pre = c.bits.copy()
        full_cycle(g, c, Pressure(p=1.0), seed=seed, cycle=t, schedule=schedule)
        ks = pre[support_idx].sum(axis=1)
        post = c.bits[focal_sites]
        np.add.at(counts_arr, ks, 1)
        np.add.at(hits_arr, ks, post)
    return _curve_from_tallies(
        "Z2M", "restriction", mode, 9, counts_arr.tolist(), hits_arr.tolist()
    )


# --- residual entropies -----------------------------------------------------


@dataclass(frozen=True)
class EntropyEstimate:
    """A residual entropy value in nats.

    kind "h1" grows with the linear size, "h2" with the site count. For
    quadrature values error_estimate bounds the discretization error;
    closed forms report 0. lower_bound marks values that only bound the
    true entropy from below.
    """

    kind: str
    value_nats: float
    method: str
    error_estimate: float = 0.0
    lower_bound: bool = False

    @property
    def value_bits(self) -> float:
        return self.value_nats / math.log(2.0)


def _tiling_integrand_mean(n: int) -> float:
    """Mean of log|1 + e^(i theta) + e^(i phi)| on an n x n midpoint grid.

    Midpoints never coincide with the two zeros of the integrand (that
    would need 2n = 3 mod 6), so every term is finite.
    """
    theta = (np.arange(n) + 0.5) * (2.0 * math.pi / n)
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    total = 0.0
    chunk = max(1, (1 << 22) // n)
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        re = 1.0 + cos_t[lo:hi, None] + cos_t[None, :]
        im = sin_t[lo:hi, None] + sin_t[None, :]
        total += float(0.5 * np.log(re * re + im * im).sum())
    return total / (n * n)


def kagome_entropy(grid: int = 120) -> EntropyEstimate:
    """Entropy per site-count unit of the rhombus-tiling family, by quadrature.

    Midpoint sums at grid and 2*grid points with one Richardson step; the
    reported error estimate is the difference of the two raw sums.  That is
    deliberately conservative: at the default grid the extrapolated value is
    accurate to ~1e-9 while the estimate stays above the gap to the customary
    five-digit rounding 0.32306.
    """
    coarse = _tiling_integrand_mean(grid)
    fine = _tiling_integrand_mean(2 * grid)
    value = fine + (fine - coarse) / 3.0
    return EntropyEstimate(
        kind="h2",
        value_nats=value,
        method="quadrature",
        error_estimate=abs(fine - coarse),
    )


def kagome_entropy_reduced(n: int = 200001) -> float:
    """Same integral after integrating out one angle exactly.

    The inner integral of log|w + e^(i phi)| over phi is log max(|w|, 1),
    which collapses the double integral to (2/pi) times the integral of
    log(2 cos u) over [0, pi/3]. The integrand is smooth and vanishes at
    the right endpoint, so a midpoint sum converges fast; used as an
    independent cross-check on the 2d quadrature.
    """
    u = (np.arange(n) + 0.5) * (math.pi / 3.0 / n)
    return float((2.0 / math.pi) * np.log(2.0 * np.cos(u)).mean() * (math.pi / 3.0))


def entropy_constants() -> dict[str, EntropyEstimate]:
    """Closed-form residual entropies of the laminated and rotation families."""
    half_log2 = 0.5 * math.log(2.0)
    return {
        "3^3.4^2": EntropyEstimate("h1", half_log2, "closed-form"),
        "Z2M": EntropyEstimate("h1", half_log2, "closed-form"),
        "3.4.6.4": EntropyEstimate(
            "h2", (3.0 / 16.0) * math.log(2.0), "closed-form", lower_bound=True
        ),
        "3.12^2": EntropyEstimate(
            "h2", (1.0 / 18.0) * math.log(2.0), "closed-form", lower_bound=True
        ),
    }


# --- two-pressure update lower bound ----------------------------------------


@dataclass(frozen=True)
class CompositeBoundCheck:
    """Formula bound vs the simulated conditional update frequency."""

    lattice: str
    p4: float
    p_high: float
    bound: float
    frequency: float
    events: int


def composite_update_bound(lattice: str, p4: float, p_high: float) -> float:
    """Lower bound on the corner update probability given a crowded corner
    neighborhood: the corner's own draw succeeds and every adjacent center
    declines. Reduces to plain p_high at p4 = 0."""
    for name, v in (("p4", p4), ("p_high", p_high)):
        if not 0.0 <= v <= 1.0:
            raise IllegalInput(f"{name}={v} outside [0, 1]")
    if lattice == "UJ":
        return p_high * (1.0 - p4) ** 4
    if lattice == "Q":
        return p_high * (1.0 - p4) ** 2
    raise UnsupportedLattice(f"two-pressure bound defined for UJ and Q, got {lattice!r}")


def _corner_blocks(g: PeriodicGraph) -> tuple[np.ndarray, np.ndarray]:
    """(corner sites, blocks[i,4,4]): the four 2x2 sub-diamonds around each
    corner in the corner-only subgraph, each listed as 4 corner sites."""
    corner = np.flatnonzero(g.pressure_slot_of == 0)
    corner_set = set(int(i) for i in corner)
    adj = {
        int(i): [j for j in g.neighbor_list(int(i)) if j in corner_set]
        for i in corner
    }
    blocks = np.empty((len(corner), 4, 4), dtype=np.int64)
    for row, x in enumerate(corner):
        around = adj[int(x)]
        if len(around) != 4:
            raise IllegalInput("corner subgraph is not four-regular")
        for col, u in enumerate(around):
            blocks[row, col] = sorted(adj[u])
    return corner, blocks


def composite_update_frequency(
    lattice: str,
    p4: float,
    p_high: float,
    dims: tuple[int, int] | None = None,
    cycles: int = 400,
    seed: int = 1,
) -> CompositeBoundCheck:
    """Simulated check of composite_update_bound.

    Counts, over a run at the given pressures, how often a corner site is
    occupied after a cycle given that before the cycle every 2x2 block of
    its corner-diamond neighborhood held at least one occupied corner.
    """
    bound = composite_update_bound(lattice, p4, p_high)
    g = build_lattice(lattice, dims if dims is not None else _commensurate_dims(lattice, 20))
    corner, blocks = _corner_blocks(g)
    pr = Pressure(p4=p4, p_high=p_high)
    c = bernoulli_init(g, 0.3, seed)
    events = 0
    hits = 0
    for t in range(cycles):
        pre = c.bits.copy()
        full_cycle(g, c, pr, seed=seed, cycle=t)
        mask = pre[blocks].any(axis=2).all(axis=1)
        events += int(mask.sum())
        hits += int(c.bits[corner[mask]].sum())
    return CompositeBoundCheck(
        lattice=lattice,
        p4=p4,
        p_high=p_high,
        bound=bound,
        frequency=hits / events if events else float("nan"),
        events=events,
    )
