"""Catalog of the 14 periodic lattices and their torus instantiation.

Each lattice is stored as a unit cell: basis vectors, site positions, an edge
list with integer cell offsets, and a periodic table assigning every site to
an update class (an independent set used by the automaton schedule). The
catalog also records which class supports each maximally symmetric densest
packing and the reference density / critical pressure used for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)


class UnknownLattice(KeyError):
    """Name not present in the catalog."""


class IncommensurateDims(ValueError):
    """Torus dims not a multiple of the lattice's commensurability period."""


class BadLattice(ValueError):
    """A lattice definition violates a structural invariant."""


Edge = tuple[int, int, tuple[int, int], float]  # (site_a, site_b, (dx, dy), length)


@dataclass(frozen=True)
class LatticeSpec:
    """Unit-cell description of one periodic lattice."""

    name: str
    basis: tuple[tuple[float, float], tuple[float, float]]
    sites: tuple[tuple[float, float], ...]
    edges: tuple[Edge, ...]
    class_period: tuple[int, int]
    class_table: tuple  # [cx % P1][cy % P2][s] -> class index
    n_classes: int
    phases: tuple[int, ...]  # class indices carrying the symmetric densest packings
    table_density: Fraction
    pack_type: str  # "L" | "RL" | "R"
    period: tuple[int, int]  # dims must be positive multiples of this
    table_pc: float | None = None
    table_rho_pc: float | None = None
    pressure_slot: tuple[int, ...] = ()  # per site: 0 = main pressure, 1 = low-degree pressure
    ordered_init_classes: tuple[int, ...] = ()
    desk_dims: tuple[int, int] = (0, 0)
    scan_dims: tuple[int, int] = (0, 0)

    @property
    def sites_per_cell(self) -> int:
        return len(self.sites)

    @property
    def two_parameter(self) -> bool:
        return any(slot == 1 for slot in self.pressure_slot)

    @property
    def degree_profile(self) -> tuple[int, ...]:
        deg = [0] * len(self.sites)
        for a, b, _off, _ln in self.edges:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    def class_of_site(self, cx: int, cy: int, s: int) -> int:
        p1, p2 = self.class_period
        return self.class_table[cx % p1][cy % p2][s]


def _table(
    period: tuple[int, int], m: int, fn: Callable[[int, int, int], int]
) -> tuple:
    p1, p2 = period
    return tuple(
        tuple(tuple(fn(cx, cy, s) for s in range(m)) for cy in range(p2))
        for cx in range(p1)
    )


def _ring(m: int) -> list[Edge]:
    return [(k, (k + 1) % m, (0, 0), 1.0) for k in range(m)]


def _polygon(m: int, radius: float, start_deg: float) -> tuple[tuple[float, float], ...]:
    out = []
    for k in range(m):
        a = math.radians(start_deg + 360.0 * k / m)
        out.append((radius * math.cos(a), radius * math.sin(a)))
    return tuple(out)


def _build_catalog() -> dict[str, LatticeSpec]:
    cat: dict[str, LatticeSpec] = {}

    def add(spec: LatticeSpec) -> None:
        cat[spec.name] = spec

    # (4^4): the square lattice, two checkerboard classes.
    add(
        LatticeSpec(
            name="4^4",
            basis=((1.0, 0.0), (0.0, 1.0)),
            sites=((0.0, 0.0),),
            edges=((0, 0, (1, 0), 1.0), (0, 0, (0, 1), 1.0)),
            class_period=(2, 2),
            class_table=_table((2, 2), 1, lambda cx, cy, s: (cx + cy) % 2),
            n_classes=2,
            phases=(0, 1),
            table_density=Fraction(1, 2),
            pack_type="L",
            period=(2, 2),
            table_pc=0.79,
            table_rho_pc=0.36,
            pressure_slot=(0,),
            ordered_init_classes=(0,),
            desk_dims=(100, 100),
            scan_dims=(50, 50),
        )
    )

    # (6^3): honeycomb; the two sites of the cell are the two classes.
    add(
        LatticeSpec(
            name="6^3",
            basis=((SQ3, 0.0), (SQ3 / 2, 1.5)),
            sites=((0.0, 0.0), (0.0, 1.0)),
            edges=(
                (0, 1, (0, 0), 1.0),
                (1, 0, (0, 1), 1.0),
                (1, 0, (-1, 1), 1.0),
            ),
            class_period=(1, 1),
            class_table=_table((1, 1), 2, lambda cx, cy, s: s),
            n_classes=2,
            phases=(0, 1),
            table_density=Fraction(1, 2),
            pack_type="L",
            period=(1, 1),
            table_pc=0.87,
            table_rho_pc=0.4,
            pressure_slot=(0, 0),
            ordered_init_classes=(0,),
            desk_dims=(70, 70),
            scan_dims=(36, 36),
        )
    )

    # (3^6): triangular lattice, three diagonal classes.
    add(
        LatticeSpec(
            name="3^6",
            basis=((1.0, 0.0), (0.5, SQ3 / 2)),
            sites=((0.0, 0.0),),
            edges=(
                (0, 0, (1, 0), 1.0),
                (0, 0, (0, 1), 1.0),
                (0, 0, (1, -1), 1.0),
            ),
            class_period=(3, 3),
            class_table=_table((3, 3), 1, lambda cx, cy, s: (cx - cy) % 3),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="L",
            period=(3, 3),
            table_pc=0.90,
            table_rho_pc=0.26,
            pressure_slot=(0,),
            ordered_init_classes=(0,),
            desk_dims=(99, 99),
            scan_dims=(51, 51),
        )
    )

    # (4.8^2): squares and octagons; one tilted unit square per cell.
    a48 = 1.0 + SQ2
    add(
        LatticeSpec(
            name="4.8^2",
            basis=((a48, 0.0), (0.0, a48)),
            sites=((SQ2 / 2, 0.0), (0.0, SQ2 / 2), (-SQ2 / 2, 0.0), (0.0, -SQ2 / 2)),
            edges=(
                *_ring(4),
                (0, 2, (1, 0), 1.0),
                (1, 3, (0, 1), 1.0),
            ),
            class_period=(2, 2),
            class_table=_table((2, 2), 4, lambda cx, cy, s: (cx + cy + s) % 2),
            n_classes=2,
            phases=(0, 1),
            table_density=Fraction(1, 2),
            pack_type="L",
            period=(2, 2),
            table_pc=0.90,
            table_rho_pc=0.4,
            pressure_slot=(0, 0, 0, 0),
            ordered_init_classes=(0,),
            desk_dims=(50, 50),
            scan_dims=(24, 24),
        )
    )

    # (4.6.12): one 12-gon per cell; sites alternate between the two classes.
    d4612 = 3.0 + SQ3
    r12 = 1.0 / (2.0 * math.sin(math.radians(15.0)))
    add(
        LatticeSpec(
            name="4.6.12",
            basis=((d4612, 0.0), (d4612 / 2, d4612 * SQ3 / 2)),
            sites=_polygon(12, r12, 15.0),
            edges=(
                *_ring(12),
                (0, 5, (1, 0), 1.0),
                (11, 6, (1, 0), 1.0),
                (2, 7, (0, 1), 1.0),
                (1, 8, (0, 1), 1.0),
                (4, 9, (-1, 1), 1.0),
                (3, 10, (-1, 1), 1.0),
            ),
            class_period=(1, 1),
            class_table=_table((1, 1), 12, lambda cx, cy, s: s % 2),
            n_classes=2,
            phases=(0, 1),
            table_density=Fraction(1, 2),
            pack_type="L",
            period=(1, 1),
            table_pc=0.91,
            table_rho_pc=0.42,
            pressure_slot=(0,) * 12,
            ordered_init_classes=(0,),
            desk_dims=(29, 29),
            scan_dims=(14, 14),
        )
    )

    # (3^2.4.3.4): snub square. Classes follow (cx + f(s)) mod 3, the unique
    # proper 3-coloring of that form; each class is a densest packing.
    a_snub = 2.0 * math.cos(math.radians(15.0))
    f_snub = (2, 0, 1, 0)
    add(
        LatticeSpec(
            name="3^2.4.3.4",
            basis=((a_snub, 0.0), (0.0, a_snub)),
            sites=_polygon(4, SQ2 / 2, 60.0),
            edges=(
                *_ring(4),
                (3, 2, (1, 0), 1.0),
                (0, 3, (0, 1), 1.0),
                (0, 1, (1, 0), 1.0),
                (1, 2, (0, 1), 1.0),
                (0, 2, (0, 1), 1.0),
                (3, 1, (1, 0), 1.0),
            ),
            class_period=(3, 1),
            class_table=_table((3, 1), 4, lambda cx, cy, s: (cx + f_snub[s]) % 3),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="L",
            period=(3, 1),
            table_pc=0.99,
            table_rho_pc=0.3,
            pressure_slot=(0, 0, 0, 0),
            ordered_init_classes=(0,),
            desk_dims=(51, 51),
            scan_dims=(27, 27),
        )
    )

    # (3^4.6): hexagon-ring cell of 6 sites on a 7-site triangular superlattice
    # (one chirality). Inter-cell edges generated from three seeds by the
    # 60-degree rotation s -> s+1, (m, n) -> (-n, m+n).
    e1 = (1.0, 0.0)
    e2 = (0.5, SQ3 / 2)
    t_basis = (
        (2 * e1[0] + e2[0], 2 * e1[1] + e2[1]),  # (2.5, sqrt3/2)
        (-e1[0] + 3 * e2[0], -e1[1] + 3 * e2[1]),  # (0.5, 3 sqrt3/2)
    )
    add(
        LatticeSpec(
            name="3^4.6",
            basis=t_basis,
            sites=_polygon(6, 1.0, 0.0),
            edges=(
                *_ring(6),
                (0, 4, (1, 0), 1.0),
                (0, 3, (1, 0), 1.0),
                (0, 2, (1, -1), 1.0),
                (1, 5, (0, 1), 1.0),
                (1, 4, (0, 1), 1.0),
                (1, 3, (1, 0), 1.0),
                (2, 5, (-1, 1), 1.0),
                (2, 4, (0, 1), 1.0),
                (3, 5, (-1, 1), 1.0),
            ),
            class_period=(3, 3),
            class_table=_table((3, 3), 6, lambda cx, cy, s: (cx - cy + s % 2) % 3),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="L",
            period=(3, 3),
            table_pc=0.97,
            table_rho_pc=0.29,
            pressure_slot=(0,) * 6,
            ordered_init_classes=(0,),
            desk_dims=(42, 42),
            scan_dims=(21, 21),
        )
    )

    # (3^3.4^2): rows of squares separated by triangle strips.
    add(
        LatticeSpec(
            name="3^3.4^2",
            basis=((1.0, 0.0), (0.5, 1.0 + SQ3 / 2)),
            sites=((0.0, 0.0), (0.5, SQ3 / 2)),
            edges=(
                (0, 0, (1, 0), 1.0),
                (1, 1, (1, 0), 1.0),
                (0, 1, (0, 0), 1.0),
                (0, 1, (-1, 0), 1.0),
                (1, 0, (0, 1), 1.0),
            ),
            class_period=(3, 1),
            class_table=_table((3, 1), 2, lambda cx, cy, s: (2 * cx + s) % 3),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="RL",
            period=(3, 1),
            pressure_slot=(0, 0),
            ordered_init_classes=(0,),
            desk_dims=(72, 72),
            scan_dims=(36, 36),
        )
    )

    # (3.4.6.4): hexagon ring per cell; opposite ring sites share a class.
    d3464 = 1.0 + SQ3
    add(
        LatticeSpec(
            name="3.4.6.4",
            basis=((d3464, 0.0), (d3464 / 2, d3464 * SQ3 / 2)),
            sites=_polygon(6, 1.0, 30.0),
            edges=(
                *_ring(6),
                (0, 2, (1, 0), 1.0),
                (5, 3, (1, 0), 1.0),
                (1, 3, (0, 1), 1.0),
                (0, 4, (0, 1), 1.0),
                (2, 4, (-1, 1), 1.0),
                (1, 5, (-1, 1), 1.0),
            ),
            class_period=(1, 1),
            class_table=_table((1, 1), 6, lambda cx, cy, s: s % 3),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="R",
            period=(1, 1),
            pressure_slot=(0,) * 6,
            ordered_init_classes=(0,),
            desk_dims=(41, 41),
            scan_dims=(20, 20),
        )
    )

    # (3.6.3.6): Kagome. Classes are the three sqrt(3)-scaled Kagome
    # sublattices, each of which is a symmetric densest packing.
    kag_delta = (0, 1, 2)
    add(
        LatticeSpec(
            name="3.6.3.6",
            basis=((2.0, 0.0), (1.0, SQ3)),
            sites=((0.0, 0.0), (1.0, 0.0), (0.5, SQ3 / 2)),
            edges=(
                (0, 1, (0, 0), 1.0),
                (1, 2, (0, 0), 1.0),
                (0, 2, (0, 0), 1.0),
                (1, 0, (1, 0), 1.0),
                (2, 0, (0, 1), 1.0),
                (2, 1, (-1, 1), 1.0),
            ),
            class_period=(3, 3),
            class_table=_table(
                (3, 3), 3, lambda cx, cy, s: (cy - cx + kag_delta[s]) % 3
            ),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="R",
            period=(3, 3),
            pressure_slot=(0, 0, 0),
            ordered_init_classes=(0,),
            desk_dims=(57, 57),
            scan_dims=(30, 30),
        )
    )

    # (3.12^2): truncated hexagonal; 6 sites per cell forming two triangles.
    d312 = 2.0 + SQ3
    w312 = (0, 1, 0, 1, 2, 2)
    sites312 = []
    for deg in (15.0, 45.0, 75.0, 105.0, 135.0, 195.0):
        a = math.radians(deg)
        sites312.append((r12 * math.cos(a), r12 * math.sin(a)))
    add(
        LatticeSpec(
            name="3.12^2",
            basis=((d312, 0.0), (d312 / 2, d312 * SQ3 / 2)),
            sites=tuple(sites312),
            edges=(
                (0, 1, (0, 0), 1.0),
                (1, 2, (0, 0), 1.0),
                (2, 3, (0, 0), 1.0),
                (3, 4, (0, 0), 1.0),
                (0, 5, (1, 0), 1.0),
                (0, 4, (1, 0), 1.0),
                (1, 4, (1, 0), 1.0),
                (2, 5, (0, 1), 1.0),
                (3, 5, (0, 1), 1.0),
            ),
            class_period=(1, 1),
            class_table=_table((1, 1), 6, lambda cx, cy, s: w312[s]),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="R",
            period=(1, 1),
            pressure_slot=(0,) * 6,
            ordered_init_classes=(0,),
            desk_dims=(41, 41),
            scan_dims=(20, 20),
        )
    )

    # Z2M: square lattice with Moore (8-neighbor) adjacency.
    add(
        LatticeSpec(
            name="Z2M",
            basis=((1.0, 0.0), (0.0, 1.0)),
            sites=((0.0, 0.0),),
            edges=(
                (0, 0, (1, 0), 1.0),
                (0, 0, (0, 1), 1.0),
                (0, 0, (1, 1), SQ2),
                (0, 0, (1, -1), SQ2),
            ),
            class_period=(2, 2),
            class_table=_table((2, 2), 1, lambda cx, cy, s: cx % 2 + 2 * (cy % 2)),
            n_classes=4,
            phases=(0, 1, 2, 3),
            table_density=Fraction(1, 4),
            pack_type="RL",
            period=(2, 2),
            table_pc=0.98,
            pressure_slot=(0,),
            ordered_init_classes=(0,),
            desk_dims=(100, 100),
            scan_dims=(50, 50),
        )
    )

    # UJ: square lattice plus all half-diagonals; degree-8 corners and
    # degree-4 square centers. All-centers is the unique densest packing.
    add(
        LatticeSpec(
            name="UJ",
            basis=((1.0, 0.0), (0.0, 1.0)),
            sites=((0.0, 0.0), (0.5, 0.5)),
            edges=(
                (0, 0, (1, 0), 1.0),
                (0, 0, (0, 1), 1.0),
                (0, 1, (0, 0), SQ2 / 2),
                (0, 1, (-1, 0), SQ2 / 2),
                (0, 1, (0, -1), SQ2 / 2),
                (0, 1, (-1, -1), SQ2 / 2),
            ),
            class_period=(2, 2),
            class_table=_table(
                (2, 2), 2, lambda cx, cy, s: 2 if s == 1 else (cx + cy) % 2
            ),
            n_classes=3,
            phases=(2,),
            table_density=Fraction(1, 2),
            pack_type="L",
            period=(2, 2),
            pressure_slot=(0, 1),
            ordered_init_classes=(0, 2),
            desk_dims=(70, 70),
            scan_dims=(36, 36),
        )
    )

    # Q: UJ with every other diagonal pair removed; alternating squares keep
    # their center. Corners have degree 6, centers degree 4.
    add(
        LatticeSpec(
            name="Q",
            basis=((1.0, 1.0), (1.0, -1.0)),
            sites=((0.0, 0.0), (1.0, 0.0), (0.5, 0.5)),
            edges=(
                (0, 1, (0, 0), 1.0),
                (0, 1, (-1, -1), 1.0),
                (0, 1, (0, -1), 1.0),
                (0, 1, (-1, 0), 1.0),
                (0, 2, (0, 0), SQ2 / 2),
                (1, 2, (0, 0), SQ2 / 2),
                (2, 0, (1, 0), SQ2 / 2),
                (2, 1, (0, -1), SQ2 / 2),
            ),
            class_period=(1, 1),
            class_table=_table((1, 1), 3, lambda cx, cy, s: s),
            n_classes=3,
            phases=(0, 1, 2),
            table_density=Fraction(1, 3),
            pack_type="L",
            period=(1, 1),
            pressure_slot=(0, 0, 1),
            ordered_init_classes=(0, 1, 2),
            desk_dims=(58, 58),
            scan_dims=(29, 29),
        )
    )

    return cat


CATALOG: dict[str, LatticeSpec] = _build_catalog()

NAMES: tuple[str, ...] = tuple(CATALOG)


class PeriodicGraph:
    """A catalog lattice instantiated on an L1 x L2 torus.

    Sites are indexed (cell_x * L2 + cell_y) * sites_per_cell + s, row-major.
    Neighbor lists are stored padded to the maximum degree with the sentinel
    index ``site_count`` (kernels keep a phantom always-empty site there).
    """

    def __init__(self, spec: LatticeSpec, dims: tuple[int, int]):
        l1, l2 = dims
        if l1 < 1 or l2 < 1:
            raise IncommensurateDims(f"dims {dims} must be positive")
        p1, p2 = spec.period
        if l1 % p1 or l2 % p2:
            raise IncommensurateDims(
                f"{spec.name}: dims {dims} must be multiples of the period {spec.period}"
            )
        m = spec.sites_per_cell
        n = l1 * l2 * m
        self.spec = spec
        self.dims = (l1, l2)
        self.site_count = n

        adj: list[set[int]] = [set() for _ in range(n)]
        ea: list[int] = []
        eb: list[int] = []
        for cx in range(l1):
            for cy in range(l2):
                for a, b, (dx, dy), _ln in spec.edges:
                    i = self.site_index(cx, cy, a)
                    j = self.site_index((cx + dx) % l1, (cy + dy) % l2, b)
                    if i == j:
                        raise IncommensurateDims(
                            f"{spec.name} on {dims}: edge {(a, b, (dx, dy))} wraps to a loop"
                        )
                    if j in adj[i]:
                        raise IncommensurateDims(
                            f"{spec.name} on {dims}: edge {(a, b, (dx, dy))} wraps onto another"
                        )
                    adj[i].add(j)
                    adj[j].add(i)
                    ea.append(i)
                    eb.append(j)

        self.edges_a = np.asarray(ea, dtype=np.int32)
        self.edges_b = np.asarray(eb, dtype=np.int32)
        self.degree = np.asarray([len(s) for s in adj], dtype=np.int32)
        max_deg = int(self.degree.max())
        nbrs = np.full((n, max_deg), n, dtype=np.int32)
        for i, s in enumerate(adj):
            row = sorted(s)
            nbrs[i, : len(row)] = row
        self.neighbors = nbrs

        cls = np.empty(n, dtype=np.int8)
        slot = np.empty(n, dtype=np.uint8)
        for cx in range(l1):
            for cy in range(l2):
                base = (cx * l2 + cy) * m
                for s in range(m):
                    cls[base + s] = spec.class_of_site(cx, cy, s)
                    slot[base + s] = spec.pressure_slot[s]
        self.class_of = cls
        self.pressure_slot_of = slot
        self.n_classes = spec.n_classes
        self.class_sites = tuple(
            np.flatnonzero(cls == k).astype(np.int32) for k in range(spec.n_classes)
        )
        self.class_sizes = np.asarray([len(cs) for cs in self.class_sites])

    # --- indexing helpers -------------------------------------------------

    def site_index(self, cx: int, cy: int, s: int) -> int:
        l1, l2 = self.dims
        return ((cx % l1) * l2 + (cy % l2)) * self.spec.sites_per_cell + s

    def site_cell(self, i: int) -> tuple[int, int, int]:
        m = self.spec.sites_per_cell
        cell, s = divmod(i, m)
        cx, cy = divmod(cell, self.dims[1])
        return cx, cy, s

    def position(self, i: int) -> tuple[float, float]:
        cx, cy, s = self.site_cell(i)
        (b1x, b1y), (b2x, b2y) = self.spec.basis
        sx, sy = self.spec.sites[s]
        return (cx * b1x + cy * b2x + sx, cx * b1y + cy * b2y + sy)

    def neighbor_list(self, i: int) -> list[int]:
        return [int(j) for j in self.neighbors[i] if j != self.site_count]

    def __repr__(self) -> str:  # pragma: no cover
        return f"PeriodicGraph({self.spec.name}, dims={self.dims}, sites={self.site_count})"


def build_lattice(name: str, dims: tuple[int, int]) -> PeriodicGraph:
    """Instantiate a catalog lattice on a torus of `dims` cells."""
    if name not in CATALOG:
        raise UnknownLattice(f"unknown lattice {name!r}; known: {', '.join(NAMES)}")
    return PeriodicGraph(CATALOG[name], tuple(dims))


def second_neighbor_shell(g: PeriodicGraph, x: int) -> set[int]:
    """Sites at hop distance exactly 2 from x."""
    first = set(g.neighbor_list(x))
    second: set[int] = set()
    for y in first:
        second.update(g.neighbor_list(y))
    second.discard(x)
    return second - first


@dataclass
class ValidationReport:
    """Pass/fail results per structural invariant."""

    lattice: str
    dims: tuple[int, int]
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, ok, detail))

    @property
    def passed(self) -> bool:
        return all(ok for _name, ok, _detail in self.checks)

    def __str__(self) -> str:
        lines = [f"validate {self.lattice} on {self.dims}:"]
        for name, ok, detail in self.checks:
            mark = "ok" if ok else "FAIL"
            lines.append(f"  {mark:4s} {name}" + (f" ({detail})" if detail else ""))
        return "\n".join(lines)


def _default_validate_dims(spec: LatticeSpec) -> tuple[int, int]:
    p1, p2 = spec.period
    return (p1 * max(1, -(-3 // p1)), p2 * max(1, -(-3 // p2)))


def validate(spec: LatticeSpec, dims: tuple[int, int] | None = None) -> ValidationReport:
    """Check edge lengths, degree profile, class independence and cover."""
    if dims is None:
        dims = _default_validate_dims(spec)
    report = ValidationReport(spec.name, dims)

    try:
        g = PeriodicGraph(spec, dims)
    except (IncommensurateDims, BadLattice) as exc:
        report.add("build", False, str(exc))
        return report
    report.add("build", True)

    # Edge lengths in the embedding, against each edge's recorded length.
    (b1x, b1y), (b2x, b2y) = spec.basis
    worst = 0.0
    for a, b, (dx, dy), ln in spec.edges:
        ax, ay = spec.sites[a]
        bx = spec.sites[b][0] + dx * b1x + dy * b2x
        by = spec.sites[b][1] + dx * b1y + dy * b2y
        got = math.hypot(bx - ax, by - ay)
        worst = max(worst, abs(got - ln))
    report.add("edge-lengths", worst < 1e-9, f"max deviation {worst:.2e}")

    profile = spec.degree_profile
    got_profile = tuple(
        int(g.degree[g.site_index(0, 0, s)]) for s in range(spec.sites_per_cell)
    )
    report.add(
        "degree-profile",
        got_profile == profile,
        f"constant {profile[0]}" if len(set(profile)) == 1 else f"mixed {sorted(set(profile), reverse=True)}",
    )

    bad = int(np.sum(g.class_of[g.edges_a] == g.class_of[g.edges_b]))
    report.add("class-independence", bad == 0, f"{bad} same-class edges")

    covered = sum(len(cs) for cs in g.class_sites)
    report.add("class-cover", covered == g.site_count)

    sums_ok = int(g.degree.sum()) == 2 * len(g.edges_a)
    report.add("degree-sum", sums_ok)

    # Translation invariance: shifting by a class period maps classes and
    # neighborhoods onto themselves.
    def shifted(i: int, sx: int, sy: int) -> int:
        cx, cy, s = g.site_cell(i)
        return g.site_index(cx + sx, cy + sy, s)

    ok_shift = True
    p1, p2 = spec.class_period
    for (sx, sy) in ((p1, 0), (0, p2)):
        for i in range(min(g.site_count, 4 * spec.sites_per_cell)):
            j = shifted(i, sx, sy)
            if g.class_of[i] != g.class_of[j]:
                ok_shift = False
            moved = {shifted(v, sx, sy) for v in g.neighbor_list(i)}
            if moved != set(g.neighbor_list(j)):
                ok_shift = False
    report.add("translation-invariance", ok_shift)

    return report


# --- text format --------------------------------------------------------

def dump_lattice_text(spec: LatticeSpec, sink: TextIO) -> None:
    """Write a lattice definition in the plain text exchange format."""
    sink.write(f"lattice {spec.name}\n")
    for bx, by in spec.basis:
        sink.write(f"basis {bx!r} {by!r}\n")
    for sx, sy in spec.sites:
        sink.write(f"site {sx!r} {sy!r}\n")
    for a, b, (dx, dy), ln in spec.edges:
        sink.write(f"edge {a} {b} {dx} {dy} {ln!r}\n")
    p1, p2 = spec.class_period
    for cx in range(p1):
        for cy in range(p2):
            for s in range(spec.sites_per_cell):
                sink.write(f"class {cx} {cy} {s} {spec.class_table[cx][cy][s]}\n")
    for phase, k in enumerate(spec.phases):
        sink.write(f"optimal {phase} {k}\n")


def load_lattice_text(source: TextIO) -> LatticeSpec:
    """Parse the text format back into a LatticeSpec.

    Catalog metadata (reference density, critical pressure, packing type) is
    restored from the built-in catalog when the name matches; otherwise the
    density is derived from the first optimal class and the rest left unset.
    """
    name = None
    basis: list[tuple[float, float]] = []
    sites: list[tuple[float, float]] = []
    edges: list[Edge] = []
    class_entries: dict[tuple[int, int, int], int] = {}
    phases: list[tuple[int, int]] = []

    for raw in source:
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        kind, args = parts[0], parts[1:]
        if kind == "lattice":
            name = args[0]
        elif kind == "basis":
            basis.append((float(args[0]), float(args[1])))
        elif kind == "site":
            sites.append((float(args[0]), float(args[1])))
        elif kind == "edge":
            edges.append(
                (int(args[0]), int(args[1]), (int(args[2]), int(args[3])), float(args[4]))
            )
        elif kind == "class":
            class_entries[(int(args[0]), int(args[1]), int(args[2]))] = int(args[3])
        elif kind == "optimal":
            phases.append((int(args[0]), int(args[1])))
        else:
            raise BadLattice(f"unknown record {kind!r}")

    if name is None or len(basis) != 2 or not sites or not class_entries:
        raise BadLattice("incomplete lattice definition")

    p1 = max(cx for cx, _cy, _s in class_entries) + 1
    p2 = max(cy for _cx, cy, _s in class_entries) + 1
    m = len(sites)
    table = tuple(
        tuple(tuple(class_entries[(cx, cy, s)] for s in range(m)) for cy in range(p2))
        for cx in range(p1)
    )
    n_classes = max(class_entries.values()) + 1
    phase_classes = tuple(k for _i, k in sorted(phases))

    if name in CATALOG:
        ref = CATALOG[name]
        return LatticeSpec(
            name=name,
            basis=(basis[0], basis[1]),
            sites=tuple(sites),
            edges=tuple(edges),
            class_period=(p1, p2),
            class_table=table,
            n_classes=n_classes,
            phases=phase_classes,
            table_density=ref.table_density,
            pack_type=ref.pack_type,
            period=ref.period,
            table_pc=ref.table_pc,
            table_rho_pc=ref.table_rho_pc,
            pressure_slot=ref.pressure_slot,
            ordered_init_classes=ref.ordered_init_classes,
            desk_dims=ref.desk_dims,
            scan_dims=ref.scan_dims,
        )

    # Foreign definition: derive what we can.
    deg = [0] * m
    for a, b, _off, _ln in edges:
        deg[a] += 1
        deg[b] += 1
    max_deg = max(deg)
    class_count = [0] * n_classes
    for v in class_entries.values():
        class_count[v] += 1
    density = (
        Fraction(class_count[phase_classes[0]], p1 * p2 * m)
        if phase_classes
        else Fraction(0)
    )
    return LatticeSpec(
        name=name,
        basis=(basis[0], basis[1]),
        sites=tuple(sites),
        edges=tuple(edges),
        class_period=(p1, p2),
        class_table=table,
        n_classes=n_classes,
        phases=phase_classes,
        table_density=density,
        pack_type="?",
        period=(p1, p2),
        pressure_slot=tuple(0 if d == max_deg else 1 for d in deg),
        ordered_init_classes=phase_classes or tuple(range(n_classes)),
        desk_dims=(0, 0),
        scan_dims=(0, 0),
    )
