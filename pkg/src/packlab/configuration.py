"""Occupancy configurations on a torus: legality, density, inits, snapshots."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np

from . import rng
from .lattices import PeriodicGraph, build_lattice


class PhaseOutOfRange(IndexError):
    """Requested symmetric packing index beyond the lattice's phase list."""


class IllegalInput(ValueError):
    """Malformed snapshot or an input that violates a documented precondition."""


@dataclass
class Configuration:
    """One occupancy pattern (0/1 per site) on a periodic graph."""

    graph: PeriodicGraph
    bits: np.ndarray  # uint8, length graph.site_count

    def __post_init__(self) -> None:
        if self.bits.shape != (self.graph.site_count,):
            raise IllegalInput(
                f"bits length {self.bits.shape} does not match {self.graph.site_count} sites"
            )
        if self.bits.dtype != np.uint8:
            self.bits = self.bits.astype(np.uint8)

    def copy(self) -> "Configuration":
        return Configuration(self.graph, self.bits.copy())

    @property
    def occupied(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class DensityReport:
    """Exact occupation fractions, total and per update class."""

    rho_total: Fraction
    rho_by_class: tuple[Fraction, ...]

    @property
    def rho_total_float(self) -> float:
        return float(self.rho_total)


def empty(g: PeriodicGraph) -> Configuration:
    return Configuration(g, np.zeros(g.site_count, dtype=np.uint8))


def is_legal(c: Configuration) -> bool:
    """True when no edge joins two occupied sites."""
    g = c.graph
    return not bool(np.any(c.bits[g.edges_a] & c.bits[g.edges_b]))


def density(c: Configuration) -> DensityReport:
    g = c.graph
    total = Fraction(int(c.bits.sum()), g.site_count)
    by_class = tuple(
        Fraction(int(c.bits[sites].sum()), len(sites)) for sites in g.class_sites
    )
    return DensityReport(total, by_class)


def optimal_packing(g: PeriodicGraph, phase: int = 0) -> Configuration:
    """The maximally symmetric densest packing with the given phase index."""
    phases = g.spec.phases
    if not 0 <= phase < len(phases):
        raise PhaseOutOfRange(
            f"{g.spec.name} has {len(phases)} symmetric packings, got phase {phase}"
        )
    c = empty(g)
    c.bits[g.class_sites[phases[phase]]] = 1
    return c


def one_class_full(g: PeriodicGraph, k: int) -> Configuration:
    """All sites of update class k occupied (legal since classes are independent)."""
    if not 0 <= k < g.n_classes:
        raise PhaseOutOfRange(f"{g.spec.name} has {g.n_classes} classes, got {k}")
    c = empty(g)
    c.bits[g.class_sites[k]] = 1
    return c


def bernoulli_init(g: PeriodicGraph, rho0: float, seed: int) -> Configuration:
    """Product-measure initial state; may be illegal, one cycle restores legality."""
    if not 0.0 <= rho0 <= 1.0:
        raise IllegalInput(f"rho0 {rho0} outside [0, 1]")
    draws = rng.site_draws_np(rng.init_key(seed), np.arange(g.site_count, dtype=np.uint64))
    return Configuration(g, (draws < rho0).astype(np.uint8))


# --- snapshots ------------------------------------------------------------

_RUNS_PER_LINE = 16


def snapshot_write(c: Configuration, sink: TextIO) -> None:
    """Write `config <lattice> <L1> <L2>` then run-length encoded bits."""
    g = c.graph
    sink.write(f"config {g.spec.name} {g.dims[0]} {g.dims[1]}\n")
    bits = c.bits
    tokens: list[str] = []
    i = 0
    n = len(bits)
    while i < n:
        j = i
        v = bits[i]
        while j < n and bits[j] == v:
            j += 1
        tokens.append(f"{int(v)}x{j - i}")
        i = j
    for k in range(0, len(tokens), _RUNS_PER_LINE):
        sink.write(" ".join(tokens[k : k + _RUNS_PER_LINE]) + "\n")
    sink.write("end\n")


def snapshot_read(source: TextIO) -> Configuration:
    """Parse a snapshot back into a configuration on a freshly built graph."""
    header = source.readline().split()
    if len(header) != 4 or header[0] != "config":
        raise IllegalInput(f"bad snapshot header {header!r}")
    name = header[1]
    try:
        dims = (int(header[2]), int(header[3]))
    except ValueError as exc:
        raise IllegalInput(f"bad snapshot dims {header[2:]!r}") from exc
    g = build_lattice(name, dims)

    bits = np.zeros(g.site_count, dtype=np.uint8)
    pos = 0
    done = False
    for raw in source:
        for tok in raw.split():
            if tok == "end":
                done = True
                break
            try:
                v, count = tok.split("x")
                v, count = int(v), int(count)
            except ValueError as exc:
                raise IllegalInput(f"bad run token {tok!r}") from exc
            if v not in (0, 1) or count < 1 or pos + count > g.site_count:
                raise IllegalInput(f"run {tok!r} out of range at offset {pos}")
            if v:
                bits[pos : pos + count] = 1
            pos += count
        if done:
            break
    if not done or pos != g.site_count:
        raise IllegalInput(f"snapshot covers {pos} of {g.site_count} sites")
    return Configuration(g, bits)
