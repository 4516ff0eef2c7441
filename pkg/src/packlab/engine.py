"""Pressure-driven automaton: class passes, full cycles, runs, reachability.

One cycle visits every update class once (default schedule 0..K-1). A site
occupies with its pressure probability when its whole neighborhood is empty
and empties otherwise, so the state is legal after every full cycle and
higher pressure can only add blockings, never remove them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import rng
from .configuration import Configuration, IllegalInput, density
from .lattices import PeriodicGraph

try:  # compiled kernel if the extension built, NumPy otherwise
    from ._kernels import BACKEND, class_pass_kernel
except ImportError:  # pragma: no cover - depends on build environment
    from ._kernels_py import BACKEND, class_pass_kernel


@dataclass(frozen=True)
class Pressure:
    """Occupation-attempt probability; two-slot lattices split by site degree.

    Single-parameter lattices use `p`. On UJ and Q, `p_high` drives the
    high-degree corner sites and `p4` the degree-4 centers; passing plain
    `p` there applies it to both slots.
    """

    p: float | None = None
    p4: float | None = None
    p_high: float | None = None

    def __post_init__(self) -> None:
        if self.p is None and (self.p4 is None or self.p_high is None):
            raise IllegalInput("need p, or both p4 and p_high")
        for name, v in (("p", self.p), ("p4", self.p4), ("p_high", self.p_high)):
            if v is not None and not 0.0 <= v <= 1.0:
                raise IllegalInput(f"{name}={v} outside [0, 1]")

    def slot_values(self, two_parameter: bool) -> tuple[float, float]:
        """(slot-0 value, slot-1 value) for a lattice of the given kind."""
        if not two_parameter:
            if self.p is None:
                raise IllegalInput("this lattice takes a single pressure p")
            return (self.p, self.p)
        if self.p4 is not None and self.p_high is not None:
            return (self.p_high, self.p4)
        return (self.p, self.p)  # uniform shorthand


def p_eff_array(g: PeriodicGraph, pr: Pressure) -> np.ndarray:
    """Per-site attempt probability, resolving pressure slots."""
    hi, lo = pr.slot_values(g.spec.two_parameter)
    out = np.where(g.pressure_slot_of == 0, hi, lo)
    return np.ascontiguousarray(out, dtype=np.float64)


def local_update(
    g: PeriodicGraph, c: Configuration, x: int, pr: Pressure, draw: float
) -> int:
    """Reference single-site rule: occupy iff the neighborhood is empty and
    the draw clears the site's pressure."""
    p_x = float(p_eff_array(g, pr)[x])
    if any(c.bits[y] for y in g.neighbor_list(x)):
        return 0
    return 1 if draw < p_x else 0


class _Workspace:
    """Reusable per-run buffers: extended bit array and per-class pressures."""

    def __init__(self, g: PeriodicGraph, pr: Pressure):
        self.graph = g
        self.bits_ext = np.zeros(g.site_count + 1, dtype=np.uint8)
        p_eff = p_eff_array(g, pr)
        self.class_p = tuple(
            np.ascontiguousarray(p_eff[sites]) for sites in g.class_sites
        )

    def load(self, c: Configuration) -> None:
        self.bits_ext[:-1] = c.bits
        self.bits_ext[-1] = 0

    def store(self, c: Configuration) -> None:
        c.bits[:] = self.bits_ext[:-1]


def _run_class_pass(
    ws: _Workspace, k: int, base_key: int, threads: int = 1
) -> None:
    g = ws.graph
    sites = g.class_sites[k]
    p_sites = ws.class_p[k]
    if threads <= 1 or len(sites) < 4096:
        class_pass_kernel(ws.bits_ext, g.neighbors, sites, p_sites, base_key)
        return
    bounds = np.linspace(0, len(sites), threads + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        futures = [
            ex.submit(
                class_pass_kernel,
                ws.bits_ext,
                g.neighbors,
                sites[lo:hi],
                p_sites[lo:hi],
                base_key,
            )
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for f in futures:
            f.result()


def class_pass(
    g: PeriodicGraph,
    c: Configuration,
    k: int,
    pr: Pressure,
    rng_state: tuple[int, int],
    threads: int = 1,
) -> None:
    """One simultaneous pass over update class k, in place on c.

    rng_state is (seed, cycle); each draw is a pure function of
    (seed, cycle, class, site), so site order never matters.
    """
    seed, cycle = rng_state
    ws = _Workspace(g, pr)
    ws.load(c)
    _run_class_pass(ws, k, rng.pass_key(seed, cycle, k), threads)
    ws.store(c)


def full_cycle(
    g: PeriodicGraph,
    c: Configuration,
    pr: Pressure,
    seed: int,
    cycle: int,
    schedule: Sequence[int] | None = None,
    threads: int = 1,
) -> None:
    """One full cycle: every class once, in schedule order, in place on c."""
    ws = _Workspace(g, pr)
    ws.load(c)
    for k in schedule if schedule is not None else range(g.n_classes):
        _run_class_pass(ws, k, rng.pass_key(seed, cycle, k), threads)
    ws.store(c)


Observer = Callable[[int, Configuration], None]


@dataclass
class RunTrace:
    """Cycle-by-cycle record of a run."""

    steps: int
    seed: int
    schedule: tuple[int, ...]
    rho_series: np.ndarray  # (steps,)
    rho_class_series: np.ndarray  # (steps, n_classes)
    final: Configuration | None = None


def run(
    g: PeriodicGraph,
    c0: Configuration,
    pr: Pressure,
    n_cycles: int,
    seed: int,
    observers: Iterable[Observer] = (),
    schedule: Sequence[int] | None = None,
    threads: int = 1,
    start_cycle: int = 0,
) -> RunTrace:
    """Run n_cycles full cycles from c0 (not mutated) and record densities."""
    sched = tuple(schedule) if schedule is not None else tuple(range(g.n_classes))
    ws = _Workspace(g, pr)
    ws.load(c0)
    observers = tuple(observers)

    rho = np.empty(n_cycles, dtype=np.float64)
    rho_k = np.empty((n_cycles, g.n_classes), dtype=np.float64)
    c = c0.copy()
    sizes = g.class_sizes.astype(np.float64)
    for t in range(n_cycles):
        cycle = start_cycle + t
        for k in sched:
            _run_class_pass(ws, k, rng.pass_key(seed, cycle, k), threads)
        bits = ws.bits_ext[:-1]
        rho[t] = bits.sum() / g.site_count
        for k in range(g.n_classes):
            rho_k[t, k] = bits[g.class_sites[k]].sum() / sizes[k]
        if observers:
            ws.store(c)
            for obs in observers:
                obs(cycle, c)
    ws.store(c)
    return RunTrace(
        steps=n_cycles,
        seed=seed,
        schedule=sched,
        rho_series=rho,
        rho_class_series=rho_k,
        final=c,
    )


def reachability_check(
    g: PeriodicGraph,
    c_a: Configuration,
    c_b: Configuration,
    pr: Pressure,
    schedule: Sequence[int] | None = None,
) -> float:
    """Log-probability that one full cycle maps c_a exactly to c_b.

    Returns -inf when impossible. Walks the schedule replaying the
    deterministic part and charging log p or log(1-p) for every free choice.
    """
    sched = tuple(schedule) if schedule is not None else tuple(range(g.n_classes))
    p_eff = p_eff_array(g, pr)
    state = c_a.bits.copy()
    target = c_b.bits
    logprob = 0.0
    seen = np.zeros(g.site_count, dtype=bool)
    for k in sched:
        sites = g.class_sites[k]
        blocked = (
            np.add.reduce(
                np.concatenate([state, [0]]).astype(np.uint8)[g.neighbors[sites]],
                axis=1,
            )
            > 0
        )
        want = target[sites].astype(bool)
        # a blocked site must end empty
        if np.any(blocked & want):
            return -math.inf
        free = ~blocked
        for x, w in zip(sites[free], want[free]):
            p_x = p_eff[x]
            prob = p_x if w else 1.0 - p_x
            if prob <= 0.0:
                return -math.inf
            logprob += math.log(prob)
        state[sites] = target[sites]
        seen[sites] = True
    if not seen.all():
        # classes missing from the schedule must already agree
        if np.any(state[~seen] != target[~seen]):
            return -math.inf
    return logprob
