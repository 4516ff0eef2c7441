"""Phase classification and critical-pressure bracketing for the packing PCA.

Two complementary relaxations drive every verdict: ordered starts (one update
class filled solid) should melt when the pressure is below critical, and
Bernoulli starts should develop a lasting class-density split above it.  A
per-cycle order parameter is reduced to windowed means, the means to per-run
votes, and the votes to a majority verdict; bisection on the verdict boundary
then produces a bracket for the critical pressure.

Verdicts are deterministic given the protocol and seeds, and independent of
thread count (the engine guarantees draw-for-draw reproducibility).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .configuration import (
    Configuration,
    DensityReport,
    IllegalInput,
    bernoulli_init,
    one_class_full,
)
from .engine import Pressure, run
from .lattices import CATALOG, build_lattice

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"
UNDECIDED = "undecided"

# Default fallback when a lattice has no tabulated density at the transition.
RHO0_FALLBACK = 0.3

# Pressures probed to certify "no transition" on always-subcritical lattices.
NO_TRANSITION_PROBES = (0.9, 0.99, 0.999)


class Undecidable(RuntimeError):
    """Cycle budget exhausted without separating the phases.

    `partial` carries the best bracket (or curve prefix) obtained so far.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class ProtocolFailure(RuntimeError):
    """Verdicts came out monotone-inconsistent in p (sub above super)."""


@dataclass(frozen=True)
class Protocol:
    """Knobs of the classification experiment.

    The defaults target two-digit accuracy at desk scale; `threads` is
    plumbing only and never changes any verdict or series.
    """

    burn_in: int = 1000
    window: int = 500
    eps: float = 0.02
    delta: float = 0.10
    seeds: tuple[int, ...] = (1, 2, 3)
    max_cycles: int = 10000
    resolution: float = 0.01
    rho0: float | None = None  # None: catalog transition density, else 0.3
    coarse_grid: tuple[float, ...] = (0.60, 0.70, 0.80, 0.90, 0.95, 0.97, 0.99, 0.999)
    threads: int = 1

    def as_dict(self) -> dict:
        return {
            "burn_in": self.burn_in,
            "window": self.window,
            "eps": self.eps,
            "delta": self.delta,
            "seeds": list(self.seeds),
            "max_cycles": self.max_cycles,
            "resolution": self.resolution,
            "rho0": self.rho0,
            "coarse_grid": list(self.coarse_grid),
        }


@dataclass
class PhaseVerdict:
    """Outcome of one classification point."""

    verdict: str  # subcritical | supercritical | undecided
    order_series: dict[str, np.ndarray]  # per-run per-cycle order parameter
    window_means: dict[str, tuple[float, float, float]]  # last three per run
    rho_window: dict[str, float]  # windowed mean total density per run
    rho_class_window: dict[str, tuple[float, ...]]  # windowed class means


@dataclass
class CriticalityEstimate:
    """Bracket for the critical pressure (or a no-transition report)."""

    lattice: str
    dims: tuple[int, int]
    bracket: tuple[float, float] | None
    rho_at_pc: float | None
    protocol: Protocol
    transition: bool = True
    p4: float | None = None  # fixed low-degree pressure for two-slot lattices
    history: tuple[tuple[float, str, tuple[int, int]], ...] = field(default_factory=tuple)

    @property
    def midpoint(self) -> float | None:
        if self.bracket is None:
            return None
        return 0.5 * (self.bracket[0] + self.bracket[1])


_Z2M_PAIRINGS = ((0, 1, 2, 3), (2, 3, 0, 1), (0, 2, 1, 3), (1, 3, 0, 2))


def order_parameter(
    report: DensityReport,
    lattice: str | None = None,
    classes: tuple[int, ...] | None = None,
) -> float:
    """Class-density contrast: max minus min over update classes.

    For Z2M the four row/column sublattice matchings are compared instead and
    the largest pair-vs-rest contrast is returned, since any single sublattice
    carries only one densest packing while slide-ordered states fill a pair.
    `classes` restricts the contrast to a subset (used by the two-slot
    protocol, where only the corner classes can break symmetry).
    """
    rho = np.array([float(r) for r in report.rho_by_class])
    if len(rho) < 2:
        raise IllegalInput("order parameter needs at least two classes")
    if lattice == "Z2M":
        return max(
            abs(rho[i] + rho[j] - rho[k] - rho[l]) for i, j, k, l in _Z2M_PAIRINGS
        )
    if classes is not None:
        rho = rho[list(classes)]
    return float(rho.max() - rho.min())


def order_series(lattice: str, rho_cls: np.ndarray) -> np.ndarray:
    """Vectorized per-cycle order parameter from a class-density series."""
    if lattice == "Z2M":
        vals = [
            np.abs(rho_cls[:, i] + rho_cls[:, j] - rho_cls[:, k] - rho_cls[:, l])
            for i, j, k, l in _Z2M_PAIRINGS
        ]
        return np.maximum.reduce(vals)
    if lattice in ("UJ", "Q"):
        return np.abs(rho_cls[:, 0] - rho_cls[:, 1])
    return rho_cls.max(axis=1) - rho_cls.min(axis=1)


def _last_three_means(
    lattice: str, rho_cls: np.ndarray, window: int
) -> tuple[float, float, float]:
    """Order parameter of the class-density means over the last three windows.

    Averaging the class densities before taking the contrast is what kills
    the finite-torus noise floor: the per-cycle contrast of a melted state
    hovers at the density-fluctuation scale (0.04 on a 50x50 torus), which
    would sit above eps no matter how long the run.
    """
    w = min(window, len(rho_cls) // 3)
    if w < 1:
        raise IllegalInput("series too short for three window means")
    tail = rho_cls[-3 * w :]
    return tuple(
        float(order_series(lattice, tail[i * w : (i + 1) * w].mean(axis=0)[None, :])[0])
        for i in range(3)
    )


def _ordered_settled(m: tuple[float, float, float], proto: Protocol) -> bool:
    """Ordered-start run has a clear fate: melted, or pinned high and holding.

    Stopping at the first window below eps locks the melt vote; near the
    transition the contrast wanders on window timescales, so insisting on a
    low *final* window would turn the verdict into a coin flip.
    """
    _, m2, m3 = m
    if m3 < proto.eps:
        return True
    return m3 > 0.5 and m3 >= m2 - proto.eps / 2


def _grew(m: tuple[float, float, float], proto: Protocol) -> bool:
    """Non-decreasing window means, with slack for the saturation wobble.

    A settled split fluctuates by about delta/2 between windows; the eps
    scale is far too strict there and would veto blatantly ordered states.
    """
    m1, m2, m3 = m
    slack = proto.delta / 2
    return m2 >= m1 - slack and m3 >= m2 - slack


def _bernoulli_settled(m: tuple[float, float, float], proto: Protocol) -> bool:
    """Bernoulli-start run has a clear fate: split wide open, or flat dead."""
    _, m2, m3 = m
    if m3 > 2 * proto.delta and _grew(m, proto):
        return True
    return m3 < proto.delta / 2 and m3 <= m2 + proto.eps / 2


def _run_point(
    g,
    c0: Configuration,
    pr: Pressure,
    seed: int,
    proto: Protocol,
    lattice: str,
    settled,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run burn-in plus three windows, extending while the fate is unclear.

    Returns (order series, total-density series, class-density series).
    """
    total = min(proto.burn_in + 3 * proto.window, proto.max_cycles)
    trace = run(g, c0, pr, total, seed, threads=proto.threads)
    rho = trace.rho_series
    rho_cls = trace.rho_class_series
    current = trace.final
    while True:
        means = _last_three_means(lattice, rho_cls, proto.window)
        if settled(means, proto) or len(rho) >= proto.max_cycles:
            return order_series(lattice, rho_cls), rho, rho_cls
        more = min(proto.window, proto.max_cycles - len(rho))
        trace = run(g, current, pr, more, seed, threads=proto.threads, start_cycle=len(rho))
        rho = np.concatenate([rho, trace.rho_series])
        rho_cls = np.vstack([rho_cls, trace.rho_class_series])
        current = trace.final


def _resolve_rho0(lattice: str, proto: Protocol) -> float:
    if proto.rho0 is not None:
        return proto.rho0
    table = CATALOG[lattice].table_rho_pc
    return table if table is not None else RHO0_FALLBACK


def classify_phase(
    lattice: str,
    dims: tuple[int, int],
    pr: Pressure,
    protocol: Protocol | None = None,
    seeds: tuple[int, ...] | None = None,
) -> PhaseVerdict:
    """Majority-vote phase verdict at one pressure.

    Subcritical: from every ordered start the windowed order parameter ends
    below eps, for a majority of seeds.  Supercritical: from a Bernoulli
    start it ends above delta with non-decreasing window means (slack eps),
    for a majority of seeds.  Anything else, or both at once, is undecided.
    """
    proto = protocol if protocol is not None else Protocol()
    if seeds is None:
        seeds = proto.seeds
    spec = CATALOG[lattice]
    g = build_lattice(lattice, dims)
    rho0 = _resolve_rho0(lattice, proto)

    series_by_run: dict[str, np.ndarray] = {}
    window_means: dict[str, tuple[float, float, float]] = {}
    rho_window: dict[str, float] = {}
    rho_class_window: dict[str, tuple[float, ...]] = {}
    sub_votes = 0
    super_votes = 0
    for seed in seeds:
        melted_all = True
        for k in spec.ordered_init_classes:
            label = f"ordered{k}-seed{seed}"
            series, rho, rho_cls = _run_point(
                g, one_class_full(g, k), pr, seed, proto, lattice, _ordered_settled
            )
            means = _last_three_means(lattice, rho_cls, proto.window)
            series_by_run[label] = series
            window_means[label] = means
            w = min(proto.window, len(rho))
            rho_window[label] = float(rho[-w:].mean())
            rho_class_window[label] = tuple(rho_cls[-w:].mean(axis=0))
            if not means[2] < proto.eps:
                melted_all = False
        if melted_all:
            sub_votes += 1

        label = f"bernoulli-seed{seed}"
        series, rho, rho_cls = _run_point(
            g, bernoulli_init(g, rho0, seed), pr, seed, proto, lattice, _bernoulli_settled
        )
        means = _last_three_means(lattice, rho_cls, proto.window)
        series_by_run[label] = series
        window_means[label] = means
        w = min(proto.window, len(rho))
        rho_window[label] = float(rho[-w:].mean())
        rho_class_window[label] = tuple(rho_cls[-w:].mean(axis=0))
        if means[2] > proto.delta and _grew(means, proto):
            super_votes += 1

    majority = len(seeds) / 2.0
    sub = sub_votes > majority
    sup = super_votes > majority
    if sub and not sup:
        verdict = SUBCRITICAL
    elif sup and not sub:
        verdict = SUPERCRITICAL
    else:
        verdict = UNDECIDED
    return PhaseVerdict(
        verdict=verdict,
        order_series=series_by_run,
        window_means=window_means,
        rho_window=rho_window,
        rho_class_window=rho_class_window,
    )


def _check_monotone(
    history: list[tuple[float, str, tuple[int, int]]], resolution: float
) -> None:
    """Flag sub-above-super inversions beyond the bracket resolution.

    Only verdicts at the same torus size are compared; the pseudo-critical
    point shifts with size, so a scan-stage verdict may legitimately sit on
    the other side of a desk-stage one.
    """
    for dims in {d for _, _, d in history}:
        subs = [p for p, v, d in history if v == SUBCRITICAL and d == dims]
        supers = [p for p, v, d in history if v == SUPERCRITICAL and d == dims]
        if subs and supers and max(subs) > min(supers) + resolution:
            raise ProtocolFailure(
                f"subcritical at {max(subs)} above supercritical at {min(supers)}"
                f" on {dims}"
            )


def _measure_rho(
    lattice: str, dims: tuple[int, int], make_pressure, p: float, proto: Protocol
) -> float:
    g = build_lattice(lattice, dims)
    rho0 = _resolve_rho0(lattice, proto)
    cycles = proto.burn_in + proto.window
    trace = run(
        g,
        bernoulli_init(g, rho0, proto.seeds[0]),
        make_pressure(p),
        cycles,
        proto.seeds[0],
        threads=proto.threads,
    )
    return float(trace.rho_series[-proto.window :].mean())


def _bracket_scalar(
    lattice: str,
    dims: tuple[int, int] | None,
    proto: Protocol,
    make_pressure,
    p4: float | None = None,
) -> CriticalityEstimate:
    """Coarse scan on the small torus, then desk-scale bisection.

    `make_pressure` maps the scanned scalar to a Pressure, which lets the
    same machinery drive single-pressure lattices and p_high scans at fixed
    p4 on the two-slot ones.
    """
    spec = CATALOG[lattice]
    desk = dims if dims is not None else spec.desk_dims
    scan = spec.scan_dims
    history: list[tuple[float, str, tuple[int, int]]] = []

    def classify(p: float, where: tuple[int, int]) -> str:
        v = classify_phase(lattice, where, make_pressure(p), proto).verdict
        history.append((p, v, where))
        _check_monotone(history, proto.resolution)
        return v

    def partial(lo, hi) -> CriticalityEstimate:
        return CriticalityEstimate(
            lattice=lattice,
            dims=desk,
            bracket=(lo, hi),
            rho_at_pc=None,
            protocol=proto,
            p4=p4,
            history=tuple(history),
        )

    # Stage 1: coarse scan, small torus, walking up the grid.
    lo = None
    hi = None
    for p in proto.coarse_grid:
        v = classify(p, scan)
        if v == SUBCRITICAL:
            lo = p
        elif v == SUPERCRITICAL:
            hi = p
            break
    if hi is None:
        raise Undecidable(
            f"{lattice}: no supercritical pressure up to {proto.coarse_grid[-1]}"
            + (f" at p4={p4}" if p4 is not None else ""),
            partial=partial(lo, proto.coarse_grid[-1]),
        )
    if lo is None:
        raise Undecidable(
            f"{lattice}: no subcritical pressure found below {hi} on the coarse grid",
            partial=partial(proto.coarse_grid[0], hi),
        )

    # Stage 2: revalidate both endpoints at desk scale; an endpoint that
    # fails there slides outward along the grid (undecided widens, never
    # guesses).
    grid = sorted(set(proto.coarse_grid))
    while classify(lo, desk) != SUBCRITICAL:
        below = [p for p in grid if p < lo]
        if not below:
            raise Undecidable(
                f"{lattice}: could not confirm a subcritical endpoint at desk scale",
                partial=partial(lo, hi),
            )
        lo = below[-1]
    while classify(hi, desk) != SUPERCRITICAL:
        above = [p for p in grid if p > hi]
        if not above:
            raise Undecidable(
                f"{lattice}: could not confirm a supercritical endpoint at desk scale",
                partial=partial(lo, hi),
            )
        hi = above[0]

    # Stage 3: bisection at desk scale; an undecided midpoint falls back to
    # the quartiles before giving up.
    while hi - lo > proto.resolution:
        progress = False
        for frac in (0.5, 0.25, 0.75):
            p = round(lo + frac * (hi - lo), 6)
            if p <= lo or p >= hi:
                continue
            v = classify(p, desk)
            if v == SUBCRITICAL:
                lo = p
                progress = True
                break
            if v == SUPERCRITICAL:
                hi = p
                progress = True
                break
        if not progress:
            raise Undecidable(
                f"{lattice}: bracket stuck at ({lo}, {hi}) with the cycle budget",
                partial=partial(lo, hi),
            )

    mid = round(0.5 * (lo + hi), 6)
    rho_mid = _measure_rho(lattice, desk, make_pressure, mid, proto)
    return CriticalityEstimate(
        lattice=lattice,
        dims=desk,
        bracket=(lo, hi),
        rho_at_pc=rho_mid,
        protocol=proto,
        p4=p4,
        history=tuple(history),
    )


def bracket_pc(
    lattice: str,
    dims: tuple[int, int] | None = None,
    protocol: Protocol | None = None,
) -> CriticalityEstimate:
    """Bracket the critical pressure to the protocol resolution.

    Always-subcritical lattices get a no-transition report instead: the
    probe pressures must all classify subcritical at desk scale.  Two-slot
    lattices are scanned in p_high at p4 = 0 (use critical_curve for the
    full plane).
    """
    proto = protocol if protocol is not None else Protocol()
    spec = CATALOG[lattice]
    desk = dims if dims is not None else spec.desk_dims

    if spec.pack_type == "R":
        history = []
        for p in NO_TRANSITION_PROBES:
            v = classify_phase(lattice, desk, Pressure(p=p), proto)
            if v.verdict == SUPERCRITICAL:
                raise ProtocolFailure(
                    f"{lattice} is rotation-class yet classified supercritical "
                    f"at p={p} on {desk}; the protocol cannot be trusted"
                )
            history.append((p, v.verdict, desk))
        return CriticalityEstimate(
            lattice=lattice,
            dims=desk,
            bracket=None,
            rho_at_pc=None,
            protocol=proto,
            transition=False,
            history=tuple(history),
        )

    if spec.two_parameter:
        return _bracket_scalar(
            lattice, dims, proto, lambda x: Pressure(p4=0.0, p_high=x), p4=0.0
        )
    return _bracket_scalar(lattice, dims, proto, lambda x: Pressure(p=x))


def critical_curve(
    lattice: str,
    p4_grid: tuple[float, ...],
    protocol: Protocol | None = None,
    dims: tuple[int, int] | None = None,
) -> list[CriticalityEstimate]:
    """Bracket the critical p_high at each p4 of the grid (UJ and Q only)."""
    proto = protocol if protocol is not None else Protocol()
    spec = CATALOG[lattice]
    if not spec.two_parameter:
        raise IllegalInput(f"{lattice} has a single pressure; use bracket_pc")
    for p4 in p4_grid:
        if not 0.0 <= p4 < 1.0:
            raise IllegalInput(f"p4={p4} outside [0, 1)")
    points: list[CriticalityEstimate] = []
    for p4 in p4_grid:
        try:
            points.append(
                _bracket_scalar(
                    lattice, dims, proto, lambda x, q=p4: Pressure(p4=q, p_high=x), p4=p4
                )
            )
        except Undecidable as exc:
            raise Undecidable(
                f"{lattice} curve at p4={p4}: {exc}", partial=points + [exc.partial]
            ) from exc
    return points
