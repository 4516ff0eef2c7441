"""Timing comparison of the compiled kernels against the NumPy fallback.

Both backends expose the same two entry points (the class-pass update and
the max-plus matrix product) and must agree bit for bit; this script checks
that on every size it times.

Run from a checkout with the package importable:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 50,100,200 --cycles 30
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from packlab import rng
from packlab.configuration import bernoulli_init
from packlab.engine import Pressure, p_eff_array
from packlab.lattices import build_lattice

try:
    from packlab import _kernels
except ImportError:
    _kernels = None
from packlab import _kernels_py


def _backends():
    out = [("numpy", _kernels_py)]
    if _kernels is not None:
        out.insert(0, ("cython", _kernels))
    return out


def _pass_once(mod, g, bits0, p_eff, seed, cycles):
    """Run `cycles` full cycles through one backend, returning final bits."""
    bits_ext = np.zeros(g.site_count + 1, dtype=np.uint8)
    bits_ext[:-1] = bits0
    class_p = [np.ascontiguousarray(p_eff[s]) for s in g.class_sites]
    for cycle in range(cycles):
        for k in range(g.n_classes):
            mod.class_pass_kernel(
                bits_ext, g.neighbors, g.class_sites[k], class_p[k],
                rng.pass_key(seed, cycle, k),
            )
    return bits_ext[:-1].copy()


def bench_class_pass(lattice: str, size: int, cycles: int, seed: int) -> list[tuple]:
    g = build_lattice(lattice, (size, size))
    p_eff = p_eff_array(g, Pressure(p=0.7))
    bits0 = bernoulli_init(g, 0.3, seed).bits
    rows = []
    reference = None
    for name, mod in _backends():
        t0 = time.perf_counter()
        final = _pass_once(mod, g, bits0, p_eff, seed, cycles)
        dt = time.perf_counter() - t0
        if reference is None:
            reference = final
        elif not np.array_equal(reference, final):
            raise AssertionError(f"{name} disagrees with the first backend")
        site_updates = g.site_count * cycles
        rows.append((f"class_pass {lattice} {size}x{size}", name, dt,
                     site_updates / dt / 1e6, "Msites/s"))
    return rows


def bench_semiring(n: int, seed: int, repeats: int) -> list[tuple]:
    gen = np.random.default_rng(seed)
    ao = gen.integers(0, 4, size=(n, n)).astype(np.int64)
    ac = gen.integers(1, 3, size=(n, n)).astype(np.int64)
    rows = []
    reference = None
    for name, mod in _backends():
        t0 = time.perf_counter()
        for _ in range(repeats):
            co, cc = mod.semiring_matmul(ao, ac, ao, ac)
        dt = time.perf_counter() - t0
        if reference is None:
            reference = (co, cc)
        elif not (np.array_equal(reference[0], co) and np.array_equal(reference[1], cc)):
            raise AssertionError(f"{name} disagrees with the first backend")
        rows.append((f"semiring_matmul {n}x{n}", name, dt,
                     repeats * n**3 / dt / 1e6, "Mops/s"))
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="50,100,200",
                        help="comma-separated torus sizes for the class pass")
    parser.add_argument("--cycles", type=int, default=20)
    parser.add_argument("--matrix-sizes", default="64,128,256", dest="matrix_sizes")
    parser.add_argument("--repeats", type=int, default=3, help="matrix product repeats")
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args(argv)

    names = [n for n, _ in _backends()]
    if len(names) == 1:
        print("compiled extension not importable; timing the fallback only")

    rows = []
    for size in (int(s) for s in args.sizes.split(",") if s):
        rows += bench_class_pass("4^4", size, args.cycles, args.seed)
    for n in (int(s) for s in args.matrix_sizes.split(",") if s):
        rows += bench_semiring(n, args.seed, args.repeats)

    width = max(len(r[0]) for r in rows)
    print(f"{'case'.ljust(width)}  backend  seconds    rate")
    base: dict[str, float] = {}
    for case, name, dt, rate, unit in rows:
        note = ""
        if case not in base:
            base[case] = dt
        elif base[case] > 0:
            note = f"  ({dt / base[case]:.2f}x the {names[0]} time)"
        print(f"{case.ljust(width)}  {name:7s}  {dt:8.4f}  {rate:8.2f} {unit}{note}")
    print("backends agree bit for bit on every case")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
