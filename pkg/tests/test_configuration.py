"""Configurations: legality, exact densities, symmetric packings, snapshots."""

import io
from fractions import Fraction

import numpy as np
import pytest

from packlab.configuration import (
    Configuration,
    IllegalInput,
    PhaseOutOfRange,
    bernoulli_init,
    density,
    empty,
    is_legal,
    one_class_full,
    optimal_packing,
    snapshot_read,
    snapshot_write,
)
from packlab.engine import Pressure, run
from packlab.lattices import CATALOG, NAMES, build_lattice


def _dims(name, factor=2):
    p1, p2 = CATALOG[name].period
    return (p1 * max(factor, -(-4 // p1)), p2 * max(factor, -(-4 // p2)))


def test_empty_is_legal_and_zero_density():
    g = build_lattice("4^4", (6, 6))
    c = empty(g)
    assert is_legal(c)
    rep = density(c)
    assert rep.rho_total == 0
    assert all(f == 0 for f in rep.rho_by_class)


@pytest.mark.parametrize("name", NAMES)
def test_optimal_packing_hits_table_density(name):
    g = build_lattice(name, _dims(name))
    spec = CATALOG[name]
    for phase in range(len(spec.phases)):
        c = optimal_packing(g, phase)
        assert is_legal(c)
        assert density(c).rho_total == spec.table_density


def test_phase_out_of_range():
    g = build_lattice("4^4", (6, 6))
    with pytest.raises(PhaseOutOfRange):
        optimal_packing(g, 99)
    with pytest.raises(PhaseOutOfRange):
        one_class_full(g, 5)


@pytest.mark.parametrize("name", NAMES)
def test_one_class_full_is_legal(name):
    g = build_lattice(name, _dims(name))
    for k in range(g.n_classes):
        c = one_class_full(g, k)
        assert is_legal(c)
        rep = density(c)
        assert rep.rho_by_class[k] == 1
        assert sum(rep.rho_by_class) == 1


def test_density_is_exact_rational():
    g = build_lattice("6^3", (4, 4))
    c = empty(g)
    c.bits[list(g.class_sites[0][:5])] = 1
    rep = density(c)
    assert rep.rho_total == Fraction(5, g.site_count)
    assert rep.rho_total_float == 5 / g.site_count


def test_bernoulli_init_deterministic_and_validated():
    g = build_lattice("4^4", (10, 10))
    a = bernoulli_init(g, 0.3, 7)
    b = bernoulli_init(g, 0.3, 7)
    assert np.array_equal(a.bits, b.bits)
    assert not np.array_equal(a.bits, bernoulli_init(g, 0.3, 8).bits)
    with pytest.raises(IllegalInput):
        bernoulli_init(g, 1.5, 1)
    assert bernoulli_init(g, 0.0, 1).occupied == 0
    assert bernoulli_init(g, 1.0, 1).occupied == g.site_count


def test_illegal_bernoulli_start_restored_in_one_cycle():
    g = build_lattice("4^4", (10, 10))
    c0 = bernoulli_init(g, 0.9, 3)
    assert not is_legal(c0)  # dense product start collides at rho0 = 0.9
    trace = run(g, c0, Pressure(p=0.5), 1, seed=1)
    assert is_legal(trace.final)


def test_bits_length_checked():
    g = build_lattice("4^4", (4, 4))
    with pytest.raises(IllegalInput):
        Configuration(g, np.zeros(7, dtype=np.uint8))


@pytest.mark.parametrize("name", ("4^4", "3.6.3.6", "UJ"))
def test_snapshot_round_trip(name):
    g = build_lattice(name, _dims(name))
    trace = run(g, empty(g), Pressure(p=0.6), 5, seed=11)
    sink = io.StringIO()
    snapshot_write(trace.final, sink)
    back = snapshot_read(io.StringIO(sink.getvalue()))
    assert back.graph.spec.name == name
    assert back.graph.dims == g.dims
    assert np.array_equal(back.bits, trace.final.bits)


def test_snapshot_rejects_garbage():
    with pytest.raises(IllegalInput):
        snapshot_read(io.StringIO("not a snapshot\n"))
    with pytest.raises(IllegalInput):
        snapshot_read(io.StringIO("config 4^4 4 4\n1x7\nend\n"))  # short cover
    with pytest.raises(IllegalInput):
        snapshot_read(io.StringIO("config 4^4 4 4\n1x99\nend\n"))  # overrun
