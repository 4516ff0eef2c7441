"""Exact enumeration oracle: frozen counts, method parity, moves, growth."""

from fractions import Fraction

import numpy as np
import pytest

from packlab.configuration import Configuration, density, is_legal, optimal_packing
from packlab.lattices import CATALOG, build_lattice
from packlab.oracle import (
    GROWTH_DIMS,
    TooLarge,
    count_maximizers,
    enumerate_configs,
    find_local_moves,
    find_slides,
    flip_connectivity,
    growth_fit,
)

# Frozen exhaustive counts on the smallest interesting commensurate tori:
# (lattice, dims, legal configurations, max occupancy, maximizer count,
#  max density, translation orbit count). 3^4.6 is absent because its
# smallest torus already has 54 sites, beyond a quick exhaustive sweep.
ENUM_TABLE = [
    ("4^4", (4, 4), 743, 8, 2, "1/2", 1),
    ("6^3", (3, 3), 2598, 9, 2, "1/2", 2),
    ("3^6", (3, 3), 22, 3, 3, "1/3", 1),
    ("4.8^2", (2, 2), 1127, 8, 2, "1/2", 1),
    ("4.6.12", (1, 2), 37398, 12, 2, "1/2", 2),
    ("3^2.4.3.4", (3, 3), 447416, 12, 6, "1/3", 2),
    ("3^3.4^2", (3, 2), 76, 4, 3, "1/3", 1),
    ("3.4.6.4", (2, 2), 13492, 8, 177, "1/3", 54),
    ("3.6.3.6", (3, 3), 35368, 9, 42, "1/3", 12),
    ("3.12^2", (2, 2), 26441, 8, 828, "1/3", 231),
    ("Z2M", (4, 4), 133, 4, 12, "1/4", 3),
    ("UJ", (4, 4), 173270, 16, 1, "1/2", 1),
    ("Q", (3, 3), 15856, 9, 15, "1/3", 7),
]


@pytest.mark.parametrize("name,dims,legal,occ,maxers,dens,orbits", ENUM_TABLE)
def test_enumeration_frozen_counts(name, dims, legal, occ, maxers, dens, orbits):
    g = build_lattice(name, dims)
    r = enumerate_configs(g)
    assert r.legal_count == legal
    assert r.max_occupancy == occ
    assert r.maximizer_count == maxers
    assert r.max_density == Fraction(dens)
    assert r.maximizer_orbit_count == orbits


def test_enumeration_cap_enforced():
    g = build_lattice("4^4", (8, 8))
    with pytest.raises(TooLarge):
        enumerate_configs(g, cap=36)


@pytest.mark.parametrize("name,dims", [("4^4", (4, 4)), ("3.6.3.6", (3, 3)), ("6^3", (3, 3))])
def test_count_maximizers_methods_agree(name, dims):
    g = build_lattice(name, dims)
    branch = count_maximizers(g, method="branch")
    transfer = count_maximizers(g, method="transfer")
    assert branch[:2] == transfer[:2]


def test_maximizer_collection_is_legal_and_dense():
    g = build_lattice("3.6.3.6", (3, 3))
    occ, cnt, masks = count_maximizers(g, collect=True)
    assert cnt == 42 and len(masks) == 42
    for mask in masks:
        bits = np.fromiter(
            ((mask >> i) & 1 for i in range(g.site_count)),
            dtype=np.uint8, count=g.site_count,
        )
        c = Configuration(g, bits)
        assert is_legal(c)
        assert c.occupied == occ


L_SEVEN = ("4^4", "6^3", "3^6", "4.8^2", "4.6.12", "3^2.4.3.4", "3^4.6")


@pytest.mark.parametrize("name", L_SEVEN + ("UJ", "Q"))
def test_laminar_optimal_packings_admit_no_moves(name):
    p1, p2 = CATALOG[name].period
    dims = (p1 * max(2, -(-4 // p1)), p2 * max(2, -(-4 // p2)))
    g = build_lattice(name, dims)
    moves = find_local_moves(optimal_packing(g))
    assert [m for m in moves if m.count] == []
    assert find_slides(optimal_packing(g)).count == 0


# (lattice, dims, movable maximizers out of total, max single-packing moves)
R_MOBILITY = [
    ("3.4.6.4", (2, 2), 168, 177, 6),
    ("3.6.3.6", (3, 3), 21, 42, 6),
    ("3.12^2", (2, 2), 828, 828, 8),
]


@pytest.mark.parametrize("name,dims,movable,total,most", R_MOBILITY)
def test_rotation_maximizers_admit_moves(name, dims, movable, total, most):
    g = build_lattice(name, dims)
    _occ, cnt, masks = count_maximizers(g, collect=True)
    assert cnt == total
    counts = []
    for mask in masks:
        bits = np.fromiter(
            ((mask >> i) & 1 for i in range(g.site_count)),
            dtype=np.uint8, count=g.site_count,
        )
        counts.append(sum(m.count for m in find_local_moves(Configuration(g, bits))))
    assert sum(1 for c in counts if c) == movable
    assert max(counts) == most


def test_kagome_flip_graph_disconnected_on_small_torus():
    # The torus splits the densest packings into winding sectors that single
    # hexagon rotations cannot leave, so the flip graph is not connected.
    assert flip_connectivity(build_lattice("3.6.3.6", (3, 3))) is False


def test_growth_fit_laminar_square():
    fit = growth_fit("4^4")
    assert fit.label == "L"
    assert fit.entropy_kind == "h1"
    assert fit.entropy_value == 0.0
    assert abs(fit.a) < 1e-9 and abs(fit.b) < 1e-9
    assert len(fit.ns) == len(fit.log_counts) == len(GROWTH_DIMS["4^4"])


def test_growth_fit_rotation_kagome():
    fit = growth_fit("3.6.3.6")
    assert fit.label == "R"
    assert fit.entropy_kind == "h2"
    assert fit.a > 0.05  # per-site growth


def test_growth_fit_laminated_z2m():
    fit = growth_fit("Z2M")
    assert fit.label == "RL"
    assert fit.entropy_kind == "h1"
    # perimeter-law coefficient approximates (1/2) log 2 within the ladder
    assert abs(fit.b - 0.5 * np.log(2.0)) < 0.25
