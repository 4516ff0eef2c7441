"""Density bounds, voter curves, residual entropies, two-pressure bound."""

import math
from fractions import Fraction

import pytest

from packlab.bounds import (
    NonUniformDegree,
    UnsupportedLattice,
    bound_tightness,
    composite_update_bound,
    composite_update_frequency,
    curve_shape,
    doublet_voter_curve,
    entropy_constants,
    kagome_entropy,
    kagome_entropy_reduced,
    kissing_stats,
    sublattice_restriction_curve,
    voter_curve,
)
from packlab.configuration import IllegalInput
from packlab.lattices import CATALOG, build_lattice

# Frozen second-shell statistics: (lattice, tightness-check dims, degree,
# mean shell occupancy n, density bound rho_bar, bound attained exactly).
KISSING_TABLE = [
    ("4^4", (4, 4), 4, "3", "1/2", True),
    ("6^3", (3, 3), 3, "2", "1/2", True),
    ("3^6", (3, 3), 6, "2", "1/3", True),
    ("4.8^2", (2, 2), 3, "2", "1/2", True),
    ("4.6.12", (1, 2), 3, "2", "1/2", True),
    ("3^2.4.3.4", (3, 3), 5, "8/5", "13/38", False),
    ("3^4.6", (3, 3), 5, "8/5", "13/38", False),
    ("3^3.4^2", (3, 2), 5, "9/5", "14/39", False),
    ("3.4.6.4", (2, 2), 4, "7/4", "11/27", False),
    ("3.6.3.6", (3, 3), 4, "1", "1/3", True),
    ("3.12^2", (2, 2), 3, "1", "2/5", False),
    ("Z2M", (4, 4), 8, "2", "3/11", False),
]


def _wide_dims(name):
    p1, p2 = CATALOG[name].period
    return (p1 * max(5, -(-5 // p1)), p2 * max(5, -(-5 // p2)))


@pytest.mark.parametrize("name,tdims,d,n,rho_bar,tight", KISSING_TABLE)
def test_kissing_stats_frozen(name, tdims, d, n, rho_bar, tight):
    stats = kissing_stats(build_lattice(name, _wide_dims(name)))
    assert stats.d == d
    assert stats.n == Fraction(n)
    assert stats.rho_bar == Fraction(rho_bar)
    assert bound_tightness(build_lattice(name, tdims)) is tight


def test_kissing_stats_needs_uniform_degree():
    for name in ("UJ", "Q"):
        with pytest.raises(NonUniformDegree):
            kissing_stats(build_lattice(name, (6, 6)))


# Frozen exhaustive update curves: support size, legal pattern counts and
# occupied-update hits per occupancy level k.
VOTER_TABLE = {
    "4^4": (9, (1, 9, 36, 84, 126, 126, 84, 36, 9, 1),
            (0, 1, 10, 48, 106, 122, 84, 36, 9, 1)),
    "6^3": (7, (1, 7, 21, 35, 35, 21, 7, 1), (0, 1, 6, 23, 32, 21, 7, 1)),
    "3^6": (7, (1, 7, 21, 35, 35, 21, 7, 1), (0, 1, 6, 23, 32, 21, 7, 1)),
}


@pytest.mark.parametrize("name", sorted(VOTER_TABLE))
def test_voter_curve_exhaustive_frozen(name):
    support, counts, hits = VOTER_TABLE[name]
    curve = voter_curve(name)
    assert curve.support_size == support
    assert curve.counts == counts
    assert curve.hits == hits
    assert curve.fraction[1] == 1 / support  # single off-center 1 blocks


def test_voter_curve_center_instability_pair():
    # center-occupied pattern updates to occupied; all 8 off-center single-1
    # patterns update to empty, hence fraction(1) = 1/9 exactly
    curve = voter_curve("4^4")
    assert curve.fraction[0] == 0.0
    assert curve.fraction[1] == float(Fraction(1, 9))
    assert curve.fraction[curve.support_size] == 1.0


def test_voter_curve_rejects_unknown():
    with pytest.raises(UnsupportedLattice):
        voter_curve("3.6.3.6")
    with pytest.raises(IllegalInput):
        voter_curve("4^4", mode="guess")


def test_doublet_curve_frozen():
    curve = doublet_voter_curve()
    assert curve.support_size == 9
    assert curve.counts == (1, 18, 138, 588, 1524, 2472, 2488, 1488, 480, 64)
    assert curve.hits == (0, 2, 39, 252, 853, 1694, 1993, 1336, 464, 64)
    shape = curve_shape(curve)
    assert shape["monotone"] and shape["corner_zero"] and shape["corner_one"]


def test_restriction_curve_frozen():
    curve = sublattice_restriction_curve()
    assert curve.support_size == 9
    assert curve.counts == (1, 9, 36, 84, 126, 126, 84, 36, 9, 1)
    assert curve.hits == (0, 1, 9, 34, 69, 84, 66, 32, 9, 1)
    # the restriction tracks the diagonal much more closely than the true
    # square-lattice curve: it hides the Moore coupling between sublattices
    gap_restriction = curve_shape(curve)["diagonal_gap"]
    gap_square = curve_shape(voter_curve("4^4"))["diagonal_gap"]
    assert gap_restriction < 0.15 < 0.35 < gap_square


def test_empirical_mode_deterministic_and_sane():
    # the in-run tallies condition on whatever occurs during the run (other
    # sites need not be empty), so the values differ from the exhaustive
    # isolated-pattern curve; assert structure, not agreement
    a = voter_curve("6^3", mode="empirical", cycles=120, seed=3)
    b = voter_curve("6^3", mode="empirical", cycles=120, seed=3)
    assert a.counts == b.counts and a.hits == b.hits
    assert a.mode == "empirical"
    assert a.support_size == voter_curve("6^3").support_size
    assert sum(a.counts) > 0
    for k, n in enumerate(a.counts):
        if n:
            assert 0.0 <= a.fraction[k] <= 1.0
        else:
            assert a.fraction[k] != a.fraction[k]  # nan marks unseen levels


def test_kagome_entropy_quadrature():
    est = kagome_entropy()
    assert est.kind == "h2"
    assert abs(est.value_nats - 0.32306) < 1e-4
    assert est.error_estimate >= abs(est.value_nats - 0.32306)
    # halving the step shrinks the estimated error and moves the value less
    finer = kagome_entropy(grid=240)
    assert finer.error_estimate < est.error_estimate
    assert abs(finer.value_nats - est.value_nats) <= est.error_estimate


def test_kagome_entropy_matches_reduced_form():
    est = kagome_entropy()
    assert abs(est.value_nats - kagome_entropy_reduced()) < 1e-6


def test_entropy_constants_closed_forms():
    consts = entropy_constants()
    assert round(consts["3^3.4^2"].value_nats, 6) == round(0.5 * math.log(2), 6)
    assert round(consts["Z2M"].value_nats, 6) == round(0.5 * math.log(2), 6)
    assert round(consts["3.4.6.4"].value_nats, 6) == round(3 / 16 * math.log(2), 6)
    assert round(consts["3.12^2"].value_nats, 6) == round(1 / 18 * math.log(2), 6)
    assert consts["3^3.4^2"].kind == "h1"
    assert consts["3.4.6.4"].kind == "h2"
    assert consts["3.4.6.4"].lower_bound and consts["3.12^2"].lower_bound
    assert all(c.error_estimate == 0.0 for c in consts.values())


def test_composite_bound_formula():
    assert composite_update_bound("UJ", 0.0, 0.8) == 0.8
    assert composite_update_bound("Q", 0.0, 0.8) == 0.8
    assert composite_update_bound("UJ", 0.5, 0.8) == 0.8 * 0.5**4
    assert composite_update_bound("Q", 0.5, 0.8) == 0.8 * 0.5**2
    with pytest.raises(UnsupportedLattice):
        composite_update_bound("4^4", 0.1, 0.8)
    with pytest.raises(IllegalInput):
        composite_update_bound("UJ", -0.1, 0.8)


@pytest.mark.parametrize("name,p4", [("UJ", 0.0), ("UJ", 0.3), ("Q", 0.0), ("Q", 0.3)])
def test_composite_frequency_respects_bound(name, p4):
    check = composite_update_frequency(name, p4, 0.8, cycles=300, seed=2)
    assert check.events > 5000
    sigma = (check.bound * (1 - check.bound) / check.events) ** 0.5
    assert check.frequency >= check.bound - 3 * sigma
