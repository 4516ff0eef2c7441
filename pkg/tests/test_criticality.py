"""Phase classification: order parameters, window rules, verdict determinism."""

from fractions import Fraction

import numpy as np
import pytest

from packlab.configuration import DensityReport, IllegalInput
from packlab.criticality import (
    Protocol,
    ProtocolFailure,
    Undecidable,
    _bernoulli_settled,
    _check_monotone,
    _grew,
    _last_three_means,
    _ordered_settled,
    _resolve_rho0,
    classify_phase,
    critical_curve,
    order_parameter,
    order_series,
)
from packlab.engine import Pressure

TINY = Protocol(burn_in=60, window=40, max_cycles=600, seeds=(1, 2, 3))


def _report(*vals):
    fracs = tuple(Fraction(v).limit_denominator(10**6) for v in vals)
    return DensityReport(sum(fracs) / len(fracs), fracs)


def test_order_parameter_contrast():
    assert order_parameter(_report(Fraction(1, 2), 0)) == 0.5
    assert order_parameter(_report(0.2, 0.2, 0.2)) == 0.0
    assert order_parameter(_report(0.1, 0.4, 0.2), classes=(0, 2)) == pytest.approx(0.1)


def test_order_parameter_moore_pairings():
    # sublattice pairs: rows (0,1) vs (2,3) split wide, columns balance out
    assert order_parameter(_report(0.4, 0.4, 0.1, 0.1), lattice="Z2M") == pytest.approx(0.6)
    assert order_parameter(_report(0.25, 0.25, 0.25, 0.25), lattice="Z2M") == 0.0
    # one dominant sublattice: best matching pairs it with its row partner
    assert order_parameter(_report(0.7, 0.1, 0.1, 0.1), lattice="Z2M") == pytest.approx(0.6)


def test_order_series_shapes_and_special_cases():
    rho = np.array([[0.5, 0.1, 0.3], [0.2, 0.2, 0.2]])
    np.testing.assert_allclose(order_series("3^6", rho), [0.4, 0.0])
    uj = np.array([[0.9, 0.1, 0.5], [0.3, 0.3, 0.0]])
    np.testing.assert_allclose(order_series("UJ", uj), [0.8, 0.0])  # corner contrast
    z2m = np.array([[0.4, 0.4, 0.1, 0.1]])
    np.testing.assert_allclose(order_series("Z2M", z2m), [0.6])


def test_window_means_average_before_contrast():
    # per-cycle contrast of alternating noise never drops, the window mean does
    a = np.tile(np.array([[0.3, 0.2], [0.2, 0.3]]), (15, 1))
    m = _last_three_means("4^4", a, window=10)
    assert m == pytest.approx((0.0, 0.0, 0.0))
    series = order_series("4^4", a)
    assert series.min() == pytest.approx(0.1)  # raw contrast stays at the noise floor


def test_window_means_track_melting():
    ramp = np.linspace(0.9, 0.0, 90)
    rho = np.stack([ramp, np.zeros(90)], axis=1)
    m1, m2, m3 = _last_three_means("4^4", rho, window=30)
    assert m1 > m2 > m3
    with pytest.raises(IllegalInput):
        _last_three_means("4^4", rho[:2], window=30)


def test_settling_rules():
    proto = Protocol()
    assert _ordered_settled((0.5, 0.3, 0.01), proto)  # melted
    assert _ordered_settled((0.9, 0.92, 0.91), proto)  # pinned high, holding
    assert not _ordered_settled((0.5, 0.43, 0.31), proto)  # still decaying
    assert _grew((0.3, 0.33, 0.31), proto)  # wobble within delta/2
    assert not _grew((0.5, 0.43, 0.31), proto)
    assert _bernoulli_settled((0.25, 0.3, 0.33), proto)  # split wide open
    assert _bernoulli_settled((0.02, 0.015, 0.012), proto)  # flat dead
    assert not _bernoulli_settled((0.08, 0.1, 0.12), proto)  # in between


def test_rho0_defaults_to_catalog_transition_density():
    assert _resolve_rho0("4^4", Protocol()) == pytest.approx(0.36)
    assert _resolve_rho0("3.6.3.6", Protocol()) == pytest.approx(0.3)  # no table value
    assert _resolve_rho0("4^4", Protocol(rho0=0.2)) == pytest.approx(0.2)


def test_classify_deep_subcritical():
    v = classify_phase("4^4", (12, 12), Pressure(p=0.3), TINY)
    assert v.verdict == "subcritical"
    assert set(v.order_series) == {
        f"{kind}-seed{s}" for kind in ("ordered0", "bernoulli") for s in (1, 2, 3)
    }
    for label, means in v.window_means.items():
        if label.startswith("ordered"):
            assert means[2] < TINY.eps
    for rho in v.rho_window.values():
        assert 0.0 <= rho <= 1.0


def test_classify_deep_supercritical():
    v = classify_phase("4^4", (12, 12), Pressure(p=0.97), TINY)
    assert v.verdict == "supercritical"
    for label, means in v.window_means.items():
        if label.startswith("bernoulli"):
            assert means[2] > TINY.delta


def test_classify_is_deterministic():
    a = classify_phase("6^3", (8, 8), Pressure(p=0.7), TINY)
    b = classify_phase("6^3", (8, 8), Pressure(p=0.7), TINY)
    assert a.verdict == b.verdict
    assert a.window_means == b.window_means
    for label in a.order_series:
        assert np.array_equal(a.order_series[label], b.order_series[label])


def test_protocol_dict_excludes_threads():
    d = Protocol(threads=8).as_dict()
    assert "threads" not in d
    assert d["burn_in"] == 1000 and d["window"] == 500
    assert Protocol(threads=8).as_dict() == Protocol(threads=1).as_dict()


def test_monotone_check_scoped_per_dims():
    res = 0.01
    # sub above super at one size is a protocol failure
    with pytest.raises(ProtocolFailure):
        _check_monotone(
            [(0.8, "supercritical", (10, 10)), (0.9, "subcritical", (10, 10))], res
        )
    # the same pair at different sizes is a legitimate size effect
    _check_monotone(
        [(0.8, "supercritical", (10, 10)), (0.9, "subcritical", (20, 20))], res
    )
    # inversions inside the resolution are tolerated
    _check_monotone(
        [(0.800, "supercritical", (10, 10)), (0.805, "subcritical", (10, 10))], res
    )


def test_critical_curve_input_validation():
    with pytest.raises(IllegalInput):
        critical_curve("4^4", (0.0, 0.2))  # single-pressure lattice
    with pytest.raises(IllegalInput):
        critical_curve("UJ", (0.0, 1.0))  # p4 = 1 freezes the centers


def test_undecidable_carries_partial():
    exc = Undecidable("budget gone", partial=("lo", "hi"))
    assert exc.partial == ("lo", "hi")
