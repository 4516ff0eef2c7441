"""Catalog structure, torus construction, validation, text round-trips."""

import io

import pytest

from packlab.lattices import (
    CATALOG,
    NAMES,
    IncommensurateDims,
    UnknownLattice,
    build_lattice,
    dump_lattice_text,
    load_lattice_text,
    second_neighbor_shell,
    validate,
)

# (name, degree profile as a set, classes, pack type, table density)
CATALOG_FACTS = [
    ("4^4", {4}, 2, "L", "1/2"),
    ("6^3", {3}, 2, "L", "1/2"),
    ("3^6", {6}, 3, "L", "1/3"),
    ("4.8^2", {3}, 2, "L", "1/2"),
    ("4.6.12", {3}, 2, "L", "1/2"),
    ("3^2.4.3.4", {5}, 3, "L", "1/3"),
    ("3^4.6", {5}, 3, "L", "1/3"),
    ("3^3.4^2", {5}, 3, "RL", "1/3"),
    ("3.4.6.4", {4}, 3, "R", "1/3"),
    ("3.6.3.6", {4}, 3, "R", "1/3"),
    ("3.12^2", {3}, 3, "R", "1/3"),
    ("Z2M", {8}, 4, "RL", "1/4"),
    ("UJ", {8, 4}, 3, "L", "1/2"),
    ("Q", {6, 4}, 3, "L", "1/3"),
]


def _small_dims(spec, factor=2):
    p1, p2 = spec.period
    return (p1 * max(factor, -(-4 // p1)), p2 * max(factor, -(-4 // p2)))


def test_catalog_is_complete():
    assert len(NAMES) == 14
    assert [row[0] for row in CATALOG_FACTS] == list(NAMES)


@pytest.mark.parametrize("name,degrees,classes,pack,density", CATALOG_FACTS)
def test_catalog_row(name, degrees, classes, pack, density):
    spec = CATALOG[name]
    assert set(spec.degree_profile) == degrees
    assert spec.n_classes == classes
    assert spec.pack_type == pack
    assert str(spec.table_density) == density
    assert spec.two_parameter == (name in ("UJ", "Q"))


@pytest.mark.parametrize("name", NAMES)
def test_validate_passes(name):
    report = validate(CATALOG[name])
    assert report.passed, str(report)


@pytest.mark.parametrize("name", NAMES)
def test_torus_shape_and_class_independence(name):
    spec = CATALOG[name]
    dims = _small_dims(spec)
    g = build_lattice(name, dims)
    assert g.site_count == dims[0] * dims[1] * spec.sites_per_cell
    assert len(g.class_sites) == spec.n_classes
    covered = sorted(x for sites in g.class_sites for x in sites)
    assert covered == list(range(g.site_count))
    # no edge joins two sites of one update class
    klass = {}
    for k, sites in enumerate(g.class_sites):
        for x in sites:
            klass[int(x)] = k
    for a, b in zip(g.edges_a, g.edges_b):
        assert klass[int(a)] != klass[int(b)]


@pytest.mark.parametrize("name", NAMES)
def test_degree_regular_per_site(name):
    spec = CATALOG[name]
    g = build_lattice(name, _small_dims(spec))
    for x in range(0, g.site_count, max(1, g.site_count // 16)):
        expected = spec.degree_profile[x % spec.sites_per_cell]
        assert len(g.neighbor_list(x)) == expected


def test_incommensurate_dims_rejected():
    with pytest.raises(IncommensurateDims):
        build_lattice("3^6", (4, 4))
    with pytest.raises(IncommensurateDims):
        build_lattice("4.8^2", (3, 3))


def test_unknown_lattice_rejected():
    with pytest.raises(UnknownLattice):
        build_lattice("5^4", (4, 4))


@pytest.mark.parametrize("name", NAMES)
def test_lattice_text_round_trip(name):
    sink = io.StringIO()
    dump_lattice_text(CATALOG[name], sink)
    text = sink.getvalue()
    loaded = load_lattice_text(io.StringIO(text))
    sink2 = io.StringIO()
    dump_lattice_text(loaded, sink2)
    assert sink2.getvalue() == text
    assert validate(loaded).passed


def test_second_neighbor_shell_square():
    g = build_lattice("4^4", (6, 6))
    shell = second_neighbor_shell(g, 0)
    assert len(shell) == 8  # 4 diagonal + 4 two-step axial
    assert 0 not in shell
    assert not shell & set(g.neighbor_list(0))
