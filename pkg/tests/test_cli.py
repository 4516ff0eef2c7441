"""Command-line front end: artifacts, determinism, config layers, exit codes."""

import json

import pytest

from packlab import cli
from packlab.lattices import NAMES, load_lattice_text


def run_cli(*args):
    return cli.main([str(a) for a in args])


def read(path):
    return path.read_text()


def test_list_lattices_prints_catalog(capsys):
    assert run_cli("list-lattices") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1 + len(NAMES)
    assert lines[0].split()[:2] == ["name", "cell"]
    assert lines[1].startswith("4^4")


def test_list_lattices_dump_round_trips(tmp_out, capsys):
    assert run_cli("list-lattices", "--dump", "3.6.3.6", "--out", tmp_out) == 0
    path = tmp_out / "lattice_3-6-3-6.txt"
    assert path.exists()
    with open(path) as f:
        spec = load_lattice_text(f)
    assert spec.name == "3.6.3.6"


def test_simulate_reruns_are_byte_identical(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    args = ("simulate", "6^3", "--p", "0.7", "--cycles", "40", "--dims", "8x8")
    assert run_cli(*args, "--out", out1) == 0
    assert run_cli(*args, "--out", out2) == 0
    for name in ("trace_6x3.csv", "trace_6x3.json", "density_6x3.csv"):
        assert read(out1 / name) == read(out2 / name)


def test_simulate_trace_layout(tmp_out, capsys):
    assert run_cli(
        "simulate", "4^4", "--p", "0.6", "--cycles", "25", "--dims", "6x6",
        "--init", "class-0", "--save-final", "--out", tmp_out,
    ) == 0
    rows = [
        ln for ln in read(tmp_out / "trace_4x4.csv").splitlines()
        if not ln.startswith("#")
    ]
    assert rows[0] == "cycle,rho_total,rho_class_0,rho_class_1,order_param"
    assert len(rows) == 1 + 25
    first = rows[1].split(",")
    assert first[0] == "0"
    meta = json.loads(read(tmp_out / "trace_4x4.json"))
    assert meta["lattice"] == "4^4"
    assert meta["p"] == 0.6
    assert meta["schedule"] == [0, 1]
    assert meta["config"]["init"] == "class-0"
    assert "threads" not in meta["config"] and "out" not in meta["config"]
    assert (tmp_out / "final_4x4.snap").exists()
    dens = [
        ln for ln in read(tmp_out / "density_4x4.csv").splitlines()
        if not ln.startswith("#")
    ]
    assert dens[0] == "lattice,L1,L2,rho_total,rho_class_0,rho_class_1"
    assert dens[1].split(",")[0] == "4^4"


def test_simulate_threads_flag_changes_nothing(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    base = ("simulate", "3^6", "--p", "0.8", "--cycles", "30", "--dims", "9x9")
    assert run_cli(*base, "--threads", "1", "--out", out1) == 0
    assert run_cli(*base, "--threads", "4", "--out", out2) == 0
    assert read(out1 / "trace_3x6.csv") == read(out2 / "trace_3x6.csv")


def test_config_file_sits_between_defaults_and_flags(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("# sweep piece\ncycles 30\ndims = 8x8\np 0.5\ninit empty\n")
    out = tmp_path / "out"
    assert run_cli(
        "simulate", "4^4", "--config", cfg, "--p", "0.4", "--out", out
    ) == 0
    embedded = json.loads(read(out / "trace_4x4.json"))["config"]
    assert embedded["p"] == 0.4  # flag wins
    assert embedded["cycles"] == 30  # config beats default
    assert embedded["dims"] == [8, 8]
    assert embedded["init"] == "empty"
    assert embedded["version"]


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("cycels 30\n")
    assert run_cli("simulate", "4^4", "--p", "0.5", "--config", cfg) == 2


@pytest.mark.parametrize(
    "args",
    [
        ("simulate", "4^4", "--p", "1.5"),
        ("simulate", "nope", "--p", "0.5"),
        ("simulate", "3^6", "--p", "0.5", "--dims", "4x4"),  # incommensurate
        ("simulate", "4^4"),  # no pressure given
        ("simulate", "4^4", "--p4", "0.2", "--p-high", "0.9"),  # wrong slots
        ("curve", "4^4"),  # single-pressure lattice
        ("voter", "6^3", "--kind", "doublet"),
        ("voter", "4^4", "--mode", "sideways"),  # argparse choice
        ("entropy", "kagome", "--grid", "1"),
        ("enumerate", "4^4", "8", "8"),  # beyond the exhaustion cap
    ],
)
def test_validation_failures_exit_2(args, tmp_out, capsys):
    assert run_cli(*args, "--out", tmp_out) == 2


def test_enumerate_writes_frozen_counts(tmp_out, capsys):
    assert run_cli("enumerate", "4^4", 4, 4, "--out", tmp_out) == 0
    payload = json.loads(read(tmp_out / "enum_4x4_4x4.json"))
    assert payload["legal_count"] == 743
    assert payload["max_density"] == "1/2"
    assert payload["maximizer_count"] == 2
    assert payload["config"]["command"] == "enumerate"


def test_enumerate_maximizer_archive(tmp_out, capsys):
    assert run_cli("enumerate", "Z2M", 4, 4, "--maximizers", "--out", tmp_out) == 0
    with open(tmp_out / "maximizers_z2m_4x4.snap") as f:
        snaps = list(cli.read_snapshot_archive(f))
    assert len(snaps) == 12
    assert all(c.occupied == 4 for c in snaps)


def test_voter_csv_instability_fraction(tmp_out, capsys):
    assert run_cli("voter", "4^4", "--out", tmp_out) == 0
    rows = [
        ln.split(",") for ln in read(tmp_out / "voter_4x4_singleton.csv").splitlines()
        if not ln.startswith("#")
    ]
    assert rows[0] == ["k", "count", "hits", "fraction"]
    assert rows[1][1:] == ["1", "0", "0.0"]
    assert rows[2][1:] == ["9", "1", repr(1 / 9)]
    shape = json.loads(read(tmp_out / "voter_4x4_singleton.json"))["shape"]
    assert shape["monotone"] and shape["corner_zero"]


def test_entropy_artifacts(tmp_out, capsys):
    assert run_cli("entropy", "kagome", "--out", tmp_out) == 0
    kag = json.loads(read(tmp_out / "entropy_kagome.json"))
    assert abs(kag["value_nats"] - 0.32306) < 1e-4
    assert kag["error_estimate"] >= abs(kag["value_nats"] - 0.32306)
    assert kag["kind"] == "h2" and kag["method"] == "quadrature"
    assert run_cli("entropy", "constants", "--out", tmp_out) == 0
    consts = json.loads(read(tmp_out / "entropy_constants.json"))
    assert round(consts["Z2M"]["value_nats"], 6) == 0.346574
    assert round(consts["3.4.6.4"]["value_nats"], 6) == 0.129965
    assert round(consts["3.12^2"]["value_nats"], 6) == 0.038508


def test_bracket_budget_exhaustion_writes_partial_and_exits_3(tmp_out, capsys):
    code = run_cli(
        "bracket", "4^4", "--coarse-grid", "0.2,0.3", "--burn-in", "40",
        "--window", "30", "--max-cycles", "300", "--seeds", "1",
        "--dims", "10x10", "--out", tmp_out,
    )
    assert code == 3
    payload = json.loads(read(tmp_out / "bracket_4x4.json"))
    assert payload["undecidable"]
    assert payload["bracket"] is not None
    assert payload["history"]
    assert payload["protocol"]["max_cycles"] == 300


def test_validate_reports_incommensurate_dims(capsys):
    assert run_cli("validate", "3^6") == 0
    assert run_cli("validate", "3^6", "--dims", "4x4") == 2


def test_growth_artifact(tmp_out, capsys):
    assert run_cli("enumerate", "4^4", 4, 4, "--growth", "--out", tmp_out) == 0
    lines = read(tmp_out / "growth_4x4.csv").splitlines()
    fit_lines = [ln for ln in lines if ln.startswith("# fit ")]
    assert len(fit_lines) == 1 and "label=L" in fit_lines[0]
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == "n,log_count"
    assert len(data) > 3
