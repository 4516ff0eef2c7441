"""Batch command-line front end for the packing laboratory.

Settings resolve in three layers: built-in defaults, then entries from a
--config file, then explicit flags.  Every output artifact embeds the
settings that produced it (minus plumbing like --threads, which never
changes results), carries no timestamps, and rerunning a command with the
same inputs reproduces the same bytes.

Exit codes: 0 success, 2 invalid input, 3 cycle budget exhausted before a
verdict (the partial result is still written).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Iterator, TextIO

import numpy as np

from . import __version__
from .bounds import (
    EntropyEstimate,
    NonUniformDegree,
    UnsupportedLattice,
    curve_shape,
    doublet_voter_curve,
    entropy_constants,
    kagome_entropy,
    sublattice_restriction_curve,
    voter_curve,
)
from .configuration import (
    Configuration,
    IllegalInput,
    PhaseOutOfRange,
    bernoulli_init,
    density,
    empty,
    one_class_full,
    snapshot_read,
    snapshot_write,
)
from .criticality import (
    Protocol,
    ProtocolFailure,
    Undecidable,
    bracket_pc,
    critical_curve,
    order_series,
)
from .engine import Pressure, run
from .lattices import (
    CATALOG,
    NAMES,
    BadLattice,
    IncommensurateDims,
    UnknownLattice,
    build_lattice,
    dump_lattice_text,
    load_lattice_text,
    validate,
)
from .oracle import (
    TooLarge,
    count_maximizers,
    enumerate_configs,
    growth_fit,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_UNDECIDED = 3

# Settings that steer execution but not results; kept out of embedded configs.
_PLUMBING = ("out", "config", "threads")


# --- flag and config value parsing -----------------------------------------


def _parse_dims(text: str) -> tuple[int, int]:
    parts = [t for t in text.lower().replace("x", ",").split(",") if t]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected L1xL2, got {text!r}")
    try:
        return (int(parts[0]), int(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer sizes, got {text!r}")


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


# Converters for values coming from a --config file. Flags reuse the same
# callables, so both layers accept the same spellings.
_TYPES = {
    "seed": int,
    "threads": int,
    "cycles": int,
    "grid": int,
    "cap": int,
    "burn_in": int,
    "window": int,
    "max_cycles": int,
    "l1": int,
    "l2": int,
    "p": float,
    "p4": float,
    "p_high": float,
    "rho0": float,
    "eps": float,
    "delta": float,
    "resolution": float,
    "dims": _parse_dims,
    "p4_grid": _parse_floats,
    "coarse_grid": _parse_floats,
    "seeds": _parse_ints,
    "out": str,
    "lattice": str,
    "mode": str,
    "kind": str,
    "init": str,
    "dump": str,
    "what": str,
    "growth": _parse_bool,
    "maximizers": _parse_bool,
    "save_final": _parse_bool,
}

_COMMON_DEFAULTS = {"seed": 1, "out": ".", "config": None, "threads": 1}

_PROTOCOL_DEFAULTS = {
    "dims": None,
    "burn_in": 1000,
    "window": 500,
    "eps": 0.02,
    "delta": 0.10,
    "seeds": (1, 2, 3),
    "max_cycles": 10000,
    "resolution": 0.01,
    "rho0": None,
    "coarse_grid": None,
}

_DEFAULTS: dict[str, dict] = {
    "list-lattices": {"dump": None},
    "simulate": {
        "dims": None,
        "p": None,
        "p4": None,
        "p_high": None,
        "cycles": 2000,
        "init": "bernoulli",
        "rho0": None,
        "save_final": False,
    },
    "bracket": dict(_PROTOCOL_DEFAULTS),
    "curve": dict(_PROTOCOL_DEFAULTS, p4_grid=(0.0, 0.2, 0.4, 0.6)),
    "enumerate": {"cap": 36, "growth": False, "maximizers": False},
    "voter": {"kind": "singleton", "mode": "exhaustive", "cycles": 300, "dims": None},
    "entropy": {"grid": 120},
    "validate": {"lattice": None, "dims": None},
}


def _read_config(path: str) -> dict[str, str]:
    """Parse a `key value` / `key = value` settings file; # starts a comment."""
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IllegalInput(f"cannot read config file {path}: {exc}")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, value = line.partition("=")
        else:
            key, _, value = line.partition(" ")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if not key or not value:
            raise IllegalInput(f"{path}:{lineno}: expected 'key value', got {raw!r}")
        if key not in _TYPES:
            raise IllegalInput(f"{path}:{lineno}: unknown setting {key!r}")
        entries[key] = value
    return entries


def _resolve(cmd: str, ns: argparse.Namespace) -> dict:
    """Merge defaults, config-file entries and explicit flags (flags win).

    Config keys that belong to other commands are skipped, so one file can
    drive a whole sweep of different commands.
    """
    explicit = {k: v for k, v in vars(ns).items() if k != "command"}
    settings = dict(_COMMON_DEFAULTS)
    settings.update(_DEFAULTS[cmd])
    path = explicit.get("config")
    if path:
        for key, raw in _read_config(path).items():
            if key not in settings:
                continue
            try:
                settings[key] = _TYPES[key](raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise IllegalInput(f"config key {key!r}: {exc}")
    settings.update(explicit)
    return settings


# --- deterministic serialization --------------------------------------------


def _jsonable(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        v = float(v)
    if isinstance(v, float):
        return None if math.isnan(v) else v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    return v


def _embedded(cmd: str, settings: dict) -> dict:
    """The config block written into every artifact: resolved settings minus
    plumbing, plus the command and artifact version. Unset optional keys are
    dropped (absence means the documented default was in effect)."""
    out = {
        k: v
        for k, v in settings.items()
        if k not in _PLUMBING and v is not None and v is not False
    }
    out["command"] = cmd
    out["version"] = __version__
    return _jsonable(out)


def _json_text(payload: dict) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(embed: dict, header: list[str], rows: list) -> str:
    lines = [f"# {k} = {json.dumps(embed[k])}" for k in sorted(embed)]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _slug(name: str) -> str:
    return name.replace("^", "x").replace(".", "-").lower()


def _outdir(settings: dict) -> Path:
    out = Path(settings["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text)
    print(f"wrote {path}")


# --- shared pieces -----------------------------------------------------------


def _spec(name: str):
    if name not in CATALOG:
        raise UnknownLattice(f"unknown lattice {name!r}; known: {', '.join(NAMES)}")
    return CATALOG[name]


def _pressure(settings: dict) -> Pressure:
    return Pressure(
        p=settings.get("p"), p4=settings.get("p4"), p_high=settings.get("p_high")
    )


def _protocol(settings: dict) -> Protocol:
    for key, least in (("burn_in", 0), ("window", 3), ("max_cycles", 9)):
        if settings[key] < least:
            raise IllegalInput(f"{key} must be at least {least}, got {settings[key]}")
    for key in ("eps", "delta", "resolution"):
        if not 0.0 < settings[key] < 1.0:
            raise IllegalInput(f"{key} must lie in (0, 1), got {settings[key]}")
    if not settings["seeds"]:
        raise IllegalInput("need at least one seed")
    kwargs = dict(
        burn_in=settings["burn_in"],
        window=settings["window"],
        eps=settings["eps"],
        delta=settings["delta"],
        seeds=tuple(settings["seeds"]),
        max_cycles=settings["max_cycles"],
        resolution=settings["resolution"],
        rho0=settings["rho0"],
        threads=settings["threads"],
    )
    if settings["coarse_grid"] is not None:
        kwargs["coarse_grid"] = tuple(settings["coarse_grid"])
    return Protocol(**kwargs)


def _estimate_payload(est) -> dict:
    bracket = None
    midpoint = None
    if est.bracket is not None:
        lo, hi = est.bracket
        bracket = [lo, hi]
        if lo is not None and hi is not None:
            midpoint = 0.5 * (lo + hi)
    return {
        "lattice": est.lattice,
        "dims": list(est.dims),
        "transition": est.transition,
        "p4": est.p4,
        "bracket": bracket,
        "midpoint": midpoint,
        "rho_at_pc": est.rho_at_pc,
        "history": [[p, verdict, list(d)] for p, verdict, d in est.history],
        "protocol": est.protocol.as_dict(),
    }


def read_snapshot_archive(source: TextIO) -> Iterator:
    """Yield configurations from a maximizer archive (comment lines, then
    back-to-back snapshots)."""
    buffered = io.StringIO(
        "".join(ln for ln in source if not ln.lstrip().startswith("#"))
    )
    while True:
        head = buffered.tell()
        if not buffered.readline().strip():
            return
        buffered.seek(head)
        yield snapshot_read(buffered)


# --- commands ----------------------------------------------------------------


def _cmd_list_lattices(settings: dict) -> int:
    header = ("name", "cell", "degree", "classes", "pack", "density", "p_c")
    rows = []
    for name in NAMES:
        spec = CATALOG[name]
        degree = "/".join(str(d) for d in sorted(set(spec.degree_profile), reverse=True))
        pc = f"{spec.table_pc:.2f}" if spec.table_pc is not None else "-"
        rows.append(
            (
                name,
                str(spec.sites_per_cell),
                degree,
                str(spec.n_classes),
                spec.pack_type,
                str(spec.table_density),
                pc,
            )
        )
    widths = [max(len(r[i]) for r in (header, *rows)) for i in range(len(header))]
    for row in (header, *rows):
        print("  ".join(col.ljust(w) for col, w in zip(row, widths)).rstrip())

    if settings["dump"]:
        spec = _spec(settings["dump"])
        sink = io.StringIO()
        dump_lattice_text(spec, sink)
        _write(_outdir(settings) / f"lattice_{_slug(spec.name)}.txt", sink.getvalue())
    return EXIT_OK


def _initial_state(g, settings: dict):
    init = settings["init"]
    if init == "empty":
        return empty(g)
    if init == "bernoulli":
        rho0 = settings["rho0"]
        if rho0 is None:
            table = g.spec.table_rho_pc
            rho0 = table if table is not None else 0.3
        return bernoulli_init(g, rho0, settings["seed"])
    if init.startswith("class-"):
        try:
            k = int(init[len("class-") :])
        except ValueError:
            raise IllegalInput(f"bad init {init!r}; use empty, bernoulli or class-K")
        return one_class_full(g, k)
    raise IllegalInput(f"bad init {init!r}; use empty, bernoulli or class-K")


def _cmd_simulate(settings: dict) -> int:
    name = settings["lattice"]
    spec = _spec(name)
    dims = settings["dims"] if settings["dims"] is not None else spec.desk_dims
    settings["dims"] = tuple(dims)
    g = build_lattice(name, dims)
    pr = _pressure(settings)
    pr.slot_values(spec.two_parameter)  # fail fast on a slot mismatch
    c0 = _initial_state(g, settings)

    trace = run(g, c0, pr, settings["cycles"], settings["seed"], threads=settings["threads"])
    order = order_series(name, trace.rho_class_series)
    embed = _embedded("simulate", settings)
    out = _outdir(settings)
    slug = _slug(name)

    header = ["cycle", "rho_total"]
    header += [f"rho_class_{k}" for k in range(g.n_classes)]
    header += ["order_param"]
    rows = [
        [t, trace.rho_series[t], *trace.rho_class_series[t], order[t]]
        for t in range(trace.steps)
    ]
    _write(out / f"trace_{slug}.csv", _csv_text(embed, header, rows))

    final = density(trace.final)
    meta = {
        "lattice": name,
        "dims": list(dims),
        "seed": settings["seed"],
        "cycles": settings["cycles"],
        "schedule": list(trace.schedule),
        "final_density": {
            "rho_total": str(final.rho_total),
            "rho_by_class": [str(f) for f in final.rho_by_class],
        },
        "config": embed,
    }
    for key in ("p", "p4", "p_high"):
        if settings.get(key) is not None:
            meta[key] = settings[key]
    _write(out / f"trace_{slug}.json", _json_text(meta))

    dens_header = ["lattice", "L1", "L2", "rho_total"]
    dens_header += [f"rho_class_{k}" for k in range(g.n_classes)]
    dens_row = [name, dims[0], dims[1], str(final.rho_total)]
    dens_row += [str(f) for f in final.rho_by_class]
    _write(out / f"density_{slug}.csv", _csv_text(embed, dens_header, [dens_row]))

    if settings["save_final"]:
        sink = io.StringIO()
        snapshot_write(trace.final, sink)
        _write(out / f"final_{slug}.snap", sink.getvalue())
    return EXIT_OK


def _cmd_bracket(settings: dict) -> int:
    name = settings["lattice"]
    spec = _spec(name)
    if settings["dims"] is None:
        settings["dims"] = spec.desk_dims
    settings["dims"] = tuple(settings["dims"])
    proto = _protocol(settings)

    code = EXIT_OK
    message = None
    try:
        est = bracket_pc(name, settings["dims"], proto)
    except Undecidable as exc:
        est = exc.partial
        code = EXIT_UNDECIDED
        message = str(exc)
        print(f"undecided: {message}", file=sys.stderr)

    payload = _estimate_payload(est)
    payload["undecidable"] = message
    payload["config"] = _embedded("bracket", settings)
    _write(_outdir(settings) / f"bracket_{_slug(name)}.json", _json_text(payload))
    return code


def _cmd_curve(settings: dict) -> int:
    name = settings["lattice"]
    spec = _spec(name)
    if not spec.two_parameter:
        raise IllegalInput(f"{name} has a single pressure; use the bracket command")
    if settings["dims"] is None:
        settings["dims"] = spec.desk_dims
    settings["dims"] = tuple(settings["dims"])
    proto = _protocol(settings)
    grid = tuple(settings["p4_grid"])

    code = EXIT_OK
    message = None
    try:
        points = critical_curve(name, grid, proto, settings["dims"])
    except Undecidable as exc:
        points = exc.partial
        code = EXIT_UNDECIDED
        message = str(exc)
        print(f"undecided: {message}", file=sys.stderr)

    embed = _embedded("curve", settings)
    out = _outdir(settings)
    slug = _slug(name)
    rows = []
    for est in points:
        lo, hi = est.bracket if est.bracket is not None else (None, None)
        rows.append([est.p4, lo, hi])
    _write(out / f"curve_{slug}.csv", _csv_text(embed, ["p4", "p_high_lo", "p_high_hi"], rows))

    payload = {
        "lattice": name,
        "points": [_estimate_payload(est) for est in points],
        "undecidable": message,
        "config": embed,
    }
    _write(out / f"curve_{slug}.json", _json_text(payload))
    return code


def _cmd_enumerate(settings: dict) -> int:
    name = settings["lattice"]
    _spec(name)
    dims = (settings["l1"], settings["l2"])
    out = _outdir(settings)
    slug = _slug(name)
    embed = _embedded("enumerate", settings)

    g = build_lattice(name, dims)
    result = enumerate_configs(g, settings["cap"])
    payload = {
        "lattice": result.lattice,
        "dims": list(result.dims),
        "legal_count": result.legal_count,
        "max_occupancy": result.max_occupancy,
        "maximizer_count": result.maximizer_count,
        "max_density": str(result.max_density),
        "max_density_float": float(result.max_density),
        "maximizer_orbit_count": result.maximizer_orbit_count,
        "config": embed,
    }
    _write(out / f"enum_{slug}_{dims[0]}x{dims[1]}.json", _json_text(payload))

    if settings["maximizers"]:
        _occ, _count, masks = count_maximizers(g, cap=settings["cap"], collect=True)
        sink = io.StringIO()
        for key in sorted(embed):
            sink.write(f"# {key} = {json.dumps(embed[key])}\n")
        for mask in masks:
            bits = np.fromiter(
                ((mask >> i) & 1 for i in range(g.site_count)),
                dtype=np.uint8,
                count=g.site_count,
            )
            snapshot_write(Configuration(g, bits), sink)
        _write(out / f"maximizers_{slug}_{dims[0]}x{dims[1]}.snap", sink.getvalue())

    if settings["growth"]:
        fit = growth_fit(name)
        lines = [f"# {key} = {json.dumps(embed[key])}" for key in sorted(embed)]
        lines.append(
            "# fit log_count ~ a*n + b*sqrt(n) + c: "
            f"a={fit.a!r} b={fit.b!r} c={fit.c!r} label={fit.label} "
            f"entropy_kind={fit.entropy_kind} entropy_value={fit.entropy_value!r}"
        )
        lines.append("n,log_count")
        for n, lc in zip(fit.ns, fit.log_counts):
            n_txt = str(int(n)) if float(n).is_integer() else _cell(n)
            lines.append(f"{n_txt},{_cell(lc)}")
        _write(out / f"growth_{slug}.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_voter(settings: dict) -> int:
    name = settings["lattice"]
    _spec(name)
    kind = settings["kind"]
    mode = settings["mode"]
    dims = settings["dims"]
    if kind == "singleton":
        curve = voter_curve(name, mode, dims, settings["cycles"], settings["seed"])
    elif kind in ("doublet", "restriction"):
        if name != "Z2M":
            raise UnsupportedLattice(f"{kind} curve is defined on Z2M, got {name!r}")
        fn = doublet_voter_curve if kind == "doublet" else sublattice_restriction_curve
        curve = fn(mode, dims, settings["cycles"], settings["seed"])
    else:
        raise IllegalInput(f"bad kind {kind!r}; use singleton, doublet or restriction")

    embed = _embedded("voter", settings)
    out = _outdir(settings)
    slug = _slug(name)
    rows = [
        [k, curve.counts[k], curve.hits[k], curve.fraction[k]]
        for k in range(curve.support_size + 1)
    ]
    _write(
        out / f"voter_{slug}_{kind}.csv",
        _csv_text(embed, ["k", "count", "hits", "fraction"], rows),
    )

    shape = curve_shape(curve)
    payload = {
        "lattice": curve.lattice,
        "kind": curve.kind,
        "mode": curve.mode,
        "support_size": curve.support_size,
        "fraction": list(curve.fraction),
        "counts": list(curve.counts),
        "hits": list(curve.hits),
        "shape": shape,
        "config": embed,
    }
    _write(out / f"voter_{slug}_{kind}.json", _json_text(payload))
    return EXIT_OK


def _entropy_payload(est: EntropyEstimate) -> dict:
    return {
        "kind": est.kind,
        "value_nats": est.value_nats,
        "value_bits": est.value_bits,
        "method": est.method,
        "error_estimate": est.error_estimate,
        "lower_bound": est.lower_bound,
    }


def _cmd_entropy(settings: dict) -> int:
    what = settings["what"]
    out = _outdir(settings)
    embed = _embedded("entropy", settings)
    if what == "kagome":
        if settings["grid"] < 2:
            raise IllegalInput(f"grid must be at least 2, got {settings['grid']}")
        payload = _entropy_payload(kagome_entropy(settings["grid"]))
        payload["lattice"] = "3.6.3.6"
        payload["config"] = embed
        _write(out / "entropy_kagome.json", _json_text(payload))
        return EXIT_OK
    if what == "constants":
        payload = {
            name: _entropy_payload(est) for name, est in entropy_constants().items()
        }
        payload["config"] = embed
        _write(out / "entropy_constants.json", _json_text(payload))
        return EXIT_OK
    raise IllegalInput(f"bad entropy target {what!r}; use kagome or constants")


def _cmd_validate(settings: dict) -> int:
    names = [settings["lattice"]] if settings["lattice"] else list(NAMES)
    failed = 0
    for name in names:
        spec = _spec(name)
        report = validate(spec, settings["dims"])

        sink = io.StringIO()
        dump_lattice_text(spec, sink)
        text = sink.getvalue()
        sink2 = io.StringIO()
        dump_lattice_text(load_lattice_text(io.StringIO(text)), sink2)
        report.add("text round-trip", sink2.getvalue() == text)

        if report.passed:
            print(f"{name}: ok ({len(report.checks)} checks)")
        else:
            failed += 1
            print(report)
    return EXIT_OK if failed == 0 else EXIT_BAD_INPUT


_HANDLERS = {
    "list-lattices": _cmd_list_lattices,
    "simulate": _cmd_simulate,
    "bracket": _cmd_bracket,
    "curve": _cmd_curve,
    "enumerate": _cmd_enumerate,
    "voter": _cmd_voter,
    "entropy": _cmd_entropy,
    "validate": _cmd_validate,
}


# --- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    grp = common.add_argument_group("common options")
    grp.add_argument("--seed", type=int, default=sup, help="base RNG seed (default 1)")
    grp.add_argument("--out", default=sup, help="output directory (default .)")
    grp.add_argument("--config", default=sup, help="settings file; explicit flags win")
    grp.add_argument(
        "--threads", type=int, default=sup, help="worker threads; never changes results"
    )

    proto = argparse.ArgumentParser(add_help=False)
    grp = proto.add_argument_group("classification protocol")
    grp.add_argument("--dims", type=_parse_dims, default=sup, help="torus size, e.g. 64x64")
    grp.add_argument("--burn-in", type=int, default=sup, dest="burn_in")
    grp.add_argument("--window", type=int, default=sup)
    grp.add_argument("--eps", type=float, default=sup, help="melted-contrast threshold")
    grp.add_argument("--delta", type=float, default=sup, help="split-contrast threshold")
    grp.add_argument("--seeds", type=_parse_ints, default=sup, help="e.g. 1,2,3")
    grp.add_argument("--max-cycles", type=int, default=sup, dest="max_cycles")
    grp.add_argument("--resolution", type=float, default=sup, help="target bracket width")
    grp.add_argument("--rho0", type=float, default=sup, help="Bernoulli start density")
    grp.add_argument(
        "--coarse-grid", type=_parse_floats, default=sup, dest="coarse_grid"
    )

    ap = argparse.ArgumentParser(
        prog="packlab",
        description="Hard-core packing experiments on the lattice catalog.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "list-lattices", parents=[common], help="print the catalog table"
    )
    p.add_argument("--dump", default=sup, metavar="NAME", help="also write NAME as text")

    p = sub.add_parser(
        "simulate", parents=[common], help="run the occupation dynamics and write traces"
    )
    p.add_argument("lattice")
    p.add_argument("--dims", type=_parse_dims, default=sup, help="torus size, e.g. 64x64")
    p.add_argument("--p", type=float, default=sup, help="occupation pressure")
    p.add_argument("--p4", type=float, default=sup, help="center pressure (UJ, Q)")
    p.add_argument("--p-high", type=float, default=sup, dest="p_high", help="corner pressure (UJ, Q)")
    p.add_argument("--cycles", type=int, default=sup)
    p.add_argument("--init", default=sup, help="empty | bernoulli | class-K")
    p.add_argument("--rho0", type=float, default=sup, help="Bernoulli start density")
    p.add_argument(
        "--save-final", action="store_true", default=sup, dest="save_final",
        help="also write the final configuration snapshot",
    )

    p = sub.add_parser(
        "bracket", parents=[common, proto], help="bracket the critical pressure"
    )
    p.add_argument("lattice")

    p = sub.add_parser(
        "curve", parents=[common, proto], help="critical p_high over a p4 grid (UJ, Q)"
    )
    p.add_argument("lattice")
    p.add_argument(
        "--p4-grid", type=_parse_floats, default=sup, dest="p4_grid", help="e.g. 0,0.2,0.4"
    )

    p = sub.add_parser(
        "enumerate", parents=[common], help="exact packing counts on a small torus"
    )
    p.add_argument("lattice")
    p.add_argument("l1", type=int)
    p.add_argument("l2", type=int)
    p.add_argument("--cap", type=int, default=sup, help="site-count cap for exhaustion")
    p.add_argument(
        "--growth", action="store_true", default=sup,
        help="also fit the maximizer-count growth over the catalog size ladder",
    )
    p.add_argument(
        "--maximizers", action="store_true", default=sup,
        help="also write every densest packing as a snapshot archive",
    )

    p = sub.add_parser(
        "voter", parents=[common], help="update-rule curve on a one-class support"
    )
    p.add_argument("lattice")
    p.add_argument(
        "--kind", choices=("singleton", "doublet", "restriction"), default=sup
    )
    p.add_argument("--mode", choices=("exhaustive", "empirical"), default=sup)
    p.add_argument("--cycles", type=int, default=sup, help="empirical sample cycles")
    p.add_argument("--dims", type=_parse_dims, default=sup)

    p = sub.add_parser(
        "entropy", parents=[common], help="residual entropy values"
    )
    p.add_argument("what", choices=("kagome", "constants"))
    p.add_argument("--grid", type=int, default=sup, help="quadrature points per axis")

    p = sub.add_parser(
        "validate", parents=[common], help="structural checks over the catalog"
    )
    p.add_argument("lattice", nargs="?")
    p.add_argument("--dims", type=_parse_dims, default=sup)

    return ap


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK

    try:
        settings = _resolve(ns.command, ns)
        return _HANDLERS[ns.command](settings)
    except Undecidable as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except ProtocolFailure as exc:
        print(f"protocol failure: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (
        IllegalInput,
        PhaseOutOfRange,
        IncommensurateDims,
        UnknownLattice,
        BadLattice,
        UnsupportedLattice,
        NonUniformDegree,
        TooLarge,
        KeyError,
        OSError,
    ) as exc:
        detail = exc.args[0] if exc.args else exc
        print(f"error: {detail}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
