"""Command-line surface: emits curve/table data as CSV or JSON, no plotting.

Every file written is paired with a `<file>.manifest.json` recording the
command, parameters, seed, tool version, timestamp and sha256 digests, so a
run can be reproduced and its outputs checked byte-for-byte (numeric columns
are deterministic functions of the manifest parameters).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, acceptance, analytics, gmzi, gridmux, logic, networks, patterns, temporal
from .linalg import equal_up_to_global_phase, perm_matrix
from .simkit import thread_count

__all__ = ["main"]


# ---------------------------------------------------------------------------
# formatting and manifests


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def _emit_csv(path: str | None, header: list[str], rows: list[list]) -> str:
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(x) for x in row) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")
    return text


def _emit_json(path: str | None, payload) -> str:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")
    return text


def _write_manifest(args: argparse.Namespace, outputs: dict[str, str]) -> None:
    """One manifest next to the first output file; digests cover all of them."""
    if not outputs:
        return
    params = {k: v for k, v in vars(args).items() if k != "func" and v is not None}
    manifest = {
        "command": "muxkit " + " ".join(sys.argv[1:]),
        "parameters": {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()},
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "outputs": {name: hashlib.sha256(text.encode()).hexdigest() for name, text in outputs.items()},
        "threads": thread_count(),
    }
    first = next(iter(outputs))
    Path(first + ".manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", newline="\n")


def _parse_range(spec: str, integer: bool = False) -> list:
    """lo:hi:step inclusive grid, or a single value."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [int(parts[0]) if integer else float(parts[0])]
    if len(parts) != 3:
        raise ValueError(f"range must be 'lo:hi:step' or a single value, got {spec!r}")
    lo, hi, step = (float(x) for x in parts)
    if step <= 0 or hi < lo:
        raise ValueError("range needs step > 0 and hi >= lo")
    out = []
    x = lo
    while x <= hi + 1e-9 * max(1.0, abs(hi)):
        out.append(int(round(x)) if integer else round(x, 12))
        x += step
    return out


def _parse_ints(spec: str) -> tuple[int, ...]:
    return tuple(int(x) for x in spec.replace(" ", "").split(",") if x != "")


# ---------------------------------------------------------------------------
# analyze


def _cmd_analyze(args) -> int:
    outputs = {}
    curve = args.curve
    if curve == "pmux":
        rows = [
            [n, args.p, analytics.p_mux_single(n, args.p)]
            for n in _parse_range(args.n_range, integer=True)
        ]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["n_sources", "p", "p_mux"], rows)
    elif curve == "group":
        rows = []
        for n in _parse_range(args.n_range, integer=True):
            rows.append(
                [
                    n,
                    args.p,
                    args.m,
                    analytics.naive_group_pmux(n, args.p, args.m),
                    analytics.optimal_group_pmux(n, args.p, args.m),
                ]
            )
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["n_sources", "p", "m", "naive", "optimal"], rows)
    elif curve == "sources-ratio":
        n_naive, n_opt, ratio = analytics.required_sources_ratio(args.p, args.target, args.m)
        rows = [[args.p, args.target, args.m, n_naive, n_opt, ratio]]
        outputs[args.csv or "-"] = _emit_csv(
            args.csv, ["p", "target", "m", "n_naive", "n_optimal", "ratio"], rows
        )
    elif curve == "yield":
        rows = [
            [lam, args.m, args.g, int(args.sharing), analytics.yield_multi_generator(lam, args.m, args.g, args.sharing)]
            for lam in _parse_range(args.lam_range)
        ]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["lam", "m", "g", "sharing", "yield"], rows)
    elif curve == "yield-max":
        lam, y = analytics.max_yield(args.m, args.g, sharing=args.sharing)
        rows = [[args.m, args.g, int(args.sharing), lam, y]]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["m", "g", "sharing", "lam_star", "yield_max"], rows)
    elif curve == "footprint":
        fp = analytics.footprint(args.n, args.p, args.yield_, args.p_group, args.p_out)
        rows = [[args.n, args.p, args.yield_, args.p_group, args.p_out, fp.copies, fp.sources, fp.sources_approx]]
        outputs[args.csv or "-"] = _emit_csv(
            args.csv,
            ["n_sources", "p", "yield", "p_group", "p_out", "copies", "sources", "sources_approx"],
            rows,
        )
    elif curve == "raster":
        rows = []
        for n in _parse_range(args.n_range, integer=True):
            row = [n, args.p]
            for strategy in analytics.RASTER_STRATEGIES:
                row.append(analytics.raster_yield(strategy, n, args.p))
            rows.append(row)
        header = ["n_sources", "p"] + [s.replace("-", "_") for s in analytics.RASTER_STRATEGIES]
        outputs[args.csv or "-"] = _emit_csv(args.csv, header, rows)
    elif curve == "crossover":
        x = analytics.raster_crossover(args.p)
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["p", "crossover_sources"], [[args.p, x]])
    elif curve == "ghz":
        factors = analytics.ghz_improvement_factors(args.n, args.p)
        rows = [[args.n, args.p, k, v] for k, v in sorted(factors.items())]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["n_sources", "p", "scheme", "factor"], rows)
    elif curve == "bsg":
        rows = [[n, analytics.p_bsg(n)] for n in _parse_range(args.n_range, integer=True)]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["n_modes", "p_success"], rows)
    elif curve == "reduction":
        f = analytics.enlarged_gmzi_mux_reduction()
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["reduction_factor"], [[f]])
    else:  # pragma: no cover - argparse choices guard this
        raise ValueError(f"unknown curve {curve!r}")
    _write_manifest(args, {k: v for k, v in outputs.items() if k != "-"})
    return 0


# ---------------------------------------------------------------------------
# search


def _cmd_search(args) -> int:
    rows = []
    if args.circuit in ("bsg8", "bsg12"):
        n = 8 if args.circuit == "bsg8" else 12
        res = patterns.search_optimal_coupler_layer(n)
        frac = Fraction(res.n_routable, res.n_patterns)
        print(f"modes: {n}")
        print("optimal coupler layer: " + " ".join(f"({a},{b})" for a, b in res.layer))
        print(f"routable patterns: {res.n_routable}/{res.n_patterns} (fraction {frac})")
        print(f"usable target patterns: {len(patterns.paired_usable_patterns(n))}")
        print(f"layers searched: {res.n_layers_searched}")
        rows = [[n, str(res.layer), res.n_routable, res.n_patterns, float(frac)]]
        header = ["n_modes", "layer", "n_routable", "n_patterns", "fraction"]
    elif args.circuit == "pairs":
        rails = patterns.rail_pairing_success_fraction()
        paired = patterns.paired_coupler_success_fraction()
        print(f"untyped coupler pairing success: {rails} = {float(rails)}")
        print(f"typed coupler pairing success: {paired} = {float(paired)}")
        rows = [["untyped", str(rails), float(rails)], ["typed", str(paired), float(paired)]]
        header = ["variant", "fraction", "value"]
    elif args.circuit == "binning":
        frac = patterns.distinct_bin_fraction(args.n)
        print(f"all-distinct-bin probability at n={args.n}: {frac} = {float(frac)}")
        rows = [[args.n, str(frac), float(frac)]]
        header = ["n", "fraction", "value"]
    else:  # pragma: no cover
        raise ValueError(f"unknown circuit {args.circuit!r}")
    outputs = {}
    if args.csv:
        outputs[args.csv] = _emit_csv(args.csv, header, rows)
    _write_manifest(args, outputs)
    return 0


# ---------------------------------------------------------------------------
# gridmux


def _cmd_gridmux(args) -> int:
    if args.emit_config:
        text = gridmux.config_to_json(gridmux.default_config())
        Path(args.emit_config).write_text(text + "\n", newline="\n")
        _write_manifest(args, {args.emit_config: text + "\n"})
        return 0
    if args.config:
        cfg = gridmux.config_from_json(Path(args.config).read_text())
    else:
        cfg = gridmux.default_config()
    group_type = _parse_ints(args.column_group_type) if args.column_group_type else None
    rows = []
    for i, p in enumerate(_parse_range(args.p_range)):
        pt = gridmux.simulate_grid_yield(cfg, p, trials=args.trials, seed=args.seed + i, column_group_type=group_type)
        rows.append([p, pt.estimate.mean, pt.estimate.stderr, pt.bound, pt.naive, pt.estimate.trials, pt.estimate.seed])
    header = ["p", "yield", "stderr", "bound", "naive", "trials", "seed"]
    outputs = {args.csv or "-": _emit_csv(args.csv, header, rows)}
    _write_manifest(args, {k: v for k, v in outputs.items() if k != "-"})
    return 0


# ---------------------------------------------------------------------------
# temporal


def _cmd_temporal(args) -> int:
    outputs = {}
    if args.scheme == "raster":
        rows = []
        for i, n in enumerate(_parse_range(args.n_range, integer=True)):
            res = temporal.raster_simulate(
                args.strategy, n, args.p, enhanced=args.enhanced, trials=args.trials, seed=args.seed + i
            )
            closed = analytics.raster_yield(args.strategy, n, args.p)
            rows.append(
                [
                    n,
                    args.p,
                    int(args.enhanced),
                    res.groups_per_period.mean,
                    res.groups_per_period.stderr,
                    res.yield_per_photon.mean,
                    res.yield_per_photon.stderr,
                    closed,
                    res.groups_per_period.seed,
                ]
            )
        header = ["n_sources", "p", "enhanced", "groups", "groups_stderr", "yield", "yield_stderr", "closed_form_yield", "seed"]
        outputs[args.csv or "-"] = _emit_csv(args.csv, header, rows)
    elif args.scheme == "debruijn":
        if args.emit_sequence:
            seq = temporal.reduced_de_bruijn(args.modes, args.word_length or args.modes)
            rows = [[i, s] for i, s in enumerate(seq)]
            outputs[args.csv or "-"] = _emit_csv(args.csv, ["index", "delay"], rows)
        else:
            rows = []
            for p in _parse_range(args.p_range):
                single = temporal.non_tetris_success_probability(args.modes, args.bins, p)
                row = [args.modes, args.bins, p, single]
                if args.tetris:
                    row.append(float(temporal.tetris_success_probability(args.modes, args.bins, Fraction(p).limit_denominator(10**9))))
                rows.append(row)
            header = ["modes", "bins", "p", "single_shift_prob"] + (["per_bin_shift_prob"] if args.tetris else [])
            outputs[args.csv or "-"] = _emit_csv(args.csv, header, rows)
    elif args.scheme == "gather":
        rows = []
        for i, p in enumerate(_parse_range(args.p_range)):
            est = temporal.simulate_group_extraction(
                args.modes, args.group_size, args.bins, p, trials=args.trials, seed=args.seed + i
            )
            for k, e in est.items():
                rows.append([args.modes, args.group_size, args.bins, p, k, e.mean, e.stderr, e.seed])
        header = ["modes", "group_size", "bins", "p", "k_groups", "prob_at_least_k", "stderr", "seed"]
        outputs[args.csv or "-"] = _emit_csv(args.csv, header, rows)
    elif args.scheme == "perm":
        perm = _parse_ints(args.perm) if args.perm else tuple(range(args.size))
        sched = temporal.temporal_permutation(args.size, perm, variant=args.variant)
        arrivals = temporal.replay_temporal_permutation(sched)
        rows = []
        for r, i in enumerate(sched.inputs):
            port, t = arrivals[i]
            rows.append([i, sched.targets[r], sched.first_shifts[i], port, t])
        header = ["input_bin", "target_slot", "delay_line", "output_port", "output_bin"]
        outputs[args.csv or "-"] = _emit_csv(args.csv, header, rows)
    else:  # pragma: no cover
        raise ValueError(f"unknown scheme {args.scheme!r}")
    _write_manifest(args, {k: v for k, v in outputs.items() if k != "-"})
    return 0


# ---------------------------------------------------------------------------
# gmzi


def _cmd_gmzi(args) -> int:
    outputs = {}
    if args.classify:
        for spec in gmzi.classify_gmzi_types(args.size):
            print(",".join(str(f) for f in spec))
        return 0
    if args.report == "swings":
        rows = []
        for spec in gmzi.classify_gmzi_types(args.size):
            dev = gmzi.build_gmzi(spec)
            dec = gmzi.decompose_stages(dev)
            rows.append(["x".join(str(f) for f in spec), gmzi.phase_swing(dev), dec.depth(), dec.total_crossings()])
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["type", "swing", "stages", "crossings"], rows)
        _write_manifest(args, {k: v for k, v in outputs.items() if k != "-"})
        return 0
    if args.report == "vectors":
        rows_angles = gmzi.ternary_six_mode_mux_settings()
        rep = gmzi.check_mux_lemma(np.exp(1j * rows_angles).conj().T / np.sqrt(6), rows_angles)
        rows = [[i] + list(row) for i, row in enumerate(rows_angles)]
        outputs[args.csv or "-"] = _emit_csv(args.csv, ["setting"] + [f"mode{m}" for m in range(6)], rows)
        print(f"orthonormal: {rep.orthonormal_ok} (max deviation {rep.max_gram_deviation:.3e})")
        _write_manifest(args, {k: v for k, v in outputs.items() if k != "-"})
        return 0
    spec = _parse_ints(args.type) if args.type else gmzi.classify_gmzi_types(args.size)[0]
    if math.prod(spec) != args.size:
        raise ValueError(f"type {spec} has order {math.prod(spec)}, but --size is {args.size}")
    dev = gmzi.build_gmzi(spec)
    if args.verify:
        table = gmzi.routing_table(dev)
        ok = True
        for i in range(dev.n_modes):
            ok = ok and sorted(table[i]) == list(range(dev.n_modes))
            ok = ok and sorted(table[:, i]) == list(range(dev.n_modes))
        for k in range(dev.n_settings):
            ok = ok and equal_up_to_global_phase(
                gmzi.setting_matrix(dev, k), perm_matrix(gmzi.setting_permutation(dev, k)), tol=1e-9
            )
        err = float(np.abs(gmzi.decompose_stages(dev).matrix() - dev.passive()).max())
        ok = ok and err <= 1e-9
        print(f"device {spec}: settings permute with Latin-square routing, stage error {err:.2e}")
        if not ok:
            print("verification FAILED", file=sys.stderr)
            return 1
        return 0
    text = gmzi.device_to_json(dev)
    if args.json:
        Path(args.json).write_text(text + "\n", newline="\n")
        outputs[args.json] = text + "\n"
        _write_manifest(args, outputs)
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# logic


def _cmd_logic(args) -> int:
    if args.table == "wildcard":
        table = logic.wildcard_reduce(args.width, args.photons)
        text = table.to_csv()
    elif args.table == "encoder":
        if args.width > 16:
            raise ValueError("encoder enumeration needs width <= 16")
        lines = ["pattern,first_index"]
        for x in range(1 << args.width):
            bits = [bool(x >> i & 1) for i in range(args.width)]
            idx = logic.priority_encode(bits)
            lines.append("".join("1" if b else "0" for b in bits) + "," + ("none" if idx is None else str(idx)))
        text = "\n".join(lines) + "\n"
    else:  # pragma: no cover
        raise ValueError(f"unknown table {args.table!r}")
    if args.csv:
        Path(args.csv).write_text(text, newline="\n")
        _write_manifest(args, {args.csv: text})
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# net


def _cmd_net(args) -> int:
    builder = networks.BUILDERS[args.topology]
    if args.topology == "spanke":
        net = builder(args.size, args.m, optimized=args.optimized)
    elif args.topology == "concatenated-gmzi":
        net = builder(args.size, args.m)
    else:
        net = builder(args.size, args.n)
    met = networks.metrics(net)
    delays = ",".join(_fmt(d) for d in met.delays) if met.delays else "-"
    print(
        f"{net.name}: inputs {met.n_inputs} outputs {met.n_outputs} "
        f"active {met.n_active} depth {met.depth_min}..{met.depth_max} "
        f"couplers {met.n_couplers} crossings {met.crossing_count} delays {delays}"
    )
    if args.out:
        text = networks.network_to_json(net) + "\n"
        Path(args.out).write_text(text, newline="\n")
        _write_manifest(args, {args.out: text})
    return 0


# ---------------------------------------------------------------------------
# verify


def _cmd_verify(args) -> int:
    results = acceptance.run_all(quick=args.quick, echo=print)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed" + (" (quick mode)" if args.quick else ""))
    if args.json:
        payload = {
            "mode": "quick" if args.quick else "full",
            "version": __version__,
            "checks": [
                {"index": r.index, "name": r.name, "passed": r.passed, "values": r.values}
                for r in results
            ],
        }
        text = _emit_json(args.json, payload)
        _write_manifest(args, {args.json: text})
    return 0 if n_pass == len(results) else 1


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="muxkit",
        description="Switch-network design and yield data for multiplexed photon sources.",
        epilog="MUXKIT_THREADS caps worker threads (results are schedule-independent).",
    )
    parser.add_argument("--version", action="version", version=f"muxkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="closed-form curves and optima")
    pa.add_argument(
        "--curve",
        required=True,
        choices=[
            "pmux", "group", "sources-ratio", "yield", "yield-max",
            "footprint", "raster", "crossover", "ghz", "bsg", "reduction",
        ],
    )
    pa.add_argument("--n", type=int, default=48)
    pa.add_argument("--n-range", default="8:128:8")
    pa.add_argument("--p", type=float, default=0.05)
    pa.add_argument("--m", type=int, default=4)
    pa.add_argument("--g", type=int, default=1)
    pa.add_argument("--target", type=float, default=0.99)
    pa.add_argument("--lam-range", default="1:20:1")
    pa.add_argument("--sharing", action=argparse.BooleanOptionalAction, default=True)
    pa.add_argument("--yield", dest="yield_", type=float, default=0.8)
    pa.add_argument("--p-group", type=float, default=0.5)
    pa.add_argument("--p-out", type=float, default=0.99)
    pa.add_argument("--csv")
    pa.set_defaults(func=_cmd_analyze)

    ps = sub.add_parser("search", help="pattern-coverage searches and fractions")
    ps.add_argument("--circuit", required=True, choices=["bsg8", "bsg12", "pairs", "binning"])
    ps.add_argument("--n", type=int, default=4)
    ps.add_argument("--csv")
    ps.set_defaults(func=_cmd_search)

    pg = sub.add_parser("gridmux", help="grid multiplexer yield simulation")
    pg.add_argument("--p-range", default="0.05:0.15:0.05")
    pg.add_argument("--trials", type=int, default=10_000)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--config", help="JSON layout (see --emit-config)")
    pg.add_argument("--emit-config", help="write the default layout JSON and exit")
    pg.add_argument("--column-group-type", help="comma list of cyclic factors per column switch")
    pg.add_argument("--csv")
    pg.set_defaults(func=_cmd_gridmux)

    pt = sub.add_parser("temporal", help="time-multiplexing schemes")
    pt.add_argument("--scheme", required=True, choices=["raster", "debruijn", "gather", "perm"])
    pt.add_argument("--strategy", default="one-mux", choices=["one-mux", "two-mux", "i", "ii"])
    pt.add_argument("--n-range", default="8:128:8")
    pt.add_argument("--p", type=float, default=0.05)
    pt.add_argument("--p-range", default="0.05:0.25:0.05")
    pt.add_argument("--enhanced", action=argparse.BooleanOptionalAction, default=False)
    pt.add_argument("--trials", type=int, default=10_000)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--modes", type=int, default=4)
    pt.add_argument("--bins", type=int, default=4)
    pt.add_argument("--word-length", type=int)
    pt.add_argument("--tetris", action="store_true")
    pt.add_argument("--emit-sequence", action="store_true")
    pt.add_argument("--group-size", type=int, default=4)
    pt.add_argument("--size", type=int, default=4, help="permutation window size R")
    pt.add_argument("--perm", help="comma list, e.g. 2,0,1")
    pt.add_argument("--variant", default="arbitrary", choices=["arbitrary", "sort-to-top"])
    pt.add_argument("--csv")
    pt.set_defaults(func=_cmd_temporal)

    pz = sub.add_parser("gmzi", help="switch-device build, verify, reports")
    pz.add_argument("--size", type=int, default=8)
    pz.add_argument("--type", help="comma list of cyclic factors, e.g. 4,2")
    pz.add_argument("--classify", action="store_true")
    pz.add_argument("--verify", action="store_true")
    pz.add_argument("--report", choices=["swings", "vectors"])
    pz.add_argument("--json", help="serialize the device to this path")
    pz.add_argument("--csv")
    pz.set_defaults(func=_cmd_gmzi)

    pl = sub.add_parser("logic", help="feedforward truth tables")
    pl.add_argument("--table", required=True, choices=["wildcard", "encoder"])
    pl.add_argument("--width", type=int, required=True)
    pl.add_argument("--photons", type=int, default=4)
    pl.add_argument("--csv")
    pl.set_defaults(func=_cmd_logic)

    pn = sub.add_parser("net", help="build a switch network and report cost metrics")
    pn.add_argument("--topology", required=True, choices=sorted(networks.BUILDERS))
    pn.add_argument("--size", type=int, required=True, help="input count (time bins for the delay builders)")
    pn.add_argument("--n", type=int, default=2, help="switch block size / tree branching")
    pn.add_argument("--m", type=int, default=2, help="output count (spanke, concatenated-gmzi)")
    pn.add_argument("--optimized", action="store_true", help="trim unreachable fan arms (spanke)")
    pn.add_argument("--out", help="write the network JSON here")
    pn.set_defaults(func=_cmd_net)

    pv = sub.add_parser("verify", help="run the acceptance checks")
    pv.add_argument("--quick", action="store_true", help="reduced trial counts")
    pv.add_argument("--json", help="write the numeric report to this path")
    pv.set_defaults(func=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
