"""Command-line entry point.

Subcommands: selftest, synthesize, optimize-pulse, scan-pulse, simulate,
optimize-intervals, study {crosstalk|triplet|nuclei}, verify. Exit codes:
0 success, 2 invalid configuration, 3 infeasible or unmet target, 4 internal
error. Every run writes a manifest next to its outputs.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import fixtures
from .collective import collective_reduction
from .lss import LSSLimits, ideal_preparation_fidelity, lss_search
from .manifest import verify_manifest, write_manifest
from .pulses.composite import CompositePulse, pulse_from_json, pulse_to_json
from .pulses.optimize import CostSpec, optimize_composite, optimize_shaped
from .pulses.scan import robustness_scan
from .pulses.shaped import ShapedPulse, shaped_from_json, shaped_to_json
from .sequence import (
    PRESETS,
    PulseSegment,
    build_factor_matrix,
    cluster_alpha,
    compile_sequence,
    pulse_string,
    sequence_from_json,
    sequence_to_json,
    solve_exact,
)
from .sim.intervals import optimize_intervals
from .sim.protocol import PulseOptions, build_engine
from .sim.studies import crosstalk_study, nuclear_study, triplet_study
from .spin_system import system_from_json
from .units import parse_duration

CONFIG_ERROR, INFEASIBLE, INTERNAL = 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _load_shaped(spec, n_slices=None):
    if spec in (None, "builtin"):
        return shaped_from_json(fixtures.pulse_library()["selective_pi_x"], n_slices)
    lib = fixtures.pulse_library()
    if spec in lib:
        return shaped_from_json(lib[spec], n_slices)
    return shaped_from_json(spec, n_slices)


def _load_broadband(spec):
    if spec in (None, "ideal"):
        return None
    lib = fixtures.pulse_library()
    if spec == "builtin":
        return pulse_from_json(lib["broadband_pi_x_tuned"])
    if spec in lib:
        return pulse_from_json(lib[spec])
    return pulse_from_json(spec)


def _options_from_args(args):
    bb = _load_broadband(getattr(args, "broadband", None))
    return PulseOptions(
        n_slices=getattr(args, "slices", 1500),
        broadband_in_selective="composite" if bb is not None else "ideal",
        broadband_pulse=bb,
        init_mode=getattr(args, "init", "ideal"),
    )


def _parse_scan(expr):
    out = {}
    for part in expr.split(","):
        key, rng = part.split("=")
        lo, hi, n = rng.split(":")
        out[key.strip()] = np.linspace(float(lo), float(hi), int(n))
    return out


def cmd_selftest(args):
    report = []
    solvable = fixtures.solvable_systems()
    for name, entry in solvable.items():
        problem = build_factor_matrix(
            [tuple(f) for f in entry["sequence"]],
            max(max(p) for p in entry["coupling_order"]),
            [tuple(p) for p in entry["coupling_order"]],
        )
        inv = fixtures.inverse_as_float(entry)
        err = np.max(np.abs(problem.matrix @ inv - np.eye(len(inv))))
        if err > 1e-12:
            raise CliError(f"{name}: factor matrix does not invert", INTERNAL)
        report.append(f"{name}: matrix x inverse = identity")
    for n in (4, 6):
        cfg = fixtures.register_config(n)
        system = fixtures.load_register(n)
        flat, order = _validated_couplings(cfg)
        for (i, j), val in zip(order, flat):
            got = system.coupling(i, j)
            if abs(got / val - 1.0) > 2e-4:
                raise CliError(f"{n}-spin register coupling ({i},{j}) mismatch", INTERNAL)
        report.append(f"{n}-spin register couplings validated")
    lib = fixtures.pulse_library()
    for key, entry in lib.items():
        if not isinstance(entry, dict) or "kind" not in entry:
            continue
        if entry["kind"].startswith("composite"):
            pulse_from_json(entry)
        else:
            shaped_from_json(entry)
    report.append("pulse library loads")
    for n in range(3, 9):
        _, _, compiled = collective_reduction(n)
        if compiled.pi_count != 2 * n + 2:
            raise CliError(f"ring solution pulse count wrong at N={n}", INTERNAL)
    report.append("ring two-pulse solutions compile to 2N+2 pulses")
    print("\n".join(report))
    print("selftest: all fixtures valid")
    return 0


def _validated_couplings(cfg):
    vc = cfg["validated_couplings_kHz"]
    flat = []
    for group in ("nn", "nnn", "long_range", "opposite"):
        if group in vc:
            flat += [2e3 * np.pi * v for v in vc[group]]
    order = [tuple(p) for p in cfg.get(
        "validated_couplings_order",
        [[1, 2], [2, 3], [3, 4], [1, 4], [1, 3], [2, 4]],
    )]
    return flat, order


def _system_from_arg(spec):
    if spec in ("four", "4", "builtin4"):
        return fixtures.load_register(4), fixtures.register_config(4)
    if spec in ("six", "6", "builtin6"):
        return fixtures.load_register(6), fixtures.register_config(6)
    cfg = json.loads(Path(spec).read_text())
    return system_from_json(cfg), cfg


def _g1_ideal(cfg):
    ideal = cfg.get("ideal_couplings_kHz", {})
    g1 = ideal.get("nn") or (ideal.get("orders") or [1.9241])[0]
    return 2e3 * np.pi * float(g1)


def cmd_synthesize(args):
    system, cfg = _system_from_arg(args.system)
    n = system.n_spins
    outputs = []
    if args.search == "lss":
        limits = LSSLimits(sigma0=args.sigma0, T0=args.T0, tau_min=args.tau_min,
                           max_tries=args.max_tries)
        cands = lss_search(n, limits=limits, g1=1.0, seed=args.seed)
        if not cands:
            raise CliError("no candidate within limits", INFEASIBLE)
        best = cands[0]
        fid = ideal_preparation_fidelity(n, best.sequence.segments)
        doc = {
            "classes": list(best.labels),
            "tau_in_1_over_g1": best.tau.tolist(),
            "residual": best.residual,
            "T_c_in_1_over_g1": best.total_time,
            "pi_count": best.pi_count,
            "ideal_fidelity": fid,
        }
        doc.update(sequence_to_json(best.sequence.segments))
        Path(args.out).write_text(json.dumps(doc, indent=2))
        outputs.append(args.out)
        print(f"candidates: {len(cands)}; best N_pi={best.pi_count} "
              f"T_c={best.total_time:.4f}/g1 residual={best.residual:.3g} F={fid:.6f}")
    else:
        if n not in PRESETS:
            raise CliError("presets exist for N=4,5,6; use --search lss", CONFIG_ERROR)
        seq_idx, order = PRESETS[n]
        problem = build_factor_matrix(seq_idx, n, order)
        g1 = _g1_ideal(cfg)
        t_c = parse_duration(args.Tc, g1)
        couplings = {p: system.coupling(*p) for p in order}
        if args.target == "cluster":
            alpha = cluster_alpha(order, couplings, t_c)
        elif args.target == "identity":
            alpha = np.zeros(len(order) + 1)
            alpha[0] = 4.0 * np.pi / couplings[order[0]]
            alpha[-1] = t_c
        else:
            alpha = np.asarray(json.loads(Path(args.target).read_text()), float)
        tau = solve_exact(problem, alpha)
        if tau is None:
            raise CliError("negative durations: target infeasible for this sequence",
                           INFEASIBLE)
        segments = [PulseSegment(f, t) for f, t in zip(seq_idx, tau)]
        compiled = compile_sequence(segments, drop_below=1e-12 * t_c)
        doc = sequence_to_json(segments, order)
        doc["pulse_string"] = pulse_string(compiled)
        doc["pi_count"] = compiled.pi_count
        Path(args.out).write_text(json.dumps(doc, indent=2))
        outputs.append(args.out)
        print(f"T_c = {compiled.total_time * 1e3:.4f} ms, N_pi = {compiled.pi_count}")
        print(doc["pulse_string"])
    write_manifest(Path(args.out).with_suffix(".manifest.json"),
                   command="synthesize", inputs=_input_paths(args.system),
                   outputs=outputs, seed=args.seed)
    return 0


def _input_paths(spec):
    return [spec] if spec and Path(str(spec)).exists() else []


def cmd_optimize_pulse(args):
    box = None
    if args.box:
        d, e, t = (float(x) for x in args.box.split(","))
        box = {"delta_max": d, "eps_max": e, "max_infidelity": t}
    seeds_x = []
    if args.seed_from:
        lib = fixtures.pulse_library()
        entry = lib.get(args.seed_from)
        if entry is None:
            raise CliError(f"unknown library pulse '{args.seed_from}'", CONFIG_ERROR)
        if entry["kind"].startswith("composite"):
            p = pulse_from_json(entry)
            seeds_x = [np.asarray(p.phases) if p.kind == "pi"
                       else np.concatenate([[p.nutation], p.phases])]
        else:
            p = shaped_from_json(entry)
            seeds_x = [np.concatenate([p.a, p.b])]
    if args.kind.startswith("composite"):
        target = "pi" if args.kind.endswith("pi") else "pi_half"
        pulse, report = optimize_composite(
            target=target, n_phases=args.n_phases, seeds=args.seeds,
            rng_seed=args.seed, x0_seeds=seeds_x, validation_box=box,
        )
        doc = pulse_to_json(pulse)
    else:
        angle = np.pi if args.kind.endswith("pi") else np.pi / 2.0
        template = _load_shaped("builtin")
        pulse, report = optimize_shaped(
            target_angle=angle, template=template, seeds=args.seeds,
            rng_seed=args.seed, x0_seeds=seeds_x, validation_box=box,
        )
        doc = shaped_to_json(pulse)
    doc["report"] = {
        "cost": report.cost,
        "worst_infidelity": report.worst_infidelity,
        "met_target": report.met_target,
    }
    Path(args.out).write_text(json.dumps(doc, indent=2))
    write_manifest(Path(args.out).with_suffix(".manifest.json"), command="optimize-pulse",
                   outputs=[args.out], seed=args.seed)
    print(f"cost {report.cost:.3g}, worst infidelity {report.worst_infidelity:.3g}, "
          f"target met: {report.met_target}")
    return 0 if report.met_target else INFEASIBLE


def cmd_scan_pulse(args):
    lib = fixtures.pulse_library()
    spec = lib.get(args.pulse, args.pulse)
    if isinstance(spec, str):
        spec = json.loads(Path(spec).read_text())
    if spec["kind"].startswith("composite"):
        pulse = pulse_from_json(spec)
        target = pulse.target()
        scan = robustness_scan(pulse, target, args.delta, args.eps)
    else:
        pulse = shaped_from_json(spec)
        sx = np.array([[0, 1], [1, 0]], complex)
        target = np.array([[0, -1j], [-1j, 0]]) if args.target == "pi" else np.eye(2)
        del sx
        scan = robustness_scan(pulse, target, args.delta, args.eps,
                               broadband=_load_broadband(args.broadband))
    Path(args.out).write_text(scan.to_csv())
    write_manifest(Path(args.out).with_suffix(".manifest.json"), command="scan-pulse",
                   inputs=_input_paths(args.pulse), outputs=[args.out])
    print(f"worst infidelity on grid: {scan.worst():.3g}")
    return 0


def _sequence_for_system(args, system, cfg):
    if args.sequence and args.sequence not in ("preset",):
        segs, order = sequence_from_json(json.loads(Path(args.sequence).read_text()))
        return compile_sequence(segs, drop_below=None)
    seq_idx, order = PRESETS[system.n_spins]
    problem = build_factor_matrix(seq_idx, system.n_spins, order)
    g1 = _g1_ideal(cfg)
    t_c = parse_duration(getattr(args, "Tc", "4pi"), g1)
    alpha = cluster_alpha(order, {p: system.coupling(*p) for p in order}, t_c)
    tau = solve_exact(problem, alpha)
    if tau is None:
        raise CliError("preset sequence infeasible for this system", INFEASIBLE)
    return compile_sequence([PulseSegment(f, t) for f, t in zip(seq_idx, tau)],
                            drop_below=None)


def cmd_simulate(args):
    system, cfg = _system_from_arg(args.system)
    sequence = _sequence_for_system(args, system, cfg)
    shaped = _load_shaped(args.pulses, n_slices=args.slices)
    options = _options_from_args(args)
    engine = build_engine(system, shaped, options)
    taus = None
    if args.tau:
        taus = 1e-6 * np.asarray(json.loads(Path(args.tau).read_text()), float)
    outputs = []
    if args.scan:
        grids = _parse_scan(args.scan)
        deltas, epss = grids.get("delta", [0.0]), grids.get("eps", [0.0])
        values = np.zeros((len(deltas), len(epss)))
        for a, dl in enumerate(deltas):
            for b, ep in enumerate(epss):
                values[a, b] = engine.fidelity(sequence, taus, dl, ep)
        from .pulses.scan import FidelityScan

        scan = FidelityScan(deltas, epss, 1.0 - values,
                            metadata={"quantity": "preparation infidelity"})
        Path(args.out).write_text(scan.to_csv())
        outputs.append(args.out)
        print(f"max fidelity on grid: {1.0 - scan.values.min():.6f}")
    else:
        fid = engine.fidelity(sequence, taus, args.delta, args.eps)
        print(f"preparation fidelity: {fid:.6f}")
        if args.out:
            Path(args.out).write_text(json.dumps({"fidelity": fid}, indent=2))
            outputs.append(args.out)
    if outputs:
        write_manifest(Path(outputs[0]).with_suffix(".manifest.json"), command="simulate",
                       inputs=_input_paths(args.system), outputs=outputs)
    return 0


def cmd_optimize_intervals(args):
    system, cfg = _system_from_arg(args.system)
    sequence = _sequence_for_system(args, system, cfg)
    shaped = _load_shaped(args.pulses, n_slices=args.slices)
    engine = build_engine(system, shaped, _options_from_args(args))
    result = optimize_intervals(engine, sequence, budget=args.budget)
    doc = {
        "tau_us": (result.tau * 1e6).tolist(),
        "fidelity": result.fidelity,
        "start_fidelity": result.start_fidelity,
    }
    Path(args.out).write_text(json.dumps(doc, indent=2))
    write_manifest(Path(args.out).with_suffix(".manifest.json"),
                   command="optimize-intervals", inputs=_input_paths(args.system),
                   outputs=[args.out])
    print(f"F: {result.start_fidelity:.6f} -> {result.fidelity:.6f}")
    return 0


def _float_range(expr):
    lo, hi, n = expr.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def cmd_study(args):
    shaped = _load_shaped(args.pulses, n_slices=args.slices)
    if args.what == "crosstalk":
        table = crosstalk_study(shaped, _float_range(args.range))
    else:
        system, cfg = _system_from_arg("four")
        sequence = _sequence_for_system(argparse.Namespace(sequence=None, Tc="4pi"),
                                        system, cfg)
        tau = 1e-6 * np.asarray(cfg["optimal_intervals_us"], float)
        if args.what == "triplet":
            table = triplet_study(system, sequence, shaped, tau, _float_range(args.range))
        else:
            nuc = fixtures.nuclear_geometry()
            table = nuclear_study(system, sequence, shaped, tau, _float_range(args.range),
                                  nuc["unit_vectors"], B_z=nuc["B_z_T"])
    Path(args.out).write_text(table.to_csv())
    write_manifest(Path(args.out).with_suffix(".manifest.json"),
                   command=f"study {args.what}", outputs=[args.out])
    print(table.to_csv())
    return 0


def cmd_verify(args):
    problems = verify_manifest(args.manifest)
    if problems:
        print("\n".join(problems))
        return INFEASIBLE
    print("manifest verified: outputs reproduce recorded hashes")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="ringprep")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sub.add_parser("selftest").set_defaults(fn=cmd_selftest)

    p = sub.add_parser("synthesize")
    p.add_argument("--system", required=True)
    p.add_argument("--target", default="cluster")
    p.add_argument("--Tc", default="4pi")
    p.add_argument("--search", choices=["preset", "lss"], default="preset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma0", type=float, default=0.1)
    p.add_argument("--T0", type=float, default=None)
    p.add_argument("--tau-min", dest="tau_min", type=float, default=None)
    p.add_argument("--max-tries", dest="max_tries", type=int, default=100_000)
    p.add_argument("--out", default="sequence.json")
    p.set_defaults(fn=cmd_synthesize)

    p = sub.add_parser("optimize-pulse")
    p.add_argument("--kind", required=True,
                   choices=["composite-pi", "composite-pi-half", "shaped-pi", "shaped-pi-half"])
    p.add_argument("--n-phases", dest="n_phases", type=int, default=10)
    p.add_argument("--seeds", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seed-from", dest="seed_from", default=None)
    p.add_argument("--box", default=None, help="delta_max,eps_max,threshold")
    p.add_argument("--out", default="pulse.json")
    p.set_defaults(fn=cmd_optimize_pulse)

    p = sub.add_parser("scan-pulse")
    p.add_argument("--pulse", required=True)
    p.add_argument("--target", default="pi")
    p.add_argument("--delta", default="-0.5:0.5:41")
    p.add_argument("--eps", default="-0.05:0.05:21")
    p.add_argument("--broadband", default="ideal")
    p.add_argument("--out", default="scan.csv")
    p.set_defaults(fn=cmd_scan_pulse)

    p = sub.add_parser("simulate")
    p.add_argument("--system", required=True)
    p.add_argument("--sequence", default=None)
    p.add_argument("--pulses", default="builtin")
    p.add_argument("--broadband", default="ideal")
    p.add_argument("--init", default="ideal")
    p.add_argument("--Tc", default="4pi")
    p.add_argument("--tau", default=None)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--scan", default=None)
    p.add_argument("--slices", type=int, default=1500)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("optimize-intervals")
    p.add_argument("--system", required=True)
    p.add_argument("--sequence", default=None)
    p.add_argument("--pulses", default="builtin")
    p.add_argument("--broadband", default="ideal")
    p.add_argument("--init", default="ideal")
    p.add_argument("--Tc", default="4pi")
    p.add_argument("--budget", type=int, default=4000)
    p.add_argument("--slices", type=int, default=1500)
    p.add_argument("--out", default="intervals.json")
    p.set_defaults(fn=cmd_optimize_intervals)

    p = sub.add_parser("study")
    p.add_argument("what", choices=["crosstalk", "triplet", "nuclei"])
    p.add_argument("--range", required=True, help="lo:hi:n")
    p.add_argument("--pulses", default="builtin")
    p.add_argument("--slices", type=int, default=1500)
    p.add_argument("--out", default="study.csv")
    p.set_defaults(fn=cmd_study)

    p = sub.add_parser("verify")
    p.add_argument("manifest")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FileNotFoundError, KeyError, json.JSONDecodeError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except Exception as exc:  # pragma: no cover
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
