"""Command-line front end: constellation generation, metrics, optimization,
Eb/N0 sweeps, and BER simulation, emitting plot-ready CSV/JSON.

Angles are accepted and reported in degrees; everything internal is radians.
Exit codes: 0 success, 2 usage error, 3 bad input data, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import __version__
from .channel import ber_monte_carlo
from .constellation import (
    Constellation,
    NuqamParams,
    load,
    make_nuqam,
    make_qam_product,
    normalize_energy,
    rotate,
    save,
    save_points_csv,
)
from .liegroup import load_rotation_csv, logm_rotation, rotation_at, save_rotation_csv, skew_family
from .metrics import ChannelSpec, compute_report, cutoff_rate
from .optimize import grid_search_t, optimize_nuqam, optimize_rotation_full


class InputDataError(Exception):
    pass


def _provenance(args) -> dict:
    return {
        "command": " ".join(sys.argv),
        "seed": getattr(args, "seed", None),
        "version": __version__,
    }


def _add_constellation_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--qam", type=int, metavar="M", help="per-2D modulation order")
    src.add_argument("--nuqam", metavar="A1,A2,...", help="non-uniform 2D levels")
    src.add_argument("--file", metavar="PATH", help="constellation JSON file")
    p.add_argument("--half-dims", type=int, default=1, help="number of 2D slots for --qam")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip normalization to average energy P = q")
    rot = p.add_mutually_exclusive_group()
    rot.add_argument("--rotate-csv", metavar="PATH", help="apply a rotation loaded from CSV")
    rot.add_argument("--rotate-t-deg", type=float, metavar="DEG",
                     help="apply the family rotation Q(t)")


def _build_constellation(args) -> Constellation:
    try:
        if args.qam is not None:
            x = make_qam_product(args.qam, args.half_dims)
        elif args.nuqam is not None:
            alpha = tuple(float(v) for v in args.nuqam.split(","))
            x = make_nuqam(NuqamParams(alpha))
        else:
            x = load(args.file)
    except (OSError, json.JSONDecodeError, ValueError) as e:
        raise InputDataError(str(e)) from e
    if not args.no_normalize:
        x = normalize_energy(x, float(x.q_bits))
    if args.rotate_csv:
        try:
            q = load_rotation_csv(args.rotate_csv)
        except (OSError, ValueError) as e:
            raise InputDataError(str(e)) from e
        x = rotate(x, q)
    elif args.rotate_t_deg is not None:
        k = x.n.bit_length() - 1
        if 2**k != x.n:
            raise InputDataError("family rotation needs a power-of-two dimension")
        x = rotate(x, rotation_at(skew_family(k), math.radians(args.rotate_t_deg)))
    return x


def _parse_radii(values) -> tuple[float, ...]:
    if not values:
        return (2.0, math.inf)
    out = []
    for v in values:
        out.append(math.inf if v.lower() in ("inf", "infinity") else float(v))
    return tuple(out)


def _parse_ebn0(arg: str) -> list[float]:
    return [float(v) for v in arg.split(",")]


def _out_stream(args):
    return open(args.out, "w", newline="") if args.out else sys.stdout


def cmd_gen(args) -> int:
    x = _build_constellation(args)
    if args.format == "csv":
        save_points_csv(x, args.out or sys.stdout)
    else:
        if args.out:
            save(x, args.out)
        else:
            json.dump({"n": x.n, "points": x.points.tolist(),
                       "labels": list(x.labels) if x.labels else None}, sys.stdout)
            print()
    return 0


def cmd_family(args) -> int:
    if not 1 <= args.k <= 12:
        raise InputDataError("k must be in 1..12")
    t = math.radians(args.t_deg) if args.t_deg is not None else args.t
    if t is None:
        raise InputDataError("provide --t (radians) or --t-deg")
    q = rotation_at(skew_family(args.k), t)
    if args.format == "json":
        doc = {
            "k": args.k,
            "t_rad": t,
            "t_deg": math.degrees(t),
            "matrix": q.entries.tolist(),
            "note": "the transpose convention of this 4D family is used by "
                    "DVB-NGH rotated constellations",
            "provenance": _provenance(args),
        }
        fh = _out_stream(args)
        json.dump(doc, fh, indent=2)
        if fh is not sys.stdout:
            fh.close()
        else:
            print()
    else:
        save_rotation_csv(q, args.out or sys.stdout)
    return 0


def cmd_metrics(args) -> int:
    x = _build_constellation(args)
    ch = ChannelSpec.from_ebn0_db(_parse_ebn0(args.ebn0_db)[0])
    report = compute_report(x, ch, radii=_parse_radii(args.radius))
    if args.format == "json":
        doc = report.to_jsonable()
        doc["provenance"] = _provenance(args)
        fh = _out_stream(args)
        json.dump(doc, fh, indent=2)
        if fh is not sys.stdout:
            fh.close()
        else:
            print()
    else:
        fh = _out_stream(args)
        w = csv.writer(fh)
        w.writerow(["radius", "local_cutoff_rate", "diversity_order",
                    "min_product_distance", "min_product_distance_norm"])
        for r in report.radii:
            w.writerow([r, f"{report.local_cutoff_rate[r]:.12g}", report.diversity[r],
                        f"{report.min_product[r]:.12g}",
                        f"{report.min_product_normalized[r]:.12g}"])
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_opt_rotation(args) -> int:
    x = _build_constellation(args)
    ch = ChannelSpec.from_ebn0_db(_parse_ebn0(args.ebn0_db)[0])
    if args.mode == "grid":
        res = grid_search_t(x, ch, grid_step=math.radians(args.grid_step_deg),
                            keep_profile=args.profile is not None)
        k = x.n.bit_length() - 1
        q = rotation_at(skew_family(k), res.t_opt)
        if args.profile:
            with open(args.profile, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t_deg", "R_bits"])
                for t, r in res.profile:
                    w.writerow([f"{math.degrees(t):.10g}", f"{r:.12g}"])
        summary = {"mode": "grid", "t_opt_deg": math.degrees(res.t_opt),
                   "R_bits": res.objective, "grid_step_deg": args.grid_step_deg,
                   "provenance": _provenance(args)}
    else:
        trace = optimize_rotation_full(x, ch)
        q = trace.final_rotation
        summary = {"mode": "manifold", "R_bits": -trace.final_objective,
                   "iterations": trace.iterates[-1][0], "converged": trace.converged,
                   "reason": trace.reason,
                   "log_rotation": logm_rotation(q).entries.tolist(),
                   "provenance": _provenance(args)}
    if args.out:
        save_rotation_csv(q, args.out)
    json.dump(summary, sys.stdout, indent=2)
    print()
    return 0


def cmd_opt_nuqam(args) -> int:
    ch = ChannelSpec.from_ebn0_db(_parse_ebn0(args.ebn0_db)[0])
    res = optimize_nuqam(args.q_bits, ch, restarts=args.restarts, seed=args.seed)
    doc = {"q_bits": args.q_bits, "alpha": list(res.alpha.alpha),
           "R_bits": res.objective, "iterations": res.iterations,
           "converged": res.converged, "provenance": _provenance(args)}
    fh = _out_stream(args)
    json.dump(doc, fh, indent=2)
    if fh is not sys.stdout:
        fh.close()
    else:
        print()
    return 0


def cmd_sweep(args) -> int:
    x = _build_constellation(args)
    compare_q = None
    if args.compare:
        try:
            compare_q = load_rotation_csv(args.compare)
        except (OSError, ValueError):
            print(f"warning: cannot load comparison rotation {args.compare}; "
                  "delta column omitted", file=sys.stderr)
    fh = _out_stream(args)
    w = csv.writer(fh)
    header = ["ebn0_db", "t_opt_deg", "R_bits"]
    if compare_q is not None:
        header.append("delta_R_bits")
    w.writerow(header)
    for db in _parse_ebn0(args.ebn0_db):
        ch = ChannelSpec.from_ebn0_db(db)
        res = grid_search_t(x, ch, grid_step=math.radians(args.grid_step_deg))
        row = [db, f"{math.degrees(res.t_opt):.6f}", f"{res.objective:.12g}"]
        if compare_q is not None:
            row.append(f"{res.objective - cutoff_rate(rotate(x, compare_q), ch):.12g}")
        w.writerow(row)
    if fh is not sys.stdout:
        fh.close()
    return 0


def cmd_ber(args) -> int:
    x = _build_constellation(args)
    specs = [ChannelSpec.from_ebn0_db(db) for db in _parse_ebn0(args.ebn0_db)]
    report = ber_monte_carlo(x, specs, min_bits=args.min_bits, seed=args.seed)
    report.to_csv(args.out or sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rotcon", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, constellation=True, ebn0=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", metavar="PATH")
        sp.add_argument("--format", choices=["csv", "json"], default="csv")
        if constellation:
            _add_constellation_args(sp)
        if ebn0:
            sp.add_argument("--ebn0-db", required=True,
                            help="comma-separated Eb/N0 values in dB")
        sp.set_defaults()
        return sp

    sp = common(sub.add_parser("gen", help="generate a constellation"), ebn0=False)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("family", help="emit the family rotation Q(t)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", metavar="PATH")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("-k", type=int, required=True, help="dimension exponent, n = 2^k")
    sp.add_argument("--t", type=float, help="parameter in radians")
    sp.add_argument("--t-deg", type=float, help="parameter in degrees")
    sp.set_defaults(func=cmd_family)

    sp = common(sub.add_parser("metrics", help="rate/diversity/distance report"))
    sp.add_argument("--radius", action="append", metavar="R",
                    help="ball radius (repeatable; 'inf' allowed); default 2 and inf")
    sp.set_defaults(func=cmd_metrics)

    sp = common(sub.add_parser("opt-rotation", help="optimize the rotation"))
    sp.add_argument("--mode", choices=["grid", "manifold"], default="grid")
    sp.add_argument("--grid-step-deg", type=float, default=0.0572958,
                    help="grid resolution in degrees (default ~0.001 rad)")
    sp.add_argument("--profile", metavar="PATH", help="write the (t, R) profile CSV")
    sp.set_defaults(func=cmd_opt_rotation)

    sp = sub.add_parser("opt-nuqam", help="optimize non-uniformity parameters")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", metavar="PATH")
    sp.add_argument("--format", choices=["csv", "json"], default="json")
    sp.add_argument("--q-bits", type=int, required=True, choices=[4, 6, 8, 10])
    sp.add_argument("--ebn0-db", required=True)
    sp.add_argument("--restarts", type=int, default=0)
    sp.set_defaults(func=cmd_opt_nuqam)

    sp = common(sub.add_parser("sweep", help="t_opt and R across Eb/N0 values"))
    sp.add_argument("--grid-step-deg", type=float, default=0.0572958)
    sp.add_argument("--compare", metavar="CSV", help="rotation to compare against")
    sp.set_defaults(func=cmd_sweep)

    sp = common(sub.add_parser("ber", help="Monte Carlo bit error rate"))
    sp.add_argument("--min-bits", type=int, default=10**6)
    sp.set_defaults(func=cmd_ber)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
