"""Command line surface for the subshift analyses.

Four subcommands drive the library: ``lang`` (complexity and
repulsiveness tables), ``lipschitz`` (order diagnostics over a depth
schedule), ``zeta`` (partial sums and abscissa brackets) and
``laplacian`` (operator assembly, invariant checks and spectra).  Series
go to CSV or JSON per --format; verdict reports are always JSON and embed
the configuration, the edge-length convention tag and the library
version, so a report is reproducible from its own header.  Outputs are
byte-identical across runs for a fixed configuration and seed.

Exit codes: 0 success, 2 invalid configuration, 3 internal invariant
violation.
"""

import argparse
import csv
import json
import math
import os
import random
import sys
from fractions import Fraction

from . import EDGE_LENGTH_CONVENTION, __version__
from .words import (ExplicitWindow, FullShift, SturmianCF, Substitution,
                    complexity_profile, language_table,
                    repetitivity_estimate, repulsiveness_estimates,
                    right_special_words)
from .tree import StructuralError, build_tree
from .metrics import (DeltaSequence, continuity_witness,
                      continuity_witness_fast, delta_from_name,
                      lipschitz_estimate, lipschitz_estimate_fast,
                      trend_verdict)
from .zeta import abscissa_estimate, exponent_estimates, zeta_partials
from .laplacian import (InvariantViolationError, assemble_laplacian,
                        assemble_laplacian_dirichlet, assemble_pb_laplacian,
                        check_invariants, cylinder_measure,
                        matrix_difference, spectrum)


class ConfigError(ValueError):
    """The command line describes an invalid configuration."""


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_spec(text):
    """Subshift descriptor: full:K, sturmian:cf=..., window:WORD, or
    subst:a=ab,b=a,seed=a.

    Sturmian coefficient lists accept integers plus a final "...", meaning
    repeat the last value, or "linear" / "pow2" tail rules; a bare finite
    list also continues with its last value so that e.g. cf=1 is the all-
    ones expansion.
    """
    kind, _, rest = text.partition(":")
    try:
        if kind == "full":
            return FullShift(int(rest))
        if kind == "sturmian":
            if not rest.startswith("cf="):
                raise ConfigError("sturmian spec needs cf=...")
            tokens = rest[3:].split(",")
            if tokens[-1] in ("...", "linear", "pow2"):
                tail_token, tokens = tokens[-1], tokens[:-1]
            else:
                tail_token = "..."
            mu = tuple(int(t) for t in tokens)
            if tail_token == "linear":
                tail = ("linear",)
            elif tail_token == "pow2":
                tail = ("pow2",)
            else:
                if not mu:
                    raise ConfigError("cf list needs at least one value")
                tail = ("constant", mu[-1])
            return SturmianCF(mu=mu, tail=tail)
        if kind == "window":
            if not rest:
                raise ConfigError("window spec needs a word")
            return ExplicitWindow(rest)
        if kind == "subst":
            rules, seed = [], None
            for part in rest.split(","):
                key, _, val = part.partition("=")
                if key == "seed":
                    seed = val
                else:
                    rules.append((key, val))
            if seed is None:
                seed = rules[0][0]
            return Substitution.from_rules(dict(rules), seed)
    except (ValueError, KeyError) as exc:
        raise ConfigError("bad spec %r: %s" % (text, exc))
    raise ConfigError("unknown spec kind %r" % kind)


def parse_delta(text):
    """Delta family: exp, harmonic, powerlog:a,b, geom:q, or table:FILE
    (one positive value per line, strictly decreasing)."""
    if text.startswith("table:"):
        path = text.split(":", 1)[1]
        try:
            with open(path) as fh:
                values = [float(line) for line in fh if line.strip()]
        except OSError as exc:
            raise ConfigError("cannot read delta table: %s" % exc)
        return DeltaSequence.table(values)
    try:
        return delta_from_name(text)
    except ValueError as exc:
        raise ConfigError(str(exc))


def parse_schedule(text, depth):
    if text is None:
        pts = sorted({max(2, depth // 8), max(2, depth // 4),
                      max(2, depth // 2), depth})
        return tuple(pts)
    try:
        pts = tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise ConfigError("bad schedule: %s" % exc)
    if any(b <= a for a, b in zip(pts, pts[1:])) or pts[-1] > depth:
        raise ConfigError("schedule must increase and stay within --depth")
    return pts


def parse_weight(text):
    """A probability entry from a measure file: fraction string or float."""
    if isinstance(text, str) and "/" in text:
        return Fraction(text)
    return Fraction(text) if isinstance(text, int) else float(text)


def load_measure_weights(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("cannot read measure file: %s" % exc)
    return {node: [parse_weight(p) for p in probs]
            for node, probs in raw.items()}


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _jsonsafe(value):
    """Strict-JSON encoding: non-finite floats become strings."""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _jsonsafe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonsafe(v) for v in value]
    return value


def write_series(path_base, fmt, header, rows):
    """A table of rows either as CSV or as a JSON list of objects."""
    if fmt == "csv":
        path = path_base + ".csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(x) for x in row])
    else:
        path = path_base + ".json"
        data = [dict(zip(header, row)) for row in rows]
        with open(path, "w") as fh:
            json.dump(_jsonsafe(data), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return path


def write_report(path, config, body):
    payload = {"config": config,
               "edge_length_convention": EDGE_LENGTH_CONVENTION,
               "version": __version__}
    payload.update(body)
    with open(path, "w") as fh:
        json.dump(_jsonsafe(payload), fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def config_dict(args, keys):
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


# ---------------------------------------------------------------------------
# subcommands


def cmd_lang(args):
    spec = parse_spec(args.spec)
    table = language_table(spec, args.depth)
    P, g = complexity_profile(table)
    rows = [(n, P[n], g[n] if n < len(g) else "",
             len(right_special_words(table, n)) if n < table.depth else "")
            for n in range(table.depth + 1)]
    series = write_series(os.path.join(args.out, "language"), args.format,
                          ("n", "P", "g", "right_special"), rows)
    l_hat, l_hat_r, witnesses = repulsiveness_estimates(table)
    repet = {}
    for n in range(1, min(4, table.depth) + 1):
        repet[str(n)] = repetitivity_estimate(table, n)
    body = {
        "repulsiveness": {
            "l_hat": None if math.isinf(l_hat) else l_hat,
            "l_hat_R": None if math.isinf(l_hat_r) else l_hat_r,
            "witnesses": {k: list(v) if v else None
                          for k, v in witnesses.items()},
        },
        "repetitivity": repet,
        "stabilized": table.stabilized,
    }
    report = write_report(os.path.join(args.out, "language_report.json"),
                          config_dict(args, ("spec", "depth", "format")),
                          body)
    return [series, report]


def _diagnostics_for(spec, delta, N):
    if isinstance(spec, (FullShift, SturmianCF)):
        return (lipschitz_estimate_fast(spec, delta, N),
                continuity_witness_fast(spec, delta, N))
    tree = build_tree(language_table(spec, N))
    return lipschitz_estimate(tree, delta, N), continuity_witness(tree,
                                                                  delta, N)


def cmd_lipschitz(args):
    spec = parse_spec(args.spec)
    delta = parse_delta(args.delta)
    schedule = parse_schedule(args.schedule, args.depth)
    rows, c_series, w_series, k_series = [], [], [], []
    for N in schedule:
        c, w = _diagnostics_for(spec, delta, N)
        k = 1.0 + 2.0 * c.value
        c_series.append(c.value)
        w_series.append(w.value)
        k_series.append(k)
        rows.append((N, c.value, w.value, k, c.witness_node, w.witness_path))
    series = write_series(os.path.join(args.out, "lipschitz"), args.format,
                          ("N", "C", "W", "K", "C_witness", "W_witness"),
                          rows)
    tail = delta.tail_bound(schedule[-1])
    body = {
        "bounded_trend": {
            "C": trend_verdict(c_series),
            "W": trend_verdict(w_series),
            "K": trend_verdict(k_series),
        },
        "thresholds": {"flat": 0.01, "grow": 0.25},
        "schedule": list(schedule),
        "delta_tail_bound": tail,
    }
    report = write_report(os.path.join(args.out, "lipschitz_report.json"),
                          config_dict(args, ("spec", "delta", "depth",
                                             "schedule", "format")), body)
    return [series, report]


def cmd_zeta(args):
    spec = parse_spec(args.spec)
    delta = parse_delta(args.delta)
    schedule = parse_schedule(args.schedule, args.depth)
    lo, hi, step = args.s_min, args.s_max, args.s_step
    count = int(round((hi - lo) / step))
    s_grid = [lo + i * step for i in range(count + 1)]
    partials = zeta_partials(spec, delta, s_grid, schedule)
    rows = []
    for variant in ("full", "low", "pb"):
        for s, row in zip(partials.s_grid, partials.partials[variant]):
            for N, val in zip(schedule, row):
                rows.append((variant, s, N, val))
    series = write_series(os.path.join(args.out, "zeta_partials"),
                          args.format, ("variant", "s", "N", "partial"),
                          rows)
    body = {"abscissa": {}, "schedule": list(schedule)}
    if len(schedule) >= 3:
        for variant, rep in abscissa_estimate(partials).items():
            body["abscissa"][variant] = {
                "bracket": list(rep.bracket),
                "estimate": rep.estimate,
                "applicable": rep.applicable,
            }
    profile = partials.profile
    try:
        exps = exponent_estimates(profile.P, profile.g, schedule[-1])
        body["exponents"] = {
            "beta": [exps.beta_lower, exps.beta_upper],
            "eta": [exps.eta_lower, exps.eta_upper],
            "super_polynomial": exps.super_polynomial,
            "window": list(exps.window),
            "tolerance": exps.tolerance,
        }
    except ValueError:
        body["exponents"] = None
    report = write_report(os.path.join(args.out, "zeta_report.json"),
                          config_dict(args, ("spec", "delta", "depth",
                                             "schedule", "s_min", "s_max",
                                             "s_step", "format")), body)
    return [series, report]


def cmd_laplacian(args):
    spec = parse_spec(args.spec)
    delta = parse_delta(args.delta)
    tree = build_tree(language_table(spec, args.depth))
    if args.measure == "uniform":
        mu = cylinder_measure(tree)
    elif args.measure == "random":
        mu = cylinder_measure(tree, weights="random", seed=args.seed)
    elif args.measure.startswith("file:"):
        weights = load_measure_weights(args.measure.split(":", 1)[1])
        mu = cylinder_measure(tree, weights=weights)
    else:
        raise ConfigError("unknown measure %r" % args.measure)
    rho = args.rho if not float(args.rho).is_integer() else int(args.rho)
    lap = assemble_laplacian(tree, mu, rho, delta)
    oracle = assemble_laplacian_dirichlet(tree, mu, rho, delta)
    checks = check_invariants(lap)
    checks["route_difference"] = matrix_difference(lap, oracle)
    eigenvalues = spectrum(lap)

    mat = lap.matrix
    triplets = [(i, j, mat[i, j]) for i in range(mat.shape[0])
                for j in range(mat.shape[1]) if mat[i, j] != 0.0]
    files = [write_series(os.path.join(args.out, "laplacian_matrix"),
                          args.format, ("i", "j", "value"), triplets)]
    with open(os.path.join(args.out, "index_map.json"), "w") as fh:
        json.dump({str(i): w for i, w in enumerate(lap.leaves)}, fh,
                  sort_keys=True, indent=2)
        fh.write("\n")
    files.append(os.path.join(args.out, "index_map.json"))
    files.append(write_series(os.path.join(args.out, "spectrum"),
                              args.format, ("rank", "eigenvalue"),
                              list(enumerate(float(v)
                                             for v in eigenvalues))))
    body = {"invariants": checks, "size": len(lap.leaves)}
    if args.pb:
        pb = assemble_pb_laplacian(tree, mu, rho, delta,
                                   pair_selection=args.pb)
        body["pb"] = {
            "pair_selection": args.pb,
            "max_abs_difference_from_full": matrix_difference(lap, pb),
        }
    report = write_report(os.path.join(args.out, "laplacian_report.json"),
                          config_dict(args, ("spec", "delta", "depth",
                                             "seed", "rho", "measure", "pb",
                                             "format")), body)
    files.append(report)
    return files


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ultratree",
        description="Subshift tree, distance, zeta and Laplacian analyses")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True,
                        help="full:K | sturmian:cf=... | window:WORD | "
                             "subst:a=ab,b=a,seed=a")
    common.add_argument("--depth", type=int, required=True)
    common.add_argument("--out", default=".")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)

    withdelta = argparse.ArgumentParser(add_help=False)
    withdelta.add_argument("--delta", default="exp",
                           help="exp | harmonic | powerlog:a,b | geom:q | "
                                "table:FILE")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("lang", parents=[common]).set_defaults(run=cmd_lang)

    lip = sub.add_parser("lipschitz", parents=[common, withdelta])
    lip.add_argument("--schedule", help="comma list of depths")
    lip.set_defaults(run=cmd_lipschitz)

    zet = sub.add_parser("zeta", parents=[common, withdelta])
    zet.add_argument("--schedule", help="comma list of truncation depths")
    zet.add_argument("--s-min", type=float, default=0.2)
    zet.add_argument("--s-max", type=float, default=3.0)
    zet.add_argument("--s-step", type=float, default=0.05)
    zet.set_defaults(run=cmd_zeta)

    lap = sub.add_parser("laplacian", parents=[common, withdelta])
    lap.add_argument("--rho", type=float, default=2.0,
                     help="density exponent: rho(delta) = delta^s")
    lap.add_argument("--measure", default="uniform",
                     help="uniform | random | file:PATH")
    lap.add_argument("--pb", nargs="?", const="single",
                     choices=("single", "nu-average"),
                     help="also assemble the restricted-pair variant")
    lap.set_defaults(run=cmd_laplacian)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.depth < 1:
        parser.exit(2, "depth must be >= 1\n")
    try:
        os.makedirs(args.out, exist_ok=True)
        files = args.run(args)
    except (ConfigError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (InvariantViolationError, StructuralError) as exc:
        print("invariant violation: %s" % exc, file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
