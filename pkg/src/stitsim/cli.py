"""Command-line front end: ``stitsim simulate | verify | plotdata | table``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import inspect
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .geometry import box
from .measure import ConfigurationError, HyperplaneMeasure, axis_parallel, make_directional
from .runner import THREADS_ENV, thread_count
from .stats import ht_weights, interior_mask

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    dimension: int = 2
    lower: tuple = (0.0, 0.0)
    upper: tuple = (20.0, 20.0)
    t: float = 1.0
    directional: dict = field(default_factory=lambda: {"kind": "isotropic"})
    seed: int = 20240607
    replications: int = 1
    threads: int = 1
    output: str = "stitsim-out"

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        known = {"dimension", "window", "t", "directional", "seed", "replications", "threads",
                 "output"}
        extra = set(raw) - known
        if extra:
            raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
        d = raw.get("dimension", 2)
        if d not in (2, 3):
            raise ConfigurationError("dimension must be 2 or 3")
        lo, hi = _window_corners(raw.get("window", [0.0, 20.0 if d == 2 else 10.0]), d)
        cfg = cls(
            dimension=d, lower=lo, upper=hi,
            t=_number(raw.get("t", 1.0), "t"),
            directional=raw.get("directional", {"kind": "isotropic"}),
            seed=_integer(raw.get("seed", 20240607), "seed", minimum=0),
            replications=_integer(raw.get("replications", 1), "replications", minimum=1),
            threads=_integer(raw.get("threads", 1), "threads", minimum=1),
            output=str(raw.get("output", "stitsim-out")),
        )
        if cfg.t < 0.0:
            raise ConfigurationError("t must be non-negative")
        cfg.measure()  # validates the directional law (spanning condition)
        return cfg

    def window(self):
        return box(self.lower, self.upper)

    def measure(self) -> HyperplaneMeasure:
        desc = self.directional
        if desc in ("axis-parallel", "axis_parallel"):
            return HyperplaneMeasure(axis_parallel(self.dimension))
        if desc == "isotropic":
            desc = {"kind": "isotropic"}
        if not isinstance(desc, dict):
            raise ConfigurationError("directional must be an object or a known name")
        return HyperplaneMeasure(make_directional(desc, self.dimension))


def _number(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigurationError(f"{name} must be a finite number")
    return float(v)


def _integer(v, name, minimum):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigurationError(f"{name} must be an integer >= {minimum}")
    return v


def _window_corners(w, d):
    # [lo, hi] with scalars means the cube [lo, hi]^d
    if not isinstance(w, (list, tuple)) or len(w) != 2:
        raise ConfigurationError("window must be [lower, upper]")
    lo, hi = w
    if not isinstance(lo, (list, tuple)):
        lo = [lo] * d
    if not isinstance(hi, (list, tuple)):
        hi = [hi] * d
    if len(lo) != d or len(hi) != d:
        raise ConfigurationError("window corners must match the dimension")
    lo = tuple(_number(x, "window") for x in lo)
    hi = tuple(_number(x, "window") for x in hi)
    if any(b <= a for a, b in zip(lo, hi)):
        raise ConfigurationError("window upper corner must exceed the lower corner")
    return lo, hi


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(raw)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "reps", None) is not None:
        if args.reps < 1:
            raise ConfigurationError("--reps must be at least 1")
        cfg.replications = args.reps
    if getattr(args, "out", None) is not None:
        cfg.output = args.out
    return cfg


# ---------------------------------------------------------------------------
# simulate

def _edge_weights(objects, window):
    # Horvitz-Thompson weight for interior objects, 0 for clipped ones
    if not objects:
        return []
    w = ht_weights(objects, window)
    return np.where(interior_mask(objects, window) & np.isfinite(w), w, 0.0).tolist()


def _simulate_rep(rng, model, window, measure, t, emit):
    if model == "stit":
        from .mnw import build_stit

        Y = build_stit(window, measure, t, rng)
        objs = Y.facets
        facets = [(rec.birth_time, rec.facet.measure) for rec in objs]
    else:
        from .pht import build_pht, extract_faces

        Y = build_pht(window, measure, t, rng)
        objs = extract_faces(Y, window.dim - 1) if Y.hyperplanes else []
        facets = [(None, f.measure) for f in objs]
    facets = [(b, m, w) for (b, m), w in zip(facets, _edge_weights(objs, window))]
    cells = [c.volume for c in Y.cells]
    doc = json.dumps(Y.to_json(), sort_keys=True) if emit else None
    return facets, cells, doc


def cmd_simulate(cfg: RunConfig, model: str, emit: bool = False, stream=None) -> int:
    from .runner import run_replications

    stream = stream or sys.stdout
    window, measure = cfg.window(), cfg.measure()
    res = run_replications(_simulate_rep, cfg.replications, cfg.seed,
                           (model, window, measure, cfg.t, emit), cfg.threads)
    os.makedirs(cfg.output, exist_ok=True)
    fpath = os.path.join(cfg.output, f"{model}_facets.csv")
    cpath = os.path.join(cfg.output, f"{model}_cells.csv")
    with open(fpath, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replication", "birth_time", "measure", "dimension", "weight"])
        for r, (facets, _, _) in enumerate(res):
            for b, m, wt in facets:
                w.writerow([r, "" if b is None else repr(b), repr(m), cfg.dimension - 1,
                            repr(wt)])
    with open(cpath, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["replication", "volume"])
        for r, (_, cells, _) in enumerate(res):
            for v in cells:
                w.writerow([r, repr(v)])
    if emit:
        for r, (_, _, doc) in enumerate(res):
            with open(os.path.join(cfg.output, f"{model}_{r:05d}.json"), "w",
                      encoding="utf-8") as fh:
                fh.write(doc)
    n_cells = np.array([len(c) for _, c, _ in res], dtype=float)
    n_facets = np.array([len(f) for f, _, _ in res], dtype=float)
    print(f"model={model} d={cfg.dimension} t={cfg.t:g} replications={cfg.replications} "
          f"seed={cfg.seed}", file=stream)
    print(f"cells per replication: {n_cells.mean():.6g}", file=stream)
    print(f"facets per replication: {n_facets.mean():.6g}", file=stream)
    print(f"wrote {fpath} and {cpath}", file=stream)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

VERIFY_SUITES = ("all", "meq", "fkeq", "mixture", "lengths", "stability", "generator",
                 "birthtime", "incidence", "geometry", "analytic")


def suite_checks(name: str, dimension: int = 2):
    from . import suites

    if name not in VERIFY_SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(VERIFY_SUITES)}")
    if name == "lengths":
        if dimension == 3:
            return [suites.check_segment_moments_3d]
        return [suites.check_isegment_mean, suites.check_isegment_law]
    return list(suites.SUITES[name])


def _call_check(fn, seed, reps, threads):
    params = inspect.signature(fn).parameters
    kw = {}
    if "seed" in params:
        kw["seed"] = seed
    if "threads" in params:
        kw["threads"] = threads
    if reps is not None and "reps" in params:
        kw["reps"] = reps
    return fn(**kw)


def cmd_verify(cfg: RunConfig, suite: str, reps=None, stream=None) -> int:
    stream = stream or sys.stdout
    checks = suite_checks(suite, cfg.dimension)
    verdicts = []
    for fn in checks:
        v = _call_check(fn, cfg.seed, reps, cfg.threads)
        verdicts.append(v)
        print(v.report(), file=stream, flush=True)
    os.makedirs(cfg.output, exist_ok=True)
    path = os.path.join(cfg.output, f"verdicts_{suite}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([v.to_json() for v in verdicts], fh, indent=1, sort_keys=True)
    ok = all(v.passed for v in verdicts)
    print(f"{sum(v.passed for v in verdicts)}/{len(verdicts)} verdicts pass; wrote {path}",
          file=stream)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# plot data

OVERLAYS = {"p2": ("measure", 2), "p3": ("measure", 3),
            "birth2": ("birth_time", 2), "birth3": ("birth_time", 3)}


def _theory(overlay, t, x):
    _, d = OVERLAYS[overlay]
    if overlay.startswith("p"):
        return analytic.isegment_density(d, t, x) if x > 0.0 else 0.0
    return analytic.birth_time_density(d, t, x)


def cmd_plotdata(path, overlay, t=1.0, bins=50, out=None, stream=None, err=None) -> int:
    """Binned empirical density next to the analytic density, as ``x,empirical,theory``.

    A ``weight`` column, as written by ``simulate``, is used as histogram
    weights so clipped objects drop out and the rest are edge-corrected.
    """
    err = err or sys.stderr
    if overlay not in OVERLAYS:
        raise UsageError(f"unknown overlay {overlay!r}; choose from {', '.join(OVERLAYS)}")
    column, d = OVERLAYS[overlay]
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        if column not in fields:
            raise UsageError(f"input has no {column!r} column (found {fields})")
        values, weights = [], []
        weighted = "weight" in fields
        for row in reader:
            if "dimension" in row and overlay.startswith("p") and row["dimension"] not in ("", "1"):
                continue
            raw = row[column]
            if raw == "":
                continue
            try:
                values.append(float(raw))
                weights.append(float(row["weight"]) if weighted else 1.0)
            except ValueError:
                raise UsageError(f"non-numeric value in row {row}") from None
    rows = []
    wts = np.asarray(weights)
    if not values or not wts.sum() > 0.0:
        print("warning: input has no data rows; writing header only", file=err)
    else:
        x = np.asarray(values)
        hi = t if overlay.startswith("birth") else float(np.quantile(x[wts > 0], 0.99))
        edges = np.linspace(0.0, hi, bins + 1)
        counts, _ = np.histogram(x, bins=edges, weights=wts)
        dens = counts / (wts.sum() * np.diff(edges))
        for a, b, e in zip(edges[:-1], edges[1:], dens):
            c = 0.5 * (a + b)
            rows.append((c, float(e), _theory(overlay, t, c)))
    fh = open(out, "w", newline="", encoding="utf-8") if out else (stream or sys.stdout)
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "empirical", "theory"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
    finally:
        if out:
            fh.close()
    return EXIT_OK


def cmd_table(d, t, points=25, stream=None) -> int:
    """Log-spaced table of the I-segment density and distribution function."""
    stream = stream or sys.stdout
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["x", "density", "cdf"])
    for x in np.geomspace(1e-2 / t, 1e2 / t, points):
        w.writerow([f"{x:.6g}", f"{analytic.isegment_density(d, t, x):.10g}",
                    f"{analytic.isegment_cdf(d, t, x):.10g}"])
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stitsim",
                                description="Simulate and verify STIT and Poisson hyperplane "
                                            "tessellations.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="RunConfig JSON file")
        sp.add_argument("--seed", type=int, help="master seed (overrides the config)")
        sp.add_argument("--reps", type=int, help="replications (overrides the config)")
        sp.add_argument("--out", help="output directory (overrides the config)")

    sp = sub.add_parser("simulate", help="simulate tessellations and write CSV summaries")
    common(sp)
    sp.add_argument("--model", choices=("stit", "pht"), default="stit")
    sp.add_argument("--emit-tessellations", action="store_true",
                    help="also write one JSON file per replication")

    sp = sub.add_parser("verify", help="run statistical verification suites")
    common(sp)
    sp.add_argument("--suite", default="all")

    sp = sub.add_parser("plotdata", help="binned empirical density with an analytic overlay")
    sp.add_argument("input")
    sp.add_argument("--overlay", default="p2", help=", ".join(OVERLAYS))
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--bins", type=int, default=50)
    sp.add_argument("--out", help="output CSV (default: standard output)")

    sp = sub.add_parser("table", help="print the I-segment length density and CDF")
    sp.add_argument("--dim", type=int, choices=(2, 3), default=2)
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--points", type=int, default=25)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "plotdata":
            if args.bins < 1 or not args.t > 0.0:
                raise UsageError("--bins must be positive and --t positive")
            return cmd_plotdata(args.input, args.overlay, args.t, args.bins, args.out)
        if args.command == "table":
            if not args.t > 0.0 or args.points < 1:
                raise UsageError("--t and --points must be positive")
            return cmd_table(args.dim, args.t, args.points)
        cfg = _apply_overrides(load_config(args.config), args)
        os.environ.setdefault(THREADS_ENV, str(cfg.threads))
        thread_count(cfg.threads)
        if args.command == "simulate":
            return cmd_simulate(cfg, args.model, args.emit_tessellations)
        return cmd_verify(cfg, args.suite, args.reps)
    except (UsageError, ConfigurationError, ValueError) as exc:
        print(f"stitsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"stitsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
