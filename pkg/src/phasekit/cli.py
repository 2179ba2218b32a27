"""Command-line interface.

Subcommands cover the whole workflow: forward computation of survival
parameters (``direct``), event simulation (``simulate``), trace fitting
(``fit``), rate recovery (``invert``), variant enumeration
(``variants``), the marker discrimination experiment (``experiment``),
generator checking (``validate``), and the end-to-end
simulate-fit-variants ``pipeline``.

Every JSON artifact embeds a run manifest (tool version, argv, seeds,
input checksums, wall time) and is checked against the schemas shipped
with the package before being written.  Exit codes: 0 success, 2 domain
or input errors, 3 no solution found.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib import resources

import numpy as np
import jsonschema

from . import __version__
from . import direct, inverse, models, rashomon, stochastic
from .errors import (
    GenericBranchMiss,
    M3HypersurfaceMiss,
    NegativeDiscriminant,
    NoBranchMatches,
    PhasekitError,
    ZeroPivot,
)

_NO_SOLUTION_ERRORS = (
    NoBranchMatches,
    GenericBranchMiss,
    NegativeDiscriminant,
    M3HypersurfaceMiss,
    ZeroPivot,
)


def _round17(obj):
    """Normalize every float in a JSON tree to 17 significant digits."""
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.17g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_round17(v) for v in obj.tolist()]
    return obj


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class _Manifest:
    """Collects provenance while a command runs."""

    def __init__(self, argv: list[str]):
        self.argv = argv
        self.t0 = time.monotonic()
        self.seeds: dict[str, int] = {}
        self.checksums: dict[str, str] = {}

    def note_seed(self, name: str, value: int) -> None:
        self.seeds[name] = int(value)

    def note_input(self, path: str) -> None:
        self.checksums[path] = _sha256(path)

    def as_dict(self) -> dict:
        return {
            "tool_version": __version__,
            "command_line": list(self.argv),
            "seeds": self.seeds,
            "input_checksums": self.checksums,
            "wall_time_s": time.monotonic() - self.t0,
        }


def _load_schema(name: str) -> dict:
    text = (
        resources.files("phasekit") / "schemas" / name
    ).read_text()
    return json.loads(text)


def _emit_json(payload: dict, schema_name: str, manifest: _Manifest,
               out: str | None) -> None:
    payload = dict(payload)
    payload["manifest"] = manifest.as_dict()
    payload = _round17(payload)
    jsonschema.validate(payload, _load_schema(schema_name))
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError as exc:
        raise PhasekitError(f"cannot parse number list {text!r}") from exc


def _params_from_args(args) -> direct.PhaseTypeParams:
    if getattr(args, "moments", None):
        raise PhasekitError("this command needs --lambda and --A")
    lam = _parse_floats(args.lam)
    amps = _parse_floats(args.A)
    if amps.size == lam.size - 1:
        amps = np.concatenate([amps, [1.0 - amps.sum()]])
    return direct.PhaseTypeParams(lam=tuple(lam), A=tuple(amps))


def _moments_from_args(args) -> direct.SymmetricMoments:
    if getattr(args, "moments", None):
        vals = _parse_floats(args.moments)
        if vals.size != 5:
            raise PhasekitError("--moments expects L1,L2,L3,S1,S2")
        return direct.SymmetricMoments(L=tuple(vals[:3]), S=tuple(vals[3:]))
    return inverse.symmetric_inputs(_params_from_args(args))


def _solution_dict(sol: inverse.InverseSolution) -> dict:
    return {
        "model": str(sol.model),
        "rates": list(np.asarray(sol.rates, dtype=float)),
        "branch": sol.branch,
        "residual": float(sol.residual),
        "all_positive": bool(sol.all_positive),
        "free_params": [[name, float(val)] for name, val in sol.free_params],
    }


def _cmd_direct(args, manifest: _Manifest) -> int:
    model = models.model_from_string(args.model)
    rates = _parse_floats(args.rates)
    gen = models.build_generator(model, rates)
    p = direct.phase_type_params(gen)
    m = direct.moments(p)
    payload = {
        "model": str(model),
        "rates": list(rates),
        "lam": list(p.lam),
        "A": list(p.A),
        "moments": {"L": list(m.L), "S": list(m.S)},
    }
    _emit_json(payload, "phase_type_params.schema.json", manifest, args.out)
    if args.survival_csv:
        ts = np.linspace(0.0, args.t_max, args.t_points)
        vals = direct.survival(p, ts)
        with open(args.survival_csv, "w") as fh:
            fh.write("t,survival\n")
            for t, s in zip(ts, vals):
                fh.write(f"{t:.17g},{s:.17g}\n")
    return 0


def _cmd_simulate(args, manifest: _Manifest) -> int:
    model = models.model_from_string(args.model)
    rates = _parse_floats(args.rates)
    gen = models.build_generator(model, rates)
    manifest.note_seed("simulate", args.seed)
    trace = stochastic.simulate_events(gen, args.n, args.seed)
    stochastic.write_trace_csv(trace, args.out)
    with open(args.out + ".manifest.json", "w") as fh:
        json.dump(_round17(manifest.as_dict()), fh, indent=2)
        fh.write("\n")
    return 0


def _cmd_fit(args, manifest: _Manifest) -> int:
    manifest.note_input(args.trace)
    trace = stochastic.read_trace_csv(args.trace)
    config = stochastic.FitConfig(restarts=args.restarts, seed=args.seed)
    manifest.note_seed("fit", args.seed)
    result = stochastic.fit_multiexp(trace, args.components, config)
    payload = {
        "lam": list(result.params.lam),
        "A": list(result.params.A),
        "log_likelihood": result.log_likelihood,
        "converged": result.converged,
        "n_restarts_used": result.n_restarts_used,
        "n_gaps": len(trace),
    }
    _emit_json(payload, "fit_result.schema.json", manifest, args.out)
    return 0


def _cmd_invert(args, manifest: _Manifest) -> int:
    model = models.model_from_string(args.model)
    if model.tag == "chain":
        p = _params_from_args(args)
        sols = [inverse.invert_unbranched(model.n, p)]
    else:
        m = _moments_from_args(args)
        k3_grid = tuple(_parse_floats(args.k3_grid)) if args.k3_grid else None
        if args.thomas:
            sols = inverse.invert_thomas(model, m)
        else:
            kwargs = {}
            if k3_grid:
                kwargs["k3_grid"] = k3_grid
            sols = inverse.invert_generic(model, m, **kwargs)
        payload_m = {"L": list(m.L), "S": list(m.S)}
    payload = {
        "model": str(model),
        "solutions": [_solution_dict(s) for s in sols],
    }
    if model.tag != "chain":
        payload["moments"] = payload_m
    _emit_json(payload, "solutions.schema.json", manifest, args.out)
    return 0


def _variant_payload(report: rashomon.VariantReport) -> dict:
    instances = []
    for inst in report.instances:
        entry = {
            "model": str(inst.solution.model),
            "rates": list(np.asarray(inst.solution.rates, dtype=float)),
            "branch": inst.solution.branch,
            "valid": bool(inst.valid),
            "markers": None,
        }
        if inst.markers is not None:
            entry["markers"] = {
                "T": list(inst.markers.T),
                "p": list(inst.markers.p),
            }
        instances.append(entry)
    return {
        "instances": instances,
        "deltas": dict(report.deltas),
        "constraint_spreads": dict(report.constraint_spreads),
        "diagnostics": dict(report.diagnostics),
    }


def _cmd_variants(args, manifest: _Manifest) -> int:
    if args.moments:
        m = _moments_from_args(args)
        lam = np.roots([1.0, -m.L[0], m.L[1], -m.L[2]])
        if np.any(np.abs(lam.imag) > 1e-9):
            raise PhasekitError("moments give complex decay rates")
        lam = np.sort(lam.real)
        van = np.vander(lam, increasing=True).T[1:3]
        amps = np.linalg.lstsq(
            np.vstack([np.ones(3), van]),
            np.array([1.0, m.S[0], m.S[1]]),
            rcond=None,
        )[0]
        p = direct.PhaseTypeParams(lam=tuple(lam), A=tuple(amps))
    else:
        p = _params_from_args(args)
    report = rashomon.enumerate_variants(p)
    if report.n_valid == 0:
        raise NoBranchMatches(
            "no model in the catalog explains these inputs with positive rates",
            diagnostics=report.diagnostics,
        )
    _emit_json(_variant_payload(report), "variant_report.schema.json",
               manifest, args.out)
    return 0


def _cmd_experiment(args, manifest: _Manifest) -> int:
    cfg = rashomon.ExperimentConfig(n_samples=args.samples, seed=args.seed)
    manifest.note_seed("experiment", args.seed)
    report = rashomon.discrimination_experiment(cfg)
    payload = {
        "n_samples": cfg.n_samples,
        "seed": cfg.seed,
        "n_retained": report.n_retained,
        "retained_fraction": report.retained_fraction,
        "zero_fractions": {
            "p": report.zero_fraction_p,
            "log10_T1": report.zero_fraction_t1,
            "log10_T2": report.zero_fraction_t2,
        },
        "histograms": {
            name: {"bin_edges": list(h["edges"]),
                   "counts": list(h["counts"])}
            for name, h in report.histograms.items()
        },
    }
    _emit_json(payload, "experiment_report.schema.json", manifest, args.out)
    if args.hist_prefix:
        for name, h in report.histograms.items():
            path = f"{args.hist_prefix}_{name}.csv"
            with open(path, "w") as fh:
                fh.write("bin_left,bin_right,count\n")
                edges = h["edges"]
                for left, right, c in zip(edges[:-1], edges[1:], h["counts"]):
                    fh.write(f"{left:.17g},{right:.17g},{c:.17g}\n")
    return 0


def _cmd_validate(args, manifest: _Manifest) -> int:
    model = models.model_from_string(args.model)
    rates = _parse_floats(args.rates)
    gen = models.build_generator(model, rates)
    report = models.validate(gen)
    for label, value in (
        ("observed_only_from_last", report.c1_ok),
        ("observed_row_absorbing", report.c2_ok),
        ("strongly_connected", report.strongly_connected),
        ("return_state_is_last", report.s_equals_N),
    ):
        print(f"{label}: {'ok' if value else 'FAIL'}")
    for problem in report.messages:
        print("problem:", problem)
    if gen.has_nonpositive_rate:
        print("problem: some rates are not strictly positive")
    return 0 if report.ok and not gen.has_nonpositive_rate else 2


def _cmd_pipeline(args, manifest: _Manifest) -> int:
    model = models.model_from_string(args.model)
    rates = _parse_floats(args.rates)
    gen = models.build_generator(model, rates)
    manifest.note_seed("simulate", args.seed)
    manifest.note_seed("fit", args.fit_seed)
    trace = stochastic.simulate_events(gen, args.n, args.seed)
    truth = direct.phase_type_params(gen)
    config = stochastic.FitConfig(restarts=args.restarts, seed=args.fit_seed)
    fit = stochastic.fit_multiexp(trace, gen.N, config)
    report = rashomon.enumerate_variants(fit.params)
    solvable = model.tag in {m.tag for m in models.SOLVABLE_N3} or (
        model.tag == "chain"
    )
    ground_truth = {
        "rates": list(rates),
        "best_match_model": None,
        "best_match_rel_err": None,
    }
    if solvable:
        best = None
        for inst in report.instances:
            if str(inst.solution.model) != str(model) or not inst.valid:
                continue
            rel = float(
                np.max(np.abs(np.asarray(inst.solution.rates) - rates)
                       / np.abs(rates))
            )
            if best is None or rel < best:
                best = rel
        if best is not None:
            ground_truth["best_match_model"] = str(model)
            ground_truth["best_match_rel_err"] = best
    family = None
    if model.tag == "M3":
        # The one-parameter family exists only on a moment hypersurface;
        # fitted moments land near it, so loosen only that test.
        try:
            fam = inverse.invert_generic(
                model,
                inverse.symmetric_inputs(fit.params),
                hypersurface_tol=args.m3_tol,
            )
            family = [_solution_dict(s) for s in fam]
        except _NO_SOLUTION_ERRORS:
            family = []
    payload = {
        "model": str(model),
        "rates": list(rates),
        "solvable": solvable,
        "m3_family": family,
        "trace_stats": {
            "n": len(trace),
            "mean": float(np.mean(trace.gaps)),
            "ks_statistic": stochastic.ks_statistic(trace, truth),
        },
        "fit": {
            "lam": list(fit.params.lam),
            "A": list(fit.params.A),
            "log_likelihood": fit.log_likelihood,
            "converged": fit.converged,
        },
        "variants": _variant_payload(report),
        "ground_truth": ground_truth,
    }
    _emit_json(payload, "pipeline_report.schema.json", manifest, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasekit",
        description="Phase-type distributions of Markov chain models: "
                    "forward computation, simulation, fitting, and rate "
                    "recovery.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_rates(p):
        p.add_argument("--model", required=True,
                       help="model id (M2..M9) or chainN")
        p.add_argument("--rates", required=True,
                       help="comma-separated rate constants")

    p = sub.add_parser("direct", help="compute survival parameters")
    add_model_rates(p)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.add_argument("--survival-csv", help="also tabulate S(t) to CSV")
    p.add_argument("--t-max", type=float, default=10.0)
    p.add_argument("--t-points", type=int, default=200)
    p.set_defaults(func=_cmd_direct)

    p = sub.add_parser("simulate", help="simulate inter-event gaps")
    add_model_rates(p)
    p.add_argument("--n", type=int, required=True, help="number of events")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="gap CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("fit", help="fit a multi-exponential density")
    p.add_argument("--trace", required=True, help="gap CSV path")
    p.add_argument("--components", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("invert", help="recover rates from survival data")
    p.add_argument("--model", required=True)
    p.add_argument("--lambda", dest="lam", help="decay rates, comma-separated")
    p.add_argument("--A", help="amplitudes, comma-separated")
    p.add_argument("--moments", help="L1,L2,L3,S1,S2")
    p.add_argument("--thomas", action="store_true",
                   help="search every simple system, not just the generic one")
    p.add_argument("--k3-grid", help="sample values for the free rate of M3")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_invert)

    p = sub.add_parser("variants", help="enumerate variant models")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--A")
    p.add_argument("--moments")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_variants)

    p = sub.add_parser("experiment", help="marker discrimination experiment")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.add_argument("--hist-prefix", help="write histogram CSVs with this prefix")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("validate", help="check a generator's structure")
    add_model_rates(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("pipeline", help="simulate, fit, and enumerate variants")
    add_model_rates(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fit-seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--m3-tol", type=float, default=0.05,
                   help="hypersurface tolerance when provenance is M3")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    manifest = _Manifest(["phasekit"] + argv)
    try:
        return args.func(args, manifest)
    except _NO_SOLUTION_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3
    except (PhasekitError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
