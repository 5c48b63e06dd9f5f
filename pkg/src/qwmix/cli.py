"""Command-line front end: ``qwmix {gen,spectrum,gaps,mix,ensemble,report}``.

Every command writes its artifacts plus a sibling ``run_config.json`` into
``--out`` and prints a one-line summary.  Exit codes: 0 success, 1 invalid
input, 2 eigensolver failure, 3 degenerate spectrum where a simple one is
required.
"""

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import experiment, gaps, graphs, spectral, walk
from ._io import fmt_float, write_csv, write_json
from .config import RunConfig
from .errors import DegenerateSpectrum, InsufficientData, QwmixError, SpectralConvergenceError

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_DEGENERATE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


# flag -> (RunConfig field, type, help)
_GRAPH_FLAGS = {
    "--n": ("n", int, "node count"),
    "--p": ("p", float, "edge probability"),
    "--seed": ("seed", int, "64-bit seed"),
}
_WALK_FLAGS = {
    "--rate": ("rate", str, "normalization: 'np' (A/np) or 'norm' (A/||A||)"),
    "--epsilon": ("epsilon", float, "target TV accuracy"),
    "--start": ("start", str, "initial node index or 'uniform'"),
    "--t-min": ("t_min", float, "smallest grid time"),
    "--per-decade": ("per_decade", int, "grid points per decade"),
}
_CONST_FLAGS = {
    "--C": ("C", float, "absolute constant in the norm bounds"),
    "--c": ("c", float, "classical-separation floor"),
    "--rigidity-epsilon": ("rigidity_epsilon", float, "epsilon in the rigidity bound"),
}
_ENSEMBLE_FLAGS = {
    "--n-list": ("n_list", _ints, "comma-separated ascending sizes"),
    "--seed-count": ("seed_count", int, "seeds 0..k-1 per size"),
    "--spot-p": ("spot_p", _floats, "comma-separated spot-check densities ('' for none)"),
    "--spot-n": ("spot_n", int, "size for spot checks"),
    "--spot-seed-count": ("spot_seed_count", int, "seeds per spot check"),
    "--jobs": ("jobs", int, "worker processes"),
}


def _add(parser, table):
    for flag, (dest, typ, help_) in table.items():
        parser.add_argument(flag, dest=dest, type=typ, default=None, help=help_)


def _common(parser):
    parser.add_argument("--config", type=Path, help="JSON run config; flags override it")
    parser.add_argument("--out", dest="out", default=None, help="output directory")


def build_parser():
    parser = _Parser(prog="qwmix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sample G(n,p) and write its edge list")
    _common(p)
    _add(p, _GRAPH_FLAGS)

    for name, help_ in (("spectrum", "eigendecompose the normalized adjacency"),
                        ("gaps", "gap profile, classical locations and rigidity"),
                        ("mix", "mixing curve, T_bound and empirical T_mix")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        _add(p, _GRAPH_FLAGS)
        p.add_argument("--graph", type=Path, help="read an edge-list file instead of sampling")
        p.add_argument("--rate", dest="rate", default=None, help=_WALK_FLAGS["--rate"][2])
        if name == "gaps":
            _add(p, _CONST_FLAGS)
        if name == "mix":
            _add(p, {k: v for k, v in _WALK_FLAGS.items() if k != "--rate"})

    p = sub.add_parser("ensemble", help="seeded Monte-Carlo ensemble and scaling fits")
    _common(p)
    _add(p, {"--p": _GRAPH_FLAGS["--p"]})
    _add(p, _WALK_FLAGS)
    _add(p, _CONST_FLAGS)
    _add(p, _ENSEMBLE_FLAGS)
    p.add_argument("--no-mixing", dest="mixing", action="store_const", const=False,
                   default=None, help="skip the T_mix scan")

    p = sub.add_parser("report", help="recompute fits and fractions from a report.json")
    _common(p)
    p.add_argument("--input", type=Path, required=True, help="report.json from 'ensemble'")
    p.add_argument("--C", dest="C", type=float, default=None, help=_CONST_FLAGS["--C"][2])
    return parser


def resolve_config(args):
    cfg = RunConfig.load(args.config) if getattr(args, "config", None) else RunConfig()
    flat = cfg.__dict__
    for key, value in vars(args).items():
        if key in flat and value is not None and key != "schema_version":
            flat[key] = value
    return cfg.validate()


def _outdir(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.save(out / "run_config.json")
    return out


def _sample(args, cfg):
    if getattr(args, "graph", None) is not None:
        sample = graphs.read_edge_list(args.graph)
        cfg.n, cfg.p, cfg.seed = sample.n, sample.p, sample.seed
        return sample
    return graphs.sample_gnp(cfg.n, cfg.p, cfg.seed)


def _decompose(sample, cfg):
    norm = graphs.normalize(sample, rate=cfg.rate)
    return norm, spectral.eigendecompose(norm.matrix)


def cmd_gen(args, cfg):
    sample = graphs.sample_gnp(cfg.n, cfg.p, cfg.seed)
    out = _outdir(cfg)
    graphs.write_edge_list(sample, out / "graph.txt")
    print(f"gen n={cfg.n} p={fmt_float(cfg.p)} seed={cfg.seed} edges={sample.edge_count} "
          f"-> {out / 'graph.txt'}")


def cmd_spectrum(args, cfg):
    sample = _sample(args, cfg)
    _, decomp = _decompose(sample, cfg)
    out = _outdir(cfg)
    spectral.write_spectrum_csv(decomp, out / "spectrum.csv")
    lam = decomp.eigenvalues
    print(f"spectrum n={decomp.n} lambda_min={fmt_float(lam[0])} lambda_max={fmt_float(lam[-1])} "
          f"residual={decomp.residual_max:.3e} -> {out / 'spectrum.csv'}")


def cmd_gaps(args, cfg):
    sample = _sample(args, cfg)
    _, decomp = _decompose(sample, cfg)
    profile = gaps.gap_profile(decomp)
    out = _outdir(cfg)
    locs = rig = None
    if 0.0 < cfg.p < 1.0:
        locs = gaps.classical_locations(decomp.n, cfg.p)
        with warnings.catch_warnings():
            warnings.simplefilter("always", RuntimeWarning)
            rig = gaps.rigidity_report(decomp, locs, cfg.rigidity_epsilon)
    gaps.write_gap_csv(profile, out / "gaps.csv", locs, rig)
    gaps.write_sigma_json(profile, out / "sigma.json", cfg.n, cfg.p, cfg.seed)
    tail = "" if rig is None else f" rigidity_pass={fmt_float(rig.pass_fraction)}"
    print(f"gaps n={decomp.n} sigma1={fmt_float(profile.sigma1)} "
          f"sigma={fmt_float(profile.sigma_total)} delta_min={fmt_float(profile.delta_min)}"
          f"{tail} -> {out / 'gaps.csv'}")


def cmd_mix(args, cfg):
    sample = _sample(args, cfg)
    _, decomp = _decompose(sample, cfg)
    if cfg.start == "uniform":
        spec = walk.WalkSpec.uniform(decomp)
    else:
        spec = walk.WalkSpec.from_node(decomp, int(cfg.start))
    t_bound = walk.mixing_time_bound(spec, cfg.epsilon)
    grid = walk.default_grid(t_bound, cfg.t_min, cfg.per_decade)
    result = walk.mixing_result(spec, cfg.epsilon, grid)
    out = _outdir(cfg)
    walk.write_mixing_csv(result, out / "mixing.csv")
    walk.write_mixing_json(result, out / "mixing.json", cfg.n, cfg.p, cfg.seed)
    t_mix = "none" if result.t_mix_empirical is None else fmt_float(result.t_mix_empirical)
    print(f"mix n={decomp.n} t_bound={fmt_float(result.t_bound)} t_mix={t_mix} "
          f"-> {out / 'mixing.json'}")


def _write_report(report, out):
    report.write(out / "report.json")
    report.write_trials_csv(out / "trials.csv")
    write_csv(out / "fits.csv",
              ["quantity", "slope", "intercept", "r_squared", "predicted_slope", "tolerance",
               "passed"],
              [(f.quantity, f.slope, f.intercept, f.r_squared, f.predicted_slope,
                f.tolerance, f.passed) for f in report.fits])


def _report_line(report):
    failed = sum(1 for t in report.trials if t.error)
    fits = " ".join(f"{f.quantity}={f.slope:.3f}" for f in report.fits)
    return f"trials={len(report.trials)} failed={failed} {fits}".rstrip()


def cmd_ensemble(args, cfg):
    out = _outdir(cfg)
    report = experiment.run_desk(cfg)
    _write_report(report, out)
    print(f"ensemble {_report_line(report)} -> {out / 'report.json'}")


def cmd_report(args, cfg):
    data = json.loads(Path(args.input).read_text())
    report = experiment.refresh(experiment.EnsembleReport.from_dict(data), C=args.C)
    out = _outdir(cfg)
    _write_report(report, out)
    write_json(out / "fractions.json", report.fractions)
    print(f"report {_report_line(report)} -> {out / 'report.json'}")


COMMANDS = {"gen": cmd_gen, "spectrum": cmd_spectrum, "gaps": cmd_gaps, "mix": cmd_mix,
            "ensemble": cmd_ensemble, "report": cmd_report}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command](args, cfg)
    except DegenerateSpectrum as exc:
        print(f"qwmix {args.command}: degenerate spectrum: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except SpectralConvergenceError as exc:
        print(f"qwmix {args.command}: eigensolver failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError, InsufficientData, QwmixError) as exc:
        print(f"qwmix {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
