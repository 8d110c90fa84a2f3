"""Command-line surface: file I/O, report generation, and thin wrappers
around the analysis modules.

Exit codes: 0 success, 2 usage or parse error, 3 an operation's
precondition or numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .errors import InvalidArgument, IoscopeError
from .series import TimeSeries, ScaleField, deseasonalize_weekly, smooth
from . import agentsim, correlation, fractal, netimpact, rankfuse
from . import spectral, templates, wavelet

ANALYZE_OPS = ("sma", "ewma", "deseason", "acf", "ccf", "dft", "gabor",
               "filter", "cwt", "scalogram", "coherence", "wcc", "hurst",
               "hurst-profile", "dl", "mfdfa", "wtmm", "leaders")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_OPFAIL = 3


class OpFailure(IoscopeError):
    """An operation's precondition or numeric computation failed."""

    def __init__(self, op: str, cause: Exception):
        super().__init__(f"op {op!r}: {cause}")
        self.op = op


def _fmt(x: float) -> str:
    return "" if not np.isfinite(x) else format(float(x), ".12g")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return [None if (np.isreal(v) and not np.isfinite(v)) else
                (float(v) if np.isreal(v) else str(v)) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        v = obj.item()
        return None if isinstance(v, float) and not np.isfinite(v) else v
    raise TypeError(f"not serializable: {type(obj)}")


def write_matrix_csv(path: Path, fld: ScaleField) -> None:
    """First row: location axis; first column: scale axis; undefined
    cells empty; 12 significant digits. Complex fields store modulus."""
    cells = np.abs(fld.cells) if fld.is_complex else fld.cells
    with open(path, "w") as fh:
        fh.write("," + ",".join(_fmt(c) for c in fld.cols) + "\n")
        for r in range(fld.rows.size):
            row = [_fmt(fld.rows[r])]
            for c in range(fld.cols.size):
                row.append(_fmt(cells[r, c]) if fld.mask[r, c] else "")
            fh.write(",".join(row) + "\n")
    gp = path.with_suffix(".gnuplot")
    with open(gp, "w") as fh:
        fh.write("set datafile separator ','\n"
                 "set view map\n"
                 f"set title '{fld.kind or path.stem}'\n"
                 f"splot '{path.name}' nonuniform matrix with image notitle\n")


def read_series_csv(path: Path) -> TimeSeries:
    """One `value` column, or `timestamp,value` with uniform spacing."""
    values: List[float] = []
    stamps: List[float] = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                if len(parts) == 1:
                    values.append(float(parts[0]))
                elif len(parts) == 2:
                    stamps.append(float(parts[0]))
                    values.append(float(parts[1]))
                else:
                    raise ValueError("too many columns")
            except ValueError as exc:
                if lineno == 1:  # tolerate a header line
                    continue
                raise InvalidArgument(f"{path}:{lineno}: {exc}") from exc
    if len(values) < 2:
        raise InvalidArgument(f"{path}: need at least 2 samples")
    step, origin = 1.0, None
    if stamps:
        if len(stamps) != len(values):
            raise InvalidArgument(f"{path}: mixed column counts")
        diffs = np.diff(stamps)
        if diffs.size and (np.any(diffs <= 0)
                           or np.max(np.abs(diffs - diffs[0])) > 1e-9 * max(1.0, abs(diffs[0]))):
            raise InvalidArgument(f"{path}: timestamps not uniformly spaced")
        step = float(diffs[0]) if diffs.size else 1.0
        origin = float(stamps[0])
    return TimeSeries(np.array(values), step=step, origin=origin,
                      label=path.stem)


def _fingerprint(paths: Sequence[Path]) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(p.read_bytes())
    return h.hexdigest()


def _write_report(out_dir: Path, command: str, inputs: Sequence[Path],
                  results: Dict, warnings: List[str],
                  artifacts: List[str], seed: Optional[int],
                  preprocessing: Optional[Dict] = None) -> Path:
    if preprocessing is None:
        preprocessing = {"steps": []}
    report = {
        "version": __version__,
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "input_fingerprint": _fingerprint(inputs),
        "seed": seed,
        "threads": os.environ.get("IOSCOPE_THREADS"),
        "preprocessing": preprocessing,
        "results": results,
        "warnings": warnings,
        "artifacts": artifacts,
    }
    path = out_dir / "report.json"
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _parse_scales(text: str) -> List[int]:
    try:
        a, b, step = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise InvalidArgument(f"bad scale range {text!r}; want a:b:step") from exc
    if a < 3 or b < a or step < 1:
        raise InvalidArgument(f"bad scale range {text!r}")
    return list(range(a, b + 1, step))


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """key=value config entries fill in flags still at their defaults."""
    if not getattr(args, "config", None):
        return
    path = Path(args.config)
    if not path.exists():
        raise InvalidArgument(f"config file {path} not found")
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidArgument(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if not hasattr(args, key):
            raise InvalidArgument(f"{path}:{lineno}: unknown key {key!r}")
        default = getattr(args, "_subparser", parser).get_default(key)
        if getattr(args, key) == default:
            if isinstance(default, bool):
                setattr(args, key, value.lower() in ("1", "true", "yes"))
            elif isinstance(default, int):
                setattr(args, key, int(value))
            elif isinstance(default, float):
                setattr(args, key, float(value))
            else:
                setattr(args, key, value)


def _curve_json(x: TimeSeries) -> Dict:
    return {"times": x.times, "values": x.values, "step": x.step}


def _mf_json(res: fractal.MultifractalResult) -> Dict:
    out = {"q": res.q, "tau": res.tau, "alpha": res.alpha,
           "f_alpha": res.f_alpha}
    if res.h is not None:
        out["h"] = res.h
    return out


def cmd_analyze(args, parser) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ops = [op.strip() for op in args.ops.split(",") if op.strip()]
    if not ops:
        parser.error("empty ops list")
    for op in ops:
        if op not in ANALYZE_OPS:
            parser.error(f"unknown op {op!r}")
    x = read_series_csv(Path(args.input))
    inputs = [Path(args.input)]
    y = None
    if args.input2:
        y = read_series_csv(Path(args.input2))
        inputs.append(Path(args.input2))
    preprocessing = {
        "steps": [],
        "window": args.window,
        "alpha": args.alpha,
        "bin": args.bin,
        "wavelet": args.wavelet,
        "gabor_width": args.gabor_width,
        "aggregated": args.aggregated,
        "deseason_first": args.deseason_first,
    }
    if args.deseason_first:
        x = deseasonalize_weekly(x)
        ok = np.isfinite(x.values)
        x = x.with_values(x.values[ok])
        preprocessing["steps"].append("deseasonalize-weekly")
    results: Dict = {}
    warnings: List[str] = []
    artifacts: List[str] = []

    def emit(name: str, fld: ScaleField) -> None:
        path = out_dir / f"{name}.csv"
        write_matrix_csv(path, fld)
        artifacts.extend([path.name, path.with_suffix(".gnuplot").name])
        results[name] = {"artifact": path.name, "kind": fld.kind}

    try:
        for op in ops:
            if op == "sma":
                results[op] = _curve_json(smooth(x, "sma", args.window))
            elif op == "ewma":
                results[op] = _curve_json(smooth(x, "ewma", args.alpha))
            elif op == "deseason":
                results[op] = _curve_json(deseasonalize_weekly(x))
            elif op == "acf":
                curve = correlation.autocorrelation(x)
                results[op] = {"lags": curve.lags, "values": curve.values,
                               "se": curve.se_band}
            elif op == "ccf":
                if y is None:
                    raise InvalidArgument("ccf needs --input2")
                curve = correlation.cross_correlation(x, y)
                results[op] = {"lags": curve.lags, "values": curve.values,
                               "argmax_lag": curve.argmax_lag}
            elif op == "dft":
                spec = spectral.dft(x)
                results[op] = {"freqs": spec.freqs, "amplitude": spec.amplitude}
            elif op == "gabor":
                n = len(x)
                centers = x.times[n // 8: n - n // 8]
                freqs = np.linspace(1.0 / n, 0.5, 32) / x.step
                emit(op, spectral.gabor(x, centers, args.gabor_width * x.step, freqs))
            elif op == "filter":
                filt = spectral.sinusoid_filter(x, args.bin)
                results[op] = _curve_json(filt)
            elif op in ("cwt", "scalogram"):
                w = wavelet.get_wavelet(args.wavelet)
                fld = wavelet.cwt(x, w, wavelet.default_scale_grid(x))
                emit(op, fld if op == "cwt" else wavelet.scalogram(fld))
            elif op in ("coherence", "wcc"):
                if y is None:
                    raise InvalidArgument(f"{op} needs --input2")
                w = wavelet.get_wavelet(args.wavelet)
                scales = wavelet.default_scale_grid(x)
                wx = wavelet.cwt(x, w, scales)
                wy = wavelet.cwt(y, w, scales)
                if op == "coherence":
                    emit(op, wavelet.wavelet_coherence(wx, wy))
                else:
                    results[op] = {"scales": scales,
                                   "values": wavelet.wcc_measure(wx, wy)}
            elif op == "hurst":
                if len(x) < 200:
                    warnings.append("hurst: series shorter than 200 samples")
                res = fractal.hurst_rs(x)
                results[op] = {"H": res.exponent,
                               "window_sizes": res.window_sizes,
                               "rs": res.rs_values}
            elif op == "hurst-profile":
                results[op] = _curve_json(fractal.hurst_profile(x))
            elif op == "dl":
                emit(op, fractal.delta_l_field(x))
            elif op == "mfdfa":
                q = np.arange(-5.0, 5.01, 0.5)
                series = x
                if args.aggregated:
                    vals = np.diff(x.values)
                    series = x.with_values(vals)
                    preprocessing["steps"].append("disaggregate")
                results[op] = _mf_json(fractal.mfdfa(series, q))
            elif op == "wtmm":
                q = np.arange(-2.0, 4.01, 0.5)
                results[op] = _mf_json(fractal.wtmm(x, q, wavelet=args.wavelet))
            elif op == "leaders":
                q = np.arange(-2.0, 4.01, 0.5)
                results[op] = _mf_json(fractal.wavelet_leaders(x, q,
                                                               wavelet=args.wavelet))
    except OpFailure:
        raise
    except IoscopeError as exc:
        raise OpFailure(op, exc) from exc
    _write_report(out_dir, "analyze", inputs, results, warnings,
                  artifacts, args.seed, preprocessing)
    return EXIT_OK


def cmd_scan(args, parser) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not (0.0 < args.threshold <= 1.0):
        parser.error("threshold must lie in (0, 1]")
    x = read_series_csv(Path(args.input))
    if args.templates == "builtin":
        bank = templates.builtin_bank()
    else:
        bank = _load_template_dir(Path(args.templates))
    k_range = _parse_scales(args.scales)
    hits_found = templates.scan_detect(x, bank, k_range, args.threshold)
    by_name = {t.name: t for t in bank}
    payload = {
        "templates": [t.name for t in bank],
        "detections": [{
            "template": d.template,
            "scale": d.scale,
            "location": d.location,
            "score": d.score,
            "phase_marks": [
                {"offset": int(round(idx * (d.scale - 1)
                                     / (len(by_name[d.template]) - 1))),
                 "label": label}
                for idx, label in by_name[d.template].phase_marks
            ],
        } for d in hits_found],
    }
    path = out_dir / "detections.json"
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_json_default)
        fh.write("\n")
    _write_report(out_dir, "scan", [Path(args.input)],
                  {"detections": len(payload["detections"]),
                   "artifact": path.name},
                  [], [path.name], args.seed)
    return EXIT_OK


def _load_template_dir(dir_path: Path) -> List[templates.Template]:
    if not dir_path.is_dir():
        raise InvalidArgument(f"{dir_path} is not a directory")
    bank = []
    for p in sorted(dir_path.glob("*.csv")):
        vals = [float(line.strip()) for line in p.read_text().splitlines()
                if line.strip()]
        bank.append(templates.Template(np.array(vals), name=p.stem))
    if not bank:
        raise InvalidArgument(f"no template CSV files in {dir_path}")
    return bank


def cmd_simulate(args, parser) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        cfg = agentsim.SimConfig(p_l0=args.pl, p_d0=args.pd, p_r0=args.pr,
                                 p_link0=args.plink, p_s=args.ps,
                                 e0=args.e0, phi=args.phi,
                                 phi_e_ref=args.phi_e_ref,
                                 t_max=args.ticks, seed=args.seed)
    except IoscopeError as exc:
        parser.error(str(exc))
    outcome = agentsim.simulate_population(cfg, args.ticks)
    csv_path = out_dir / "population.csv"
    with open(csv_path, "w") as fh:
        fh.write("tick,alive,births,deaths\n")
        for t in range(outcome.alive.size):
            fh.write(f"{t},{outcome.alive[t]},{outcome.births[t]},"
                     f"{outcome.deaths[t]}\n")
    lifespans = outcome.lifespans
    likes = outcome.like_counts
    results: Dict = {
        "config": {"p_l0": cfg.p_l0, "p_d0": cfg.p_d0, "p_r0": cfg.p_r0,
                   "p_link0": cfg.p_link0, "p_s": cfg.p_s, "e0": cfg.e0,
                   "phi": cfg.phi, "ticks": args.ticks},
        "agents": len(outcome.traces),
        "lifespan_histogram": np.bincount(lifespans).tolist(),
        "like_histogram": np.bincount(likes).tolist(),
        "capped": outcome.capped,
    }
    # survival beyond 1.5*e0 under both energy responses
    survival: Dict[str, float] = {}
    for tag in ("one", "saturating"):
        alt = agentsim.SimConfig(p_l0=cfg.p_l0, p_r0=cfg.p_r0, e0=cfg.e0,
                                 phi=tag, phi_e_ref=args.phi_e_ref,
                                 t_max=args.ticks, seed=cfg.seed)
        horizon = int(1.5 * cfg.e0)
        survival[tag] = agentsim.lifespan_survival(cfg.e0, alt, horizon)
    results["survival_beyond_1.5e0"] = survival
    positive = likes[likes > 0].astype(float)
    if positive.size >= 30:
        try:
            k_hat, lam_hat = agentsim.weibull_mle(positive)
            results["weibull_fit"] = {"k": k_hat, "lambda": lam_hat}
        except IoscopeError as exc:
            results["weibull_fit"] = {"error": str(exc)}
    else:
        results["weibull_fit"] = {"error": "too few positive like counts"}
    _write_report(out_dir, "simulate", [], results, [],
                  [csv_path.name], args.seed)
    return EXIT_OK


def _read_edges_tsv(path: Path) -> List[Tuple[str, str]]:
    citations: List[Tuple[str, str]] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            citations.append((parts[0], parts[1]))
        elif len(parts) == 3:
            citations.extend([(parts[0], parts[1])] * int(parts[2]))
        else:
            raise InvalidArgument(f"{path}:{lineno}: want from<TAB>to[<TAB>count]")
    return citations


def _read_ratings_csv(path: Path) -> Dict[str, float]:
    ratings: Dict[str, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        node, _, value = line.partition(",")
        try:
            ratings[node.strip()] = float(value)
        except ValueError as exc:
            if lineno == 1:
                continue
            raise InvalidArgument(f"{path}:{lineno}: bad rating") from exc
    return ratings


def cmd_graph(args, parser) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ops = [op.strip() for op in args.ops.split(",") if op.strip()]
    for op in ops:
        if op not in ("stats", "hits", "ioscore"):
            parser.error(f"unknown op {op!r}")
    if not ops:
        parser.error("empty ops list")
    edges_path = Path(args.edges)
    citations = _read_edges_tsv(edges_path)
    inputs = [edges_path]
    ratings = None
    if args.ratings:
        ratings = _read_ratings_csv(Path(args.ratings))
        inputs.append(Path(args.ratings))
    g = netimpact.build_impact_graph(citations, ratings=ratings)
    results: Dict = {"n": g.n, "m": g.m,
                     "dropped_self_loops": g.dropped_self_loops}
    for op in ops:
        if op == "stats":
            results["stats"] = network_stats_json(g)
        elif op == "hits":
            auth, hub = netimpact.hits(g)
            results["hits"] = {"authority": auth, "hub": hub,
                               "out_degree": {str(n): sum(
                                   c for u, _, c in g.edges if u == n)
                                   for n in g.nodes}}
        elif op == "ioscore":
            results["ioscore"] = netimpact.io_scenario_score(g)
    _write_report(out_dir, "graph", inputs, results, [], [], None)
    return EXIT_OK


def network_stats_json(g: netimpact.ImpactGraph) -> Dict:
    stats = netimpact.network_stats(g)
    stats["per_node"] = {str(k): v for k, v in stats["per_node"].items()}
    return stats


def _read_rankings_csv(path: Path) -> List[rankfuse.Ranking]:
    per_source: Dict[str, List[Tuple[str, int]]] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise InvalidArgument(f"{path}:{lineno}: want source,alternative,rank")
        src, alt, rank = (p.strip() for p in parts)
        try:
            rank_val = int(rank)
        except ValueError as exc:
            if lineno == 1:
                continue
            raise InvalidArgument(f"{path}:{lineno}: bad rank") from exc
        per_source.setdefault(src, []).append((alt, rank_val))
    if not per_source:
        raise InvalidArgument(f"{path}: no rankings found")
    return [rankfuse.Ranking(tuple(items), source=src)
            for src, items in sorted(per_source.items())]


def cmd_fuse(args, parser) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rankings = _read_rankings_csv(Path(args.rankings))
    inputs = [Path(args.rankings)]
    weights = None
    profile_json = None
    if args.weighting != "none":
        if not args.estimates:
            raise InvalidArgument("weighting needs --estimates")
        est_path = Path(args.estimates)
        inputs.append(est_path)
        estimates: Dict[str, float] = {}
        for raw in est_path.read_text().splitlines():
            line = raw.strip()
            if not line:
                continue
            src, _, value = line.partition(",")
            try:
                estimates[src.strip()] = float(value)
            except ValueError:
                continue
        alt_lists = {r.source: (estimates.get(r.source, 0.0),
                                list(r.alternatives)) for r in rankings}
        profile = rankfuse.source_weights(alt_lists, mode=args.weighting)
        weights = [float(w) for w in profile.w]
        profile_json = {"sources": list(profile.sources),
                        "w": profile.w, "rho": profile.rho,
                        "x1": profile.x1, "x2": profile.x2,
                        "mode": profile.mode}
    cycles: List[List[str]] = []
    objective = None
    if args.method == "borda":
        fused = rankfuse.borda(rankings, weights)
    elif args.method == "condorcet":
        fused, cycles = rankfuse.condorcet(rankings, weights)
    else:
        mode = "heuristic" if args.heuristic else "exact"
        fused, objective = rankfuse.kemeny_median(rankings, weights, mode=mode)
    results = {
        "method": args.method,
        "ranking": {a: r for a, r in fused.items},
        "cycles": cycles,
        "objective": objective,
        "weights": (dict(zip(profile_json["sources"], profile_json["w"]))
                    if profile_json else None),
        "weight_profile": profile_json,
    }
    _write_report(out_dir, "fuse", inputs, results, [], [], None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ioscope",
                                     description="Publication-dynamics and "
                                     "influence-network analysis toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="time-series analyses")
    pa.add_argument("--input", required=True)
    pa.add_argument("--input2", default=None)
    pa.add_argument("--ops", required=True,
                    help="comma list from: " + ",".join(ANALYZE_OPS))
    pa.add_argument("--out", default="ioscope-out")
    pa.add_argument("--window", type=int, default=7)
    pa.add_argument("--alpha", type=float, default=0.3)
    pa.add_argument("--bin", type=int, default=1)
    pa.add_argument("--wavelet", default="mexican-hat")
    pa.add_argument("--gabor-width", type=float, default=16.0)
    pa.add_argument("--seed", type=int, default=None)
    pa.add_argument("--aggregated", action="store_true")
    pa.add_argument("--deseason-first", action="store_true")
    pa.add_argument("--config", default=None)
    pa.set_defaults(_subparser=pa, func=cmd_analyze)

    ps = sub.add_parser("scan", help="template-bank detection scan")
    ps.add_argument("--input", required=True)
    ps.add_argument("--templates", default="builtin")
    ps.add_argument("--threshold", type=float, default=0.9)
    ps.add_argument("--scales", default="5:60:1")
    ps.add_argument("--out", default="ioscope-out")
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--config", default=None)
    ps.set_defaults(_subparser=ps, func=cmd_scan)

    pm = sub.add_parser("simulate", help="agent population simulation")
    pm.add_argument("--pl", type=float, default=0.4)
    pm.add_argument("--pd", type=float, default=0.0)
    pm.add_argument("--pr", type=float, default=0.1)
    pm.add_argument("--plink", type=float, default=0.0)
    pm.add_argument("--ps", type=float, default=0.0)
    pm.add_argument("--e0", type=int, default=10)
    pm.add_argument("--phi", default="one", choices=("one", "saturating"))
    pm.add_argument("--phi-e-ref", type=float, default=10.0)
    pm.add_argument("--ticks", type=int, default=100)
    pm.add_argument("--seed", type=int, default=None)
    pm.add_argument("--out", default="ioscope-out")
    pm.add_argument("--config", default=None)
    pm.set_defaults(_subparser=pm, func=cmd_simulate)

    pg = sub.add_parser("graph", help="impact-graph analyses")
    pg.add_argument("--edges", required=True)
    pg.add_argument("--ratings", default=None)
    pg.add_argument("--ops", default="stats")
    pg.add_argument("--out", default="ioscope-out")
    pg.add_argument("--config", default=None)
    pg.set_defaults(_subparser=pg, func=cmd_graph)

    pf = sub.add_parser("fuse", help="rank aggregation")
    pf.add_argument("--rankings", required=True)
    pf.add_argument("--estimates", default=None)
    pf.add_argument("--method", default="borda",
                    choices=("borda", "condorcet", "kemeny"))
    pf.add_argument("--weighting", default="none",
                    choices=("none", "density", "dispersion"))
    pf.add_argument("--heuristic", action="store_true")
    pf.add_argument("--out", default="ioscope-out")
    pf.add_argument("--config", default=None)
    pf.set_defaults(_subparser=pf, func=cmd_fuse)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InvalidArgument as exc:
        print(f"ioscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except OpFailure as exc:
        print(f"ioscope: {exc}", file=sys.stderr)
        return EXIT_OPFAIL
    except InvalidArgument as exc:
        print(f"ioscope: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IoscopeError as exc:
        print(f"ioscope: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_OPFAIL
    except FileNotFoundError as exc:
        print(f"ioscope: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
