"""Command-line interface: detect, experiment, spectra, eval.

Exit codes: 0 success, 2 argument error, 3 data error, 4 numerical failure.
Input files are looked up as given, then under $SCORE_DATA_DIR.  The karate
club network ships embedded; use --input builtin:karate.
"""

import functools
import io
import json
import math
import os
import sys
import time

import click
import numpy as np

from . import datasets, dcbm, eigen, experiments, graph, metrics, pipeline
from .errors import DataError, NumericalError
from .seeding import derived_seed


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DataError as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(3)
        except NumericalError as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(4)
        except ValueError as exc:
            raise click.UsageError(str(exc))
    return wrapper


def _resolve_path(path):
    if os.path.exists(path):
        return path
    data_dir = os.environ.get("SCORE_DATA_DIR")
    if data_dir:
        candidate = os.path.join(data_dir, path)
        if os.path.exists(candidate):
            return candidate
    raise DataError(f"cannot find input file {path!r} "
                    "(also searched $SCORE_DATA_DIR)")


def _load_graph(input_spec):
    """Load builtin:<name> or an edge-list file; returns (Graph, labels lines)."""
    if input_spec.startswith("builtin:"):
        name = input_spec.split(":", 1)[1]
        if name not in datasets.BUILTIN_GRAPHS:
            raise DataError(f"unknown builtin dataset {name!r}; "
                            f"available: {sorted(datasets.BUILTIN_GRAPHS)}")
        g = graph.load_edge_list(datasets.BUILTIN_GRAPHS[name]())
        label_lines = datasets.BUILTIN_LABELS.get(name)
        return g, (label_lines() if label_lines else None)
    path = _resolve_path(input_spec)
    with open(path) as fh:
        return graph.load_edge_list(fh), None


def _truth_for(g, labels_path, builtin_lines, K):
    if labels_path:
        with open(_resolve_path(labels_path)) as fh:
            truth, codes = graph.load_labels(fh, g.original_ids)
    elif builtin_lines is not None:
        truth, codes = graph.load_labels(builtin_lines, g.original_ids)
    else:
        return None
    if len(codes) > K:
        raise DataError(f"ground truth has {len(codes)} labels but K={K}")
    return truth


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


@click.group()
@click.version_option(package_name="scorecd")
def main():
    """Community detection on eigenvector ratios, with spectral baselines."""


@main.command()
@click.option("--input", "input_spec", required=True,
              help="Edge-list path or builtin:<name>.")
@click.option("--labels", default=None, help="Ground-truth label file.")
@click.option("--k", "k", type=int, required=True, help="Community count.")
@click.option("--method", default="score", show_default=True,
              help="score, scoreq:<q>, opca or npca.")
@click.option("--threshold", default=None,
              help="1-D ratio threshold t, or 'auto' (K=2, method=score).")
@click.option("--tn", type=float, default=None,
              help="Ratio truncation level; default log(n).")
@click.option("--restarts", type=int, default=None, help="k-means restarts.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--csv", "as_csv", is_flag=True, help="Per-node label rows.")
@click.option("--out", default=None, help="Write output to a file.")
@_guard
def detect(input_spec, labels, k, method, threshold, tn, restarts, seed,
           as_json, as_csv, out):
    """Detect communities in a real network (giant component is used)."""
    if k < 1:
        raise ValueError(f"K must be >= 1, got {k}")
    g_raw, builtin_labels = _load_graph(input_spec)
    g, _ = graph.giant_component(g_raw)
    if k > g.n:
        raise ValueError(f"K={k} exceeds the {g.n}-node giant component")
    t0 = time.perf_counter()
    spectrum = eigen.leading_eigs(g, k, seed=derived_seed(seed, "eigs"))
    result = pipeline.run_method(g, spectrum, method, k, T_n=tn, seed=seed,
                                 restarts=restarts, threshold=threshold)
    elapsed = time.perf_counter() - t0
    truth = _truth_for(g, labels, builtin_labels, k)
    ham = None
    if truth is not None:
        ham = metrics.hamming_error(result.labeling.labels, truth, k)

    if as_csv:
        lines = ["node,label"]
        lines += [f"{tok},{lab}" for tok, lab in
                  zip(g.original_ids, result.labeling.labels)]
        _emit("\n".join(lines), out)
        return
    payload = {
        "input": input_spec, "method": result.method, "K": k, "seed": seed,
        "n_loaded": g_raw.n, "n0": g.n, "edges": g.num_edges,
        "threshold": result.threshold,
        "wall_clock_s": round(elapsed, 3),
    }
    if result.kmeans is not None:
        payload["kmeans_cost"] = result.kmeans.cost
    if result.ratio is not None:
        payload["truncated_entries"] = result.ratio.truncated_count
    if ham is not None:
        payload.update(mismatches=ham.mismatches, rate=ham.rate,
                       best_perm=list(ham.best_perm))
    if as_json:
        payload["labels"] = result.labeling.labels.tolist()
        _emit(json.dumps(payload, indent=2), out)
    else:
        lines = [f"{key} = {value}" for key, value in payload.items()]
        _emit("\n".join(lines), out)


def _load_config(preset, config_path):
    if (preset is None) == (config_path is None):
        raise ValueError("give exactly one of a preset id or --config PATH")
    if preset is not None:
        if preset not in experiments.PRESETS:
            raise ValueError(f"unknown preset {preset!r}; available: "
                             f"{sorted(experiments.PRESETS)}")
        return experiments.PRESETS[preset]
    with open(_resolve_path(config_path)) as fh:
        return experiments.config_from_text(fh.read())


@main.command()
@click.argument("preset", required=False)
@click.option("--config", "config_path", default=None,
              help="Plain-text experiment config file.")
@click.option("--reps", type=int, default=None, help="Override repetitions.")
@click.option("--seed", type=int, default=None, help="Override master seed.")
@click.option("--tn", type=float, default=math.inf, show_default="inf",
              help="Ratio truncation during simulation.")
@click.option("--restarts", type=int, default=None, help="k-means restarts.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--uniform-clustering", is_flag=True,
              help="Cluster every method with the multi-restart optimizer "
                   "(by default the normalized-PCA baseline is scored with "
                   "a single randomly seeded run).")
@click.option("--progress", is_flag=True, help="Tick repetitions on stderr.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True, help="Per-repetition rows.")
@click.option("--out", default=None, help="Write output to a file.")
@_guard
def experiment(preset, config_path, reps, seed, tn, restarts, workers,
               uniform_clustering, progress, as_json, as_csv, out):
    """Run a simulation preset (1, 2a-2d, 3, 4a-4c) or a custom config."""
    cfg = _load_config(preset, config_path)
    tick = (lambda r: click.echo(".", err=True, nl=False)) if progress else None
    clustering = {"npca": {}} if uniform_clustering else None
    report = experiments.run_experiment(cfg, seed=seed, reps=reps, T_n=tn,
                                        restarts=restarts, workers=workers,
                                        progress=tick, clustering=clustering)
    if progress:
        click.echo("", err=True)
    if as_csv:
        _emit(report.to_csv(), out)
    elif as_json:
        _emit(report.to_json(), out)
    else:
        _emit(report.to_table(), out)


def _spectra_rows(what, g, cfg, k, seed):
    if what == "empirical":
        if g is None:
            raise ValueError("empirical spectra need --input")
        g0, _ = graph.giant_component(g)
        spectrum = eigen.leading_eigs(g0, k,
                                      seed=derived_seed(seed or 0, "eigs"))
        return [{"k": i + 1, "lambda": p.value, "residual": p.residual}
                for i, p in enumerate(spectrum.pairs)], {"n0": g0.n}
    if cfg is None:
        raise ValueError(f"{what} spectra need --preset or --config")
    theta = dcbm.permuted_theta(cfg.theta, cfg.n, cfg.seed if seed is None else seed)
    params = dcbm.DCBMParams(K=cfg.K, A=cfg.a_matrix(), theta=theta,
                             sizes=cfg.block_sizes())
    truth = dcbm.block_labels(cfg.block_sizes())
    if what == "population":
        ps = dcbm.population_spectrum(params, truth)
        dists = dcbm.population_ratio_matrix(ps) if cfg.K >= 2 else None
        rows = [{"k": i + 1, "lambda": lam,
                 "dad_eigenvalue": lam / float(params.theta @ params.theta)}
                for i, lam in enumerate(ps.lambdas)]
        extra = {"ratio_rows_min_distance":
                 None if dists is None else _min_row_distance(dists.R)}
        return rows, extra
    diag = dcbm.diagnostics(params, truth)
    rows = [{"quantity": name, "value": getattr(diag, name)}
            for name in ("eigengap", "err_n", "osnr", "nsnr", "wnorm_bound",
                         "osc", "regularity_ratio", "mdv_ok", "mdm_ok")]
    return rows, {}


def _min_row_distance(R):
    rows = np.unique(np.round(R, 9), axis=0)
    if rows.shape[0] < 2:
        return None
    dists = [float(np.linalg.norm(rows[i] - rows[j]))
             for i in range(len(rows)) for j in range(i + 1, len(rows))]
    return min(dists)


@main.command()
@click.argument("what", type=click.Choice(["empirical", "population",
                                           "diagnostics"]))
@click.option("--input", "input_spec", default=None,
              help="Edge-list path or builtin:<name> (empirical).")
@click.option("--preset", default=None, help="Experiment preset id.")
@click.option("--config", "config_path", default=None,
              help="Plain-text config file.")
@click.option("--k", "k", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.option("--csv", "as_csv", is_flag=True)
@click.option("--out", default=None, help="Write output to a file.")
@_guard
def spectra(what, input_spec, preset, config_path, k, seed, as_json, as_csv,
            out):
    """Inspect empirical or closed-form spectra, or model diagnostics."""
    g = None
    cfg = None
    if input_spec:
        g, _ = _load_graph(input_spec)
    if preset or config_path:
        cfg = _load_config(preset, config_path)
    rows, extra = _spectra_rows(what, g, cfg, k, seed)
    if as_csv:
        buf = io.StringIO()
        cols = list(rows[0])
        buf.write(",".join(cols) + "\n")
        for row in rows:
            buf.write(",".join(str(row[c]) for c in cols) + "\n")
        _emit(buf.getvalue(), out)
    elif as_json:
        _emit(json.dumps({"rows": rows, **extra}, indent=2), out)
    else:
        lines = [" ".join(f"{key}={value}" for key, value in row.items())
                 for row in rows]
        lines += [f"{key} = {value}" for key, value in extra.items()]
        _emit("\n".join(lines), out)


@main.command("eval")
@click.option("--estimated", required=True, help="'node label' file to score.")
@click.option("--truth", required=True, help="'node label' reference file.")
@click.option("--k", "k", type=int, default=None,
              help="Community count; default: distinct labels seen.")
@click.option("--json", "as_json", is_flag=True)
@click.option("--out", default=None, help="Write output to a file.")
@_guard
def eval_cmd(estimated, truth, k, as_json, out):
    """Permutation-minimized Hamming error between two label files."""
    with open(_resolve_path(truth)) as fh:
        truth_map = _read_label_map(fh)
    with open(_resolve_path(estimated)) as fh:
        est_map = _read_label_map(fh)
    missing = sorted(set(truth_map) - set(est_map))
    if missing:
        raise DataError(f"{len(missing)} nodes missing from estimated labels "
                        f"(first: {missing[0]!r})")
    order = list(truth_map)
    est_codes = _codes([est_map[tok] for tok in order])
    tru_codes = _codes([truth_map[tok] for tok in order])
    K = k or max(est_codes.max(), tru_codes.max())
    ham = metrics.hamming_error(est_codes, tru_codes, int(K))
    payload = {"n": len(order), "K": int(K), "mismatches": ham.mismatches,
               "rate": ham.rate, "best_perm": list(ham.best_perm)}
    if as_json:
        _emit(json.dumps(payload, indent=2), out)
    else:
        _emit("\n".join(f"{key} = {value}" for key, value in payload.items()),
              out)


def _read_label_map(fh):
    table = {}
    for line_no, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        toks = line.replace(",", " ").split()  # detect --csv output works too
        if toks == ["node", "label"]:
            continue
        if len(toks) != 2:
            raise DataError(f"line {line_no}: expected 'node label'")
        table[toks[0]] = toks[1]
    if not table:
        raise DataError("empty label file")
    return table


def _codes(tokens):
    seen = {}
    out = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        if tok not in seen:
            seen[tok] = len(seen) + 1
        out[i] = seen[tok]
    return out


if __name__ == "__main__":
    main()
