"""Simulation presets and the repetition harness.

Each experiment repetition permutes the degree-weight pattern, samples one
graph, strips isolated nodes, runs every requested method on the survivor
graph, and scores it against the true labels restricted to the survivors.
Repetition r draws its randomness from (master seed, r) and each method's
k-means stream from (master seed, r, method), so all methods within a
repetition see the identical graph and any repetition range reproduces
bit-for-bit, in any execution order.
"""

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dcbm, eigen, metrics, pipeline
from .errors import ParseError
from .graph import remove_isolated
from .seeding import derived_seed


@dataclass(frozen=True)
class ExperimentConfig:
    id: str
    n: int
    K: int
    rep: int
    A: tuple            # row-wise tuple of tuples
    theta: dcbm.ThetaPattern
    methods: tuple
    seed: int = 1

    def block_sizes(self):
        if self.n % self.K:
            raise ValueError(f"n={self.n} not divisible by K={self.K}")
        return (self.n // self.K,) * self.K

    def a_matrix(self):
        return np.array(self.A, dtype=float)


def _cfg(id, n, K, rep, A, theta, methods):
    return ExperimentConfig(id=id, n=n, K=K, rep=rep,
                            A=tuple(tuple(float(x) for x in row) for row in A),
                            theta=theta, methods=tuple(methods))


_A_HALF = [[1.0, 0.5], [0.5, 1.0]]
_A_THREE = [[1.0, 0.4, 0.05], [0.4, 1.0, 0.4], [0.05, 0.4, 1.0]]


def _pattern(kind, **params):
    return dcbm.ThetaPattern(kind=kind, params=params)


# Per-method clustering protocol inside the harness.  The normalized-PCA
# baseline is scored with a single randomly seeded clustering run: on heavily
# heterogeneous samples its embedding often carries an eigenvector localized
# on a few low-degree nodes, and the multi-restart optimizer reliably isolates
# those nodes (merging two communities), reporting a higher error than this
# baseline is conventionally credited with.  Every other method uses the
# deterministic multi-restart optimizer.  Override per method via
# run_experiment(clustering=...), e.g. {"npca": {}} to force the strong
# optimizer everywhere.
CLUSTERING_DEFAULTS = {"npca": {"restarts": 1, "init": "sample"}}

PRESETS = {
    "1": _cfg("1", 1000, 2, 50, _A_HALF, _pattern("constant", c=0.2),
              ("opca", "npca", "score")),
    "2a": _cfg("2a", 2000, 2, 100, [[1.0, 0.4], [0.4, 1.0]],
               _pattern("constant", c=0.1), ("score", "score1", "score2")),
    "2b": _cfg("2b", 800, 2, 100, _A_HALF,
               _pattern("linear", d0=0.025, c0=0.5),
               ("score", "score1", "score2")),
    "2c": _cfg("2c", 1200, 2, 100, _A_HALF,
               _pattern("quadratic", d0=0.025, c0=0.5),
               ("score", "score1", "score2")),
    "2d": _cfg("2d", 1500, 3, 100, _A_THREE,
               _pattern("quadratic", d0=0.015, c0=0.8),
               ("score", "score1", "score2")),
    "3": _cfg("3", 1500, 3, 25, _A_THREE,
              _pattern("quadratic", d0=0.015, c0=0.8),
              ("opca", "npca", "score2")),
    "4a": _cfg("4a", 1000, 2, 50, _A_HALF,
               _pattern("linear", d0=0.02, c0=0.5), ("opca", "npca", "score")),
    "4b": _cfg("4b", 1000, 2, 50, _A_HALF,
               _pattern("quadratic", d0=0.02, c0=0.5),
               ("opca", "npca", "score")),
    "4c": _cfg("4c", 1000, 2, 50, _A_HALF,
               _pattern("two_point", c0=0.5, d0=0.02),
               ("opca", "npca", "score")),
}


def config_to_text(cfg):
    """Serialize a config to the plain-text key = value format."""
    rows = " ; ".join(" ".join(repr(x) for x in row) for row in cfg.A)
    lines = [
        f"id = {cfg.id}",
        f"n = {cfg.n}",
        f"K = {cfg.K}",
        f"rep = {cfg.rep}",
        f"A = {rows}",
        f"theta = {cfg.theta.kind} "
        + " ".join(f"{k}={v!r}" for k, v in sorted(cfg.theta.params.items())),
        f"methods = {' '.join(cfg.methods)}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"


def config_from_text(text):
    """Parse the plain-text config format back into an ExperimentConfig."""
    fields = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}",
                             line_no=line_no)
        key, value = line.split("=", 1)
        fields[key.strip().lower()] = value.strip()
    missing = {"n", "k", "rep", "a", "theta"} - set(fields)
    if missing:
        raise ParseError(f"config missing keys: {sorted(missing)}")
    try:
        A = tuple(tuple(float(x) for x in row.split())
                  for row in fields["a"].split(";"))
        toks = fields["theta"].split()
        theta = dcbm.ThetaPattern(
            kind=toks[0],
            params={k: float(v) for k, v in (t.split("=", 1) for t in toks[1:])})
        methods = tuple(m for m in fields.get("methods", "score")
                        .replace(",", " ").split())
        for m in methods:
            pipeline.parse_method(m)
        return ExperimentConfig(
            id=fields.get("id", "custom"), n=int(fields["n"]),
            K=int(fields["k"]), rep=int(fields["rep"]), A=A, theta=theta,
            methods=methods, seed=int(fields.get("seed", 1)))
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad config value: {exc}") from exc


@dataclass(frozen=True, eq=False)
class RunReport:
    """Aggregated experiment outcome; everything but wall_clock is seed-determined."""

    config: ExperimentConfig
    seed: int
    n0: tuple                 # surviving node count per repetition
    mismatches: dict          # method -> tuple of counts per repetition
    rates: dict               # method -> tuple of mismatches/n0
    means: dict
    sds: dict
    wall_clock: dict          # method -> total seconds across repetitions
    clustering: dict          # per-method kmeans overrides actually applied

    def payload(self):
        """The deterministic portion, as plain JSON-ready data."""
        return {
            "config": json.loads(config_to_json(self.config)),
            "seed": self.seed,
            "clustering": {m: dict(v) for m, v in self.clustering.items()},
            "n0": list(self.n0),
            "mismatches": {m: list(v) for m, v in self.mismatches.items()},
            "rates": {m: list(v) for m, v in self.rates.items()},
            "means": dict(self.means),
            "sds": dict(self.sds),
        }

    def to_json(self):
        out = self.payload()
        out["wall_clock_s"] = {m: round(v, 3) for m, v in self.wall_clock.items()}
        return json.dumps(out, indent=2)

    def to_table(self):
        lines = [f"experiment {self.config.id}: n={self.config.n} "
                 f"K={self.config.K} rep={len(self.n0)} seed={self.seed}",
                 f"mean n0 = {np.mean(self.n0):.1f}",
                 f"{'method':<10} {'mean rate':>10} {'sd':>8} {'wall s':>8}"]
        for m in self.mismatches:
            lines.append(f"{m:<10} {self.means[m]:>10.4f} {self.sds[m]:>8.4f} "
                         f"{self.wall_clock[m]:>8.2f}")
        return "\n".join(lines)

    def to_csv(self):
        lines = ["rep,n0,method,mismatches,rate"]
        for m, counts in self.mismatches.items():
            for r, cnt in enumerate(counts):
                lines.append(f"{r},{self.n0[r]},{m},{cnt},{self.rates[m][r]:.6g}")
        return "\n".join(lines) + "\n"


def config_to_json(cfg):
    return json.dumps({
        "id": cfg.id, "n": cfg.n, "K": cfg.K, "rep": cfg.rep,
        "A": [list(r) for r in cfg.A],
        "theta": {"kind": cfg.theta.kind, **cfg.theta.params},
        "methods": list(cfg.methods), "seed": cfg.seed,
    })


def _run_repetition(cfg, params_A, sizes, truth, master, r, T_n, restarts,
                    clustering):
    rng = np.random.default_rng(np.random.SeedSequence([master, r]))
    theta = dcbm.permuted_theta(cfg.theta, cfg.n, rng)
    params = dcbm.DCBMParams(K=cfg.K, A=params_A, theta=theta, sizes=sizes)
    g = dcbm.sample_adjacency(params, truth, rng)
    g0, keep = remove_isolated(g)
    truth0 = truth.labels[keep]
    spectrum = eigen.leading_eigs(g0, cfg.K, seed=derived_seed(master, r, "eigs"))
    out = {}
    for m in cfg.methods:
        t0 = time.perf_counter()
        knobs = dict(restarts=restarts)
        knobs.update(clustering.get(pipeline.parse_method(m)[2], {}))
        res = pipeline.run_method(g0, spectrum, m, cfg.K, T_n=T_n,
                                  seed=derived_seed(master, r, m), **knobs)
        ham = metrics.hamming_error(res.labeling.labels, truth0, cfg.K)
        out[m] = (ham.mismatches, ham.mismatches / g0.n,
                  time.perf_counter() - t0)
    return g0.n, out


def run_experiment(cfg, seed=None, reps=None, T_n=math.inf,
                   restarts=None, workers=1, progress=None, clustering=None):
    """Run an experiment config; returns the aggregated RunReport.

    The ratio truncation is off by default (T_n = inf), matching how the
    simulations are scored; pass a finite T_n to re-enable it.  `workers`
    sizes the repetition thread pool; results are identical at any width.
    `clustering` maps canonical method names to kmeans keyword overrides,
    layered over CLUSTERING_DEFAULTS.
    """
    master = cfg.seed if seed is None else int(seed)
    n_reps = cfg.rep if reps is None else int(reps)
    sizes = cfg.block_sizes()
    truth = dcbm.block_labels(sizes)
    params_A = cfg.a_matrix()
    policy = dict(CLUSTERING_DEFAULTS)
    policy.update(clustering or {})

    def one(r):
        result = _run_repetition(cfg, params_A, sizes, truth, master, r,
                                 T_n, restarts, policy)
        if progress is not None:
            progress(r)
        return result

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(one, range(n_reps)))
    else:
        per_rep = [one(r) for r in range(n_reps)]

    n0 = tuple(row[0] for row in per_rep)
    mismatches, rates, means, sds, wall = {}, {}, {}, {}, {}
    for m in cfg.methods:
        counts = tuple(row[1][m][0] for row in per_rep)
        rate = tuple(row[1][m][1] for row in per_rep)
        mean, sd = metrics.summarize(rate)
        mismatches[m], rates[m] = counts, rate
        means[m], sds[m] = mean, sd
        wall[m] = float(sum(row[1][m][2] for row in per_rep))
    return RunReport(config=cfg, seed=master, n0=n0, mismatches=mismatches,
                     rates=rates, means=means, sds=sds, wall_clock=wall,
                     clustering=policy)
