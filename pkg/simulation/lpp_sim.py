"""
Monte Carlo for half-space last passage percolation

Weights live on the triangle {(i, j): 1 <= j <= i <= N}; i is the horizontal
coordinate, j = 1 the first row and i = j the diagonal. Samples are drawn in
chunks, each chunk with its own SeedSequence child, and reduced in chunk order
so that a seed reproduces the same values for any worker count.
"""
import math
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from models.params import ModelParams, WeightMode
from models.results import IncrementReport, McSummary
from utils.exceptions import ParameterDomainError
from utils.settings import DEFAULT_SETTINGS, resolve_threads
from utils.validators import ParameterValidator

logger = logging.getLogger(__name__)

TARGETS = ("L", "L_pf", "L_pf_minus_corner")
MIN_CDF_SAMPLES = 10_000
# two-sided 99.7% Dvoretzky-Kiefer-Wolfowitz band
DKW_ALPHA = 0.003
PILOT_SAMPLES = 20_000

Site = Tuple[int, int]
BatchFn = Callable[[ModelParams, tuple, int, np.random.Generator], np.ndarray]


# ----------------------------------------------------------------------
# weights

def site_law(m: ModelParams, i: int, j: int) -> Tuple[str, float]:
    """
    Law of the weight at (i, j) as (kind, parameter)

    kind is "exp" (parameter = rate, mean 1/rate), "geom" (P(W = k) = (1 - p) p^k)
    or "zero".
    """
    if m.mode == WeightMode.GEOMETRIC:
        x_i = m.b if i == 1 else math.sqrt(m.q)
        x_j = m.b if j == 1 else math.sqrt(m.q)
        return ("geom", m.a * x_i) if i == j else ("geom", x_i * x_j)
    if i == 1 and j == 1:
        return ("zero", 0.0) if m.mode == WeightMode.STATIONARY else ("exp", m.alpha + m.beta)
    if i == j:
        return "exp", 0.5 + m.alpha
    if j == 1:
        return ("exp", 0.5 - m.alpha) if m.mode == WeightMode.STATIONARY else ("exp", 0.5 + m.beta)
    return "exp", 1.0


def draw(kind: str, param: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Inverse-CDF draws of one site law"""
    if kind == "zero" or (kind == "geom" and param == 0.0):
        return np.zeros(size)
    u = rng.random(size)
    if kind == "exp":
        return -np.log1p(-u) / param
    return np.floor(np.log1p(-u) / math.log(param))


def gen_weights(m: ModelParams, seed: Optional[int] = None,
                rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    One weight field as an N x N array, W[i-1, j-1] for j <= i and NaN above the diagonal

    Raises:
        ParameterDomainError: If the parameters do not fit the weight mode
    """
    ParameterValidator.validate_model(m)
    rng = rng or np.random.default_rng(seed)
    W = np.full((m.N, m.N), np.nan)
    for i in range(1, m.N + 1):
        for j in range(1, i + 1):
            W[i - 1, j - 1] = draw(*site_law(m, i, j), 1, rng)[0]
    return W


# ----------------------------------------------------------------------
# last passage times

def lpp_time(weights: np.ndarray, end: Optional[Site] = None) -> float:
    """
    Maximum of the weight sums over up-right paths from (1, 1) to end inside the half-space

    L(i, j) = W(i, j) + max(L(i-1, j), L(i, j-1)), neighbours outside j <= i
    excluded; one row of memory.
    """
    W = np.asarray(weights, dtype=float)
    N = W.shape[0]
    i_end, j_end = end or (N, N)
    if not 1 <= j_end <= i_end <= N:
        raise ParameterDomainError("Endpoint outside the half-space", errors=[f"end={(i_end, j_end)}, N={N}"])
    prev = np.full(i_end + 1, -np.inf)
    for i in range(1, i_end + 1):
        row = np.full(i_end + 1, -np.inf)
        for j in range(1, min(i, j_end) + 1):
            best = max(prev[j] if j <= i - 1 else -np.inf, row[j - 1] if j >= 2 else -np.inf)
            row[j] = W[i - 1, j - 1] + (0.0 if i == 1 and j == 1 else best)
        prev = row
    return float(prev[j_end])


def lpp_time_brute(weights: np.ndarray, end: Optional[Site] = None) -> float:
    """Exhaustive enumeration of the admissible up-right paths; for small N only"""
    W = np.asarray(weights, dtype=float)
    i_end, j_end = end or (W.shape[0], W.shape[0])
    steps = (i_end - 1) + (j_end - 1)
    best = -np.inf
    for ups in combinations(range(steps), j_end - 1):
        i, j, total, ok = 1, 1, W[0, 0], True
        up_set = set(ups)
        for k in range(steps):
            if k in up_set:
                j += 1
            else:
                i += 1
            if j > i:
                ok = False
                break
            total += W[i - 1, j - 1]
        if ok:
            best = max(best, total)
    return float(best)


def _lpp_rows(m: ModelParams, size: int, rng: np.random.Generator, last_row: int,
              keep: Sequence[int] = ()) -> Tuple[Dict[int, np.ndarray], np.ndarray]:
    """
    Batch DP over size independent fields up to row last_row

    Returns:
        Rows listed in keep (and last_row) as arrays of shape (size, i + 1) indexed
        by j, and the corner weights W(1, 1)
    """
    wanted = set(keep) | {last_row}
    kept: Dict[int, np.ndarray] = {}
    prev = np.full((size, 2), -np.inf)
    corner = np.zeros(size)
    for i in range(1, last_row + 1):
        row = np.full((size, i + 1), -np.inf)
        for j in range(1, i + 1):
            w = draw(*site_law(m, i, j), size, rng)
            if i == 1:
                corner = w
                row[:, 1] = w
                continue
            up = prev[:, j] if j <= i - 1 else np.full(size, -np.inf)
            left = row[:, j - 1] if j >= 2 else np.full(size, -np.inf)
            row[:, j] = w + np.maximum(up, left)
        if i in wanted:
            kept[i] = row
        prev = row
    return kept, corner


def _target_batch(m: ModelParams, extra: tuple, size: int, rng: np.random.Generator) -> np.ndarray:
    (target,) = extra
    rows, corner = _lpp_rows(m, size, rng, m.N)
    values = rows[m.N][:, m.N - m.n]
    if target == "L_pf_minus_corner":
        values = values - corner
    return values


def _run_chunk(args) -> np.ndarray:
    batch_fn, m, extra, size, seed_seq = args
    return batch_fn(m, extra, size, np.random.default_rng(seed_seq))


def run_chunks(batch_fn: BatchFn, m: ModelParams, extra: tuple, samples: int, seed: int,
               threads: Optional[int] = None, chunk_size: Optional[int] = None) -> np.ndarray:
    """
    Runs batch_fn over chunks of the sample budget and concatenates in chunk order

    Raises:
        ParameterDomainError: If samples or chunk size are not positive
    """
    chunk_size = chunk_size or DEFAULT_SETTINGS.mc_chunk_size
    ParameterValidator.validate_sampling(samples, chunk_size)
    sizes = [chunk_size] * (samples // chunk_size)
    if samples % chunk_size:
        sizes.append(samples % chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(batch_fn, m, extra, size, child) for size, child in zip(sizes, children)]
    workers = min(resolve_threads(threads), len(jobs))
    logger.debug(f"Monte Carlo: {samples} samples in {len(jobs)} chunk(s) on {workers} worker(s)")
    if workers == 1:
        results = [_run_chunk(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    return np.concatenate(results, axis=0)


def _check_target(m: ModelParams, target: str) -> None:
    errors = []
    if target not in TARGETS:
        errors.append(f"target must be one of {TARGETS}, got {target!r}")
    elif target != "L" and m.mode != WeightMode.TWO_PARAM:
        errors.append(f"target {target} needs the two-parameter model")
    if errors:
        raise ParameterDomainError("Invalid sampling target", errors=errors)


def sample_values(m: ModelParams, target: str = "L", samples: int = 100_000, seed: int = 0,
                  threads: Optional[int] = None, chunk_size: Optional[int] = None) -> np.ndarray:
    """Raw samples of L_{N,N-n}, L^pf or L^pf - W(1, 1)"""
    ParameterValidator.validate_model(m)
    _check_target(m, target)
    return run_chunks(_target_batch, m, (target,), samples, seed, threads, chunk_size)


def empirical_cdf(values: np.ndarray, grid: Sequence[float]) -> np.ndarray:
    ordered = np.sort(values)
    return np.searchsorted(ordered, np.asarray(grid, dtype=float), side="right") / ordered.size


def dkw_band(samples: int, alpha: float = DKW_ALPHA) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * samples))


def expected_mean(m: ModelParams) -> Optional[float]:
    """Exact mean of L_{N,N-n} in the stationary model"""
    if m.mode != WeightMode.STATIONARY:
        return None
    return m.finite().mean()


def sample_cdf(
    m: ModelParams,
    target: str = "L",
    samples: int = 100_000,
    seed: int = 0,
    grid: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    chunk_size: Optional[int] = None,
) -> McSummary:
    """
    Empirical CDF of an LPP time with a DKW confidence band

    Args:
        m: Model parameters
        target: "L", "L_pf" or "L_pf_minus_corner"
        samples: Sample count, at least 10^4
        seed: Root seed
        grid: Evaluation points; defaults to 33 quantiles spanning the central 99%

    Raises:
        ParameterDomainError: For too few samples or an invalid target or model
    """
    if samples < MIN_CDF_SAMPLES:
        raise ParameterDomainError("Too few samples for an empirical CDF",
                                   errors=[f"samples must be >= {MIN_CDF_SAMPLES}, got {samples}"])
    values = sample_values(m, target, samples, seed, threads, chunk_size)
    if grid is None:
        grid = quantile_grid(values, discrete=m.mode == WeightMode.GEOMETRIC)
    grid = [float(s) for s in grid]
    mean = float(np.mean(values))
    variance = float(np.var(values, ddof=1))
    ks_stats: Dict[str, float] = {}
    reference = expected_mean(m)
    if reference is not None and target == "L":
        ks_stats["mean_z"] = (mean - reference) / math.sqrt(variance / samples)
    logger.info(f"{m.mode.display_name} {target}: {samples} samples, mean {mean:.6g}, variance {variance:.6g}")
    return McSummary(
        mode=m.mode.code,
        target=target,
        samples=samples,
        mean=mean,
        variance=variance,
        grid=grid,
        empirical_cdf=empirical_cdf(values, grid).tolist(),
        dkw_band=dkw_band(samples),
        ks_stats=ks_stats,
        params=ParameterValidator.describe(m),
        seed=seed,
    )


def quantile_grid(values: np.ndarray, points: int = 33, mass: float = 0.99, discrete: bool = False) -> List[float]:
    """points quantiles spanning the central mass of the sample"""
    tail = 0.5 * (1.0 - mass)
    grid = np.quantile(values, np.linspace(tail, 1.0 - tail, points))
    if discrete:
        grid = np.unique(np.round(grid))
    return [float(s) for s in grid]


def pilot_grid(m: ModelParams, target: str = "L", points: int = 33, seed: int = 0,
               threads: Optional[int] = None) -> List[float]:
    """s-grid for the exact formulas from a cheap Monte Carlo pilot run"""
    values = sample_values(m, target, PILOT_SAMPLES, seed, threads)
    return quantile_grid(values, points, discrete=m.mode == WeightMode.GEOMETRIC)


# ----------------------------------------------------------------------
# stationarity of increments

def _local_batch(m: ModelParams, extra: tuple, size: int, rng: np.random.Generator) -> np.ndarray:
    a, b = extra
    rows, _ = _lpp_rows(m, size, rng, a + 1, keep=(a,))
    lo, hi = rows[a], rows[a + 1]
    H = hi[:, b + 1] - lo[:, b + 1]
    V = hi[:, b + 1] - hi[:, b]
    X = np.minimum(hi[:, b] - lo[:, b], lo[:, b + 1] - lo[:, b])
    return np.column_stack([H, V, X])


def _stationary(m: ModelParams) -> None:
    if m.mode != WeightMode.STATIONARY:
        raise ParameterDomainError("Increment tests need the stationary model", errors=[f"mode={m.mode.code}"])
    ParameterValidator.validate_model(m)


def _ks(values: np.ndarray, rate: float) -> float:
    return float(stats.kstest(values, "expon", args=(0.0, 1.0 / rate)).pvalue)


def increment_tests(m: ModelParams, i: int, j: int, samples: int = 100_000, seed: int = 0,
                    threads: Optional[int] = None, significance: float = 1e-3) -> IncrementReport:
    """
    H, V and X around the vertex with coordinates (j, i), 1 <= i < j

    H = L(j+1, i+1) - L(j, i+1) ~ Exp(1/2 - alpha), V = L(j+1, i+1) - L(j+1, i)
    ~ Exp(1/2 + alpha) and X = min(L(j+1, i) - L(j, i), L(j, i+1) - L(j, i)) ~ Exp(1),
    jointly independent. The larger index is the horizontal coordinate so the
    vertex lies strictly inside the half-space; m.N and m.n are not used.

    Raises:
        ParameterDomainError: If the model is not stationary or i >= j
    """
    _stationary(m)
    if not 1 <= i < j:
        raise ParameterDomainError("Increment vertex needs 1 <= i < j", errors=[f"i={i}, j={j}"])
    a, b = j, i
    local = m.model_copy(update={"N": a + 1, "n": 0})
    data = run_chunks(_local_batch, local, (a, b), samples, seed, threads)
    H, V, X = data[:, 0], data[:, 1], data[:, 2]
    corr = np.corrcoef(data, rowvar=False)
    report = IncrementReport(
        sites=[f"H({a + 1},{b + 1})", f"V({a + 1},{b + 1})", f"X({a},{b})"],
        samples=samples,
        ks_pvalues={"H": _ks(H, 0.5 - m.alpha), "V": _ks(V, 0.5 + m.alpha), "X": _ks(X, 1.0)},
        correlations={"H,V": float(corr[0, 1]), "H,X": float(corr[0, 2]), "V,X": float(corr[1, 2])},
        significance=significance,
        corr_bound=3.0 / math.sqrt(samples),
    )
    logger.info(f"Increments at ({a},{b}): KS {report.ks_pvalues}, corr {report.correlations}")
    return report


def staircase_path(K: int) -> List[Site]:
    """Down-right staircase from the diagonal point (K, K) to (2K - 1, 1), right step first"""
    if K < 2:
        raise ParameterDomainError("Staircase needs K >= 2", errors=[f"K={K}"])
    path = [(K, K)]
    while path[-1][1] > 1:
        a, b = path[-1]
        path.append((a + 1, b))
        path.append((a + 1, b - 1))
    return path


def _path_batch(m: ModelParams, extra: tuple, size: int, rng: np.random.Generator) -> np.ndarray:
    (path,) = extra
    first = path[0][0]
    rows, _ = _lpp_rows(m, size, rng, path[-1][0], keep=range(first, path[-1][0] + 1))
    incs = []
    for (a0, b0), (a1, b1) in zip(path, path[1:]):
        if a1 == a0 + 1:
            incs.append(rows[a1][:, b1] - rows[a0][:, b0])
        else:
            incs.append(rows[a0][:, b0] - rows[a1][:, b1])
    return np.column_stack(incs)


def path_increment_test(m: ModelParams, K: int = 3, samples: int = 100_000, seed: int = 0,
                        threads: Optional[int] = None, significance: float = 1e-3,
                        bins: int = 4) -> IncrementReport:
    """
    Increments along staircase_path(K): marginals by KS, independence screened by
    all pairwise correlations and binned chi-square tests on neighbouring pairs

    Right steps carry Exp(1/2 - alpha) increments, down steps Exp(1/2 + alpha).
    The correlation bound is Bonferroni-corrected over the pairs.
    """
    _stationary(m)
    path = staircase_path(K)
    local = m.model_copy(update={"N": path[-1][0], "n": 0})
    data = run_chunks(_path_batch, local, (tuple(path),), samples, seed, threads)
    labels, ks = [], {}
    for k in range(data.shape[1]):
        horizontal = k % 2 == 0
        label = f"{'H' if horizontal else 'V'}{k}"
        labels.append(label)
        ks[label] = _ks(data[:, k], 0.5 - m.alpha if horizontal else 0.5 + m.alpha)

    corr = np.corrcoef(data, rowvar=False)
    pairs = [(p, q) for p in range(len(labels)) for q in range(p + 1, len(labels))]
    correlations = {f"{labels[p]},{labels[q]}": float(corr[p, q]) for p, q in pairs}
    z = float(stats.norm.isf(significance / (2.0 * max(1, len(pairs)))))

    chi2 = {}
    edges = np.linspace(0.0, 1.0, bins + 1)[1:-1]
    for k in range(data.shape[1] - 1):
        x, y = data[:, k], data[:, k + 1]
        bx = np.searchsorted(np.quantile(x, edges), x)
        by = np.searchsorted(np.quantile(y, edges), y)
        table = np.zeros((bins, bins))
        np.add.at(table, (bx, by), 1.0)
        chi2[f"{labels[k]},{labels[k + 1]}"] = float(stats.chi2_contingency(table).pvalue)

    report = IncrementReport(sites=labels, samples=samples, ks_pvalues=ks, correlations=correlations,
                             chi2_pvalues=chi2, significance=significance, corr_bound=z / math.sqrt(samples))
    logger.info(f"Staircase from ({K},{K}): {len(labels)} increments, passed={report.passed}")
    return report
