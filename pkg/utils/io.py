import csv
import io
import json
import math
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.results import DistributionCurve, CurvePoint, McSummary, VerificationReport

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 15


def fmt(x: float) -> str:
    """Number with 15 significant digits, locale independent"""
    return f"{x:.{SIGNIFICANT_DIGITS}g}"


def _rounded(obj: Any) -> Any:
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(fmt(obj))
    if isinstance(obj, (np.floating, np.integer)):
        return _rounded(obj.item())
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(_rounded(payload), indent=2, default=str)


def curve_to_json(curve: DistributionCurve, config: Optional[Dict[str, Any]] = None) -> str:
    payload = {
        "params": curve.params,
        "method": curve.method,
        "points": [{"s": p.s, "F": p.F, "err": p.err} for p in curve.points],
    }
    if config is not None:
        payload["config"] = config
    return dumps(payload)


def curve_from_json(text: str) -> DistributionCurve:
    data = json.loads(text)
    return DistributionCurve(
        params=data.get("params", {}),
        method=data.get("method", {}),
        points=[CurvePoint(**p) for p in data["points"]],
    )


def curve_to_csv(curve: DistributionCurve) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "F", "err"])
    for p in curve.points:
        writer.writerow([fmt(p.s), fmt(p.F), fmt(p.err)])
    return buf.getvalue()


def curve_from_csv(text: str) -> DistributionCurve:
    reader = csv.DictReader(io.StringIO(text))
    points = [CurvePoint(s=float(r["s"]), F=float(r["F"]), err=float(r["err"])) for r in reader]
    return DistributionCurve(points=points)


def summary_to_json(summary: McSummary, config: Optional[Dict[str, Any]] = None) -> str:
    payload = summary.model_dump()
    if config is not None:
        payload["config"] = config
    return dumps(payload)


def summary_to_csv(summary: McSummary) -> str:
    """Empirical CDF export: s, F_hat, band"""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["s", "F_hat", "band"])
    for s, F in zip(summary.grid, summary.empirical_cdf):
        writer.writerow([fmt(s), fmt(F), fmt(summary.dkw_band)])
    return buf.getvalue()


def report_to_json(report: VerificationReport, config: Optional[Dict[str, Any]] = None) -> str:
    payload = {
        "suite": report.suite,
        "passed": report.passed,
        "checks": [c.model_dump() for c in report.checks],
    }
    if config is not None:
        payload["config"] = config
    return dumps(payload)


def table_to_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow([fmt(float(v)) for v in row])
    return buf.getvalue()


KERNEL_GRID_HEADER = ("x", "y", "k11", "k12", "k21", "k22")


def kernel_grid_rows(xs: np.ndarray, ys: np.ndarray, values: np.ndarray) -> List[Tuple[float, ...]]:
    """
    Kernel grid as rows (x, y, k11, k12, k21, k22)

    Args:
        xs, ys: Evaluation points
        values: Array of shape (2, 2, len(xs), len(ys))
    """
    rows = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            rows.append((x, y, values[0, 0, i, j], values[0, 1, i, j],
                         values[1, 0, i, j], values[1, 1, i, j]))
    return rows


def kernel_grid_to_csv(xs: np.ndarray, ys: np.ndarray, values: np.ndarray) -> str:
    return table_to_csv(KERNEL_GRID_HEADER, kernel_grid_rows(xs, ys, values))


def write_matrix(path: str, matrix: np.ndarray) -> None:
    """Binary dump: int64 (rows, cols) header, then float64 row-major entries"""
    matrix = np.ascontiguousarray(matrix, dtype=np.float64)
    with open(path, "wb") as fh:
        np.asarray(matrix.shape, dtype=np.int64).tofile(fh)
        matrix.tofile(fh)
    logger.debug(f"Wrote {matrix.shape[0]}x{matrix.shape[1]} matrix to {path}")


def read_matrix(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        rows, cols = np.fromfile(fh, dtype=np.int64, count=2)
        data = np.fromfile(fh, dtype=np.float64, count=int(rows * cols))
    return data.reshape(int(rows), int(cols))


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
