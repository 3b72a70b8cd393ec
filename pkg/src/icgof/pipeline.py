"""Real-data workflow: column subsampling, centering, optional removal of the
top principal components, and median p-value curves over subset sizes."""
from __future__ import annotations

import csv
import enum
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import IcgofError, IngestError, InvalidInput
from .gof import run_test
from .seeding import derive_seed, make_rng

CURVE_HEADER = ("d", "variant", "median_p", "n_reps")


class Orientation(str, enum.Enum):
    ROWS_ARE_OBSERVATIONS = "rows"
    COLUMNS_ARE_OBSERVATIONS = "columns"


class Variant(str, enum.Enum):
    ORIGINAL = "original"
    NOISY = "noisy"


@dataclass(frozen=True)
class ExprDataset:
    values: np.ndarray
    column_ids: tuple[str, ...] | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CurveRow:
    d: int
    median_p: float
    n_reps: int
    variant: Variant


@dataclass
class CurveReport:
    rows: list[CurveRow] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)


def ingest_csv(stream, has_header: bool = False,
               orientation: Orientation = Orientation.ROWS_ARE_OBSERVATIONS) -> ExprDataset:
    """Parse a rectangular numeric CSV table.

    ``stream`` may be text or a binary file object. Ragged rows and
    non-numeric cells raise :class:`IngestError` naming the first offending
    line (1-based, counting the header) and the total number of bad cells.
    """
    if isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, io.BufferedIOBase) or "b" in getattr(stream, "mode", ""):
        stream = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    reader = csv.reader(stream)
    header = None
    rows: list[list[float]] = []
    width = None
    bad_cells = 0
    first_bad = None
    for lineno, raw in enumerate(reader, start=1):
        if not raw or all(not cell.strip() for cell in raw):
            continue
        if has_header and header is None:
            header = tuple(cell.strip() for cell in raw)
            width = len(header)
            continue
        if width is None:
            width = len(raw)
        if len(raw) != width:
            raise IngestError(f"line {lineno}: expected {width} fields, found {len(raw)}")
        vals = []
        for col, cell in enumerate(raw, start=1):
            try:
                v = float(cell)
            except ValueError:
                v = math.nan
            if not math.isfinite(v):
                bad_cells += 1
                if first_bad is None:
                    first_bad = (lineno, col, cell)
            vals.append(v)
        rows.append(vals)
    if bad_cells:
        line, col, cell = first_bad
        raise IngestError(
            f"{bad_cells} non-numeric or non-finite cell(s); first at line {line}, column {col}: {cell!r}"
        )
    if not rows:
        raise IngestError("no data rows")
    values = np.asarray(rows, dtype=float)
    ids = header
    if Orientation(orientation) is Orientation.COLUMNS_ARE_OBSERVATIONS:
        values = values.T.copy()
        ids = None
    return ExprDataset(values, ids)


def subsample_columns(ds: ExprDataset, d: int, seed) -> ExprDataset:
    """``d`` distinct columns drawn without replacement, in sampled order."""
    if not 1 <= d <= ds.p:
        raise InvalidInput(f"d must lie in [1, {ds.p}], got {d}")
    idx = make_rng(seed).choice(ds.p, size=d, replace=False)
    ids = tuple(ds.column_ids[i] for i in idx) if ds.column_ids else None
    return ExprDataset(ds.values[:, idx], ids, {**ds.meta, "columns": idx.tolist()})


def center_rows(ds: ExprDataset) -> ExprDataset:
    """Subtract the sample mean vector from every observation."""
    if ds.n < 2:
        raise InvalidInput("centering needs at least 2 observations")
    v = ds.values - ds.values.mean(axis=0, keepdims=True)
    return replace(ds, values=v)


def noisy_residuals(ds: ExprDataset, top_frac: float) -> ExprDataset:
    """Zero the ``floor(top_frac * d)`` largest singular values (at least one)."""
    if not 0.0 < top_frac < 1.0:
        raise InvalidInput(f"top_frac must lie in (0, 1), got {top_frac}")
    raw_k = math.floor(top_frac * ds.p)
    k = max(raw_k, 1)
    u, s, vt = np.linalg.svd(ds.values, full_matrices=False)
    s = s.copy()
    s[:k] = 0.0
    out = (u * s) @ vt
    return replace(ds, values=out, meta={**ds.meta, "removed_components": k, "k_enforced": raw_k < 1})


def lower_median(values) -> float:
    """Order statistic ``ceil(m/2)`` of ``m`` values (no averaging)."""
    v = sorted(values)
    if not v:
        return math.nan
    return v[math.ceil(len(v) / 2) - 1]


def _pvalues_for_rep(ds: ExprDataset, d: int, rep: int, alpha: float, seed, variants, top_frac) -> dict:
    sub = center_rows(subsample_columns(ds, d, derive_seed(seed, d, rep)))
    out = {}
    for variant in variants:
        data = sub if variant is Variant.ORIGINAL else noisy_residuals(sub, top_frac)
        try:
            out[variant] = run_test(data.values, alpha).p_value
        except IcgofError as exc:
            out[variant] = exc
    return out


def pvalue_curves(ds: ExprDataset, d_list, reps: int = 100, alpha: float = 0.05, seed=0,
                  variants=(Variant.ORIGINAL, Variant.NOISY), top_frac: float = 0.2,
                  threads: int = 1) -> CurveReport:
    """Median p-value per (variant, d) over ``reps`` column subsamples.

    The same subsample feeds every variant of a given (d, rep).
    """
    variants = tuple(Variant(v) for v in variants)
    d_list = sorted(set(int(d) for d in d_list))
    if reps < 1:
        raise InvalidInput("reps must be >= 1")
    if d_list and d_list[-1] > ds.p:
        raise InvalidInput(f"d={d_list[-1]} exceeds the number of columns; max d is {ds.p}")
    if ds.n % 2:
        warnings.warn(f"n={ds.n} is odd; dropping the last observation", RuntimeWarning, stacklevel=2)
        ds = replace(ds, values=ds.values[:-1])

    jobs = [(d, rep) for d in d_list for rep in range(reps)]

    def work(job):
        return _pvalues_for_rep(ds, job[0], job[1], alpha, seed, variants, top_frac)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]

    report = CurveReport()
    for variant in variants:
        for d in d_list:
            pvals = []
            for (jd, rep), res in zip(jobs, results):
                if jd != d:
                    continue
                val = res[variant]
                if isinstance(val, Exception):
                    report.errors.append({"d": d, "rep": rep, "variant": variant.value, "error": str(val)})
                else:
                    pvals.append(val)
            report.rows.append(CurveRow(d, lower_median(pvals), len(pvals), variant))
    return report


def curves_to_csv(r: CurveReport) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for row in r.rows:
        w.writerow([row.d, row.variant.value, repr(float(row.median_p)), row.n_reps])
    return buf.getvalue().encode("utf-8")
