import io

import numpy as np
import pytest

from icgof import datagen as dg
from icgof import pipeline as pl
from icgof.errors import IngestError, InvalidInput


def ds(values, ids=None):
    return pl.ExprDataset(np.asarray(values, dtype=float), ids)


def test_ingest_zeros():
    d = pl.ingest_csv(io.StringIO("0,0\n0,0\n0,0\n"))
    assert (d.n, d.p) == (3, 2)


def test_ingest_header():
    d = pl.ingest_csv(io.StringIO("g1,g2\n1,2\n3,4\n"), has_header=True)
    assert (d.n, d.p) == (2, 2)
    assert d.column_ids == ("g1", "g2")


def test_ingest_transpose():
    text = "\n".join(",".join(str(i * 3 + j) for j in range(3)) for i in range(5)) + "\n"
    d = pl.ingest_csv(io.StringIO(text), orientation=pl.Orientation.COLUMNS_ARE_OBSERVATIONS)
    assert (d.n, d.p) == (3, 5)
    assert d.values[1, 0] == 1


def test_ingest_bytes_and_blank_lines():
    d = pl.ingest_csv(b"1,2\n\n3,4\n")
    np.testing.assert_array_equal(d.values, [[1, 2], [3, 4]])


def test_ingest_ragged():
    with pytest.raises(IngestError, match="line 2"):
        pl.ingest_csv(io.StringIO("1,2\n3\n"))


def test_ingest_non_numeric_reports_location_and_count():
    with pytest.raises(IngestError, match=r"2 non-numeric.*line 2, column 2"):
        pl.ingest_csv(io.StringIO("1,2\n3,x\nnan,4\n"))


def test_subsample_columns():
    base = ds(np.arange(12).reshape(3, 4), ("a", "b", "c", "d"))
    full = pl.subsample_columns(base, 4, 0)
    assert sorted(full.column_ids) == ["a", "b", "c", "d"]
    assert pl.subsample_columns(base, 1, 0).p == 1
    a = pl.subsample_columns(base, 2, 5)
    b = pl.subsample_columns(base, 2, 5)
    assert a.column_ids == b.column_ids and np.array_equal(a.values, b.values)
    with pytest.raises(InvalidInput):
        pl.subsample_columns(base, 5, 0)


def test_center_rows():
    np.testing.assert_array_equal(pl.center_rows(ds(np.full((4, 3), 2.5))).values, 0)
    r = np.random.default_rng(0).standard_normal((10, 4))
    once = pl.center_rows(ds(r))
    np.testing.assert_allclose(once.values.mean(0), 0, atol=1e-12)
    np.testing.assert_allclose(pl.center_rows(once).values, once.values, atol=1e-12)
    two = pl.center_rows(ds([[2.0, -4.0], [0.0, 0.0]])).values
    np.testing.assert_allclose(two, [[1.0, -2.0], [-1.0, 2.0]])


def test_noisy_residuals_rank_one():
    u = np.arange(1.0, 7.0)
    v = np.array([1.0, -1.0, 2.0, 0.5, 3.0])
    out = pl.noisy_residuals(ds(np.outer(u, v)), 0.2)
    np.testing.assert_allclose(out.values, 0, atol=1e-12)


def test_noisy_residuals_orthogonal_columns():
    q = np.linalg.qr(np.random.default_rng(1).standard_normal((8, 5)))[0]
    x = q * np.array([3.0, 2.0, 1.0, 1.0, 1.0])
    assert np.sum(x**2) == pytest.approx(16)
    out = pl.noisy_residuals(ds(x), 0.2)
    assert out.meta["removed_components"] == 1
    assert np.sum(out.values**2) == pytest.approx(7)


def test_noisy_residuals_enforces_one_component():
    x = np.random.default_rng(2).standard_normal((6, 3))
    out = pl.noisy_residuals(ds(x), 0.2)
    assert out.meta == {"removed_components": 1, "k_enforced": True}
    with pytest.raises(InvalidInput):
        pl.noisy_residuals(ds(x), 0.0)


def test_noisy_residuals_spectrum():
    x = np.random.default_rng(3).standard_normal((30, 20))
    s_in = np.linalg.svd(x, compute_uv=False)
    out = pl.noisy_residuals(ds(x), 0.2).values
    s_out = np.linalg.svd(out, compute_uv=False)
    assert np.linalg.matrix_rank(out) <= 20 - 4
    assert s_out[0] == pytest.approx(s_in[4], rel=1e-9)


def test_lower_median():
    assert pl.lower_median([0.3]) == 0.3
    assert pl.lower_median([0.4, 0.1, 0.9, 0.2]) == 0.2
    assert pl.lower_median([5, 1, 3]) == 3


def _null_dataset(n=200, p=120, seed=11):
    return ds(dg.gen_null(n, dg.CovStructure.preset("II", p), dg.ComponentDist.T15, seed))


def test_curves_reps_one_is_single_pvalue():
    data = _null_dataset()
    rep = pl.pvalue_curves(data, [40], reps=1, seed=4, variants=["original"])
    (row,) = rep.rows
    sub = pl.center_rows(pl.subsample_columns(data, 40, pl.derive_seed(4, 40, 0)))
    assert row.median_p == pl.run_test(sub.values).p_value
    assert row.n_reps == 1


def test_curves_shape_and_order():
    rep = pl.pvalue_curves(_null_dataset(), [30, 10, 20], reps=3, seed=0)
    assert [(r.variant.value, r.d) for r in rep.rows] == [
        ("original", 10), ("original", 20), ("original", 30),
        ("noisy", 10), ("noisy", 20), ("noisy", 30),
    ]
    assert all(0 <= r.median_p <= 1 for r in rep.rows)


def test_curves_reject_large_d():
    with pytest.raises(InvalidInput, match="max d is 120"):
        pl.pvalue_curves(_null_dataset(), [200], reps=1)


def test_curves_deterministic_across_threads():
    data = _null_dataset()
    a = pl.curves_to_csv(pl.pvalue_curves(data, [20, 40], reps=6, seed=2, threads=1))
    b = pl.curves_to_csv(pl.pvalue_curves(data, [20, 40], reps=6, seed=2, threads=4))
    assert a == b
    assert a.decode().splitlines()[0] == "d,variant,median_p,n_reps"


def test_null_median_near_half():
    data = ds(dg.gen_null(260, dg.CovStructure.preset("I", 300), dg.ComponentDist.GAUSSIAN, 8))
    (row,) = pl.pvalue_curves(data, [100], reps=100, seed=1, variants=["original"]).rows
    assert 0.3 <= row.median_p <= 0.7


def test_odd_n_warns_once():
    data = _null_dataset(n=201)
    with pytest.warns(RuntimeWarning, match="odd"):
        rep = pl.pvalue_curves(data, [10], reps=2, variants=["original"])
    assert rep.rows[0].n_reps == 2
