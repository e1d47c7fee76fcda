from __future__ import annotations

import numpy as np
import pytest

from groupmix import fourier as fx
from groupmix import groups, nof
from groupmix.boost import (
    ExperimentLog,
    PreconditionError,
    boost_pipeline,
    flatten_bound_check,
    l2_sq_dist_to_uniform,
    l2_sq_via_norm_identity,
    l2_to_linf_check,
    numerical_floor,
    square_boost_check,
)
from groupmix.groups import ProductGroup
from groupmix.irreps import get_irreps, quasirandomness_degree

SEED = 2024


@pytest.fixture(scope="module")
def c5():
    return groups.build_group(groups.cyclic(5))


def make_eps_k_uniform(space, k, rng, slack=0.9):
    """(|H|^-k, k)-uniform mixture: (1 - t) u + t r with t small enough."""
    n = space.base.order
    cells = float(n) ** k
    t = slack * (1.0 / cells) / (cells - 1.0)
    r = rng.random(space.size)
    r /= r.sum()
    return fx.make_dist(space, (1 - t) / space.size + t * r)


# ---------------------------------------------------------------------------
# distance helpers


def test_l2_sq_of_uniform(a5):
    assert l2_sq_dist_to_uniform(fx.uniform(a5)) == 0.0


def test_l2_sq_of_point_mass(a5, c6):
    for g in (a5, c6):
        n = g.order
        expected = (1 - 1 / n) ** 2 + (n - 1) / n**2   # equals 1 - 1/n
        got = l2_sq_dist_to_uniform(fx.point_mass(g, 0))
        assert abs(got - expected) < 1e-14
        assert abs(got - (1 - 1 / n)) < 1e-14


def test_l2_identity_formulas_agree(a5):
    rng = np.random.default_rng(SEED)
    for _ in range(50):
        v = rng.random(60)
        p = fx.make_dist(a5, v / v.sum())
        assert abs(l2_sq_dist_to_uniform(p) - l2_sq_via_norm_identity(p)) <= 1e-12


# ---------------------------------------------------------------------------
# flattening bound


def test_flatten_on_uniform(a5, irreps_cache):
    pg = ProductGroup(a5, 2)
    rec = flatten_bound_check(fx.uniform(pg), 1, 3, irreps_cache(a5))
    assert rec.lhs <= 1e-20 and rec.holds and rec.ratio is None


def test_flatten_on_synthetic_instances(c5, sl2_3, irreps_cache):
    rng = np.random.default_rng(SEED)
    cases = [(ProductGroup(c5, 3), 2, irreps_cache(c5)), (ProductGroup(sl2_3, 2), 1, irreps_cache(sl2_3))]
    for space, k, s in cases:
        d = quasirandomness_degree(s)
        for _ in range(5):
            p = make_eps_k_uniform(space, k, rng)
            rec = flatten_bound_check(p, k, d, s)
            assert rec.holds and rec.lhs <= rec.rhs + 1e-12


def test_flatten_on_box_mixtures(sl2_3, irreps_cache):
    # (1 - t) u + t q with q exactly 3-uniform stays (|H|^-3, 3)-uniform
    s_irr = irreps_cache(sl2_3)
    q = nof.box_to_dist(nof.exact_s(sl2_3, 2))
    rng = np.random.default_rng(SEED)
    for _ in range(5):
        t = rng.uniform(0, 0.5)
        p = fx.make_dist(q.space, (1 - t) * (1.0 / q.size) + t * q.values)
        rec = flatten_bound_check(p, 3, 1, s_irr)
        assert rec.holds


def test_flatten_precondition_reported(a5, irreps_cache):
    pg = ProductGroup(a5, 2)
    bad = fx.point_mass(pg, 0)
    with pytest.raises(PreconditionError, match="eps_1"):
        flatten_bound_check(bad, 1, 3, irreps_cache(a5))


# ---------------------------------------------------------------------------
# square boost


def test_square_boost_on_uniform(a5, irreps_cache):
    pg = ProductGroup(a5, 2)
    u = fx.uniform(pg)
    rec = square_boost_check(u, u, 1, irreps_cache(a5))
    assert rec.eps_conv <= 1e-12


def test_square_boost_on_identity_mixture(a5, irreps_cache):
    pg = ProductGroup(a5, 2)
    t = 1e-3
    v = (1 - t) / pg.size + t * np.eye(pg.size)[0]
    p = fx.make_dist(pg, v)
    rec = square_boost_check(p, p, 1, irreps_cache(a5))
    assert rec.eps_conv <= rec.eps_p**2 + 1e-12


def test_square_boost_random_pairs(c5, irreps_cache):
    pg = ProductGroup(c5, 3)
    rng = np.random.default_rng(SEED)
    for _ in range(20):
        p = make_eps_k_uniform(pg, 2, rng, slack=rng.uniform(0.1, 1.0))
        q = make_eps_k_uniform(pg, 2, rng, slack=rng.uniform(0.1, 1.0))
        rec = square_boost_check(p, q, 2, irreps_cache(c5))
        assert rec.holds


def test_square_boost_space_mismatch(a5, c5):
    with pytest.raises(fx.SpaceMismatchError):
        square_boost_check(fx.uniform(ProductGroup(a5, 2)), fx.uniform(ProductGroup(c5, 2)), 1)


# ---------------------------------------------------------------------------
# L2 -> Linf


def test_l2_linf_on_uniform(a5):
    rec = l2_to_linf_check(fx.uniform(a5))
    assert rec.linf <= rec.l2sq + 1e-15


def test_l2_linf_equality_at_point_mass(a5, c6):
    for g in (a5, c6):
        rec = l2_to_linf_check(fx.point_mass(g, 0))
        assert abs(rec.linf - (1 - 1 / g.order)) < 1e-12
        assert rec.holds


def test_l2_linf_random(sl2_5):
    rng = np.random.default_rng(SEED)
    for _ in range(30):
        v = rng.random(sl2_5.order)
        p = fx.make_dist(sl2_5, v / v.sum())
        assert l2_to_linf_check(p).holds


# ---------------------------------------------------------------------------
# pipeline


def test_pipeline_uniform_stops_immediately(a5, irreps_cache):
    pg = ProductGroup(a5, 2)
    final, log = boost_pipeline(fx.uniform(pg), "self-square", 10, 1e-6, irreps_cache(a5))
    assert len(log.records) == 1 and log.records[0].step == 0


def test_pipeline_fresh_copy_matches_direct_convolution(sl2_3, irreps_cache):
    pg = ProductGroup(sl2_3, 3)
    rng = np.random.default_rng(SEED)
    v = rng.random(pg.size)
    p = fx.make_dist(pg, v / v.sum())
    final, log = boost_pipeline(
        p, "fresh-copy", 7, 0.0, irreps_cache(sl2_3), eps_ks=(2,)
    )
    current = p
    for t in range(1, 8):
        current = fx.convolve_direct(current, p)
    assert np.max(np.abs(final.values - current.values)) <= 1e-9


def test_pipeline_self_square_doubles_copies(sl2_3, irreps_cache):
    pg = ProductGroup(sl2_3, 2)
    rng = np.random.default_rng(SEED)
    v = rng.random(pg.size)
    p = fx.make_dist(pg, v / v.sum())
    final, log = boost_pipeline(p, "self-square", 2, 0.0, irreps_cache(sl2_3))
    four_fold = fx.convolve_direct(p, p)
    four_fold = fx.convolve_direct(four_fold, four_fold)
    assert np.max(np.abs(final.values - four_fold.values)) <= 1e-10


def test_pipeline_rejects_unknown_mode(a5):
    with pytest.raises(ValueError, match="mode"):
        boost_pipeline(fx.uniform(ProductGroup(a5, 2)), "triple", 1, 0.1)


def test_pipeline_l2_monotone_in_contracting_regime(a5, irreps_cache):
    # m = k = 1 on a 3-quasirandom group: bound factor 2/d^2 = 2/9 < 1,
    # so l2_sq must decrease every step above the floor
    pg = ProductGroup(a5, 1)
    rng = np.random.default_rng(SEED)
    t = 0.9 / 60.0 / 59.0
    r = rng.random(pg.size)
    p = fx.make_dist(pg, (1 - t) / pg.size + t * r / r.sum())
    _, log = boost_pipeline(p, "self-square", 6, 0.0, irreps_cache(a5), eps_ks=(1,))
    l2s = [rec.l2_sq for rec in log.records]
    for prev, cur, rec in zip(l2s, l2s[1:], log.records[1:]):
        if not rec.at_floor:
            assert cur < prev


def test_pipeline_log_structure(sl2_3, irreps_cache):
    pg = ProductGroup(sl2_3, 2)
    p = nof.box_to_dist(nof.exact_s(sl2_3, 1))
    final, log = boost_pipeline(p, "self-square", 3, 0.0, irreps_cache(sl2_3), eps_ks=(1,))
    assert log.records[0].step == 0
    assert log.records[0].linf_rel == pytest.approx(
        float(np.max(np.abs(p.values * p.size - 1))), abs=1e-14
    )
    assert all(r.mode == "self-square" for r in log.records)
    assert all(1 in r.eps_k for r in log.records)


# ---------------------------------------------------------------------------
# CSV serialization


def test_csv_header_and_determinism(sl2_3, irreps_cache):
    pg = ProductGroup(sl2_3, 2)
    rng = np.random.default_rng(SEED)
    v = rng.random(pg.size)
    p = fx.make_dist(pg, v / v.sum())

    def run():
        _, log = boost_pipeline(p, "self-square", 3, 0.0, irreps_cache(sl2_3), eps_ks=(1,))
        return log.to_csv()

    csv1, csv2 = run(), run()
    assert csv1 == csv2
    assert csv1.splitlines()[0] == "step,mode,l2_sq,linf_rel,eps_k,tv_dist,seconds"
    # seconds column stays empty unless timing is requested
    assert csv1.splitlines()[1].endswith(",")


def test_csv_timing_column_opt_in():
    log = ExperimentLog(eps_ks=(2,))
    from groupmix.boost import StepRecord

    log.add(StepRecord(0, "fresh-copy", 1.0, 2.0, {2: 0.5}, 0.25, 1.5))
    with_timing = log.to_csv(include_timing=True)
    assert with_timing.splitlines()[1] == "0,fresh-copy,1.0,2.0,0.5,0.25,1.5"


def test_numerical_floor_flag():
    assert numerical_floor(100) == pytest.approx(10 * np.finfo(np.float64).eps * 100)
