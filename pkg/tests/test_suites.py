import pytest

from src.check_runner import run_suite
from src.logger import setup_logger
from src.scenario import Scenario
from src.painleve import RELATIONS
from src.suites import SuiteData, backlund_checks, build_checks

SCALAR_ONLY = {"toda.kappa-bilinear", "p4.scalar-equation", "ham.poisson", "toda2p4.scalar-p4", "backlund.t1-scalar"}


def _ids(scenario, suite=None):
    return [c.check_id for c in build_checks(scenario, scenario.ring_context(), suite)]


def test_check_ids_are_unique():
    ids = _ids(Scenario(dim=1))
    assert len(ids) == len(set(ids))
    assert SCALAR_ONLY <= set(ids)


def test_scalar_checks_need_d1():
    assert not SCALAR_ONLY & set(_ids(Scenario(dim=2)))


def test_chain_checks_follow_the_depths():
    ids = _ids(Scenario(nmax=3, mmax=2), "toda")
    assert [i for i in ids if i.startswith("toda.theta")] == ["toda.theta.n=0", "toda.theta.n=1", "toda.theta.n=2"]
    assert [i for i in ids if i.startswith("toda.eta")] == ["toda.eta.m=0", "toda.eta.m=-1"]


def test_depth_is_clamped_by_the_order():
    data = SuiteData(Scenario(order=6), Scenario().ring_context())
    assert data.depth(5) == 3
    assert data.depth(2) == 2
    assert SuiteData(Scenario(order=4), Scenario().ring_context()).depth(5) == 2


def test_gauge_check_is_opt_in():
    assert "lax.jm.gauge" not in _ids(Scenario(), "lax")
    assert "lax.jm.gauge" in _ids(Scenario(with_intermediate=True), "lax")


def test_lotka_volterra_drops_alpha_sum_one_checks():
    ids = _ids(Scenario(dim=1, alphas=["1/2", "-1/4", "-1/4"]))
    assert not any(i.startswith(("lax.", "toda2p4.", "bilinear.tau")) for i in ids)
    assert "p4.solver" in ids
    assert "bilinear.hirota-unit" in ids


def test_draws_are_seeded_per_label():
    data = SuiteData(Scenario(seed=9), Scenario().ring_context())
    again = SuiteData(Scenario(seed=9), Scenario().ring_context())
    assert data.rng("x").integers(1000) == again.rng("x").integers(1000)
    first = data.draw("pair", lambda rng: data.series(rng))
    assert data.draw("pair", lambda rng: None) is first
    assert first.identical(again.draw("pair", lambda rng: again.series(rng)))


def test_unknown_suite():
    with pytest.raises(KeyError):
        _ids(Scenario(), "kdv")


@pytest.mark.parametrize("dim", [1, 2])
def test_toda_constructions_vanish_through_the_reliable_order(dim):
    logger = setup_logger(console_level="ERROR", file_logging=False)
    report = run_suite(Scenario(dim=dim, order=8, seed=5), "toda2p4", logger, progress=False)
    constructions = [r for r in report.records if r.check_id.startswith(("toda2p4.positive", "toda2p4.negative"))]
    assert len(constructions) == 4
    for record in constructions:
        assert record.passed, record.check_id
        assert record.reliable_order >= 4
        assert record.vanishing_order == record.reliable_order + 1


def test_commutative_ratio_sample_count():
    assert Scenario().qdet_samples == 200
    scenario = Scenario(dim=1, order=5, qdet_samples=7)
    checks = {c.check_id: c for c in build_checks(scenario, scenario.ring_context(), "qdet")}
    assert len(checks["qdet.commutative-ratio"].run().residuals) == 7


def test_backlund_relations_come_from_one_report():
    scenario = Scenario(dim=2, order=6, seed=4)
    data = SuiteData(scenario, scenario.ring_context())
    checks = [c for c in backlund_checks(data) if c.check_id.startswith("backlund.relation.")]
    assert [c.anchor for c in checks] == [name for name, _, _ in RELATIONS]
    outcomes = [c.run() for c in checks]
    assert all(o.verdict for o in outcomes)
    assert all(len(o.residuals) == 3 and all(r.is_zero() for r in o.residuals) for o in outcomes)
    report = data.draw("backlund/weyl", lambda rng: None)
    assert [r.name for r in report.relations] == [c.anchor for c in checks]
