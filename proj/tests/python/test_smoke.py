"""End-to-end smoke tests for the python bindings."""

import numpy as np
import pytest

import rinmf


def planted():
    """4 entities in two blocks, two rules per block, X = F~ G^T + 0.05."""
    rules = rinmf.RuleSet(
        4,
        [
            rinmf.Rule("r0", [0, 1]),
            rinmf.Rule("r1", [0, 1]),
            rinmf.Rule("r2", [2, 3]),
            rinmf.Rule("r3", [2, 3]),
        ],
    )
    clusters = [[0, 1], [2, 3]]
    ideal = rinmf.build_ideal(clusters, 4)
    g = np.array([[2.0, 0.1], [0.2, 3.0], [1.0, 1.0]])
    x = ideal @ g.T + 0.05
    return rules, clusters, ideal, x


def test_variant_list():
    names = rinmf.variants()
    assert len(names) == 14
    assert {"MU", "D", "DE", "GDBD", "SP"} <= set(names)


def test_solve_recovers_planted_structure():
    rules, clusters, ideal, x = planted()
    cons = rinmf.Constraints.with_cost(rinmf.build_p(rules), rinmf.build_a(clusters, rules))
    cfg = rinmf.SolverConfig(variant="D", k=2, c=1.0, max_iters=3000, seed=3)
    model = rinmf.solve(x, cfg, cons)

    assert model.f.shape == (4, 2)
    assert model.g.shape == (3, 2)
    assert model.f.min() >= 0.0
    # the planted X is exactly fittable, so J heads to 0 without tripping the
    # relative-change stop; assert the fit instead of the converged flag
    assert model.objective_trace[-1] < 1e-6
    report = rinmf.evaluate_model(
        x, model.f, model.g, model.iterations_run, ideal, clusters
    )
    assert report.re < 5.0
    assert report.mean_corr == 1.0


def test_objective_trace_monotone():
    _, clusters, ideal, x = planted()
    cfg = rinmf.SolverConfig(variant="DE", k=2, max_iters=200, tolerance=0.0, seed=1)
    model = rinmf.solve(x, cfg, rinmf.Constraints.with_ideal(ideal))
    trace = np.asarray(model.objective_trace)
    assert trace.size == 201
    assert np.all(trace[1:] <= trace[:-1] * (1 + 1e-12))


def test_lambda_zero_matches_mu_bitwise():
    rules, clusters, _, x = planted()
    cons = rinmf.Constraints.with_cost(rinmf.build_p(rules), rinmf.build_a(clusters, rules))
    base = dict(k=2, max_iters=150, tolerance=0.0, seed=11)
    mu = rinmf.solve(x, rinmf.SolverConfig(variant="MU", **base))
    d = rinmf.solve(x, rinmf.SolverConfig(variant="D", lambda_=0.0, **base), cons)
    assert np.array_equal(mu.f, d.f)
    assert np.array_equal(mu.g, d.g)
    assert mu.objective_trace == d.objective_trace


def test_build_a_matches_numpy():
    rules, clusters, ideal, _ = planted()
    p = rinmf.build_p(rules)
    a = rinmf.build_a(clusters, rules)
    assert np.array_equal(a, ideal.T @ p)


def test_shared_init_reproducible():
    _, _, _, x = planted()
    f0, g0 = rinmf.init_factors(4, 3, 2, seed=5)
    assert f0.shape == (4, 2) and g0.shape == (3, 2)
    assert 0.0 < f0.min() and f0.max() < 1.0
    cfg = rinmf.SolverConfig(variant="MU", k=2, max_iters=80, tolerance=0.0)
    one = rinmf.solve(x, cfg, rinmf.Constraints.none(), f0=f0, g0=g0)
    two = rinmf.solve(x, cfg, rinmf.Constraints.none(), f0=f0, g0=g0)
    assert np.array_equal(one.f, two.f)
    assert np.array_equal(one.g, two.g)


def test_synthetic_and_grouping_round_trip():
    data = rinmf.generate_synthetic(24, 12, 3, noise=0.05, seed=9)
    again = rinmf.generate_synthetic(24, 12, 3, noise=0.05, seed=9)
    assert np.array_equal(data.x, again.x)
    assert rinmf.coverage(data.rules) == 1.0
    grouping = rinmf.kmeans_rules(data.rules, 3, seed=0)
    assert sorted(sum(grouping.clusters, [])) == sorted(sum(data.truth.clusters, []))
    ideal = rinmf.build_ideal(grouping, 24)
    assert rinmf.cluster_assignment(ideal).factor_entities == grouping.clusters


def test_hoyer_projection():
    v = [0.9, 0.4, 0.3, 0.2]
    w = np.asarray(rinmf.hoyer_project_to_sparseness(v, 0.7))
    assert abs(rinmf.hoyer_sparseness(w) - 0.7) < 1e-6
    assert abs(np.linalg.norm(w) - np.linalg.norm(v)) < 1e-9
    assert w.min() >= 0.0


def test_error_mapping():
    with pytest.raises(ValueError):
        rinmf.solve(np.array([[-1.0, 2.0]]), rinmf.SolverConfig(variant="MU", k=1))
    with pytest.raises(ValueError):
        rinmf.SolverConfig(variant="nope")
    with pytest.raises(ValueError):
        rinmf.RuleSet(3, [rinmf.Rule("r0", [5])])
    _, clusters, ideal, x = planted()
    with pytest.raises(RuntimeError):
        rinmf.solve(
            x,
            rinmf.SolverConfig(variant="GDE", k=2, step_size=1e300, max_iters=50),
            rinmf.Constraints.with_ideal(ideal),
        )


def test_compensation_detection():
    rules = rinmf.RuleSet(2, [rinmf.Rule("r0", [0, 1])])
    ideal = np.array([[1.0], [1.0]])
    recs = rinmf.detect_compensations(np.array([[0.8], [1.2]]), ideal, rules)
    assert len(recs) == 1
    assert recs[0].entity == 0 and recs[0].donors == [1]
    assert abs(recs[0].deficit - 0.2) < 1e-12
    assert rinmf.detect_compensations(ideal, ideal, rules) == []
