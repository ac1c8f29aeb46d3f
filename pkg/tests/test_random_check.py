import random

from fresco.random_check import (
    PROPERTY_NAMES,
    check_bernstein_product,
    check_depth_subadditivity,
    check_hom_dimension,
    check_principal_uniqueness,
    check_swaps,
    check_trace,
    random_spec,
    run_random_check,
)


def test_deterministic():
    a = run_random_check(3, 8, 3, 24)
    b = run_random_check(3, 8, 3, 24)
    assert {n: (t.passed, t.failed) for n, t in a.properties.items()} == {
        n: (t.passed, t.failed) for n, t in b.properties.items()
    }


def test_empty_run_passes():
    rep = run_random_check(1, 0)
    assert rep.ok
    assert set(rep.properties) == set(PROPERTY_NAMES)


def test_mutation_is_detected():
    rep = run_random_check(1, 10, mutate=True)
    assert rep.properties["swap oracle"].failed > 0


def test_random_spec_is_valid():
    rng = random.Random(0)
    for _ in range(20):
        spec = random_spec(rng, rng.randint(1, 5))
        P = spec.build(24)
        keys = [l + j for j, l in enumerate(P.lambdas, start=1)]
        assert min(keys) > P.rank
        assert len({l - int(l) for l in P.lambdas}) == 1


def test_individual_checks_on_one_instance():
    rng = random.Random(5)
    spec = random_spec(rng, 3)
    P = spec.build(24)
    assert check_swaps(rng, P).identity_ok
    assert check_principal_uniqueness(rng, P)[0]
    assert check_hom_dimension(spec, 16)[0]
    for m in (1, 2):
        assert check_bernstein_product(P, m)[0]
        assert check_depth_subadditivity(P, m)[0]
        assert check_trace(P, m)[0]
