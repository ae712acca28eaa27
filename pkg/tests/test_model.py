"""Value types and structural validation."""

import dataclasses

import pytest

from procache.model import (
    CachePolicy,
    Library,
    RsuConfig,
    Scenario,
    VehicleGeneratorSpec,
    VehicleProfile,
    validate_policy,
    validate_scenario,
)

MB = 1e6


def make_rsu(rsu_id=0, capacity_files=2) -> RsuConfig:
    return RsuConfig(
        id=rsu_id,
        coverage_length_m=50.0,
        cache_capacity_bytes=capacity_files * MB,
        service_rate_bytes_per_s=MB,
        backhaul_latency_s=1.0,
    )


def make_scenario() -> Scenario:
    lib = Library(item_count=3, item_size_bytes=MB)
    vehicle = VehicleProfile(
        velocity_ms=10.0, demand=(0.5, 0.3, 0.2), presence=(1.0,)
    )
    return Scenario(
        library=lib,
        rsus=(make_rsu(),),
        vehicles=(vehicle,),
        cost_factor=0.01,
        rng_seed=7,
    )


class TestLibrary:
    def test_rejects_empty_catalog(self):
        with pytest.raises(ValueError):
            Library(item_count=0, item_size_bytes=MB)

    def test_rejects_nonpositive_size(self):
        with pytest.raises(ValueError):
            Library(item_count=5, item_size_bytes=0.0)

    def test_is_frozen(self):
        lib = Library(item_count=5, item_size_bytes=MB)
        with pytest.raises(dataclasses.FrozenInstanceError):
            lib.item_count = 6


class TestRsuConfig:
    def test_service_time(self):
        rsu = make_rsu()
        assert rsu.service_time_s(Library(item_count=1, item_size_bytes=MB)) == 1.0
        assert rsu.service_time_s(Library(item_count=1, item_size_bytes=MB / 2)) == 0.5


class TestCachePolicy:
    def test_placement_vector_is_normalized(self):
        policy = CachePolicy((1, 0, 1))
        assert policy.placements == (1, 0, 1)
        assert policy.cached_items == (0, 2)
        assert policy.cached_count == 2

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            CachePolicy((0, 2, 0))

    def test_empty_and_from_items(self):
        assert CachePolicy.empty(3).placements == (0, 0, 0)
        assert CachePolicy.from_items(4, [3, 1]).placements == (0, 1, 0, 1)

    def test_cached_bytes(self):
        lib = Library(item_count=3, item_size_bytes=MB)
        assert CachePolicy((1, 1, 0)).cached_bytes(lib) == 2 * MB


class TestValidatePolicy:
    def test_ok(self):
        lib = Library(item_count=3, item_size_bytes=MB)
        assert validate_policy(CachePolicy((1, 1, 0)), lib, make_rsu()) == []

    def test_over_capacity(self):
        lib = Library(item_count=3, item_size_bytes=MB)
        violations = validate_policy(CachePolicy((1, 1, 1)), lib, make_rsu())
        assert len(violations) == 1
        assert "capacity" in violations[0]

    def test_length_mismatch(self):
        lib = Library(item_count=4, item_size_bytes=MB)
        violations = validate_policy(CachePolicy((1, 0)), lib, make_rsu())
        assert any("4" in v for v in violations)


class TestValidateScenario:
    def test_valid(self):
        assert validate_scenario(make_scenario()) == []

    def test_rsu_id_must_match_position(self):
        sc = make_scenario()
        sc = dataclasses.replace(sc, rsus=(make_rsu(rsu_id=3),))
        violations = validate_scenario(sc)
        assert any("rsus[0].id" in v for v in violations)

    def test_demand_must_sum_to_one(self):
        bad = VehicleProfile(velocity_ms=10.0, demand=(0.5, 0.3, 0.1), presence=(1.0,))
        sc = dataclasses.replace(make_scenario(), vehicles=(bad,))
        violations = validate_scenario(sc)
        assert any("vehicles[0].demand" in v and "sums to" in v for v in violations)

    def test_demand_entries_bounded(self):
        bad = VehicleProfile(velocity_ms=10.0, demand=(1.5, -0.3, -0.2), presence=(1.0,))
        sc = dataclasses.replace(make_scenario(), vehicles=(bad,))
        assert any("[0, 1]" in v for v in validate_scenario(sc))

    def test_presence_length(self):
        bad = VehicleProfile(velocity_ms=10.0, demand=(0.5, 0.3, 0.2), presence=(1.0, 1.0))
        sc = dataclasses.replace(make_scenario(), vehicles=(bad,))
        assert any("presence" in v for v in validate_scenario(sc))

    def test_nonpositive_velocity(self):
        bad = VehicleProfile(velocity_ms=0.0, demand=(0.5, 0.3, 0.2), presence=(1.0,))
        sc = dataclasses.replace(make_scenario(), vehicles=(bad,))
        assert any("velocity" in v for v in validate_scenario(sc))

    def test_negative_cost_factor(self):
        sc = dataclasses.replace(make_scenario(), cost_factor=-1.0)
        assert any("cost_factor" in v for v in validate_scenario(sc))

    def test_empty_chain_and_no_vehicles(self):
        sc = dataclasses.replace(make_scenario(), rsus=(), vehicles=())
        violations = validate_scenario(sc)
        assert any("roadside unit" in v for v in violations)
        assert any("vehicle" in v for v in violations)

    def test_generator_checks(self):
        gen = VehicleGeneratorSpec(
            count=0,
            velocity_mean_ms=15.0,
            velocity_variance_ms2=-1.0,
            velocity_min_ms=20.0,
            velocity_max_ms=10.0,
            zipf_exponents=(),
        )
        sc = dataclasses.replace(make_scenario(), generator=gen)
        violations = validate_scenario(sc)
        assert any("generator.count" in v for v in violations)
        assert any("velocity_variance" in v for v in violations)
        assert any("velocity_min_ms must be below" in v for v in violations)
        assert any("zipf_exponents" in v for v in violations)

    def test_valid_generator(self):
        gen = VehicleGeneratorSpec(
            count=3,
            velocity_mean_ms=15.0,
            velocity_variance_ms2=1.0,
            velocity_min_ms=5.0,
            velocity_max_ms=30.0,
            zipf_exponents=(0.8,),
        )
        sc = dataclasses.replace(make_scenario(), generator=gen)
        assert validate_scenario(sc) == []
