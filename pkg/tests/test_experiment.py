"""Sweep mechanics: row bookkeeping, CSV determinism, plotting."""

import json
import math

import numpy as np
import pytest

from helpers import random_scenario
from procache.config import ConfigError, load_bundled_scenario
from procache.experiment import (
    CSV_HEADER,
    SCHEMES,
    SweepSpec,
    emit_csv,
    emit_plot,
    load_sweep_spec,
    read_csv,
    run_sweep,
    sweep_metadata,
)

SMALL_SPEC = SweepSpec(
    cache_sizes=(1, 4),
    gammas=(0.01,),
    schemes=("reactive", "noncoop_greedy", "coop_greedy"),
    replications=3,
)


@pytest.fixture(scope="module")
def bundled_scenario():
    return load_bundled_scenario("paper_s6")


@pytest.fixture(scope="module")
def small_rows(bundled_scenario):
    return run_sweep(bundled_scenario, SMALL_SPEC)


class TestSweepSpec:
    def test_rejects_empty_cache_sizes(self):
        with pytest.raises(ValueError):
            SweepSpec(cache_sizes=())

    def test_rejects_unknown_scheme(self):
        with pytest.raises(ValueError, match="unknown schemes"):
            SweepSpec(cache_sizes=(1,), schemes=("optimal_coop",))

    def test_rejects_zero_replications(self):
        with pytest.raises(ValueError):
            SweepSpec(cache_sizes=(1,), replications=0)

    def test_defaults(self):
        spec = SweepSpec(cache_sizes=(1, 2))
        assert spec.schemes == SCHEMES
        assert spec.replications == 20
        assert spec.gammas is None
        assert spec.base_seed is None


class TestLoadSweepSpec:
    def test_reads_fields(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(
            json.dumps(
                {
                    "cache_sizes": [1, 2, 3],
                    "gammas": [0.1, 0.01],
                    "schemes": ["reactive"],
                    "replications": 5,
                    "base_seed": 7,
                }
            )
        )
        spec = load_sweep_spec(str(path))
        assert spec.cache_sizes == (1, 2, 3)
        assert spec.gammas == (0.1, 0.01)
        assert spec.schemes == ("reactive",)
        assert spec.replications == 5
        assert spec.base_seed == 7

    def test_defaults_when_omitted(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"cache_sizes": [2]}))
        spec = load_sweep_spec(str(path))
        assert spec.gammas is None
        assert spec.replications == 20

    def test_unknown_field_rejected(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"cache_sizes": [2], "replicas": 3}))
        with pytest.raises(ConfigError, match="unknown fields"):
            load_sweep_spec(str(path))

    def test_missing_cache_sizes(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"gammas": [0.1]}))
        with pytest.raises(ConfigError, match="cache_sizes"):
            load_sweep_spec(str(path))


class TestRunSweep:
    def test_row_count_and_order(self, small_rows):
        assert len(small_rows) == 3 * 2 * 1 * 3
        keys = [(r.scheme, r.cache_size, r.gamma, r.replication) for r in small_rows]
        assert keys == sorted(keys)
        assert not any(r.skipped for r in small_rows)

    def test_reactive_rows_ignore_cache_size_and_gamma(self, bundled_scenario):
        spec = SweepSpec(
            cache_sizes=(1, 7),
            gammas=(0.1, 0.001),
            schemes=("reactive",),
            replications=2,
        )
        rows = run_sweep(bundled_scenario, spec)
        by_rep = {}
        for r in rows:
            by_rep.setdefault(r.replication, set()).add(
                (r.per_file_delay, r.objective_value, r.caching_gain, r.cached_count)
            )
        for rep, values in by_rep.items():
            assert len(values) == 1, f"replication {rep} varied: {values}"

    def test_replications_redraw_vehicles(self, small_rows):
        # Individual cells may collide across replications (the reactive
        # delay sees velocities only through integer file caps), but the
        # full row vector of a replication fingerprints its population.
        vectors = {}
        for r in small_rows:
            vectors.setdefault(r.replication, []).append(
                (r.scheme, r.cache_size, r.per_file_delay, r.objective_value)
            )
        fingerprints = {tuple(sorted(v)) for v in vectors.values()}
        assert len(vectors) == 3
        assert len(fingerprints) > 1

    def test_fixed_vehicles_repeat_across_replications(self):
        rng = np.random.default_rng(4)
        sc = random_scenario(rng, item_count=5, vehicle_count=2, capacity_files=3)
        spec = SweepSpec(
            cache_sizes=(1, 2),
            gammas=(0.0,),
            schemes=("reactive", "noncoop_greedy"),
            replications=3,
        )
        rows = run_sweep(sc, spec)
        for scheme in ("reactive", "noncoop_greedy"):
            for z in (1, 2):
                vals = {
                    r.per_file_delay
                    for r in rows
                    if r.scheme == scheme and r.cache_size == z
                }
                assert len(vals) == 1

    def test_guarded_scheme_rows_are_skipped_not_fatal(self, bundled_scenario):
        spec = SweepSpec(
            cache_sizes=(2,),
            gammas=(0.01,),
            schemes=("coop_optimal", "noncoop_greedy"),
            replications=2,
        )
        rows = run_sweep(bundled_scenario, spec)
        skipped = [r for r in rows if r.skipped]
        live = [r for r in rows if not r.skipped]
        assert {r.scheme for r in skipped} == {"coop_optimal"}
        assert len(skipped) == 2
        assert all("guard" in r.skip_reason for r in skipped)
        assert {r.scheme for r in live} == {"noncoop_greedy"}

    def test_single_rsu_chain_skips_coop(self):
        rng = np.random.default_rng(9)
        sc = random_scenario(rng, item_count=5, vehicle_count=2, rsu_count=1)
        spec = SweepSpec(
            cache_sizes=(1,),
            gammas=(0.0,),
            schemes=("coop_greedy",),
            replications=1,
        )
        rows = run_sweep(sc, spec)
        assert rows[0].skipped
        assert "two RSUs" in rows[0].skip_reason

    def test_gain_is_reactive_minus_scheme(self, small_rows):
        by_key = {
            (r.scheme, r.cache_size, r.replication): r for r in small_rows
        }
        for (scheme, z, rep), row in by_key.items():
            if scheme == "reactive":
                assert row.caching_gain == 0.0
                continue
            reactive = by_key[("reactive", z, rep)]
            assert row.caching_gain == pytest.approx(
                reactive.per_file_delay - row.per_file_delay, abs=1e-12
            )


class TestEmitCsv:
    def test_header_and_shape(self, small_rows, tmp_path):
        path = tmp_path / "rows.csv"
        emit_csv(small_rows, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + len(small_rows)
        assert all(len(line.split(",")) == 8 for line in lines[1:])

    def test_byte_identical_reruns(self, bundled_scenario, small_rows, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        emit_csv(small_rows, str(a))
        emit_csv(run_sweep(bundled_scenario, SMALL_SPEC), str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_skipped_rows_are_omitted(self, bundled_scenario, tmp_path):
        spec = SweepSpec(
            cache_sizes=(2,),
            gammas=(0.01,),
            schemes=("coop_optimal", "reactive"),
            replications=1,
        )
        rows = run_sweep(bundled_scenario, spec)
        path = tmp_path / "rows.csv"
        emit_csv(rows, str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2  # header + the reactive row
        assert lines[1].startswith("reactive,")

    def test_nine_significant_digits(self, small_rows, tmp_path):
        path = tmp_path / "rows.csv"
        emit_csv(small_rows, str(path))
        line = path.read_text().splitlines()[1]
        per_file = line.split(",")[4]
        digits = per_file.replace(".", "").replace("-", "").lstrip("0")
        assert len(digits) <= 9

    def test_refuses_empty(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], str(tmp_path / "rows.csv"))

    def test_read_back_reemits_identically(self, small_rows, tmp_path):
        first = tmp_path / "first.csv"
        emit_csv(small_rows, str(first))
        parsed = read_csv(str(first))
        second = tmp_path / "second.csv"
        emit_csv(parsed, str(second))
        assert first.read_bytes() == second.read_bytes()

    def test_read_csv_rejects_foreign_header(self, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_csv(str(path))


class TestEmitPlot:
    def test_writes_svg(self, small_rows, tmp_path):
        path = tmp_path / "curves.svg"
        emit_plot(small_rows, str(path))
        data = path.read_bytes()
        assert data.startswith(b"<?xml")
        assert b"</svg>" in data

    def test_deterministic_svg(self, small_rows, tmp_path):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        emit_plot(small_rows, str(a), metric="objective_value")
        emit_plot(small_rows, str(b), metric="objective_value")
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_metric(self, small_rows, tmp_path):
        with pytest.raises(ValueError, match="unknown metric"):
            emit_plot(small_rows, str(tmp_path / "x.svg"), metric="speed")


class TestMetadata:
    def test_records_generation_choices(self, bundled_scenario):
        meta = sweep_metadata(bundled_scenario, SMALL_SPEC)
        assert meta["replications"] == 3
        assert meta["base_seed"] == 42  # inherited from the scenario
        assert meta["vehicle_generator"]["zipf_exponents"] == [0.6, 0.8, 1.0]
        assert "per_file_delay" in meta["definitions"]
        assert meta["gammas"] == [0.01]
        assert math.isclose(
            meta["vehicle_generator"]["velocity_mean_ms"], 55.0 / 3.6
        )
