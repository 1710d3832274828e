import csv
import json
import math
from dataclasses import asdict

import pytest

from reconfnet.bench import (
    COLUMNS,
    JOBS_ENV,
    Row,
    SuiteResult,
    SuiteSpec,
    normalize,
    resolve_jobs,
    run_suite,
    write_csv,
    write_histogram,
)
from reconfnet.exceptions import ConfigError, FormatError

ORACLE_SUITE = SuiteSpec(
    methods=("absm", "atro", "bvn", "mcf", "brute"),
    networks=("full-mesh:4:4",),
    traffic=("gravity:10",),
    seeds=20,
    allow_brute=True,
)


@pytest.fixture(scope="module")
def oracle_rows():
    return run_suite(ORACLE_SUITE, jobs=1, progress=False).rows


def by_instance(rows):
    out = {}
    for row in rows:
        out.setdefault(row.instance, {})[row.method] = row
    return out


def test_one_row_per_method_and_instance(oracle_rows):
    assert len(oracle_rows) == 20 * 5
    assert len(by_instance(oracle_rows)) == 20


def test_absm_matches_exhaustive_search(oracle_rows):
    for rows in by_instance(oracle_rows).values():
        absm, brute = rows["absm"], rows["brute"]
        assert absm.feasible and brute.feasible
        assert absm.mlu == pytest.approx(brute.mlu, rel=1e-4, abs=1e-9)
        assert absm.total_links <= brute.total_links


def test_baselines_do_not_beat_absm(oracle_rows):
    for rows in by_instance(oracle_rows).values():
        for method in ("bvn", "mcf"):
            assert rows[method].mlu >= rows["absm"].mlu - 1e-6


def test_mlu_is_normalized_to_atro(oracle_rows):
    for rows in by_instance(oracle_rows).values():
        atro = rows["atro"]
        assert atro.mlu_normalized_to_atro == pytest.approx(1.0)
        assert rows["absm"].mlu_normalized_to_atro == pytest.approx(rows["absm"].mlu / atro.mlu)
        # relaying can only help
        assert atro.mlu <= rows["absm"].mlu + 1e-6


def test_csv_and_histogram(oracle_rows, tmp_path):
    result = SuiteResult(oracle_rows)
    write_csv(result, tmp_path / "bench.csv")
    write_histogram(result, tmp_path / "bench.rounds.json")
    with open(tmp_path / "bench.csv", newline="") as f:
        reader = csv.DictReader(f)
        assert reader.fieldnames == COLUMNS
        assert len(list(reader)) == len(oracle_rows)
    hist = json.loads((tmp_path / "bench.rounds.json").read_text())
    assert hist["runs"] == 20
    assert sum(hist["rounds"].values()) == 20


def test_worker_count_does_not_change_rows():
    spec = SuiteSpec(methods=("absm", "bvn"), networks=("full-mesh:4:4",), seeds=3)

    def stable(rows):
        return [{k: v for k, v in asdict(r).items() if k != "wall_time"} for r in rows]

    serial = run_suite(spec, jobs=1, progress=False).rows
    parallel = run_suite(spec, jobs=2, progress=False).rows
    assert stable(serial) == stable(parallel)


def test_brute_is_skipped_on_large_instances():
    spec = SuiteSpec(
        methods=("absm", "brute"), networks=("full-mesh:5:4",), seeds=1, allow_brute=True
    )
    rows = run_suite(spec, jobs=1, progress=False).rows
    assert [r.method for r in rows] == ["absm"]


def test_suite_validation():
    with pytest.raises(ConfigError) as e:
        SuiteSpec(methods=("brute",))
    assert e.value.code == 103
    with pytest.raises(ConfigError) as e:
        SuiteSpec(methods=("milp",))
    assert e.value.code == 102
    with pytest.raises(ConfigError):
        SuiteSpec(seeds=0)


def test_suite_from_dict():
    spec = SuiteSpec.from_dict(
        {"methods": ["absm", "atro"], "seeds": 2, "atro": {"max_rounds": 3, "ro": {"max_sweeps": 5}}}
    )
    assert spec.methods == ("absm", "atro")
    assert spec.atro.max_rounds == 3
    assert spec.atro.ro.max_sweeps == 5
    with pytest.raises(FormatError) as e:
        SuiteSpec.from_dict({"colour": "red"})
    assert e.value.code == 403


def test_instances_have_stable_distinct_seeds():
    spec = SuiteSpec(seeds=3)
    first, again = spec.instances(), spec.instances()
    assert first == again
    assert len({i.seed for i in first}) == 3
    assert SuiteSpec(seeds=3, base_seed=1).instances()[0].seed != first[0].seed


def test_resolve_jobs(monkeypatch):
    monkeypatch.setenv(JOBS_ENV, "3")
    assert resolve_jobs() == 3
    assert resolve_jobs(1) == 1
    monkeypatch.setenv(JOBS_ENV, "many")
    with pytest.raises(ConfigError):
        resolve_jobs()
    with pytest.raises(ConfigError):
        resolve_jobs(0)


def test_zero_atro_reference():
    rows = [
        Row("x", "n", "t", 0, 4, "atro", True, 0.0, 0.1, 0, 1),
        Row("x", "n", "t", 0, 4, "absm", True, 0.0, 0.1, 0, 1),
        Row("x", "n", "t", 0, 4, "bvn", True, 0.5, 0.1, 2, 1),
    ]
    normalize(rows)
    assert [r.mlu_normalized_to_atro for r in rows] == [1.0, 1.0, math.inf]
