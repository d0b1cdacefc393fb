import json
from fractions import Fraction

import pytest

from conelab.jordan import HermitianMatrix
from conelab.models import Algebra, DimsReport, InputError, MatrixPayload
from conelab.utils.config import get_settings
from conelab.utils.exact import LinearSystem
from conelab.utils.io import dump_json, load_cone_map, load_matrix, read_model, write_json
from conelab.utils.parallel import chunk_sizes, min_reduce
from conelab.utils.simplex import find_nonnegative_solution


class TestLinearSystem:
    def test_implied_value(self):
        system = LinearSystem(3)
        system.add({0: 1, 1: 1}, 3)
        system.add({1: 1, 2: -1}, 1)
        assert system.rank == 2
        assert system.is_consistent()
        # x0 + x2 = 2 on every solution, x0 alone is free
        assert system.implied_value({0: 1, 2: 1}) == 2
        assert system.implied_value({0: 1}) is None

    def test_inconsistent(self):
        system = LinearSystem(2)
        system.add({0: 1, 1: 1}, 1)
        system.add({0: 2, 1: 2}, 3)
        assert not system.is_consistent()

    def test_rationals_stay_exact(self):
        system = LinearSystem(1)
        system.add({0: 3}, Fraction(1, 7))
        assert system.implied_value({0: 1}) == Fraction(1, 21)

    def test_index_out_of_range(self):
        with pytest.raises(ValueError):
            LinearSystem(2).add({2: 1}, 0)

    def test_empty_system(self):
        system = LinearSystem(2)
        assert system.is_consistent()
        assert system.rank == 0
        assert system.implied_value({}) == 0


class TestSimplex:
    def test_feasible(self):
        a = [[Fraction(1), Fraction(1), Fraction(0)], [Fraction(1), Fraction(-1), Fraction(1)]]
        b = [Fraction(4), Fraction(0)]
        x = find_nonnegative_solution(a, b)
        assert x is not None
        assert all(v >= 0 for v in x)
        assert x[0] + x[1] == 4
        assert x[0] - x[1] + x[2] == 0

    def test_infeasible(self):
        a = [[Fraction(1), Fraction(1)]]
        assert find_nonnegative_solution(a, [Fraction(-1)]) is None

    def test_negative_right_hand_side(self):
        a = [[Fraction(-1), Fraction(0)], [Fraction(0), Fraction(1)]]
        x = find_nonnegative_solution(a, [Fraction(-2), Fraction(3)])
        assert x == [2, 3]


class TestParallel:
    def test_chunk_sizes(self):
        assert chunk_sizes(10, 4) == [4, 4, 2]
        assert chunk_sizes(0, 4) == []
        with pytest.raises(ValueError):
            chunk_sizes(5, 0)

    def test_min_reduce_prefers_the_lowest_chunk(self):
        def work(chunk: int, count: int) -> tuple[float, int]:
            return (0.0 if chunk in (1, 3) else 1.0), chunk

        assert min_reduce(work, 40, chunk_size=10, threads=4) == (0.0, 1)
        assert min_reduce(work, 40, chunk_size=10, threads=1) == (0.0, 1)

    def test_nothing_to_do(self):
        key, payload = min_reduce(lambda c, n: (0.0, c), 0)
        assert payload is None
        assert key == float("inf")


class TestSettings:
    def test_environment_overrides(self, monkeypatch):
        get_settings.cache_clear()
        monkeypatch.setenv("CONELAB_SAMPLES", "250")
        monkeypatch.setenv("CONELAB_THREADS", "3")
        try:
            settings = get_settings()
            assert settings.samples == 250
            assert settings.threads == 3
        finally:
            get_settings.cache_clear()

    def test_invalid_environment(self, monkeypatch):
        get_settings.cache_clear()
        monkeypatch.setenv("CONELAB_EPS", "-1")
        try:
            with pytest.raises(ValueError):
                get_settings()
        finally:
            get_settings.cache_clear()


class TestIO:
    def test_matrix_file_round_trip(self, tmp_path):
        m = HermitianMatrix.diag(Algebra.C, [Fraction(1, 3), 2])
        path = tmp_path / "x.json"
        write_json(m.to_payload(), path)
        assert load_matrix(path) == m

    def test_cone_map_file(self, tmp_path, b3):
        path = tmp_path / "maps" / "b.json"
        write_json(b3.cone_map.to_payload(), path)
        loaded = load_cone_map(path)
        assert loaded.n == 3
        assert loaded.label == b3.cone_map.label

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            read_model(tmp_path / "nope.json", MatrixPayload)

    def test_malformed_payload(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"algebra": "C", "n": 2, "entries": [[]]}))
        with pytest.raises(InputError):
            load_matrix(path)

    def test_non_hermitian_payload(self, tmp_path):
        one = {"algebra": "R", "coeffs": ["1"]}
        two = {"algebra": "R", "coeffs": ["2"]}
        path = tmp_path / "asym.json"
        path.write_text(json.dumps({"algebra": "R", "n": 2, "entries": [[one, one], [two, one]]}))
        with pytest.raises(InputError):
            load_matrix(path)

    def test_dump_is_sorted_and_stable(self):
        text = dump_json(DimsReport(space="O", dimension=14))
        assert text == json.dumps({"dimension": 14, "space": "O"}, indent=2)
