import numpy as np
import pytest

from condica.errors import ContractViolation, ParseError
from condica.io import (check_labels_match, load_labels, load_matrix, save_labels,
                        save_matrix)
from condica.rng import normal_draws


class TestCsv:
    def test_two_by_two_example(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3,4\n")
        m = load_matrix(path, "csv")
        # two samples of two features, transposed into p x n
        assert m.shape == (2, 2)
        assert np.array_equal(m[:, 0], [1.0, 2.0])
        assert np.array_equal(m[:, 1], [3.0, 4.0])

    def test_round_trip_exact(self, tmp_path):
        m = normal_draws(1, (5, 9))
        path = tmp_path / "m.csv"
        save_matrix(m, path, "csv")
        assert np.array_equal(load_matrix(path, "csv"), m)

    def test_ragged_row_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ParseError) as err:
            load_matrix(path, "csv")
        assert "line 2" in str(err.value)

    def test_non_numeric_cell_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\nx,4\n")
        with pytest.raises(ParseError) as err:
            load_matrix(path, "csv")
        assert "line 2" in str(err.value)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("")
        with pytest.raises(ParseError):
            load_matrix(path, "csv")


class TestBin:
    def test_round_trip_bit_identical(self, tmp_path):
        m = normal_draws(2, (4, 7))
        path = tmp_path / "m.bin"
        save_matrix(m, path, "bin")
        loaded = load_matrix(path, "bin")
        assert loaded.shape == m.shape
        assert np.array_equal(loaded, m)
        # a second save produces the same bytes
        path2 = tmp_path / "m2.bin"
        save_matrix(loaded, path2, "bin")
        assert path.read_bytes() == path2.read_bytes()

    def test_magic_mismatch(self, tmp_path):
        path = tmp_path / "m.bin"
        path.write_bytes(b"WRONG" + b"\x00" * 24)
        with pytest.raises(ParseError) as err:
            load_matrix(path, "bin")
        assert "magic" in str(err.value)

    def test_truncated_payload(self, tmp_path):
        m = normal_draws(3, (3, 3))
        path = tmp_path / "m.bin"
        save_matrix(m, path, "bin")
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ParseError):
            load_matrix(path, "bin")

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ContractViolation):
            save_matrix(np.ones((2, 2)), tmp_path / "m.xyz", "xyz")


class TestLabels:
    def test_round_trip(self, tmp_path):
        labels = np.array([3, 1, 4, 1, 5], dtype=np.int64)
        path = tmp_path / "labels.txt"
        save_labels(labels, path)
        assert np.array_equal(load_labels(path), labels)

    def test_non_integer_line(self, tmp_path):
        path = tmp_path / "labels.txt"
        path.write_text("1\nfoo\n")
        with pytest.raises(ParseError) as err:
            load_labels(path)
        assert "line 2" in str(err.value)

    def test_length_mismatch_vs_matrix(self):
        with pytest.raises(ParseError):
            check_labels_match(np.array([0, 1]), np.ones((2, 3)), "labels.txt")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_labels(tmp_path / "absent.txt")
