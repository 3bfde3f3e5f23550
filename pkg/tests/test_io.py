import numpy as np
import pytest

from qlump.errors import NegativeEntry, ParseError
from qlump.generators import make_instance
from qlump.io import read_dense, read_matrix, read_partition, write_matrix, write_partition
from qlump.markov import Partition


def test_round_trip_bitwise(tmp_path, three_state):
    path = tmp_path / "p.mtx"
    write_matrix(three_state, path)
    assert np.array_equal(read_matrix(path).entries, three_state)


def test_round_trip_random_full_precision(tmp_path):
    p = make_instance("blockdiag", 40, 0.37, 11).matrix
    path = tmp_path / "p.mtx"
    write_matrix(p, path, comment="seed=11\nclass=blockdiag")
    back = read_matrix(path)
    assert back.entries.tobytes() == p.entries.tobytes()


def test_column_major_layout(tmp_path):
    path = tmp_path / "p.mtx"
    write_matrix(np.array([[0.25, 0.75], [1.0, 0.0]]), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "%%MatrixMarket matrix array real general"
    assert lines[1:] == ["2 2", "0.25", "1", "0.75", "0"]


def test_negative_entry_on_validation(tmp_path):
    path = tmp_path / "neg.mtx"
    path.write_text("%%MatrixMarket matrix array real general\n2 2\n1.2\n0.5\n-0.2\n0.5\n")
    assert read_dense(path)[0, 1] == -0.2
    with pytest.raises(NegativeEntry):
        read_matrix(path)


@pytest.mark.parametrize(
    "text,line",
    [
        ("%%MatrixMarket matrix array real general\n2 3\n" + "0.5\n" * 6, 2),
        ("%%MatrixMarket matrix array real general\n% note\n2 2\n1\n0\nabc\n1\n", 6),
        ("%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n", 5),
        ("%%MatrixMarket matrix coordinate real general\n2 2 2\n", 1),
        ("2 2\n1\n0\n0\n1\n", 1),
    ],
    ids=["non-square", "bad-entry", "short", "coordinate", "no-banner"],
)
def test_parse_errors_carry_line(tmp_path, text, line):
    path = tmp_path / "bad.mtx"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        read_matrix(path)
    assert info.value.line == line


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        read_matrix(tmp_path / "absent.mtx")


def test_partition_round_trip(tmp_path):
    pi = Partition([0, 2, 1, 1, 0])
    path = tmp_path / "pi.csv"
    write_partition(pi, path)
    assert path.read_text() == "state,aggregate\n0,0\n1,2\n2,1\n3,1\n4,0\n"
    assert read_partition(path) == pi


def test_partition_bad_header(tmp_path):
    path = tmp_path / "pi.csv"
    path.write_text("i,label\n0,0\n")
    with pytest.raises(ParseError):
        read_partition(path)
