import io as stdio

import numpy as np
import pytest

from metricmatch import Discrete, DistanceOracle, reference
from metricmatch import io
from metricmatch.generators import FAMILIES, generate


def test_parse_matrix_roundtrip():
    inst = io.parse_matrix("3\n0 1 2\n1 0 1\n2 1 0\n")
    assert inst.n == 3 and DistanceOracle(inst).dist(1, 3) == 2


@pytest.mark.parametrize(
    "text",
    ["2\n0 nan\nnan 0\n", "2\n0 -1\n-1 0\n", "2\n0 1\n", "3\n0 1 5\n1 0 1\n5 1 0\n", "x\n0\n"],
)
def test_parse_matrix_rejects(text):
    with pytest.raises(io.ParseError):
        io.parse_matrix(text)


def test_parse_points_and_graph():
    p = io.parse_points("2 2\n0 0\n3 4\n")
    assert DistanceOracle(p).dist(1, 2) == pytest.approx(5)
    g = io.parse_graph("# a path\n4 3\n1 2\n2 3\n3 4\n")
    assert DistanceOracle(g).dist(1, 4) == 3
    with pytest.raises(io.ParseError, match="unreachable"):
        io.parse_graph("3 1\n1 2\n")
    with pytest.raises(io.ParseError):
        io.parse_points("2 2\n0 inf\n1 1\n")


@pytest.mark.parametrize("family", FAMILIES)
def test_dump_load_roundtrip(family, tmp_path):
    inst = generate(family, 12, seed=4)
    buf = stdio.StringIO()
    fmt = io.dump(inst, buf)
    assert fmt == io.suffix_for(inst)
    path = tmp_path / f"inst.{fmt}"
    path.write_text(buf.getvalue())
    back = io.load(path)
    assert np.array_equal(back.to_matrix(), inst.to_matrix())
    assert reference(back).opt == reference(inst).opt


def test_load_needs_known_suffix(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("1\n0\n")
    with pytest.raises(io.ParseError):
        io.load(path)
    assert io.load(path, fmt="matrix").n == 1


def test_discrete_written_as_matrix():
    buf = stdio.StringIO()
    assert io.dump(Discrete(3), buf) == "matrix"
    assert buf.getvalue() == "3\n0 1 1\n1 0 1\n1 1 0\n"
