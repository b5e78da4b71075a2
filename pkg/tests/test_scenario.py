import pytest

from genjacobi.scenario import (ScenarioError, build_geometry, build_transport,
                                describe_transport, parse_scenario)
from genjacobi.transport import verify_transport_identity

GEOMETRY = """\
kind = geometry
dim = 2
[gamma]
1,1,2 = x2
2,2,1 = 1/2*x1
[field A]
1 = x1
"""

TRANSPORT = """\
kind = transport
dim = 1
fiber = 2
labels = a,b,c,d
frames = identity
[frame b]
1,2 = x1
[gamma a]
1,1,2 = x1
[section a]
2 = x1^2
[generate]
seed = 9
"""


def test_geometry_file():
    g = build_geometry(parse_scenario(GEOMETRY))
    assert str(g.conn.entry(1, 1, 2)) == "x2"
    assert str(g.conn.entry(2, 2, 1)) == "1/2*x1"
    assert g.conn.entry(1, 2, 1).is_zero()
    assert g.fields["A"].format() == ["x1", "0"]


def test_transport_file():
    sc = build_transport(parse_scenario(TRANSPORT))
    assert sc.model.family.frames["a"].is_identity()
    assert str(sc.model.family.frames["b"][0, 1]) == "x1"
    assert str(sc.gammas[("a", "a")].diagonal[0][0, 1]) == "x1"
    assert sc.sections["a"].format() == ["0", "x1^2"]
    assert sc.seed == 9
    assert verify_transport_identity(sc, "3.20", seed=9).verified


def test_description_is_deterministic():
    a = describe_transport(build_transport(parse_scenario(TRANSPORT)))
    b = describe_transport(build_transport(parse_scenario(TRANSPORT)))
    assert a == b


@pytest.mark.parametrize("text, line, col", [
    ("kind = geometry\ndim = 2\n[gamma]\n1,1,2 = x1 +* 2\n", 4, 13),
    ("kind = geometry\ndim = 2\n[gamma]\n1,1,3 = x1\n", 4, 1),
    ("kind = geometry\ndim = 2\n[field A]\n1 = x3\n", 4, 5),
    ("kind = geometry\ndim = 2\n[gamma\n", 3, 1),
    ("kind = geometry\ndim = 2\njunk\n", 3, 1),
    ("kind = geometry\ndim = 2\ndim = 3\n", 3, 1),
    ("kind = geometry\ndim = two\n", 2, 7),
    ("kind = geometry\ndim = 2\n[colour]\n", 3, 1),
])
def test_errors_report_line_and_column(text, line, col):
    with pytest.raises(ScenarioError) as err:
        build_geometry(parse_scenario(text))
    assert (err.value.line, err.value.column) == (line, col)


def test_missing_kind():
    with pytest.raises(ScenarioError):
        parse_scenario("dim = 2\n")


def test_random_parts_need_a_seed():
    text = "kind = transport\ndim = 1\nfiber = 2\nlabels = a,b,c\n"
    with pytest.raises(ScenarioError, match="seed"):
        build_transport(parse_scenario(text))
    assert build_transport(parse_scenario(text), seed=3).seed == 3


def test_transport_label_errors():
    bad = TRANSPORT.replace("[section a]", "[section q]")
    with pytest.raises(ScenarioError, match="undeclared"):
        build_transport(parse_scenario(bad))
    bad = TRANSPORT.replace("[frame b]\n1,2 = x1", "[frame b]\n1,1 = x1")
    with pytest.raises(ScenarioError, match="diagonal"):
        build_transport(parse_scenario(bad))
