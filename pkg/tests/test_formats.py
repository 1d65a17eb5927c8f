import json

import pytest
from hypothesis import given, settings

from conftest import seeds, twisted
from crownkit.exactlin import FgAbelianGroup
from crownkit.formats import (
    FORMAT_VERSION,
    FormatError,
    FormatVersionWarning,
    complex_from_dict,
    crowned_from_dict,
    dumps,
    from_dict,
    loads,
    module_from_dict,
    to_dict,
)
from crownkit.franke import disk_crowned, moore_crowned, unit_crowned, zero_crowned
from crownkit.generate import random_L_member
from crownkit.percomplex import GradedModule, PeriodicComplex, disk, homology, moore, unit

MOORE3 = {"kind": "periodic_complex", "format_version": 1, "period": 2, "ranks": [1, 1], "diff": [[0], [3]]}


def test_moore_document_is_frozen():
    assert to_dict(moore(2, 3)) == MOORE3
    assert complex_from_dict(MOORE3) == moore(2, 3)


@pytest.mark.parametrize("obj", [moore(2, 3), unit(3), disk(4, 1, 2), PeriodicComplex.zero(2),
                                 moore_crowned(3, 2), unit_crowned(3), zero_crowned(2), disk_crowned(4, 2),
                                 homology(moore(3, 6, slot=1)), GradedModule.zero(2)])
def test_round_trip_fixtures(obj):
    assert loads(dumps(obj)) == obj


def test_module_document():
    m = GradedModule(2, (FgAbelianGroup(1, (2, 4)), FgAbelianGroup()))
    data = to_dict(m)
    assert data["slots"][0] == {"free_rank": 1, "torsion": [2, 4]}
    assert module_from_dict(data) == m


def test_crowned_keys():
    data = to_dict(moore_crowned(3, 2))
    assert sorted(data["vertices"]) == ["b0", "b1", "z0", "z1"]
    assert data["edges"]["(b0,z0)"] == [[3], []]
    assert crowned_from_dict(data) == moore_crowned(3, 2)


def test_dumps_is_canonical():
    assert dumps(moore(2, 3)) == json.dumps(MOORE3, sort_keys=True)


@given(twisted())
def test_round_trip_random_complexes(m):
    assert loads(dumps(m)) == m


@settings(max_examples=10)
@given(seeds)
def test_round_trip_random_crowned(seed):
    x = random_L_member(seed, 3)
    assert loads(dumps(x)) == x


@pytest.mark.parametrize("period, path", [(1, "$.period"), (-2, "$.period"), ("2", "$.period")])
def test_bad_period_names_the_field(period, path):
    with pytest.raises(FormatError) as exc:
        complex_from_dict({**MOORE3, "period": period})
    assert exc.value.path == path


def test_wrong_matrix_size_names_the_entry():
    with pytest.raises(FormatError) as exc:
        complex_from_dict({**MOORE3, "diff": [[0], [3, 1]]})
    assert exc.value.path == "$.diff[1]"


def test_nonzero_square_is_a_format_error():
    with pytest.raises(FormatError) as exc:
        complex_from_dict({**MOORE3, "diff": [[1], [3]]})
    assert exc.value.path == "$.diff"


def test_missing_and_unknown_fields():
    with pytest.raises(FormatError, match="missing field 'ranks'"):
        complex_from_dict({k: v for k, v in MOORE3.items() if k != "ranks"})
    with pytest.raises(FormatError) as exc:
        from_dict({**MOORE3, "kind": "banana"})
    assert exc.value.path == "$.kind"
    data = to_dict(moore_crowned(3, 2))
    data["vertices"]["q7"] = data["vertices"].pop("b1")
    with pytest.raises(FormatError, match="unknown vertex 'q7'"):
        crowned_from_dict(data)


def test_edge_that_is_not_a_chain_map():
    data = to_dict(moore_crowned(3, 2))
    data["vertices"]["z0"] = {"ranks": [1, 1], "diff": [[1], [0]]}
    data["edges"]["(b0,z0)"] = [[3], []]
    data["edges"]["(b1,z0)"] = [[], []]
    with pytest.raises(FormatError) as exc:
        crowned_from_dict(data)
    assert exc.value.path == "$.edges.(b0,z0)"


def test_torsion_must_be_at_least_two():
    data = to_dict(GradedModule.zero(2))
    data["slots"][1]["torsion"] = [1]
    with pytest.raises(FormatError) as exc:
        module_from_dict(data)
    assert exc.value.path == "$.slots[1].torsion[0]"


def test_version_mismatch_warns_but_loads():
    with pytest.warns(FormatVersionWarning):
        m = complex_from_dict({**MOORE3, "format_version": FORMAT_VERSION + 1})
    assert m == moore(2, 3)


def test_malformed_json_reports_line_and_column():
    with pytest.raises(FormatError) as exc:
        loads('{\n  "kind": "periodic_complex",\n  "period": 2,,\n}')
    assert exc.value.path == "line 3 column 15"


def test_unserializable_type():
    with pytest.raises(TypeError):
        to_dict(3)
