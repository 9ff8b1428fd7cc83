import json

import pytest

from mdpst.hexworld import (
    ORIENT,
    HexConfig,
    HexLayout,
    _moves,
    default_layout,
    generate_hexworld,
    load_layout,
    neighbor,
    persist_avoid_groups,
    state_id,
)
from mdpst.model import ModelError, validate_model


@pytest.fixture(scope="module")
def lay():
    return default_layout(10, 5)


@pytest.fixture(scope="module")
def world(lay):
    return generate_hexworld(lay)


def test_state_count_and_validity(world):
    assert world.n_states == 200
    assert validate_model(world).ok
    assert world.initial == state_id(0, "N")


def test_default_layout_10x5(lay):
    assert sorted(lay.bases) == ["b1", "b2", "b3", "b4", "b5"]
    assert len(lay.obstacles) == int(0.08 * 45) == 3
    assert lay.obstacles == {11, 23, 28}
    assert not any(lay.obstacles & cells for cells in lay.bases.values())


def test_default_layout_is_deterministic():
    assert default_layout(16, 8).to_dict() == default_layout(16, 8).to_dict()


def test_minimal_and_too_small():
    assert validate_model(generate_hexworld(default_layout(6, 3))).ok
    with pytest.raises(ModelError, match="too small"):
        default_layout(5, 3)


def test_labels(lay, world):
    for c in lay.obstacles:
        assert "obs" in world.labels[state_id(c, "E")]
    for b, cells in lay.bases.items():
        for c in cells:
            assert world.labels[state_id(c, "S")] == {b}


def test_forward_success_sets():
    succ, cw, ccw = _moves("E")
    assert sorted(succ) == ["NE", "SE"] and (cw, ccw) == ("S", "N")
    succ, cw, ccw = _moves("N")
    assert succ == ["N"] and (cw, ccw) == ("NE", "NW")


def test_offset_neighbors():
    # odd columns sit half a cell lower
    assert neighbor(2, 2, "NE") == (3, 1)
    assert neighbor(2, 2, "SE") == (3, 2)
    assert neighbor(3, 2, "NE") == (4, 2)
    assert neighbor(3, 2, "SW") == (2, 3)


def test_interior_forward_east(world):
    s = world.state_by_name("q17,E")
    outs = world.outcomes(s, "FR")
    sizes = sorted((len(o.targets), round(o.prob, 9)) for o in outs)
    assert sizes == [(1, 0.1), (1, 0.1), (2, 0.8)]
    for o in outs:
        assert all(t % 4 == ORIENT.index("E") for t in o.targets)


def test_corner_forward_clamps(world):
    s = state_id(0, "N")
    outs = world.outcomes(s, "FR")
    success = max(outs, key=lambda o: o.prob)
    assert success.targets == {s}


def test_rotations(world):
    s = state_id(12, "N")
    outs = {frozenset(o.targets): o.prob for o in world.outcomes(s, "TR")}
    assert outs == {frozenset({state_id(12, "E")}): pytest.approx(0.9), frozenset({s}): pytest.approx(0.1)}
    outs = {frozenset(o.targets): o.prob for o in world.outcomes(s, "TL")}
    assert outs[frozenset({state_id(12, "W")})] == pytest.approx(0.9)


def test_backward_moves_against_facing(world):
    s = state_id(12, "N")   # cell (2, 2)
    outs = world.outcomes(s, "BK")
    main = max(outs, key=lambda o: o.prob)
    assert main.prob == pytest.approx(0.7)
    assert main.targets == {state_id(13, "N")}


def test_layout_errors():
    with pytest.raises(ModelError, match="collision"):
        HexLayout(6, 3, set(), {"b1": {0}, "b2": {0}}).validate()
    with pytest.raises(ModelError, match="empty grid"):
        generate_hexworld(HexLayout(0, 3))
    with pytest.raises(ModelError):
        generate_hexworld(HexConfig(default_layout(6, 3), {"FR": 1.5}))


def test_layout_json(tmp_path, lay):
    path = tmp_path / "lay.json"
    path.write_text(json.dumps(lay.to_dict()))
    assert load_layout(path).to_dict() == lay.to_dict()
    path.write_text("{")
    with pytest.raises(ModelError, match="line 1"):
        load_layout(path)


def test_groups(lay):
    assert persist_avoid_groups(lay) == [["b1", "b2"], ["b3"], ["b4", "b5"]]
    small = HexLayout(6, 3, set(), {"b1": {0}, "b2": {5}})
    assert persist_avoid_groups(small) == [["b1"], ["b2"]]
