import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from icap import channel
from icap.channel import ChannelInstance, load_instance, serialize
from icap.errors import ConstraintError, DimensionError, ParseError, ShapeMismatch

from .strategies import cmatrix, psd

DOC = {
    "H1": [[1, 0], [0, 1]], "H2": [[0.5, 0], [0, 0.5]],
    "H3": [[0.3, 0], [0, 0.3]], "H4": [[1, 0], [0, [0, 1]]],
    "S1": [[1, 0], [0, 1]], "S2": [[2, 0], [0, 0]],
}


def test_load_accepts_complex_pairs():
    inst = load_instance(json.dumps(DOC))
    assert inst.H4[1, 1] == 1j
    assert inst.dims == (2, 2, 2, 2)
    assert channel.is_zic(inst) == 0


@pytest.mark.parametrize(
    "patch, exc",
    [
        ({"H1": [[1, 0], [0]]}, ParseError),
        ({"H1": [[1, "x"], [0, 1]]}, ParseError),
        ({"H1": [[True, 0], [0, 1]]}, ParseError),
        ({"H2": [[1, 0, 0], [0, 1, 0]]}, DimensionError),
        ({"S1": [[1, 2], [0, 1]]}, ConstraintError),
        ({"S1": [[-1, 0], [0, 1]]}, ConstraintError),
        ({"power": [1]}, ParseError),
        ({"offsets": {"B3": [[0]]}}, ParseError),
        ({"offsets": {"B1": [[0, 0, 0]]}}, DimensionError),
    ],
)
def test_invalid_documents(patch, exc):
    with pytest.raises(exc):
        load_instance({**DOC, **patch})


def test_missing_field_and_bad_json():
    doc = dict(DOC)
    del doc["H3"]
    with pytest.raises(ParseError, match="H3"):
        load_instance(doc)
    with pytest.raises(ParseError):
        load_instance("{not json")


def test_instance_is_immutable():
    inst = load_instance(DOC)
    with pytest.raises(ValueError):
        inst.H1[0, 0] = 3
    with pytest.raises(AttributeError):
        inst.H1 = np.eye(2)


def test_zic_detection_is_exact():
    inst = load_instance({**DOC, "H3": [[0, 0], [0, 0]]})
    assert channel.is_zic(inst) == 3
    assert channel.is_zic(inst.swap_users()) == 2
    assert channel.is_zic(load_instance({**DOC, "H3": [[0, 0], [0, 1e-300]]})) == 0


@st.composite
def instances(draw):
    t1, t2, r1, r2 = (draw(st.integers(1, 4)) for _ in range(4))
    return ChannelInstance(
        draw(cmatrix(r1, t1)), draw(cmatrix(r1, t2)), draw(cmatrix(r2, t1)), draw(cmatrix(r2, t2)),
        draw(psd(t1)), draw(psd(t2)),
        label=draw(st.one_of(st.none(), st.text(max_size=8))),
        power=draw(st.one_of(st.none(), st.tuples(st.floats(0, 10), st.floats(0, 10)))),
    )


@given(instances())
def test_serialize_round_trip(inst):
    back = load_instance(serialize(inst))
    assert back == inst
    assert serialize(back) == serialize(inst)


@given(instances())
def test_swap_is_an_involution(inst):
    assert inst.swap_users().swap_users() == inst


@given(psd(4))
def test_offset_space_membership(S):
    sp = channel.offset_space(S)
    rng = np.random.default_rng(0)
    if sp.dim:
        B = rng.standard_normal((3, sp.dim)) @ sp.basis.conj().T
        assert channel.membership_B(B, sp)
        assert channel.offset_residual(B, S) <= 1e-10
    B = rng.standard_normal((3, 4)) @ sp.projector_range
    if np.linalg.norm(B) > 1e-6:
        assert not channel.membership_B(B, sp)


def test_membership_shape_mismatch():
    sp = channel.offset_space(np.diag([1.0, 0.0]))
    with pytest.raises(ShapeMismatch):
        channel.membership_B(np.zeros((1, 3)), sp)


def test_null_offset_space_user_index():
    inst = load_instance(DOC)
    assert channel.null_offset_space(inst, 2).dim == 1
    with pytest.raises(ValueError):
        channel.null_offset_space(inst, 3)


def test_read_instance_missing_file(tmp_path):
    with pytest.raises(ParseError):
        channel.read_instance(tmp_path / "absent.json")
