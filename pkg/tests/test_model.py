import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from suslov import model
from suslov.errors import DegenerateAxis, InvalidShape, ValidationError


def test_from_dict_rejects_unknown_and_missing_keys():
    with pytest.raises(ValidationError):
        model.InertiaTensor.from_dict({"I11": 1, "I22": 1})
    with pytest.raises(ValidationError):
        model.InertiaTensor.from_dict({"I11": 1, "I22": 1, "I33": 1, "I12": 0.1})
    with pytest.raises(ValidationError):
        model.InertiaTensor.from_dict({"I11": "1", "I22": 1, "I33": 1})


def test_dict_round_trip():
    I = model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4)
    assert model.InertiaTensor.from_dict(I.to_dict()) == I


def test_normalized_has_unit_determinant():
    I = model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4).normalized()
    assert I.det() == pytest.approx(1.0, abs=1e-14)
    assert I.det() == pytest.approx(np.linalg.det(I.matrix()), abs=1e-14)


def test_validate_inertia_reports_violations():
    diag = model.validate_inertia(model.InertiaTensor(1.0, -1.0, 1.0))
    assert not diag.passed
    assert "I22 > 0" in diag.violations
    ok = model.validate_inertia(model.InertiaTensor(1.0, 1.0, 1.0))
    assert ok.passed and ok.physical


def test_identity_tensor_is_degenerate_axis():
    v = model.meromorphicity_class(model.InertiaTensor(1.0, 1.0, 1.0))
    assert v.case is model.Case.Degenerate_Axis
    assert v.to_dict()["p"] is None
    with pytest.raises(DegenerateAxis):
        model.params_from_inertia(model.InertiaTensor(1.0, 1.0, 1.0))


def test_generic_tensor_is_not_meromorphic():
    v = model.meromorphicity_class(model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4))
    assert v.case is model.Case.NonMeromorphic


def test_case2_via_swap_symmetry():
    I = model.inertia_from_p(4, 2.0, 1.0, 1.5)
    swapped = model.apply_swap_symmetry(I)
    v = model.meromorphicity_class(swapped)
    assert v.case is model.Case.Case2_I23zero
    assert v.p_value == pytest.approx(4, abs=1e-9)
    assert v.p_parity == "even"
    spec = np.sort(model.kovalevskaya_spectrum(swapped).real)
    np.testing.assert_allclose(spec, [-3, -1, 1, 2, 5], atol=1e-8)


def test_swap_symmetry_maps_the_vector_field():
    from suslov.integrator import euler_poisson_rhs

    I = model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4).normalized()
    x = model.BodyState(0.3, -0.2, 0.5, 0.1, -0.7)
    lhs = model.apply_swap_symmetry(euler_poisson_rhs(x, I))
    rhs = euler_poisson_rhs(model.apply_swap_symmetry(x), model.apply_swap_symmetry(I))
    np.testing.assert_allclose(lhs.as_array(), rhs.as_array(), atol=1e-15)


def test_inertia_from_p_rejects_bad_shapes():
    with pytest.raises(InvalidShape):
        model.inertia_from_p(3, 1.0, 2.0, 1.5)
    with pytest.raises(InvalidShape):
        model.inertia_from_p(3, 3.0, 1.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(
    p=st.floats(0.2, 12.0),
    i22=st.floats(0.3, 2.0),
    gap=st.floats(0.05, 1.5),
    extra=st.floats(0.05, 2.0),
)
def test_inertia_from_p_round_trip(p, i22, gap, extra):
    i11 = i22 + gap
    i33 = gap + extra
    I = model.inertia_from_p(p, i11, i22, i33)
    assert model.validate_inertia(I).passed
    params = model.params_from_inertia(I)
    assert params.p == pytest.approx(p, rel=1e-9)


def test_special_params_match_tensor_params():
    I = model.inertia_from_p(3, 2.0, 1.0, 1.5)
    a = model.params_from_inertia(I)
    b = model.SuslovParams.special(a.p, a.d)
    assert a.a == pytest.approx(b.a, rel=1e-12)
    assert a.c2 == pytest.approx(b.c2, rel=1e-12)
    assert a.c1 == 0.0 and a.b == 0.0


def test_kovalevskaya_lambda_squared_matches_p_squared():
    for p in (1, 2, 5):
        I = model.inertia_from_p(p, 2.0, 1.0, 1.5)
        assert model.kovalevskaya_lambda_squared(I) == pytest.approx(p * p, rel=1e-9)


def test_kovalevskaya_balance_is_a_balance():
    from suslov.integrator import make_rhs

    I = model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4).normalized()
    d = model.kovalevskaya_balance(I)
    i11, i22, i13, i23 = I.I11, I.I22, I.I13, I.I23
    L = i13 * d[0] + i23 * d[1]
    F = np.array([i22 * L * d[1], -i11 * L * d[0]])
    np.testing.assert_allclose(F, -d[:2], atol=1e-12)
    assert make_rhs(I) is not None


def test_residue_eigenvalues_match_matrix_for_general_params():
    params = model.params_from_inertia(model.InertiaTensor(2.0, 1.0, 1.6, 0.3, 0.4))
    got = sorted(np.linalg.eigvals(model.residue_matrix(params)), key=lambda z: (z.real, z.imag))
    want = sorted(model.residue_eigenvalues(params), key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_special_requires_positive_d():
    with pytest.raises(ValidationError):
        model.SuslovParams.special(1.0, 0.0)
    assert math.isclose(model.SuslovParams.special(2.0, 0.5).a, 4.0)
