import numpy as np
import pytest

from alexlab.errors import InstanceError
from alexlab.hopf_lab import ComparisonInstance, reflection_instance, trichotomy_check
from alexlab.surface_core import ScalarField, quadratic_field


def _bowl(shift=0.0, drop=0.0):
    """(t + shift)^2 + y^2 - drop with exact derivatives."""
    return ScalarField(
        lambda x: (x[0] + shift) ** 2 + x[1] ** 2 - drop,
        2,
        grad=lambda x: np.array([2 * (x[0] + shift), 2 * x[1]]),
        hess=lambda x: 2 * np.eye(2),
    )


@pytest.mark.parametrize("operator", ["mean-curvature", "laplacian"])
def test_translation_pair_is_strictly_greater(operator):
    rep = trichotomy_check(ComparisonInstance(_bowl(0.1), _bowl(), operator, nodes=11))
    assert rep.conclusion == "strictly-greater"
    assert rep.status("pairing") == "holds"


def test_identical_pair():
    rep = trichotomy_check(ComparisonInstance(_bowl(), _bowl(), nodes=11))
    assert rep.conclusion == "identical"


def test_reflection_of_even_function_is_identical():
    v = quadratic_field(2 * np.eye(2))
    rep = trichotomy_check(reflection_instance(v))
    assert rep.conclusion == "identical"
    assert rep.fitted_constants["domain_residual"] <= 1e-8


def test_broken_ordering_gives_witness():
    rep = trichotomy_check(ComparisonInstance(_bowl(drop=0.05), _bowl(), nodes=11))
    assert rep.conclusion == "counterexample-witness"
    assert "u_ge_v" in rep.details["witness"]["broken"]


def test_custom_operator_ellipticity():
    F = lambda p, N: float(np.trace(N) + 0.1 * N[0, 0] ** 2)
    rep = trichotomy_check(ComparisonInstance(_bowl(0.1), _bowl(), "custom", F, nodes=9))
    assert rep.status("elliptic") == "holds"


def test_non_elliptic_custom_operator_flagged():
    F = lambda p, N: float(-np.trace(N))
    rep = trichotomy_check(ComparisonInstance(_bowl(0.1), _bowl(), "custom", F, nodes=9))
    assert "elliptic" in rep.broken


def test_unpaired_instance_raises():
    far = ScalarField(lambda x: 10 + x[0], 2, grad=lambda x: np.array([1.0, 0.0]), hess=lambda x: np.zeros((2, 2)))
    with pytest.raises(InstanceError):
        trichotomy_check(ComparisonInstance(far, _bowl(), nodes=7))


def test_custom_without_F_rejected():
    with pytest.raises(InstanceError):
        ComparisonInstance(_bowl(), _bowl(), "custom")
