import pytest

from core.errors import InconsistentInvariants, InvalidParams
from core.surface import euler_histogram, genus_histogram, invariants_from_cycles, validate_params


def test_validate_params_regimes():
    p = validate_params(6, 3)
    assert (p.faces, p.edges_after, p.gamburd_regime) == (2, 3, False)
    assert validate_params(12, 3).gamburd_regime


def test_validate_params_message_names_divisibility():
    with pytest.raises(InvalidParams) as excinfo:
        validate_params(8, 3)
    assert "lcm(2,3)=6 ∤ 8" in str(excinfo.value)


@pytest.mark.parametrize("n,k", [(6, 2), (9, 3), (10, 4)])
def test_validate_params_rejects(n, k):
    with pytest.raises(InvalidParams):
        validate_params(n, k)


@pytest.mark.parametrize(
    "n,k,v,chi,genus",
    [(6, 3, 3, 2, 0), (6, 3, 1, 0, 1), (12, 3, 2, 0, 1)],
)
def test_invariants_from_cycles(n, k, v, chi, genus):
    inv = invariants_from_cycles(validate_params(n, k), v)
    assert (inv.euler_characteristic, inv.genus) == (chi, genus)


@pytest.mark.parametrize("v", [2, 5, 0])
def test_invariants_reject_impossible_vertex_counts(v):
    with pytest.raises(InconsistentInvariants):
        invariants_from_cycles(validate_params(6, 3), v)


def test_two_pillows_at_twelve_three():
    # 四个三角形两两粘成两个球面：v = 6，χ = 4
    params = validate_params(12, 3)
    inv = invariants_from_cycles(params, 6, components=2)
    assert (inv.euler_characteristic, inv.genus, inv.components) == (4, 0, 2)
    with pytest.raises(InconsistentInvariants):
        invariants_from_cycles(params, 6)


@pytest.mark.parametrize("v,c", [(4, 5), (2, 5), (3, 1)])
def test_invariants_reject_impossible_components(v, c):
    with pytest.raises(InconsistentInvariants):
        invariants_from_cycles(validate_params(12, 3), v, c)


def test_genus_histogram():
    assert genus_histogram(validate_params(6, 3), {(1, 1): 3, (3, 1): 12}) == {1: 3, 0: 12}
    assert genus_histogram(validate_params(12, 3), {(2, 1): 5, (4, 1): 7, (4, 2): 1, (6, 2): 2}) == {1: 6, 0: 9}


def test_euler_histogram():
    assert euler_histogram(validate_params(12, 3), {2: 5, 4: 8, 6: 2, 8: 0}) == {0: 5, 2: 8, 4: 2}
