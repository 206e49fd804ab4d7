from fractions import Fraction

import pytest

from weillift.cusp import CuspError, cusp_data, find_isotropic_vectors
from weillift.lattice import IntegralLattice, discriminant_form, lattice_from_json

U = lattice_from_json("U")
U2_U = lattice_from_json({"sum": ["U(2)", "U"]})
U_A1 = lattice_from_json({"sum": ["U", "A1"]})
TWO_U_E8 = lattice_from_json({"sum": ["U", "U", "E8"]})


def test_find_isotropic_vectors_u():
    found = find_isotropic_vectors(U, 1)
    assert sorted(v for v, _ in found) == [(0, 1), (1, 0)]
    assert all(level == 1 for _, level in found)


def test_find_isotropic_vectors_definite_empty():
    assert find_isotropic_vectors(IntegralLattice(((2,),)), 3) == []


def test_find_isotropic_vectors_u_a1_exhaustive():
    # oracle: independent brute-force enumeration over the same box
    from itertools import product
    from math import gcd

    bound = 2
    expected = set()
    for vec in product(range(-bound, bound + 1), repeat=3):
        first = next((x for x in vec if x != 0), 0)
        if first <= 0:
            continue
        g = 0
        for x in vec:
            g = gcd(g, x)
        if g != 1:
            continue
        if U_A1.q(vec) == 0:
            expected.add(vec)
    found = {v for v, _ in find_isotropic_vectors(U_A1, bound)}
    assert found == expected
    # the U-supported ones are present; mixed-support isotropic vectors
    # like (1, 1, 1) (with A1 negative definite) exist in this box too
    assert {(1, 0, 0), (0, 1, 0)} <= found
    assert (1, 1, 1) in found


def test_cusp_split_u_summand():
    cusp = cusp_data(TWO_U_E8, (1, 0) + (0,) * 10, (0, 1) + (0,) * 10)
    assert cusp.level == 1
    k = cusp.k_lattice
    assert k.rank == 10
    assert abs(k.det) == 1
    assert k.signature == (1, 9)
    assert all(x == 0 for x in cusp.zeta_K)


def test_cusp_u2_example():
    z = (1, 0, 0, 0)
    zp = (0, Fraction(1, 2), 0, 0)
    cusp = cusp_data(U2_U, z, zp)
    assert cusp.level == 2
    assert cusp.zeta == (0, 1, 0, 0)
    assert cusp.k_lattice.rank == 2
    assert abs(cusp.k_lattice.det) == 1
    assert discriminant_form(cusp.k_lattice).order == 1
    assert all(x == 0 for x in cusp.zeta_K)


def test_projection_fixes_k_dual_vectors():
    cusp = cusp_data(U_A1, (1, 0, 0), (0, 1, 0))
    kmod = cusp.k_module()
    assert kmod.elementary_divisors == (2,)
    gen = kmod.vector((1,))
    lam = cusp.k_to_ambient(gen)
    assert cusp.lattice.bil(lam, cusp.z) == 0
    assert cusp.project(lam) == lam


def test_orthogonal_projection_agrees_on_kernel_basis():
    for lat, z, zp in [
        (U_A1, (1, 0, 0), (0, 1, 0)),
        (U2_U, (1, 0, 0, 0), (0, Fraction(1, 2), 0, 0)),
        (TWO_U_E8, (1, 0) + (0,) * 10, (0, 1) + (0,) * 10),
    ]:
        cusp = cusp_data(lat, z, zp)
        # the explicit-kernel Gram and the projected-vector Gram coincide
        for b1 in cusp.k_basis:
            assert cusp.orthogonal_projection(b1) == tuple(Fraction(x) for x in b1)
        assert all(x == 0 for x in cusp.orthogonal_projection(cusp.z))
        assert all(x == 0 for x in cusp.orthogonal_projection(cusp.z_prime))
        g1 = cusp.k_lattice.gram
        g2 = tuple(
            tuple(int(lat.bil(cusp.orthogonal_projection(b1), cusp.orthogonal_projection(b2))) for b2 in cusp.k_basis)
            for b1 in cusp.k_basis
        )
        assert g1 == g2


def test_section_walks_the_fiber():
    cusp = cusp_data(U2_U, (1, 0, 0, 0), (0, Fraction(1, 2), 0, 0))
    lift, t = cusp.section(())
    assert t == 0
    assert cusp.lattice.in_dual(lift)
    shifted = tuple(x + Fraction(z, cusp.level) for x, z in zip(lift, cusp.z))
    assert cusp.lattice.in_dual(shifted)
    # the two fiber elements are distinct classes over the trivial K'/K
    diff = tuple(a - b for a, b in zip(shifted, lift))
    assert not cusp.lattice.in_lattice(diff)


def test_cusp_validation_errors():
    with pytest.raises(CuspError):
        cusp_data(U_A1, (1, 1, 0), (0, 1, 0))  # not isotropic
    with pytest.raises(CuspError):
        cusp_data(U_A1, (2, 0, 0), (0, 1, 0))  # not primitive
    with pytest.raises(CuspError):
        cusp_data(U_A1, (1, 0, 0), (1, 0, 0))  # (z, z') != 1


def test_level_in_k():
    cusp = cusp_data(TWO_U_E8, (1, 0) + (0,) * 10, (0, 1) + (0,) * 10)
    kmod = cusp.k_module()
    assert kmod.order == 1
    # the split K = U + E8 contains a level-1 isotropic vector
    iso = find_isotropic_vectors(cusp.k_lattice, 1)
    levels = {lvl for _, lvl in iso}
    assert 1 in levels
