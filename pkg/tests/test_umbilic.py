import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from chernmoser.errors import (IrrationalScalingError, NotNormalFormError, PreconditionError,
                               TruncationError, UmbilicError, ValidationError)
from chernmoser.group import validate_sigma
from chernmoser.hermitian import Signature, check_normal_form, hermitian_form
from chernmoser.maps import Hypersurface, transform_hypersurface
from chernmoser.normalize import normalize
from chernmoser.numbers import gr
from chernmoser.series import u_var, z_var, zbar_var
from chernmoser.umbilic import (A_STEP, R_STEP, SCALE_STEP, candidate_vectors, is_umbilic_origin,
                                lower_weight, lowest_order, lowest_weight, moser_alpha,
                                moser_invariants, moser_reduce, moser_reduced, spherical_to_order,
                                translate_along_u, webster_invariants, webster_reduce,
                                webster_reduced)

from oracles import moser_instance, random_map, random_normal_surface, random_sigma_data, webster_instance

D3 = Signature(1, 1)


def test_umbilicity_at_origin():
    assert is_umbilic_origin(Hypersurface.quadric(D3, 6))
    assert not is_umbilic_origin(moser_instance(1))
    assert not is_umbilic_origin(webster_instance(Signature(2, 2), mpq(1, 6)))
    # only u-dependent F42 terms: umbilic at the origin
    M = Hypersurface.from_terms(D3, {((4,), (2,), 1): gr(1)}, 8)
    assert is_umbilic_origin(M)
    with pytest.raises(TruncationError):
        is_umbilic_origin(Hypersurface.quadric(D3, 5))
    with pytest.raises(NotNormalFormError):
        is_umbilic_origin(Hypersurface.from_terms(D3, {((3,), (1,), 0): gr(1)}, 6))


def test_translation_matches_substitution():
    M = moser_instance(gr(2, 1))
    u0 = mpq(-2, 3)
    zs, zb = [z_var(1, 0)], [zbar_var(1, 0)]
    shifted = M.F.compose(zs, zb, u_var(1) + u_var(1).constant(u0), M.K)
    assert translate_along_u(M, u0).F == shifted
    assert translate_along_u(M, 0) == M


def test_umbilicity_along_the_u_axis():
    # F42 = u z^4 zbar^2 + c.c.: umbilic at u = 0 only
    M = Hypersurface.from_terms(D3, {((4,), (2,), 1): gr(1)}, 8)
    at = [is_umbilic_origin(normalize(translate_along_u(M, u0)).surface)
          for u0 in (mpq(0), mpq(1, 2), mpq(-1, 3))]
    assert at == [True, False, False]


def test_lowest_weight_and_order():
    assert lowest_weight(Hypersurface.quadric(D3, 8)) is None
    M = Hypersurface.from_terms(D3, {((4,), (2,), 1): gr(1), ((5,), (2,), 0): gr(1)}, 8)
    assert lowest_weight(M) == 7
    assert lowest_order(M) == 6


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_lowest_weight_is_invariant(seed):
    rng = random.Random(seed)
    M = random_normal_surface(D3, 8, rng, density=0.3, lo=6)
    sigma = validate_sigma(*random_sigma_data(D3, rng), D3)
    assert lowest_weight(normalize(M, sigma).surface) == lowest_weight(M)


@settings(max_examples=6)
@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1, 8), (2, 1, 6)]))
def test_images_of_the_quadric_are_spherical(seed, case):
    n, e, K = case
    sig = Signature(n, e)
    image = transform_hypersurface(random_map(n, K, random.Random(seed)), Hypersurface.quadric(sig, K))
    assert spherical_to_order(image)


def test_nonspherical_detected():
    assert not spherical_to_order(moser_instance(1))
    # flat through weight 7, curved at weight 8
    M = Hypersurface.from_terms(D3, {((4,), (4,), 0): gr(1)}, 8)
    assert spherical_to_order(M, 7) and not spherical_to_order(M, 8)


def _order7_surface():
    return Hypersurface.from_terms(D3, {((5,), (2,), 0): gr(1), ((4,), (4,), 0): gr(2),
                                        ((6,), (2,), 0): gr(1, 1)}, 8)


def test_lower_weight_from_seven():
    M = _order7_surface()
    assert lowest_order(M) == 7
    a, out = lower_weight(M)
    assert lowest_order(out) == 6
    assert check_normal_form(out).is_normal
    # the new order-6 part at first order in u is a dF52/dz + conj(a) dF43/dzbar
    rest = M.F - hermitian_form(D3, 8)
    pred = (rest.bidegree_component(5, 2).at_u_zero().d_z(0) * a[0]
            + rest.bidegree_component(4, 3).at_u_zero().d_zbar(0) * a[0].conj())
    assert out.F.coeff((4,), (2,), 1) == pred.coeff((4,), (2,), 0)


def test_lower_weight_preconditions():
    with pytest.raises(PreconditionError):
        lower_weight(moser_instance(1))
    with pytest.raises(PreconditionError):
        lower_weight(Hypersurface.quadric(D3, 8))
    with pytest.raises(TruncationError):
        lower_weight(_order7_surface().truncate(7))
    # order-7 part only present at positive u
    M = Hypersurface.from_terms(D3, {((5,), (2,), 1): gr(1)}, 9)
    with pytest.raises(PreconditionError):
        lower_weight(M)


def test_candidate_vectors_are_distinct():
    vs = [tuple(v) for v in candidate_vectors(2, 60)]
    assert len(vs) == len(set(vs)) == 60
    assert all(any(x) for x in vs)


# dimension 3 -------------------------------------------------------------------------

@pytest.mark.parametrize("b", [gr(1), gr(16), gr(0, 4), gr(-1), gr(mpq(81, 16))])
def test_alpha_normalizes_b(b):
    al = moser_alpha(b)
    assert al * al * al * al.conj() == b


def test_alpha_irrational_and_umbilic():
    with pytest.raises(IrrationalScalingError) as ei:
        moser_alpha(gr(-4))
    assert ei.value.radicand is not None
    with pytest.raises(UmbilicError):
        moser_alpha(gr(0))


@pytest.mark.parametrize("variant", ["f43", "f52"])
@pytest.mark.parametrize("b", [gr(1), gr(16), gr(0, 4)])
def test_moser_reduction(b, variant):
    M = moser_instance(b)
    trace = moser_reduce(M, variant)
    assert [r for _, r, _ in trace.steps] == [A_STEP, SCALE_STEP, R_STEP]
    assert moser_reduced(trace.final, variant)
    assert check_normal_form(trace.final).is_normal
    again = moser_reduce(trace.final, variant)
    assert all(s.is_identity() for s in again.sigmas())
    assert again.final == trace.final


def test_moser_a_step_parameters():
    M = moser_instance(gr(0, 4), c=gr(1, 1), d=gr(2, -1))
    inv = moser_invariants(M)
    a43 = moser_reduce(M, "f43").steps[0][2]["a"]
    assert a43 == gr(0, 3) * inv["d"] / (inv["b"] * 2)
    a52 = moser_reduce(M, "f52").steps[0][2]["a"]
    assert a52 == -(gr(0, 1) * inv["c"].conj()) / (inv["b"].conj() * 2)


def test_moser_errors():
    with pytest.raises(UmbilicError):
        moser_reduce(Hypersurface.from_terms(D3, {((5,), (2,), 0): gr(1)}, 8))
    with pytest.raises(IrrationalScalingError):
        moser_reduce(moser_instance(gr(2)))
    with pytest.raises(ValidationError):
        moser_reduce(moser_instance(1), "f61")
    with pytest.raises(TruncationError):
        moser_reduce(moser_instance(1, K=7))


# dimension >= 5 ----------------------------------------------------------------------

@pytest.mark.parametrize("e,t,Y", [(2, "1/6", 1), (2, "1/3", 4), (2, "2/3", 16), (1, "1/2", 1)])
def test_webster_reduction(e, t, Y):
    M = webster_instance(Signature(2, e), mpq(t))
    assert webster_invariants(M)["Y"] == Y
    trace = webster_reduce(M)
    (s1, _, _), (s2, _, p2), (s3, _, p3) = trace.steps
    assert p2["rho"] ** 2 == Y and p2["c"].abs2() == p2["rho"]
    assert webster_reduced(trace.final)
    assert check_normal_form(trace.final).is_normal
    again = webster_reduce(trace.final)
    assert all(s.is_identity() for s in again.sigmas())


def test_webster_gaussian_scale():
    trace = webster_reduce(webster_instance(Signature(2, 2), mpq(1, 3)))
    assert trace.steps[1][2]["c"] == gr(1, 1)


def test_webster_irrational_scale():
    with pytest.raises(IrrationalScalingError) as ei:
        webster_reduce(webster_instance(Signature(2, 2), mpq(1, 2)))
    assert ei.value.radicand == "3/1"


def test_webster_preconditions():
    with pytest.raises(ValidationError):
        webster_reduce(moser_instance(1))
    with pytest.raises(PreconditionError):
        webster_reduce(Hypersurface.quadric(Signature(2, 2), 6))
