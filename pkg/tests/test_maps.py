import random

import pytest
from hypothesis import given, settings, strategies as st

from chernmoser.errors import TruncationError, ValidationError
from chernmoser.hermitian import Signature
from chernmoser.maps import (HoloMap, agree_up_to, compose_maps, identity_residual,
                             invert_map, transform_hypersurface)
from chernmoser.numbers import gr
from chernmoser.series import HoloSeries, hz_var, w_var

from oracles import random_map, random_surface

seeds = st.integers(0, 10 ** 6)


def test_map_invariants():
    n, K = 1, 5
    z, w = hz_var(n, 0, K), w_var(n, K)
    with pytest.raises(ValidationError):
        HoloMap([z + 1], w, K)
    with pytest.raises(ValidationError):
        HoloMap([z], w + z, K)
    with pytest.raises(ValidationError):
        HoloMap([w], w, K)
    with pytest.raises(TruncationError):
        HoloMap([z.truncate(2)], w, K)


@settings(max_examples=15)
@given(seeds, st.sampled_from([1, 2]))
def test_inverse_composes_to_identity(seed, n):
    phi = random_map(n, 6, random.Random(seed))
    inv = invert_map(phi)
    ident = HoloMap.identity(n, 6)
    assert compose_maps(phi, inv) == ident
    assert compose_maps(inv, phi) == ident


@settings(max_examples=10)
@given(seeds)
def test_composition_is_associative(seed):
    rng = random.Random(seed)
    a, b, c = (random_map(2, 5, rng) for _ in range(3))
    assert compose_maps(compose_maps(a, b), c) == compose_maps(a, compose_maps(b, c))


@settings(max_examples=10)
@given(seeds, st.sampled_from([(1, 1), (2, 1), (2, 2)]))
def test_pushforward_satisfies_identity(seed, ne):
    rng = random.Random(seed)
    sig = Signature(*ne)
    M = random_surface(sig, 6, rng)
    phi = random_map(sig.n, 6, rng)
    image = transform_hypersurface(phi, M)
    assert identity_residual(phi, M.F, image.F, 6).is_zero()


@settings(max_examples=8)
@given(seeds)
def test_pushforward_is_functorial(seed):
    rng = random.Random(seed)
    sig = Signature(1, 1)
    M = random_surface(sig, 6, rng)
    p1, p2 = random_map(1, 6, rng), random_map(1, 6, rng)
    step = transform_hypersurface(p1, transform_hypersurface(p2, M))
    assert step == transform_hypersurface(compose_maps(p1, p2), M)
    assert transform_hypersurface(invert_map(p2), transform_hypersurface(p2, M)) == M


def test_agree_up_to_uses_shifted_weights():
    n, K = 1, 6
    ident = HoloMap.identity(n, K)
    # a weight-4 change in f is invisible below O_x(6) but not O_x(7)
    f = hz_var(n, 0, K - 1) + HoloSeries(n, {((2,), 1): gr(1)}, K - 1)
    phi = HoloMap([f], w_var(n, K), K)
    assert agree_up_to(phi, ident, 5)
    assert not agree_up_to(phi, ident, 6)
    g = w_var(n, K) + HoloSeries(n, {((2,), 1): gr(1)}, K)
    psi = HoloMap([hz_var(n, 0, K - 1)], g, K)
    assert agree_up_to(psi, ident, 4)
    assert not agree_up_to(psi, ident, 5)
    with pytest.raises(TruncationError):
        agree_up_to(phi, ident, 8)
