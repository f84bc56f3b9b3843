import random

import pytest
from hypothesis import given, settings

import oracles
from gen import random_equivalence, random_space, scale_inside, seeds
from lsskit.errors import NotUniformlyBoundedError, OracleLimitExceeded
from lsskit.family import GroundSet, Scale, SetFamily, family_stars, star_family, trivial_extension
from lsskit.fixtures import D2, D23, P5, grid
from lsskit.limits import OracleLimits
from lsskit.lss import subspace, trace_family
from lsskit.maps import SpaceMap
from lsskit.nets import (
    ALL_NETS,
    COVERING,
    EXISTS_NET,
    ProximityGraph,
    bsm_transfer,
    check_bsm,
    compute,
    covering_number,
    enumerate_nets,
    greedy_net,
    min_cover_indices,
    net_bound_all,
    net_bound_exists,
    recheck,
    star_cover_from_net,
)

BIG = OracleLimits(cover_target=200, cover_base=200, net_ambient=200)


@pytest.fixture(scope="module")
def p5():
    return P5()


@pytest.fixture(scope="module")
def d23():
    return D23()


def test_greedy_net_examples(p5, d23):
    b1 = p5.scales["Balls1"]
    assert greedy_net(p5.ground.subset(), b1).ids == ()
    assert greedy_net(p5.ground.everything(), b1).ids == (0, 3)
    net = greedy_net(d23.ground.everything(), d23.scales["Comp"])
    assert net.members.labels() == ["a1", "b1"]


def test_enumerate_nets_examples(p5, d23):
    nets = enumerate_nets(p5.ground.everything(), p5.scales["Balls1"])
    assert [n.ids for n in nets] == [(0, 3), (0, 4), (1, 4), (2,)]
    one = enumerate_nets(p5.ground.subset([3]), p5.scales["Balls1"])
    assert [n.ids for n in one] == [(3,)]
    assert len(enumerate_nets(d23.ground.everything(), d23.scales["Comp"])) == 6


def test_enumerate_nets_limit(p5):
    with pytest.raises(OracleLimitExceeded):
        enumerate_nets(p5.ground.everything(), p5.scales["Balls1"], OracleLimits(net_ambient=4))


def test_net_bounds_examples(p5, d23):
    g = p5.ground
    whole = Scale.whole(g)
    b1 = p5.scales["Balls1"]
    assert net_bound_all(whole, b1).bound == 2
    ex = net_bound_exists(whole, b1)
    assert ex.bound == 1 and ex.witnesses == ((2,),)
    s = Scale.singletons(g)
    assert net_bound_all(whole, s).bound == 5
    assert net_bound_exists(whole, s).bound == 5
    comp, ds = d23.scales["Comp"], Scale.singletons(d23.ground)
    assert net_bound_all(comp, ds).bound == 3
    assert net_bound_exists(comp, comp).bound == 1


def test_covering_examples(p5):
    b1 = p5.scales["Balls1"]
    assert covering_number(b1, b1).bound == 1
    cert = covering_number(Scale.whole(p5.ground), b1)
    assert cert.bound == 2
    # lexicographically first minimum cover: B(0) ∪ B(3); B(1) ∪ B(3) is another
    assert cert.witnesses == ((0, 3),)


@pytest.mark.parametrize("d,k", [(1, 2), (2, 4), (3, 8)])
def test_grid_covering_numbers(d, k):
    g = grid(d)
    assert covering_number(g.scales["Balls2"], g.scales["Balls1"], BIG).bound == k


def test_grid_needs_raised_limit():
    g = grid(2)
    with pytest.raises(OracleLimitExceeded):
        covering_number(g.scales["Balls2"], g.scales["Balls1"])


def test_check_bsm_examples(d23):
    g = GroundSet.of_size(3)
    from lsskit.lss import discrete

    disc = discrete(g)
    for mode in (ALL_NETS, EXISTS_NET, COVERING):
        assert check_bsm(disc, Scale.singletons(g), mode).bound == 1
        assert check_bsm(d23.space, d23.scales["Comp"], mode).bound == 1
    assert check_bsm(d23.space, Scale.singletons(d23.ground), ALL_NETS).bound == 3


def test_check_bsm_requires_bounded_base(d23):
    bad = Scale(d23.ground, (0b11111,))
    with pytest.raises(NotUniformlyBoundedError):
        check_bsm(d23.space, bad, COVERING)


def test_bsm_transfer_examples(d23):
    d2 = D2()
    comp = d23.scales["Comp"]
    ident = SpaceMap.identity(d23.space)
    cert = check_bsm(d23.space, comp, ALL_NETS)
    moved = bsm_transfer(ident, cert)
    assert (moved.bound, moved.base, moved.mode) == (cert.bound, cert.base, cert.mode)
    collapse = SpaceMap.from_labels(d23.space, d2.space, {"a1": "p", "a2": "p", "b1": "q", "b2": "q", "b3": "q"})
    assert bsm_transfer(collapse, cert).bound == 1
    incl = SpaceMap.from_labels(d2.space, d23.space, {"p": "a1", "q": "b1"})
    back = bsm_transfer(incl, check_bsm(d23.space, comp, COVERING))
    assert back.mode == COVERING and back.bound == 1


def test_recheck(p5):
    cert = check_bsm(p5.space, p5.scales["Balls1"], COVERING)
    assert recheck(cert)


def test_min_cover_collapses_duplicates():
    assert min_cover_indices(0b11, [0b01, 0b01, 0b11]) == (2,)
    assert min_cover_indices(0b11, [0b01, 0b10, 0b01]) == (0, 1)


def _sets(fam):
    return [set(u.ids) for u in fam]


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_nets_match_subset_oracle(seed):
    rng = random.Random(seed)
    space = random_space(rng, 6)
    u = scale_inside(rng, space)
    amb = set(rng.sample(range(space.size), rng.randint(0, space.size)))
    got = {frozenset(n.ids) for n in enumerate_nets(space.ground.subset(amb), u)}
    assert got == set(oracles.nets(amb, _sets(u)))
    greedy = greedy_net(space.ground.subset(amb), u)
    assert frozenset(greedy.ids) in got
    assert ProximityGraph.of(u).is_net(greedy.members.mask, space.ground.subset(amb).mask)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_min_cover_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    sets = [set(rng.sample(range(n), rng.randint(1, n))) for _ in range(rng.randint(1, 9))]
    target = set(rng.sample(range(n), rng.randint(0, n)))
    masks = [sum(1 << x for x in s) for s in sets]
    want = oracles.min_cover(target, sets)
    if want is None:
        with pytest.raises(Exception):
            min_cover_indices(sum(1 << x for x in target), masks)
        return
    got = min_cover_indices(sum(1 << x for x in target), masks)
    assert len(got) == len(want)
    assert target <= set().union(*(sets[i] for i in got))


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_constant_ordering_and_star_cover(seed):
    rng = random.Random(seed)
    space = random_space(rng, 8)
    u = scale_inside(rng, space)
    q = space.maximal_bounded
    n, uu, k = (compute(q, u, m).bound for m in (EXISTS_NET, ALL_NETS, COVERING))
    assert n <= uu <= k
    # every st(U, U)-net of a maximal bounded set is smaller than 2n + 1
    doubled = star_family(u, u)
    for v in q:
        for net in enumerate_nets(v, doubled):
            assert len(net) < 2 * n + 1
    # the stars of any net point cover V with u elements of st(U, U)
    doubled_masks = set(family_stars(u.masks, u.masks))
    for v in q:
        for net in enumerate_nets(v, u):
            stars = star_cover_from_net(net.ids, u)
            assert len(stars) <= uu
            assert all(s in doubled_masks for s in stars)
            acc = 0
            for s in stars:
                acc |= s
            assert not v.mask & ~acc


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_coarser_base_never_increases_k(seed):
    rng = random.Random(seed)
    space = random_space(rng, 8)
    u = scale_inside(rng, space)
    v = star_family(u, scale_inside(rng, space)).as_scale()
    assert check_bsm(space, v, COVERING).bound <= check_bsm(space, u, COVERING).bound


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_subspace_never_increases_u(seed):
    rng = random.Random(seed)
    space = random_space(rng, 8)
    u = scale_inside(rng, space)
    Y = space.ground.subset(rng.sample(range(space.size), rng.randint(1, space.size)))
    sub = subspace(space, Y)
    traced = trivial_extension(trace_family(u, Y, sub.ground))
    assert check_bsm(sub, traced, ALL_NETS).bound <= check_bsm(space, u, ALL_NETS).bound


@settings(max_examples=150, deadline=None)
@given(seeds)
def test_transfer_never_increases_bound(seed):
    rng = random.Random(seed)
    f = random_equivalence(rng, 7)
    mode = rng.choice([ALL_NETS, EXISTS_NET, COVERING])
    for space in (f.source, f.target):
        u = scale_inside(rng, space)
        cert = check_bsm(space, u, mode)
        assert bsm_transfer(f, cert).bound <= cert.bound
