import math

import numpy as np
import pytest

from susy_chain.core.analysis import (
    TwoWellParams,
    dense_pole_count,
    lattice_survivors,
    v2_closed_form,
    v2_profile,
)
from susy_chain.core.chain import (
    BacklundChain,
    PoleKind,
    TableSeed,
    backlund_step,
    count_poles,
    eval_grid,
    eval_level,
    eval_potential,
)
from susy_chain.core.exceptions import DenominatorZero, SingularPoint
from susy_chain.core.seeds import SeedSpec, eval_seed, first_order_partner


def test_backlund_step_matches_table_entry(regular_pair):
    x = 1.0
    beta_s = eval_seed(SeedSpec("S", 1.0), x).beta
    beta_r = eval_seed(SeedSpec("R", 0.5), x).beta
    expected = backlund_step(beta_s, beta_r, -0.5, -0.125)
    assert eval_level(regular_pair, 2, 2, x).beta == pytest.approx(expected, rel=1e-14)


def test_backlund_step_derivative_reproduces_two_well_closed_form():
    x, h = 1.0, 1e-5
    s, r = SeedSpec("S", 1.0), SeedSpec("R", 0.5)

    def beta2(t: float) -> float:
        return backlund_step(eval_seed(s, t).beta, eval_seed(r, t).beta, -0.5, -0.125)

    derivative = (beta2(x + h) - beta2(x - h)) / (2 * h)
    v2 = v2_closed_form(TwoWellParams(1.0, 0.5), x)
    assert derivative == pytest.approx(v2 - first_order_partner(s, x), abs=1e-7)


def test_backlund_step_equal_energies_is_reflection():
    assert backlund_step(0.7, -0.2, -0.5, -0.5) == -0.7


def test_backlund_step_raises_on_vanishing_denominator():
    with pytest.raises(DenominatorZero):
        backlund_step(0.3, 0.3, -0.5, -0.125)


def test_chain_rejects_empty_and_duplicate_seeds():
    with pytest.raises(ValueError):
        BacklundChain([])
    with pytest.raises(ValueError):
        BacklundChain([SeedSpec("S", 1.0), SeedSpec("R", 1.0, 3.0)])
    with pytest.raises(ValueError):
        BacklundChain([SeedSpec("R", 1.0), "R"])


@pytest.mark.parametrize("k, j", [(0, 1), (3, 3), (2, 1)])
def test_eval_level_rejects_indices_outside_table(regular_pair, k, j):
    with pytest.raises(ValueError):
        regular_pair.eval_level(k, j, 1.0)


def test_first_level_is_the_seed(regular_pair):
    for x in (-2.0, 0.5, 3.0):
        level = regular_pair.eval_level(1, 1, x)
        seed = eval_seed(SeedSpec("S", 1.0), x)
        assert level.beta == seed.beta
        assert level.beta_prime == seed.beta_prime
        assert level.v == seed.beta_prime


@pytest.mark.parametrize(
    "spec",
    [SeedSpec("R", 1.3, 0.2), SeedSpec("S", 0.8, -1.0), SeedSpec("P", 1.0, 0.5)],
)
def test_order_one_chain_equals_first_order_partner(spec):
    chain = BacklundChain([spec])
    for x in (-2.3, -0.1, 0.9, 4.4):
        assert eval_potential(chain, x) == first_order_partner(spec, x)


@pytest.mark.parametrize("x", [-7.5, -1.0, 0.3, 2.0, 9.1])
def test_potential_telescopes(three_soliton, x):
    v3 = three_soliton.eval_potential(x)
    assert v3 == three_soliton.eval_level(3, 3, x).v
    assert v3 == three_soliton.level_potential(3)(np.array([x]))[0]


def test_eval_potential_raises_at_seed_pole(regular_pair):
    with pytest.raises(SingularPoint) as exc_info:
        regular_pair.eval_potential(0.0)
    assert exc_info.value.level == 1
    assert exc_info.value.pole_kind == "seed_pole"


def test_eval_level_flags_inherited_singularity(regular_pair):
    value = regular_pair.eval_level(2, 2, 0.0)
    assert value.is_singular
    assert value.pole_kind is PoleKind.SEED_POLE
    assert math.isnan(value.beta)


def test_potential_decays_far_from_wells(regular_pair):
    for x in (-20.0, 20.0):
        assert abs(regular_pair.eval_potential(x)) < 1e-6


def test_eval_grid_validates_arguments(regular_pair):
    with pytest.raises(ValueError):
        eval_grid(regular_pair, 1.0, 1.0, 10)
    with pytest.raises(ValueError):
        eval_grid(regular_pair, -1.0, 1.0, 1)


def test_regular_well_has_no_flagged_points(pt_well):
    sample = eval_grid(pt_well, -10.0, 10.0, 2001)
    assert sample.singular_count == 0
    assert sample.poles == []
    assert sample.energies == [-0.5]
    assert sample.step == pytest.approx(0.01)


def test_singular_seed_pole_is_located_exactly():
    sample = eval_grid(BacklundChain([SeedSpec("S", 1.0, 0.0)]), -5.0, 5.0, 2001)
    count, locations = count_poles(sample)
    assert count == 1
    assert abs(locations[0]) < 1e-12
    assert sample.poles[0].kind is PoleKind.SEED_POLE


def test_regular_pair_cancels_seed_pole(regular_pair):
    sample = eval_grid(regular_pair, -5.0, 5.0, 2001)
    assert count_poles(sample) == (0, [])
    assert any(abs(c) < 1e-9 for c in sample.cancelled)
    assert np.all(np.isfinite(sample.v))

    near = np.abs(sample.x) < 0.05
    reference, _ = v2_profile(TwoWellParams(1.0, 0.5), sample.x[near])
    np.testing.assert_allclose(sample.v[near], reference, atol=1e-6)


def test_three_soliton_chain_is_poschl_teller(three_soliton):
    x = np.linspace(-10.0, 10.0, 2001)
    sample = three_soliton.sample(x)
    assert sample.poles == []
    assert any(abs(c) < 1e-9 for c in sample.cancelled)
    np.testing.assert_allclose(sample.v, -1.5 / np.cosh(0.5 * x) ** 2, atol=1e-7)


def test_deeper_second_well_produces_pole_near_its_center():
    chain = BacklundChain(TwoWellParams(0.04, 1.0, 0.0, 100.0).chain_seeds())
    sample = eval_grid(chain, -15.0, 15.0, 2001)
    count, locations = count_poles(sample)
    assert count == 1
    assert abs(locations[0]) < 0.05
    assert sample.poles[0].kind is PoleKind.DENOMINATOR_ZERO
    assert sample.poles[0].level == 2


def test_inverted_pair_is_singular():
    chain = BacklundChain([SeedSpec("S", 0.5), SeedSpec("R", 1.0)])
    count, _ = count_poles(eval_grid(chain, -10.0, 10.0, 2001))
    assert count >= 1


@pytest.mark.parametrize("half_periods, m", [(5, 4001), (10, 8001)])
def test_periodic_partner_keeps_every_lattice_pole(half_periods, m):
    spec = SeedSpec("P", 1.0, 0.5)
    chain = BacklundChain([spec])
    lo, hi = -half_periods * math.pi, half_periods * math.pi
    sample = eval_grid(chain, lo, hi, m)
    count, _ = count_poles(sample)
    assert count == 2 * half_periods
    assert len(lattice_survivors(sample, spec)) == 2 * half_periods
    assert dense_pole_count(chain, lo, hi) == count


@pytest.mark.parametrize("half_periods, m", [(5, 4001), (10, 8001)])
def test_second_step_cancels_periodic_lattice(half_periods, m):
    spec = SeedSpec("P", 1.0, 0.5)
    chain = BacklundChain([spec, SeedSpec("S", 1.0, -0.7)])
    lo, hi = -half_periods * math.pi, half_periods * math.pi
    sample = eval_grid(chain, lo, hi, m)
    count, locations = count_poles(sample)
    assert lattice_survivors(sample, spec) == []
    assert all(p.kind is PoleKind.DENOMINATOR_ZERO for p in sample.poles)
    assert not any(abs(c + 0.7) < 1e-6 for c in locations)
    assert dense_pole_count(chain, lo, hi) == count


def test_table_entries_reseed_a_chain_over_intermediate_level(three_soliton):
    reseeded = BacklundChain(
        [TableSeed(three_soliton, 2, 2), TableSeed(three_soliton, 2, 3)],
        base_potential=three_soliton.level_potential(1),
    )
    assert reseeded.energies == three_soliton.energies[1:]
    x = np.linspace(0.3, 8.0, 50)
    np.testing.assert_allclose(
        reseeded.level_potential(2)(x),
        three_soliton.level_potential(3)(x),
        rtol=1e-12,
        atol=1e-12,
    )


def test_table_seed_validates_indices(three_soliton):
    with pytest.raises(ValueError):
        TableSeed(three_soliton, 3, 2)
    with pytest.raises(ValueError):
        TableSeed(three_soliton, 1, 4)


def test_pole_between_nodes_flags_the_nearest_row():
    chain = BacklundChain(TwoWellParams(0.04, 1.0, 0.0, 100.0).chain_seeds())
    sample = eval_grid(chain, -15.0, 15.0, 2001)
    (pole,) = sample.poles
    assert sample.singular_count == 1
    (i,) = np.flatnonzero(sample.is_singular)
    assert abs(sample.x[i] - pole.location) <= 0.5 * sample.step
    assert sample.pole_kind[i] == PoleKind.DENOMINATOR_ZERO
    assert math.isnan(sample.v[i])


def test_periodic_lattice_poles_flag_grid_rows(window_10pi):
    spec = SeedSpec("P", 1.0, 0.5)
    sample = BacklundChain([spec]).sample(window_10pi)
    assert sample.singular_count == 10
    flagged = sample.x[sample.is_singular]
    for node, pole in zip(flagged, spec.poles(-5 * math.pi, 5 * math.pi)):
        assert abs(node - pole) <= 0.5 * sample.step
    assert set(sample.pole_kind[sample.is_singular]) == {PoleKind.SEED_POLE}
