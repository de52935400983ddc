import math

import numpy as np
import pytest

from susy_chain.core.analysis import (
    TwoWellParams,
    sample_v2,
    v1_closed_forms,
    v1_profile,
    v2_closed_form,
    v2_poles,
    v2_profile,
    well_census,
)
from susy_chain.core.chain import BacklundChain, GridSample, eval_grid
from susy_chain.core.exceptions import DenominatorZero, SingularPoint
from susy_chain.core.seeds import SeedFamily, SeedSpec

ORACLE_TUPLES = [
    (1.0, 0.5, 0.0, 0.0),
    (1.0, 0.5, 5.0, 5.0),
    (2.0, 1.0, -1.0, 3.0),
    (1.5, 0.7, 2.0, -2.0),
    (0.5, 1.0, 0.0, 0.0),
    (0.8, 1.6, 1.0, -1.0),
]


@pytest.mark.parametrize("kappa, a, b", [(1.0, 0.0, 0.0), (0.3, 2.0, -4.0)])
def test_equal_kappas_vanish_identically(kappa, a, b):
    p = TwoWellParams(kappa, kappa, a, b)
    for x in (-b, -3.0, 0.0, 7.5):
        assert v2_closed_form(p, x) == 0.0
    assert v2_poles(p, -10.0, 10.0) == []


@pytest.mark.parametrize("data", [(0.0, 1.0), (1.0, -0.5), (math.nan, 1.0)])
def test_two_well_params_validate(data):
    with pytest.raises(ValueError):
        TwoWellParams(*data)


def test_two_well_params_map_to_chain_seeds():
    p = TwoWellParams(1.0, 0.5, 2.0, -3.0)
    seeds = p.chain_seeds()
    assert seeds == [SeedSpec("S", 1.0, 3.0), SeedSpec("R", 0.5, -2.0)]
    assert TwoWellParams.from_seeds(seeds) == p
    assert TwoWellParams.from_seeds(list(reversed(seeds))) is None
    assert TwoWellParams.from_seeds(seeds[:1]) is None


def test_regular_two_well_is_finite_everywhere():
    values, singular = v2_profile(TwoWellParams(1.0, 0.5), np.linspace(-15, 15, 3001))
    assert not singular.any()
    assert np.all(np.isfinite(values))
    assert v2_closed_form(TwoWellParams(1.0, 0.5), 0.0) == pytest.approx(-0.75)


@pytest.mark.parametrize("params", ORACLE_TUPLES)
def test_chain_matches_two_well_closed_form(params):
    p = TwoWellParams(*params)
    chain = BacklundChain(p.chain_seeds())
    x = np.linspace(-15.0, 15.0, 2001)
    margin = 1.5 / chain.kappa_max
    keep = np.ones(x.shape, dtype=bool)
    for cand in chain.candidates(x):
        keep &= np.abs(x - cand.location) >= margin

    values = chain(x)
    reference, _ = v2_profile(p, x)
    keep &= np.isfinite(values) & np.isfinite(reference)
    assert np.count_nonzero(keep) > 1000
    scale = p.kappa1**2 * np.maximum(1.0, np.abs(reference[keep]))
    assert np.max(np.abs(values[keep] - reference[keep]) / scale) <= 1e-9


def test_closed_form_is_scale_covariant():
    p = TwoWellParams(1.0, 0.5, 1.0, 2.0)
    scaled = TwoWellParams(2.0, 1.0, 0.5, 1.0)
    x = np.linspace(-8.0, 8.0, 801)
    np.testing.assert_allclose(
        v2_profile(scaled, x)[0], 4.0 * v2_profile(p, 2.0 * x)[0], rtol=1e-10
    )


def test_cancelled_pole_is_continuous():
    p = TwoWellParams(1.0, 0.5, 0.0, 2.0)
    center = v2_closed_form(p, -2.0)
    assert center == pytest.approx(-(1.0 - 0.25))
    gaps = [
        abs(v2_closed_form(p, -2.0 + h) - v2_closed_form(p, -2.0 - h))
        for h in (1e-2, 1e-3, 1e-4)
    ]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_inverted_two_well_pole_near_deeper_center():
    p = TwoWellParams(0.04, 1.0, 0.0, 100.0)
    roots = v2_poles(p, -15.0, 15.0)
    assert len(roots) == 1
    assert abs(roots[0]) < 0.05
    with pytest.raises(DenominatorZero):
        v2_closed_form(p, roots[0])


def test_sample_v2_reports_cancellation_and_poles():
    regular = sample_v2(TwoWellParams(1.0, 0.5, 0.0, 3.0), -10.0, 10.0, 1001)
    assert regular.cancelled == [-3.0]
    assert regular.poles == []
    assert regular.energies == [-0.5, -0.125]

    singular = sample_v2(TwoWellParams(0.04, 1.0, 0.0, 100.0), -15.0, 15.0, 1001)
    assert len(singular.poles) == 1
    assert singular.singular_count == 1
    assert np.isnan(singular.v[singular.is_singular]).all()
    with pytest.raises(ValueError):
        sample_v2(TwoWellParams(1.0, 0.5), 1.0, -1.0, 10)


@pytest.mark.parametrize(
    "family, kappa, shift, x, expected",
    [
        ("R", 2.0, 0.0, 0.0, -4.0),
        ("S", 1.0, 0.0, math.asinh(1.0), 1.0),
        ("P", 1.0, 0.0, math.pi / 2, 1.0),
        ("N", 0.0, 1.0, 3.0, 0.25),
    ],
)
def test_first_order_closed_forms(family, kappa, shift, x, expected):
    assert v1_closed_forms(family, kappa, shift, x) == pytest.approx(expected)


def test_first_order_closed_form_raises_at_pole():
    with pytest.raises(SingularPoint):
        v1_closed_forms("N", 0.0, 1.0, 1.0)


@pytest.mark.parametrize("family", list(SeedFamily))
def test_first_order_chain_matches_closed_form(family):
    kappa = 0.0 if family is SeedFamily.N else 1.2
    spec = SeedSpec(family, kappa, 0.4)
    x = np.linspace(-6.0, 6.0, 1201)
    for pole in spec.poles(-7.0, 7.0):
        x = x[np.abs(x - pole) > 0.1]
    chain = BacklundChain([spec])
    np.testing.assert_allclose(
        chain.level_potential(1)(x), v1_profile(family, kappa, 0.4, x), rtol=1e-12
    )


def test_census_finds_single_poschl_teller_well(pt_well):
    wells = well_census(eval_grid(pt_well, -10.0, 10.0, 2001))
    assert len(wells) == 1
    assert wells[0].location == pytest.approx(0.0, abs=1e-9)
    assert wells[0].depth == pytest.approx(-1.0, abs=1e-9)


def test_census_finds_two_separated_wells():
    p = TwoWellParams(1.0, 0.5, 5.0, 5.0)
    closed = well_census(sample_v2(p, -15.0, 15.0, 2001))
    chained = well_census(eval_grid(BacklundChain(p.chain_seeds()), -15.0, 15.0, 2001))
    for wells in (closed, chained):
        assert len(wells) == 2
        assert wells[0].location < 0.0 < wells[1].location
        assert wells[0].depth < wells[1].depth < 0.0


def test_census_of_flat_potential_is_empty():
    sample = sample_v2(TwoWellParams(1.0, 1.0), -10.0, 10.0, 501)
    assert well_census(sample) == []


def _synthetic_sample(x: np.ndarray, v: np.ndarray) -> GridSample:
    return GridSample(
        x=x,
        v=v,
        is_singular=~np.isfinite(v),
        pole_kind=np.full(x.shape, "none", dtype=object),
    )


def test_census_keeps_deeper_of_close_minima():
    x = np.linspace(-1.0, 1.0, 201)
    v = -np.exp(-((x + 0.02) ** 2) / 1e-4) - 1.2 * np.exp(-((x - 0.02) ** 2) / 1e-4)
    wells = well_census(_synthetic_sample(x, v))
    assert len(wells) == 1
    assert wells[0].location == pytest.approx(0.02, abs=0.01)
    assert wells[0].depth < -1.1


def test_census_treats_singular_rows_as_barriers():
    x = np.linspace(-4.0, 4.0, 801)
    v = -1.0 / np.cosh(x + 2.0) ** 2 - 0.5 / np.cosh(x - 2.0) ** 2
    v[400] = np.nan
    wells = well_census(_synthetic_sample(x, v))
    assert len(wells) == 2
    assert wells[0].location == pytest.approx(-2.0, abs=0.01)
    assert wells[1].location == pytest.approx(2.0, abs=0.01)
    assert wells[0].depth < wells[1].depth < 0.0
