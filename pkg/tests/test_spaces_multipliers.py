import numpy as np
import pytest

from multreg import (EigenvaluesNotDivergent, ExponentialSequence,
                     GaussianFrequency, MeasureSpace, PlateauCounterexample,
                     PowerDecay, PurePower, Tabulated)
from multreg.multipliers import validate_positive


def test_interval_weights_sum_to_length():
    space = MeasureSpace.interval(0.0, 2.5, 1000)
    assert space.total_measure == pytest.approx(2.5)
    assert np.all(np.diff(space.nodes) > 0)


def test_graded_interval_covers_and_refines():
    space = MeasureSpace.interval_graded(1.0, 4096, s_min=1e-9)
    assert space.total_measure == pytest.approx(1.0)
    assert space.nodes[0] < 1e-9
    assert space.weights[0] < space.weights[-1]


def test_counting_space_unit_weights():
    space = MeasureSpace.counting(10)
    assert np.all(space.weights == 1.0)
    with pytest.raises(ValueError):
        MeasureSpace("counting", np.arange(1.0, 4.0), np.full(3, 2.0),
                     truncation_radius=3.0)


def test_space_rejects_bad_nodes():
    with pytest.raises(ValueError):
        MeasureSpace("lebesgue_interval", np.array([0.1, 0.1]), np.ones(2))
    with pytest.raises(ValueError):
        MeasureSpace("lebesgue_interval", np.array([0.1, 0.2]),
                     np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        MeasureSpace.halfline(0.0, 16)


def test_weighted_norm_and_inner():
    space = MeasureSpace.from_arrays("lebesgue_interval", [0.0, 1.0],
                                     [0.25, 0.25])
    assert space.norm([2.0, 0.0]) == 1.0
    assert space.inner([1.0, 1.0], [1.0, -1.0]) == 0.0


def test_extended_keeps_density():
    space = MeasureSpace.halfline(10.0, 1000)
    wide = space.extended(2.0)
    assert wide.truncation_radius == 20.0
    assert wide.max_weight == pytest.approx(space.max_weight)
    with pytest.raises(ValueError):
        MeasureSpace.counting(5).extended(2.0)


def test_multiplier_positivity_validation():
    space = MeasureSpace.halfline(10.0, 256)
    validate_positive(PowerDecay(1.0), space)
    line = MeasureSpace.line(10.0, 256)
    validate_positive(PlateauCounterexample(), line)  # zeros allowed on s < 0
    with pytest.raises(ValueError):
        validate_positive(Tabulated(np.zeros(256)), space)


def test_sup_bound_respected():
    space = MeasureSpace.interval(0.0, 1.0, 64)
    with pytest.raises(ValueError):
        Tabulated(np.full(64, 2.0), sup_bound=1.0)
    b = PurePower(2.0, hi=3.0)
    assert b.sup_bound == pytest.approx(9.0)


def test_exponential_sequence_guards():
    with pytest.raises(EigenvaluesNotDivergent):
        ExponentialSequence(1.0, 1.0, (3.0, 2.0, 1.0))
    b = ExponentialSequence(1.0, 1.0, tuple(range(1, 9)))
    space = MeasureSpace.counting(8)
    assert b.values_on(space)[0] == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        b.values_on(MeasureSpace.counting(9))


def test_gaussian_dimension_is_metadata():
    b = GaussianFrequency(1.0, 1.0, dimension=3)
    assert b(1.0) == pytest.approx(np.exp(-1.0))


def test_tabulated_from_text(tmp_path):
    space = MeasureSpace.counting(4)
    path = tmp_path / "b.txt"
    path.write_text("# node value\n1 1.0\n2 0.5\n3 0.25\n4 0.125\n")
    b = Tabulated.from_text(path, space)
    assert np.array_equal(b.values_on(space), [1.0, 0.5, 0.25, 0.125])
    bad = tmp_path / "bad.txt"
    bad.write_text("1 1.0\n2 0.5\n")
    with pytest.raises(ValueError):
        Tabulated.from_text(bad, space)
