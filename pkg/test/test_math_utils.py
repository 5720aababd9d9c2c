import numpy as np
import pytest

from ltgcd.math_utils import check_simplex, entropy, interleave, \
    learning_rate, normalize_rows, on_simplex, round_half_up, row_norms


def test_row_norms():
    arr = np.arange(10).reshape(2, -1)
    ans = [30.0 ** .5, 255.0 ** .5]

    assert np.allclose(ans, row_norms(arr))


def test_normalize_rows():
    arr = np.array([[3.0, 4.0], [0.0, -2.0]])
    ans = [[0.6, 0.8], [0.0, -1.0]]

    assert np.allclose(ans, normalize_rows(arr))


def test_normalize_degenerate_row():
    with pytest.raises(ValueError):
        normalize_rows(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_round_half_up():
    assert round_half_up(2.5) == 3
    assert round_half_up(2.4999) == 2
    assert round_half_up(0.5) == 1
    assert round_half_up(40.0) == 40


def test_on_simplex():
    assert on_simplex([0.25, 0.75])
    assert on_simplex([1.0, 0.0, 1e-7])
    assert not on_simplex([0.5, 0.6])
    assert not on_simplex([1.5, -0.5])
    assert not on_simplex([np.nan, 1.0])
    assert not on_simplex([[0.5, 0.5]])


def test_check_simplex_names_the_input():
    with pytest.raises(ValueError, match='prior'):
        check_simplex([0.2, 0.2], 'prior')


def test_entropy():
    assert entropy([0.5, 0.5]) == pytest.approx(np.log(2))
    assert entropy([1.0, 0.0, 0.0]) == 0
    assert entropy(np.full(4, 0.25)) == pytest.approx(np.log(4))


def test_learning_rate():
    assert learning_rate(0.02, 0, 200) == 0.02
    assert learning_rate(0.02, 99, 200) == 0.02
    assert learning_rate(0.02, 100, 200) == pytest.approx(0.002)
    assert learning_rate(0.02, 160, 200) == pytest.approx(0.0002)
    assert learning_rate(0.1, 3, 4, milestones=[0.5]) == pytest.approx(0.01)


def test_interleave():
    a = np.array([[1.0], [2.0]])
    b = np.array([[10.0], [20.0]])

    assert np.array_equal(interleave(a, b), [[1.0], [10.0], [2.0], [20.0]])
