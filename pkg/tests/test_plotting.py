from pathlib import Path

import numpy as np
import pytest

from skewbench.core import Dataset, SkewbenchError
from skewbench.plotting import scatter_svg

GOLDEN = Path(__file__).parent / "data" / "golden_scatter.svg"


def fixture_dataset() -> Dataset:
    pts = np.array([[0.0, 0.0], [1.0, 0.5], [2.0, 1.0], [0.5, 2.0],
                    [4.0, 4.0], [4.2, 3.8]])
    labels = np.array([0, 0, 0, 0, 1, 1])
    kinds = np.array([3, 3, 3, 3, 1, 2], dtype=np.uint8)
    return Dataset(pts, labels, kinds)


def test_matches_golden_file():
    svg = scatter_svg(fixture_dataset(), show_kinds=True)
    assert svg == GOLDEN.read_text()


def test_majority_drawn_before_minority():
    svg = scatter_svg(fixture_dataset())
    last_circle = svg.rfind('<circle cx')
    first_triangle = svg.find("<path d=")
    assert 0 < last_circle < first_triangle


def test_marker_counts_and_colors():
    svg = scatter_svg(fixture_dataset(), show_kinds=True)
    assert svg.count('fill="#4477AA"') == 4
    assert svg.count('fill="#EE6677"') == 2
    assert svg.count("stroke-dasharray") == 1  # one borderline ring
    # The rare point draws a double ring: two extra stroked circles.
    assert svg.count('fill="none" stroke="#EE6677"') == 3


def test_rejects_higher_dimensions():
    ds = Dataset(np.zeros((3, 4)), np.array([0, 0, 1]))
    with pytest.raises(SkewbenchError, match="requires 2-D"):
        scatter_svg(ds)


def test_rejects_empty():
    ds = Dataset(np.empty((0, 2)), np.empty(0, dtype=int))
    with pytest.raises(SkewbenchError, match="empty"):
        scatter_svg(ds)
