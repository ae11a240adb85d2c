import xml.etree.ElementTree as ET

import numpy as np

from fishersep.models import PreprocessedCloud
from fishersep.plots import HISTOGRAM_BINS, THEORY_DIMENSIONS, dimension_profile_svg, histogram_svg, separability_curves_svg
from fishersep.separability import alpha_sweep, select_estimate

SVG = "{http://www.w3.org/2000/svg}"


def parse(svg):
    return ET.fromstring(svg.encode("utf-8"))


def sweep(points):
    return alpha_sweep(PreprocessedCloud.on_unit_sphere(points))


def test_histogram(sphere_points, tmp_path):
    profile = sweep(sphere_points)[5]
    path = tmp_path / "hist.svg"
    svg = histogram_svg(profile, path)
    root = parse(svg)
    # background plus one bar per bin
    assert len(root.findall(f"{SVG}rect")) == HISTOGRAM_BINS + 1
    assert path.read_text() == svg


def test_separability_curves(sphere_points):
    root = parse(separability_curves_svg(sweep(sphere_points)))
    assert len(root.findall(f"{SVG}polyline")) == len(THEORY_DIMENSIONS) + 1
    assert root.find(f"{SVG}title").text == "mean unseparability probability"


def test_curves_without_measurable_alpha():
    profiles = sweep(np.vstack([np.eye(4), -np.eye(4)]))
    assert all(p.mean_prob == 0 for p in profiles)
    root = parse(separability_curves_svg(profiles))
    assert len(root.findall(f"{SVG}polyline")) == len(THEORY_DIMENSIONS)


def test_dimension_profile_marks_estimate(sphere_points):
    estimate = select_estimate(sweep(sphere_points))
    svg = dimension_profile_svg(estimate)
    assert f"{estimate.n_hat:.2f}" in svg
    assert parse(svg).findall(f"{SVG}circle")
