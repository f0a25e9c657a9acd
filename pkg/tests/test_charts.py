import math
import re
import xml.etree.ElementTree as ET

import pytest

import charts
from scenario import BUNDLED_SCENARIO, parse_scenario, parse_scenario_text

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def table3():
    return parse_scenario(BUNDLED_SCENARIO)


def polylines(svg):
    root = ET.fromstring(svg.encode("utf-8"))
    return root.findall(f"{SVG_NS}polyline")


def test_cost_curves_have_one_polyline_per_ncf(table3):
    svg = charts.emit_curves(table3, "CostVsDistance")
    root = ET.fromstring(svg.encode("utf-8"))
    assert root.get("width") == "800" and root.get("height") == "600"
    assert len(polylines(svg)) == 7
    legend = [t.text for t in root.findall(f"{SVG_NS}text") if t.text and t.text.startswith("NCF=")]
    assert legend == ["NCF=0", "NCF=0.2", "NCF=0.4", "NCF=0.6", "NCF=0.8", "NCF=0.9", "NCF=0.95"]


def test_cost_minimum_moves_outward_with_ncf(table3):
    series = charts.curve_series(table3, charts.CurveKind.COST_VS_DISTANCE)
    argmins = [min(points, key=lambda p: p[1])[0] for _, points in sorted(series.items())]
    assert argmins == sorted(argmins)
    assert argmins[0] == 25 and argmins[-1] == 1000


def test_gain_curves_are_nonnegative_and_ordered(table3):
    series = charts.curve_series(table3, charts.CurveKind.GAIN_VS_DISTANCE)
    for points in series.values():
        assert all(value >= 0 for _, value in points)
    # at each shared distance, more telecommuting never gains less
    ncfs = sorted(series)
    for low, high in zip(ncfs, ncfs[1:]):
        high_by_distance = dict(series[high])
        for distance, value in series[low]:
            if distance in high_by_distance:
                assert high_by_distance[distance] >= value


def test_output_is_byte_identical(table3):
    first = charts.emit_curves(table3, charts.CurveKind.GAIN_VS_DISTANCE)
    second = charts.emit_curves(parse_scenario(BUNDLED_SCENARIO), "GainVsDistance")
    assert first == second


def test_distance_axis_is_log_scaled(table3):
    svg = charts.emit_curves(table3, "CostVsDistance")
    first = polylines(svg)[0].get("points").split()
    xs = [float(p.split(",")[0]) for p in first]
    # the 0-mile row sits on the y axis
    assert xs == sorted(xs)
    assert xs[0] == pytest.approx(charts.LEFT)
    # 10 and 100 miles
    ratio = (xs[5] - charts.LEFT) / (xs[2] - charts.LEFT)
    assert ratio == pytest.approx(math.log10(101) / math.log10(11), rel=1e-3)


def test_coordinates_use_fixed_precision(table3):
    svg = charts.emit_curves(table3, "CostVsDistance")
    for line in polylines(svg):
        assert all(re.fullmatch(r"-?\d+\.\d{2},-?\d+\.\d{2}", p) for p in line.get("points").split())


def test_single_residence_is_rejected():
    text = "[grid]\nncf = 0, 0.5\n[residence]\nlabel = a\ndistance = 1\ntime = 5\nhousing = 100\nmode = Car\n"
    with pytest.raises(ValueError, match="at least 2 residences"):
        charts.emit_curves(parse_scenario_text(text), "CostVsDistance")


def test_series_with_one_point_is_rejected(table3):
    scenario = table3.model_copy(update={"residences": table3.residences[5:]})
    # at NCF 0 only the 100mi row is feasible
    with pytest.raises(ValueError, match="NCF=0"):
        charts.emit_curves(scenario, "CostVsDistance")


def test_unknown_kind_is_rejected(table3):
    with pytest.raises(ValueError):
        charts.emit_curves(table3, "Pie")
