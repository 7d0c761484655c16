import io
import math

import numpy as np
import pytest

from verdoorn.errors import DomainError, IntegrityError, SchemaError
from verdoorn.ingest import avg_growth, build_growth_vectors, canonical_sector, load_coords, load_panel, read_inputs

HEADER = "region,sector,year,output,employment\n"


def panel_text(rows, header=HEADER):
    return header + "".join(",".join(map(str, r)) + "\n" for r in rows)


def two_region_rows(scale_y=1.0, scale_l=1.0):
    rows = []
    for region, y0, l0, gy, gl in (("A", 100.0, 10.0, 0.05, 0.01), ("B", 200.0, 40.0, 0.02, 0.03)):
        for k, year in enumerate(range(2000, 2004)):
            rows.append((region, "Industry", year, repr(scale_y * y0 * math.exp(gy * k)),
                         repr(scale_l * l0 * math.exp(gl * k))))
    return rows


def test_growth_of_geometric_series():
    assert avg_growth([100, 110, 121]) == pytest.approx(math.log(1.1))


def test_growth_uses_endpoints_inclusive():
    # 1995..1999 has four annual steps
    assert avg_growth([1.0, 9.0, 0.1, 5.0, math.e ** 4], years=[1995, 1996, 1997, 1998, 1999]) == pytest.approx(1.0)


@pytest.mark.parametrize("series", [[1.0], [1.0, 0.0], [-1.0, 2.0]])
def test_growth_rejects_bad_series(series):
    with pytest.raises(DomainError):
        avg_growth(series)


def test_load_and_growth_vectors():
    panel = load_panel(panel_text(two_region_rows()))
    assert panel.regions == ("A", "B")
    assert panel.sectors == ("Industry",) and not panel.total_derived
    gv = build_growth_vectors(panel, "industry", (2000, 2003))
    np.testing.assert_allclose(gv.q, [0.05, 0.02], atol=1e-12)
    np.testing.assert_allclose(gv.p, [0.04, -0.01], atol=1e-12)


def test_total_derived_as_sector_sum():
    rows = [(r, s, y, 10.0 * (k + 1) + y - 2000, 2.0 + k) for r in "AB"
            for k, s in enumerate(("Agriculture", "Industry", "Services")) for y in (2000, 2001)]
    panel = load_panel(panel_text(rows))
    assert panel.total_derived and panel.sectors[-1] == "Total"
    tot = panel.observations[("A", "Total", 2001)]
    assert tot.output == pytest.approx(11 + 21 + 31) and tot.employment == pytest.approx(9.0)


def test_tab_delimited_input():
    text = panel_text(two_region_rows()).replace(",", "\t")
    assert load_panel(text).regions == ("A", "B")


@pytest.mark.parametrize("sy,sl", [(1000.0, 1.0), (1.0, 0.001), (7.5, 3.25)])
def test_growth_invariant_to_unit_scaling(sy, sl):
    base = build_growth_vectors(load_panel(panel_text(two_region_rows())), "Industry", (2000, 2003))
    scaled = build_growth_vectors(load_panel(panel_text(two_region_rows(sy, sl))), "Industry", (2000, 2003))
    np.testing.assert_allclose(scaled.p, base.p, atol=1e-12)
    np.testing.assert_allclose(scaled.q, base.q, atol=1e-12)


def test_constant_employment_gives_p_equal_q():
    rows = [(r, "Services", y, 100.0 * (1 + 0.1 * i) ** (y - 2000), 50.0)
            for i, r in enumerate("ABC") for y in range(2000, 2005)]
    gv = build_growth_vectors(load_panel(panel_text(rows)), "Services", (2000, 2004))
    np.testing.assert_allclose(gv.p, gv.q, atol=1e-14)


def test_row_order_does_not_change_growth():
    rows = two_region_rows()
    rev = load_panel(panel_text(rows[::-1]))
    fwd = load_panel(panel_text(rows))
    a = build_growth_vectors(fwd, "Industry", (2000, 2003))
    b = build_growth_vectors(rev, "Industry", (2000, 2003))
    for region in fwd.regions:
        i, j = fwd.regions.index(region), rev.regions.index(region)
        assert a.p[i] == pytest.approx(b.p[j], abs=1e-15)


def test_empty_stream():
    with pytest.raises(SchemaError):
        load_panel("")
    with pytest.raises(SchemaError):
        load_panel(HEADER)


def test_missing_column():
    with pytest.raises(SchemaError, match="employment"):
        load_panel("region,sector,year,output\nA,Industry,2000,1\n")


def test_schema_mapping():
    text = panel_text(two_region_rows(), header="nuts,branch,t,gva,jobs\n")
    panel = load_panel(text, schema={"region": "nuts", "sector": "branch", "year": "t", "output": "gva",
                                     "employment": "jobs"})
    assert panel.n == 2


def test_duplicate_reports_line():
    rows = two_region_rows()
    with pytest.raises(IntegrityError, match="line 10"):
        load_panel(panel_text(rows + [rows[0]]))


def test_non_positive_employment_reports_line():
    rows = two_region_rows()
    rows[2] = rows[2][:4] + (0.0,)
    with pytest.raises(DomainError, match="line 4"):
        load_panel(panel_text(rows))


def test_gap_is_integrity_error():
    rows = two_region_rows()
    del rows[5]
    with pytest.raises(IntegrityError):
        load_panel(panel_text(rows))


def test_unknown_sector():
    with pytest.raises(DomainError):
        canonical_sector("Fishing")


def test_coords_and_mixed_metrics():
    coords, metric = load_coords(io.StringIO("region,x,y,metric\nA,0,0,planar_km\nB,3,4,planar_km\n"))
    assert metric == "planar_km" and coords["B"] == (3.0, 4.0)
    with pytest.raises(DomainError):
        load_coords("region,x,y,metric\nA,0,0,planar_km\nB,38.7,-9.1,latlon_deg\n")


def test_fixture_round_trip(fixture_dir):
    panel = read_inputs(fixture_dir / "panel.csv", fixture_dir / "coords.csv")
    assert panel.n == 28 and panel.metric == "planar_km"
    assert panel.years[0] == 1995 and panel.years[-1] == 2005
    assert not panel.total_derived
