import numpy as np
import pytest

from nodulekit import (
    AnnotationRecord,
    BinaryMask,
    DegeneratePolygon,
    MalformedPointList,
    MalformedXML,
    PlanarPoint,
    Polygon,
    UnknownLabelWarning,
    parse_annotation_xml,
    rasterize_polygon,
    resize_to_canonical,
    scaled_extent,
    serialize_annotation_xml,
)
from oracles import rasterize_reference
from shapegen import disk_mask

SIMPLE_DOC = """
<annotations>
  <case>
    <id>case001</id>
    <diagnosis>Malignant</diagnosis>
    <roi>10,10; 30,10; 30,30; 10,30</roi>
  </case>
</annotations>
"""


def polygon(pairs):
    return Polygon([PlanarPoint(float(x), float(y)) for x, y in pairs])


class TestParseAnnotationXml:
    def test_single_case(self):
        records = parse_annotation_xml(SIMPLE_DOC)
        assert len(records) == 1
        record = records[0]
        assert record.image_id == "case001"
        assert record.label == 1
        assert len(record.rois) == 1
        assert len(record.rois[0]) == 4

    def test_two_rois_one_record(self):
        doc = """<annotations><case><id>a</id>
          <roi>0,0;4,0;4,4</roi>
          <roi> 1,1 ; 2,1 ; 2,2 ; 1,2 </roi>
        </case></annotations>"""
        records = parse_annotation_xml(doc)
        assert len(records) == 1
        assert len(records[0].rois) == 2
        assert records[0].label is None

    def test_benign_case_insensitive(self):
        doc = "<case><id>b</id><diagnosis>BENIGN</diagnosis><roi>0,0;1,0;1,1</roi></case>"
        assert parse_annotation_xml(doc)[0].label == 0

    def test_two_point_roi_rejected(self):
        doc = "<case><id>c</id><roi>0,0;1,1</roi></case>"
        with pytest.raises(MalformedPointList):
            parse_annotation_xml(doc)

    def test_non_numeric_point_rejected(self):
        doc = "<case><id>c</id><roi>0,0;1,x;2,2</roi></case>"
        with pytest.raises(MalformedPointList):
            parse_annotation_xml(doc)

    @pytest.mark.parametrize(
        "doc",
        [
            "<annotations><case><id>a</id></case>",       # not well-formed
            "<annotations></annotations>",                  # no case
            "<annotations><case><roi>0,0;1,0;1,1</roi></case></annotations>",  # missing id
        ],
    )
    def test_malformed_documents(self, doc):
        with pytest.raises(MalformedXML):
            parse_annotation_xml(doc)

    def test_unknown_diagnosis_warns_and_leaves_label_absent(self):
        doc = "<case><id>d</id><diagnosis>suspicious</diagnosis><roi>0,0;1,0;1,1</roi></case>"
        with pytest.warns(UnknownLabelWarning):
            records = parse_annotation_xml(doc)
        assert records[0].label is None

    def test_parse_serialize_parse_fixed_point(self):
        records = parse_annotation_xml(SIMPLE_DOC)
        again = parse_annotation_xml(serialize_annotation_xml(records))
        assert again == records
        third = parse_annotation_xml(serialize_annotation_xml(again))
        assert third == again

    def test_record_requires_three_vertices(self):
        with pytest.raises(MalformedPointList):
            AnnotationRecord(image_id="x", rois=(Polygon([PlanarPoint(0, 0), PlanarPoint(1, 1)]),))


class TestRasterizePolygon:
    def test_axis_aligned_square_boundary_inclusive(self):
        mask = rasterize_polygon(polygon([(10, 10), (30, 10), (30, 30), (10, 30)]), 64, 64)
        assert mask.foreground_count() == 21 * 21

    def test_triangle_matches_reference(self):
        poly = polygon([(0, 0), (4, 0), (0, 4)])
        mask = rasterize_polygon(poly, 8, 8)
        want = rasterize_reference([(0, 0), (4, 0), (0, 4)], 8, 8)
        assert np.array_equal(mask.grid, want)

    def test_polygon_outside_canvas(self):
        mask = rasterize_polygon(polygon([(100, 100), (120, 100), (110, 120)]), 32, 32)
        assert mask.foreground_count() == 0

    def test_degenerate_polygon(self):
        with pytest.raises(DegeneratePolygon):
            rasterize_polygon(Polygon([PlanarPoint(0, 0), PlanarPoint(1, 1)]), 8, 8)

    def test_reversed_vertex_order_identical(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            pts = [(float(x), float(y)) for x, y in rng.integers(0, 24, size=(5, 2))]
            try:
                forward = rasterize_polygon(polygon(pts), 24, 24)
                backward = rasterize_polygon(polygon(pts[::-1]), 24, 24)
            except DegeneratePolygon:
                continue
            assert np.array_equal(forward.grid, backward.grid)

    def test_matches_reference_on_random_integer_polygons(self):
        rng = np.random.default_rng(20)
        for _ in range(8):
            pts = [(float(x), float(y)) for x, y in rng.integers(0, 20, size=(6, 2))]
            mask = rasterize_polygon(polygon(pts), 20, 20)
            assert np.array_equal(mask.grid, rasterize_reference(pts, 20, 20))

    def test_area_converges_with_resolution(self):
        base = [(1.3, 1.1), (11.7, 2.4), (9.2, 12.6), (2.8, 9.9)]
        target = abs(polygon(base).signed_area())
        errors = []
        for scale in (4.0, 16.0):
            scaled = [(x * scale, y * scale) for x, y in base]
            count = rasterize_polygon(polygon(scaled), int(16 * scale), int(16 * scale)).foreground_count()
            errors.append(abs(count / scale**2 - target))
        assert errors[1] <= errors[0] / 2.0


class TestResizeToCanonical:
    def test_same_size_identity(self):
        mask = disk_mask(512, 256, 256, 100)
        out = resize_to_canonical(mask, 512)
        assert np.array_equal(out.grid, mask.grid)
        assert (out.scale_x, out.scale_y) == (1.0, 1.0)

    def test_scale_bookkeeping(self):
        grid = np.zeros((512, 1024), dtype=bool)
        grid[200:300, :] = True  # full-width bar
        out = resize_to_canonical(BinaryMask(grid), 512)
        assert (out.scale_x, out.scale_y) == (2.0, 1.0)
        assert out.grid[250, 0] and out.grid[250, 511]

    def test_disk_roundtrip_to_original_units(self):
        mask = disk_mask(256, 128, 128, 64)
        out = resize_to_canonical(mask, 512)
        rows = np.nonzero(out.grid)[0]
        resized_extent = rows.max() - rows.min() + 1
        assert abs(resized_extent / 2.0 - 128.0) <= 1.5
        h, w = scaled_extent(out)
        href, wref = scaled_extent(mask)
        assert abs(h - href) <= 1.0 and abs(w - wref) <= 1.0

    def test_extent_preserved_within_one_source_pixel(self):
        rng = np.random.default_rng(23)
        for _ in range(10):
            h, w = int(rng.integers(40, 300)), int(rng.integers(40, 300))
            grid = np.zeros((h, w), dtype=bool)
            r0, c0 = int(rng.integers(0, h - 20)), int(rng.integers(0, w - 20))
            grid[r0:r0 + int(rng.integers(10, 20)), c0:c0 + int(rng.integers(10, 20))] = True
            mask = BinaryMask(grid)
            out = resize_to_canonical(mask, 512)
            before = scaled_extent(mask)
            after = scaled_extent(out)
            assert abs(before[0] - after[0]) <= 1.0
            assert abs(before[1] - after[1]) <= 1.0
