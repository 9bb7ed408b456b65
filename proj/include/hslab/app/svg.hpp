#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hslab::app {

struct AtlasWindow {
    double k_min = -2.0, k_max = 7.0;
    double s_min = -3.0, s_max = 9.0;
    int width = 640;  // plot area in pixels; height follows the aspect ratio
};

struct KsVertex {
    double k, s;
};

// One filled layer of the atlas in (k, s) coordinates.
struct AtlasPolygon {
    std::string cls;  // "illposed-c2", "illposed-c3", "open" (a = -1/8), "A", "A0"
    std::vector<KsVertex> pts;
};

// Layers in paint order; later layers cover earlier ones.
std::vector<AtlasPolygon> atlas_polygons(double a, const AtlasWindow& w);

std::string render_atlas(double a, const AtlasWindow& w);

// Reads back the polygons of an atlas SVG produced by render_atlas, mapped to
// (k, s) through the data-* attributes on the plot group.
std::vector<AtlasPolygon> read_atlas_polygons(std::string_view svg);

bool point_in_polygon(const std::vector<KsVertex>& poly, double k, double s);

} // namespace hslab::app
