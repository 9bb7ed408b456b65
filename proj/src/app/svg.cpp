#include "hslab/app/svg.hpp"
#include "hslab/errors.hpp"
#include "hslab/regions.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace hslab::app {

namespace {

// ck k + cs s + c0 >= 0
struct HalfPlane {
    double ck, cs, c0;
    double eval(const KsVertex& p) const { return ck * p.k + cs * p.s + c0; }
};

HalfPlane s_above(double slope, double off) { return {-slope, 1.0, -off}; }  // s >= slope k + off
HalfPlane s_below(double slope, double off) { return {slope, -1.0, off}; }   // s <= slope k + off
HalfPlane k_above(double v) { return {1.0, 0.0, -v}; }

std::vector<KsVertex> clip(const std::vector<KsVertex>& poly, const HalfPlane& h) {
    std::vector<KsVertex> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const KsVertex& p = poly[i];
        const KsVertex& q = poly[(i + 1) % poly.size()];
        const double fp = h.eval(p), fq = h.eval(q);
        if (fp >= 0) out.push_back(p);
        if ((fp >= 0) != (fq >= 0)) {
            const double t = fp / (fp - fq);
            out.push_back({p.k + t * (q.k - p.k), p.s + t * (q.s - p.s)});
        }
    }
    return out;
}

std::vector<KsVertex> rect(const AtlasWindow& w) {
    return {{w.k_min, w.s_min}, {w.k_max, w.s_min}, {w.k_max, w.s_max}, {w.k_min, w.s_max}};
}

void add(std::vector<AtlasPolygon>& out, const std::string& cls, const AtlasWindow& w,
         std::initializer_list<HalfPlane> hs) {
    auto p = rect(w);
    for (const auto& h : hs) {
        p = clip(p, h);
        if (p.size() < 3) return;
    }
    out.push_back({cls, std::move(p)});
}

struct Frame {
    AtlasWindow w;
    double scale, margin = 48.0;
    double px(double k) const { return margin + (k - w.k_min) * scale; }
    double py(double s) const { return margin + (w.s_max - s) * scale; }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

void validate(const AtlasWindow& w) {
    if (!(w.k_max > w.k_min) || !(w.s_max > w.s_min) || w.width < 64)
        throw DomainError("atlas window needs k_min < k_max, s_min < s_max and width >= 64");
}

std::string attr(std::string_view tag, std::string_view name) {
    const std::string key = std::string(name) + "=\"";
    auto p = tag.find(key);
    if (p == std::string_view::npos) return {};
    p += key.size();
    auto e = tag.find('"', p);
    return std::string(tag.substr(p, e - p));
}

} // namespace

std::vector<AtlasPolygon> atlas_polygons(double a, const AtlasWindow& w) {
    if (!region_supported(a)) throw DomainError("atlas needs a outside {0, 1}");
    validate(w);
    std::vector<AtlasPolygon> out;
    add(out, "illposed-c2", w, {});
    if (a < 0.25) {
        // complement of the C2 subcases: s <= k+3 and s >= min(k/2-3/4, k-2, -1).
        // Undecided at a = -1/8.
        const char* rest = a == -0.125 ? "open" : "illposed-c3";
        add(out, rest, w, {s_below(1, 3), s_above(0.5, -0.75)});
        add(out, rest, w, {s_below(1, 3), s_above(1, -2)});
        add(out, rest, w, {s_below(1, 3), s_above(0, -1)});
        add(out, "A", w, {k_above(-0.75), s_above(0, -0.75), s_above(0.5, -0.75), s_above(1, -2), s_below(1, 3)});
        add(out, "A0", w, {k_above(-0.75), s_above(0.5, -0.375), s_above(1, -1.5), s_below(1, 2.5)});
    } else {
        const double k0 = a == 0.25 ? 0.75 : 0.0;
        const double off = a == 0.25 ? 0.375 : 0.0;
        add(out, "A", w, {k_above(k0), s_above(0.5, off), s_above(1, -2), s_below(1, 3)});
        add(out, "A0", w, {k_above(k0), s_above(0.5, off), s_above(1, -1.5), s_below(1, 2.5)});
    }
    return out;
}

std::string render_atlas(double a, const AtlasWindow& w) {
    const auto polys = atlas_polygons(a, w);
    Frame f{w, w.width / (w.k_max - w.k_min)};
    const double W = 2 * f.margin + w.width;
    const double H = 2 * f.margin + (w.s_max - w.s_min) * f.scale;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H)
       << "\" viewBox=\"0 0 " << num(W) << ' ' << num(H) << "\">\n";
    os << "<style>.illposed-c2{fill:#d9534f}.illposed-c3{fill:#f0a040}.open{fill:#f2e14c}"
          ".A{fill:#b3b3b3}.A0{fill:#3d7bd9}.edge{stroke:#111;stroke-width:1.6;fill:none}"
          ".open{stroke-dasharray:5 4}.grid{stroke:#fff;stroke-opacity:0.35;stroke-width:0.6}"
          "text{font-family:sans-serif;font-size:12px}</style>\n";
    os << "<text x=\"" << num(f.margin) << "\" y=\"" << num(f.margin - 16) << "\">a = " << a << "</text>\n";
    os << "<g id=\"plot\" data-kmin=\"" << num(w.k_min) << "\" data-smax=\"" << num(w.s_max) << "\" data-scale=\""
       << num(f.scale) << "\" data-margin=\"" << num(f.margin) << "\">\n";
    for (const auto& p : polys) {
        os << "<polygon class=\"" << p.cls << "\" points=\"";
        for (std::size_t i = 0; i < p.pts.size(); ++i)
            os << (i ? " " : "") << num(f.px(p.pts[i].k)) << ',' << num(f.py(p.pts[i].s));
        os << "\"/>\n";
    }
    for (int k = static_cast<int>(std::ceil(w.k_min)); k <= w.k_max; ++k)
        os << "<line class=\"grid\" x1=\"" << num(f.px(k)) << "\" y1=\"" << num(f.py(w.s_min)) << "\" x2=\""
           << num(f.px(k)) << "\" y2=\"" << num(f.py(w.s_max)) << "\"/>\n";
    for (int s = static_cast<int>(std::ceil(w.s_min)); s <= w.s_max; ++s)
        os << "<line class=\"grid\" x1=\"" << num(f.px(w.k_min)) << "\" y1=\"" << num(f.py(s)) << "\" x2=\""
           << num(f.px(w.k_max)) << "\" y2=\"" << num(f.py(s)) << "\"/>\n";

    // boundary of A; dashed where the edge itself is excluded, open circles at excluded endpoints
    std::set<std::pair<double, double>> marked;  // shared vertices get one marker
    for (const auto& seg : boundary_segments(a, w.k_max)) {
        const KsVertex p{seg.start.kd(), seg.start.sd()}, q{seg.end.kd(), seg.end.sd()};
        os << "<line class=\"edge" << (seg.interior_included ? "" : " open") << "\" data-label=\"" << seg.line_label
           << "\" x1=\"" << num(f.px(p.k)) << "\" y1=\"" << num(f.py(p.s)) << "\" x2=\"" << num(f.px(q.k))
           << "\" y2=\"" << num(f.py(q.s)) << "\"/>\n";
        auto marker = [&](const KsVertex& v, bool included) {
            if (!marked.insert({v.k, v.s}).second) return;
            os << "<circle class=\"marker " << (included ? "closed" : "open") << "\" data-k=\"" << num(v.k)
               << "\" data-s=\"" << num(v.s) << "\" cx=\"" << num(f.px(v.k)) << "\" cy=\"" << num(f.py(v.s))
               << "\" r=\"4\" fill=\"" << (included ? "#111" : "#fff") << "\" stroke=\"#111\"/>\n";
        };
        marker(p, seg.start_included);
        if (!seg.ray) marker(q, seg.end_included);
    }
    os << "</g>\n";

    for (int k = static_cast<int>(std::ceil(w.k_min)); k <= w.k_max; ++k)
        os << "<text x=\"" << num(f.px(k) - 4) << "\" y=\"" << num(f.py(w.s_min) + 16) << "\">" << k << "</text>\n";
    for (int s = static_cast<int>(std::ceil(w.s_min)); s <= w.s_max; ++s)
        os << "<text x=\"" << num(f.margin - 24) << "\" y=\"" << num(f.py(s) + 4) << "\">" << s << "</text>\n";
    os << "<text x=\"" << num(f.margin + w.width / 2.0) << "\" y=\"" << num(H - 8) << "\">k</text>\n";
    os << "<text x=\"8\" y=\"" << num(f.margin + (w.s_max - w.s_min) * f.scale / 2) << "\">s</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::vector<AtlasPolygon> read_atlas_polygons(std::string_view svg) {
    const auto g = svg.find("<g id=\"plot\"");
    if (g == std::string_view::npos) throw Error("atlas SVG has no plot group");
    const auto gtag = svg.substr(g, svg.find('>', g) - g);
    const double kmin = std::atof(attr(gtag, "data-kmin").c_str());
    const double smax = std::atof(attr(gtag, "data-smax").c_str());
    const double scale = std::atof(attr(gtag, "data-scale").c_str());
    const double margin = std::atof(attr(gtag, "data-margin").c_str());
    if (!(scale > 0)) throw Error("atlas SVG has a bad scale");

    std::vector<AtlasPolygon> out;
    std::size_t pos = 0;
    while ((pos = svg.find("<polygon", pos)) != std::string_view::npos) {
        const auto end = svg.find("/>", pos);
        const auto tag = svg.substr(pos, end - pos);
        AtlasPolygon p;
        p.cls = attr(tag, "class");
        std::istringstream pts(attr(tag, "points"));
        double x, y;
        char comma;
        while (pts >> x >> comma >> y) p.pts.push_back({kmin + (x - margin) / scale, smax - (y - margin) / scale});
        out.push_back(std::move(p));
        pos = end;
    }
    return out;
}

bool point_in_polygon(const std::vector<KsVertex>& poly, double k, double s) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const auto& a = poly[i];
        const auto& b = poly[j];
        if ((a.s > s) != (b.s > s) && k < (b.k - a.k) * (s - a.s) / (b.s - a.s) + a.k) inside = !inside;
    }
    return inside;
}

} // namespace hslab::app
