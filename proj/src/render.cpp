#include "groupform/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace groupform {

namespace {

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
constexpr std::size_t kPaletteSize = std::size(kPalette);
constexpr const char* kSingletonFill = "#7f7f7f";
constexpr const char* kShapeNames[] = {"square", "circle", "triangle", "pentagon",
                                       "hexagon", "heptagon", "octagon"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Triangle for the third category, then pentagon through octagon, cycling.
std::size_t polygon_sides(std::size_t category) {
    return category == 2 ? 3 : 5 + (category - 3) % 4;
}

std::string regular_polygon(double cx, double cy, double area, std::size_t sides,
                            const std::string& style) {
    const double n = static_cast<double>(sides);
    const double radius = std::sqrt(2.0 * area / (n * std::sin(2.0 * std::numbers::pi / n)));
    std::string pts;
    for (std::size_t i = 0; i < sides; ++i) {
        // First vertex straight up.
        const double a = -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(i) / n;
        if (i) pts += ' ';
        pts += fmt(cx + radius * std::cos(a)) + "," + fmt(cy + radius * std::sin(a));
    }
    return "<polygon points=\"" + pts + "\" " + style + "/>";
}

/// Marker of the given area centred on (cx, cy).
std::string marker(std::size_t category, double cx, double cy, double area,
                   const std::string& style) {
    switch (category) {
        case 0: {
            const double side = std::sqrt(area);
            return "<rect x=\"" + fmt(cx - side / 2) + "\" y=\"" + fmt(cy - side / 2) +
                   "\" width=\"" + fmt(side) + "\" height=\"" + fmt(side) + "\" " + style + "/>";
        }
        case 1:
            return "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" +
                   fmt(std::sqrt(area / std::numbers::pi)) + "\" " + style + "/>";
        default:
            return regular_polygon(cx, cy, area, polygon_sides(category), style);
    }
}

std::string shape_name(std::size_t category) {
    if (category < 3) return kShapeNames[category];
    return kShapeNames[polygon_sides(category) - 2];
}

}  // namespace

std::vector<Point> convex_hull(std::vector<Point> points) {
    std::sort(points.begin(), points.end(), [](const Point& l, const Point& r) {
        return l.x < r.x || (l.x == r.x && l.y < r.y);
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() < 3) return points;

    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point> hull(2 * points.size());
    std::size_t k = 0;
    for (const Point& p : points) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = points.size() - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], points[i]) <= 0) --k;
        hull[k++] = points[i];
    }
    hull.resize(k - 1);
    return hull;
}

std::vector<std::uint64_t> keyframe_iterations(const SimTrace& trace) {
    std::vector<std::uint64_t> out{0};
    for (const auto& e : trace.events) {
        if (e.accepted_move) out.push_back(e.iteration);
    }
    if (out.back() != trace.total_iterations) out.push_back(trace.total_iterations);
    return out;
}

std::string render_frame_svg(const Scenario& scenario, const Partition& partition,
                             const std::string& title, const RenderSpec& spec) {
    if (spec.canvas < 100) throw ArgumentError("canvas must be at least 100 pixels");
    const double size = spec.canvas;
    const double margin = 0.08 * size;
    const double title_h = 28.0;
    const double legend_h = spec.legend ? 24.0 : 0.0;
    const double height = size + title_h + legend_h;

    double min_x = 0, max_x = 1, min_y = 0, max_y = 1, max_r = 1;
    if (scenario.size() > 0) {
        const auto agents = scenario.agents();
        min_x = max_x = agents[0].position.x;
        min_y = max_y = agents[0].position.y;
        max_r = agents[0].resource;
        for (const Agent& a : agents) {
            min_x = std::min(min_x, a.position.x);
            max_x = std::max(max_x, a.position.x);
            min_y = std::min(min_y, a.position.y);
            max_y = std::max(max_y, a.position.y);
            max_r = std::max(max_r, a.resource);
        }
    }
    const double span = std::max({max_x - min_x, max_y - min_y, 1e-9});
    const double scale = (size - 2 * margin) / span;
    const double off_x = margin + ((size - 2 * margin) - (max_x - min_x) * scale) / 2;
    const double off_y = margin + ((size - 2 * margin) - (max_y - min_y) * scale) / 2;
    // World y grows upwards; SVG y grows downwards.
    auto px = [&](const Point& p) { return off_x + (p.x - min_x) * scale; };
    auto py = [&](const Point& p) { return title_h + size - off_y - (p.y - min_y) * scale; };
    const double max_area = std::pow(0.06 * size, 2);

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(size) + "\" height=\"" +
           fmt(height) + "\" viewBox=\"0 0 " + fmt(size) + " " + fmt(height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(size) + "\" height=\"" + fmt(height) +
           "\" fill=\"#ffffff\"/>\n";
    svg += "<text x=\"" + fmt(size / 2) +
           "\" y=\"20\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
           xml_escape(title) + "</text>\n";

    svg += "<g id=\"groups\">\n";
    for (GroupIndex g = 0; g < partition.slot_count(); ++g) {
        const auto& members = partition.members(g);
        if (members.size() < 2) continue;
        std::vector<Point> pts;
        for (AgentId a : members) {
            const Point& p = scenario.at(a).position;
            pts.push_back({px(p), py(p)});
        }
        const auto hull = convex_hull(pts);
        const std::string color = kPalette[g % kPaletteSize];
        if (hull.size() == 1) {
            svg += "<circle cx=\"" + fmt(hull[0].x) + "\" cy=\"" + fmt(hull[0].y) + "\" r=\"" +
                   fmt(std::sqrt(max_area)) + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"2\" data-group=\"" + std::to_string(g) + "\"/>\n";
        } else if (hull.size() == 2) {
            svg += "<line x1=\"" + fmt(hull[0].x) + "\" y1=\"" + fmt(hull[0].y) + "\" x2=\"" +
                   fmt(hull[1].x) + "\" y2=\"" + fmt(hull[1].y) + "\" stroke=\"" + color +
                   "\" stroke-width=\"3\" stroke-linecap=\"round\" data-group=\"" +
                   std::to_string(g) + "\"/>\n";
        } else {
            std::string pts_attr;
            for (std::size_t i = 0; i < hull.size(); ++i) {
                if (i) pts_attr += ' ';
                pts_attr += fmt(hull[i].x) + "," + fmt(hull[i].y);
            }
            svg += "<polygon points=\"" + pts_attr + "\" fill=\"" + color +
                   "\" fill-opacity=\"0.15\" stroke=\"" + color +
                   "\" stroke-width=\"2\" stroke-linejoin=\"round\" data-group=\"" +
                   std::to_string(g) + "\"/>\n";
        }
    }
    svg += "</g>\n";

    svg += "<g id=\"agents\">\n";
    for (const Agent& a : scenario.agents()) {
        const GroupIndex g = partition.group_of(a.id);
        const bool grouped = partition.members(g).size() > 1;
        const std::string fill = grouped ? kPalette[g % kPaletteSize] : kSingletonFill;
        const std::string style = "fill=\"" + fill +
                                  "\" stroke=\"#222222\" stroke-width=\"1\" data-agent=\"" +
                                  std::to_string(a.id) + "\"";
        svg += marker(a.category.index, px(a.position), py(a.position),
                      max_area * a.resource / max_r, style);
        svg += "\n";
    }
    svg += "</g>\n";

    if (spec.legend) {
        svg += "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
        const double y = title_h + size + legend_h / 2;
        double x = 12.0;
        for (std::size_t c = 0; c < scenario.k(); ++c) {
            svg += marker(c, x + 6, y, 80.0, "fill=\"#ffffff\" stroke=\"#222222\" stroke-width=\"1\"");
            svg += "\n<text x=\"" + fmt(x + 16) + "\" y=\"" + fmt(y + 4) + "\">c" +
                   std::to_string(c + 1) + " (" + shape_name(c) + ")</text>\n";
            x += 120.0;
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<RenderedFrame> render_trace(const TraceFile& file, const RenderSpec& spec) {
    const SimTrace& trace = file.trace;
    std::vector<std::uint64_t> wanted =
        spec.keyframes ? keyframe_iterations(trace) : spec.iterations;
    if (wanted.empty()) throw ArgumentError("no iterations selected for rendering");
    for (std::uint64_t it : wanted) {
        if (it > trace.total_iterations || it > trace.events.size()) {
            throw ArgumentError("iteration " + std::to_string(it) + " is not in the trace (0.." +
                                std::to_string(trace.events.size()) + ")");
        }
    }
    const auto frames = replay_partitions(trace, file.scenario.size());
    std::vector<RenderedFrame> out;
    for (std::uint64_t it : wanted) {
        RenderedFrame f;
        f.iteration = it;
        char name[48];
        std::snprintf(name, sizeof name, "iteration_%04llu.svg", static_cast<unsigned long long>(it));
        f.file_name = name;
        const std::string title = it == 0 ? "initialization" : "iteration " + std::to_string(it);
        f.svg = render_frame_svg(file.scenario, frames[it], title, spec);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace groupform
