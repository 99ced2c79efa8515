#pragma once

// SVG snapshots of a trace: agents drawn at their coordinates with a marker
// shape per category and marker area proportional to resource; each group of
// two or more agents is outlined by its convex hull.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupform/dynamics.hpp"
#include "groupform/model.hpp"
#include "groupform/persistence.hpp"

namespace groupform {

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RenderSpec {
    /// Iterations to draw; 0 is the all-singleton start. Ignored when
    /// `keyframes` is set.
    std::vector<std::uint64_t> iterations;
    bool keyframes = true;
    int canvas = 600;
    bool legend = true;
};

/// Start, every iteration with an accepted move, and the final iteration.
std::vector<std::uint64_t> keyframe_iterations(const SimTrace& trace);

/// Andrew's monotone chain; counter-clockwise, no repeated or collinear
/// interior points. Fewer than three distinct input points are returned as-is
/// (deduplicated).
std::vector<Point> convex_hull(std::vector<Point> points);

std::string render_frame_svg(const Scenario& scenario, const Partition& partition,
                             const std::string& title, const RenderSpec& spec);

struct RenderedFrame {
    std::uint64_t iteration = 0;
    std::string file_name;
    std::string svg;
};

/// Throws ArgumentError if a requested iteration is not in the trace.
std::vector<RenderedFrame> render_trace(const TraceFile& file, const RenderSpec& spec);

}  // namespace groupform
