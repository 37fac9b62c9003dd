#ifndef SECITE_SVG_PLOT_HPP
#define SECITE_SVG_PLOT_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "secite/cluster.hpp"
#include "secite/tsne.hpp"
#include "secite/util.hpp"

namespace secite {

namespace svg_detail {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> kPalette = {
        "#4c78a8",  // blue
        "#f58518",  // orange
        "#54a24b",  // green
        "#e45756",  // red
        "#72b7b2",  // teal
        "#b279a2",  // purple
    };
    return kPalette;
}

inline std::string escape_xml(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string num(double v) { return format_double(v, 3); }

}  // namespace svg_detail

// One circle per projected point, colored by cluster, with a legend mapping
// colors to sentiment labels and the mean silhouette in the title line.
// An empty projection renders a "no data" placeholder.
inline std::string render_scatter(const Projection2D& projection,
                                  const SentimentLabeling& labeling,
                                  const std::vector<std::size_t>& assignments,
                                  std::optional<double> mean_silhouette = std::nullopt) {
    const int width = 800;
    const int height = 600;
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";

    if (projection.points.empty()) {
        svg << "  <text x=\"" << width / 2 << "\" y=\"" << height / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">no data</text>\n"
            << "</svg>\n";
        return svg.str();
    }
    if (assignments.size() != projection.points.size()) {
        throw std::invalid_argument("render_scatter: projection/assignments size mismatch");
    }

    double min_x = projection.points[0][0], max_x = min_x;
    double min_y = projection.points[0][1], max_y = min_y;
    for (const auto& pt : projection.points) {
        min_x = std::min(min_x, pt[0]);
        max_x = std::max(max_x, pt[0]);
        min_y = std::min(min_y, pt[1]);
        max_y = std::max(max_y, pt[1]);
    }
    // 5% margin around the data bounds; degenerate ranges get a unit pad.
    const double pad_x = (max_x - min_x) > 0.0 ? 0.05 * (max_x - min_x) : 1.0;
    const double pad_y = (max_y - min_y) > 0.0 ? 0.05 * (max_y - min_y) : 1.0;
    min_x -= pad_x;
    max_x += pad_x;
    min_y -= pad_y;
    max_y += pad_y;

    const double plot_left = 60.0, plot_right = 630.0;
    const double plot_top = 50.0, plot_bottom = 560.0;
    auto sx = [&](double x) {
        return plot_left + (x - min_x) / (max_x - min_x) * (plot_right - plot_left);
    };
    auto sy = [&](double y) {
        return plot_bottom - (y - min_y) / (max_y - min_y) * (plot_bottom - plot_top);
    };

    std::string title = "Citation sentiment clusters";
    if (mean_silhouette) {
        title += ", mean silhouette = " + format_double(*mean_silhouette, 4);
    }
    svg << "  <text x=\"" << svg_detail::num((plot_left + plot_right) / 2.0)
        << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << svg_detail::escape_xml(title) << "</text>\n";

    // Axes with min/max tick labels.
    svg << "  <rect x=\"" << svg_detail::num(plot_left) << "\" y=\"" << svg_detail::num(plot_top)
        << "\" width=\"" << svg_detail::num(plot_right - plot_left) << "\" height=\""
        << svg_detail::num(plot_bottom - plot_top)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    svg << "  <text x=\"" << svg_detail::num(plot_left) << "\" y=\"" << svg_detail::num(plot_bottom + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << svg_detail::num(min_x) << "</text>\n";
    svg << "  <text x=\"" << svg_detail::num(plot_right) << "\" y=\"" << svg_detail::num(plot_bottom + 18)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << svg_detail::num(max_x) << "</text>\n";
    svg << "  <text x=\"" << svg_detail::num(plot_left - 6) << "\" y=\"" << svg_detail::num(plot_bottom)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << svg_detail::num(min_y) << "</text>\n";
    svg << "  <text x=\"" << svg_detail::num(plot_left - 6) << "\" y=\"" << svg_detail::num(plot_top + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << svg_detail::num(max_y) << "</text>\n";

    const auto& colors = svg_detail::palette();
    for (std::size_t i = 0; i < projection.points.size(); ++i) {
        const std::string& color = colors[assignments[i] % colors.size()];
        svg << "  <circle cx=\"" << svg_detail::num(sx(projection.points[i][0])) << "\" cy=\""
            << svg_detail::num(sy(projection.points[i][1]))
            << "\" r=\"4\" fill=\"" << color << "\" fill-opacity=\"0.8\"/>\n";
    }

    // Legend: one entry per cluster present, labeled by sentiment when known.
    std::set<std::size_t> clusters(assignments.begin(), assignments.end());
    double legend_y = plot_top + 10.0;
    for (std::size_t c : clusters) {
        std::string label = "cluster " + std::to_string(c);
        auto it = labeling.label_of_cluster.find(c);
        if (it != labeling.label_of_cluster.end()) label = to_string(it->second);
        svg << "  <rect x=\"650\" y=\"" << svg_detail::num(legend_y - 9)
            << "\" width=\"12\" height=\"12\" fill=\"" << colors[c % colors.size()] << "\"/>\n"
            << "  <text x=\"668\" y=\"" << svg_detail::num(legend_y + 1)
            << "\" font-family=\"sans-serif\" font-size=\"13\">" << svg_detail::escape_xml(label)
            << "</text>\n";
        legend_y += 20.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace secite

#endif  // SECITE_SVG_PLOT_HPP
