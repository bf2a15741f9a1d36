#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nnad/error.hpp"

namespace nnad::cli {

namespace {

constexpr double canvas = 640.0;
constexpr double margin = 40.0;
constexpr double max_marker = 14.0;
constexpr double min_marker = 1.5;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
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

std::string render_scatter(const Dataset& data, std::span<const double> scores, std::span<const Label> predicted,
                           const std::string& title, const std::string& metadata) {
    if (data.dim() != 2) throw InvalidArgument("svg output needs 2-D data, got d = " + std::to_string(data.dim()));
    if (scores.size() != data.size() || predicted.size() != data.size())
        throw InvalidArgument("scores and labels must have one entry per point");

    double lo_x = data.point(0)[0], hi_x = lo_x, lo_y = data.point(0)[1], hi_y = lo_y;
    for (std::size_t i = 1; i < data.size(); ++i) {
        lo_x = std::min(lo_x, data.point(i)[0]);
        hi_x = std::max(hi_x, data.point(i)[0]);
        lo_y = std::min(lo_y, data.point(i)[1]);
        hi_y = std::max(hi_y, data.point(i)[1]);
    }
    // Equal scaling on both axes so distances keep their shape.
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    const double scale = (canvas - 2 * margin) / span;
    const double max_score = *std::max_element(scores.begin(), scores.end());

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << canvas << "\" height=\"" << canvas
        << "\" viewBox=\"0 0 " << canvas << ' ' << canvas << "\">\n"
        << "<metadata>" << xml_escape(metadata) << "</metadata>\n"
        << "<title>" << xml_escape(title) << "</title>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(title)
        << "</text>\n<g fill-opacity=\"0.35\" stroke-width=\"1\">\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double cx = margin + (data.point(i)[0] - lo_x) * scale;
        const double cy = canvas - margin - (data.point(i)[1] - lo_y) * scale;
        const double r = max_score > 0 ? min_marker + (max_marker - min_marker) * scores[i] / max_score : min_marker;
        const char* color = predicted[i] == Label::anomaly ? "#d62728" : "#1f77b4";
        svg << "<circle cx=\"" << fixed(cx) << "\" cy=\"" << fixed(cy) << "\" r=\"" << fixed(r) << "\" fill=\""
            << color << "\" stroke=\"" << color << "\"/>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace nnad::cli
