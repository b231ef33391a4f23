#include "htsp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "htsp/errors.hpp"

namespace htsp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> to_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

PointTable parse_csv(std::istream& in, std::optional<std::size_t> dim, bool weighted) {
    PointTable t;
    std::string line;
    int row = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        const auto cells = split(line);
        std::vector<double> vals;
        bool numeric = true;
        for (const auto& c : cells) {
            const auto v = to_double(c);
            if (!v) {
                numeric = false;
                break;
            }
            vals.push_back(*v);
        }
        if (!numeric) {
            if (t.points.empty() && t.header.empty()) {
                t.header = cells;
                continue;
            }
            throw ParseError("row " + std::to_string(row) + ": non-numeric cell");
        }
        if (width == 0) width = vals.size();
        if (vals.size() != width) throw ParseError("row " + std::to_string(row) + ": ragged row");
        if (weighted) {
            if (vals.size() < 2) throw ParseError("row " + std::to_string(row) + ": weight column missing");
            const double w = vals.back();
            if (w < 0) throw ParseError("row " + std::to_string(row) + ": negative weight");
            t.weights.push_back(w);
            vals.pop_back();
        }
        if (dim && vals.size() != *dim)
            throw ParseError("row " + std::to_string(row) + ": expected " + std::to_string(*dim) + " coordinates");
        t.points.push_back(std::move(vals));
    }
    if (t.points.empty()) throw ParseError("no data rows");
    return t;
}

PointTable read_csv(const std::string& path, std::optional<std::size_t> dim, bool weighted) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_csv(in, dim, weighted);
}

std::string format_number(double x) {
    if (x == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

void write_csv(std::ostream& out, const std::vector<Point>& pts, const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    if (!header.empty()) out << '\n';
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < p.size(); ++i) out << (i ? "," : "") << format_number(p[i]);
        out << '\n';
    }
}

std::string render_svg(const std::vector<Point>& polyline, const std::vector<Point>& markers,
                       const std::vector<std::pair<int, int>>& segments) {
    std::vector<Point> all = polyline;
    all.insert(all.end(), markers.begin(), markers.end());
    if (all.empty()) throw EmptyInput("nothing to draw");
    for (const auto& p : all)
        if (p.size() != 2) throw BadParameter("SVG output needs planar points");
    double x0 = all[0][0], x1 = x0, y0 = all[0][1], y1 = y0;
    for (const auto& p : all) {
        x0 = std::min(x0, p[0]);
        x1 = std::max(x1, p[0]);
        y0 = std::min(y0, p[1]);
        y1 = std::max(y1, p[1]);
    }
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    const double size = 800, pad = 20, k = (size - 2 * pad) / span;
    auto X = [&](const Point& p) { return format_number(pad + (p[0] - x0) * k); };
    auto Y = [&](const Point& p) { return format_number(size - pad - (p[1] - y0) * k); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    for (auto [a, b] : segments)
        svg << "<line x1=\"" << X(markers[static_cast<std::size_t>(a)]) << "\" y1=\"" << Y(markers[static_cast<std::size_t>(a)])
            << "\" x2=\"" << X(markers[static_cast<std::size_t>(b)]) << "\" y2=\"" << Y(markers[static_cast<std::size_t>(b)])
            << "\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
    if (!polyline.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"#1f4e99\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < polyline.size(); ++i) svg << (i ? " " : "") << X(polyline[i]) << ',' << Y(polyline[i]);
        svg << "\"/>\n";
    }
    for (const auto& m : markers)
        svg << "<circle cx=\"" << X(m) << "\" cy=\"" << Y(m) << "\" r=\"2\" fill=\"#c0392b\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace htsp
