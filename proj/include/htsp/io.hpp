#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "htsp/geom.hpp"

namespace htsp {

struct PointTable {
    std::vector<std::string> header;  // empty when the file has none
    std::vector<Point> points;
    std::vector<double> weights;      // filled only for weighted reads
};

// One point per row, comma separated. A first row that does not parse as numbers is a
// header. With `weighted` the last column is a weight. A fixed `dim` must match every row.
PointTable parse_csv(std::istream& in, std::optional<std::size_t> dim = std::nullopt, bool weighted = false);
PointTable read_csv(const std::string& path, std::optional<std::size_t> dim = std::nullopt, bool weighted = false);

std::string format_number(double x);  // 12 significant digits, shortest form
void write_csv(std::ostream& out, const std::vector<Point>& pts, const std::vector<std::string>& header = {});

// Polyline plus point markers, y axis pointing up. Requires 2D input.
std::string render_svg(const std::vector<Point>& polyline, const std::vector<Point>& markers,
                       const std::vector<std::pair<int, int>>& segments = {});

}  // namespace htsp
