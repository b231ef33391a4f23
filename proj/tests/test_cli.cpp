#include "doctest.h"

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "htsp/errors.hpp"
#include "htsp/io.hpp"

using namespace htsp;

namespace {

const std::string cli = HTSP_CLI_PATH;
const std::string root = HTSP_SOURCE_DIR;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    FILE* pipe = popen((cli + " " + args + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("csv header detection and weights") {
    std::istringstream with_header("x,y\n0,0\n1,2.5\n");
    const auto t = parse_csv(with_header);
    CHECK(t.header == std::vector<std::string>{"x", "y"});
    CHECK(t.points.size() == 2);
    CHECK(t.points[1][1] == 2.5);

    std::istringstream bare("0,0,1\n1,0,3\n");
    const auto m = parse_csv(bare, 2, true);
    CHECK(m.header.empty());
    CHECK(m.weights == std::vector<double>{1, 3});
    CHECK(m.points[1] == Point{1, 0});
}

TEST_CASE("csv errors") {
    std::istringstream ragged("0,0\n1,2,3\n");
    CHECK_THROWS_AS(parse_csv(ragged), ParseError);
    std::istringstream late_text("0,0\nx,y\n");
    CHECK_THROWS_AS(parse_csv(late_text), ParseError);
    std::istringstream wrong_dim("0,0\n");
    CHECK_THROWS_AS(parse_csv(wrong_dim, 3), ParseError);
    std::istringstream empty("x,y\n");
    CHECK_THROWS_AS(parse_csv(empty), ParseError);
    std::istringstream neg("0,0,-1\n");
    CHECK_THROWS_AS(parse_csv(neg, 2, true), ParseError);
    CHECK_THROWS_AS(read_csv(root + "/no/such/file.csv"), ParseError);
}

TEST_CASE("number formatting and csv round trip") {
    CHECK(format_number(0.1 + 0.2) == "0.3");
    CHECK(format_number(1.0 / 3) == "0.333333333333");
    CHECK(format_number(-2) == "-2");
    CHECK(format_number(1e-20) == "1e-20");
    std::ostringstream out;
    write_csv(out, {{0.25, -1}, {3, 4}}, {"x", "y"});
    CHECK(out.str() == "x,y\n0.25,-1\n3,4\n");
    std::istringstream back(out.str());
    CHECK(parse_csv(back).points == std::vector<Point>{{0.25, -1}, {3, 4}});
}

TEST_CASE("svg needs planar points") {
    const auto svg = render_svg({{0, 0}, {1, 1}}, {{0.5, 0.5}});
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK_THROWS_AS(render_svg({{0, 0, 0}}, {}), BadParameter);
}

TEST_CASE("gen snowflake writes 4^5 + 1 rows") {
    const auto r = run("gen snowflake --depth 5");
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 1025);
}

TEST_CASE("usage and parameter errors exit 2") {
    CHECK(run("gen snowflake --p 0.6 --depth 2").code == 2);
    CHECK(run("beta " + root + "/no/such/file.csv").code == 2);
    CHECK(run("curve").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("curve " + root + "/fixtures/segment.csv --fitter nope").code == 2);
    CHECK(run("curve " + root + "/fixtures/cloud3d.csv --dim 2").code == 2);
    CHECK(run("curve " + root + "/fixtures/cloud3d.csv --svg /tmp/htsp_never.svg").code == 2);
}

TEST_CASE("collinear input has zero beta sums") {
    const auto r = run("beta " + root + "/fixtures/segment.csv --kmin -5");
    CHECK(r.code == 0);
    CHECK(r.out.find("\"total\": 0.0") != std::string::npos);
    for (std::size_t at = r.out.find("\"sum\":"); at != std::string::npos; at = r.out.find("\"sum\":", at + 1))
        CHECK(r.out.substr(at, 11) == "\"sum\": 0.0\n");
}

TEST_CASE("segment curve has two breakpoints") {
    const std::string path = "/tmp/htsp_two_points.csv";
    std::ofstream(path) << "0,0\n1,0\n";
    const auto r = run("curve " + path + " --s 1 --depth 3");
    CHECK(r.code == 0);
    const auto at = r.out.find("\"breakpoints\"");
    const auto end = r.out.find("\"certificate\"");
    REQUIRE(at != std::string::npos);
    // each breakpoint is [t, [x, y]], so two of them open five brackets
    int opens = 0;
    for (std::size_t i = at; i < end; ++i) opens += r.out[i] == '[';
    CHECK(opens == 5);
}

TEST_CASE("check passes on the shipped fixtures") {
    const auto r = run("check " + root + "/fixtures/segment.csv " + root + "/fixtures/square_corners.csv " + root +
                       "/fixtures/cloud2d.csv " + root + "/fixtures/cloud3d.csv " + root + "/fixtures/wiggle.csv");
    CHECK(r.code == 0);
}

TEST_CASE("golden outputs") {
    const std::string g = root + "/tests/golden/", f = root + "/fixtures/";
    CHECK(run("beta " + f + "square_corners.csv --variant threshold --beta0 0.1 --s 2 --kmin -4").out ==
          slurp(g + "beta_square_corners.json"));
    CHECK(run("curve " + f + "segment.csv --s 1 --depth 4").out == slurp(g + "curve_segment.json"));
    CHECK(run("curve " + f + "cloud2d.csv --s 1.5 --depth 4 --mode tst").out == slurp(g + "curve_cloud2d.json"));
    CHECK(run("mass " + f + "wiggle.csv --s 1.2 --depth 4").out == slurp(g + "mass_wiggle.json"));
}

TEST_CASE("keys are sorted and floats carry at most 12 digits") {
    const auto out = slurp(root + "/tests/golden/curve_cloud2d.json");
    std::string prev;
    int depth = 0;
    // top-level keys in order
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '{' || out[i] == '[') ++depth;
        if (out[i] == '}' || out[i] == ']') --depth;
        if (depth == 1 && out[i] == '"') {
            const auto close = out.find('"', i + 1);
            const std::string key = out.substr(i + 1, close - i - 1);
            if (out[close + 1] == ':') {
                CHECK(prev < key);
                prev = key;
            }
            i = close;
        }
    }
    for (std::size_t i = 0; i < out.size();) {
        if (std::isdigit(static_cast<unsigned char>(out[i]))) {
            std::size_t j = i;
            std::string mantissa;
            while (j < out.size() && (std::isdigit(static_cast<unsigned char>(out[j])) || out[j] == '.'))
                if (out[j++] != '.') mantissa += out[j - 1];
            const auto lead = mantissa.find_first_not_of('0');
            CHECK((lead == std::string::npos ? 0 : mantissa.size() - lead) <= 12);
            i = j;
        } else {
            ++i;
        }
    }
}

TEST_CASE("gen options reach every generator") {
    CHECK(run("gen sierpinski --depth 1").code == 0);
    CHECK(run("gen cantor_ladder --s 2 --N 3 --depth 2").code == 0);
    CHECK(count_lines(run("gen sharpness --s 1.1 --q 0.5 --depth 4").out) == 17);
    CHECK(count_lines(run("gen four_corner --depth 1").out) == 16);
    CHECK(run("gen koch").code == 2);
}
