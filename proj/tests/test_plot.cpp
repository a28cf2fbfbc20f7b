#include <doctest.h>

#include "fundata/errors.hpp"
#include "fundata/svg.hpp"
#include "test_util.hpp"

using namespace fundata;

namespace {

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t c = 0;
    for (auto pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + 1)) ++c;
    return c;
}

}  // namespace

TEST_CASE("one polyline per observation, coloured by label") {
    const DenseFD d = test::random_dense(4, 10, 71);
    const std::vector<int> labels{0, 1, 1, 0};
    plot::PlotOptions opt;
    opt.title = "a < b & c";
    const std::string svg = plot::render_svg(d, std::span<const int>(labels), opt);
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(count(svg, "<polyline") == 4);
    CHECK(count(svg, "stroke=\"#1f77b4\" points") == 2);
    CHECK(count(svg, "stroke=\"#ff7f0e\" points") == 2);
    CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
    CHECK(svg == plot::render_svg(d, std::span<const int>(labels), opt));
}

TEST_CASE("missing cells are skipped and shapes are checked") {
    RowMatrix x(1, 4);
    x << 1.0, kMissing, 2.0, 3.0;
    const DenseFD d(Grid1D::linspace(0, 1, 4), x);
    const std::string svg = plot::render_svg(d, std::nullopt);
    const auto start = svg.find("points=\"");
    const auto end = svg.find('"', start + 8);
    CHECK(count(svg.substr(start, end - start), ",") == 3);
    const std::vector<int> wrong{0, 1};
    CHECK_THROWS_AS(plot::render_svg(d, std::span<const int>(wrong)), ValidationError);
    const DenseFD img(DenseArgvals{{"x", Grid1D::linspace(0, 1, 2)}, {"y", Grid1D::linspace(0, 1, 2)}}, {1, 2, 3, 4});
    CHECK_THROWS_AS(plot::render_svg(img, std::nullopt), ValidationError);
}

TEST_CASE("constant data still render") {
    const DenseFD d(Grid1D::linspace(0, 1, 3), RowMatrix::Constant(2, 3, 5.0));
    const std::string svg = plot::render_svg(d, std::nullopt);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
}
