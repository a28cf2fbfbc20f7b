#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "fundata/errors.hpp"
#include "fundata/io.hpp"
#include "test_util.hpp"

using namespace fundata;
using test::tmp_path;

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

DenseFD with_missing() {
    RowMatrix x(3, 4);
    x << 0.1, kMissing, 1.0 / 3.0, -2.5e-300,
         1e300, 2.0, kMissing, 5.0,
         6.0, 7.0, 8.0, -0.0;
    return DenseFD(Grid1D({0.0, 0.1, 0.7, 2.0}), x);
}

}  // namespace

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-310, -1.7976931348623157e308, 123456789.125, 5e-324}) {
        CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
    CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("dense CSV round trip is exact") {
    const DenseFD d = with_missing();
    const auto p = tmp_path("dense.csv");
    io::write_csv(d, p);
    CHECK(same_content(io::read_csv_dense(p), d));
    const auto irr = to_irregular(d);
    io::write_csv(irr, p);
    CHECK(same_content(io::read_csv_irregular(p), irr));
}

TEST_CASE("CSV parsing rules") {
    const auto p = tmp_path("named.csv");
    write_text(p, ",a,b,c\n0,1,NA,3\n1,4,5,6\n");
    const DenseFD d = io::read_csv_dense(p);
    CHECK(d.grid().vector() == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(is_missing(d.at(0, 1)));
    CHECK_THROWS_AS(io::read_csv_irregular(p), IoError);
    write_text(p, ",0,1\n0,1\n");
    CHECK_THROWS_AS(io::read_csv_dense(p), IoError);
    write_text(p, ",0,1\n0,1,x\n");
    CHECK_THROWS_AS(io::read_csv_dense(p), IoError);
    CHECK_THROWS_AS(io::read_csv_dense(tmp_path("does_not_exist.csv")), IoError);
}

TEST_CASE("ts round trip with labels and missing values") {
    RowMatrix x(2, 3);
    x << 1.5, kMissing, -3.0, 0.25, 0.5, 0.75;
    const DenseFD d(Grid1D::linspace(0.0, 2.0, 3), x);
    const auto p = tmp_path("series.ts");
    io::write_ts(d, std::vector<std::string>{"up", "down"}, p, "demo");
    const io::TsData back = io::read_ts(p);
    CHECK(same_content(back.data, d));
    REQUIRE(back.labels);
    CHECK(*back.labels == std::vector<std::string>{"up", "down"});
    CHECK(back.problem_name == "demo");
}

TEST_CASE("ts parser rejects unsupported variants") {
    const auto p = tmp_path("bad.ts");
    write_text(p, "@problemName x\n@timeStamps true\n@data\n1,2\n");
    CHECK_THROWS_AS(io::read_ts(p), IoError);
    write_text(p, "@problemName x\n@univariate false\n@data\n1,2:3,4\n");
    CHECK_THROWS_AS(io::read_ts(p), IoError);
    write_text(p, "@problemName x\n@classLabel true a b\n@data\n1,2:c\n");
    CHECK_THROWS_AS(io::read_ts(p), IoError);
    write_text(p, "@problemName x\n@classLabel false\n@data\n1,2\n1,2,3\n");
    CHECK_THROWS_AS(io::read_ts(p), IoError);
    write_text(p, "# comment\n@problemName x\n@classLabel false\n@data\n1,?\n");
    const auto ok = io::read_ts(p);
    CHECK(ok.data.n_obs() == 1);
    CHECK(is_missing(ok.data.at(0, 1)));
    CHECK_FALSE(ok.labels);
}

TEST_CASE("manifest round trip keeps 2-D grids and irregular components") {
    const DenseFD img(DenseArgvals{{"x", Grid1D({0.0, 0.5})}, {"y", Grid1D({1.0, 2.0, 4.0})}},
                      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    const IrregularFD irr = to_irregular(subset(with_missing(), 0, 2));
    const DenseFD line = subset(with_missing(), 1, 3);
    const MultivariateFD m({line, img, irr});
    const auto p = tmp_path("bundle/manifest.json");
    std::filesystem::create_directories(p.parent_path());
    io::write_manifest(m, p);
    const MultivariateFD back = io::read_manifest(p);
    REQUIRE(back.n_components() == 3);
    CHECK(same_content(std::get<DenseFD>(back[0]), line));
    CHECK(same_content(std::get<DenseFD>(back[1]), img));
    CHECK(std::get<DenseFD>(back[1]).argvals()[1].name == "y");
    CHECK(same_content(std::get<IrregularFD>(back[2]), irr));
    CHECK(io::read_any(p).n_components() == 3);
    write_text(p, R"({"format":"other","version":1,"components":[]})");
    CHECK_THROWS_AS(io::read_manifest(p), IoError);
}

TEST_CASE("labels and tables") {
    const auto p = tmp_path("labels.csv");
    const std::vector<int> labels{0, 3, -1, 2};
    io::write_labels(labels, p);
    CHECK(io::read_labels(p) == labels);
    RowMatrix t(2, 2);
    t << 1.0 / 7.0, 2.0, -3.0, 4e-20;
    const auto q = tmp_path("table.csv");
    io::write_table(q, {"a", "b"}, t);
    CHECK(io::read_table(q) == t);
}

TEST_CASE("atomic write replaces content") {
    const auto p = tmp_path("atomic.txt");
    io::write_file_atomic(p, "first");
    io::write_file_atomic(p, "second");
    CHECK(io::read_file(p) == "second");
}
