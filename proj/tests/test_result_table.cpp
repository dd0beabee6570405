#include "fidtrust/chart.hpp"
#include "fidtrust/result_table.hpp"

#include "support.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <fstream>

using namespace fidtrust;

TEST_CASE("csv round-trips values exactly") {
  ResultTable t({"strength", "fid"});
  t.add_row("noise-0", {0.0, 1.0 / 3.0});
  t.add_row("a,b \"q\"", {5.0, 1e-300});
  const std::string csv = t.to_csv();
  CHECK(csv.rfind("label,strength,fid\nnoise-0,0,0.33333333333333331\n", 0) == 0);
  const ResultTable back = ResultTable::from_csv(csv);
  CHECK(back.columns() == t.columns());
  REQUIRE(back.size() == 2);
  CHECK(back.rows()[1].label == "a,b \"q\"");
  CHECK(back.value(0, "fid") == 1.0 / 3.0);
  CHECK(back.value(1, "fid") == 1e-300);
}

TEST_CASE("rows are complete and finite") {
  ResultTable t({"x"});
  CHECK_THROWS_AS(t.add_row("a", {}), std::invalid_argument);
  CHECK_THROWS_AS(t.add_row("a", {std::nan("")}), std::invalid_argument);
  t.add_row("a", {1.0});
  CHECK_THROWS_AS(t.add_row("a", {2.0}), std::invalid_argument);
  CHECK_THROWS_AS(ResultTable({"x", "x"}), std::invalid_argument);
  CHECK_THROWS_AS(t.column("y"), std::invalid_argument);
}

TEST_CASE("json output") {
  ResultTable t({"fid"});
  t.add_row("r", {2.5});
  CHECK(t.to_json().find("\"fid\": 2.5") != std::string::npos);
}

TEST_CASE("top-5 sidecar join") {
  const auto dir = support::temp_dir("top5");
  ResultTable t({"fid"});
  t.add_row("in", {1.0});
  t.add_row("out", {2.0});
  std::ofstream(dir / "ok.csv") << "label,top5\nout,0.4\nin,0.93\nextra,0.1\n";
  ResultTable joined = t;
  join_top5(joined, dir / "ok.csv");
  CHECK(joined.column("top5_accuracy") == std::vector<double>{0.93, 0.4});
  std::ofstream(dir / "missing.csv") << "label,top5\nin,0.9\n";
  ResultTable again = t;
  CHECK_THROWS(join_top5(again, dir / "missing.csv"));
}

TEST_CASE("temporary files do not survive") {
  const auto dir = support::temp_dir("atomic");
  write_text_file(dir / "a.txt", "hello");
  CHECK(support::read_file(dir / "a.txt") == "hello");
  CHECK_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
  CHECK_THROWS(write_text_file(dir / "no" / "b.txt", "x"));
}

TEST_CASE("svg charts") {
  LineChart c;
  c.title = "fid";
  c.x = {0, 5, 20};
  c.series.push_back({"fid", {3.0, 2.0, 1.0}});
  const std::string svg = render_svg(c);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(render_svg(c) == svg);
  c.series[0].y.pop_back();
  CHECK_THROWS_AS(render_svg(c), std::invalid_argument);
}
