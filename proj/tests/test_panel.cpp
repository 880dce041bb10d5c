#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "corrstates/errors.hpp"
#include "corrstates/panel.hpp"
#include "corrstates/synth.hpp"

using namespace corrstates;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "corrstates_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("date conversion round-trips and spans leap years") {
  CHECK(iso_from_day(day_from_iso("2020-02-27")) == "2020-02-27");
  CHECK(day_from_iso("2020-03-01") - day_from_iso("2020-02-29") == 1);
  CHECK(day_from_iso("2020-02-29") - day_from_iso("2020-02-28") == 1);
  CHECK(day_from_iso("1970-01-01") == 0);
  // A 1021-day consecutive run starting 2020-02-27 ends 2022-12-13.
  CHECK(iso_from_day(day_from_iso("2020-02-27") + 1020) == "2022-12-13");
  CHECK_THROWS_AS(day_from_iso("2020-13-01"), ParseError);
  CHECK_THROWS_AS(day_from_iso("not-a-date"), ParseError);
}

TEST_CASE("identity load of a tiny canonical panel") {
  const auto path = temp_file("tiny.csv");
  write_file(path, "date,A,B\n2021-01-01,0,2\n2021-01-02,1,3\n");
  const auto panel = load_panel(path, PanelLayout::dates_as_rows);
  CHECK(panel.n_regions() == 2);
  CHECK(panel.n_days() == 2);
  CHECK(panel.regions == std::vector<std::string>{"A", "B"});
  CHECK(panel.values(0, 0) == 0.0);
  CHECK(panel.values(0, 1) == 1.0);
  CHECK(panel.values(1, 0) == 2.0);
  CHECK(panel.values(1, 1) == 3.0);
  CHECK(panel.date_iso(0) == "2021-01-01");
}

TEST_CASE("paper-scale panel loads with N=32, D=1021") {
  SynthConfig config;
  config.seed = 5;
  const auto panel = synth_panel(config);
  const auto path = temp_file("large.csv");
  save_panel(path, panel);
  const auto loaded = load_panel(path, PanelLayout::dates_as_rows);
  CHECK(loaded.n_regions() == 32);
  CHECK(loaded.n_days() == 1021);
  CHECK(loaded.date_iso(0) == "2020-02-27");
}

TEST_CASE("load after save round-trips bit-exactly") {
  SynthConfig config;
  config.regions = 5;
  config.days = 40;
  config.seed = 9;
  auto panel = synth_panel(config);
  // Exercise non-integer cells too.
  panel.values(2, 3) = 123.4567890123456789;
  panel.values(4, 39) = 1e-17;
  const auto path = temp_file("roundtrip.csv");
  save_panel(path, panel);
  const auto loaded = load_panel(path, PanelLayout::dates_as_rows);
  REQUIRE(loaded.n_regions() == panel.n_regions());
  REQUIRE(loaded.n_days() == panel.n_days());
  CHECK(loaded.regions == panel.regions);
  CHECK(loaded.dates == panel.dates);
  for (Eigen::Index i = 0; i < panel.n_regions(); ++i) {
    for (Eigen::Index d = 0; d < panel.n_days(); ++d) {
      CHECK(loaded.values(i, d) == panel.values(i, d));
    }
  }
  // And the re-save is byte-identical.
  const auto path2 = temp_file("roundtrip2.csv");
  save_panel(path2, loaded);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
  const std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
  CHECK(bytes_a == bytes_b);
}

TEST_CASE("regions-as-rows layout with skippable metadata columns") {
  const auto path = temp_file("transposed.csv");
  write_file(path,
             "state,population,2021-01-01,2021-01-02,2021-01-03\n"
             "North,1200,1,2,3\n"
             "South,3400,4,5,6\n");
  LoadOptions options;
  options.skip_columns = {"population"};
  const auto panel = load_panel(path, PanelLayout::regions_as_rows, options);
  CHECK(panel.regions == std::vector<std::string>{"North", "South"});
  CHECK(panel.n_days() == 3);
  CHECK(panel.values(1, 2) == 6.0);
  CHECK(panel.date_iso(1) == "2021-01-02");
}

TEST_CASE("gap in dates is rejected, naming the first gap") {
  const auto path = temp_file("gap.csv");
  write_file(path,
             "date,A,B\n2020-02-28,1,1\n2020-02-29,1,2\n2020-03-02,1,3\n");
  CHECK_THROWS_WITH_AS(load_panel(path, PanelLayout::dates_as_rows),
                       doctest::Contains("2020-02-29"), GapError);
}

TEST_CASE("non-numeric and missing cells are rejected with coordinates") {
  const auto path = temp_file("badcell.csv");
  write_file(path, "date,A,B\n2021-01-01,1,x\n2021-01-02,1,2\n");
  CHECK_THROWS_WITH_AS(load_panel(path, PanelLayout::dates_as_rows),
                       doctest::Contains("'x'"), ParseError);
  write_file(path, "date,A,B\n2021-01-01,1,\n2021-01-02,1,2\n");
  CHECK_THROWS_AS(load_panel(path, PanelLayout::dates_as_rows), ParseError);
}

TEST_CASE("duplicate region is rejected") {
  const auto path = temp_file("dup.csv");
  write_file(path, "date,A,A\n2021-01-01,1,2\n2021-01-02,3,4\n");
  CHECK_THROWS_AS(load_panel(path, PanelLayout::dates_as_rows), DuplicateRegionError);
}

TEST_CASE("negative counts rejected unless clipping is requested") {
  const auto path = temp_file("neg.csv");
  write_file(path, "date,A,B\n2021-01-01,1,-3\n2021-01-02,1,2\n");
  CHECK_THROWS_AS(load_panel(path, PanelLayout::dates_as_rows), ParseError);
  LoadOptions options;
  options.clip_negative_to_zero = true;
  const auto panel = load_panel(path, PanelLayout::dates_as_rows, options);
  CHECK(panel.values(1, 0) == 0.0);
}

TEST_CASE("CRLF line endings are accepted") {
  const auto path = temp_file("crlf.csv");
  write_file(path, "date,A,B\r\n2021-01-01,1,2\r\n2021-01-02,3,4\r\n");
  const auto panel = load_panel(path, PanelLayout::dates_as_rows);
  CHECK(panel.values(1, 1) == 4.0);
}

TEST_CASE("slice: identity, single day, and first-33-days") {
  SynthConfig config;
  config.regions = 4;
  config.days = 1021;
  config.seed = 3;
  const auto panel = synth_panel(config);

  const auto whole = slice_panel(panel, panel.dates.front(), panel.dates.back());
  CHECK(whole.dates == panel.dates);
  CHECK((whole.values - panel.values).cwiseAbs().maxCoeff() == 0.0);

  const auto single = slice_panel(panel, "2020-03-01", "2020-03-01");
  CHECK(single.n_days() == 1);

  // Date-arithmetic oracle: an inclusive span start..start+32 covers 33 days.
  const DayNumber start = panel.dates.front();
  const auto first33 = slice_panel(panel, start, start + 32);
  CHECK(first33.n_days() == 33);
  CHECK(first33.values(2, 10) == panel.values(2, 10));

  CHECK_THROWS_AS(slice_panel(panel, start - 1, start + 5), RangeError);
  CHECK_THROWS_AS(slice_panel(panel, start + 5, start), RangeError);
}

}  // TEST_SUITE
