#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "levrep/io.hpp"

using namespace levrep;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("levrep_io_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("numbers round-trip through 17 digits") {
  for (double x : {0.1, 1.0 / 3, 1e-300, 6.02214076e23, -0.0, 123456789.125}) {
    CHECK(std::stod(format_number(x)) == x);
  }
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("csv write and read") {
  const fs::path dir = scratch("csv");
  CsvTable t{{"a", "b"}, {{1.5, 2.0}, {1.0 / 3, -4e-9}}};
  write_csv(dir / "t.csv", t);
  const CsvTable back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  t.rows.push_back({1.0});
  CHECK_THROWS_AS(write_csv(dir / "bad.csv", t), IoError);
  CHECK_THROWS_AS(read_csv(dir / "missing.csv"), IoError);
}

TEST_CASE("sha256 of a known string") {
  const fs::path dir = scratch("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("number lists and ranges") {
  CHECK(parse_number_list("2500,1e4, 4e4") == std::vector<double>{2500, 1e4, 4e4});
  const auto r = parse_number_list("1:3:0.5");
  CHECK(r.size() == 5);
  CHECK(r.back() == 3.0);
  CHECK(parse_number_list("0.5,1:2:1") == std::vector<double>{0.5, 1, 2});
  CHECK(parse_number_list("0.1:10:0.1").size() == 100);
  CHECK_THROWS_AS(parse_number_list(""), ConfigError);
  CHECK_THROWS_AS(parse_number_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_number_list("3:1:1"), ConfigError);
  CHECK_THROWS_AS(parse_number_list("x"), ConfigError);
}

TEST_CASE("key=value config") {
  const KeyValues kv = parse_key_values("# comment\n system = kepler \n\nbeta-mean=6\nmembers = 3e5\nseed=7\nunknown = 1\n");
  const EnsembleConfig c = config_from_key_values(kv, EnsembleConfig{});
  CHECK(c.system == SystemKind::Kepler);
  CHECK(c.param_law.mean == 6.0);
  CHECK(c.param_law.lower_cut == 3.0);
  CHECK(c.member_count == 300000);
  CHECK(c.seed == 7);
  CHECK_THROWS_AS(parse_key_values("novalue\n"), ConfigError);
  CHECK_THROWS_AS(config_from_key_values({{"energy", "abc"}}, EnsembleConfig{}), ConfigError);
  CHECK_THROWS_AS(config_from_key_values({{"members", "-3"}}, EnsembleConfig{}), ConfigError);

  EnsembleConfig d;
  d.energy = 2500;
  d.param_law.spread = 1.0 / 7;
  d.param_law.spread_kind = SpreadKind::HalfWidthHalfMax;
  const EnsembleConfig back = config_from_key_values(config_to_key_values(d), EnsembleConfig{});
  CHECK(back.energy == d.energy);
  CHECK(back.param_law.spread == d.param_law.spread);
  CHECK(back.param_law.spread_kind == SpreadKind::HalfWidthHalfMax);
}

TEST_CASE("manifest lists and verifies outputs") {
  const fs::path dir = scratch("manifest");
  write_csv(dir / "x.csv", CsvTable{{"v"}, {{1.0}}});
  RunManifest m;
  m.command = "spacing";
  m.config = EnsembleConfig{};
  m.settings["bin"] = "0.05";
  m.outputs = {{"x", "x.csv"}};
  write_manifest(dir / "manifest.txt", m);
  const KeyValues kv = read_key_values(dir / "manifest.txt");
  CHECK(kv.at("command") == "spacing");
  CHECK(kv.at("tool_version") == kToolVersion);
  CHECK(kv.at("bin") == "0.05");
  CHECK(kv.at("output.x") == "x.csv");
  CHECK(config_from_key_values(kv, EnsembleConfig{}).member_count == 300000);
  CHECK(verify_manifest(dir / "manifest.txt").ok());
  CHECK(verify_manifest(dir / "manifest.txt").checked == 1);
  std::ofstream(dir / "x.csv", std::ios::app) << "2\n";
  CHECK(verify_manifest(dir / "manifest.txt").mismatched.size() == 1);
  fs::remove(dir / "x.csv");
  CHECK(verify_manifest(dir / "manifest.txt").missing.size() == 1);
}
