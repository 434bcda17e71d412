#include <doctest.h>

#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nhspec/cli.hpp"
#include "nhspec/io.hpp"
#include "nhspec/parallel.hpp"

using namespace nhspec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  REQUIRE(file);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nhspec-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("indexed runner covers every slot and reports the first failure") {
  std::vector<int> slots(100, 0);
  nhspec::run_indexed(slots.size(), 8,
                      [&](std::size_t i) { slots[i] = static_cast<int>(i); });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    CHECK(slots[i] == static_cast<int>(i));
  }

  try {
    nhspec::run_indexed(64, 8, [](std::size_t i) {
      if (i % 7 == 3) {
        throw std::runtime_error("slot " + std::to_string(i));
      }
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& error) {
    // index 3 is the smallest throwing slot
    CHECK(std::string(error.what()) == "slot 3");
  }
}

TEST_CASE("grid parsing") {
  const auto grid = parse_grid("0:0.5:50");
  REQUIRE(grid.size() == 50);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 0.5);
  CHECK(parse_grid("1:1:1") == std::vector<double>{1.0});
  CHECK_THROWS_AS(parse_grid("0:1:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("2:1:5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("garbage"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1:5x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("0:1z:5"), std::invalid_argument);
  const auto negatives = parse_grid("-3:-2:5");
  CHECK(negatives.front() == -3.0);
  CHECK(negatives.back() == -2.0);
}

TEST_CASE("size list parsing") {
  CHECK(parse_size_list("8,16,32") == std::vector<int>{8, 16, 32});
  CHECK_THROWS_AS(parse_size_list("8,,16"), std::invalid_argument);
  CHECK_THROWS_AS(parse_size_list("1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_size_list("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_size_list("8,16x"), std::invalid_argument);
}

TEST_CASE("doubles survive the 17-digit text round trip") {
  for (double value : {0.1, 1.0 / 3.0, 2.6532977051444223, -1e-300,
                       3.141592653589793, 1e17, 1e-300}) {
    CHECK(std::stod(format_double(value)) == value);
  }
}

TEST_CASE("csv writer emits a header and plain records") {
  std::ostringstream out;
  CsvWriter csv(out);
  csv.header({"a", "b", "c"});
  csv.row(1, 2.5, true);
  CHECK(out.str() == "a,b,c\n1,2.5,1\n");
}

TEST_CASE("spectrum command writes the expected row counts") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "spectrum";
  config.model = "ring";
  config.size = 20;
  config.sweep_phi = "0:0.5:10";
  config.out = (dir.path / "ring.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  const std::string text = slurp(config.out);
  CHECK(count_lines(text) == 1 + 20 * 10);
  CHECK(text.rfind("phi,index,k,re_E,im_E,abs_E", 0) == 0);
}

TEST_CASE("chain spectrum rows stay real") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "spectrum";
  config.model = "chain";
  config.size = 20;
  config.alpha = 1.1025;
  config.beta = 1.0;
  config.format = "json";
  config.out = (dir.path / "chain.json").string();
  REQUIRE(cli::run(config) == cli::kOk);
  const auto records = nlohmann::json::parse(slurp(config.out));
  REQUIRE(records.size() == 20);
  for (const auto& record : records) {
    CHECK(std::abs(record["im_E"].get<double>()) < 1e-10);
    CHECK(std::abs(record["im_E_oracle"].get<double>()) < 1e-10);
  }
}

TEST_CASE("defect-ring spectrum at J=-1 is fully complex") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "spectrum";
  config.model = "defect-ring";
  config.size = 20;
  config.alpha = 1.1025;
  config.beta = 1.0;
  config.defect = -1.0;
  config.format = "json";
  config.out = (dir.path / "defect.json").string();
  REQUIRE(cli::run(config) == cli::kOk);
  const auto records = nlohmann::json::parse(slurp(config.out));
  REQUIRE(records.size() == 20);
  for (const auto& record : records) {
    CHECK(std::abs(record["im_E"].get<double>()) > 1e-9);
  }
}

TEST_CASE("json output re-parses to the exact in-memory values") {
  TempDir dir;
  cli::RunConfig csv_config;
  csv_config.command = "spectrum";
  csv_config.model = "ring";
  csv_config.size = 12;
  csv_config.alpha = 2.0;
  csv_config.beta = 0.5;
  csv_config.out = (dir.path / "ring.csv").string();
  REQUIRE(cli::run(csv_config) == cli::kOk);

  cli::RunConfig json_config = csv_config;
  json_config.format = "json";
  json_config.out = (dir.path / "ring.json").string();
  REQUIRE(cli::run(json_config) == cli::kOk);

  // the CSV carries 17 significant digits; both encodings must agree bitwise
  const auto records = nlohmann::json::parse(slurp(json_config.out));
  std::ifstream csv_file(csv_config.out);
  std::string line;
  std::getline(csv_file, line);  // header
  for (const auto& record : records) {
    REQUIRE(std::getline(csv_file, line));
    std::istringstream fields(line);
    std::string field;
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == record["phi"].get<double>());
    std::getline(fields, field, ',');
    CHECK(std::stoi(field) == record["index"].get<int>());
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == record["k"].get<double>());
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == record["re_E"].get<double>());
    std::getline(fields, field, ',');
    CHECK(std::stod(field) == record["im_E"].get<double>());
  }
}

TEST_CASE("eigenstates command covers every site of every mode") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "eigenstates";
  config.model = "chain";
  config.size = 12;
  config.alpha = 4.0;
  config.beta = 1.0;
  config.out = (dir.path / "modes.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  CHECK(count_lines(slurp(config.out)) == 1 + 12 * 12);

  config.model = "ring";
  CHECK(cli::run(config) == cli::kConfigError);
}

TEST_CASE("phase-diagram command emits cells and a boundaries file") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "phase-diagram";
  config.size = 20;
  config.sweep_j = "0.1:3:8";
  config.sweep_phi = "0.03:0.06:2";
  config.out = (dir.path / "phase.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  CHECK(count_lines(slurp(config.out)) == 1 + 8 * 2);

  const fs::path boundaries = dir.path / "phase.boundaries.csv";
  REQUIRE(fs::exists(boundaries));
  const std::string text = slurp(boundaries);
  CHECK(text.rfind("phi,J_boundary,J_c_formula,rel_error", 0) == 0);
  // phi=0.03 row crosses e^{-0.6} and e^{0.6}; phi=0.06 keeps e^{1.2} > 3
  // outside the grid, so only its inner transition is bracketed
  CHECK(count_lines(text) == 1 + 3);
}

TEST_CASE("boundaries file meets the closed-form couplings within 1%") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "phase-diagram";
  config.size = 20;
  config.alpha = 1.05;
  config.beta = 1.0 / 1.05;
  config.sweep_j = "-3:3:25";
  config.sweep_phi = "0.04879016416943205:0.04879016416943205:1";
  config.out = (dir.path / "row.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);

  // alpha*beta = 1 fixes g = 1; the row crosses all four transitions
  std::ifstream file(dir.path / "row.boundaries.csv");
  REQUIRE(file);
  std::string line;
  std::getline(file, line);  // header
  int rows = 0;
  while (std::getline(file, line)) {
    const auto last_comma = line.rfind(',');
    REQUIRE(last_comma != std::string::npos);
    CHECK(std::stod(line.substr(last_comma + 1)) < 0.01);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("phase-diagram requires both grids") {
  cli::RunConfig config;
  config.command = "phase-diagram";
  config.sweep_j = "0:1:5";
  CHECK(cli::run(config) == cli::kConfigError);
}

TEST_CASE("phase-diagram bytes are identical across worker counts") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "phase-diagram";
  config.size = 12;
  config.sweep_j = "-2:3:21";
  config.sweep_phi = "0:0.1:4";
  config.workers = 1;
  config.out = (dir.path / "a.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  config.workers = 8;
  config.out = (dir.path / "b.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
}

TEST_CASE("ipr-scaling emits the table and the asymmetry insert") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "ipr-scaling";
  config.size_list = "8,16,32";
  config.sweep_phi = "0:0.9163:4";
  config.out = (dir.path / "ipr.csv").string();
  REQUIRE(cli::run(config) == cli::kOk);
  CHECK(count_lines(slurp(config.out)) == 1 + 3 * 4);
  REQUIRE(fs::exists(dir.path / "ipr.insert.csv"));
  CHECK(count_lines(slurp(dir.path / "ipr.insert.csv")) == 1 + 81);

  config.size_list.clear();
  CHECK(cli::run(config) == cli::kConfigError);
}

TEST_CASE("compute failures map to exit code 3") {
  cli::RunConfig config;
  config.command = "spectrum";
  config.model = "defect-ring";
  config.size = 2500;  // beyond the dense solver cap
  CHECK(cli::run(config) == cli::kComputeError);
}

TEST_CASE("config validation maps to exit code 2") {
  cli::RunConfig config;
  config.command = "spectrum";
  config.model = "nonsense";
  CHECK(cli::run(config) == cli::kConfigError);
  config.model = "ring";
  config.workers = 0;
  CHECK(cli::run(config) == cli::kConfigError);
  config.workers = 1;
  config.format = "yaml";
  CHECK(cli::run(config) == cli::kConfigError);
  config.format = "csv";
  config.command = "wat";
  CHECK(cli::run(config) == cli::kConfigError);
  config.command = "spectrum";
  config.size = 1;
  CHECK(cli::run(config) == cli::kConfigError);
}

TEST_CASE("verify subset runs and reports") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "verify";
  config.only = "derived-params";
  config.format = "json";
  config.out = (dir.path / "verify.json").string();
  REQUIRE(cli::run(config) == cli::kOk);
  const auto report = nlohmann::json::parse(slurp(config.out));
  REQUIRE(report.size() == 1);
  CHECK(report[0]["name"] == "derived-params-roundtrip");
  CHECK(report[0]["pass"] == true);

  config.only = "no-such-suite";
  CHECK(cli::run(config) == cli::kConfigError);
}

TEST_CASE("verify --only ipr narrows to the localization suites") {
  TempDir dir;
  cli::RunConfig config;
  config.command = "verify";
  config.only = "ipr";
  config.format = "json";
  config.out = (dir.path / "ipr.json").string();
  REQUIRE(cli::run(config) == cli::kOk);
  const auto report = nlohmann::json::parse(slurp(config.out));
  CHECK(report.size() >= 5);
  for (const auto& entry : report) {
    CHECK(entry["name"].get<std::string>().find("ipr") != std::string::npos);
    CHECK(entry["pass"] == true);
  }
}
