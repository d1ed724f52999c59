#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "persist/runner.hpp"

using namespace persist;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("persist_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json small_curve(const std::string& out) {
  return {{"experiment", "survival_curve"},
          {"T_grid", {{"start", 16}, {"factor", 2}, {"count", 5}}},
          {"trials", 4000},
          {"master_seed", 42},
          {"output_dir", out}};
}

// RFC 4180 reader, enough for the exporter's output.
std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(field);
      field.clear();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      rows.back().push_back(field);
      field.clear();
      rows.emplace_back();
      ++i;
    } else {
      field += c;
    }
  }
  if (rows.back().empty()) rows.pop_back();
  return rows;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("hash functions") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("config normalization") {
  const ExperimentConfig c = ExperimentConfig::from_json(small_curve("runs"));
  CHECK(c.experiment == Experiment::survival_curve);
  CHECK(c.spec["T_grid"] == json({16.0, 32.0, 64.0, 128.0, 256.0}));
  CHECK(c.spec.contains("process"));
  CHECK(c.spec.contains("fit"));
  CHECK_FALSE(c.spec.contains("output_dir"));
  // the canonical form is a fixed point
  const ExperimentConfig again = ExperimentConfig::from_json(c.to_json());
  CHECK(again == c);
  CHECK(again.config_hash() == c.config_hash());
  CHECK(c.config_hash().size() == 64);
  CHECK(c.content_hash() == git_blob_sha1(c.canonical()));
  // the output directory does not enter the hash
  CHECK(ExperimentConfig::from_json(small_curve("elsewhere")).config_hash() == c.config_hash());
  json other = small_curve("runs");
  other["master_seed"] = 43;
  CHECK(ExperimentConfig::from_json(other).config_hash() != c.config_hash());
}

TEST_CASE("config errors") {
  json bad = small_curve("runs");
  bad["bogus"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"experiment", "nope"}}), ConfigError);
  json stationary = small_curve("runs");
  stationary["process"] = {{"kind", "stationary_gp"}};
  stationary["functional"] = {{"kind", "fractional"}, {"alpha", 1}};
  stationary["j_mode"] = "grid";
  stationary["grid_step"] = 0.1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(stationary), ConfigError);
  json few = small_curve("runs");
  few["T_grid"] = {1, 2, 3};
  CHECK_THROWS_AS(ExperimentConfig::from_json(few), ConfigError);
  json neg = small_curve("runs");
  neg["trials"] = -5;
  CHECK_THROWS_AS(ExperimentConfig::from_json(neg), ConfigError);
}

TEST_CASE("config files allow comments") {
  TempDir tmp;
  const fs::path file = tmp.path / "c.json";
  std::ofstream(file) << "// survival curve\n{\"experiment\": \"survival_curve\", /* inline */ \"trials\": 100}\n";
  const ExperimentConfig c = ExperimentConfig::load(file);
  CHECK(c.spec["trials"] == 100);
  CHECK(c.base_dir == tmp.path);
}

TEST_CASE("every experiment kind has defaults") {
  for (Experiment e : all_experiments()) {
    CAPTURE(to_string(e));
    json j{{"experiment", to_string(e)}};
    if (e == Experiment::property_suite) j["suite"] = "fkg";
    const ExperimentConfig c = ExperimentConfig::from_json(j);
    CHECK(experiment_from_string(to_string(e)) == e);
    CHECK(ExperimentConfig::from_json(c.to_json()) == c);
  }
}

TEST_CASE("run writes a self-describing store") {
  TempDir tmp;
  const ExperimentConfig c = ExperimentConfig::from_json(small_curve((tmp.path / "store").string()));
  const RunResult r = run_experiment(c);
  CHECK(r.directory == tmp.path / "store" / c.config_hash().substr(0, 16));
  const std::string lines = slurp(r.directory / "results.jsonl");
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 5);
  CHECK(r.records.size() == 5);
  CHECK(fs::exists(r.directory / "config.json"));

  const json manifest = json::parse(slurp(r.directory / "manifest.json"));
  CHECK(manifest["config_hash"] == c.config_hash());
  CHECK(manifest["content_hash"] == c.content_hash());
  CHECK(manifest["records"] == 5);
  CHECK(manifest["fits"].size() == 1);
  CHECK(manifest["slack"]["z"] == 2.0);
  CHECK(manifest["slack"].contains("log_correction_allowance"));
  CHECK(manifest["slack"].contains("grid_step"));
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("wall_time_seconds"));

  // rerun in a fresh store: byte-identical records
  const ExperimentConfig c2 = ExperimentConfig::from_json(small_curve((tmp.path / "again").string()));
  const RunResult r2 = run_experiment(c2);
  CHECK(slurp(r2.directory / "results.jsonl") == lines);

  // each line reproduces from its own embedded config
  std::istringstream in(lines);
  std::string line;
  std::getline(in, line);
  const json record = json::parse(line);
  CHECK(record["config_hash"] == c.config_hash());
  json embedded = record["config"];
  const RunResult replay = evaluate_experiment(ExperimentConfig::from_json(embedded));
  CHECK(replay.records.front().dump() == record.dump());
}

TEST_CASE("worker count does not change the records") {
  TempDir tmp;
  json j = small_curve((tmp.path / "a").string());
  j["trials"] = 25'000;
  setenv("PERSIST_WORKERS", "1", 1);
  const RunResult a = run_experiment(ExperimentConfig::from_json(j));
  j["output_dir"] = (tmp.path / "b").string();
  setenv("PERSIST_WORKERS", "3", 1);
  const RunResult b = run_experiment(ExperimentConfig::from_json(j));
  unsetenv("PERSIST_WORKERS");
  CHECK(slurp(a.directory / "results.jsonl") == slurp(b.directory / "results.jsonl"));
}

TEST_CASE("CSV export") {
  TempDir tmp;
  const fs::path store = tmp.path / "store";
  run_experiment(ExperimentConfig::from_json(small_curve(store.string())));
  json randpoly{{"experiment", "randpoly_curve"}, {"trials", 500}, {"output_dir", store.string()}};
  run_experiment(ExperimentConfig::from_json(randpoly));

  const fs::path all = tmp.path / "all.csv";
  CHECK(export_csv(store, all) == 10);
  const auto rows = read_csv(slurp(all));
  REQUIRE(rows.size() == 11);
  const auto& header = rows[0];
  for (const auto& row : rows) CHECK(row.size() == header.size());
  const auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    REQUIRE(it != header.end());
    return static_cast<std::size_t>(it - header.begin());
  };

  // round trip: every cell reparses to the JSON value it came from
  const RunResult curve = evaluate_experiment(ExperimentConfig::from_json(small_curve(store.string())));
  int matched = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][col("experiment")] != "survival_curve") continue;
    const json& rec = curve.records.at(static_cast<std::size_t>(matched++));
    for (const auto& [key, value] : rec["fields"].items()) {
      const std::string cell = rows[i][col("fields." + key)];
      if (value.is_number_unsigned()) CHECK(std::stoull(cell) == value.get<std::uint64_t>());
      else if (value.is_number_integer()) CHECK(std::stoll(cell) == value.get<std::int64_t>());
      else if (value.is_number()) CHECK(std::strtod(cell.c_str(), nullptr) == value.get<double>());
      else if (value.is_string()) CHECK(cell == value.get<std::string>());
    }
    CHECK(rows[i][col("label")] == rec["label"].get<std::string>());
  }
  CHECK(matched == 5);

  // filter
  const fs::path only = tmp.path / "only.csv";
  CHECK(export_csv(store, only, {{"experiment", "survival_curve"}}) == 5);
  const auto filtered = read_csv(slurp(only));
  CHECK(filtered.size() == 6);
  for (std::size_t i = 1; i < filtered.size(); ++i) {
    const auto it = std::find(filtered[0].begin(), filtered[0].end(), "experiment");
    CHECK(filtered[i][static_cast<std::size_t>(it - filtered[0].begin())] == "survival_curve");
  }
  const fs::path none = tmp.path / "none.csv";
  CHECK(export_csv(store, none, {{"experiment", "absent"}}) == 0);
  CHECK(read_csv(slurp(none)).size() == 1);

  const auto runs = list_runs(store);
  CHECK(runs.size() == 2);
  CHECK_THROWS(export_csv(tmp.path / "missing", none));
}

}
