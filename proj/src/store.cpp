#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "persist/runner.hpp"

namespace persist {

namespace {

std::vector<std::filesystem::path> run_dirs(const std::filesystem::path& store) {
  if (!std::filesystem::is_directory(store)) throw Error("store " + store.string() + " does not exist");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(store))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "results.jsonl")) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::vector<json> read_records(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("cannot read " + file.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(file.string() + ": " + e.what());
    }
  }
  return out;
}

std::string format_number(const json& v) {
  if (v.is_number_integer()) return v.dump();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

void flatten(const json& j, const std::string& prefix, std::map<std::string, std::string>& row) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, row);
  } else if (j.is_string()) {
    row[prefix] = j.get<std::string>();
  } else if (j.is_number()) {
    row[prefix] = format_number(j);
  } else if (j.is_boolean()) {
    row[prefix] = j.get<bool>() ? "true" : "false";
  } else if (j.is_null()) {
    row[prefix] = "";
  } else {
    row[prefix] = j.dump();  // arrays stay as JSON text
  }
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::size_t export_csv(const std::filesystem::path& store, const std::filesystem::path& out, const Filter& filter) {
  std::vector<std::map<std::string, std::string>> rows;
  std::set<std::string> columns;
  for (const auto& dir : run_dirs(store)) {
    for (const json& r : read_records(dir / "results.jsonl")) {
      std::map<std::string, std::string> row;
      flatten(r, "", row);
      row["run"] = dir.filename().string();
      bool keep = true;
      for (const auto& [k, v] : filter) {
        const auto it = row.find(k);
        keep = keep && it != row.end() && it->second == v;
      }
      if (!keep) continue;
      for (const auto& [k, v] : row) columns.insert(k);
      rows.push_back(std::move(row));
    }
  }
  // the embedded config is large and identical per run; keep it out of the table
  std::vector<std::string> header;
  for (const auto& c : columns)
    if (c.rfind("config.", 0) != 0) header.push_back(c);
  if (header.empty()) header = {"config_hash", "content_hash", "experiment", "label", "record", "run"};

  std::ofstream os(out, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot write " + out.string());
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << quote(header[i]);
  os << "\r\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto it = row.find(header[i]);
      os << (i ? "," : "") << (it == row.end() ? "" : quote(it->second));
    }
    os << "\r\n";
  }
  if (!os) throw Error("write failed for " + out.string());
  return rows.size();
}

std::vector<RunSummary> list_runs(const std::filesystem::path& store) {
  std::vector<RunSummary> out;
  for (const auto& dir : run_dirs(store)) {
    RunSummary s;
    s.directory = dir.filename().string();
    const auto manifest_path = dir / "manifest.json";
    if (std::ifstream in(manifest_path); in) {
      try {
        const json m = json::parse(in);
        s.experiment = m.value("experiment", "");
        s.config_hash = m.value("config_hash", "");
        s.records = m.value("records", std::size_t{0});
        s.all_pass = m.value("all_pass", false);
      } catch (const json::exception&) {
        s.experiment = "(unreadable manifest)";
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace persist
