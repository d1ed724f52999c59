#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "persist/properties.hpp"
#include "persist/runner.hpp"

namespace persist {

namespace {

const std::vector<std::pair<Experiment, std::string>>& experiment_names() {
  static const std::vector<std::pair<Experiment, std::string>> names = {
      {Experiment::survival_curve, "survival_curve"},
      {Experiment::exponent_universality, "exponent_universality"},
      {Experiment::theta_monotonicity, "theta_monotonicity"},
      {Experiment::b_upper_bound, "b_upper_bound"},
      {Experiment::randpoly_curve, "randpoly_curve"},
      {Experiment::property_suite, "property_suite"},
      {Experiment::drift_invariance, "drift_invariance"},
      {Experiment::barrier_switch, "barrier_switch"},
      {Experiment::fbm_vs_liouville, "fbm_vs_liouville"},
  };
  return names;
}

std::string digest_hex(const EVP_MD* md, std::string_view data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out, &len, md, nullptr) != 1) throw Error("digest computation failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s.push_back(hex[out[i] >> 4]);
    s.push_back(hex[out[i] & 15]);
  }
  return s;
}

/// Reads keys from one JSON object, remembering which were used so that
/// leftovers can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(context_ + ": " + msg); }

  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) fail("missing key '" + key + "'");
    return j_.at(key);
  }

  const json* optional(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return nullptr;
    return &j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail("'" + key + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : (used_.insert(key), def); }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) fail("'" + key + "' must be an integer");
    return v.get<std::int64_t>();
  }
  std::int64_t integer(const std::string& key, std::int64_t def) {
    return has(key) ? integer(key) : (used_.insert(key), def);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t def) {
    if (!has(key)) {
      used_.insert(key);
      return def;
    }
    const json& v = raw(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail("'" + key + "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& def) {
    return has(key) ? string(key) : (used_.insert(key), def);
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) {
      used_.insert(key);
      return def;
    }
    const json& v = raw(key);
    if (!v.is_boolean()) fail("'" + key + "' must be true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) fail("'" + key + "' must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail("'" + key + "' must be a list of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) fail("unknown key '" + k + "'");
  }

  const std::string& context() const { return context_; }

 private:
  const json j_;
  std::string context_;
  std::set<std::string> used_;
};

template <typename F>
auto guarded(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const DomainError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

std::vector<double> horizon_grid(const json& j, const std::string& context) {
  std::vector<double> grid;
  if (j.is_array()) {
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(context + ": grid entries must be numbers");
      grid.push_back(x.get<double>());
    }
  } else if (j.is_object()) {
    Reader r(j, context);
    const double start = r.number("start");
    const double factor = r.number("factor");
    const std::int64_t count = r.integer("count");
    r.finish();
    if (!(start > 0) || !(factor > 1) || count < 1 || count > 64)
      throw ConfigError(context + ": need start > 0, factor > 1, 1 <= count <= 64");
    for (std::int64_t k = 0; k < count; ++k) grid.push_back(start * std::pow(factor, static_cast<double>(k)));
  } else {
    throw ConfigError(context + ": expected a list or {start, factor, count}");
  }
  if (grid.empty()) throw ConfigError(context + ": empty grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0)) throw ConfigError(context + ": grid entries must be positive");
    if (k > 0 && !(grid[k] > grid[k - 1])) throw ConfigError(context + ": grid must be increasing");
  }
  return grid;
}

json range_json(Reader& r, const std::string& key, std::pair<double, double> def, bool nullable = false) {
  const json* v = r.optional(key);
  if (!v) return nullable ? json(nullptr) : json::array({def.first, def.second});
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
    r.fail("'" + key + "' must be a pair [low, high]");
  const double lo = (*v)[0].get<double>(), hi = (*v)[1].get<double>();
  if (!(lo <= hi)) r.fail("'" + key + "' must satisfy low <= high");
  return json::array({lo, hi});
}

// ---------------------------------------------------------------------------
// Kernel specs

json functional_canonical(const json* j, const std::filesystem::path& base_dir, const std::string& context) {
  if (!j) return nullptr;
  Reader r(*j, context);
  const std::string kind = r.string("kind");
  if (kind == "fractional") {
    const double alpha = r.number("alpha");
    r.finish();
    guarded(context, [&] { return KernelSpec::fractional(alpha); });
    return {{"kind", "fractional"}, {"alpha", alpha}};
  }
  if (kind == "table") {
    const std::string path = r.string("path");
    Reader b(r.raw("bound"), context + ".bound");
    const KernelBound bound{b.number("k"), b.number("alpha"), b.number("beta")};
    b.finish();
    const std::filesystem::path full = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base_dir / path;
    std::ifstream in(full, std::ios::binary);
    if (!in) throw ConfigError(context + ": cannot read kernel table " + full.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string digest = git_blob_sha1(ss.str());
    const std::string declared = r.string("content_sha1", digest);
    if (declared != digest) throw ConfigError(context + ": kernel table " + path + " changed since the config was written");
    r.finish();
    const KernelSpec spec = guarded(context, [&] { return KernelSpec::load_csv(full.string(), bound); });
    // the envelope is part of the contract: check it at every sample point
    guarded(context, [&] {
      for (Eigen::Index i = 0; i < spec.table_s.size(); ++i) kernel_eval(spec, spec.table_s[i]);
      return 0;
    });
    return {{"kind", "table"},
            {"path", path},
            {"content_sha1", digest},
            {"bound", {{"k", bound.k}, {"alpha", bound.alpha}, {"beta", bound.beta}}}};
  }
  r.fail("unknown functional kind '" + kind + "'");
}

std::optional<KernelSpec> functional_from_canonical(const json& j, const std::filesystem::path& base_dir) {
  if (j.is_null()) return std::nullopt;
  if (j.at("kind") == "fractional") return KernelSpec::fractional(j.at("alpha").get<double>());
  const std::filesystem::path path = j.at("path").get<std::string>();
  const auto& b = j.at("bound");
  return KernelSpec::load_csv((path.is_absolute() ? path : base_dir / path).string(),
                              {b.at("k").get<double>(), b.at("alpha").get<double>(), b.at("beta").get<double>()});
}

// ---------------------------------------------------------------------------
// Experiment schemas. Each returns the canonical spec.

json survival_fields(Reader& r, const std::filesystem::path& base_dir, const json& default_process,
                     const json* default_functional, const json& default_barrier, const std::string& default_mode,
                     double default_step) {
  const std::string ctx = r.context();
  json out;
  out["process"] = process_to_json(process_from_json(r.optional("process") ? r.raw("process") : default_process));
  const json* f = r.optional("functional");
  if (!f && !r.has("functional") && default_functional) f = default_functional;
  out["functional"] = functional_canonical(f, base_dir, ctx + ".functional");
  out["barrier"] = barrier_to_json(barrier_from_json(r.optional("barrier") ? r.raw("barrier") : default_barrier));
  const std::string mode = r.string("j_mode", default_mode);
  if (mode != "integers" && mode != "grid") r.fail("j_mode must be 'integers' or 'grid'");
  out["j_mode"] = mode;
  const double step = r.number("grid_step", mode == "integers" ? 1.0 : default_step);
  if (!(step > 0)) r.fail("grid_step must be positive");
  out["grid_step"] = mode == "integers" ? 1.0 : step;
  // reject incompatible combinations early
  guarded(ctx, [&] {
    SurvivalSetup s;
    s.process = process_from_json(out["process"]);
    s.functional = functional_from_canonical(out["functional"], base_dir);
    s.barrier = barrier_from_json(out["barrier"]);
    s.j_mode = mode == "integers" ? JMode::integers : JMode::grid;
    s.grid_step = out["grid_step"].get<double>();
    if (std::holds_alternative<process::Fbm>(s.process.kind) || s.process.is_stationary()) {
      if (s.functional) throw ConfigError(ctx + ": a functional cannot be applied to " + s.process.name());
    }
    if ((std::holds_alternative<process::IbmPair>(s.process.kind) ||
         std::holds_alternative<process::RiemannLiouville>(s.process.kind)) &&
        s.functional && !s.functional->is_fractional())
      throw ConfigError(ctx + ": a table kernel cannot be applied to " + s.process.name());
    return 0;
  });
  return out;
}

void common_run_fields(Reader& r, json& out, std::int64_t default_trials) {
  const std::int64_t trials = r.integer("trials", default_trials);
  if (trials < 1) r.fail("trials must be >= 1");
  out["trials"] = trials;
  out["master_seed"] = r.seed("master_seed", 0);
}

// allowance_order: "auto" (functional order for walks, none for Gaussian
// samplers), null (none) or a number.
json fit_fields(Reader& r) {
  const json* j = r.optional("fit");
  json out = {{"exclude_smallest", FitOptions::kAuto}, {"allowance_order", "auto"}};
  if (!j) return out;
  Reader f(*j, r.context() + ".fit");
  const std::int64_t skip = f.integer("exclude_smallest", FitOptions::kAuto);
  if (skip < FitOptions::kAuto) f.fail("exclude_smallest must be >= 0 or -1 (auto)");
  out["exclude_smallest"] = skip;
  if (j->contains("allowance_order")) {
    const json& a = f.raw("allowance_order");
    if (a.is_null()) out["allowance_order"] = nullptr;
    else if (a.is_string() && a == "auto") out["allowance_order"] = "auto";
    else if (a.is_number() && a.get<double>() >= 0) out["allowance_order"] = a.get<double>();
    else f.fail("allowance_order must be \"auto\", null or a nonnegative number");
  }
  f.finish();
  return out;
}

json grid_field(Reader& r, const std::string& key, const json& def) {
  return horizon_grid(r.optional(key) ? r.raw(key) : def, r.context() + "." + key);
}

const json kIntegratedWalk = {{"kind", "walk"}, {"law", {{"kind", "rademacher"}}}};
const json kFractionalOne = {{"kind", "fractional"}, {"alpha", 1.0}};
const json kConstantOne = {{"kind", "constant"}, {"c", 1.0}};

json normalize(Experiment e, Reader& r, const std::filesystem::path& base_dir) {
  json out;
  out["experiment"] = to_string(e);
  const json default_T = {{"start", 256.0}, {"factor", 2.0}, {"count", 5}};
  switch (e) {
    case Experiment::survival_curve: {
      out.update(survival_fields(r, base_dir, kIntegratedWalk, &kFractionalOne, kConstantOne, "integers", 1.0));
      out["T_grid"] = grid_field(r, "T_grid", default_T);
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      const std::string mode = r.string("stream_mode", "independent");
      if (mode != "independent" && mode != "common") r.fail("stream_mode must be 'independent' or 'common'");
      out["stream_mode"] = mode;
      out["fit"] = fit_fields(r);
      out["expected_theta"] = range_json(r, "expected_theta", {0, 0}, true);
      break;
    }
    case Experiment::exponent_universality: {
      json laws = json::array();
      if (const json* l = r.optional("laws")) {
        if (!l->is_array() || l->size() < 2) r.fail("laws must be a list of at least two increment laws");
        for (const auto& x : *l) laws.push_back(guarded(r.context(), [&] { return law_to_json(law_from_json(x)); }));
      } else {
        for (const auto& law : {IncrementLaw::rademacher(), IncrementLaw::std_gaussian(),
                                IncrementLaw::centered_exponential(1.0)})
          laws.push_back(law_to_json(law));
      }
      out["laws"] = laws;
      out["functional"] = functional_canonical(r.optional("functional") ? &r.raw("functional") : &kFractionalOne,
                                               base_dir, r.context() + ".functional");
      if (out["functional"].is_null()) r.fail("functional is required");
      out["barrier"] = barrier_to_json(barrier_from_json(r.optional("barrier") ? r.raw("barrier") : kConstantOne));
      out["T_grid"] = grid_field(r, "T_grid", default_T);
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      out["max_spread"] = r.number("max_spread", 0.05);
      out["fit"] = fit_fields(r);
      out["expected_theta"] = range_json(r, "expected_theta", {0, 0}, true);
      break;
    }
    case Experiment::theta_monotonicity: {
      const std::vector<double> alphas = r.has("alphas") ? r.numbers("alphas") : std::vector<double>{0, 0.5, 1, 2};
      if (alphas.size() < 2) r.fail("alphas needs at least two orders");
      for (std::size_t i = 0; i < alphas.size(); ++i)
        if (alphas[i] < 0 || (i > 0 && !(alphas[i] > alphas[i - 1]))) r.fail("alphas must be increasing and >= 0");
      out["alphas"] = alphas;
      const std::vector<double> steps = r.has("grid_steps") ? r.numbers("grid_steps") : std::vector<double>{0.25, 0.125};
      if (steps.empty()) r.fail("grid_steps must not be empty");
      for (double h : steps)
        if (!(h > 0)) r.fail("grid_steps must be positive");
      out["grid_steps"] = steps;
      out["barrier"] = barrier_to_json(barrier_from_json(r.optional("barrier") ? r.raw("barrier") : kConstantOne));
      out["T_grid"] = grid_field(r, "T_grid", {{"start", 4.0}, {"factor", 2.0}, {"count", 6}});
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      out["fit"] = fit_fields(r);
      json expected = json::object();
      if (const json* x = r.optional("expected")) {
        if (!x->is_object()) r.fail("expected must map orders to [low, high]");
        for (const auto& [k, v] : x->items()) {
          if (!v.is_array() || v.size() != 2) r.fail("expected entries must be [low, high]");
          expected[k] = v;
        }
      }
      out["expected"] = expected;
      break;
    }
    case Experiment::b_upper_bound: {
      out["process"] = process_to_json(process_from_json(
          r.optional("process") ? r.raw("process") : json{{"kind", "stationary_gp"}, {"corr", {{"kind", "limit"}}}}));
      if (!process_from_json(out["process"]).is_stationary()) r.fail("process must be stationary_gp");
      out["T_list"] = grid_field(r, "T_list", json::array({20.0}));
      const double h = r.number("grid_step", 0.01);
      if (!(h > 0)) r.fail("grid_step must be positive");
      out["grid_step"] = h;
      out["level"] = r.number("level", 0.0);
      out["scale"] = r.number("scale", 4.0);
      out["upper"] = r.number("upper", 1.29);
      common_run_fields(r, out, 10'000);
      break;
    }
    case Experiment::randpoly_curve: {
      const std::vector<double> ns = r.has("n_grid") ? r.numbers("n_grid") : std::vector<double>{4, 8, 16, 32, 64};
      json n_grid = json::array();
      for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1 || ns[i] > 100 || ns[i] != std::floor(ns[i])) r.fail("n_grid entries must be integers in 1..100");
        if (i > 0 && !(ns[i] > ns[i - 1])) r.fail("n_grid must be increasing");
        n_grid.push_back(static_cast<int>(ns[i]));
      }
      if (n_grid.size() < 4) r.fail("n_grid needs at least 4 entries");
      out["n_grid"] = n_grid;
      common_run_fields(r, out, 10'000);
      out["expected_range"] = range_json(r, "expected_range", {0.3, 1.5});
      break;
    }
    case Experiment::property_suite: {
      const std::string suite = r.string("suite");
      out["suite"] = suite;
      if (suite == "fkg") {
        out["n_max"] = r.integer("n_max", 6);
        out["pairs"] = r.integer("pairs", 1000);
        out["master_seed"] = r.seed("master_seed", 0);
        if (out["n_max"] < 1 || out["n_max"] > 12) r.fail("n_max must lie in 1..12");
      } else if (suite == "sandwich") {
        out["paths"] = r.integer("paths", 10'000);
        out["T_list"] = grid_field(r, "T_list", json::array({3.5, 7.25}));
        out["level"] = r.number("level", 1.0);
        out["master_seed"] = r.seed("master_seed", 0);
      } else if (suite == "semigroup") {
        out["alpha"] = r.number("alpha", 0.5);
        out["beta"] = r.number("beta", 0.5);
        const std::string path = r.string("path", "ones");
        if (path != "ones" && path != "rademacher") r.fail("path must be 'ones' or 'rademacher'");
        out["path"] = path;
        out["length"] = r.integer("length", 4);
        out["h_list"] = r.has("h_list") ? json(r.numbers("h_list")) : json::array({0.125, 0.0625, 0.03125});
        const std::string inner = r.string("inner", "step");
        if (inner != "step" && inner != "linear") r.fail("inner must be 'step' or 'linear'");
        out["inner"] = inner;
        out["master_seed"] = r.seed("master_seed", 0);
        if (out["length"] < 1) r.fail("length must be >= 1");
      } else if (suite == "slepian") {
        out["n_max"] = r.integer("n_max", 50);
        out["tau_max"] = r.number("tau_max", 10.0);
        out["step"] = r.number("step", 0.01);
        if (out["n_max"] < 1 || out["n_max"] > 50) r.fail("n_max must lie in 1..50");
      } else if (suite == "drift_bracket") {
        out["dim"] = r.integer("dim", 8);
        out["cases"] = r.integer("cases", 1000);
        out["trials"] = r.integer("trials", 20'000);
        out["master_seed"] = r.seed("master_seed", 0);
        if (out["dim"] < 1 || out["dim"] > 64) r.fail("dim must lie in 1..64");
      } else {
        r.fail("unknown suite '" + suite + "' (fkg, sandwich, semigroup, slepian, drift_bracket)");
      }
      break;
    }
    case Experiment::drift_invariance: {
      out.update(survival_fields(r, base_dir, {{"kind", "brownian"}, {"sigma", 1.0}}, nullptr,
                                 {{"kind", "power_drift"}, {"c", 1.0}, {"gamma", 0.4}}, "grid", 0.25));
      if (out["barrier"]["kind"] != "power_drift") r.fail("barrier must be power_drift");
      out["T_grid"] = grid_field(r, "T_grid", default_T);
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      out["fit"] = fit_fields(r);
      out["expected_range"] = range_json(r, "expected_range", {0.45, 0.55});
      break;
    }
    case Experiment::barrier_switch: {
      out.update(survival_fields(r, base_dir, {{"kind", "riemann_liouville"}, {"alpha", 1.0}}, nullptr,
                                 {{"kind", "late_zero"}, {"t1", 1.0}}, "grid", 0.25));
      if (out["barrier"]["kind"] != "late_zero") r.fail("barrier must be late_zero");
      out["T_grid"] = grid_field(r, "T_grid", default_T);
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      out["fit"] = fit_fields(r);
      out["expected_range"] = range_json(r, "expected_range", {0.2, 0.3});
      // baseline curve compared under the equal verdict
      json base = json::object();
      if (const json* b = r.optional("baseline")) base = *b;
      Reader br(base, r.context() + ".baseline");
      json baseline = survival_fields(br, base_dir, kIntegratedWalk, &kFractionalOne, kConstantOne, "integers", 1.0);
      baseline["fit"] = fit_fields(br);
      br.finish();
      out["baseline"] = baseline;
      break;
    }
    case Experiment::fbm_vs_liouville: {
      out["hurst"] = r.number("hurst", 0.9);
      out["alpha"] = r.number("alpha", 0.4);
      guarded(r.context(), [&] {
        ProcessSpec::fbm(out["hurst"].get<double>());
        ProcessSpec::riemann_liouville(out["alpha"].get<double>());
        return 0;
      });
      out["barrier"] = barrier_to_json(barrier_from_json(r.optional("barrier") ? r.raw("barrier") : kConstantOne));
      const double h = r.number("grid_step", 0.25);
      if (!(h > 0)) r.fail("grid_step must be positive");
      out["grid_step"] = h;
      out["T_grid"] = grid_field(r, "T_grid", {{"start", 64.0}, {"factor", 2.0}, {"count", 5}});
      if (out["T_grid"].size() < 4) r.fail("T_grid needs at least 4 horizons");
      common_run_fields(r, out, 10'000);
      out["fit"] = fit_fields(r);
      out["fbm_range"] = range_json(r, "fbm_range", {0.05, 0.15});
      out["liouville_min"] = r.number("liouville_min", 0.15);
      break;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, v] : experiment_names())
    if (k == e) return v;
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, v] : experiment_names())
    if (v == name) return k;
  throw ConfigError("unknown experiment '" + name + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& [k, name] : experiment_names()) v.push_back(k);
    return v;
  }();
  return all;
}

std::string sha256_hex(std::string_view data) { return digest_hex(EVP_sha256(), data); }

std::string git_blob_sha1(std::string_view data) {
  std::string blob = "blob " + std::to_string(data.size());
  blob.push_back('\0');
  blob.append(data);
  return digest_hex(EVP_sha1(), blob);
}

IncrementLaw law_from_json(const json& j) {
  if (j.is_string()) return law_from_json(json{{"kind", j}});
  Reader r(j, "law");
  const std::string kind = r.string("kind");
  IncrementLaw law;
  if (kind == "rademacher") law = IncrementLaw::rademacher();
  else if (kind == "std_gaussian") law = IncrementLaw::std_gaussian();
  else if (kind == "centered_exponential") law = guarded("law", [&] { return IncrementLaw::centered_exponential(r.number("rate", 1.0)); });
  else if (kind == "centered_poisson") law = guarded("law", [&] { return IncrementLaw::centered_poisson(r.number("rate", 1.0)); });
  else r.fail("unknown increment law '" + kind + "'");
  r.finish();
  return law;
}

json law_to_json(const IncrementLaw& law) {
  switch (law.kind) {
    case IncrementLaw::Kind::rademacher: return {{"kind", "rademacher"}};
    case IncrementLaw::Kind::std_gaussian: return {{"kind", "std_gaussian"}};
    case IncrementLaw::Kind::centered_exponential: return {{"kind", "centered_exponential"}, {"rate", law.rate}};
    case IncrementLaw::Kind::centered_poisson: return {{"kind", "centered_poisson"}, {"rate", law.rate}};
  }
  return nullptr;
}

ProcessSpec process_from_json(const json& j) {
  Reader r(j, "process");
  const std::string kind = r.string("kind");
  ProcessSpec p = guarded("process", [&]() -> ProcessSpec {
    if (kind == "walk") return ProcessSpec::walk(law_from_json(r.optional("law") ? r.raw("law") : json("rademacher")));
    if (kind == "brownian") return ProcessSpec::brownian(r.number("sigma", 1.0));
    if (kind == "ibm_pair") return ProcessSpec::ibm_pair(r.number("sigma", 1.0));
    if (kind == "riemann_liouville") return ProcessSpec::riemann_liouville(r.number("alpha"));
    if (kind == "fbm") return ProcessSpec::fbm(r.number("hurst"));
    if (kind == "stationary_gp") {
      Reader c(r.optional("corr") ? r.raw("corr") : json{{"kind", "limit"}}, "process.corr");
      const std::string ck = c.string("kind");
      CorrModel model;
      if (ck == "limit") model = CorrModel::limit();
      else if (ck == "liouville") model = CorrModel::liouville(c.number("order"));
      else c.fail("unknown correlation model '" + ck + "'");
      c.finish();
      return ProcessSpec::stationary_gp(model);
    }
    r.fail("unknown process kind '" + kind + "'");
  });
  r.finish();
  return p;
}

json process_to_json(const ProcessSpec& p) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, process::Walk>) return {{"kind", "walk"}, {"law", law_to_json(k.law)}};
        else if constexpr (std::is_same_v<K, process::Brownian>) return {{"kind", "brownian"}, {"sigma", k.sigma}};
        else if constexpr (std::is_same_v<K, process::IbmPair>) return {{"kind", "ibm_pair"}, {"sigma", k.sigma}};
        else if constexpr (std::is_same_v<K, process::RiemannLiouville>)
          return {{"kind", "riemann_liouville"}, {"alpha", k.alpha}};
        else if constexpr (std::is_same_v<K, process::Fbm>) return {{"kind", "fbm"}, {"hurst", k.hurst}};
        else {
          json corr = k.corr.kind == CorrModel::Kind::limit ? json{{"kind", "limit"}}
                                                            : json{{"kind", "liouville"}, {"order", k.corr.order}};
          return {{"kind", "stationary_gp"}, {"corr", corr}};
        }
      },
      p.kind);
}

BarrierSpec barrier_from_json(const json& j) {
  Reader r(j, "barrier");
  const std::string kind = r.string("kind");
  BarrierSpec b = guarded("barrier", [&]() -> BarrierSpec {
    if (kind == "constant") return BarrierSpec::constant(r.number("c", 1.0));
    if (kind == "line") return BarrierSpec::line(r.number("c", 1.0), r.number("T0"));
    if (kind == "power_drift") return BarrierSpec::power_drift(r.number("c", 1.0), r.number("gamma"));
    if (kind == "late_zero") return BarrierSpec::late_zero(r.number("t1", 1.0));
    r.fail("unknown barrier kind '" + kind + "'");
  });
  r.finish();
  return b;
}

json barrier_to_json(const BarrierSpec& b) {
  switch (b.kind) {
    case BarrierSpec::Kind::constant: return {{"kind", "constant"}, {"c", b.c}};
    case BarrierSpec::Kind::line: return {{"kind", "line"}, {"c", b.c}, {"T0", b.T0}};
    case BarrierSpec::Kind::power_drift: return {{"kind", "power_drift"}, {"c", b.c}, {"gamma", b.gamma}};
    case BarrierSpec::Kind::late_zero: return {{"kind", "late_zero"}, {"t1", b.t1}};
  }
  return nullptr;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  Reader r(j, "config");
  ExperimentConfig c;
  c.experiment = experiment_from_string(r.string("experiment"));
  c.output_dir = r.string("output_dir", "runs");
  c.base_dir = base_dir;
  c.spec = normalize(c.experiment, r, base_dir);
  r.finish();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);  // comments allowed
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

json ExperimentConfig::to_json() const {
  json j = spec;
  j["output_dir"] = output_dir;
  return j;
}

std::string ExperimentConfig::canonical() const { return spec.dump(); }
std::string ExperimentConfig::config_hash() const { return sha256_hex(canonical()); }
std::string ExperimentConfig::content_hash() const { return git_blob_sha1(canonical()); }

// exposed for the experiment runner
std::optional<KernelSpec> functional_from_spec(const json& j, const std::filesystem::path& base_dir) {
  return functional_from_canonical(j, base_dir);
}

}  // namespace persist
