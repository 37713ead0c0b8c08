#include "zerohit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "zerohit/io.hpp"

namespace zerohit {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  template <class U>
  void read_unsigned(const char* key, U& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_number_unsigned()) {
      throw ConfigError(field(key) + ": expected a non-negative integer");
    }
    out = it->template get<U>();
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown key");
    }
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be positive, got " + format_number(v));
}

void require_sorted(const std::string& field, const std::vector<double>& grid) {
  if (grid.empty()) fail(field, "must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) fail(field + "[" + std::to_string(i) + "]", "must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) fail(field, "must be strictly increasing");
  }
}

void require_deltas(const std::string& field, const std::vector<double>& deltas) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] <= 0.0)) {
      fail(field + "[" + std::to_string(i) + "]",
           "Bessel dimension delta must be <= 0, got " + format_number(deltas[i]));
    }
  }
}

void require_kappas(const std::string& field, const std::vector<double>& kappas) {
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    if (!(kappas[i] >= 0.0 && kappas[i] <= 4.0)) {
      fail(field + "[" + std::to_string(i) + "]",
           "kappa must lie in [0, 4], got " + format_number(kappas[i]));
    }
  }
}

json flow_json(const FlowConfig& f) {
  return {{"max_step", f.max_step},
          {"step_factor", f.step_factor},
          {"hit_threshold", f.hit_threshold},
          {"bracket_tolerance", f.bracket_tolerance},
          {"cap", f.cap}};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "");
  cfg.schema_version = -1;
  top.read("schema_version", cfg.schema_version);
  if (cfg.schema_version != kSchemaVersion) {
    fail("schema_version", "must be " + std::to_string(kSchemaVersion));
  }
  top.read_unsigned("seed", cfg.seed);
  if (const json* j = top.child("flow")) {
    Section s(*j, "flow");
    s.read("max_step", cfg.flow.max_step);
    s.read("step_factor", cfg.flow.step_factor);
    s.read("hit_threshold", cfg.flow.hit_threshold);
    s.read("bracket_tolerance", cfg.flow.bracket_tolerance);
    s.read("cap", cfg.flow.cap);
    s.finish();
  }
  if (const json* j = top.child("complex_flow")) {
    Section s(*j, "complex_flow");
    s.read("max_step", cfg.complex_flow.max_step);
    s.read("step_factor", cfg.complex_flow.step_factor);
    s.finish();
  }
  if (const json* j = top.child("verify_law")) {
    Section s(*j, "verify_law");
    s.read("deltas", cfg.verify_law.deltas);
    s.read_unsigned("n_paths", cfg.verify_law.n_paths);
    s.read("probabilities", cfg.verify_law.probabilities);
    s.finish();
  }
  if (const json* j = top.child("field")) {
    Section s(*j, "field");
    s.read("xs", cfg.field.xs);
    s.read("deltas", cfg.field.deltas);
    s.read_unsigned("paths", cfg.field.paths);
    s.read("refine_levels", cfg.field.refine_levels);
    s.read("svg", cfg.field.svg);
    s.finish();
  }
  if (const json* j = top.child("weld")) {
    Section s(*j, "weld");
    s.read("kappas", cfg.weld.kappas);
    s.read("xs", cfg.weld.xs);
    s.read("psi_tolerance", cfg.weld.psi_tolerance);
    s.read("svg", cfg.weld.svg);
    s.finish();
  }
  if (const json* j = top.child("walk")) {
    Section s(*j, "walk");
    s.read("x", cfg.walk.x);
    s.read_unsigned("k", cfg.walk.k);
    s.read_unsigned("paths", cfg.walk.paths);
    s.read("lambdas", cfg.walk.lambdas);
    s.read("sum_n", cfg.walk.sum_n);
    s.read_unsigned("sum_replicates", cfg.walk.sum_replicates);
    s.read_unsigned("event_replicates", cfg.walk.event_replicates);
    if (const json* ev = s.child("events")) {
      if (!ev->is_array()) fail("walk.events", "expected an array");
      cfg.walk.events.clear();
      for (std::size_t i = 0; i < ev->size(); ++i) {
        Section e((*ev)[i], "walk.events[" + std::to_string(i) + "]");
        EventSpec spec;
        e.read("x", spec.x);
        e.read_unsigned("k", spec.k);
        e.read("lambda", spec.lambda);
        e.finish();
        cfg.walk.events.push_back(spec);
      }
    }
    s.finish();
  }
  if (const json* j = top.child("trace")) {
    Section s(*j, "trace");
    s.read("kappa", cfg.trace.kappa);
    s.read_unsigned("points", cfg.trace.points);
    s.read("y_probe", cfg.trace.y_probe);
    s.read("tolerance", cfg.trace.tolerance);
    s.read("y_floor", cfg.trace.y_floor);
    s.read("svg", cfg.trace.svg);
    s.finish();
  }
  top.finish();
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  require_positive("flow.max_step", cfg.flow.max_step);
  require_positive("flow.step_factor", cfg.flow.step_factor);
  if (!(cfg.flow.step_factor < 0.25)) fail("flow.step_factor", "must be below 0.25");
  require_positive("flow.hit_threshold", cfg.flow.hit_threshold);
  require_positive("flow.bracket_tolerance", cfg.flow.bracket_tolerance);
  require_positive("flow.cap", cfg.flow.cap);
  require_positive("complex_flow.max_step", cfg.complex_flow.max_step);
  require_positive("complex_flow.step_factor", cfg.complex_flow.step_factor);

  const VerifyLawSettings& v = cfg.verify_law;
  if (v.deltas.empty()) fail("verify_law.deltas", "must be non-empty");
  require_deltas("verify_law.deltas", v.deltas);
  if (v.n_paths < 2) fail("verify_law.n_paths", "must be at least 2");
  require_sorted("verify_law.probabilities", v.probabilities);
  if (!(v.probabilities.front() > 0.0 && v.probabilities.back() < 1.0)) {
    fail("verify_law.probabilities", "must lie in (0, 1)");
  }

  const FieldSettings& f = cfg.field;
  require_sorted("field.xs", f.xs);
  require_sorted("field.deltas", f.deltas);
  require_deltas("field.deltas", f.deltas);
  if (f.paths == 0) fail("field.paths", "must be positive");
  if (f.refine_levels < 1 || f.refine_levels > 6) fail("field.refine_levels", "must lie in [1, 6]");

  const WeldSettings& w = cfg.weld;
  require_sorted("weld.kappas", w.kappas);
  require_kappas("weld.kappas", w.kappas);
  require_sorted("weld.xs", w.xs);
  if (w.xs.front() < 0.0) fail("weld.xs", "entries must be >= 0");
  require_positive("weld.psi_tolerance", w.psi_tolerance);

  const WalkSettings& k = cfg.walk;
  require_positive("walk.x", k.x);
  if (k.k == 0) fail("walk.k", "must be positive");
  if (k.paths == 0) fail("walk.paths", "must be positive");
  require_sorted("walk.lambdas", k.lambdas);
  require_positive("walk.lambdas[0]", k.lambdas.front());
  if (k.sum_n.empty()) fail("walk.sum_n", "must be non-empty");
  for (std::size_t i = 0; i < k.sum_n.size(); ++i) {
    if (k.sum_n[i] < 2) fail("walk.sum_n[" + std::to_string(i) + "]", "must be >= 2");
  }
  if (k.sum_replicates < 4) fail("walk.sum_replicates", "must be at least 4");
  if (k.event_replicates == 0) fail("walk.event_replicates", "must be positive");
  for (std::size_t i = 0; i < k.events.size(); ++i) {
    const std::string p = "walk.events[" + std::to_string(i) + "]";
    require_positive(p + ".x", k.events[i].x);
    require_positive(p + ".lambda", k.events[i].lambda);
    if (k.events[i].k == 0) fail(p + ".k", "must be positive");
  }

  const TraceSettings& t = cfg.trace;
  if (!(t.kappa >= 0.0 && t.kappa <= 4.0)) {
    fail("trace.kappa", "kappa must lie in [0, 4], got " + format_number(t.kappa));
  }
  if (t.points < 2) fail("trace.points", "must be at least 2");
  if (!(t.y_probe > 0.0 && t.y_probe <= 0.1)) fail("trace.y_probe", "must lie in (0, 0.1]");
  require_positive("trace.tolerance", t.tolerance);
  require_positive("trace.y_floor", t.y_floor);
}

std::string canonical_json(const RunConfig& cfg) {
  json events = json::array();
  for (const EventSpec& e : cfg.walk.events) {
    events.push_back({{"x", e.x}, {"k", e.k}, {"lambda", e.lambda}});
  }
  const json j = {
      {"schema_version", cfg.schema_version},
      {"seed", cfg.seed},
      {"flow", flow_json(cfg.flow)},
      {"complex_flow",
       {{"max_step", cfg.complex_flow.max_step},
        {"step_factor", cfg.complex_flow.step_factor}}},
      {"verify_law",
       {{"deltas", cfg.verify_law.deltas},
        {"n_paths", cfg.verify_law.n_paths},
        {"probabilities", cfg.verify_law.probabilities}}},
      {"field",
       {{"xs", cfg.field.xs},
        {"deltas", cfg.field.deltas},
        {"paths", cfg.field.paths},
        {"refine_levels", cfg.field.refine_levels},
        {"svg", cfg.field.svg}}},
      {"weld",
       {{"kappas", cfg.weld.kappas},
        {"xs", cfg.weld.xs},
        {"psi_tolerance", cfg.weld.psi_tolerance},
        {"svg", cfg.weld.svg}}},
      {"walk",
       {{"x", cfg.walk.x},
        {"k", cfg.walk.k},
        {"paths", cfg.walk.paths},
        {"lambdas", cfg.walk.lambdas},
        {"sum_n", cfg.walk.sum_n},
        {"sum_replicates", cfg.walk.sum_replicates},
        {"events", events},
        {"event_replicates", cfg.walk.event_replicates}}},
      {"trace",
       {{"kappa", cfg.trace.kappa},
        {"points", cfg.trace.points},
        {"y_probe", cfg.trace.y_probe},
        {"tolerance", cfg.trace.tolerance},
        {"y_floor", cfg.trace.y_floor},
        {"svg", cfg.trace.svg}}},
  };
  return j.dump(2);
}

std::string config_hash(const RunConfig& cfg) {
  return fnv1a_hex(canonical_json(cfg));
}

}  // namespace zerohit
