#include "lipwalk/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lipwalk/error.hpp"

namespace lipwalk {

using nlohmann::json;

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  fail(ErrorKind::kInvalidConfig, path + ": " + what);
}

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown fields.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_, "expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& get(const std::string& key) {
    if (!has(key)) bad(path_, "missing required field '" + key + "'");
    return j_.at(key);
  }
  std::string at(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) bad(path_ + "." + it.key(), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

// A weight is either a JSON number or an exact "p/q" string.
struct Weight {
  double value = 0.0;
  std::optional<Rational> exact;
};

Weight as_weight(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), std::nullopt};
  if (j.is_string()) {
    try {
      Rational r = Rational::parse(j.get<std::string>());
      return {r.to_double(), r};
    } catch (const Error& e) {
      bad(path, e.what());
    }
  }
  bad(path, "expected a number or a \"p/q\" string");
}

LatticePoint as_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a nonempty integer array");
  std::vector<std::int64_t> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(as_int(j[i], path + "[" + std::to_string(i) + "]"));
  if (c.size() > static_cast<std::size_t>(kMaxDim)) bad(path, "dimension exceeds " + std::to_string(kMaxDim));
  return LatticePoint(std::span<const std::int64_t>(c));
}

StepSet parse_steps(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of steps");
  std::vector<LatticePoint> s;
  for (std::size_t i = 0; i < j.size(); ++i) s.push_back(as_point(j[i], path + "[" + std::to_string(i) + "]"));
  try {
    return StepSet(std::move(s));
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

TransitionKernel parse_kernel(const json& j) {
  Reader r(j, "kernel");
  const std::string kind = as_string(r.get("kind"), r.at("kind"));
  if (kind == "srw") {
    const int d = static_cast<int>(as_int(r.get("dimension"), r.at("dimension")));
    if (d < 1 || d > kMaxDim) bad(r.at("dimension"), "must lie in 1.." + std::to_string(kMaxDim));
    r.finish();
    return TransitionKernel::simple_random_walk(d);
  }
  if (kind == "formula") {
    const int d = static_cast<int>(as_int(r.get("dimension"), r.at("dimension")));
    const double amp = as_double(r.get("amplitude"), r.at("amplitude"));
    std::vector<double> wave;
    const json& w = r.get("wavenumber");
    if (!w.is_array()) bad(r.at("wavenumber"), "expected an array");
    for (std::size_t i = 0; i < w.size(); ++i) wave.push_back(as_double(w[i], r.at("wavenumber")));
    r.finish();
    return TransitionKernel::cosine(d, amp, std::move(wave));
  }

  StepSet steps = parse_steps(r.get("steps"), r.at("steps"));
  const Weight alpha = as_weight(r.get("alpha"), r.at("alpha"));
  auto weight_row = [&](const json& row, const std::string& path, bool& exact) {
    if (!row.is_array()) bad(path, "expected an array of weights");
    if (row.size() != steps.size()) bad(path, "expected " + std::to_string(steps.size()) + " weights");
    std::vector<Weight> out;
    for (std::size_t i = 0; i < row.size(); ++i) {
      out.push_back(as_weight(row[i], path + "[" + std::to_string(i) + "]"));
      exact = exact && out.back().exact.has_value();
    }
    return out;
  };
  // Weights are listed in the order the steps were written; the StepSet is
  // sorted, so reorder through the original list.
  std::vector<std::size_t> order;
  {
    const json& sj = j.at("steps");
    for (std::size_t i = 0; i < sj.size(); ++i) order.push_back(*steps.index_of(as_point(sj[i], "")));
  }
  auto reorder = [&](const std::vector<Weight>& w) {
    std::vector<Weight> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[order[i]] = w[i];
    return out;
  };
  auto doubles = [](const std::vector<Weight>& w) {
    std::vector<double> v;
    for (const auto& x : w) v.push_back(x.value);
    return v;
  };
  auto rationals = [](const std::vector<Weight>& w) {
    std::vector<Rational> v;
    for (const auto& x : w) v.push_back(*x.exact);
    return v;
  };

  if (kind == "homogeneous") {
    bool exact = alpha.exact.has_value();
    auto w = reorder(weight_row(r.get("weights"), r.at("weights"), exact));
    r.finish();
    if (exact) return TransitionKernel::homogeneous_exact(std::move(steps), rationals(w), *alpha.exact);
    return TransitionKernel::homogeneous(std::move(steps), doubles(w), alpha.value);
  }
  if (kind == "periodic") {
    std::vector<std::int64_t> period;
    const json& pj = r.get("period");
    if (!pj.is_array()) bad(r.at("period"), "expected an integer array");
    for (std::size_t i = 0; i < pj.size(); ++i) period.push_back(as_int(pj[i], r.at("period")));
    const json& tj = r.get("weights");
    if (!tj.is_array()) bad(r.at("weights"), "expected one weight array per residue class");
    bool exact = alpha.exact.has_value();
    std::vector<std::vector<Weight>> tables;
    for (std::size_t i = 0; i < tj.size(); ++i) {
      tables.push_back(reorder(weight_row(tj[i], r.at("weights") + "[" + std::to_string(i) + "]", exact)));
    }
    r.finish();
    try {
      if (exact) {
        std::vector<std::vector<Rational>> t;
        for (const auto& row : tables) t.push_back(rationals(row));
        return TransitionKernel::periodic_exact(std::move(steps), std::move(period), std::move(t), *alpha.exact);
      }
      std::vector<std::vector<double>> t;
      for (const auto& row : tables) t.push_back(doubles(row));
      return TransitionKernel::periodic(std::move(steps), std::move(period), std::move(t), alpha.value);
    } catch (const Error& e) {
      bad("kernel", e.what());
    }
  }
  bad(r.at("kind"), "unknown kernel kind '" + kind + "' (expected srw, homogeneous, periodic or formula)");
}

LipschitzProfile parse_profile(const json& j, int dim) {
  Reader r(j, "domain.profile");
  const std::string kind = as_string(r.get("kind"), r.at("kind"));
  double A = 0.0;
  if (r.has("lipschitz_constant")) A = as_double(j.at("lipschitz_constant"), r.at("lipschitz_constant"));
  auto rational = [&](const json& v, const std::string& path) {
    Weight w = as_weight(v, path);
    if (w.exact) return *w.exact;
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    bad(path, "profile values must be integers or \"p/q\" strings (exact membership)");
  };
  try {
    if (kind == "flat" || kind == "constant-zero") {
      r.finish();
      return LipschitzProfile::flat(dim);
    }
    if (kind == "cone") {
      Rational s = rational(r.get("slope"), r.at("slope"));
      r.finish();
      auto p = LipschitzProfile::cone(dim, s);
      if (A > 0.0 && A + 1e-12 < p.intrinsic_lipschitz_bound()) bad(r.at("lipschitz_constant"), "below the slope bound");
      return p;
    }
    if (kind == "piecewise-linear") {
      const json& aj = r.get("axes");
      if (!aj.is_array()) bad(r.at("axes"), "expected an array of axes");
      std::vector<LipschitzProfile::Axis> axes;
      for (std::size_t i = 0; i < aj.size(); ++i) {
        Reader ar(aj[i], r.at("axes") + "[" + std::to_string(i) + "]");
        LipschitzProfile::Axis ax;
        const json& b = ar.get("breakpoints");
        const json& s = ar.get("slopes");
        if (!b.is_array() || !s.is_array()) bad(ar.at("breakpoints"), "breakpoints and slopes must be arrays");
        for (const auto& v : b) ax.breakpoints.push_back(rational(v, ar.at("breakpoints")));
        for (const auto& v : s) ax.slopes.push_back(rational(v, ar.at("slopes")));
        ar.finish();
        axes.push_back(std::move(ax));
      }
      r.finish();
      return LipschitzProfile::piecewise_linear(dim, std::move(axes), A);
    }
    if (kind == "table") {
      const std::int64_t w = as_int(r.get("half_width"), r.at("half_width"));
      const json& vj = r.get("values");
      if (!vj.is_array()) bad(r.at("values"), "expected an array");
      std::vector<Rational> vals;
      for (const auto& v : vj) vals.push_back(rational(v, r.at("values")));
      r.finish();
      return LipschitzProfile::table(dim, w, std::move(vals), A);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidConfig) throw;
    bad("domain.profile", e.what());
  }
  bad(r.at("kind"), "unknown profile kind '" + kind + "' (expected flat, cone, piecewise-linear or table)");
}

std::vector<std::string> string_list(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_array() || j.empty()) bad(path, "expected a string or a nonempty array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(as_string(v, path));
  return out;
}

void read_fields(ExperimentConfig& cfg, const json& root) {
  Reader r(root, "config");
  if (r.has("experiment")) cfg.experiment = as_string(root.at("experiment"), "config.experiment");
  cfg.kernel = parse_kernel(r.get("kernel"));
  {
    Reader d(r.get("domain"), "domain");
    const int dim = static_cast<int>(as_int(d.get("dimension"), d.at("dimension")));
    if (dim != cfg.kernel.dim()) bad(d.at("dimension"), "differs from the kernel dimension");
    LipschitzProfile p = LipschitzProfile::flat(dim);
    if (d.has("profile")) p = parse_profile(root.at("domain").at("profile"), dim);
    d.finish();
    cfg.domain = LipschitzDomain(std::move(p), cfg.kernel.steps());
  }
  if (r.has("grid")) {
    Reader g(root.at("grid"), "grid");
    for (const char* key : {"R", "K", "r", "radii", "n"}) {
      if (!g.has(key)) continue;
      const json& arr = root.at("grid").at(key);
      if (!arr.is_array() || arr.empty()) bad(g.at(key), "expected a nonempty array of numbers");
      std::vector<double> v;
      for (const auto& x : arr) v.push_back(as_double(x, g.at(key)));
      cfg.grid[key] = std::move(v);
    }
    g.finish();
  }
  if (r.has("tolerance")) {
    cfg.tolerance = as_double(root.at("tolerance"), "config.tolerance");
    if (!(cfg.tolerance > 0.0)) bad("config.tolerance", "must be positive");
  }
  if (r.has("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      bad("config.seed", "expected a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (r.has("threads")) {
    auto t = as_int(root.at("threads"), "config.threads");
    if (t < 0) bad("config.threads", "must be >= 0");
    cfg.threads = static_cast<unsigned>(t);
  }
  if (r.has("paths")) {
    auto p = as_int(root.at("paths"), "config.paths");
    if (p < 1) bad("config.paths", "must be >= 1");
    cfg.paths = static_cast<std::uint64_t>(p);
  }
  auto point = [&](const char* key, std::optional<LatticePoint>& dst) {
    if (!r.has(key)) return;
    LatticePoint p = as_point(root.at(key), std::string("config.") + key);
    if (p.dim() != cfg.kernel.dim()) bad(std::string("config.") + key, "dimension differs from the kernel");
    dst = p;
  };
  point("anchor", cfg.anchor);
  point("reference", cfg.reference);
  point("start", cfg.start);
  if (r.has("region")) cfg.region = as_string(root.at("region"), "config.region");
  if (r.has("data")) cfg.data = as_string(root.at("data"), "config.data");
  if (r.has("target")) cfg.target = as_string(root.at("target"), "config.target");
  if (r.has("outer_data")) cfg.outer_data = string_list(root.at("outer_data"), "config.outer_data");
  if (r.has("inner_radius")) cfg.inner_radius = as_int(root.at("inner_radius"), "config.inner_radius");
  if (r.has("escape")) {
    const json& e = root.at("escape");
    if (!e.is_array()) bad("config.escape", "expected an array of directions");
    cfg.escape.clear();
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string path = "config.escape[" + std::to_string(i) + "]";
      cfg.escape.push_back(as_point(e[i], path));
      if (cfg.escape.back().dim() != cfg.kernel.dim()) bad(path, "dimension differs from the kernel");
    }
  }
  if (r.has("window")) {
    cfg.window = as_int(root.at("window"), "config.window");
    if (cfg.window < 1) bad("config.window", "must be >= 1");
  }
  if (r.has("band")) {
    cfg.band = as_double(root.at("band"), "config.band");
    if (!(cfg.band >= 1.0)) bad("config.band", "must be >= 1");
  }
  if (r.has("outputs")) {
    const json& o = root.at("outputs");
    Reader orr(o, "outputs");
    for (const char* key : {"field", "log", "report", "estimate"}) {
      if (orr.has(key)) cfg.outputs[key] = as_string(o.at(key), orr.at(key));
    }
    orr.finish();
  }
  r.finish();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << "JSON parse error at line " << line << ", column " << col << ": " << e.what();
    fail(ErrorKind::kInvalidConfig, msg.str());
  }
}

void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

void refresh_digest(ExperimentConfig& cfg, const json& doc) {
  cfg.canonical = doc.dump();
  cfg.digest = fnv1a64_hex(cfg.canonical);
}

}  // namespace

ExperimentConfig::ExperimentConfig()
    : kernel(TransitionKernel::simple_random_walk(1)),
      domain(LipschitzProfile::flat(1), StepSet::nearest_neighbour(1)) {}

LatticePoint ExperimentConfig::anchor_or_origin() const { return anchor ? *anchor : LatticePoint(kernel.dim()); }

LatticePoint ExperimentConfig::reference_or_default() const {
  if (reference) return *reference;
  return anchor_or_origin() + LatticePoint::unit(kernel.dim(), 0) * 8;
}

std::string ExperimentConfig::output(const std::string& key, const std::string& fallback) const {
  auto it = outputs.find(key);
  return it == outputs.end() ? fallback : it->second;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc = parse_json(text);
  ExperimentConfig cfg;
  read_fields(cfg, doc);
  refresh_digest(cfg, doc);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(ExperimentConfig& cfg, const std::string& overrides_json) {
  json over = parse_json(overrides_json);
  if (!over.is_object()) fail(ErrorKind::kInvalidConfig, "overrides must be a JSON object");
  if (over.empty()) return;
  json doc = parse_json(cfg.canonical);
  merge(doc, over);
  // Re-read the whole merged document so cross-field checks still apply.
  ExperimentConfig fresh;
  read_fields(fresh, doc);
  refresh_digest(fresh, doc);
  cfg = std::move(fresh);
}

}  // namespace lipwalk
