#include "srusk/config.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "srusk/errors.hpp"

namespace srusk {

namespace {

using nlohmann::json;

// ------------------------------------------------------------------
// Minimal TOML reader covering the configuration grammar: [tables],
// dotted table headers, key = value with strings, booleans, numbers and
// flat arrays, and # comments.
// ------------------------------------------------------------------

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string drop_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

json parse_toml_scalar(const std::string& tok, int lineno) {
  if (tok.empty()) throw ConfigError("toml: empty value at line " + std::to_string(lineno));
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"')
      throw ConfigError("toml: unterminated string at line " + std::to_string(lineno));
    return tok.substr(1, tok.size() - 2);
  }
  if (tok == "true") return true;
  if (tok == "false") return false;
  try {
    std::size_t used = 0;
    const double d = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    if (tok.find_first_of(".eE") == std::string::npos) {
      // integral literal
      return static_cast<std::int64_t>(std::stoll(tok));
    }
    return d;
  } catch (const std::exception&) {
    throw ConfigError("toml: cannot parse value '" + tok + "' at line " +
                      std::to_string(lineno));
  }
}

json parse_toml_value(const std::string& tok, int lineno) {
  if (!tok.empty() && tok.front() == '[') {
    if (tok.back() != ']')
      throw ConfigError("toml: unterminated array at line " + std::to_string(lineno));
    json arr = json::array();
    std::string inner = tok.substr(1, tok.size() - 2);
    std::string item;
    std::istringstream is(inner);
    while (std::getline(is, item, ',')) {
      item = strip(item);
      if (!item.empty()) arr.push_back(parse_toml_scalar(item, lineno));
    }
    return arr;
  }
  return parse_toml_scalar(tok, lineno);
}

json parse_toml(std::istream& in) {
  json root = json::object();
  json* table = &root;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(drop_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("toml: bad table header at line " + std::to_string(lineno));
      const std::string path = strip(line.substr(1, line.size() - 2));
      table = &root;
      std::istringstream is(path);
      std::string part;
      while (std::getline(is, part, '.')) {
        part = strip(part);
        if (part.empty())
          throw ConfigError("toml: bad table name at line " + std::to_string(lineno));
        table = &((*table)[part]);
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml: expected key = value at line " + std::to_string(lineno));
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("toml: empty key at line " + std::to_string(lineno));
    (*table)[key] = parse_toml_value(val, lineno);
  }
  return root;
}

// ------------------------------------------------------------------
// json -> RunConfig
// ------------------------------------------------------------------

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_interval(const json& j, const char* key, Interval& out) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 2)
    throw ConfigError(std::string("config key '") + key + "' must be [lo, hi]");
  out.lo = a[0].get<double>();
  out.hi = a[1].get<double>();
  if (!(out.lo < out.hi))
    throw ConfigError(std::string("config key '") + key + "' needs lo < hi");
}

RunConfig config_from_json(const json& j) {
  RunConfig rc;
  if (j.contains("model")) {
    const json& m = j.at("model");
    read(m, "name", rc.model.name);
    read(m, "n", rc.model.n);
    read(m, "omega", rc.model.omega);
    read(m, "N", rc.model.N);
    read(m, "K", rc.model.K);
    read(m, "closed_chain", rc.model.closed_chain);
    if (m.contains("sigma")) {
      if (m.at("sigma").is_string()) {
        rc.model.sigma = m.at("sigma").get<std::string>();
      } else {
        read(m.at("sigma"), "name", rc.model.sigma);
        read(m.at("sigma"), "c2", rc.model.sigma_c2);
        read(m.at("sigma"), "c4", rc.model.sigma_c4);
      }
    }
    if (m.contains("g")) {
      if (m.at("g").is_string()) {
        rc.model.g = m.at("g").get<std::string>();
      } else {
        read(m.at("g"), "name", rc.model.g);
        read(m.at("g"), "c", rc.model.g_c);
      }
    }
  }
  if (j.contains("initial_state")) {
    const json& s = j.at("initial_state");
    read(s, "t0", rc.initial_state.t0);
    read(s, "q", rc.initial_state.q);
    read(s, "v", rc.initial_state.v);
    read(s, "p", rc.initial_state.p);
  }
  if (j.contains("integrator")) {
    const json& i = j.at("integrator");
    read(i, "step", rc.integrator.step);
    read(i, "scheme", rc.integrator.scheme);
    read(i, "t_end", rc.integrator.t_end);
    read(i, "projection", rc.integrator.projection);
    read(i, "projection_tol", rc.integrator.projection_tol);
    read(i, "projection_max_iter", rc.integrator.projection_max_iter);
    read(i, "lambda_rule", rc.integrator.lambda_rule);
  }
  if (j.contains("analysis")) {
    const json& a = j.at("analysis");
    read(a, "max_levels", rc.analysis.max_levels);
    read(a, "rank_tol", rc.analysis.rank_tol);
    read(a, "sample_count", rc.analysis.sample_count);
    if (a.contains("sample_box")) {
      const json& b = a.at("sample_box");
      read_interval(b, "t", rc.analysis.box_t);
      read_interval(b, "q", rc.analysis.box_q);
      read_interval(b, "v", rc.analysis.box_v);
      read_interval(b, "p", rc.analysis.box_p);
    }
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    read(o, "trajectory_csv", rc.outputs.trajectory_csv);
    read(o, "chain_report", rc.outputs.chain_report);
  }
  read(j, "seed", rc.seed);

  if (rc.integrator.step <= 0.0) throw ConfigError("integrator.step must be positive");
  if (rc.integrator.projection_tol <= 0.0)
    throw ConfigError("integrator.projection_tol must be positive");
  if (rc.integrator.scheme != "rk4" && rc.integrator.scheme != "euler")
    throw ConfigError("integrator.scheme must be rk4 or euler");
  if (rc.integrator.lambda_rule != "none" && rc.integrator.lambda_rule != "zero")
    throw ConfigError("integrator.lambda_rule must be none or zero");
  if (rc.analysis.rank_tol <= 0.0) throw ConfigError("analysis.rank_tol must be positive");
  if (rc.analysis.max_levels < 1) throw ConfigError("analysis.max_levels must be >= 1");
  if (rc.analysis.sample_count < 1) throw ConfigError("analysis.sample_count must be >= 1");
  return rc;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
    j = parse_toml(in);
  } else {
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("json parse error in ") + path + ": " + e.what());
    }
  }
  return config_from_json(j);
}

LagrangianSystem build_model(const ModelConfig& mc) {
  BuiltinParams bp;
  bp.n = mc.n;
  bp.omega = mc.omega;
  bp.wave.N = mc.N;
  bp.wave.K = mc.K;
  bp.wave.closed_chain = mc.closed_chain;
  if (mc.name == "wave") {
    bp.wave.sigma = make_sigma(mc.sigma, mc.sigma_c2, mc.sigma_c4);
    bp.wave.g_pot = make_g(mc.g, mc.g_c);
  }
  return builtin(mc.name, bp);
}

std::vector<UnifiedPoint> draw_samples(const AnalysisConfig& ac, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto in = [&](const Interval& iv) { return iv.lo + (iv.hi - iv.lo) * unit(); };
  std::vector<UnifiedPoint> pts;
  pts.reserve(static_cast<std::size_t>(ac.sample_count));
  for (int k = 0; k < ac.sample_count; ++k) {
    UnifiedPoint pt;
    pt.t = in(ac.box_t);
    pt.q = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return in(ac.box_q); });
    pt.v = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return in(ac.box_v); });
    pt.p = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) { return in(ac.box_p); });
    pts.push_back(std::move(pt));
  }
  return pts;
}

UnifiedPoint build_initial_state(const InitialStateConfig& ic, const LagrangianSystem& sys) {
  const int n = sys.n;
  if (static_cast<int>(ic.q.size()) != n || static_cast<int>(ic.v.size()) != n)
    throw ConfigError("initial_state.q and .v must have the model dimension " +
                      std::to_string(n));
  UnifiedPoint pt;
  pt.t = ic.t0;
  pt.q = Eigen::Map<const Eigen::VectorXd>(ic.q.data(), n);
  pt.v = Eigen::Map<const Eigen::VectorXd>(ic.v.data(), n);
  if (ic.p.empty()) {
    pt.p = legendre_restricted(sys, pt.t, pt.q, pt.v);
  } else if (static_cast<int>(ic.p.size()) == n) {
    pt.p = Eigen::Map<const Eigen::VectorXd>(ic.p.data(), n);
  } else {
    throw ConfigError("initial_state.p must be empty or have the model dimension");
  }
  return pt;
}

IntegratorOptions build_integrator_options(const IntegratorConfig& ic) {
  IntegratorOptions opts;
  opts.step = ic.step;
  opts.scheme = (ic.scheme == "euler") ? Scheme::Euler : Scheme::RK4;
  opts.t_end = ic.t_end;
  opts.projection.enabled = ic.projection;
  opts.projection.tol = ic.projection_tol;
  opts.projection.max_iter = ic.projection_max_iter;
  opts.lambda_rule = (ic.lambda_rule == "zero") ? LambdaRule::Zero : LambdaRule::None;
  return opts;
}

AnalysisOptions build_analysis_options(const AnalysisConfig& ac) {
  AnalysisOptions opts;
  opts.max_levels = ac.max_levels;
  opts.rank_tol = ac.rank_tol;
  return opts;
}

}  // namespace srusk
