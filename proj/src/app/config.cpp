#include "randhall/app/config.hpp"

#include "randhall/errors.hpp"
#include "randhall/mild_solver.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace randhall::app {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kSections{"system", "grid",   "data",        "exponents", "time",     "picard",
                                      "ensemble", "kernels", "beta", "contraction", "simulate", "output"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(v))
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& where, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + text + "'");
}

std::vector<double> to_list(const std::string& where, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(where, item));
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

/// Typed access to one section; every key must be consumed by the time `finish` runs.
class Section {
 public:
  Section(const pt::ptree* node, std::string name) : node_(node), name_(std::move(name)) {}

  bool present() const { return node_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    if (!node_) return std::nullopt;
    const auto it = node_->find(key);
    if (it == node_->not_found()) return std::nullopt;
    used_.insert(key);
    return trim(it->second.data());
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  double number(const std::string& key, double fallback) {
    const auto v = raw(key);
    return v ? to_double(where(key), *v) : fallback;
  }
  long long integer(const std::string& key, long long fallback) {
    const auto v = raw(key);
    return v ? to_integer(where(key), *v) : fallback;
  }
  bool flag(const std::string& key, bool fallback) {
    const auto v = raw(key);
    return v ? to_bool(where(key), *v) : fallback;
  }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    const auto v = raw(key);
    return v ? to_list(where(key), *v) : fallback;
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, child] : *node_) {
      if (!child.empty()) throw ConfigError("[" + name_ + "]: nested entries are not allowed");
      if (!used_.count(key)) throw ConfigError("unknown key " + where(key));
    }
  }

 private:
  const pt::ptree* node_;
  std::string name_;
  std::set<std::string> used_;
};

Section section(const pt::ptree& tree, const std::string& name) {
  const auto it = tree.find(name);
  return {it == tree.not_found() ? nullptr : &it->second, name};
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::vector<int> to_ints(const std::string& where, const std::vector<double>& xs) {
  std::vector<int> out;
  for (double x : xs) {
    if (x != std::floor(x) || x < 1 || x > 4096) throw ConfigError(where + ": expected positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

}  // namespace

double auto_p(double alpha) {
  return alpha > 1.0 ? 3.0 / (alpha - 1.0) : std::numeric_limits<double>::infinity();
}

double auto_q(double alpha) { return 3.0 / (alpha - 0.5); }

bool ExperimentConfig::has_section(const std::string& name) const {
  return tree.find(name) != tree.not_found();
}

ExperimentConfig parse_config(std::istream& in, const Overrides& overrides) {
  ExperimentConfig cfg;
  try {
    pt::read_ini(in, cfg.tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
  for (const auto& [name, child] : cfg.tree) {
    if (child.empty() && !child.data().empty()) throw ConfigError("key '" + name + "' outside any section");
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
  }
  if (overrides.seed) cfg.tree.put("data.seed", std::to_string(*overrides.seed));
  if (overrides.output) cfg.tree.put("output.directory", overrides.output->string());

  {
    Section s = section(cfg.tree, "system");
    const auto kind = s.raw("kind");
    try {
      cfg.system.kind.tag = parse_system_tag(kind.value_or("emhd"));
    } catch (const std::exception& e) {
      throw ConfigError(s.where("kind") + ": " + e.what());
    }
    cfg.system.kind.alpha = s.number("alpha", 1.25);
    cfg.system.static_flow = s.flag("static_flow", false);
    s.finish();
    require(cfg.system.kind.alpha >= 1.0 && cfg.system.kind.alpha < 1.75, "[system] alpha must lie in [1, 7/4)");
    require(!cfg.system.static_flow || cfg.system.kind.tag == SystemTag::HallMHD,
            "[system] static_flow applies to hall_mhd only");
  }
  {
    Section s = section(cfg.tree, "grid");
    const long long n = s.integer("n", 32);
    s.finish();
    require(n >= 4 && n <= 512 && n % 2 == 0, "[grid] n must be an even integer in [4, 512]");
    cfg.grid.n = static_cast<int>(n);
  }
  const double alpha = cfg.system.kind.alpha;
  const SystemTag tag = cfg.system.kind.tag;
  const bool magnetic = tag != SystemTag::NSE;
  const bool velocity = tag != SystemTag::ElectronMHD;
  {
    Section s = section(cfg.tree, "data");
    double threshold = -std::numeric_limits<double>::infinity();
    if (magnetic) threshold = std::max(threshold, magnetic_data_threshold(alpha));
    if (velocity) threshold = std::max(threshold, velocity_data_threshold(alpha));
    cfg.data.s = s.number("s", threshold);
    cfg.data.amplitude = s.number("amplitude", 0.0);
    cfg.data.velocity_amplitude = s.number("velocity_amplitude", cfg.data.amplitude);
    cfg.data.radius = s.number("radius", 0.0);
    const long long seed = s.integer("seed", 1);
    const auto dist = s.raw("distribution");
    try {
      cfg.data.distribution = parse_distribution(dist.value_or("gaussian"));
    } catch (const std::exception& e) {
      throw ConfigError(s.where("distribution") + ": " + e.what());
    }
    s.finish();
    require(seed >= 0, "[data] seed must be non-negative");
    cfg.data.seed = static_cast<std::uint64_t>(seed);
    require(cfg.data.amplitude >= 0.0 && cfg.data.velocity_amplitude >= 0.0, "[data] amplitudes must be non-negative");
    require(cfg.data.radius >= 0.0, "[data] radius must be non-negative");
    require(cfg.data.s >= threshold, "[data] s = " + std::to_string(cfg.data.s) +
                                         " is below the required regularity " + std::to_string(threshold));
  }
  {
    Section s = section(cfg.tree, "exponents");
    auto index = [&s](const std::string& key, bool& is_auto, double& value) {
      const auto v = s.raw(key);
      is_auto = !v || *v == "auto";
      if (!is_auto) value = to_double(s.where(key), *v);
    };
    index("p", cfg.exponents.p_auto, cfg.exponents.p);
    index("q", cfg.exponents.q_auto, cfg.exponents.q);
    if (const auto b = s.raw("beta")) cfg.exponents.beta = to_double(s.where("beta"), *b);
    if (const auto g = s.raw("gamma")) cfg.exponents.gamma = to_double(s.where("gamma"), *g);
    s.finish();
    if (cfg.exponents.p_auto) {
      cfg.exponents.p = auto_p(alpha);
      if (!std::isfinite(cfg.exponents.p)) {
        if (magnetic)
          throw InfeasibleParameters(kMagneticRelation, "no Lebesgue index p gives beta > 0 at alpha = 1");
        cfg.exponents.p = 12.0;
      }
    }
    if (cfg.exponents.q_auto) cfg.exponents.q = auto_q(alpha);
    require(cfg.exponents.p >= 2.0 && cfg.exponents.q >= 2.0, "[exponents] p and q must be at least 2");
    const ExponentReport e = exponents_for(tag, alpha, cfg.exponents.p, cfg.exponents.q);
    if (cfg.exponents.beta && magnetic && std::abs(*cfg.exponents.beta - e.beta) > 1e-9)
      throw InfeasibleParameters(kMagneticRelation, "declared beta = " + std::to_string(*cfg.exponents.beta) +
                                                        " but the relation gives " + std::to_string(e.beta));
    if (cfg.exponents.gamma && velocity && std::abs(*cfg.exponents.gamma - e.gamma) > 1e-9)
      throw InfeasibleParameters(kVelocityRelation, "declared gamma = " + std::to_string(*cfg.exponents.gamma) +
                                                        " but the relation gives " + std::to_string(e.gamma));
  }
  {
    Section s = section(cfg.tree, "time");
    cfg.time.horizon = s.number("T", cfg.time.horizon);
    const long long nodes = s.integer("nodes", cfg.time.nodes);
    const auto refinement = s.raw("refinement").value_or("graded");
    cfg.time.grading = s.number("grading", cfg.time.grading);
    const long long sub = s.integer("etd_substeps", cfg.time.etd_substeps);
    s.finish();
    require(cfg.time.horizon > 0.0, "[time] T must be positive");
    require(nodes >= 1 && nodes <= 100000, "[time] nodes must be in [1, 100000]");
    require(refinement == "graded" || refinement == "uniform", "[time] refinement must be graded or uniform");
    require(cfg.time.grading >= 1.0, "[time] grading must be at least 1");
    require(sub >= 1 && sub <= 100000, "[time] etd_substeps must be in [1, 100000]");
    cfg.time.nodes = static_cast<int>(nodes);
    cfg.time.graded = refinement == "graded";
    cfg.time.etd_substeps = static_cast<int>(sub);
  }
  {
    Section s = section(cfg.tree, "picard");
    cfg.picard.tol = s.number("tol", cfg.picard.tol);
    const long long it = s.integer("max_iter", cfg.picard.max_iter);
    s.finish();
    require(cfg.picard.tol > 0.0 && cfg.picard.tol < 1.0, "[picard] tol must be in (0, 1)");
    require(it >= 1 && it <= 10000, "[picard] max_iter must be in [1, 10000]");
    cfg.picard.max_iter = static_cast<int>(it);
  }
  {
    Section s = section(cfg.tree, "ensemble");
    if (s.present()) {
      EnsembleSection e;
      const long long n = s.integer("n_draws", 1000);
      const auto grid = s.raw("lambda_grid").value_or("auto");
      if (grid != "auto") e.lambda_grid = to_list(s.where("lambda_grid"), grid);
      e.r_list = s.list("r_list", {});
      e.field = s.raw("field").value_or(magnetic ? "magnetic" : "velocity");
      e.statistic = s.raw("statistic").value_or("joint");
      s.finish();
      require(n >= 1 && n <= 100000000, "[ensemble] n_draws must be positive");
      e.n_draws = static_cast<std::size_t>(n);
      for (double l : e.lambda_grid) require(l >= 0.0, "[ensemble] lambda_grid entries must be non-negative");
      for (double r : e.r_list) require(r >= 1.0, "[ensemble] r_list entries must be at least 1");
      require(e.field == "magnetic" || e.field == "velocity", "[ensemble] field must be magnetic or velocity");
      require(e.field == "magnetic" ? magnetic : velocity, "[ensemble] field is not evolved by this system");
      const std::set<std::string> names =
          e.field == "magnetic" ? std::set<std::string>{"E1", "E2", "E3", "joint"}
                                : std::set<std::string>{"E4", "E5", "E6", "joint"};
      require(names.count(e.statistic), "[ensemble] statistic '" + e.statistic + "' is not one of the " +
                                            e.field + " event norms or joint");
      cfg.ensemble = e;
    }
  }
  {
    Section s = section(cfg.tree, "kernels");
    if (s.present()) {
      KernelSection k;
      k.alpha = s.list("alpha", k.alpha);
      k.m = s.list("m", k.m);
      k.p = s.list("p", k.p);
      const long long dim = s.integer("dimension", 3);
      const long long lo = s.integer("log2_t_min", k.log2_t_min);
      const long long hi = s.integer("log2_t_max", k.log2_t_max);
      k.slope_tol = s.number("slope_tol", k.slope_tol);
      s.finish();
      for (double a : k.alpha) require(a > 0.0, "[kernels] alpha entries must be positive");
      for (double m : k.m) require(m >= 0.0, "[kernels] m entries must be non-negative");
      for (double p : k.p) require(p >= 1.0, "[kernels] p entries must be at least 1");
      require(dim >= 1 && dim <= 3, "[kernels] dimension must be 1, 2 or 3");
      require(lo < hi && lo >= -30 && hi <= 30, "[kernels] need -30 <= log2_t_min < log2_t_max <= 30");
      require(k.slope_tol > 0.0, "[kernels] slope_tol must be positive");
      k.dimension = static_cast<int>(dim);
      k.log2_t_min = static_cast<int>(lo);
      k.log2_t_max = static_cast<int>(hi);
      cfg.kernels = k;
    }
  }
  {
    Section s = section(cfg.tree, "beta");
    if (s.present()) {
      BetaSection b;
      b.r = s.list("r", b.r);
      b.s = s.list("s", b.s);
      b.t = s.list("t", b.t);
      b.invariance_tol = s.number("invariance_tol", b.invariance_tol);
      b.oracle_tol = s.number("oracle_tol", b.oracle_tol);
      s.finish();
      require(b.r.size() == b.s.size(), "[beta] r and s must have the same length");
      for (std::size_t i = 0; i < b.r.size(); ++i) {
        require(b.r[i] > 0.0 && b.r[i] < 1.0 && b.s[i] > 0.0 && b.s[i] < 1.0, "[beta] r and s must lie in (0, 1)");
        require(std::abs(b.r[i] + b.s[i] - 1.0) <= 1e-12,
                "[beta] r + s must equal 1 for the t-independence check (pair " + std::to_string(i + 1) + ")");
      }
      for (double t : b.t) require(t > 0.0, "[beta] t entries must be positive");
      require(b.invariance_tol > 0.0 && b.oracle_tol > 0.0, "[beta] tolerances must be positive");
      cfg.beta = b;
    }
  }
  {
    Section s = section(cfg.tree, "contraction");
    const long long pairs = s.integer("pairs", cfg.contraction.pairs);
    cfg.contraction.amplitude = s.number("amplitude", cfg.contraction.amplitude);
    s.finish();
    require(pairs >= 1 && pairs <= 100000, "[contraction] pairs must be in [1, 100000]");
    require(cfg.contraction.amplitude > 0.0, "[contraction] amplitude must be positive");
    cfg.contraction.pairs = static_cast<int>(pairs);
  }
  {
    Section s = section(cfg.tree, "simulate");
    cfg.simulate.regularity_gain = s.flag("regularity_gain", false);
    if (const auto r = s.raw("resolutions"))
      cfg.simulate.resolutions = to_ints(s.where("resolutions"), to_list(s.where("resolutions"), *r));
    s.finish();
    require(!cfg.simulate.regularity_gain || tag == SystemTag::ElectronMHD,
            "[simulate] regularity_gain requires kind = emhd");
    for (int n : cfg.simulate.resolutions) require(n >= 4 && n % 2 == 0, "[simulate] resolutions must be even, >= 4");
  }
  {
    Section s = section(cfg.tree, "output");
    cfg.output = s.raw("directory").value_or("out");
    s.finish();
    require(!cfg.output.empty(), "[output] directory must not be empty");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, overrides);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) { pt::write_ini(out, cfg.tree); }

}  // namespace randhall::app
