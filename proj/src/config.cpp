#include "mmpso/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mmpso/error.hpp"
#include "mmpso/output.hpp"

namespace mmpso {

namespace pt = boost::property_tree;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::macro:
      return "macro";
    case Mode::micromacro:
      return "micromacro";
    case Mode::micro:
      break;
  }
  return "micro";
}

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "micro") return Mode::micro;
  if (name == "macro") return Mode::macro;
  if (name == "micromacro") return Mode::micromacro;
  return std::nullopt;
}

MicroParams ExperimentConfig::micro_params() const {
  MicroParams p;
  p.m = dynamics.m;
  p.lambda = dynamics.lambda;
  p.sigma = dynamics.sigma;
  p.dt = dt;
  p.alpha = dynamics.alpha;
  if (micro) p.diffusion = micro->diffusion;
  return p;
}

SourceParams ExperimentConfig::source_params() const {
  SourceParams p{dynamics.m, dynamics.lambda};
  if (macro) p.stencil = macro->source_stencil;
  return p;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
std::optional<T> parse_number(std::string_view text) {
  const std::string s = trim(text);
  T value{};
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || s.empty()) return std::nullopt;
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) return std::nullopt;
  }
  return value;
}

/// Rows of whitespace-separated reals separated by ';'.
std::optional<std::vector<std::vector<double>>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::string s(text);
  std::stringstream outer(s);
  std::string row;
  while (std::getline(outer, row, ';')) {
    if (trim(row).empty()) continue;
    std::stringstream inner(row);
    std::string token;
    std::vector<double> values;
    while (inner >> token) {
      auto v = parse_number<double>(token);
      if (!v) return std::nullopt;
      values.push_back(*v);
    }
    rows.push_back(std::move(values));
  }
  return rows;
}

/// Walks the property tree, collecting errors and remembering which keys were read.
class Reader {
 public:
  explicit Reader(const pt::ptree& root) : root_(root) {}

  bool has_section(const std::string& section) const {
    return root_.get_child_optional(section).has_value();
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key,
                                 bool required) {
    used_[section].insert(key);
    const auto node = root_.get_child_optional(pt::ptree::path_type(section + "." + key, '.'));
    if (!node) {
      if (required) error(section, key, "missing required key");
      return std::nullopt;
    }
    return trim(node->data());
  }

  template <class T>
  std::optional<T> number(const std::string& section, const std::string& key, bool required,
                          std::function<bool(T)> valid = {}, std::string_view rule = {}) {
    const auto text = raw(section, key, required);
    if (!text) return std::nullopt;
    const auto v = parse_number<T>(*text);
    if (!v) {
      error(section, key, "cannot parse '" + *text + "' as a number");
      return std::nullopt;
    }
    if (valid && !valid(*v)) {
      error(section, key, std::string(rule));
      return std::nullopt;
    }
    return v;
  }

  template <class E>
  std::optional<E> choice(const std::string& section, const std::string& key, bool required,
                          std::optional<E> (*parse)(std::string_view), std::string_view options) {
    const auto text = raw(section, key, required);
    if (!text) return std::nullopt;
    const auto v = parse(*text);
    if (!v) error(section, key, "unknown value '" + *text + "' (expected " + std::string(options) + ")");
    return v;
  }

  void error(const std::string& section, const std::string& key, const std::string& what) {
    errors_.push_back(section + (key.empty() ? "" : "." + key) + ": " + what);
  }

  void check_unknown(const std::set<std::string>& sections) {
    for (const auto& [name, child] : root_) {
      if (!sections.count(name)) {
        error(name, "", child.empty() ? "key outside any section" : "unknown section");
        continue;
      }
      for (const auto& [key, value] : child) {
        if (!used_[name].count(key)) error(name, key, "unknown key");
      }
    }
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  const pt::ptree& root_;
  std::map<std::string, std::set<std::string>> used_;
  std::vector<std::string> errors_;
};

auto positive = [](double v) { return v > 0.0; };
auto above_one = [](double v) { return v > 1.0; };

std::optional<PenaltyParams> read_penalty(Reader& r, const std::string& section, bool required) {
  if (!required && !r.has_section(section)) return std::nullopt;
  PenaltyParams p;
  const auto kappa0 = r.number<double>(section, "kappa0", true, positive, "must be positive");
  const auto eta_kappa = r.number<double>(section, "eta_kappa", true, above_one, "must exceed 1");
  const auto beta0 = r.number<double>(section, "beta0", true, positive, "must be positive");
  const auto eta_beta = r.number<double>(section, "eta_beta", true, above_one, "must exceed 1");
  const auto rule = r.choice<KappaFailureRule>(section, "failure_kappa_rule", false,
                                               parse_kappa_rule, "divide|multiply");
  if (kappa0) p.kappa0 = *kappa0;
  if (eta_kappa) p.eta_kappa = *eta_kappa;
  if (beta0) p.beta0 = *beta0;
  if (eta_beta) p.eta_beta = *eta_beta;
  if (rule) p.failure_kappa_rule = *rule;
  return p;
}

std::optional<FeasibleSet> read_constraint(Reader& r, std::size_t dim) {
  const std::string sec = "constraint";
  if (!r.has_section(sec)) return std::nullopt;
  const auto type = r.raw(sec, "type", true);
  if (!type) return std::nullopt;

  std::optional<FeasibleSet> set;
  if (*type == "ball_union") {
    const auto text = r.raw(sec, "balls", true);
    if (!text) return std::nullopt;
    const auto rows = parse_rows(*text);
    if (!rows) {
      r.error(sec, "balls", "expected ';'-separated rows of numbers");
      return std::nullopt;
    }
    BallUnion u;
    for (const auto& row : *rows) {
      if (row.size() < 2) {
        r.error(sec, "balls", "each ball needs center coordinates followed by radius^2");
        return std::nullopt;
      }
      u.balls.push_back({std::vector<double>(row.begin(), row.end() - 1), row.back()});
    }
    set = u;
  } else if (*type == "interval_union") {
    const auto text = r.raw(sec, "intervals", true);
    if (!text) return std::nullopt;
    const auto rows = parse_rows(*text);
    if (!rows) {
      r.error(sec, "intervals", "expected ';'-separated rows of numbers");
      return std::nullopt;
    }
    IntervalUnion u;
    for (const auto& row : *rows) {
      if (row.size() != 2) {
        r.error(sec, "intervals", "each interval needs exactly 'lo hi'");
        return std::nullopt;
      }
      u.intervals.push_back({row[0], row[1]});
    }
    set = u;
  } else if (*type == "half_line") {
    const auto bound = r.number<double>(sec, "bound", true);
    if (!bound) return std::nullopt;
    set = HalfLine{*bound};
  } else {
    r.error(sec, "type", "unknown value '" + *type + "' (expected ball_union|interval_union|half_line)");
    return std::nullopt;
  }
  try {
    validate(*set, dim);
  } catch (const ContractViolation& e) {
    r.error(sec, "", e.what());
    return std::nullopt;
  }
  return set;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("parse error: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  Reader r(tree);
  ExperimentConfig cfg;

  const auto mode = r.choice<Mode>("run", "mode", true, parse_mode, "micro|macro|micromacro");
  if (mode) cfg.mode = *mode;
  if (auto v = r.number<std::int64_t>("run", "n_steps", true,
                                      [](std::int64_t n) { return n >= 1; }, "must be at least 1"))
    cfg.n_steps = *v;
  if (auto v = r.number<double>("run", "dt", true, positive, "must be positive")) cfg.dt = *v;
  if (auto v = r.number<std::uint64_t>("run", "seed", true)) cfg.seed = *v;
  if (auto v = r.number<double>("run", "total_mass", false, positive, "must be positive"))
    cfg.total_mass = *v;
  if (auto v = r.raw("run", "output", false)) cfg.output = *v;
  if (auto v = r.number<std::int64_t>("run", "snapshot_every", false,
                                      [](std::int64_t n) { return n >= 0; }, "must be non-negative"))
    cfg.snapshot_every = *v;

  if (auto v = r.choice<Benchmark>("objective", "name", true, parse_benchmark, "ackley|rastrigin"))
    cfg.objective.name = *v;
  if (auto v = r.number<std::size_t>("objective", "dim", true,
                                     [](std::size_t d) { return d >= 1; }, "must be at least 1"))
    cfg.objective.dim = *v;
  if (mode && uses_macro(*mode) && cfg.objective.dim != 1) {
    r.error("objective", "dim", "mode '" + std::string(to_string(*mode)) + "' requires dim = 1");
  }

  cfg.feasible_set = read_constraint(r, cfg.objective.dim);

  const bool micro_used = !mode || uses_micro(*mode);
  const bool macro_used = !mode || uses_macro(*mode);

  if (auto v = r.number<double>("dynamics", "m", true, [](double m) { return m > 0.0 && m <= 1.0; },
                                "m must lie in (0,1]"))
    cfg.dynamics.m = *v;
  if (auto v = r.number<double>("dynamics", "lambda", true, positive, "must be positive"))
    cfg.dynamics.lambda = *v;
  if (auto v = r.number<double>("dynamics", "sigma", micro_used, [](double s) { return s >= 0.0; },
                                "must be non-negative"))
    cfg.dynamics.sigma = *v;
  if (auto v = r.number<double>("dynamics", "alpha", true, positive, "must be positive"))
    cfg.dynamics.alpha = *v;

  if (micro_used || r.has_section("micro")) {
    MicroConfig mc;
    if (auto v = r.number<std::size_t>("micro", "n_particles", true,
                                       [](std::size_t n) { return n >= 1; }, "must be at least 1"))
      mc.n_particles = *v;
    if (auto v = r.choice<Diffusion>("micro", "diffusion", true, parse_diffusion,
                                     "isotropic|anisotropic"))
      mc.diffusion = *v;
    const auto lo = r.number<double>("micro", "init_lo", true);
    const auto hi = r.number<double>("micro", "init_hi", true);
    if (lo) mc.init_lo = *lo;
    if (hi) mc.init_hi = *hi;
    if (lo && hi && !(*lo < *hi)) r.error("micro", "init_hi", "must exceed init_lo");
    cfg.micro = mc;
  }

  if (macro_used || r.has_section("macro")) {
    MacroConfig mc;
    const auto lo = r.number<double>("macro", "x_min", true);
    const auto hi = r.number<double>("macro", "x_max", true);
    if (lo) mc.grid.x_min = *lo;
    if (hi) mc.grid.x_max = *hi;
    if (lo && hi && !(*lo < *hi)) r.error("macro", "x_max", "must exceed x_min");
    if (auto v = r.number<std::size_t>("macro", "cells", true,
                                       [](std::size_t k) { return k >= 3; }, "must be at least 3"))
      mc.grid.cells = *v;
    if (auto v = r.number<double>("macro", "temperature", true, [](double t) { return t != 0.0; },
                                  "must be non-zero (T = 0 loses strict hyperbolicity)"))
      mc.temperature = *v;
    if (auto v = r.number<double>("macro", "cfl", true, [](double c) { return c > 0.0 && c <= 1.0; },
                                  "must lie in (0,1]"))
      mc.cfl = *v;
    if (auto v = r.choice<Boundary>("macro", "boundary", true, parse_boundary,
                                    "outflow|periodic|reflective"))
      mc.boundary = *v;
    if (auto v = r.choice<SourceStencil>("macro", "source_stencil", false, parse_source_stencil,
                                         "averaged|centered"))
      mc.source_stencil = *v;
    cfg.macro = mc;
  }

  const bool constrained = r.has_section("constraint");
  cfg.penalty_micro = read_penalty(r, "penalty_micro", constrained && micro_used);
  cfg.penalty_macro = read_penalty(r, "penalty_macro", constrained && macro_used);

  const bool coupling_used = !mode || *mode == Mode::micromacro;
  if (coupling_used || r.has_section("coupling")) {
    CouplingParams cp;
    const auto z0 = r.number<double>("coupling", "zeta0", true);
    const auto zmin = r.number<double>("coupling", "zeta_min", true);
    const auto zmax = r.number<double>("coupling", "zeta_max", true);
    if (auto v = r.number<std::int64_t>("coupling", "t_star", true,
                                        [](std::int64_t t) { return t >= 0; }, "must be non-negative"))
      cp.t_star = *v;
    if (auto v = r.choice<TransferRule>("coupling", "transfer_rule", false, parse_transfer_rule,
                                        "conservative|literal"))
      cp.transfer_rule = *v;
    if (z0) cp.zeta0 = *z0;
    if (zmin) cp.zeta_min = *zmin;
    if (zmax) cp.zeta_max = *zmax;
    if (z0 && zmin && zmax) {
      try {
        cp.validate();
      } catch (const ContractViolation& e) {
        r.error("coupling", "", e.what());
      }
    }
    cfg.coupling = cp;
  }

  r.check_unknown({"run", "objective", "constraint", "dynamics", "micro", "macro", "penalty_micro",
                   "penalty_macro", "coupling"});
  if (!r.errors().empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : r.errors()) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto real = [](double v) { return format_real(v); };
  out << "[run]\n"
      << "mode = " << to_string(cfg.mode) << "\n"
      << "n_steps = " << cfg.n_steps << "\n"
      << "dt = " << real(cfg.dt) << "\n"
      << "seed = " << cfg.seed << "\n"
      << "total_mass = " << real(cfg.total_mass) << "\n";
  if (!cfg.output.empty()) out << "output = " << cfg.output << "\n";
  out << "snapshot_every = " << cfg.snapshot_every << "\n\n";

  out << "[objective]\n"
      << "name = " << to_string(cfg.objective.name) << "\n"
      << "dim = " << cfg.objective.dim << "\n\n";

  if (cfg.feasible_set) {
    out << "[constraint]\n";
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BallUnion>) {
            out << "type = ball_union\nballs = ";
            for (std::size_t b = 0; b < s.balls.size(); ++b) {
              if (b) out << "; ";
              for (double c : s.balls[b].center) out << real(c) << " ";
              out << real(s.balls[b].radius_sq);
            }
          } else if constexpr (std::is_same_v<T, IntervalUnion>) {
            out << "type = interval_union\nintervals = ";
            for (std::size_t i = 0; i < s.intervals.size(); ++i) {
              if (i) out << "; ";
              out << real(s.intervals[i].lo) << " " << real(s.intervals[i].hi);
            }
          } else {
            out << "type = half_line\nbound = " << real(s.bound);
          }
          out << "\n\n";
        },
        *cfg.feasible_set);
  }

  out << "[dynamics]\n"
      << "m = " << real(cfg.dynamics.m) << "\n"
      << "lambda = " << real(cfg.dynamics.lambda) << "\n"
      << "sigma = " << real(cfg.dynamics.sigma) << "\n"
      << "alpha = " << real(cfg.dynamics.alpha) << "\n\n";

  if (cfg.micro) {
    out << "[micro]\n"
        << "n_particles = " << cfg.micro->n_particles << "\n"
        << "diffusion = " << to_string(cfg.micro->diffusion) << "\n"
        << "init_lo = " << real(cfg.micro->init_lo) << "\n"
        << "init_hi = " << real(cfg.micro->init_hi) << "\n\n";
  }
  if (cfg.macro) {
    out << "[macro]\n"
        << "x_min = " << real(cfg.macro->grid.x_min) << "\n"
        << "x_max = " << real(cfg.macro->grid.x_max) << "\n"
        << "cells = " << cfg.macro->grid.cells << "\n"
        << "temperature = " << real(cfg.macro->temperature) << "\n"
        << "cfl = " << real(cfg.macro->cfl) << "\n"
        << "boundary = " << to_string(cfg.macro->boundary) << "\n"
        << "source_stencil = " << to_string(cfg.macro->source_stencil) << "\n\n";
  }
  auto penalty = [&](const char* name, const std::optional<PenaltyParams>& p) {
    if (!p) return;
    out << "[" << name << "]\n"
        << "kappa0 = " << real(p->kappa0) << "\n"
        << "eta_kappa = " << real(p->eta_kappa) << "\n"
        << "beta0 = " << real(p->beta0) << "\n"
        << "eta_beta = " << real(p->eta_beta) << "\n"
        << "failure_kappa_rule = " << to_string(p->failure_kappa_rule) << "\n\n";
  };
  penalty("penalty_micro", cfg.penalty_micro);
  penalty("penalty_macro", cfg.penalty_macro);
  if (cfg.coupling) {
    out << "[coupling]\n"
        << "zeta0 = " << real(cfg.coupling->zeta0) << "\n"
        << "zeta_min = " << real(cfg.coupling->zeta_min) << "\n"
        << "zeta_max = " << real(cfg.coupling->zeta_max) << "\n"
        << "t_star = " << cfg.coupling->t_star << "\n"
        << "transfer_rule = " << to_string(cfg.coupling->transfer_rule) << "\n";
  }
  return out.str();
}

}  // namespace mmpso
