#include "spgm/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace spgm::harness {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : InvalidInput(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidInput("expected a real number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t to_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidInput("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::size_t to_size(std::string_view s) { return static_cast<std::size_t>(to_uint(s)); }

bool to_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw InvalidInput("expected true or false, got '" + std::string(s) + "'");
}

[[noreturn]] void bad_choice(std::string_view value, std::string_view allowed) {
  throw InvalidInput("unknown value '" + std::string(value) + "' (expected " +
                     std::string(allowed) + ")");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table{
      {"instance.L", [](auto& c, auto v) { c.L = to_real(v); }},
      {"instance.a", [](auto& c, auto v) { c.a = to_real(v); }},
      {"instance.sigma", [](auto& c, auto v) { c.sigma = to_real(v); }},
      {"instance.sigma2", [](auto& c, auto v) {
         const double s2 = to_real(v);
         if (s2 < 0.0) throw InvalidInput("instance.sigma2 must be >= 0");
         c.sigma = std::sqrt(s2);
       }},
      {"instance.d", [](auto& c, auto v) { c.d = to_size(v); }},
      {"instance.noise", [](auto& c, auto v) {
         if (v == "total") c.noise = NoiseConvention::kTotalVariance;
         else if (v == "per_coordinate") c.noise = NoiseConvention::kPerCoordinate;
         else bad_choice(v, "total, per_coordinate");
       }},
      {"instance.x0", [](auto& c, auto v) { c.x0 = to_real(v); }},
      {"psi.kind", [](auto& c, auto v) {
         if (v != "zero" && v != "quadratic" && v != "l1" && v != "group_linf1" && v != "box") {
           bad_choice(v, "zero, quadratic, l1, group_linf1, box");
         }
         c.psi = std::string(v);
       }},
      {"psi.lambda", [](auto& c, auto v) { c.psi_lambda = to_real(v); }},
      {"psi.group_size", [](auto& c, auto v) { c.psi_group_size = to_size(v); }},
      {"psi.lo", [](auto& c, auto v) { c.psi_lo = to_real(v); }},
      {"psi.hi", [](auto& c, auto v) { c.psi_hi = to_real(v); }},
      {"method", [](auto& c, auto v) {
         if (v == "vanilla") c.method = Method::kVanilla;
         else if (v == "momentum") c.method = Method::kMomentum;
         else bad_choice(v, "vanilla, momentum");
       }},
      {"batch", [](auto& c, auto v) { c.batch = to_size(v); }},
      {"schedule.variant", [](auto& c, auto v) { c.variant = parse_variant(v); }},
      {"schedule.M", [](auto& c, auto v) { c.M = to_real(v); }},
      {"schedule.gamma", [](auto& c, auto v) { c.gamma = to_real(v); }},
      {"schedule.inexact_constants", [](auto& c, auto v) {
         if (v == "proof_derived") c.inexact_constants = InexactConstants::kProofDerived;
         else if (v == "as_stated") c.inexact_constants = InexactConstants::kAsStated;
         else bad_choice(v, "proof_derived, as_stated");
       }},
      {"schedule.eps", [](auto& c, auto v) { c.eps = to_real(v); }},
      {"schedule.phi0", [](auto& c, auto v) { c.phi0 = to_real(v); }},
      {"init.kind", [](auto& c, auto v) {
         if (v == "non_composite_zero") c.init.kind = InitKind::kNonCompositeZero;
         else if (v == "composite_g0") c.init.kind = InitKind::kCompositeG0;
         else if (v == "minibatch") c.init.kind = InitKind::kMiniBatch;
         else bad_choice(v, "non_composite_zero, composite_g0, minibatch");
       }},
      {"init.gamma_minus1", [](auto& c, auto v) { c.init.gamma_minus1 = to_real(v); }},
      {"init.b0", [](auto& c, auto v) { c.init.b0 = to_size(v); }},
      {"sampler", [](auto& c, auto v) {
         if (v == "auto") c.sampler = SamplerWeighting::kAuto;
         else if (v == "uniform") c.sampler = SamplerWeighting::kUniform;
         else if (v == "inverse_m") c.sampler = SamplerWeighting::kInverseM;
         else bad_choice(v, "auto, uniform, inverse_m");
       }},
      {"prox.inexact", [](auto& c, auto v) { c.inexact = to_bool(v); }},
      {"prox.target_S", [](auto& c, auto v) { c.target_S = to_real(v); }},
      {"prox.sigma2_psi", [](auto& c, auto v) { c.sigma2_psi = to_real(v); }},
      {"prox.max_iters", [](auto& c, auto v) { c.inner_max_iters = to_size(v); }},
      {"K", [](auto& c, auto v) { c.K = to_size(v); }},
      {"budget", [](auto& c, auto v) { c.budget = to_size(v); }},
      {"tolerance", [](auto& c, auto v) { c.tolerance = to_real(v); }},
      {"seeds", [](auto& c, auto v) { c.seeds = parse_seeds(v); }},
      {"smoothing_window", [](auto& c, auto v) { c.smoothing_window = to_size(v); }},
      {"output", [](auto& c, auto v) { c.output = std::filesystem::path(std::string(v)); }},
      {"grid.M", [](auto& c, auto v) { c.grid_M = parse_real_list(v); }},
      {"grid.gamma", [](auto& c, auto v) { c.grid_gamma = parse_real_list(v); }},
      {"grid.metric", [](auto& c, auto v) {
         if (v == "first_to_tolerance") c.grid_metric = GridMetric::kFirstToTolerance;
         else if (v == "final_mean_error") c.grid_metric = GridMetric::kFinalMeanError;
         else bad_choice(v, "first_to_tolerance, final_mean_error");
       }},
  };
  return table;
}

}  // namespace

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw InvalidInput("empty entry in seed list");
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      seeds.push_back(to_uint(item));
      continue;
    }
    const std::uint64_t lo = to_uint(trim(item.substr(0, dots)));
    const std::uint64_t hi = to_uint(trim(item.substr(dots + 2)));
    if (hi < lo) throw InvalidInput("seed range '" + std::string(item) + "' is reversed");
    if (hi - lo > 1000000) throw InvalidInput("seed range is too long");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  return seeds;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (std::string_view item : split(text, ',')) {
    if (item.empty()) throw InvalidInput("empty entry in list");
    out.push_back(to_real(item));
  }
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(0, m); };
  if (!(L > 0.0)) fail("instance.L must be > 0");
  if (!(a >= 0.0)) fail("instance.a must be >= 0");
  if (!(sigma >= 0.0)) fail("instance.sigma must be >= 0");
  if (d == 0) fail("instance.d must be >= 1");
  if (batch == 0) fail("batch must be >= 1");
  if (!(tolerance > 0.0)) fail("tolerance must be > 0");
  if (seeds.empty()) fail("seeds must not be empty");
  if (psi == "group_linf1" && (psi_group_size == 0 || d % psi_group_size != 0)) {
    fail("psi.group_size must divide instance.d");
  }
  if (method == Method::kVanilla && budget && *budget < K * batch) {
    fail("budget must be >= K * batch for the vanilla method");
  }
  if (variant == ScheduleVariant::kManual) {
    if (!(M > 0.0)) fail("schedule.M must be > 0");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("schedule.gamma must lie in (0, 1]");
  }
  for (double m : grid_M) {
    if (!(m > 0.0)) fail("grid.M entries must be > 0");
  }
  for (double g : grid_gamma) {
    if (!(g > 0.0 && g <= 1.0)) fail("grid.gamma entries must lie in (0, 1]");
  }
  if (inexact && !(target_S > 0.0)) fail("prox.target_S must be > 0");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::map<std::string, std::size_t, std::less<>> seen;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(line_no, "expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
    }
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(line_no, "duplicate key '" + std::string(key) +
                                     "' (first set on line " +
                                     std::to_string(prev->second) + ")");
    }
    seen.emplace(std::string(key), line_no);
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + std::string(key) + "'");
    try {
      it->second(config, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, std::string(key) + ": " + e.what());
    }
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

ProxPart make_psi(const ExperimentConfig& c) {
  if (c.psi == "zero") return ProxPart::zero();
  if (c.psi == "quadratic") return ProxPart::quadratic(c.a);
  if (c.psi == "l1") return ProxPart::l1(c.psi_lambda);
  if (c.psi == "group_linf1") {
    return ProxPart::group_linf1(
        c.psi_lambda, std::vector<std::size_t>(c.d / c.psi_group_size, c.psi_group_size));
  }
  return ProxPart::box(Point(c.d, c.psi_lo), Point(c.d, c.psi_hi));
}

// F* of (L/2)||x||^2 + psi for the supported psi kinds.
double optimal_value(const ExperimentConfig& c) {
  if (c.psi == "box" && (c.psi_lo > 0.0 || c.psi_hi < 0.0)) {
    const double nearest = c.psi_lo > 0.0 ? c.psi_lo : c.psi_hi;
    return 0.5 * c.L * nearest * nearest * static_cast<double>(c.d);
  }
  return 0.0;
}

Schedule make_schedule(const ExperimentConfig& c, double sigma2, double phi0) {
  switch (c.variant) {
    case ScheduleVariant::kManual:
      return Schedule::manual(c.M, c.gamma, c.L);
    case ScheduleVariant::kTimeVaryingCor52:
      return Schedule::timevarying(c.L, sigma2, phi0, c.eps);
    default:
      return Schedule::constant(c.variant, c.L, sigma2, phi0, std::max<std::size_t>(c.K, 1),
                                c.inexact_constants, c.eps);
  }
}

}  // namespace

PreparedRun prepare(const ExperimentConfig& config) {
  config.validate();
  CompositeProblem problem =
      build_quadratic_instance(config.L, config.a, config.sigma * config.sigma, config.d,
                               config.noise);
  problem.psi = make_psi(config);
  if (config.inexact) {
    if (!problem.psi.is_differentiable()) {
      throw ConfigError(0, "prox.inexact needs a differentiable psi (zero or quadratic)");
    }
    problem.psi = problem.psi.with_gradient_noise(config.sigma2_psi);
  }
  problem.smooth.F_star = optimal_value(config);
  problem.validate();

  RunOptions options;
  options.method = config.method;
  options.K = config.K;
  options.batch = config.batch;
  options.x0 = Point(config.d, config.x0);
  options.init = config.init;
  options.budget = config.budget;
  options.weighting = config.sampler;
  if (config.inexact) {
    InexactProxOptions inner;
    inner.target_S = config.target_S;
    inner.max_iters = config.inner_max_iters;
    options.inexact = inner;
  }

  const double sigma2 = problem.noise_variance() / static_cast<double>(config.batch);
  const double a = lyapunov_a(config.variant, config.L, config.inexact_constants);
  double phi0 = 0.0;
  if (config.phi0) {
    phi0 = *config.phi0;
  } else {
    phi0 = initial_potential(problem, options.x0, config.init, a, config.batch);
  }
  if (!(phi0 > 0.0) && config.variant != ScheduleVariant::kManual) {
    throw ConfigError(0, "Phi_0 is not positive; set schedule.phi0 explicitly");
  }
  Schedule schedule = make_schedule(config, sigma2, phi0);
  options.lyapunov_a = schedule.lyapunov_a();
  return PreparedRun{std::move(problem), std::move(schedule), std::move(options), phi0};
}

std::filesystem::path output_directory(const ExperimentConfig& config) {
  if (config.output) return *config.output;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::filesystem::path("spgm_out");
}

}  // namespace spgm::harness
