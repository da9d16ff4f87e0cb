#include "spgm/harness/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "spgm/diagnostics.hpp"

namespace spgm::harness {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<RunResult> run_seeds(const PreparedRun& prepared,
                                 const std::vector<std::uint64_t>& seeds) {
  std::vector<RunResult> runs(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    runs[i] = run(prepared.problem, prepared.schedule, prepared.options, seeds[i]);
  });
  return runs;
}

std::vector<double> moving_average(const std::vector<double>& values, std::size_t window) {
  std::vector<double> out(values.size());
  if (window == 0) window = 1;
  // Direct sums: a running sum drifts over long traces.
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t from = k + 1 >= window ? k + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = from; j <= k; ++j) s += values[j];
    out[k] = s / static_cast<double>(k + 1 - from);
  }
  return out;
}

namespace {

void fill_stats(FieldStats& stats, const std::vector<RunResult>& runs, std::size_t n,
                double IterateRecord::*field) {
  stats.mean.resize(n);
  stats.stderr_.resize(n);
  std::vector<double> column(runs.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t s = 0; s < runs.size(); ++s) column[s] = runs[s].records[k].*field;
    const MeanStderr ms = mean_stderr(column);
    stats.mean[k] = ms.mean;
    stats.stderr_[k] = ms.stderr_;
  }
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

SeedAggregate aggregate(const std::vector<RunResult>& runs) {
  SeedAggregate agg;
  if (runs.empty()) return agg;
  std::size_t n = runs.front().records.size();
  for (const auto& r : runs) n = std::min(n, r.records.size());
  for (std::size_t k = 0; k < n; ++k) {
    agg.k.push_back(runs.front().records[k].k);
    agg.oracle_calls.push_back(runs.front().records[k].oracle_calls);
  }
  fill_stats(agg.grad_norm_sq, runs, n, &IterateRecord::grad_norm_sq);
  fill_stats(agg.F_gap, runs, n, &IterateRecord::F_gap);
  fill_stats(agg.delta, runs, n, &IterateRecord::delta);
  fill_stats(agg.phi, runs, n, &IterateRecord::phi);
  return agg;
}

std::optional<std::size_t> first_reach(const std::vector<double>& curve, double tolerance) {
  for (std::size_t k = 1; k < curve.size(); ++k) {
    if (curve[k] <= tolerance) return k;
  }
  return std::nullopt;
}

std::string trace_csv(const std::vector<IterateRecord>& records, std::size_t window) {
  std::vector<double> grad(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) grad[i] = records[i].grad_norm_sq;
  const std::vector<double> smooth = moving_average(grad, window);
  std::string out =
      "k,oracle_calls,F_gap,grad_norm_sq,delta,R,phi,M_k,gamma_k,grad_norm_sq_smoothed\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const IterateRecord& r = records[i];
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.k, r.oracle_calls, num(r.F_gap),
                       num(r.grad_norm_sq), num(r.delta), num(r.R), num(r.phi), num(r.M),
                       num(r.gamma), num(smooth[i]));
  }
  return out;
}

std::string summary_csv(const SeedAggregate& agg, std::size_t window) {
  const std::vector<double> smooth = moving_average(agg.grad_norm_sq.mean, window);
  std::string out =
      "k,oracle_calls,grad_norm_sq_mean,grad_norm_sq_stderr,grad_norm_sq_smoothed,"
      "F_gap_mean,F_gap_stderr,delta_mean,delta_stderr,phi_mean,phi_stderr\n";
  for (std::size_t i = 0; i < agg.k.size(); ++i) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", agg.k[i], agg.oracle_calls[i],
                       num(agg.grad_norm_sq.mean[i]), num(agg.grad_norm_sq.stderr_[i]),
                       num(smooth[i]), num(agg.F_gap.mean[i]), num(agg.F_gap.stderr_[i]),
                       num(agg.delta.mean[i]), num(agg.delta.stderr_[i]),
                       num(agg.phi.mean[i]), num(agg.phi.stderr_[i]));
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << content;
  if (!out) throw InvalidInput("failed while writing " + path.string());
}

const char* method_name(Method m) { return m == Method::kVanilla ? "vanilla" : "momentum"; }

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::optional<std::filesystem::path>& out_dir) {
  ExperimentResult result{prepare(config), {}, {}, false, std::nullopt, {}, {}};
  result.runs = run_seeds(result.prepared, config.seeds);
  result.aggregate = aggregate(result.runs);
  result.first_k = first_reach(result.aggregate.grad_norm_sq.mean, config.tolerance);
  result.reached = result.first_k.has_value();

  const ScheduleParams p0 = result.prepared.schedule.at(0);
  std::size_t floor_violations = 0;
  std::size_t unverified = 0;
  std::vector<double> sampled;
  for (const RunResult& r : result.runs) {
    floor_violations += r.floor_violations;
    unverified += r.unverified_prox_steps;
    if (r.output_record) sampled.push_back(r.output_record->grad_norm_sq);
  }
  const auto& mean = result.aggregate.grad_norm_sq.mean;

  nlohmann::ordered_json j;
  j["method"] = method_name(config.method);
  j["schedule"] = std::string(variant_name(config.variant));
  j["M_0"] = p0.M;
  j["gamma_0"] = p0.gamma;
  j["phi0"] = result.prepared.phi0;
  j["lyapunov_a"] = result.prepared.options.lyapunov_a.value_or(0.0);
  j["K"] = config.K;
  j["batch"] = config.batch;
  j["seeds"] = config.seeds.size();
  j["smoothing_window"] = config.smoothing_window;
  j["tolerance"] = config.tolerance;
  j["reached"] = result.reached;
  j["first_k_reached"] = result.first_k ? nlohmann::ordered_json(*result.first_k) : nullptr;
  j["final_grad_norm_sq_mean"] = mean.empty() ? nlohmann::ordered_json(nullptr)
                                              : nlohmann::ordered_json(mean.back());
  j["sampled_output_grad_norm_sq_mean"] =
      sampled.empty() ? nlohmann::ordered_json(nullptr)
                      : nlohmann::ordered_json(mean_stderr(sampled).mean);
  j["floor_violations"] = floor_violations;
  j["unverified_prox_steps"] = unverified;
  j["f_gap_relative"] = !result.prepared.problem.smooth.F_star.has_value();
  result.summary_json = j.dump(2) + "\n";

  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (ec) throw InvalidInput("cannot create output directory " + out_dir->string());
    for (std::size_t s = 0; s < result.runs.size(); ++s) {
      const auto path = *out_dir / fmt::format("trace_seed{}.csv", config.seeds[s]);
      write_file(path, trace_csv(result.runs[s].records, config.smoothing_window));
      result.files.push_back(path);
    }
    const auto summary = *out_dir / "summary.csv";
    write_file(summary, summary_csv(result.aggregate, config.smoothing_window));
    result.files.push_back(summary);
    const auto json_path = *out_dir / "summary.json";
    write_file(json_path, result.summary_json);
    result.files.push_back(json_path);
  }
  return result;
}

}  // namespace spgm::harness
