#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spreadnet/config.hpp"
#include "spreadnet/dynamics.hpp"
#include "spreadnet/efficiency.hpp"
#include "spreadnet/graph.hpp"
#include "spreadnet/io.hpp"

namespace spreadnet {

namespace detail {

/// Run fn(0..count-1) on a worker pool. Work items are independent; callers
/// write results into index-addressed slots so aggregation order never
/// depends on scheduling.
inline void parallel_for(std::size_t count, std::uint32_t threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || count <= 1) {
        for (std::size_t j = 0; j < count; ++j) fn(j);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= count) return;
            try {
                fn(j);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min<std::size_t>(threads, count);
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Free-spread reference set: one trace per replicate, with the effective
/// end-of-spread step (last step when a run hit max_steps unconverged) and
/// final density. Intervention runs are paired against these.
struct Baseline {
    std::vector<SpreadTrace> traces;
    std::vector<std::size_t> end_steps;
    std::vector<double> final_densities;

    double mean_end_step() const {
        double sum = 0.0;
        for (const std::size_t t : end_steps) sum += static_cast<double>(t);
        return sum / static_cast<double>(end_steps.size());
    }
    double mean_final_density() const {
        double sum = 0.0;
        for (const double d : final_densities) sum += d;
        return sum / static_cast<double>(final_densities.size());
    }
};

/// Pointwise mean of the traces after padding each one with its final value
/// to the longest length.
inline std::vector<double> average_replicates(std::span<const SpreadTrace> traces) {
    if (traces.empty()) throw std::invalid_argument("average_replicates: no traces");
    std::size_t max_len = 0;
    for (const auto& tr : traces) max_len = std::max(max_len, tr.steps());
    std::vector<double> mean(max_len, 0.0);
    for (const auto& tr : traces)
        for (std::size_t t = 0; t < max_len; ++t)
            mean[t] += t < tr.steps() ? tr.known_density[t] : tr.final_known_density();
    for (double& v : mean) v /= static_cast<double>(traces.size());
    return mean;
}

/// Run the free-spread replicate set. Replicate k draws from stream seed+k.
inline Baseline run_baseline(const NetworkGraph& g, const SimConfig& config) {
    Baseline base;
    base.traces.resize(config.replicates);
    detail::parallel_for(config.replicates, config.threads, [&](std::size_t k) {
        SimConfig rep = config;
        rep.beta = Verdict::None;
        rep.tau.reset();
        rep.seed = config.seed + k;
        base.traces[k] = run(g, rep, std::nullopt);
    });
    base.end_steps.reserve(config.replicates);
    base.final_densities.reserve(config.replicates);
    for (const auto& tr : base.traces) {
        base.end_steps.push_back(tr.end_step.value_or(tr.steps() - 1));
        base.final_densities.push_back(tr.final_known_density());
    }
    return base;
}

/// Aggregated scenario outcome: the replicate traces, their padded mean with
/// derived markers, per-replicate finals, the paired baseline statistics and
/// the efficiency report when a verdict was applied.
struct ScenarioResult {
    std::vector<SpreadTrace> traces;
    SpreadTrace mean_trace;
    std::vector<double> final_densities;
    std::vector<std::size_t> baseline_end_steps;
    std::vector<double> baseline_final_densities;
    std::optional<double> tau;
    Verdict verdict = Verdict::None;
    bool converged = false;
    std::optional<EfficiencyReport> efficiency;

    double mean_final_density() const {
        double sum = 0.0;
        for (const double d : final_densities) sum += d;
        return sum / static_cast<double>(final_densities.size());
    }
};

namespace detail {

inline SpreadTrace make_mean_trace(std::span<const SpreadTrace> traces,
                                   const EfficiencyParams& eff) {
    SpreadTrace mean;
    mean.known_density = average_replicates(traces);
    double announce_sum = 0.0;
    std::size_t announce_n = 0;
    bool all_converged = true;
    for (const auto& tr : traces) {
        if (tr.announce_step) {
            announce_sum += static_cast<double>(*tr.announce_step);
            ++announce_n;
        }
        all_converged = all_converged && tr.converged;
        if (mean.verdict == Verdict::None) mean.verdict = tr.verdict;
    }
    if (announce_n > 0)
        mean.announce_step = static_cast<std::size_t>(std::llround(announce_sum / announce_n));
    if (mean.known_density.size() > eff.tf_window)
        mean.end_step = detect_tf(mean.known_density, eff.tf_epsilon, eff.tf_window);
    mean.converged = all_converged;
    return mean;
}

inline std::optional<EfficiencyReport> evaluate_efficiency(const SimConfig& config, double tau,
                                                           const Baseline& base,
                                                           std::span<const SpreadTrace> traces) {
    if (config.beta == Verdict::True) {
        // T0: free-spread duration; Tt: steps to basic global coverage.
        double sum = 0.0;
        std::size_t n_covered = 0;
        for (const auto& tr : traces) {
            if (const auto t = tr.steps_to_coverage(config.eff.coverage)) {
                sum += static_cast<double>(*t);
                ++n_covered;
            }
        }
        if (n_covered == 0) {
            // Coverage never materialized: no efficiency gain.
            EfficiencyReport r;
            r.tau = tau;
            r.verdict = Verdict::True;
            r.denominator = timing_cost(tau, config.eff);
            return r;
        }
        return score_true(tau, base.mean_end_step(), sum / n_covered, config.eff);
    }
    double sum = 0.0;
    for (const auto& tr : traces) sum += tr.final_known_density();
    const double suppressed = sum / static_cast<double>(traces.size());
    return score_false(tau, base.mean_final_density(), suppressed, config.eff);
}

}  // namespace detail

/// Run one scenario against a precomputed baseline. For a true/false verdict
/// the announcement of replicate k is scheduled at round(tau * t_f(k)) of its
/// paired baseline run, and the efficiency score is attached.
inline ScenarioResult run_scenario(const NetworkGraph& g, const SimConfig& config,
                                   const Baseline& base) {
    config.validate();
    if (base.traces.size() != config.replicates)
        throw std::invalid_argument("run_scenario: baseline replicate count mismatch");

    ScenarioResult result;
    result.verdict = config.beta;
    result.baseline_end_steps = base.end_steps;
    result.baseline_final_densities = base.final_densities;

    if (config.beta == Verdict::None) {
        result.traces = base.traces;
    } else {
        result.tau = config.tau;
        result.traces.resize(config.replicates);
        detail::parallel_for(config.replicates, config.threads, [&](std::size_t k) {
            SimConfig rep = config;
            rep.seed = config.seed + k;
            const auto announce_at =
                static_cast<std::size_t>(std::llround(*config.tau * base.end_steps[k]));
            result.traces[k] = run(g, rep, announce_at);
        });
    }

    result.final_densities.reserve(result.traces.size());
    for (const auto& tr : result.traces) result.final_densities.push_back(tr.final_known_density());
    result.mean_trace = detail::make_mean_trace(result.traces, config.eff);
    result.converged = result.mean_trace.converged;
    if (config.beta != Verdict::None)
        result.efficiency = detail::evaluate_efficiency(config, *config.tau, base, result.traces);
    return result;
}

/// Convenience entry point: generate the graph, run the free-spread baseline,
/// then the scenario itself. A pure function of the config.
inline ScenarioResult run_scenario(const SimConfig& config) {
    config.validate();
    GraphSpec spec = config.graph;
    const NetworkGraph g = generate(spec);
    const Baseline base = run_baseline(g, config);
    return run_scenario(g, config, base);
}

struct EfficiencyCurvePoint {
    double tau;
    double score;  // NaN when the scenario failed at this grid point
    std::optional<EfficiencyReport> report;
};

/// Efficiency curve over a tau grid. The graph and the free-spread baseline
/// are shared across grid points; per-point scenario errors are recorded as
/// NaN scores without aborting the sweep.
inline std::vector<EfficiencyCurvePoint> sweep_tau(const SimConfig& config,
                                                   const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep_tau: empty tau grid");
    if (config.beta == Verdict::None)
        throw std::invalid_argument("sweep_tau: sweeping requires a true/false verdict");
    for (const double tau : grid)
        if (!(tau > 0.0 && tau < 1.0))
            throw std::invalid_argument("sweep_tau: grid values must lie strictly inside (0,1)");

    SimConfig probe = config;
    probe.tau = grid.front();
    probe.validate();

    const NetworkGraph g = generate(probe.graph);
    const Baseline base = run_baseline(g, probe);

    std::vector<EfficiencyCurvePoint> curve;
    curve.reserve(grid.size());
    for (const double tau : grid) {
        SimConfig point = config;
        point.tau = tau;
        EfficiencyCurvePoint entry{tau, std::nan(""), std::nullopt};
        try {
            const ScenarioResult result = run_scenario(g, point, base);
            if (result.efficiency) {
                entry.report = result.efficiency;
                entry.score = result.efficiency->score;
            }
        } catch (const std::domain_error&) {
            // keep the NaN marker; later grid points still run
        }
        curve.push_back(entry);
    }
    return curve;
}

/// Simulated trace against an externally observed progress series, resampled
/// onto a shared R = 100*t/t_f grid.
struct SeriesComparison {
    std::vector<double> r_grid;
    std::vector<double> sim_density;
    std::vector<double> ext_density;
    std::vector<double> sim_growth;  // first differences
    std::vector<double> ext_growth;
    double sup_deviation = 0.0;
};

namespace detail {

inline double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double span = xs[hi] - xs[lo];
    if (span <= 0.0) return ys[hi];
    const double w = (x - xs[lo]) / span;
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace detail

/// Map the simulated mean trace onto spreading progress, optionally rescale
/// both series by their final values, resample linearly onto a uniform R
/// grid and report densities, growth rates and the sup-norm deviation.
inline SeriesComparison compare_series(const SpreadTrace& sim, const ExternalSeries& external,
                                       bool normalize = false, std::size_t grid_points = 201) {
    if (grid_points < 2) throw std::invalid_argument("compare_series: need at least 2 grid points");
    if (external.r_percent.size() != external.density.size() || external.r_percent.empty())
        throw std::invalid_argument("compare_series: malformed external series");
    for (std::size_t j = 0; j < external.r_percent.size(); ++j) {
        if (external.r_percent[j] < 0.0 || external.r_percent[j] > 100.0)
            throw std::invalid_argument("compare_series: external progress must lie in [0,100]");
        if (j > 0 && external.r_percent[j] < external.r_percent[j - 1])
            throw std::invalid_argument("compare_series: external progress must be non-decreasing");
        if (j > 0 && external.density[j] < external.density[j - 1] - 1e-12)
            throw std::invalid_argument("compare_series: external densities must be non-decreasing");
    }
    if (sim.steps() < 2) throw std::invalid_argument("compare_series: simulated trace too short");

    const std::size_t t_f = sim.end_step.value_or(sim.steps() - 1);
    const double denom = t_f > 0 ? static_cast<double>(t_f) : 1.0;
    std::vector<double> sim_r(sim.steps());
    for (std::size_t t = 0; t < sim.steps(); ++t) sim_r[t] = 100.0 * static_cast<double>(t) / denom;

    std::vector<double> sim_d = sim.known_density;
    std::vector<double> ext_d = external.density;
    if (normalize) {
        const double sim_final = sim_d.back();
        const double ext_final = ext_d.back();
        if (sim_final <= 0.0 || ext_final <= 0.0)
            throw std::invalid_argument("compare_series: cannot normalize a zero series");
        for (double& v : sim_d) v /= sim_final;
        for (double& v : ext_d) v /= ext_final;
    }

    SeriesComparison cmp;
    cmp.r_grid.resize(grid_points);
    cmp.sim_density.resize(grid_points);
    cmp.ext_density.resize(grid_points);
    for (std::size_t j = 0; j < grid_points; ++j) {
        const double r = 100.0 * static_cast<double>(j) / static_cast<double>(grid_points - 1);
        cmp.r_grid[j] = r;
        cmp.sim_density[j] = detail::interpolate(sim_r, sim_d, r);
        cmp.ext_density[j] = detail::interpolate(external.r_percent, ext_d, r);
        cmp.sup_deviation =
            std::max(cmp.sup_deviation, std::abs(cmp.sim_density[j] - cmp.ext_density[j]));
    }
    cmp.sim_growth.resize(grid_points, 0.0);
    cmp.ext_growth.resize(grid_points, 0.0);
    for (std::size_t j = 1; j < grid_points; ++j) {
        cmp.sim_growth[j] = cmp.sim_density[j] - cmp.sim_density[j - 1];
        cmp.ext_growth[j] = cmp.ext_density[j] - cmp.ext_density[j - 1];
    }
    return cmp;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

inline void write_curve_csv(std::ostream& os, std::span<const EfficiencyCurvePoint> curve) {
    os << "tau,score\n";
    for (const auto& p : curve)
        os << format_density(p.tau) << ',' << format_density(p.score) << '\n';
}

inline void write_comparison_csv(std::ostream& os, const SeriesComparison& cmp) {
    os << "r_percent,sim_density,ext_density,sim_growth,ext_growth\n";
    for (std::size_t j = 0; j < cmp.r_grid.size(); ++j)
        os << format_density(cmp.r_grid[j]) << ',' << format_density(cmp.sim_density[j]) << ','
           << format_density(cmp.ext_density[j]) << ',' << format_density(cmp.sim_growth[j]) << ','
           << format_density(cmp.ext_growth[j]) << '\n';
}

inline nlohmann::json scenario_summary_json(const ScenarioResult& result) {
    nlohmann::json j;
    j["t_a"] = result.mean_trace.announce_step ? nlohmann::json(*result.mean_trace.announce_step)
                                               : nlohmann::json(nullptr);
    j["t_f"] = result.mean_trace.end_step ? nlohmann::json(*result.mean_trace.end_step)
                                          : nlohmann::json(nullptr);
    j["final_i"] = result.mean_final_density();
    j["converged"] = result.converged;
    j["verdict"] = to_string(result.verdict);
    j["tau"] = result.tau ? nlohmann::json(*result.tau) : nlohmann::json(nullptr);
    j["score"] =
        result.efficiency ? nlohmann::json(result.efficiency->score) : nlohmann::json(nullptr);
    j["replicates"] = result.traces.size();
    return j;
}

inline nlohmann::json curve_json(std::span<const EfficiencyCurvePoint> curve) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : curve) {
        nlohmann::json entry;
        entry["tau"] = p.tau;
        entry["score"] = std::isnan(p.score) ? nlohmann::json(nullptr) : nlohmann::json(p.score);
        arr.push_back(entry);
    }
    return arr;
}

enum class ExportFormat : std::uint8_t { CSV, JSON };

inline ExportFormat export_format_from_string(const std::string& s) {
    if (s == "csv") return ExportFormat::CSV;
    if (s == "json") return ExportFormat::JSON;
    throw std::invalid_argument("unknown format '" + s + "' (expected csv or json)");
}

/// Write a scenario result: CSV emits the mean trace, JSON the run summary.
inline void export_scenario(const ScenarioResult& result, const std::string& path,
                            ExportFormat format) {
    auto os = open_output(path);
    if (format == ExportFormat::CSV)
        write_trace_csv(os, result.mean_trace);
    else
        os << scenario_summary_json(result).dump(2) << '\n';
}

inline void export_curve(std::span<const EfficiencyCurvePoint> curve, const std::string& path,
                         ExportFormat format) {
    auto os = open_output(path);
    if (format == ExportFormat::CSV)
        write_curve_csv(os, curve);
    else
        os << curve_json(curve).dump(2) << '\n';
}

}  // namespace spreadnet
