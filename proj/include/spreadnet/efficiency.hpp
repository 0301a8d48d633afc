#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "spreadnet/types.hpp"

namespace spreadnet {

/// Knobs of the intervention-timing machinery: the score weights and log
/// bases, the coverage threshold and the end-of-spread detection rule.
struct EfficiencyParams {
    double eps1 = 0.812;
    double eps2 = 0.188;
    double a = 0.2121;  // response-cost log base
    double b = 0.3089;  // time-sensitivity log base
    double coverage = 0.95;
    double tf_epsilon = 5e-4;
    std::uint32_t tf_window = 5;

    void validate() const {
        if (std::abs(eps1 + eps2 - 1.0) > 1e-12)
            throw std::invalid_argument("efficiency weights must satisfy eps1 + eps2 = 1");
        if (eps1 <= 0.0 || eps1 >= 1.0 || eps2 <= 0.0 || eps2 >= 1.0)
            throw std::invalid_argument("efficiency weights must lie in (0,1)");
        if (a <= 0.0 || a >= 1.0 || b <= 0.0 || b >= 1.0)
            throw std::invalid_argument("log bases a and b must lie in (0,1)");
        if (coverage <= 0.0 || coverage > 1.0)
            throw std::invalid_argument("coverage threshold must lie in (0,1]");
        if (tf_epsilon < 0.0) throw std::invalid_argument("tf epsilon must be non-negative");
        if (tf_window == 0) throw std::invalid_argument("tf window must be positive");
    }
};

struct EfficiencyReport {
    double tau = 0.0;
    Verdict verdict = Verdict::None;
    double numerator_fraction = 0.0;
    double denominator = 0.0;
    double score = 0.0;
};

/// End-of-spread step: the smallest t whose trailing `window` density
/// differences are all below eps; nullopt when the series never settles.
inline std::optional<std::size_t> detect_tf(std::span<const double> series, double eps,
                                            std::uint32_t window) {
    if (series.size() < static_cast<std::size_t>(window) + 1)
        throw std::invalid_argument("detect_tf: series must be longer than the window");
    std::uint32_t quiet = 0;
    for (std::size_t u = 1; u < series.size(); ++u) {
        quiet = std::abs(series[u] - series[u - 1]) < eps ? quiet + 1 : 0;
        if (quiet >= window) return u;
    }
    return std::nullopt;
}

/// tau = t_a / t_f, the announcement position within the whole spread.
inline double intervention_position(std::size_t t_a, std::size_t t_f) {
    if (t_f == 0) throw std::invalid_argument("intervention_position: t_f must be positive");
    if (t_a > t_f) throw std::invalid_argument("intervention_position: t_a must not exceed t_f");
    return static_cast<double>(t_a) / static_cast<double>(t_f);
}

/// Response cost plus time-sensitivity: log_a(tau) + log_b(1-tau). Positive
/// on (0,1) for bases in (0,1) and divergent at both endpoints.
inline double timing_cost(double tau, const EfficiencyParams& p) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::domain_error("efficiency score: tau must lie strictly inside (0,1)");
    return std::log(tau) / std::log(p.a) + std::log1p(-tau) / std::log(p.b);
}

/// Efficiency of verifying true information: weighted time saved to reach
/// coverage, discounted by the timing cost.
inline EfficiencyReport score_true(double tau, double total_duration, double coverage_duration,
                                   const EfficiencyParams& p) {
    if (total_duration <= 0.0) throw std::invalid_argument("score_true: T0 must be positive");
    if (coverage_duration < 0.0) throw std::invalid_argument("score_true: Tt must be non-negative");
    EfficiencyReport r;
    r.tau = tau;
    r.verdict = Verdict::True;
    r.numerator_fraction = (total_duration - coverage_duration) / total_duration;
    r.denominator = timing_cost(tau, p);
    r.score = p.eps1 * r.numerator_fraction / r.denominator;
    return r;
}

/// Efficiency of debunking false information: weighted relative suppression
/// of the final known density, discounted by the timing cost.
inline EfficiencyReport score_false(double tau, double free_final_density,
                                    double suppressed_final_density, const EfficiencyParams& p) {
    if (free_final_density <= 0.0 || free_final_density > 1.0)
        throw std::invalid_argument("score_false: I0 must lie in (0,1]");
    if (suppressed_final_density < 0.0)
        throw std::invalid_argument("score_false: If must be non-negative");
    if (suppressed_final_density > free_final_density)
        throw std::domain_error("score_false: If must not exceed I0");
    EfficiencyReport r;
    r.tau = tau;
    r.verdict = Verdict::False;
    r.numerator_fraction = (free_final_density - suppressed_final_density) / free_final_density;
    r.denominator = timing_cost(tau, p);
    r.score = p.eps2 * r.numerator_fraction / r.denominator;
    return r;
}

}  // namespace spreadnet
