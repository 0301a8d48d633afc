#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spreadnet/dynamics.hpp"

namespace spreadnet {

/// Logistic mean-field inputs: initial known density and the effective mean
/// rate A (the unclamped average per-node spread rate over the known set).
struct MeanFieldParams {
    double i0;
    double effective_rate;

    void validate() const {
        if (!(i0 > 0.0 && i0 < 1.0))
            throw std::invalid_argument("mean field: i0 must lie strictly inside (0,1)");
        if (!std::isfinite(effective_rate))
            throw std::invalid_argument("mean field: effective rate must be finite");
    }
};

struct DensityPoint {
    double t;
    double s;
    double i;
};

/// Mean over the known set of the unclamped per-node rate, using the current
/// neutral confidence. Clamping is a transmission concern; the analytic rate
/// keeps the raw value.
inline double effective_rate(const SpreadState& st, const NetworkGraph& g,
                             const RateParams& rate) {
    if (st.known.empty())
        throw std::logic_error("effective_rate: no known nodes");
    const double c_mean = neutral_confidence(st);
    const double k_avg = g.avg_degree();
    const double inv_k_max = 1.0 / g.max_degree();
    double sum = 0.0;
    for (const NodeId p : st.known)
        sum += rate.lambda1 * (st.confidence[p] - c_mean) +
               rate.lambda2 * (st.credibility[p] * (g.degree(p) - k_avg) * inv_k_max);
    return sum / static_cast<double>(st.known.size());
}

/// Closed-form logistic density i(t) = i0*e^(At) / (1 - i0 + i0*e^(At)),
/// evaluated in the overflow-safe form i0 / (i0 + (1-i0)*e^(-At)).
inline DensityPoint closed_form_density(double t, const MeanFieldParams& p) {
    p.validate();
    if (t < 0.0) throw std::invalid_argument("closed_form_density: t must be non-negative");
    double i;
    if (t == 0.0 || p.effective_rate == 0.0) {
        i = p.i0;
    } else {
        // exp overflow saturates to inf and the quotient to 0; underflow to 1.
        i = p.i0 / (p.i0 + (1.0 - p.i0) * std::exp(-p.effective_rate * t));
    }
    return {t, 1.0 - i, i};
}

/// Fixed-step RK4 integration of di/dt = A*i*(1-i) from i(0)=i0, emitting
/// every grid point t = 0, dt, ..., up to t_max.
inline std::vector<DensityPoint> integrate_logistic(const MeanFieldParams& p, double t_max,
                                                    double dt) {
    p.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_logistic: dt must be positive");
    if (t_max < dt) throw std::invalid_argument("integrate_logistic: t_max must be at least dt");

    const auto f = [A = p.effective_rate](double i) { return A * i * (1.0 - i); };
    const std::size_t n_steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));

    std::vector<DensityPoint> out;
    out.reserve(n_steps + 1);
    double i = p.i0;
    out.push_back({0.0, 1.0 - i, i});
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double k1 = f(i);
        const double k2 = f(i + 0.5 * dt * k1);
        const double k3 = f(i + 0.5 * dt * k2);
        const double k4 = f(i + dt * k3);
        i += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push_back({k * dt, 1.0 - i, i});
    }
    return out;
}

}  // namespace spreadnet
