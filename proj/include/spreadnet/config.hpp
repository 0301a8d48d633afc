#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "spreadnet/efficiency.hpp"
#include "spreadnet/graph.hpp"
#include "spreadnet/types.hpp"

namespace spreadnet {

/// Coefficients of the per-node spreading rate: lambda1 weighs confidence,
/// lambda2 weighs credibility and degree influence.
struct RateParams {
    double lambda1 = 0.3875;
    double lambda2 = 0.1194;

    void validate() const {
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
            throw std::invalid_argument("rate coefficients must be finite and non-negative");
    }
};

/// Full run recipe. Defaults reproduce the reference experiment setup:
/// BA network with N=2000 and mean degree 5, i0=0.005, lambda1=0.3875,
/// lambda2=0.1194, eps1=0.812, eps2=0.188, a=0.2121, b=0.3089.
struct SimConfig {
    GraphSpec graph;
    double i0 = 0.005;
    RateParams rate;
    Verdict beta = Verdict::None;
    std::optional<double> tau;
    std::uint32_t replicates = 50;
    std::uint64_t seed = 1;
    std::size_t max_steps = 5000;
    std::uint32_t threads = 0;  // 0 = hardware concurrency
    EfficiencyParams eff;

    void validate() const {
        if (!(i0 > 0.0 && i0 < 1.0))
            throw std::invalid_argument("i0 must lie strictly inside (0,1)");
        rate.validate();
        if (beta != Verdict::None) {
            if (!tau) throw std::invalid_argument("a true/false verdict requires tau");
            if (!(*tau > 0.0 && *tau < 1.0))
                throw std::invalid_argument("tau must lie strictly inside (0,1)");
        }
        if (replicates == 0) throw std::invalid_argument("replicates must be positive");
        if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
        eff.validate();
    }
};

}  // namespace spreadnet
