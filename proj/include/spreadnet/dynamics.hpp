#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spreadnet/config.hpp"
#include "spreadnet/efficiency.hpp"
#include "spreadnet/graph.hpp"
#include "spreadnet/rng.hpp"
#include "spreadnet/types.hpp"

namespace spreadnet {

/// Mutable epidemic state: per-node compartment plus confidence c in [0,1]
/// and credibility r in [-0.5, 0.5] (both meaningful only while Known), the
/// global phase marker and the step clock. `known` lists Known nodes in
/// infection order; it only ever grows.
struct SpreadState {
    std::vector<NodeState> state;
    std::vector<double> confidence;
    std::vector<double> credibility;
    std::vector<NodeId> known;
    Phase phase = Phase::Unconfirmed;
    Verdict verdict = Verdict::None;
    std::size_t step_clock = 0;
    std::optional<std::size_t> announce_step;

    std::size_t known_count() const { return known.size(); }
    double known_density() const {
        return static_cast<double>(known.size()) / static_cast<double>(state.size());
    }
};

/// Per-step density series of one run, with the announcement and
/// end-of-spread markers. s(t) = 1 - i(t) throughout.
struct SpreadTrace {
    std::vector<double> known_density;  // i(t), indexed by step
    std::optional<std::size_t> announce_step;  // t_a
    std::optional<std::size_t> end_step;       // t_f
    bool converged = false;
    Verdict verdict = Verdict::None;

    std::size_t steps() const { return known_density.size(); }
    double unknown_density(std::size_t t) const { return 1.0 - known_density[t]; }
    double final_known_density() const { return known_density.back(); }

    /// First step at which i(t) reached the threshold, if ever.
    std::optional<std::size_t> steps_to_coverage(double threshold) const {
        for (std::size_t t = 0; t < known_density.size(); ++t)
            if (known_density[t] >= threshold) return t;
        return std::nullopt;
    }
};

/// Seed max(1, round(i0*N)) distinct nodes as Known, each with confidence
/// drawn uniform on [0,1) and credibility 0. Everything else starts Unknown
/// in the unconfirmed phase.
inline SpreadState init_population(const NetworkGraph& g, double i0, Rng& rng) {
    if (!(i0 > 0.0 && i0 < 1.0))
        throw std::invalid_argument("init_population: i0 must lie strictly inside (0,1)");
    const NodeId n = g.node_count();
    const std::size_t seeds =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(i0 * n)));

    SpreadState st;
    st.state.assign(n, NodeState::Unknown);
    st.confidence.assign(n, 0.0);
    st.credibility.assign(n, 0.0);
    st.known.reserve(n);

    // Partial Fisher-Yates over the id range gives a uniform distinct sample.
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    for (std::size_t j = 0; j < seeds; ++j) {
        const std::size_t pick = j + rng.below(n - j);
        std::swap(ids[j], ids[pick]);
        const NodeId p = ids[j];
        st.state[p] = NodeState::Known;
        st.confidence[p] = rng.uniform01();
        st.known.push_back(p);
    }
    return st;
}

/// Neutral confidence <c>: mean confidence of the known sub-network before
/// the announcement, pinned to 0.5 afterwards.
inline double neutral_confidence(const SpreadState& st) {
    if (st.phase == Phase::Confirmed) return 0.5;
    if (st.known.empty())
        throw std::logic_error("neutral_confidence: no known nodes in the unconfirmed phase");
    double sum = 0.0;
    for (const NodeId p : st.known) sum += st.confidence[p];
    return sum / static_cast<double>(st.known.size());
}

/// Per-spreader transmission probability:
/// clamp(lambda1*(c_p - <c>) + lambda2*(r_p*(k_p - <k>)/k_max), 0, 1).
inline double spread_rate(NodeId p, const SpreadState& st, const NetworkGraph& g, double c_mean,
                          const RateParams& rate) {
    const double influence = (g.degree(p) - g.avg_degree()) / g.max_degree();
    const double raw =
        rate.lambda1 * (st.confidence[p] - c_mean) + rate.lambda2 * (st.credibility[p] * influence);
    return std::clamp(raw, 0.0, 1.0);
}

/// Announcement correction: reward nodes whose stance matches the verdict
/// with credibility |c - 0.5| and push their confidence further in that
/// direction; punish the others and resample their confidence on the
/// verdict's side. Switches the state into the confirmed phase.
inline void correct_confidence(SpreadState& st, Verdict beta, Rng& rng) {
    if (st.phase != Phase::Unconfirmed)
        throw std::logic_error("correct_confidence: announcement already applied");
    if (beta == Verdict::None)
        throw std::invalid_argument("correct_confidence: verdict must be true or false");

    for (const NodeId p : st.known) {
        const double c = st.confidence[p];
        const double dif = std::abs(c - 0.5);
        if (beta == Verdict::True) {
            if (c < 0.5) {
                st.credibility[p] -= dif;
                st.confidence[p] = rng.uniform(0.5, 1.0);
            } else {
                st.credibility[p] += dif;
                st.confidence[p] = std::min(1.0, c + rng.uniform(0.0, 0.5));
            }
        } else {
            if (c > 0.5) {
                st.credibility[p] -= dif;
                st.confidence[p] = rng.uniform(0.0, 0.5);
            } else {
                st.credibility[p] += dif;
                st.confidence[p] = std::max(0.0, c - rng.uniform(0.0, 0.5));
            }
        }
    }
    st.phase = Phase::Confirmed;
    st.verdict = beta;
    st.announce_step = st.step_clock;
}

namespace detail {

inline double draw_confidence(Phase phase, Verdict verdict, Rng& rng) {
    if (phase == Phase::Unconfirmed) return rng.uniform01();
    return verdict == Verdict::True ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, 0.5);
}

}  // namespace detail

/// One synchronous step: every node Known at step start attempts to infect
/// each of its Unknown neighbors independently with its own spread rate.
/// Nodes infected this step draw a confidence matching the current phase and
/// transmit from the next step on. Returns the number of new Known nodes.
inline std::size_t step(SpreadState& st, const NetworkGraph& g, const RateParams& rate, Rng& rng) {
    const double c_mean = neutral_confidence(st);
    const std::size_t spreaders = st.known.size();  // snapshot: later entries joined mid-step
    const double k_avg = g.avg_degree();
    const double inv_k_max = 1.0 / g.max_degree();

    std::size_t newly_known = 0;
    for (std::size_t idx = 0; idx < spreaders; ++idx) {
        const NodeId p = st.known[idx];
        const double raw = rate.lambda1 * (st.confidence[p] - c_mean) +
                           rate.lambda2 * (st.credibility[p] * (g.degree(p) - k_avg) * inv_k_max);
        const double alpha = std::clamp(raw, 0.0, 1.0);
        if (alpha <= 0.0) continue;
        for (const NodeId q : g.neighbors(p)) {
            if (st.state[q] != NodeState::Unknown) continue;
            if (rng.uniform01() < alpha) {
                st.state[q] = NodeState::Known;
                st.confidence[q] = detail::draw_confidence(st.phase, st.verdict, rng);
                st.credibility[q] = 0.0;
                st.known.push_back(q);
                ++newly_known;
            }
        }
    }
    ++st.step_clock;
    return newly_known;
}

/// Full two-stage run: seed the population, spread step by step, apply the
/// announcement at `announce_at` (if given), and stop once the density has
/// been quiet for the configured window or max_steps is hit. The trace is a
/// pure function of (graph, config, announce_at).
inline SpreadTrace run(const NetworkGraph& g, const SimConfig& config,
                       std::optional<std::size_t> announce_at) {
    if (announce_at && config.beta == Verdict::None)
        throw std::invalid_argument("run: an announcement step requires a true/false verdict");

    Rng rng(config.seed);
    SpreadState st = init_population(g, config.i0, rng);

    SpreadTrace trace;
    trace.known_density.reserve(1024);
    trace.known_density.push_back(st.known_density());

    std::uint32_t quiet = 0;
    while (true) {
        if (announce_at && st.phase == Phase::Unconfirmed && st.step_clock == *announce_at) {
            correct_confidence(st, config.beta, rng);
            trace.announce_step = st.announce_step;
        }
        if (st.step_clock >= config.max_steps) break;  // converged stays false

        step(st, g, config.rate, rng);
        const double density = st.known_density();
        const double diff = std::abs(density - trace.known_density.back());
        trace.known_density.push_back(density);
        quiet = diff < config.eff.tf_epsilon ? quiet + 1 : 0;
        if (quiet >= config.eff.tf_window) {
            trace.end_step = st.step_clock;
            trace.converged = true;
            break;
        }
    }
    trace.verdict = st.verdict;  // None when the announcement never fired
    return trace;
}

}  // namespace spreadnet
