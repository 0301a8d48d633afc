// Command-line front door for the two-stage spreading simulator.
//
//   spreadnet simulate   run a scenario and export the mean trace / summary
//   spreadnet sweep      efficiency curve over a tau grid
//   spreadnet meanfield  logistic mean-field series (closed form or RK4)
//   spreadnet compare    align a simulated run with an external progress series
//   spreadnet graph-dump write a generated network as an edge list
//
// Flags override an optional JSON config file, which overrides the built-in
// defaults (the reference parameter setup).

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadnet/harness.hpp"
#include "spreadnet/meanfield.hpp"

namespace {

struct ScenarioArgs {
    std::string network = "ba";
    std::uint32_t n = 2000;
    double avg_degree = 5.0;
    double ws_p = 0.1;
    double i0 = 0.005;
    double lambda1 = 0.3875;
    double lambda2 = 0.1194;
    std::string beta = "free";
    double tau = 0.15;
    std::uint32_t replicates = 50;
    std::uint64_t seed = 1;
    std::uint64_t max_steps = 5000;
    std::uint32_t threads = 0;
    std::string config_path;
    std::string out;
    std::string format = "csv";

    std::map<std::string, CLI::Option*> opts;

    bool passed(const std::string& key) const {
        const auto it = opts.find(key);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_scenario_flags(CLI::App* cmd, ScenarioArgs& a) {
    a.opts["network"] = cmd->add_option("--network", a.network, "Network kind: ba or ws")
                            ->check(CLI::IsMember({"ba", "ws"}))
                            ->capture_default_str();
    a.opts["n"] = cmd->add_option("--n", a.n, "Number of nodes")->capture_default_str();
    a.opts["avg_degree"] =
        cmd->add_option("--avg-degree", a.avg_degree,
                        "Target mean degree (BA) or even lattice degree (WS)")
            ->capture_default_str();
    a.opts["ws_p"] =
        cmd->add_option("--ws-p", a.ws_p, "WS rewiring probability")->capture_default_str();
    a.opts["i0"] =
        cmd->add_option("--i0", a.i0, "Initial known density")->capture_default_str();
    a.opts["lambda1"] = cmd->add_option("--lambda1", a.lambda1, "Confidence rate coefficient")
                            ->capture_default_str();
    a.opts["lambda2"] = cmd->add_option("--lambda2", a.lambda2, "Credibility rate coefficient")
                            ->capture_default_str();
    a.opts["beta"] = cmd->add_option("--beta", a.beta, "Verdict: true, false or free")
                         ->check(CLI::IsMember({"true", "false", "free"}))
                         ->capture_default_str();
    a.opts["tau"] =
        cmd->add_option("--tau", a.tau, "Announcement position in (0,1)")->capture_default_str();
    a.opts["replicates"] =
        cmd->add_option("--replicates", a.replicates, "Replicate count")->capture_default_str();
    a.opts["seed"] = cmd->add_option("--seed", a.seed, "Base RNG seed")->capture_default_str();
    a.opts["max_steps"] =
        cmd->add_option("--max-steps", a.max_steps, "Step budget per run")->capture_default_str();
    a.opts["threads"] = cmd->add_option("--threads", a.threads, "Worker threads (0 = auto)")
                            ->capture_default_str();
    cmd->add_option("--config", a.config_path, "JSON config file (flag > file > default)");
}

// File values apply only where the flag was not passed.
void apply_config_file(ScenarioArgs& a, nlohmann::json* grid_out) {
    if (a.config_path.empty()) return;
    auto is = spreadnet::open_input(a.config_path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file '" + a.config_path + "': " + e.what());
    }
    const auto set = [&](const char* key, auto& var) {
        if (j.contains(key) && !a.passed(key)) var = j.at(key).get<std::decay_t<decltype(var)>>();
    };
    set("network", a.network);
    set("n", a.n);
    set("avg_degree", a.avg_degree);
    set("ws_p", a.ws_p);
    set("i0", a.i0);
    set("lambda1", a.lambda1);
    set("lambda2", a.lambda2);
    set("beta", a.beta);
    set("tau", a.tau);
    set("replicates", a.replicates);
    set("seed", a.seed);
    set("max_steps", a.max_steps);
    set("threads", a.threads);
    if (grid_out && j.contains("grid")) *grid_out = j.at("grid");
}

bool tau_provided(const ScenarioArgs& a) {
    if (a.passed("tau")) return true;
    if (a.config_path.empty()) return false;
    auto is = spreadnet::open_input(a.config_path);
    nlohmann::json j;
    is >> j;
    return j.contains("tau");
}

spreadnet::SimConfig build_config(const ScenarioArgs& a, bool tau_known) {
    spreadnet::SimConfig cfg;
    cfg.graph.kind = spreadnet::graph_kind_from_string(a.network);
    cfg.graph.n = a.n;
    cfg.graph.target_avg_degree = a.avg_degree;
    cfg.graph.rewire_prob = a.ws_p;
    cfg.graph.seed = a.seed;
    cfg.i0 = a.i0;
    cfg.rate.lambda1 = a.lambda1;
    cfg.rate.lambda2 = a.lambda2;
    cfg.beta = spreadnet::verdict_from_string(a.beta);
    if (tau_known) cfg.tau = a.tau;
    cfg.replicates = a.replicates;
    cfg.seed = a.seed;
    cfg.max_steps = a.max_steps;
    cfg.threads = a.threads;
    cfg.validate();
    return cfg;
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
        throw std::invalid_argument("grid must be lo:hi:step, e.g. 0.05:0.95:0.05");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(lo > 0.0 && hi < 1.0 && lo <= hi))
        throw std::invalid_argument("grid bounds must satisfy 0 < lo <= hi < 1");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    grid.reserve(count);
    for (std::size_t j = 0; j < count; ++j) grid.push_back(lo + static_cast<double>(j) * step);
    return grid;
}

int cmd_simulate(const ScenarioArgs& args_in) {
    ScenarioArgs args = args_in;
    apply_config_file(args, nullptr);
    const auto cfg = build_config(args, tau_provided(args) || args.beta != "free");
    const auto result = spreadnet::run_scenario(cfg);
    spreadnet::export_scenario(result, args.out, spreadnet::export_format_from_string(args.format));

    std::printf("final_i=%s", spreadnet::format_density(result.mean_final_density()).c_str());
    if (result.mean_trace.end_step) std::printf(" t_f=%zu", *result.mean_trace.end_step);
    if (result.mean_trace.announce_step) std::printf(" t_a=%zu", *result.mean_trace.announce_step);
    if (result.efficiency)
        std::printf(" score=%s", spreadnet::format_density(result.efficiency->score).c_str());
    std::printf(" converged=%s -> %s\n", result.converged ? "true" : "false", args.out.c_str());
    return 0;
}

int cmd_sweep(const ScenarioArgs& args_in, const std::string& grid_flag) {
    ScenarioArgs args = args_in;
    nlohmann::json grid_from_file;
    apply_config_file(args, &grid_from_file);
    std::string grid_spec = grid_flag;
    if (grid_spec.empty() && grid_from_file.is_string()) grid_spec = grid_from_file.get<std::string>();
    if (grid_spec.empty()) throw std::invalid_argument("sweep requires --grid lo:hi:step");

    auto cfg = build_config(args, true);
    if (cfg.beta == spreadnet::Verdict::None)
        throw std::invalid_argument("sweep requires --beta true or --beta false");
    const auto grid = parse_grid(grid_spec);
    const auto curve = spreadnet::sweep_tau(cfg, grid);
    spreadnet::export_curve(curve, args.out, spreadnet::export_format_from_string(args.format));

    double best_tau = grid.front(), best_score = -1e300;
    for (const auto& p : curve)
        if (!std::isnan(p.score) && p.score > best_score) {
            best_score = p.score;
            best_tau = p.tau;
        }
    std::printf("points=%zu argmax_tau=%s max_score=%s -> %s\n", curve.size(),
                spreadnet::format_density(best_tau).c_str(),
                spreadnet::format_density(best_score).c_str(), args.out.c_str());
    return 0;
}

int cmd_meanfield(double i0, double rate, double t_max, double dt, const std::string& method,
                  const std::string& out, const std::string& format) {
    spreadnet::MeanFieldParams params{i0, rate};
    std::vector<spreadnet::DensityPoint> series;
    if (method == "rk4") {
        series = spreadnet::integrate_logistic(params, t_max, dt);
    } else {
        const auto count = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
        series.reserve(count + 1);
        for (std::size_t k = 0; k <= count; ++k)
            series.push_back(spreadnet::closed_form_density(static_cast<double>(k) * dt, params));
    }
    auto os = spreadnet::open_output(out);
    if (spreadnet::export_format_from_string(format) == spreadnet::ExportFormat::CSV) {
        os << "t,s,i\n";
        for (const auto& p : series)
            os << spreadnet::format_density(p.t) << ',' << spreadnet::format_density(p.s) << ','
               << spreadnet::format_density(p.i) << '\n';
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : series) arr.push_back({{"t", p.t}, {"s", p.s}, {"i", p.i}});
        os << arr.dump(2) << '\n';
    }
    std::printf("points=%zu final_i=%s -> %s\n", series.size(),
                spreadnet::format_density(series.back().i).c_str(), out.c_str());
    return 0;
}

int cmd_compare(const ScenarioArgs& args_in, const std::string& external_path, bool normalize,
                std::size_t grid_points) {
    ScenarioArgs args = args_in;
    apply_config_file(args, nullptr);
    const auto cfg = build_config(args, tau_provided(args) || args.beta != "free");

    auto is = spreadnet::open_input(external_path);
    const auto external = spreadnet::read_external_series_csv(is, external_path);
    const auto result = spreadnet::run_scenario(cfg);
    const auto cmp = spreadnet::compare_series(result.mean_trace, external, normalize, grid_points);
    if (!args.out.empty()) {
        auto os = spreadnet::open_output(args.out);
        spreadnet::write_comparison_csv(os, cmp);
    }
    std::printf("sup_deviation=%s%s%s\n", spreadnet::format_density(cmp.sup_deviation).c_str(),
                args.out.empty() ? "" : " -> ", args.out.c_str());
    return 0;
}

int cmd_graph_dump(const ScenarioArgs& args_in) {
    ScenarioArgs args = args_in;
    apply_config_file(args, nullptr);
    spreadnet::GraphSpec spec;
    spec.kind = spreadnet::graph_kind_from_string(args.network);
    spec.n = args.n;
    spec.target_avg_degree = args.avg_degree;
    spec.rewire_prob = args.ws_p;
    spec.seed = args.seed;
    const auto g = spreadnet::generate(spec);
    auto os = spreadnet::open_output(args.out);
    g.write_edge_list(os);
    std::printf("nodes=%u edges=%zu avg_degree=%s max_degree=%u -> %s\n", g.node_count(),
                g.edge_count(), spreadnet::format_density(g.avg_degree()).c_str(), g.max_degree(),
                args.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage information spreading simulator with announcement control"};
    app.require_subcommand(1);

    ScenarioArgs sim_args, sweep_args, cmp_args, dump_args;
    std::string sweep_grid;
    std::string external_path;
    bool normalize = false;
    std::size_t grid_points = 201;
    double mf_i0 = 0.005, mf_rate = 0.1, mf_tmax = 100.0, mf_dt = 0.01;
    std::string mf_method = "closed", mf_out, mf_format = "csv";

    auto* simulate = app.add_subcommand("simulate", "Run a spreading scenario");
    add_scenario_flags(simulate, sim_args);
    simulate->add_option("--out", sim_args.out, "Output file")->required();
    simulate->add_option("--format", sim_args.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Efficiency curve over a tau grid");
    add_scenario_flags(sweep, sweep_args);
    sweep->add_option("--grid", sweep_grid, "Tau grid as lo:hi:step");
    sweep->add_option("--out", sweep_args.out, "Output file")->required();
    sweep->add_option("--format", sweep_args.format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* meanfield = app.add_subcommand("meanfield", "Logistic mean-field density series");
    meanfield->add_option("--i0", mf_i0, "Initial known density")->capture_default_str();
    meanfield->add_option("--rate", mf_rate, "Effective rate A")->capture_default_str();
    meanfield->add_option("--t-max", mf_tmax, "End time")->capture_default_str();
    meanfield->add_option("--dt", mf_dt, "Grid step")->capture_default_str();
    meanfield->add_option("--method", mf_method, "closed or rk4")
        ->check(CLI::IsMember({"closed", "rk4"}))
        ->capture_default_str();
    meanfield->add_option("--out", mf_out, "Output file")->required();
    meanfield->add_option("--format", mf_format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Compare a run against an external series");
    add_scenario_flags(compare, cmp_args);
    compare->add_option("--external", external_path, "External r_percent,density CSV")->required();
    compare->add_flag("--normalize", normalize, "Rescale both series by their final values");
    compare->add_option("--grid-points", grid_points, "Shared progress grid size")
        ->capture_default_str();
    compare->add_option("--out", cmp_args.out, "Aligned comparison CSV");

    auto* dump = app.add_subcommand("graph-dump", "Write a generated network as an edge list");
    add_scenario_flags(dump, dump_args);
    dump->add_option("--out", dump_args.out, "Output edge-list file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_grid);
        if (meanfield->parsed())
            return cmd_meanfield(mf_i0, mf_rate, mf_tmax, mf_dt, mf_method, mf_out, mf_format);
        if (compare->parsed()) return cmd_compare(cmp_args, external_path, normalize, grid_points);
        if (dump->parsed()) return cmd_graph_dump(dump_args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
