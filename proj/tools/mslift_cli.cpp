// mslift: lifted filtering of multiset rewriting systems from scenario files.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mslift/mslift.hpp"

namespace {

using namespace mslift;

enum Exit : int {
    kOk = 0,
    kFailure = 1,
    kModelError = 2,
    kResourceLimit = 3,
    kImpossible = 4,
};

struct CommonArgs {
    std::string scenario;
    std::string out = "-";
    std::string format = "csv";
    bool with_oracle = false;
    std::optional<double> prune;
    std::optional<std::size_t> budget;
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--scenario", a.scenario, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "Output path, '-' for stdout")->capture_default_str();
    cmd->add_option("--format", a.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--prune", a.prune, "Drop lifted states below this posterior weight");
    cmd->add_option("--budget", a.budget, "Split and compound-enumeration budget");
    cmd->add_option("--seed", a.seed, "Random seed (overrides the scenario)");
    cmd->add_flag("--timing", a.timing, "Record wall time per step (metrics are then not reproducible)");
}

Scenario load(const CommonArgs& a) {
    Scenario sc = load_scenario(a.scenario);
    if (a.prune) sc.options.prune = *a.prune;
    if (a.budget) sc.options.split_budget = sc.options.amca_budget = *a.budget;
    if (a.seed) sc.options.seed = *a.seed;
    return sc;
}

void write_out(const std::string& path, const std::string& text) {
    if (path == "-")
        std::cout << text << std::flush;
    else
        write_text_file(path, text);
}

MetricsFormat metrics_format(const std::string& f) { return f == "json" ? MetricsFormat::Json : MetricsFormat::Csv; }

json ground_state_to_json(const GroundState& s) {
    json arr = json::array();
    for (const auto& [e, n] : s) {
        json props = json::object();
        for (const auto& [p, v] : e) props[p] = value_to_json(v);
        arr.push_back(json{{"count", n}, {"props", props}});
    }
    return arr;
}

json ground_compound_to_json(const GroundCompound& k) {
    json arr = json::array();
    for (const auto& [inst, n] : k) {
        json binding = json::array();
        for (const auto& e : inst.binding) {
            json props = json::object();
            for (const auto& [p, v] : e) props[p] = value_to_json(v);
            binding.push_back(props);
        }
        arr.push_back(json{{"action", inst.action}, {"count", n}, {"binding", binding}});
    }
    return arr;
}

int cmd_filter(const CommonArgs& a, const std::string& posterior_path, FilterMode mode) {
    Scenario sc = load(a);
    if (mode == FilterMode::Lifted && (a.with_oracle || sc.options.oracle)) mode = FilterMode::Both;
    const FilterResult r = run_filter(sc, mode, a.timing);
    write_out(a.out, format_metrics(r.metrics, metrics_format(a.format)));
    if (!posterior_path.empty()) {
        json post = r.lifted.empty() ? lifted_distribution_to_json(initial_distribution(sc))
                                     : lifted_distribution_to_json(r.lifted.back());
        write_text_file(posterior_path, post.dump(2) + "\n");
    }
    for (std::size_t t = 0; t < r.reports.size(); ++t)
        if (!r.reports[t].matches(1e-9)) {
            std::cerr << "step " << t + 1 << ": lifted and ground posteriors differ (max deviation "
                      << r.reports[t].max_deviation << ")\n";
            return kFailure;
        }
    return kOk;
}

int cmd_compare(const CommonArgs& a, double tolerance) {
    Scenario sc = load(a);
    const FilterResult r = run_filter(sc, FilterMode::Both, false, tolerance);
    bool ok = true;
    json rows = json::array();
    std::ostringstream csv;
    csv << "step,max_deviation,lifted_support,ground_support,only_in_lifted,only_in_ground,match\n";
    for (std::size_t t = 0; t < r.reports.size(); ++t) {
        const auto& rep = r.reports[t];
        const bool m = rep.matches(tolerance);
        ok = ok && m;
        csv << t + 1 << ',' << format_real(rep.max_deviation) << ',' << rep.lifted_support << ',' << rep.ground_support
            << ',' << rep.only_in_lifted << ',' << rep.only_in_ground << ',' << (m ? 1 : 0) << '\n';
        rows.push_back(json{{"step", t + 1},
                            {"max_deviation", rep.max_deviation},
                            {"lifted_support", rep.lifted_support},
                            {"ground_support", rep.ground_support},
                            {"only_in_lifted", rep.only_in_lifted},
                            {"only_in_ground", rep.only_in_ground},
                            {"match", m}});
    }
    write_out(a.out, a.format == "json" ? json{{"tolerance", tolerance}, {"steps", rows}}.dump(2) + "\n" : csv.str());
    if (!ok) std::cerr << "lifted and ground posteriors differ beyond tolerance " << tolerance << "\n";
    return ok ? kOk : kFailure;
}

int cmd_sample(const CommonArgs& a, std::optional<std::size_t> steps, std::size_t runs) {
    Scenario sc = load(a);
    const std::size_t n = steps.value_or(sc.observations.size());
    const LiftedDistribution init = initial_distribution(sc);
    std::ostringstream out;
    for (std::size_t run = 0; run < runs; ++run) {
        const std::uint64_t seed = sc.options.seed + run;
        Rng rng(seed);
        const GroundState s0 = sample_initial(init, rng);
        const Trajectory t = sample_trajectory(s0, sc.actions, n, seed, sc.options.engine());
        json states = json::array();
        for (const auto& s : t.states) states.push_back(ground_state_to_json(s));
        json compounds = json::array();
        for (const auto& k : t.compounds) compounds.push_back(ground_compound_to_json(k));
        out << json{{"run", run}, {"seed", seed}, {"rng", Rng::kAlgorithm}, {"states", states}, {"compounds", compounds}}
                   .dump()
            << '\n';
    }
    write_out(a.out, out.str());
    return kOk;
}

int cmd_stats(const std::vector<std::string>& scenarios, const CommonArgs& a) {
    json rows = json::array();
    std::ostringstream csv;
    csv << "scenario,steps,mean_lifted,max_lifted,mean_ground,max_ground,ratio\n";
    for (const auto& path : scenarios) {
        CommonArgs one = a;
        one.scenario = path;
        Scenario sc = load(one);
        const bool oracle = a.with_oracle || sc.options.oracle;
        const FilterResult r = run_filter(sc, oracle ? FilterMode::Both : FilterMode::Lifted);
        double sum_l = 0.0, sum_g = 0.0;
        std::size_t max_l = 0, max_g = 0;
        for (const auto& m : r.metrics) {
            sum_l += static_cast<double>(*m.n_lifted);
            max_l = std::max(max_l, *m.n_lifted);
            if (m.n_ground) {
                sum_g += static_cast<double>(*m.n_ground);
                max_g = std::max(max_g, *m.n_ground);
            }
        }
        const double steps = static_cast<double>(std::max<std::size_t>(r.metrics.size(), 1));
        const double mean_l = sum_l / steps;
        const double mean_g = sum_g / steps;
        json row{{"scenario", sc.name}, {"steps", r.metrics.size()}, {"mean_lifted", mean_l}, {"max_lifted", max_l}};
        csv << sc.name << ',' << r.metrics.size() << ',' << format_real(mean_l) << ',' << max_l << ',';
        if (oracle) {
            row["mean_ground"] = mean_g;
            row["max_ground"] = max_g;
            row["ratio"] = mean_g / mean_l;
            csv << format_real(mean_g) << ',' << max_g << ',' << format_real(mean_g / mean_l) << '\n';
        } else {
            row["mean_ground"] = row["max_ground"] = row["ratio"] = nullptr;
            csv << ",,\n";
        }
        rows.push_back(std::move(row));
    }
    write_out(a.out, a.format == "json" ? json{{"scenarios", rows}}.dump(2) + "\n" : csv.str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lifted Bayesian filtering over multiset rewriting models"};
    app.require_subcommand(1);

    CommonArgs filter_args, oracle_args, compare_args, sample_args, stats_args;
    std::string posterior;
    double tolerance = 1e-9;
    std::optional<std::size_t> steps;
    std::size_t runs = 1;
    std::vector<std::string> stats_scenarios;

    auto* filter = app.add_subcommand("filter", "Run the lifted filter and emit per-step metrics");
    add_common(filter, filter_args);
    filter->add_flag("--with-oracle", filter_args.with_oracle, "Also run the ground filter and check agreement");
    filter->add_option("--posterior", posterior, "Write the final lifted posterior (JSON) to this path");

    auto* oracle = app.add_subcommand("oracle", "Run the ground-enumeration filter only");
    add_common(oracle, oracle_args);

    auto* cmp = app.add_subcommand("compare", "Run both filters and report per-step deviation");
    add_common(cmp, compare_args);
    cmp->add_option("--tolerance", tolerance, "Maximum absolute probability deviation")->capture_default_str();

    auto* sample = app.add_subcommand("sample", "Draw forward trajectories (one JSON record per line)");
    add_common(sample, sample_args);
    sample->add_option("--steps", steps, "Steps per trajectory (default: length of the observation sequence)");
    sample->add_option("--runs", runs, "Number of trajectories")->capture_default_str();

    auto* stats = app.add_subcommand("stats", "Mean and maximum state counts per scenario");
    stats->add_option("--scenario", stats_scenarios, "Scenario files")->required()->check(CLI::ExistingFile);
    stats->add_option("--out", stats_args.out, "Output path, '-' for stdout")->capture_default_str();
    stats->add_option("--format", stats_args.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    stats->add_flag("--with-oracle", stats_args.with_oracle, "Include ground-state counts");
    stats->add_option("--prune", stats_args.prune, "Drop lifted states below this posterior weight");
    stats->add_option("--budget", stats_args.budget, "Split and compound-enumeration budget");

    auto* gen = app.add_subcommand("generate", "Write a bundled synthetic scenario");
    std::string gen_kind, gen_out;
    OfficeOptions office;
    std::size_t identify_at = 0;
    gen->add_option("kind", gen_kind, "Scenario family")->required()->check(CLI::IsMember({"office", "alicebob-gauss"}));
    gen->add_option("--agents", office.agents, "Number of agents (office)")->capture_default_str();
    gen->add_option("--steps", office.steps, "Number of steps (office)")->capture_default_str();
    gen->add_option("--identify-at", identify_at, "Step of the identifying reading, 0 for none (office)");
    gen->add_option("--out", gen_out, "Output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*filter) return cmd_filter(filter_args, posterior, FilterMode::Lifted);
        if (*oracle) return cmd_filter(oracle_args, {}, FilterMode::Ground);
        if (*cmp) return cmd_compare(compare_args, tolerance);
        if (*sample) return cmd_sample(sample_args, steps, runs);
        if (*stats) return cmd_stats(stats_scenarios, stats_args);
        if (*gen) {
            if (identify_at > 0) office.identify_at = identify_at;
            save_scenario(gen_kind == "office" ? make_office_scenario(office) : make_alicebob_gauss_scenario(), gen_out);
            return kOk;
        }
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << " (frontier " << e.frontier() << ")\n";
        return kResourceLimit;
    } catch (const ImpossibleObservationError& e) {
        std::cerr << "impossible observation: " << e.what() << "\n";
        return kImpossible;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kModelError;
    } catch (const InvalidInput& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return kModelError;
    } catch (const UnsupportedOperation& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return kModelError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
