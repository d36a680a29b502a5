// railsched command-line tool: solve, preprocess, validate, gen.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include "railsched/generator.hpp"
#include "railsched/solution_io.hpp"

using namespace railsched;

namespace {

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUnknown = 4;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("railsched");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("RAILSCHED_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

Instance load_instance(const std::string& path) {
    Instance inst = read_instance_file(path);
    auto issues = validate_instance(inst);
    if (!issues.empty()) {
        std::ostringstream msg;
        msg << path << ": instance violates " << issues.size() << " invariant(s)";
        for (const auto& v : issues) msg << "\n  " << v.invariant << ": " << v.detail;
        throw std::runtime_error(msg.str());
    }
    return inst;
}

struct SolveArgs {
    std::string instance;
    std::string enable;
    std::string thresholds;
    double time_limit = 0;
    std::uint64_t seed = 0;
    std::string format = "json";
    int portfolio = 1;
    bool no_restarts = false;
    std::string output;
};

int cmd_solve(const SolveArgs& a) {
    Instance inst = load_instance(a.instance);
    PipelineOptions opts;
    opts.encode = EncodeOptions::parse(a.enable);
    if (!a.thresholds.empty()) opts.scheme = ThresholdScheme::parse(a.thresholds);
    opts.solver.time_limit = a.time_limit;
    opts.solver.seed = a.seed;
    opts.solver.use_hints = opts.encode.hs;
    opts.solver.restarts = !a.no_restarts;
    opts.portfolio = a.portfolio;
    spdlog::info("solving {} with options [{}]", a.instance, opts.encode.str());

    PipelineResult res = solve_instance(inst, opts);
    spdlog::info("status {} after {:.3f}s, {} choices, {} conflicts", to_string(res.status), res.total_seconds,
                 res.stats.choices, res.stats.conflicts);
    if (res.solution) {
        auto issues = validate_solution(inst, *res.solution);
        for (const auto& v : issues) spdlog::error("solution violates condition {}: {}", v.condition, v.detail);
    }

    std::string text = a.format == "facts"  ? solution_to_facts(res)
                       : a.format == "text" ? solution_to_text(res)
                                            : solution_to_json(res);
    write_output(a.output, text);
    switch (res.status) {
        case SolveStatus::Optimal: return kExitOptimal;
        case SolveStatus::SatBound: return kExitTimeout;
        case SolveStatus::Infeasible: return kExitInfeasible;
        case SolveStatus::Unknown: return kExitUnknown;
    }
    return kExitUnknown;
}

int cmd_preprocess(const std::string& path, bool facts, const std::string& format) {
    Instance inst = load_instance(path);
    PreprocessedInstance pre = preprocess(inst);
    const PreprocessStats& s = pre.stats;
    if (format == "json") {
        nlohmann::ordered_json j;
        j["r"] = s.resources;
        j["sr"] = s.subsumed;
        j["rtl"] = s.incidences;
        j["ra"] = s.areas;
        j["ec"] = s.edge_conflicts;
        j["rac"] = s.area_conflicts;
        j["vnn"] = s.node_variables;
        j["vhn"] = s.height_variables;
        nlohmann::ordered_json per = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < pre.reduced.trains.size(); ++i)
            per[pre.reduced.trains[i].id.str()] = {pre.reduced.trains[i].nodes.size(), pre.trains[i].heights.var_count};
        j["train_variables"] = per;
        std::vector<std::string> removed;
        for (const Symbol& r : pre.removed) removed.push_back(r.str());
        j["subsumed"] = removed;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "#r   " << s.resources << "\n#sr  " << s.subsumed << "\n#rtl " << s.incidences << "\n#ra  "
                  << s.areas << "\n#ec  " << s.edge_conflicts << "\n#rac " << s.area_conflicts << "\n#vnn "
                  << s.node_variables << "\n#vhn " << s.height_variables << "\n";
        for (std::size_t i = 0; i < pre.reduced.trains.size(); ++i)
            std::cout << "variables " << pre.reduced.trains[i].id << ": " << pre.reduced.trains[i].nodes.size()
                      << " -> " << pre.trains[i].heights.var_count << "\n";
        if (!pre.removed.empty()) {
            std::cout << "subsumed:";
            for (const Symbol& r : pre.removed) std::cout << " " << r;
            std::cout << "\n";
        }
    }
    if (facts) std::cout << dump_preprocessed_facts(pre);
    return 0;
}

int cmd_validate(const std::string& instance, const std::string& solution, const std::string& thresholds) {
    Instance inst = load_instance(instance);
    Solution sol = parse_solution_json(read_file(solution));
    auto issues = validate_solution(inst, sol);
    for (const auto& v : issues) std::cout << "condition " << v.condition << ": " << v.detail << "\n";
    std::optional<ThresholdScheme> scheme;
    if (!thresholds.empty()) scheme = ThresholdScheme::parse(thresholds);
    if (issues.empty()) {
        ExactQuality q = exact_quality(inst, sol);
        Objective approx = approx_quality(inst, derive_thresholds(inst, scheme), sol);
        std::cout << "feasible\nexact quality: (" << q.delay_minutes.str() << "," << q.route_penalty << ")\n"
                  << "approx quality: (" << approx.first << "," << approx.second << ")\n";
        return 0;
    }
    std::cout << issues.size() << " violation(s)\n";
    return kExitInfeasible;
}

int cmd_gen(const GenParams& p, const std::string& output) {
    if (p.trains > 3 || p.nodes > 8 || p.multi_resources > 2 || p.connections > 1)
        spdlog::warn("parameters exceed the brute-force oracle's desk-scale budget");
    write_output(output, serialize_instance(generate_instance(p)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Train scheduling solver: routing, conflict serialization and timing"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve an instance");
    solve->add_option("instance", sa.instance, "Instance fact file")->required()->check(CLI::ExistingFile);
    solve->add_option("--enable", sa.enable, "Optional groups: hs,ol1,ol2,ac");
    solve->add_option("--thresholds", sa.thresholds, "Regenerate thresholds: binary or linear:<m>");
    solve->add_option("--time-limit", sa.time_limit, "Time limit in seconds")->check(CLI::Range(1.0, 1e9));
    solve->add_option("--seed", sa.seed, "Random seed");
    solve->add_option("--format", sa.format, "Output format")->check(CLI::IsMember({"json", "facts", "text"}));
    solve->add_option("--portfolio", sa.portfolio, "Number of seeded solver threads")->check(CLI::Range(1, 256));
    solve->add_flag("--no-restarts", sa.no_restarts, "Disable restarts");
    solve->add_option("-o,--output", sa.output, "Output file (default stdout)");

    std::string pre_path, pre_format = "text";
    bool pre_facts = false, pre_stats = false;
    auto* prep = app.add_subcommand("preprocess", "Report preprocessing statistics");
    prep->add_option("instance", pre_path, "Instance fact file")->required()->check(CLI::ExistingFile);
    prep->add_flag("--stats", pre_stats, "Print statistics (default)");
    prep->add_flag("--facts", pre_facts, "Dump computed ra/e_ra/l_ra/set facts");
    prep->add_option("--format", pre_format, "Output format")->check(CLI::IsMember({"json", "text"}));

    std::string val_inst, val_sol, val_thresholds;
    auto* val = app.add_subcommand("validate", "Check a solution JSON against an instance");
    val->add_option("instance", val_inst, "Instance fact file")->required()->check(CLI::ExistingFile);
    val->add_option("solution", val_sol, "Solution JSON")->required()->check(CLI::ExistingFile);
    val->add_option("--thresholds", val_thresholds, "Threshold scheme for the approximate quality");

    GenParams gp;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Generate a random small instance");
    gen->add_option("--trains", gp.trains, "Train lines")->check(CLI::Range(1, 10000));
    gen->add_option("--nodes", gp.nodes, "Network nodes")->check(CLI::Range(3, 1000));
    gen->add_option("--resources", gp.multi_resources, "Multi-edge resources")->check(CLI::Range(0, 100));
    gen->add_option("--connections", gp.connections, "Connections")->check(CLI::Range(0, 100));
    gen->add_option("--seed", gp.seed, "Random seed");
    gen->add_flag("--open", gp.open_windows, "Leave latest times unbounded");
    gen->add_option("-o,--output", gen_out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*solve) return cmd_solve(sa);
        if (*prep) return cmd_preprocess(pre_path, pre_facts, pre_format);
        if (*val) return cmd_validate(val_inst, val_sol, val_thresholds);
        if (*gen) return cmd_gen(gp, gen_out);
    } catch (const ParseError& e) {
        spdlog::error("parse error: {}", e.what());
        return kExitError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitError;
    }
    return kExitError;
}
