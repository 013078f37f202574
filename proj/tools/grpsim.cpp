// grpsim — run, generate and audit group-service scenarios.
//
// Exit codes: 0 success, 2 invalid input (file or parameters), 3 runtime/VO
// failure, 4 at least one requested check failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "CLI11.hpp"

#include "grp/checker.hpp"
#include "grp/log.hpp"
#include "grp/scenario.hpp"
#include "grp/sim.hpp"
#include "grp/sweep.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kRuntime = 3;
constexpr int kCheckFailed = 4;

struct RunOptions {
    std::vector<std::string> scenarios;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> dmax;
    std::string trace_out;
    std::string verdict_out;
    std::vector<std::string> checks;
    bool lockstep = false;
    std::string variant = "sound";
    unsigned jobs = 1;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << content;
}

/// Output path for one scenario: with several scenarios the target is a
/// directory and files are named after the scenario stem.
std::string out_path(const std::string& target, const std::string& scenario,
                     const char* extension, bool multi) {
    if (!multi && !fs::is_directory(target)) return target;
    fs::create_directories(target);
    return (fs::path(target) / (fs::path(scenario).stem().string() + extension)).string();
}

std::vector<grp::CheckKind> parse_checks(const std::vector<std::string>& names) {
    if (names.empty()) return grp::all_checks();
    std::vector<grp::CheckKind> out;
    for (const auto& entry : names) {
        std::stringstream ss(entry);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            auto c = grp::parse_check(item);
            if (!c) throw grp::ValidationError("unknown check: " + item);
            out.push_back(*c);
        }
    }
    return out;
}

int run_one(const RunOptions& opt, const std::string& path, bool multi) {
    grp::Scenario sc = grp::load_scenario(path);
    grp::SimEngine::Options eng;
    eng.lockstep = opt.lockstep;
    eng.seed = opt.seed;
    eng.dmax = opt.dmax;
    auto variant = grp::parse_compat_variant(opt.variant);
    if (!variant) throw grp::ValidationError("unknown compat variant: " + opt.variant);
    eng.variant = *variant;

    grp::SimEngine engine(std::move(sc), eng);
    const auto& snaps = engine.run();

    if (!opt.trace_out.empty())
        write_file(out_path(opt.trace_out, path, ".trace", multi), grp::render_trace(snaps));

    const bool want_check = !opt.checks.empty() || !opt.verdict_out.empty();
    if (!want_check) {
        std::cout << path << ": snapshots=" << snaps.size() << "\n";
        return kOk;
    }

    const auto checks = parse_checks(opt.checks);
    const grp::Verdict verdict = grp::evaluate_trace(snaps, engine.dmax());
    const std::string text = grp::render_verdict(verdict, checks);
    if (opt.verdict_out.empty()) {
        std::cout << "== " << path << "\n" << text;
    } else {
        write_file(out_path(opt.verdict_out, path, ".verdict", multi), text);
        std::cout << path << ": snapshots=" << snaps.size() << " result="
                  << (grp::all_pass(verdict, checks) ? "pass" : "fail") << "\n";
    }
    return grp::all_pass(verdict, checks) ? kOk : kCheckFailed;
}

int run_command(const RunOptions& opt) {
    const bool multi = opt.scenarios.size() > 1;
    if (opt.jobs <= 1 || opt.scenarios.size() <= 1) {
        int worst = kOk;
        for (const auto& path : opt.scenarios) worst = std::max(worst, run_one(opt, path, multi));
        return worst;
    }
    // Fan scenarios across worker processes; each child handles one file.
    std::size_t next = 0;
    unsigned active = 0;
    int worst = kOk;
    while (next < opt.scenarios.size() || active > 0) {
        while (active < opt.jobs && next < opt.scenarios.size()) {
            const std::string path = opt.scenarios[next++];
            pid_t pid = fork();
            if (pid < 0) throw std::runtime_error("fork failed");
            if (pid == 0) {
                int code;
                try {
                    code = run_one(opt, path, multi);
                } catch (const grp::ValidationError& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    code = kInvalid;
                } catch (const std::exception& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    code = kRuntime;
                }
                _exit(code);
            }
            ++active;
        }
        int status = 0;
        if (waitpid(-1, &status, 0) > 0) {
            --active;
            const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kRuntime;
            worst = std::max(worst, code);
        }
    }
    return worst;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"group service simulator and checker"};
    app.require_subcommand(1);

    RunOptions ropt;
    CLI::App* run = app.add_subcommand("run", "simulate scenarios and check predicates");
    run->add_option("--scenario", ropt.scenarios, "scenario file(s)")->required();
    run->add_option("--seed", ropt.seed, "override the scenario seed");
    run->add_option("--dmax", ropt.dmax, "override the scenario dmax");
    run->add_option("--trace-out", ropt.trace_out,
                    "trace file (directory when several scenarios are given)");
    run->add_option("--verdict-out", ropt.verdict_out,
                    "verdict file (directory when several scenarios are given)");
    run->add_option("--check", ropt.checks,
                    "comma-separated checks: agreement,safety,maximality,attractor,"
                    "continuity,metrics (default: all)");
    run->add_flag("--lockstep", ropt.lockstep, "align all node timers to the period grid");
    run->add_option("--compat-variant", ropt.variant,
                    "compatibility test variant: pseudocode|proposition|sound");
    run->add_option("--jobs", ropt.jobs, "worker processes for several scenarios");

    std::string kind_name, gen_out;
    std::size_t gen_n = 0, gen_dmax = 0;
    std::uint64_t gen_seed = 1;
    CLI::App* gen = app.add_subcommand("gen", "generate a scenario file");
    gen->add_option("--kind", kind_name,
                    "static_random|corrupted_start|merge_chain|split_cut")
        ->required();
    gen->add_option("--n", gen_n, "number of nodes")->required();
    gen->add_option("--dmax", gen_dmax, "group diameter bound")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output scenario file")->required();

    std::size_t sweep_max_n = 7, sweep_dmax = 3;
    std::string sweep_out;
    CLI::App* sweep = app.add_subcommand("oracle-sweep",
                                         "compare compatibility variants against the "
                                         "exhaustive merge oracle");
    sweep->add_option("--max-n", sweep_max_n, "total nodes across both sides");
    sweep->add_option("--dmax-max", sweep_dmax, "largest dmax to sweep");
    sweep->add_option("--out", sweep_out, "report file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (run->parsed()) return run_command(ropt);
        if (gen->parsed()) {
            auto kind = grp::parse_scenario_kind(kind_name);
            if (!kind) throw grp::ValidationError("unknown scenario kind: " + kind_name);
            grp::Scenario sc = grp::generate_scenario(*kind, gen_n, gen_dmax, gen_seed);
            grp::save_scenario(sc, gen_out);
            std::cout << gen_out << ": " << kind_name << " n=" << gen_n
                      << " dmax=" << gen_dmax << " seed=" << gen_seed << "\n";
            return kOk;
        }
        if (sweep->parsed()) {
            grp::SweepParams params;
            params.max_n = sweep_max_n;
            params.dmax_max = sweep_dmax;
            const grp::SweepResult res = grp::run_oracle_sweep(params);
            if (sweep_out.empty()) std::cout << res.report;
            else write_file(sweep_out, res.report);
            return kOk;
        }
    } catch (const grp::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kOk;
}
