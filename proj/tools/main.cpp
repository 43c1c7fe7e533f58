#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tdc_cli/commands.hpp"
#include "tdc_cli/queries.hpp"
#include "tdc_cli/repro.hpp"

namespace {

struct Raw {
    std::string problem;
    std::string lambda_grid;
    std::vector<double> range;
    std::string out;
    std::string observer;
};

} // namespace

int main(int argc, char** argv) {
    using namespace tdc::cli;
    CLI::App app{"Delay-compensating functional observer synthesis"};
    app.require_subcommand(1);
    Options o;
    Raw raw;

    auto common = [&](CLI::App* sub, bool with_problem) {
        if (with_problem) sub->add_option("problem", raw.problem, "problem JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--lambda-grid", raw.lambda_grid, "comma-separated lambda values for stabilization searches");
        sub->add_option("--max-iterations", o.max_iterations, "interior-point iteration budget per LMI")
            ->check(CLI::PositiveNumber);
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out", raw.out, "output path");
    };
    auto simulation = [&](CLI::App* sub) {
        sub->add_option("--step", o.step, "integration step");
        sub->add_option("--t-end", o.t_end, "simulation horizon");
        sub->add_option("--observer", raw.observer, "report JSON to take the observer from")
            ->check(CLI::ExistingFile);
    };

    CLI::App* synth = app.add_subcommand("synthesize", "design an observer and write a report");
    common(synth, true);

    CLI::App* maxd = app.add_subcommand("max-delay", "largest delay certified by a stability condition");
    common(maxd, true);
    std::string conditions = "scalar";
    for (const std::string& c : condition_ids()) conditions += ", " + c;
    maxd->add_option("--condition", o.condition, "one of: " + conditions)->required();
    maxd->add_option("--range", raw.range, "search interval lo hi")->expected(2);
    maxd->add_option("--tol", o.tol, "bisection width")->check(CLI::PositiveNumber);
    maxd->add_option("--sweep", o.sweep, "delay to vary for two-delay conditions (tau or h)");

    CLI::App* sim = app.add_subcommand("simulate", "co-simulate plant and observer, write a CSV trajectory");
    common(sim, true);
    simulation(sim);

    CLI::App* cl = app.add_subcommand("closed-loop", "observer-based control versus state feedback");
    common(cl, true);
    simulation(cl);

    CLI::App* roots = app.add_subcommand("roots", "rightmost roots of the error system");
    common(roots, true);
    roots->add_option("--observer", raw.observer, "report JSON to take the observer from")->check(CLI::ExistingFile);

    CLI::App* repro = app.add_subcommand("repro", "run the built-in reproduction checks");
    common(repro, false);
    repro->add_option("--filter", o.filter, "run only checks whose id contains this text");
    repro->add_flag("--list", "print the check ids and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (!raw.lambda_grid.empty()) o.lambda_grid = parse_lambda_grid(raw.lambda_grid);
        if (raw.range.size() == 2) o.range = std::make_pair(raw.range[0], raw.range[1]);
        o.out = raw.out;
        if (!raw.observer.empty()) o.observer_report = raw.observer;

        if (*synth) return cmd_synthesize(raw.problem, o, std::cout, std::cerr);
        if (*maxd) return cmd_max_delay(raw.problem, o, std::cout, std::cerr);
        if (*sim) return cmd_simulate(raw.problem, o, std::cout, std::cerr);
        if (*cl) return cmd_closed_loop(raw.problem, o, std::cout, std::cerr);
        if (*roots) return cmd_roots(raw.problem, o, std::cout, std::cerr);
        if (repro->count("--list") > 0) {
            for (const std::string& id : repro_check_ids()) std::cout << id << '\n';
            return kOk;
        }
        return cmd_repro(o, std::cout, std::cerr);
    } catch (...) {
        return report_exception(std::cerr);
    }
}
