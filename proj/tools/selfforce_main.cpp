#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "sf/accept.hpp"
#include "sf/scenario.hpp"

// Command-line driver: scenario execution and the acceptance-suite runner.

int main(int argc, char** argv) {
    CLI::App app{"selfforce: covariant radiation-reaction toolkit"};
    app.require_subcommand(1);

    std::string scenario_file, out_dir;
    bool force = false;
    int threads = 1;
    if (const char* env = std::getenv("SELFFORCE_OUT")) out_dir = env;
    if (out_dir.empty()) out_dir = "out";

    CLI::App* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("file", scenario_file, "scenario TOML file")->required();
    run->add_option("--out", out_dir, "output root directory");
    run->add_option("--threads", threads, "worker threads for quadrature");
    run->add_flag("--force", force, "overwrite existing outputs");

    std::string suite = "all";
    CLI::App* verify = app.add_subcommand("verify", "run an acceptance suite");
    verify
        ->add_option("suite", suite,
                     "invariants | greens | selfforce | balance | all")
        ->required();
    verify->add_option("--threads", threads, "worker threads for quadrature");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            sf::RunOutcome outcome =
                sf::run_scenario(scenario_file, out_dir, force, threads);
            for (const auto& a : outcome.artifacts)
                std::cout << "wrote " << a << "\n";
            if (!outcome.message.empty()) std::cout << outcome.message << "\n";
            return outcome.exit_code;
        }
        if (verify->parsed()) {
            std::vector<sf::CheckResult> rows = sf::run_acceptance(suite, threads);
            sf::print_check_table(rows, std::cout);
            int failures = 0;
            for (const auto& r : rows)
                if (!r.pass) ++failures;
            std::cout << (failures ? "FAIL" : "PASS") << " (" << rows.size()
                      << " checks)\n";
            return failures ? 1 : 0;
        }
    } catch (const sf::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
