// Command-line driver: ode | mc | compare | laplace | check, each taking a
// JSON experiment config. Exit codes: 0 success, 1 validation/config error,
// 2 numerical failure, 3 comparison or invariant-check failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qmarkov/errors.hpp"
#include "qmarkov/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Quantum dynamics under a Markov-switched Hamiltonian with unitary shocks"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::optional<std::string> out_dir;

    const struct {
        const char* name;
        const char* desc;
    } commands[] = {
        {"ode", "integrate the averaged master equation and write ode.csv"},
        {"mc", "Monte Carlo path average; writes mc.csv with standard errors"},
        {"compare", "run ode and mc, write z-scores, fail (exit 3) if any |z| exceeds 5"},
        {"laplace", "evaluate the Laplace-domain fixed point against the direct resolvent"},
        {"check", "run the model's invariant suite; fail (exit 3) on any violation"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.desc);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "override run.seed");
        sub->add_option("--samples", samples, "override run.n_samples")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "override outputs.directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit clean; bad usage is a validation error
    }

    try {
        qmarkov::ExperimentConfig cfg = qmarkov::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (samples) cfg.n_samples = *samples;
        if (out_dir) cfg.out_dir = *out_dir;
        return qmarkov::run_command(app.get_subcommands().front()->get_name(), cfg);
    } catch (const qmarkov::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const qmarkov::NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 2;
    } catch (const qmarkov::ComparisonError& e) {
        std::fprintf(stderr, "comparison failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
}
