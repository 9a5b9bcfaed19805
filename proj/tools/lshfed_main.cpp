// Command-line front end: `run` simulates one experiment, `correlation`
// measures the Hamming-vs-Euclidean sketch fidelity, `sweep` scans attack
// fractions under both defenses.
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lshfed/cli.hpp"

namespace {

struct common_opts {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<uint64_t> seed;
    std::string defense; // empty = keep config value
    bool quiet = false;
};

void attach_common(CLI::App* cmd, common_opts& opts) {
    cmd->add_option("-c,--config", opts.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("-o,--out", opts.out_dir, "Output directory")->capture_default_str();
    cmd->add_option("-s,--seed", opts.seed, "Override the experiment seed");
    cmd->add_option("--defense", opts.defense, "Override the defense (lshfed|fedavg)")
        ->check(CLI::IsMember({"lshfed", "fedavg"}));
    cmd->add_flag("-q,--quiet", opts.quiet, "Write output files only, no stdout report");
}

lshfed::cli_overrides to_overrides(const common_opts& opts) {
    lshfed::cli_overrides o;
    o.seed = opts.seed;
    o.out_dir = opts.out_dir;
    o.quiet = opts.quiet;
    if (opts.defense == "lshfed")
        o.defense = lshfed::defense_kind::lshfed;
    else if (opts.defense == "fedavg")
        o.defense = lshfed::defense_kind::fedavg;
    return o;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LSH-verified federated learning simulator"};
    app.require_subcommand(1);

    common_opts run_opts;
    CLI::App* run = app.add_subcommand("run", "Simulate one experiment and write its outputs");
    attach_common(run, run_opts);

    common_opts corr_opts;
    int pairs = 200;
    double scale_min = 0.0;
    double scale_max = 2.0;
    CLI::App* corr =
        app.add_subcommand("correlation", "Euclidean-vs-Hamming correlation study");
    attach_common(corr, corr_opts);
    corr->add_option("--pairs", pairs, "Number of gradient pairs")->capture_default_str();
    corr->add_option("--scale-min", scale_min, "Smallest perturbation scale")
        ->capture_default_str();
    corr->add_option("--scale-max", scale_max, "Largest perturbation scale")
        ->capture_default_str();

    common_opts sweep_opts;
    std::vector<double> fractions{0.0, 0.1, 0.3, 0.5};
    CLI::App* sweep =
        app.add_subcommand("sweep", "Accuracy sweep over malicious fractions and defenses");
    attach_common(sweep, sweep_opts);
    sweep->add_option("--fractions", fractions, "Malicious fractions to test")
        ->delimiter(',')
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? lshfed::exit_ok : lshfed::exit_bad_config;
    }

    if (run->parsed())
        return lshfed::cmd_run(run_opts.config_path, to_overrides(run_opts));
    if (corr->parsed())
        return lshfed::cmd_correlation(corr_opts.config_path, to_overrides(corr_opts), pairs,
                                       scale_min, scale_max);
    return lshfed::cmd_sweep(sweep_opts.config_path, to_overrides(sweep_opts), fractions);
}
