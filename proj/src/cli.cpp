#include "lshfed/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "lshfed/protocol.hpp"
#include "lshfed/rng.hpp"

namespace lshfed {

namespace {

experiment_config load_config(const std::string& config_path, const cli_overrides& overrides) {
    experiment_config cfg;
    if (!config_path.empty())
        cfg = parse_config_file(config_path);
    if (overrides.seed)
        cfg.seed = *overrides.seed;
    if (overrides.defense)
        cfg.defense = *overrides.defense;
    cfg.validate();
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out.flush())
        throw error("failed writing " + path.string());
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_bad_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime_error;
    }
}

} // namespace

int cmd_run(const std::string& config_path, const cli_overrides& overrides) {
    return guarded([&] {
        const experiment_config cfg = load_config(config_path, overrides);
        const experiment_report report = run_experiment(cfg);

        const std::filesystem::path dir(overrides.out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "transcript.csv", transcript_csv(report));
        write_file(dir / "metrics.csv", metrics_csv(report));
        write_file(dir / "elections.csv", elections_csv(report));
        const std::string summary = summary_text(report);
        write_file(dir / "summary.txt", summary);

        if (!overrides.quiet)
            std::cout << summary;
        return exit_ok;
    });
}

int cmd_correlation(const std::string& config_path, const cli_overrides& overrides, int pairs,
                    double scale_min, double scale_max) {
    return guarded([&] {
        const experiment_config cfg = load_config(config_path, overrides);
        if (pairs < 2)
            throw config_error("correlation needs at least 2 pairs");
        if (!(scale_min >= 0.0) || !(scale_max > scale_min))
            throw config_error("correlation scales must satisfy 0 <= min < max");

        shape_registry reg;
        const std::string shape_id =
            mlp_model::shape_id_of(cfg.model_dim, cfg.model_hidden, cfg.model_classes);
        reg.register_shape(
            shape_id, mlp_model::shape_of(cfg.model_dim, cfg.model_hidden, cfg.model_classes));

        const correlation_result res = correlation_study(reg, shape_id, cfg.hyperplanes, pairs,
                                                          scale_min, scale_max, cfg.seed);

        std::ostringstream csv;
        csv << "euclidean,hamming\n";
        for (const auto& [e, h] : res.points) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.9f", e);
            csv << buf << ',' << static_cast<long long>(h) << '\n';
        }
        const std::filesystem::path dir(overrides.out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "correlation.csv", csv.str());

        if (!overrides.quiet) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6f", res.pearson);
            std::cout << "pairs = " << pairs << "\n"
                      << "pearson = " << buf << "\n";
        }
        return exit_ok;
    });
}

int cmd_sweep(const std::string& config_path, const cli_overrides& overrides,
              const std::vector<double>& fractions) {
    return guarded([&] {
        const experiment_config base = load_config(config_path, overrides);
        if (fractions.empty())
            throw config_error("sweep needs at least one fraction");

        std::ostringstream csv;
        csv << "attack,malicious_fraction,defense,final_accuracy,verification_ratio\n";
        const attack_kind attacks[] = {attack_kind::label_flip, attack_kind::gaussian_noise};
        for (attack_kind atk : attacks) {
            for (double f : fractions) {
                for (defense_kind def : {defense_kind::lshfed, defense_kind::fedavg}) {
                    experiment_config cfg = base;
                    cfg.attack = f > 0.0 ? atk : attack_kind::none;
                    cfg.malicious_fraction = f;
                    cfg.defense = def;
                    cfg.validate();
                    const experiment_report report = run_experiment(cfg);
                    char acc[64], ratio[64];
                    std::snprintf(acc, sizeof(acc), "%.6f", report.final_accuracy);
                    std::snprintf(ratio, sizeof(ratio), "%.9g", report.verification_ratio);
                    csv << attack_kind_name(cfg.attack) << ',' << f << ','
                        << defense_kind_name(def) << ',' << acc << ',' << ratio << '\n';
                    if (!overrides.quiet)
                        std::cout << attack_kind_name(cfg.attack) << " f=" << f << ' '
                                  << defense_kind_name(def) << " acc=" << acc << "\n";
                }
            }
        }
        const std::filesystem::path dir(overrides.out_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "sweep.csv", csv.str());
        return exit_ok;
    });
}

} // namespace lshfed
