#include "lshfed/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lshfed/errors.hpp"

namespace lshfed {

const char* attack_kind_name(attack_kind k) {
    switch (k) {
    case attack_kind::none: return "none";
    case attack_kind::label_flip: return "label_flip";
    case attack_kind::gaussian_noise: return "gaussian_noise";
    case attack_kind::mask_tamper: return "mask_tamper";
    }
    return "none";
}

const char* partition_kind_name(partition_kind k) {
    switch (k) {
    case partition_kind::iid: return "iid";
    case partition_kind::label_skew: return "label_skew";
    case partition_kind::dirichlet: return "dirichlet";
    }
    return "iid";
}

const char* defense_kind_name(defense_kind k) {
    return k == defense_kind::fedavg ? "fedavg" : "lshfed";
}

void experiment_config::validate() const {
    auto fail = [](const std::string& msg) { throw config_error(msg); };

    if (dn_count < 1)
        fail("dn_count must be >= 1");
    if (non_dn_count < 2)
        fail("non_dn_count must be >= 2 (at least one aggregator plus the verifier)");
    if (lt_count < 1 || lt_count > dn_count)
        fail("lt_count must satisfy 1 <= lt_count <= dn_count");
    if (ag_count < 1 || ag_count > non_dn_count - 1)
        fail("ag_count must satisfy 1 <= ag_count <= non_dn_count - 1 (the verifier is not eligible)");
    if (hyperplanes < 1)
        fail("hyperplanes must be >= 1");
    if (filter_rank < 1)
        fail("filter_rank must be >= 1");
    if (alpha_time < 0.0 || alpha_distance < 0.0)
        fail("score weights must be non-negative");
    if (std::abs(alpha_time + alpha_distance - 1.0) > 1e-9)
        fail("alpha_time + alpha_distance must equal 1");
    if (scale < 1)
        fail("scale must be >= 1");
    if (modulus < 2)
        fail("modulus must be >= 2");
    if (modulus <= 2 * scale)
        fail("modulus must exceed 2 * scale");
    if (malicious_fraction < 0.0 || malicious_fraction > 0.5)
        fail("malicious_fraction must lie in [0, 0.5]");
    if (noise_std < 0.0)
        fail("noise_std must be non-negative");
    if (dirichlet_alpha <= 0.0)
        fail("dirichlet_alpha must be positive");
    if (client_samples < 1)
        fail("client_samples must be >= 1");
    if (vr_samples < 1)
        fail("vr_samples must be >= 1");
    if (test_samples < 1)
        fail("test_samples must be >= 1");
    if (blob_scale <= 0.0)
        fail("blob_scale must be positive");
    if (model_dim < 1 || model_hidden < 1)
        fail("model_dim and model_hidden must be >= 1");
    if (model_classes < 2 || model_classes > 255)
        fail("model_classes must lie in [2, 255]");
    if (learning_rate < 0.0)
        fail("learning_rate must be non-negative");
    if (local_epochs < 1)
        fail("local_epochs must be >= 1");
    if (time_log_sigma < 0.0)
        fail("time_log_sigma must be non-negative");
    if (rounds < 1)
        fail("rounds must be >= 1");
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

} // namespace

std::string experiment_config::echo() const {
    std::ostringstream out;
    out << "dn_count = " << dn_count << "\n";
    out << "non_dn_count = " << non_dn_count << "\n";
    out << "lt_count = " << lt_count << "\n";
    out << "ag_count = " << ag_count << "\n";
    out << "hyperplanes = " << hyperplanes << "\n";
    out << "filter_rank = " << filter_rank << "\n";
    out << "distance_threshold = " << fmt_double(distance_threshold) << "\n";
    out << "alpha_time = " << fmt_double(alpha_time) << "\n";
    out << "alpha_distance = " << fmt_double(alpha_distance) << "\n";
    out << "scale = " << scale << "\n";
    out << "modulus = " << modulus << "\n";
    out << "attack = " << attack_kind_name(attack) << "\n";
    out << "malicious_fraction = " << fmt_double(malicious_fraction) << "\n";
    out << "collusion = " << (collusion ? "true" : "false") << "\n";
    out << "noise_std = " << fmt_double(noise_std) << "\n";
    out << "partition = " << partition_kind_name(partition) << "\n";
    out << "dirichlet_alpha = " << fmt_double(dirichlet_alpha) << "\n";
    out << "client_samples = " << client_samples << "\n";
    out << "vr_samples = " << vr_samples << "\n";
    out << "test_samples = " << test_samples << "\n";
    out << "blob_scale = " << fmt_double(blob_scale) << "\n";
    out << "model_dim = " << model_dim << "\n";
    out << "model_hidden = " << model_hidden << "\n";
    out << "model_classes = " << model_classes << "\n";
    out << "learning_rate = " << fmt_double(learning_rate) << "\n";
    out << "local_epochs = " << local_epochs << "\n";
    out << "time_log_mu = " << fmt_double(time_log_mu) << "\n";
    out << "time_log_sigma = " << fmt_double(time_log_sigma) << "\n";
    out << "rounds = " << rounds << "\n";
    out << "seed = " << seed << "\n";
    out << "defense = " << defense_kind_name(defense) << "\n";
    return out.str();
}

namespace {

struct parser_context {
    const std::string& origin;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw config_error(origin + ":" + std::to_string(line) + ": " + msg);
    }

    int to_int(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const long long x = std::stoll(v, &pos);
            if (pos != v.size())
                fail("trailing characters after integer value '" + v + "'");
            return static_cast<int>(x);
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected an integer, got '" + v + "'");
        }
    }

    uint64_t to_u64(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const unsigned long long x = std::stoull(v, &pos);
            if (pos != v.size())
                fail("trailing characters after integer value '" + v + "'");
            return x;
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected an unsigned integer, got '" + v + "'");
        }
    }

    double to_double(const std::string& v) const {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size())
                fail("trailing characters after numeric value '" + v + "'");
            return x;
        } catch (const config_error&) {
            throw;
        } catch (...) {
            fail("expected a number, got '" + v + "'");
        }
    }

    bool to_bool(const std::string& v) const {
        if (v == "true" || v == "1")
            return true;
        if (v == "false" || v == "0")
            return false;
        fail("expected true/false, got '" + v + "'");
    }
};

} // namespace

experiment_config parse_config_text(const std::string& text, const std::string& origin) {
    experiment_config cfg;
    parser_context ctx{origin};

    const std::map<std::string, std::function<void(const std::string&)>> setters = {
        {"dn_count", [&](const std::string& v) { cfg.dn_count = ctx.to_int(v); }},
        {"non_dn_count", [&](const std::string& v) { cfg.non_dn_count = ctx.to_int(v); }},
        {"lt_count", [&](const std::string& v) { cfg.lt_count = ctx.to_int(v); }},
        {"ag_count", [&](const std::string& v) { cfg.ag_count = ctx.to_int(v); }},
        {"hyperplanes", [&](const std::string& v) { cfg.hyperplanes = ctx.to_int(v); }},
        {"filter_rank", [&](const std::string& v) { cfg.filter_rank = ctx.to_int(v); }},
        {"distance_threshold",
         [&](const std::string& v) { cfg.distance_threshold = ctx.to_double(v); }},
        {"alpha_time", [&](const std::string& v) { cfg.alpha_time = ctx.to_double(v); }},
        {"alpha_distance", [&](const std::string& v) { cfg.alpha_distance = ctx.to_double(v); }},
        {"scale", [&](const std::string& v) { cfg.scale = ctx.to_u64(v); }},
        {"modulus", [&](const std::string& v) { cfg.modulus = ctx.to_u64(v); }},
        {"attack",
         [&](const std::string& v) {
             if (v == "none")
                 cfg.attack = attack_kind::none;
             else if (v == "label_flip")
                 cfg.attack = attack_kind::label_flip;
             else if (v == "gaussian_noise")
                 cfg.attack = attack_kind::gaussian_noise;
             else if (v == "mask_tamper")
                 cfg.attack = attack_kind::mask_tamper;
             else
                 ctx.fail("unknown attack kind '" + v + "'");
         }},
        {"malicious_fraction",
         [&](const std::string& v) { cfg.malicious_fraction = ctx.to_double(v); }},
        {"collusion", [&](const std::string& v) { cfg.collusion = ctx.to_bool(v); }},
        {"noise_std", [&](const std::string& v) { cfg.noise_std = ctx.to_double(v); }},
        {"partition",
         [&](const std::string& v) {
             if (v == "iid")
                 cfg.partition = partition_kind::iid;
             else if (v == "label_skew")
                 cfg.partition = partition_kind::label_skew;
             else if (v == "dirichlet")
                 cfg.partition = partition_kind::dirichlet;
             else
                 ctx.fail("unknown partition scheme '" + v + "'");
         }},
        {"dirichlet_alpha", [&](const std::string& v) { cfg.dirichlet_alpha = ctx.to_double(v); }},
        {"client_samples", [&](const std::string& v) { cfg.client_samples = ctx.to_int(v); }},
        {"vr_samples", [&](const std::string& v) { cfg.vr_samples = ctx.to_int(v); }},
        {"test_samples", [&](const std::string& v) { cfg.test_samples = ctx.to_int(v); }},
        {"blob_scale", [&](const std::string& v) { cfg.blob_scale = ctx.to_double(v); }},
        {"model_dim", [&](const std::string& v) { cfg.model_dim = ctx.to_int(v); }},
        {"model_hidden", [&](const std::string& v) { cfg.model_hidden = ctx.to_int(v); }},
        {"model_classes", [&](const std::string& v) { cfg.model_classes = ctx.to_int(v); }},
        {"learning_rate", [&](const std::string& v) { cfg.learning_rate = ctx.to_double(v); }},
        {"local_epochs", [&](const std::string& v) { cfg.local_epochs = ctx.to_int(v); }},
        {"time_log_mu", [&](const std::string& v) { cfg.time_log_mu = ctx.to_double(v); }},
        {"time_log_sigma", [&](const std::string& v) { cfg.time_log_sigma = ctx.to_double(v); }},
        {"rounds", [&](const std::string& v) { cfg.rounds = ctx.to_int(v); }},
        {"seed", [&](const std::string& v) { cfg.seed = ctx.to_u64(v); }},
        {"defense",
         [&](const std::string& v) {
             if (v == "lshfed")
                 cfg.defense = defense_kind::lshfed;
             else if (v == "fedavg")
                 cfg.defense = defense_kind::fedavg;
             else
                 ctx.fail("unknown defense '" + v + "'");
         }},
    };

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ctx.line++;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            ctx.fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            ctx.fail("missing key before '='");
        if (value.empty())
            ctx.fail("missing value for key '" + key + "'");
        const auto it = setters.find(key);
        if (it == setters.end())
            ctx.fail("unknown config key '" + key + "'");
        if (!seen.insert(key).second)
            ctx.fail("duplicate config key '" + key + "'");
        it->second(value);
    }

    cfg.validate();
    return cfg;
}

experiment_config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

} // namespace lshfed
