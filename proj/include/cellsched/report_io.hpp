#pragma once

// JSON serialization of reports and experiment manifests. Needs
// nlohmann/json and OpenSSL (libcrypto) on the include/link path.

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/experiment.hpp"
#include "cellsched/metrics.hpp"

namespace cellsched {

inline void to_json(nlohmann::json& j, const MetricsReport& r) {
    j = nlohmann::json{{"alpt", r.alpt}, {"log_alpt", r.log_alpt}, {"completed", r.completed}, {"unfinished", r.unfinished}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& r) {
    j.at("alpt").get_to(r.alpt);
    j.at("log_alpt").get_to(r.log_alpt);
    j.at("completed").get_to(r.completed);
    j.at("unfinished").get_to(r.unfinished);
}

inline void to_json(nlohmann::json& j, const Summary& s) { j = nlohmann::json{{"mean", s.mean}, {"std", s.std}}; }

inline nlohmann::ordered_json report_json(const ExperimentReport& report) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : report.rows) {
        nlohmann::ordered_json reps = nlohmann::ordered_json::array();
        for (const auto& r : row.replications)
            reps.push_back({{"alpt", r.alpt}, {"log_alpt", r.log_alpt}, {"completed", r.completed}, {"unfinished", r.unfinished}});
        rows.push_back({{"strategy", row.strategy},
                        {"log_alpt", {{"mean", row.summary.log_alpt.mean}, {"std", row.summary.log_alpt.std}}},
                        {"alpt", {{"mean", row.summary.alpt.mean}, {"std", row.summary.alpt.std}}},
                        {"replications", reps}});
    }
    return {{"seeds", report.seeds}, {"rows", rows}};
}

/// Hex SHA-1 of `blob <size>\0<content>`, the id git gives the same file.
inline std::string git_blob_hash(std::string_view content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error("EVP_MD_CTX_new failed");
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw Error("sha1 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

/// Echo of every parameter that influences the results.
inline nlohmann::ordered_json config_json(const ExperimentConfig& cfg) {
    const auto& s = cfg.sim;
    nlohmann::ordered_json scales = nlohmann::ordered_json::array(), weights = nlohmann::ordered_json::array();
    for (const auto& c : s.workload.size_mixture.components) {
        scales.push_back(c.scale);
        weights.push_back(c.weight);
    }
    std::vector<std::string> strategies;
    for (const auto& st : cfg.strategies) strategies.push_back(st.name());
    const StrategySpec& t = cfg.index_defaults;
    return {
        {"workload",
         {{"lambda", s.workload.lambda},
          {"alpha", s.workload.size_mixture.alpha},
          {"scales", scales},
          {"weights", weights},
          {"rate_lo_mult", s.workload.rate_lo_mult},
          {"rate_hi_mult", s.workload.rate_hi_mult}}},
        {"channel",
         {{"lo_coeff", s.channel.lo_coeff},
          {"hi_coeff", s.channel.hi_coeff},
          {"envelope_amplitude", s.channel.envelope_amplitude},
          {"envelope_freq", s.channel.envelope_freq},
          {"envelope_phase", s.channel.envelope_phase},
          {"envelope_mode", std::string(to_string(s.channel.envelope_mode))}}},
        {"buffer",
         {{"mode", std::string(to_string(s.buffer.mode))},
          {"rtt", s.buffer.rtt},
          {"initial_window", s.buffer.initial_window},
          {"max_window", s.buffer.max_window}}},
        {"sim",
         {{"horizon", s.horizon},
          {"drain_after_horizon", s.drain_after_horizon},
          {"oracle", s.oracle},
          {"use_true_mean_rate", s.use_true_mean_rate}}},
        {"strategy", {{"c_const", t.c_const}, {"size_prefactor", t.size_prefactor}, {"pareto_alpha", t.pareto_alpha}}},
        {"metrics", {{"log_base", cfg.log_base}}},
        {"experiment", {{"strategies", strategies}, {"seeds", cfg.seed_list()}}},
    };
}

/// Manifest for one output directory: config echo, seeds, and the content
/// hash of every emitted file.
inline nlohmann::ordered_json manifest_json(const ExperimentConfig& cfg, std::string_view command,
                                            const std::vector<std::pair<std::string, std::string>>& files) {
    nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
    for (const auto& [name, content] : files) hashes[name] = git_blob_hash(content);
    return {{"command", command}, {"config", config_json(cfg)}, {"seeds", cfg.seed_list()}, {"files", hashes}};
}

}  // namespace cellsched
