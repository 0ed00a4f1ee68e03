#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "report.hpp"

namespace subdiff::cli {

// Flat dotted-key configuration; sections mirror the library modules.
class ExperimentConfig {
public:
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;

    // "[section]\nkey=value" text; parse(serialize(c)) == c
    std::string serialize() const;
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load_file(const std::string& path);

    const std::map<std::string, std::string>& entries() const { return kv_; }
    bool operator==(const ExperimentConfig&) const = default;

private:
    std::map<std::string, std::string> kv_;
};

struct ExperimentResult {
    ReportTable table;
    bool passed = true;
    std::string summary;
};

// verify targets
ExperimentResult verify_laplace(const ExperimentConfig& cfg);
ExperimentResult verify_subordinator(const ExperimentConfig& cfg);
ExperimentResult verify_pd(const ExperimentConfig& cfg);
ExperimentResult verify_tail(const ExperimentConfig& cfg);
ExperimentResult verify_mlt(const ExperimentConfig& cfg);
ExperimentResult verify_occupation(const ExperimentConfig& cfg);
ExperimentResult verify_rayknight(const ExperimentConfig& cfg);
ExperimentResult verify_fracpde(const ExperimentConfig& cfg);
ExperimentResult verify_pricing(const ExperimentConfig& cfg);
ExperimentResult verify_repro(const ExperimentConfig& cfg);

// pricing and path emission
ExperimentResult price_run(const std::string& method, const ExperimentConfig& cfg);
ExperimentResult simulate_run(const std::string& kind, const ExperimentConfig& cfg);

// dispatch by name ("pd", "occupation", "mlt", ...); throws on unknown names
ExperimentResult run_verify(const std::string& what, const ExperimentConfig& cfg);

}  // namespace subdiff::cli
