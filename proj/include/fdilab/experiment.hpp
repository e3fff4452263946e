// experiment.hpp — INI experiment specifications, JSON reports, and the batch
// pipeline runners behind the command-line subcommands

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdilab/environments.hpp"
#include "fdilab/langevin.hpp"
#include "fdilab/qbm.hpp"

namespace fdilab {

inline constexpr const char* kVersion = "fdilab 0.1.0";

using Json = nlohmann::ordered_json;

// Line-oriented spec with [section] headers and key = value pairs.
// Unknown sections or keys are rejected; '#' and ';' start comments.
class ExperimentSpec {
public:
    static ExperimentSpec from_file(const std::filesystem::path& path);
    static ExperimentSpec from_string(const std::string& text);

    // Apply a "section.key=value" override.
    void set(const std::string& dotted, const std::string& value);

    bool has(const std::string& section, const std::string& key) const;
    std::string text(const std::string& section, const std::string& key) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    double number(const std::string& section, const std::string& key) const;
    double number_or(const std::string& section, const std::string& key,
                     double fallback) const;
    std::int64_t integer(const std::string& section, const std::string& key) const;
    std::int64_t integer_or(const std::string& section, const std::string& key,
                            std::int64_t fallback) const;
    std::vector<double> number_list(const std::string& section,
                                    const std::string& key) const;

    // Normalized echo of every stored key, for reports.
    Json echo() const;

private:
    void insert(const std::string& section, const std::string& key,
                const std::string& value);

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Builders from the spec sections (throw SpecError on invalid input).
FrequencyGrid make_grid(const ExperimentSpec& spec);
SpectralModel make_model(const ExperimentSpec& spec);
EnvironmentState make_state(const ExperimentSpec& spec);
OscillatorBank make_bank(const ExperimentSpec& spec);
DiscreteEnvironment make_discrete_environment(const ExperimentSpec& spec);
KernelSet make_kernels(const ExperimentSpec& spec);

// Writes ω plus row-major re/im matrix entries at 17 significant digits,
// comma-separated, LF line endings.
void write_matrix_csv(const std::filesystem::path& path, const MatrixFunction& f);

Json make_report(const std::string& subcommand, const ExperimentSpec& spec);
void write_report(const std::filesystem::path& out_dir, const Json& report);

// Subcommand pipelines; each writes its outputs under out_dir and returns the
// process exit code: 0 = pass, 1 = physics violation, 2 = spec error.
int run_kernel(const ExperimentSpec& spec, const std::filesystem::path& out_dir);
int run_check(const ExperimentSpec& spec, const std::filesystem::path& out_dir);
int run_fdr(const ExperimentSpec& spec, const std::filesystem::path& out_dir);
int run_steady(const ExperimentSpec& spec, const std::filesystem::path& out_dir);
int run_simulate(const ExperimentSpec& spec, const std::filesystem::path& out_dir);
int run_discrete(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

} // namespace fdilab
