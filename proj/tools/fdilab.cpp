// fdilab.cpp — batch front end: parse an experiment spec, run one pipeline
// stage, and emit CSV + JSON reports

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdilab/errors.hpp"
#include "fdilab/experiment.hpp"

namespace {

struct CommonArgs {
    std::string spec_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--spec", args.spec_path, "experiment spec file (INI)")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--set", args.overrides,
                    "override a spec entry as section.key=value (repeatable)");
}

fdilab::ExperimentSpec load_spec(const CommonArgs& args) {
    fdilab::ExperimentSpec spec = fdilab::ExperimentSpec::from_file(args.spec_path);
    for (const std::string& entry : args.overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw fdilab::SpecError("--set expects section.key=value, got '" + entry + "'");
        }
        spec.set(entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (const char* env_seed = std::getenv("FDILAB_SEED")) {
        spec.set("run.seed", env_seed);
    }
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationary environment kernels, fluctuation-dissipation checks, "
                 "and quantum Brownian motion steady states"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fdilab::kVersion);

    CommonArgs args;
    int (*runner)(const fdilab::ExperimentSpec&, const std::filesystem::path&) = nullptr;

    const std::pair<const char*, decltype(runner)> subcommands[] = {
        {"kernel", fdilab::run_kernel},     {"check", fdilab::run_check},
        {"fdr", fdilab::run_fdr},           {"steady", fdilab::run_steady},
        {"simulate", fdilab::run_simulate}, {"discrete", fdilab::run_discrete},
    };
    for (const auto& [name, fn] : subcommands) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, args);
        cmd->callback([&runner, fn = fn] { runner = fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const fdilab::ExperimentSpec spec = load_spec(args);
        return runner(spec, args.out_dir);
    } catch (const fdilab::SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 2;
    } catch (const fdilab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
