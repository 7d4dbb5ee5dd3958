// mcflab: reproducible mean-curvature-flow experiments.
//   mcflab run <config>     execute one experiment described by a config file
//   mcflab verify <dir>     re-verify a finished run directory
//   mcflab sweep ...        run a family of configs across n and c
// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 IO error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mcflab/config.hpp"
#include "mcflab/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void print_manifest_summary(const mcflab::RunManifest& m) {
    std::cout << "kind: " << m.kind << "\n";
    for (const auto& c : m.checks) {
        std::cout << (c.pass ? "  [pass] " : "  [FAIL] ") << c.name
                  << "  value=" << c.value << " expected=" << c.expected;
        if (c.tolerance > 0.0) std::cout << " tol=" << c.tolerance;
        if (!c.note.empty()) std::cout << "  (" << c.note << ")";
        std::cout << "\n";
    }
}

int do_run(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "mcflab: cannot open config file " << config_path << "\n";
        return kExitIo;
    }
    const mcflab::ExperimentConfig cfg = mcflab::ExperimentConfig::parse(in);
    const mcflab::RunManifest manifest = mcflab::run_experiment(cfg);
    print_manifest_summary(manifest);
    std::cout << "manifest: "
              << (std::filesystem::path(cfg.get_string("experiment.output_dir")) / "manifest.json").string()
              << "\n";
    return manifest.all_pass() ? kExitPass : kExitCheckFailure;
}

int do_verify(const std::string& dir) {
    const mcflab::VerifyReport rep = mcflab::verify_run(dir);
    if (rep.ok) {
        std::cout << "verify: pass (" << dir << ")\n";
        return kExitPass;
    }
    std::cout << "verify: FAIL (" << dir << ")\n";
    for (const auto& f : rep.failures) std::cout << "  - " << f << "\n";
    return kExitCheckFailure;
}

std::vector<long> parse_int_list(const std::string& s) {
    std::vector<long> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stol(tok));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

int do_sweep(const std::string& kind, const std::string& ns, const std::string& cs,
             const std::string& out_root) {
    std::vector<long> n_list, c_list;
    try {
        n_list = parse_int_list(ns);
        c_list = parse_int_list(cs);
    } catch (const std::exception& e) {
        std::cerr << "mcflab: bad sweep list: " << e.what() << "\n";
        return kExitConfig;
    }
    bool all_pass = true;
    for (long n : n_list) {
        for (long c : c_list) {
            mcflab::ExperimentConfig cfg;
            cfg.set("experiment.kind", kind);
            cfg.set("experiment.output_dir",
                    out_root + "/" + kind + "_n" + std::to_string(n) + "_c" + std::to_string(c));
            cfg.set("parameters.n", std::to_string(n));
            cfg.set("parameters.c", std::to_string(c));
            const mcflab::RunManifest m = mcflab::run_experiment(cfg);
            std::cout << "n=" << n << " c=" << c << ": "
                      << (m.all_pass() ? "pass" : "FAIL") << "\n";
            all_pass = all_pass && m.all_pass();
        }
    }
    return all_pass ? kExitPass : kExitCheckFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean curvature flow experiment harness"};
    app.require_subcommand(1);

    std::string config_path, verify_dir;
    std::string sweep_kind = "sharpness", sweep_n = "3", sweep_c = "0", sweep_out = "sweep";

    CLI::App* run = app.add_subcommand("run", "execute an experiment from a config file");
    run->add_option("config", config_path, "path to the config file")->required();

    CLI::App* verify = app.add_subcommand("verify", "re-verify a finished run directory");
    verify->add_option("dir", verify_dir, "run directory containing manifest.json")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "run a family of experiments");
    sweep->add_option("--kind", sweep_kind, "experiment kind (default sharpness)");
    sweep->add_option("--n", sweep_n, "comma-separated dimensions, e.g. 3,4,5");
    sweep->add_option("--c", sweep_c, "comma-separated curvatures from {-1,0,1}");
    sweep->add_option("--out", sweep_out, "output root directory (default sweep)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (run->parsed()) return do_run(config_path);
        if (verify->parsed()) return do_verify(verify_dir);
        return do_sweep(sweep_kind, sweep_n, sweep_c, sweep_out);
    } catch (const mcflab::ConfigError& e) {
        std::cerr << "mcflab: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mcflab: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "mcflab: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "mcflab: " << e.what() << "\n";
        return kExitIo;
    }
}
