// Command-line front end: sample Gibbs configurations, attach interaction
// edges, apply or invert the shift transformation, and run the verification
// experiments (property suite, density identity, displacement table,
// diagnostics, artifact replay). Exit code 0 iff every hard assertion of the
// invoked experiment passes; `replay` exits 2 when the stored failure
// reproduces.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gshift/decompose.hpp"
#include "gshift/gibbs.hpp"
#include "gshift/harness.hpp"
#include "gshift/jsonl.hpp"
#include "gshift/potential.hpp"
#include "gshift/rng.hpp"
#include "gshift/transform.hpp"

namespace fs = std::filesystem;
using namespace gshift;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string recipe_name;
    std::string name_override;
    std::string out_dir_override;
    long long samples_override = -1;
    long long seed_override = -1;
    long long workers_override = -1;
};

ExperimentSpec resolve_spec(const CommonArgs& args) {
    if (!args.config_path.empty() && !args.recipe_name.empty())
        throw std::invalid_argument("pass either --config or --recipe, not both");
    ExperimentSpec spec;
    if (!args.config_path.empty())
        spec = parse_experiment_file(args.config_path);
    else if (!args.recipe_name.empty())
        spec = recipe(args.recipe_name);
    else
        throw std::invalid_argument("one of --config or --recipe is required");
    if (!args.name_override.empty()) spec.name = args.name_override;
    if (!args.out_dir_override.empty()) spec.out_dir = args.out_dir_override;
    if (args.samples_override >= 0) spec.samples = static_cast<size_t>(args.samples_override);
    if (args.seed_override >= 0) spec.seed = static_cast<uint64_t>(args.seed_override);
    if (args.workers_override >= 1) spec.workers = static_cast<int>(args.workers_override);
    spec.validate();
    return spec;
}

std::string out_path(const ExperimentSpec& spec, const std::string& suffix) {
    fs::create_directories(spec.out_dir);
    return (fs::path(spec.out_dir) / (spec.name + suffix)).string();
}

int finish_report(const ExperimentSpec& spec, const ExperimentReport& report,
                  const std::string& suffix) {
    std::string path = out_path(spec, suffix);
    std::ofstream out(path);
    out << report.to_string() << "\n";
    out.close();
    std::cout << report.to_string() << "\n";
    std::cerr << (report.pass ? "PASS" : "FAIL") << " -> " << path << "\n";
    return report.pass ? 0 : 1;
}

std::vector<MarkedConfiguration> input_or_sampled(const std::string& input,
                                                  const ExperimentSpec& spec,
                                                  const PotentialModel& model) {
    if (!input.empty()) return read_configs_jsonl(input);
    return sample_experiment_configs(spec, model, spec.samples, spec.seed);
}

int cmd_sample(const CommonArgs& args) {
    ExperimentSpec spec = resolve_spec(args);
    PotentialModel model = make_model(spec.model);
    auto configs = sample_experiment_configs(spec, model, spec.samples, spec.seed);
    std::string path = out_path(spec, ".samples.jsonl");
    write_configs_jsonl(path, configs);
    size_t particles = 0;
    for (const auto& cfg : configs) particles += cfg.interior.size() + cfg.boundary.size();
    std::cerr << "wrote " << configs.size() << " configurations (" << particles
              << " particles) -> " << path << "\n";
    return 0;
}

int cmd_edges(const CommonArgs& args, const std::string& input) {
    ExperimentSpec spec = resolve_spec(args);
    PotentialModel model = make_model(spec.model);
    SmoothDecomposition d = smooth_decompose(model, spec.dopt);
    auto configs = input_or_sampled(input, spec, model);
    Rng rng = Rng(spec.seed).split(404);
    size_t edges = 0;
    for (auto& cfg : configs) {
        cfg.edges = sample_edges(d, spec.beta, cfg, rng);
        edges += cfg.edges.pairs().size();
    }
    std::string path = out_path(spec, ".edges.jsonl");
    write_configs_jsonl(path, configs);
    std::cerr << "attached " << edges << " edges across " << configs.size()
              << " configurations -> " << path << "\n";
    return 0;
}

int cmd_transform(const CommonArgs& args, const std::string& input, bool invert) {
    ExperimentSpec spec = resolve_spec(args);
    PotentialModel model = make_model(spec.model);
    SmoothDecomposition d = smooth_decompose(model, spec.dopt);
    TransformParams p =
        TransformParams::for_decomposition(d, spec.n, spec.c, spec.delta, +1, spec.strict);
    p.validate();
    auto configs = input_or_sampled(input, spec, model);

    std::vector<MarkedConfiguration> images;
    images.reserve(configs.size());
    std::string csv = "config,interior,boundary,edges,clusters,m_star,good,theta\n";
    for (size_t i = 0; i < configs.size(); ++i) {
        const auto& cfg = configs[i];
        if (invert) {
            images.push_back(invert_transform(cfg, p, d));
            continue;
        }
        TransformResult res = build_transform(cfg, p, d);
        images.push_back(apply_transform(cfg, res));
        GoodnessVerdict verdict = is_good(cfg, p, d);
        char line[160];
        std::snprintf(line, sizeof line, "%zu,%zu,%zu,%zu,%d,%d,%d,%.17g\n", i,
                      cfg.interior.size(), cfg.boundary.size(), cfg.edges.pairs().size(), res.m,
                      res.m_star, verdict.good ? 1 : 0, res.theta);
        csv += line;
    }
    std::string suffix = invert ? ".preimages.jsonl" : ".images.jsonl";
    std::string path = out_path(spec, suffix);
    write_configs_jsonl(path, images);
    std::cerr << (invert ? "inverted " : "transformed ") << images.size()
              << " configurations -> " << path << "\n";
    if (!invert) {
        std::string csv_path = out_path(spec, ".transform.csv");
        std::ofstream out(csv_path);
        out << csv;
        std::cerr << "cluster summary -> " << csv_path << "\n";
    }
    return 0;
}

int cmd_verify(const CommonArgs& args) {
    ExperimentSpec spec = resolve_spec(args);
    return finish_report(spec, run_property_suite(spec), ".verify.json");
}

int cmd_density(const CommonArgs& args) {
    ExperimentSpec spec = resolve_spec(args);
    return finish_report(spec, run_density_check(spec, bundled_functionals(spec)),
                         ".density.json");
}

int cmd_displacement(const CommonArgs& args, std::vector<double> windows) {
    ExperimentSpec spec = resolve_spec(args);
    if (windows.empty()) windows = {16.0, 32.0, 64.0};
    auto rows = run_displacement_experiment(spec, windows);
    std::string csv = displacement_csv(rows);
    std::string path = out_path(spec, ".displacement.csv");
    std::ofstream out(path);
    out << csv;
    std::cout << csv;
    std::cerr << rows.size() << " window sizes -> " << path << "\n";
    return 0;
}

int cmd_diagnostics(const CommonArgs& args) {
    ExperimentSpec spec = resolve_spec(args);
    return finish_report(spec, run_diagnostics_experiment(spec), ".diagnostics.json");
}

int cmd_replay(const std::string& artifact) {
    ReplayOutcome out = replay_artifact(artifact);
    std::cout << "check: " << out.check << "\n";
    std::cout << "reproduced: " << (out.reproduced ? "yes" : "no") << "\n";
    if (!out.detail.empty()) std::cout << "detail: " << out.detail << "\n";
    return out.reproduced ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gibbs point-process sampler and shift-transformation verifier"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs common;
    app.add_option("--config", common.config_path, "experiment file (key = value lines)");
    app.add_option("--recipe", common.recipe_name,
                   "bundled experiment: " + [] {
                       std::string all;
                       for (const auto& n : recipe_names()) all += (all.empty() ? "" : ", ") + n;
                       return all;
                   }());
    app.add_option("--name", common.name_override, "override the experiment name");
    app.add_option("--out-dir", common.out_dir_override, "override the output directory");
    app.add_option("--samples", common.samples_override, "override the sample count");
    app.add_option("--seed", common.seed_override, "override the RNG seed");
    app.add_option("--workers", common.workers_override, "override the worker count");

    auto* sample = app.add_subcommand("sample", "draw configurations, write JSONL");

    std::string edges_input;
    auto* edges = app.add_subcommand("edges", "attach interaction edges to configurations");
    edges->add_option("--input", edges_input, "JSONL input (default: sample fresh)");

    std::string tf_input;
    bool tf_invert = false;
    auto* transform = app.add_subcommand("transform", "apply the shift transformation");
    transform->add_option("--input", tf_input, "JSONL input (default: sample fresh)");
    transform->add_flag("--invert", tf_invert, "reconstruct preimages instead");

    auto* verify = app.add_subcommand("verify", "run the per-configuration property suite");
    auto* density = app.add_subcommand("density-check", "transformed-measure identity check");

    std::vector<double> windows;
    auto* displacement = app.add_subcommand("displacement", "central-shift scaling table");
    displacement->add_option("--windows", windows, "window half-sizes (increasing)")
        ->delimiter(',');

    auto* diagnostics = app.add_subcommand("diagnostics", "energy-defect and Jacobian-budget "
                                                          "diagnostics");

    std::string artifact;
    auto* replay = app.add_subcommand("replay", "re-run a stored failure artifact");
    replay->add_option("artifact", artifact, "replay artifact path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) return cmd_sample(common);
        if (*edges) return cmd_edges(common, edges_input);
        if (*transform) return cmd_transform(common, tf_input, tf_invert);
        if (*verify) return cmd_verify(common);
        if (*density) return cmd_density(common);
        if (*displacement) return cmd_displacement(common, windows);
        if (*diagnostics) return cmd_diagnostics(common);
        if (*replay) return cmd_replay(artifact);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
