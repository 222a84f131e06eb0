#pragma once
// Experiment orchestration: flat key/value config files, bundled recipes,
// boundary generators, the property-suite runner with hard per-configuration
// assertions and replay artifacts, Monte-Carlo density-identity and
// diagnostics experiments, and the displacement table. Reports are ordered
// JSON, byte-identical across reruns with the same seed and spec except for
// the wall-clock field.
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gshift/core.hpp"
#include "gshift/decompose.hpp"
#include "gshift/gibbs.hpp"
#include "gshift/jsonl.hpp"
#include "gshift/potential.hpp"
#include "gshift/transform.hpp"

namespace gshift {

enum class BoundarySource : uint8_t { Empty, Lattice, File };

struct ExperimentSpec {
    std::string name = "experiment";
    ModelSpec model = ModelSpec::hard_core(0.5);

    double beta = 1.0;  // inverse temperature
    double z = 0.5;     // activity
    double xi = 0.5;    // correlation-bound intensity

    double n = 16.0;   // transform window half-width
    double pad = -1.0; // sampling annulus width; negative = 2 * interaction range

    BoundarySource boundary = BoundarySource::Empty;
    std::string boundary_file;     // for BoundarySource::File
    double lattice_spacing = 0.0;  // 0 = interaction range (or 1 if free)

    McmcSettings mc;
    bool exact_sampler = false;  // tiny windows: quadrature + rejection
    int k_max = 4;               // exact sampler truncation
    int grid_budget = 40;        // exact sampler quadrature resolution

    double c = 0.05;      // shift amplitude
    double delta = 0.1;   // Lipschitz budget
    bool strict = false;  // strict-mode parameter regime

    DecomposeOptions dopt;  // gamma / mollifier width / feasibility policy

    size_t samples = 100;
    uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = ".";

    // raw key/value pairs in file order, echoed into reports and artifacts
    std::vector<std::pair<std::string, std::string>> echo;

    void validate() const;  // throws std::invalid_argument
    // Sampling annulus width actually used (resolves the negative default).
    double effective_pad(const PotentialModel& model) const;
};

// Parses `key = value` lines ('#' comments, quoted or bare values). Unknown
// keys throw. `parse_experiment_file` reads the file then delegates.
ExperimentSpec parse_experiment_text(const std::string& text);
ExperimentSpec parse_experiment_file(const std::string& path);
// Canonical text form (reparses to an equivalent spec).
std::string spec_to_text(const ExperimentSpec& spec);

// Bundled desk-scale recipes: poisson-sanity, hard-disks, widom-rowlinson,
// lennard-jones-well, hard-rods. Unknown names throw.
ExperimentSpec recipe(const std::string& name);
std::vector<std::string> recipe_names();

// Boundary particles outside the sampling window (ids start at 10^7).
std::vector<Particle> make_boundary(const ExperimentSpec& spec, const PotentialModel& model,
                                    Rng& rng);

// Draws `count` configurations of the model under the spec's sampler in the
// padded window, then restricts to the transform window (annulus particles
// become boundary). Deterministic in (spec, seed).
std::vector<MarkedConfiguration> sample_experiment_configs(const ExperimentSpec& spec,
                                                           const PotentialModel& model,
                                                           size_t count, uint64_t seed);

struct CheckResult {
    std::string name;
    std::string kind;  // "hard" | "statistical" | "informative"
    bool pass = true;
    double observed = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    std::string note;
};

struct DensityRow {
    std::string functional;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    double diff = 0.0;
    double combined_se = 0.0;
    bool pass = true;
};

struct ExperimentReport {
    std::string name;
    uint64_t seed = 0;
    size_t samples = 0;
    bool pass = true;  // all hard and statistical checks (and density rows)
    json spec_echo = json::object();
    std::vector<CheckResult> checks;
    std::vector<DensityRow> density;
    double good_fraction = -1.0;  // negative = not measured
    double mean_beta_s1 = -1.0;
    double se_beta_s1 = 0.0;
    double mean_s2 = -1.0;
    double se_s2 = 0.0;
    double central_shift = 0.0;  // plateau value c*sqrt(log n)
    std::string replay_artifact;  // set when a hard violation was captured
    long long wall_clock_ms = 0;

    json to_json() const;
    std::string to_string() const;  // to_json().dump(2)
};

// Re-runnable per-configuration predicates, shared by the property suite and
// the replay subcommand. Returns std::nullopt on success, else a description
// of the violation. Known checks: "boundary-fixed", "monotone-clusters",
// "rigid-pairs", "lipschitz", "round-trip", "good-shift-central" (vacuous on
// configurations that are not good). Unknown names throw.
std::optional<std::string> run_hard_check(const std::string& check,
                                          const MarkedConfiguration& cfg,
                                          const TransformParams& p,
                                          const SmoothDecomposition& d);
// The checks run per configuration by the property suite, in order.
std::vector<std::string> hard_check_names(bool strict);

// Samples configurations and edges, runs every hard check per configuration
// (first violation writes a replay artifact and aborts the sweep), estimates
// the good-configuration fraction against 1 - delta, the central-shift
// attainment rate on good configurations, and the mean transformed-density
// weight against 1.
ExperimentReport run_property_suite(const ExperimentSpec& spec);

struct Functional {
    std::string name;
    std::function<double(const MarkedConfiguration&)> f;
};
// const-one, left-half particle count, edge count, single-occupancy indicator
// of the centered cell of half-width min(1, n/4).
std::vector<Functional> bundled_functionals(const ExperimentSpec& spec);

// Monte-Carlo check of the transformed-measure identity: for each functional,
// mean of phi * f(image) against mean of f(source), verdict |difference| <=
// 3 * combined standard error.
ExperimentReport run_density_check(const ExperimentSpec& spec,
                                   const std::vector<Functional>& functionals);

// Mean and standard error of beta * S1 and S2 against the Lipschitz budget
// (informative); with amplitude c = 0 both must vanish exactly (hard).
ExperimentReport run_diagnostics_experiment(const ExperimentSpec& spec);

struct DisplacementRow {
    double n = 0.0;
    double log_n = 0.0;
    double central_shift = 0.0;     // plateau c*sqrt(log n)
    double central_shift_sq = 0.0;  // its square (linear in log n)
    double good_fraction = 0.0;
    double mean_abs_shift_central = 0.0;  // mean |shift| over particles in the
                                          // central box of half-width sqrt(n)
    size_t samples = 0;
};
// One row per window size (n_values must be strictly increasing).
std::vector<DisplacementRow> run_displacement_experiment(const ExperimentSpec& spec,
                                                         const std::vector<double>& n_values);
std::string displacement_csv(const std::vector<DisplacementRow>& rows);

// Serializes {check, detail, spec text, configuration} under out_dir and
// returns the path.
std::string write_replay_artifact(const ExperimentSpec& spec, const MarkedConfiguration& cfg,
                                  const std::string& check, const std::string& detail);

struct ReplayOutcome {
    bool reproduced = false;
    std::string check;
    std::string detail;  // violation text when reproduced
};
// Loads an artifact and re-runs its check on the stored configuration.
ReplayOutcome replay_artifact(const std::string& path);

}  // namespace gshift
