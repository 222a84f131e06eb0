#pragma once
// Grand-canonical sampling in a finite window with a fixed outside boundary:
// finite-range Hamiltonians, a birth/death/move Metropolis-Hastings chain, an
// exact sampler for tiny windows (quadrature weights + rejection positions),
// the Bernoulli pair process driven by the smooth tail u, and a correlation
// bound estimator.
#include <cstdint>
#include <functional>
#include <vector>

#include "gshift/core.hpp"
#include "gshift/decompose.hpp"
#include "gshift/potential.hpp"
#include "gshift/rng.hpp"

namespace gshift {

struct GibbsParams {
    double z = 1.0;     // activity
    double beta = 1.0;  // inverse temperature
    void validate() const;  // throws std::invalid_argument
};

struct McmcSettings {
    uint64_t burn_in = 200000;  // moves discarded before the first snapshot
    uint64_t thin = 2000;       // moves between snapshots
    double p_move = 1.0 / 3.0;  // translate (+ possible spin refresh)
    double p_birth = 1.0 / 3.0; // rest is death
    double step = 0.1;          // stddev of the Gaussian translate step
    double p_spin_refresh = 0.5;
    void validate() const;
};

// e^{-beta dH} with the convention e^{-beta * inf} = 0.
inline double boltzmann(double beta, double dh) {
    return dh == kInf ? 0.0 : std::exp(-beta * dh);
}

// Sum of the pair energy over pairs with at least one interior endpoint
// (interior-interior and interior-boundary; boundary-boundary excluded).
double hamiltonian(const PotentialModel& model, const MarkedConfiguration& cfg);
double hamiltonian_pair(const std::function<double(const Particle&, const Particle&)>& pair,
                        double range, const MarkedConfiguration& cfg);

// Energy of p against everything in cfg (interior and boundary).
double insertion_energy(const PotentialModel& model, const MarkedConfiguration& cfg,
                        const Particle& p);

Spin sample_spin(const SpinLaw& law, Rng& rng);

// Poisson(z) configuration in [-n, n]^2, spins from law, empty boundary.
MarkedConfiguration sample_poisson(double z, double n, const SpinLaw& law, Rng& rng);

// Acceptance probabilities of the chain, exposed for balance tests.
double birth_accept(const PotentialModel& model, const GibbsParams& gp,
                    const MarkedConfiguration& cfg, const Particle& cand);
double death_accept(const PotentialModel& model, const GibbsParams& gp,
                    const MarkedConfiguration& cfg, size_t interior_index);

// Metropolis-Hastings chain in [-n, n]^2 against the boundary particles of
// `boundary` (its interior is ignored); returns `count` thinned snapshots.
std::vector<MarkedConfiguration> sample_gibbs(const PotentialModel& model, const GibbsParams& gp,
                                              double n, const std::vector<Particle>& boundary,
                                              const McmcSettings& mc, size_t count, Rng& rng);

// Normalized window-size distribution (N = 0..k_max) of the Gibbs measure in
// [-n, n]^2, by midpoint tensor quadrature with ~grid_budget^4 nodes per k.
// Throws if the dominating tail beyond k_max exceeds 1e-6, or if the model
// carries spins (the exact sampler is for unit-spin models).
std::vector<double> exact_small_weights(const PotentialModel& model, const GibbsParams& gp,
                                        double n, const std::vector<Particle>& boundary,
                                        int k_max, int grid_budget = 40);

// Exact Gibbs samples for tiny windows: N from exact_small_weights, positions
// by rejection from the conditional density given N.
std::vector<MarkedConfiguration> exact_sample_small(const PotentialModel& model,
                                                    const GibbsParams& gp, double n,
                                                    const std::vector<Particle>& boundary,
                                                    int k_max, size_t count, Rng& rng,
                                                    int grid_budget = 40);

// Bernoulli pair process: each pair with at least one interior endpoint and
// distance below d.u_range draws an edge with probability 1 - e^{-beta u}.
EdgeSet sample_edges(const SmoothDecomposition& d, double beta,
                     const MarkedConfiguration& cfg, Rng& rng);

// Empirical bound check for factorial-moment densities: the mean over samples
// of prod_i N(cell_i) against bound = xi^m * prod_i area(cell_i).
struct Cell {
    Vec2 center = Vec2::Zero();
    double half = 0.0;
    double area() const { return 4.0 * half * half; }
    bool contains(const Vec2& x) const {
        return std::abs(x[0] - center[0]) <= half && std::abs(x[1] - center[1]) <= half;
    }
};
struct CorrelationCheck {
    double estimate = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool flagged = false;  // estimate exceeds bound by more than 3 std errors
};
CorrelationCheck estimate_correlation(const std::vector<MarkedConfiguration>& samples,
                                      const std::vector<Cell>& cells, double xi);

}  // namespace gshift
