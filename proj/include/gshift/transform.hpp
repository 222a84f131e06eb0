#pragma once
// Horizontal shift transformation for particle-edge configurations in a
// window [-n, n]^2. A radially decaying shift proposal is slowed down near
// already-shifted particles (so contact pairs and edge-connected clusters
// move rigidly), which yields a recursive cluster partition, an explicit
// inverse, and a product-form Jacobian density.
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gshift/core.hpp"
#include "gshift/decompose.hpp"

namespace gshift {

struct TransformParams {
    double n = 0.0;      // window half-size (the box is [-n, n]^2)
    double c = 0.0;      // shift amplitude; max shift is c*sqrt(log n)
    double delta = 0.0;  // Lipschitz budget of the shift function
    double eps = 0.0;    // halo width: slow-down pieces live on {d_core <= eps}
    double c_K = 0.0;    // upper bound on pair distances inside the eps-halo
    int direction = +1;  // +1 shifts along +e1, -1 along -e1
    bool strict_mode = false;

    // strict mode: delta < 1e-6, delta < 1/c_K, c <= delta^2, n >= delta^-8.
    // relaxed mode: delta <= 1/2 and the proposal slope bound
    //               3c/(n^{2/3} sqrt(log n)) <= delta.
    void validate() const;  // throws std::invalid_argument

    static TransformParams for_decomposition(const SmoothDecomposition& d, double n, double c,
                                             double delta, int direction = +1,
                                             bool strict = false);
};

// Proposal profile (3c/sqrt(log n)) * log(n / (n^{2/3} v (s ^ n))): a flat
// plateau c*sqrt(log n) for s <= n^{2/3} (bitwise constant), 0 for s >= n.
double shift_proposal(double s, double n, double c);
// One-sided derivative of the proposal, 0 on both plateaus and at the kinks.
double shift_proposal_slope(double s, double n, double c);

// Slow-down profile of a particle y already shifted by tau, evaluated at y2:
// tau when the residual headroom h = |proposal(|y|_inf - c_K) - tau| exceeds
// delta*eps; otherwise tau + (h/eps)*d_core(y, y2) inside the eps-halo of y
// and +inf outside it.
double slowdown(const Particle& y, double tau, const Particle& y2, const TransformParams& p,
                const SmoothDecomposition& d);

enum class PieceKind : uint8_t {
    Proposal,  // the base profile at |y|_inf
    SlowDown,  // sloped halo piece of an earlier particle
    ConstTau,  // exhausted-headroom piece: constant tau of an earlier cluster
};

struct ActivePiece {
    PieceKind kind = PieceKind::Proposal;
    int source_id = -1;  // particle owning the piece (SlowDown/ConstTau)
    double tau = 0.0;    // shift of the owning cluster
    double h = 0.0;      // headroom of the owning particle
};

struct ClusterInfo {
    std::vector<int> ids;         // edge-cluster members, sorted
    std::vector<int> argmin_ids;  // the minimizing particles that seeded it
    double tau = 0.0;             // common shift amount
};

struct TransformResult {
    std::vector<ClusterInfo> clusters;  // k = 0..m; clusters[0] holds the
                                        // boundary-connected particles, tau 0
    int m = 0;       // last cluster index
    int m_star = 0;  // first index with an exhausted-headroom piece, else m
    int direction = +1;
    std::unordered_map<int, int> cluster_of;       // particle id -> k
    std::unordered_map<int, double> shift_of;      // particle id -> tau_k
    std::unordered_map<int, ActivePiece> piece_of; // argmin ids -> active piece
    std::unordered_map<int, double> deriv_of;      // argmin ids -> d/de1 of the
                                                   // active piece at the particle
    std::unordered_map<int, double> jacobian_factors;  // argmin ids ->
                                                       // |1 + direction * deriv|
    double theta = 1.0;  // product of the jacobian factors

    double shift(int id) const;  // throws std::out_of_range on unknown id
};

// Runs the recursion: the base profile is cut down by the slow-down pieces of
// already-assigned clusters; each step selects all remaining particles where
// the current profile is minimal (exact float ties), closes them under edges,
// and assigns the minimal value as their common shift.
TransformResult build_transform(const MarkedConfiguration& cfg, const TransformParams& p,
                                const SmoothDecomposition& d);

// Moves every particle by result.direction * shift_of(id) along e1; spins are
// kept and edges are re-attached by id.
MarkedConfiguration apply_transform(const MarkedConfiguration& cfg, const TransformResult& result);

// Reconstructs the preimage of cfg under the transform with parameters p: the
// mirrored recursion evaluates each profile at the preimage of a particle by
// solving v = profile(y - direction*v*e1) with bisection (the profile is
// delta-Lipschitz, so the root is unique).
MarkedConfiguration invert_transform(const MarkedConfiguration& cfg, const TransformParams& p,
                                     const SmoothDecomposition& d);

// All pairs at contact-halo distance (d_core <= eps), used to augment the
// edge graph; pairs are returned with the smaller id first.
std::vector<std::pair<int, int>> halo_pairs(const MarkedConfiguration& cfg,
                                            const TransformParams& p,
                                            const SmoothDecomposition& d);

struct GoodnessWitness {
    int y_id = -1;                 // reference particle
    int far_id = -1;               // particle of the same component too far out
    std::vector<int> path;         // ids along an augmented-edge path y -> far
};

struct GoodnessVerdict {
    bool good = true;
    std::optional<GoodnessWitness> witness;  // present iff not good
};

// A configuration is good when no component of the halo-augmented edge graph
// extends further out than |y|_inf -> (1 v |y|_inf log|y|_inf)/delta allows,
// for every member y of the component.
GoodnessVerdict is_good(const MarkedConfiguration& cfg, const TransformParams& p,
                        const SmoothDecomposition& d);

// Witness for the shift lower bound: a particle reachable from `id` through
// halo-augmented edges with non-increasing cluster index, seeding the lowest
// such cluster. Up to the first exhausted-headroom step, shift(id) >=
// proposal(|witness|_inf).
int descent_witness(const MarkedConfiguration& cfg, const TransformResult& result,
                    const TransformParams& p, const SmoothDecomposition& d, int id);

struct JacobianDensity {
    double theta = 1.0;  // |1 + direction*deriv| product of the recursion
    double phi = 1.0;    // theta times the smooth-energy ratio of image and source
};

// theta for the given direction and the full density
// phi = exp(-beta (H_ubar(image) - H_ubar(cfg))) * theta.
JacobianDensity jacobian_density(const MarkedConfiguration& cfg, const TransformResult& result,
                                 const TransformParams& p, const SmoothDecomposition& d,
                                 double beta);

struct ShiftDiagnostics {
    double s1 = 0.0;  // |H(image+) + H(image-) - 2 H(cfg)| of the smooth energy
    double s2 = 0.0;  // |log(theta+ * theta-)|
    double theta_plus = 1.0;
    double theta_minus = 1.0;
};

ShiftDiagnostics diagnostics(const MarkedConfiguration& cfg, const TransformParams& p,
                             const SmoothDecomposition& d);

}  // namespace gshift
