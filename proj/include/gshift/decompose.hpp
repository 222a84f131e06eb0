#pragma once
// Splits a pair interaction U into a contact body K plus a smooth long-range
// part: U = Ubar - u off K, with u >= 0 small in integral, Ubar twice
// differentiable with |d^2 Ubar| dominated by an explicit radial envelope psi.
// Pure hard-core models take the trivial split (Ubar = u = psi = 0) with K an
// enlargement of the hard core; models with bounded discontinuous tails are
// mollified by convolving a majorant of the radial profile with a smooth bump.
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gshift/core.hpp"
#include "gshift/potential.hpp"

namespace gshift {

struct DecomposeOptions {
    double gamma = 0.05;            // smallness budget for both integral checks
    double mollifier_width = 0.02;  // requested bump half-width (clamped to fit)
    std::optional<double> eps0;     // override: core enlargement radius
    std::optional<double> eps;      // override: slow-down halo width
    bool require_feasible = true;   // throw if an integral check fails
};

// One term of the decomposition report: named bound, value, budget.
struct BoundCheck {
    std::string name;
    double value = 0.0;
    double budget = 0.0;
    bool ok() const { return value < budget; }
};

struct SmoothDecomposition {
    ModelKind kind = ModelKind::HardCore;
    SpinLaw spin_law = SpinLaw::unit();
    bool trivial = true;   // Ubar = u = psi identically zero
    bool radial_core = true;  // K is a disc of per-spin-pair radius rho_core
    double eps0 = 0.0;        // core enlargement (K = K^U_{eps0} when radial)
    double eps = 0.0;         // halo width used by the contact distance halo
    double gamma = 0.0;       // budget the construction was built against
    double mollifier_width = 0.0;  // actual bump half-width (0 when trivial)

    double core_range = 0.0;  // sup over spins of pair distances inside K
    double halo_range = 0.0;  // core_range + eps: beyond this, d_core >= eps
    double u_range = 0.0;     // u vanishes (bitwise) beyond this distance
    double ubar_range = 0.0;  // Ubar vanishes beyond this distance
    double psi_range = 0.0;   // psi vanishes beyond this distance

    double psi_alpha = 0.0;     // envelope exponent: psi = psi_coeff / r^alpha
    double psi_coeff = 0.0;     // includes the 2^alpha slack factor
    double rod_half_length = 0.0;  // nonzero only for segment cores

    // Integral feasibility checks (named, recorded for reports).
    std::vector<BoundCheck> checks;
    bool feasible = true;

    // Contact geometry.  d_core is the contact distance (0 exactly on K);
    // in_core is the closed membership test, consistent with d_core == 0.
    std::function<double(const Spin&, const Spin&)> hard_radius;  // {U=inf} radius
    std::function<double(const Spin&, const Spin&)> rho_core;     // hard_radius+eps0
    std::function<double(const Particle&, const Particle&)> d_core;
    std::function<bool(const Particle&, const Particle&)> in_core;

    // Smooth part and bounds (identically zero when trivial).
    std::function<double(const Particle&, const Particle&)> u_bar;
    std::function<double(const Particle&, const Particle&)> u_small;
    std::function<double(const Particle&, const Particle&)> psi;
    std::function<double(double)> u_radial;     // r -> u (unit-spin models)
    std::function<double(double)> ubar_radial;  // r -> Ubar
    std::vector<double> radial_breaks;          // kink radii, for quadrature

    bool pair_in_halo(const Particle& a, const Particle& b) const {
        return d_core(a, b) < eps;
    }
};

// Build the decomposition for a model.  Throws std::invalid_argument when the
// construction cannot meet the gamma budget (naming the violated bound) unless
// opts.require_feasible is false, in which case the checks are recorded and
// `feasible` is left false.
SmoothDecomposition smooth_decompose(const PotentialModel& model, const DecomposeOptions& opts);

// Interaction-strength constants derived from a decomposition: ranges and the
// integral norms used to size acceptance thresholds.  All integrals take the
// sup over the first spin and average over the second (per the spin law).
struct DerivedConstants {
    double xi = 0.0;    // intensity bound entering every integral norm
    double beta = 0.0;  // inverse temperature
    double c_contact = 0.0;  // halo reach: core_range + eps
    double c_u = 0.0;        // xi * sup int [1_halo\core + (beta u ^ 1)]
    double c_u_sq = 0.0;     // same with |y - y'|^2 weight
    double c_psi = 0.0;      // xi * sup int psi * (|y-y'|^2 v 1)
    double gamma = 0.0;      // 1 / (3 xi (1 v beta))
};

// Throws std::invalid_argument naming "c_u" if c_u >= 1.
DerivedConstants derive_constants(const SmoothDecomposition& d, double xi, double beta);

// Spin quadrature grid: pairs (spin, weight) with weights summing to 1.
std::vector<std::pair<Spin, double>> spin_grid(const SpinLaw& law, int resolution = 64);

}  // namespace gshift
