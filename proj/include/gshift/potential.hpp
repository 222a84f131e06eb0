#pragma once
// Pair potential models. All interactions are translation invariant and
// symmetric; radial models expose their 1D profile so the smooth/contact
// decomposition can be built from it. Finite-range by construction: the two
// power-law models carry an explicit cutoff radius treated as one more jump.
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gshift/core.hpp"

namespace gshift {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class ModelKind : uint8_t {
    HardCore,
    SoftCore,
    Well,
    LennardJones,
    WidomRowlinson,
    RandomRadii,
    HardRods,
};

std::string model_kind_name(ModelKind k);

// Serializable model descriptor. Unused fields stay zero.
struct ModelSpec {
    ModelKind kind = ModelKind::HardCore;
    double r0 = 0;    // hard-core radius (HardCore, Well)
    double r1 = 0;    // step/well outer radius (SoftCore, Well)
    double c1 = 0;    // step height / well depth / r^-12 coefficient
    double c2 = 0;    // tail coefficient / r^-6 coefficient
    double rcut = 0;  // cutoff radius (Well, LennardJones)
    double r = 0;     // exclusion/rod radius (WidomRowlinson, HardRods)
    double rmax = 0;  // radius-mark upper bound (RandomRadii)
    int q = 0;        // number of species (WidomRowlinson)

    static ModelSpec hard_core(double r0);
    static ModelSpec soft_core(double c1, double r1);
    static ModelSpec well(double r0, double r1, double c1, double c2, double rcut = 0);
    static ModelSpec lennard_jones(double c1, double c2, double rcut = 0);
    static ModelSpec widom_rowlinson(int q, double r);
    static ModelSpec random_radii(double rmax);
    static ModelSpec hard_rods(double r);
};

// Radial view used by the decomposition machinery.
struct RadialProfile {
    std::function<double(double, const Spin&, const Spin&)> V;   // +inf inside core
    std::function<double(double, const Spin&, const Spin&)> dV;  // finite-part slope (0 where flat)
    std::function<double(const Spin&, const Spin&)> core_radius; // {V = inf} radius, may be 0
    double core_radius_max = 0;
    std::vector<double> jumps;  // finite-part discontinuities, ascending; last == R
    double R = 0;               // V identically 0 beyond R
};

struct PotentialModel {
    ModelKind kind = ModelKind::HardCore;
    ModelSpec spec;
    SpinLaw spin_law;
    double interaction_range = 0;  // U == 0 beyond this pair distance
    double min_pair_energy = 0;    // lower bound of the finite part of U
    bool pure_hard_core = false;   // U takes values in {0, +inf} only

    std::function<double(const Particle&, const Particle&)> evaluate;
    std::function<bool(const Particle&, const Particle&)> in_hard_core;  // U == +inf

    std::optional<RadialProfile> radial;  // absent for HardRods
    double rod_half_length = 0;           // HardRods only
};

// Builds a model from its descriptor; throws std::invalid_argument on bad
// parameters (nonpositive radii, q < 2, cutoff inside the well, ...).
PotentialModel make_model(const ModelSpec& spec);

// Minimum Euclidean distance between the closed segments
// {a + s*dir(ta) : |s| <= h} and {b + s*dir(tb) : |s| <= h}.
double segment_distance(const Vec2& a, double ta, const Vec2& b, double tb, double h);

// Exact closed-segment intersection via orientation signs (handles touching
// and collinear overlap); the authoritative zero-distance test for rods.
bool segments_intersect(const Vec2& a, double ta, const Vec2& b, double tb, double h);

inline Vec2 unit_direction(double theta) { return Vec2(std::cos(theta), std::sin(theta)); }

}  // namespace gshift
