#pragma once
// Core types for 2D marked particle configurations: spins, particles, windows,
// edge sets, and the uniform-grid cell index used for fixed-range neighbor scans.
#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gshift {

using Vec2 = Eigen::Vector2d;

// sup norm |x|_inf; the window metric everywhere in this project.
inline double sup_norm(const Vec2& x) {
    return std::max(std::abs(x[0]), std::abs(x[1]));
}

// ---------------------------------------------------------------------------
// Spins. Four mark spaces are supported: Unit (no mark), Discrete labels
// {0..q-1}, Scalar values in a closed interval, Direction angles in [0, pi).
// ---------------------------------------------------------------------------
enum class SpinKind : uint8_t { Unit, Discrete, Scalar, Direction };

struct Spin {
    SpinKind kind = SpinKind::Unit;
    int label = 0;       // Discrete
    double value = 0.0;  // Scalar value or Direction angle

    static Spin unit() { return Spin{}; }
    static Spin discrete(int lab) { return Spin{SpinKind::Discrete, lab, 0.0}; }
    static Spin scalar(double v) { return Spin{SpinKind::Scalar, 0, v}; }
    static Spin direction(double ang) { return Spin{SpinKind::Direction, 0, ang}; }

    bool operator==(const Spin& o) const {
        return kind == o.kind && label == o.label && value == o.value;
    }
};

// The reference mark distribution lambda_S a configuration's spins are drawn from.
struct SpinLaw {
    SpinKind kind = SpinKind::Unit;
    int q = 1;             // Discrete: number of labels
    double lo = 0.0;       // Scalar: closed interval [lo, hi]
    double hi = 0.0;

    static SpinLaw unit() { return SpinLaw{}; }
    static SpinLaw discrete(int q) { return SpinLaw{SpinKind::Discrete, q, 0, 0}; }
    static SpinLaw scalar(double lo, double hi) { return SpinLaw{SpinKind::Scalar, 1, lo, hi}; }
    static SpinLaw direction() { return SpinLaw{SpinKind::Direction, 1, 0, 0}; }

    bool valid_spin(const Spin& s) const;
};

struct Particle {
    int id = 0;
    Vec2 x = Vec2::Zero();
    Spin spin;
};

// Observation window Lambda_n = [-n, n]^2 (closed).
struct Window {
    double n = 0.0;
    double area() const { return 4.0 * n * n; }
    bool contains(const Vec2& x) const { return sup_norm(x) <= n; }
};

// ---------------------------------------------------------------------------
// Edge sets: finite simple graphs over particle ids, stored as normalized
// unordered pairs (a < b). Insertion order is kept for deterministic output.
// ---------------------------------------------------------------------------
class EdgeSet {
  public:
    void insert(int a, int b);
    bool contains(int a, int b) const;
    size_t size() const { return list_.size(); }
    bool empty() const { return list_.empty(); }
    const std::vector<std::pair<int, int>>& pairs() const { return list_; }
    void clear() { list_.clear(); keys_.clear(); }

  private:
    static uint64_t key(int a, int b);
    std::vector<std::pair<int, int>> list_;
    std::unordered_set<uint64_t> keys_;
};

// A configuration split into window interior, fixed outside boundary, and an
// edge set over both. Ids are unique across interior + boundary.
struct MarkedConfiguration {
    Window window;
    std::vector<Particle> interior;   // sup_norm(x) <= window.n
    std::vector<Particle> boundary;   // sup_norm(x) > window.n
    EdgeSet edges;

    size_t total() const { return interior.size() + boundary.size(); }
    // Throws std::invalid_argument naming the first violated invariant.
    void validate(const SpinLaw* law = nullptr) const;
    // id -> particle lookup across interior and boundary.
    const Particle* find(int id) const;
    std::vector<const Particle*> all() const;
    int max_id() const;
};

// Re-split a configuration against a smaller window [-n, n]^2: particles with
// sup_norm <= n become interior, everything else boundary. Edges are kept.
MarkedConfiguration restrict_window(const MarkedConfiguration& cfg, double n);

// ---------------------------------------------------------------------------
// Uniform-grid cell index over a fixed particle array. Queries return exactly
// the particles with |x - p| <= r (Euclidean), r <= build range.
// ---------------------------------------------------------------------------
class CellIndex {
  public:
    CellIndex() = default;
    CellIndex(const std::vector<Particle>& pts, double range);

    void rebuild(const std::vector<Particle>& pts, double range);
    double range() const { return range_; }

    // Visit indices i with |pts[i].x - p| <= r; requires r <= range().
    void for_each_within(const Vec2& p, double r,
                         const std::function<void(int)>& fn) const;
    std::vector<int> query(const Vec2& p, double r) const;

  private:
    int64_t cell_key(double x, double y) const;
    const std::vector<Particle>* pts_ = nullptr;
    double range_ = 1.0, cell_ = 1.0;
    std::unordered_map<int64_t, std::vector<int>> grid_;
};

// Connected component of the edge graph reachable from the given seed ids,
// over interior + boundary of cfg. Result is sorted. Unknown ids throw.
std::vector<int> b_cluster(const MarkedConfiguration& cfg, const std::vector<int>& seeds);

// All connected components of the edge graph augmented by extra adjacency
// (used for contact-augmented graphs); returns component id per particle id.
struct Components {
    std::unordered_map<int, int> comp_of;      // particle id -> component index
    std::vector<std::vector<int>> members;     // component index -> sorted ids
};
Components edge_components(const MarkedConfiguration& cfg,
                           const std::vector<std::pair<int, int>>& extra_pairs);

}  // namespace gshift
