#include "gshift/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace gshift {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("gibbs: " + what);
}

// Sum of pair(a, b) over pairs with at least one interior endpoint, visiting
// interior-interior pairs once (j > i) and every interior-boundary pair.
// Returns +inf as soon as any pair is infinite.
double pair_sum(const std::function<double(const Particle&, const Particle&)>& pair,
                double range, const MarkedConfiguration& cfg) {
    if (range <= 0.0 || cfg.interior.empty()) return 0.0;
    std::vector<Particle> all = cfg.interior;
    all.insert(all.end(), cfg.boundary.begin(), cfg.boundary.end());
    const int ni = int(cfg.interior.size());
    CellIndex index(all, range);
    double sum = 0.0;
    bool infinite = false;
    for (int i = 0; i < ni && !infinite; ++i) {
        index.for_each_within(all[size_t(i)].x, range, [&](int j) {
            if (infinite || j <= i) return;  // boundary indices all exceed ni - 1
            double e = pair(all[size_t(i)], all[size_t(j)]);
            if (e == kInf)
                infinite = true;
            else
                sum += e;
        });
    }
    return infinite ? kInf : sum;
}

// Euclidean distance from x to the closed box [-n, n]^2.
double box_distance(const Vec2& x, double n) {
    double dx = std::max(0.0, std::abs(x[0]) - n);
    double dy = std::max(0.0, std::abs(x[1]) - n);
    return std::hypot(dx, dy);
}

void check_boundary(const std::vector<Particle>& boundary, double n, const SpinLaw& law) {
    std::unordered_set<int> ids;
    for (const Particle& b : boundary) {
        require(sup_norm(b.x) > n, "boundary particle inside the window");
        require(law.valid_spin(b.spin), "boundary spin outside the mark space");
        require(ids.insert(b.id).second, "duplicate boundary id");
    }
}

int interior_id_base(const std::vector<Particle>& boundary) {
    int base = 0;
    for (const Particle& b : boundary) base = std::max(base, b.id + 1);
    return base;
}

// Dynamic uniform hash grid over mutable slot storage; cell size equals the
// query range so every query touches at most a 3x3 block of cells.
class DynGrid {
  public:
    explicit DynGrid(double cell) : cell_(std::max(cell, 1e-9)) {}

    void insert(int idx, const Vec2& x) { cells_[key(x)].push_back(idx); }

    void remove(int idx, const Vec2& x) {
        auto& v = cells_[key(x)];
        for (size_t i = 0; i < v.size(); ++i) {
            if (v[i] == idx) {
                v[i] = v.back();
                v.pop_back();
                return;
            }
        }
    }

    template <class F>
    void visit(const Vec2& x, F&& fn) const {
        int64_t cx = coord(x[0]), cy = coord(x[1]);
        for (int64_t ix = cx - 1; ix <= cx + 1; ++ix)
            for (int64_t iy = cy - 1; iy <= cy + 1; ++iy) {
                auto it = cells_.find(pack(ix, iy));
                if (it == cells_.end()) continue;
                for (int idx : it->second) fn(idx);
            }
    }

  private:
    int64_t coord(double v) const {
        double c = std::floor(v / cell_);
        return int64_t(std::clamp(c, -1.0e9, 1.0e9));
    }
    static int64_t pack(int64_t ix, int64_t iy) {
        return (ix << 32) ^ (iy & 0xffffffffll);
    }
    int64_t key(const Vec2& x) const { return pack(coord(x[0]), coord(x[1])); }

    double cell_;
    std::unordered_map<int64_t, std::vector<int>> cells_;
};

// Grid sizes for the k-particle quadrature: ~grid_budget^4 nodes per k, never
// fewer than 3 points per axis.
int axis_points(int grid_budget, int k) {
    double g = std::pow(double(grid_budget), 2.0 / double(k));
    return std::max(3, int(std::floor(g)));
}

// Boundary particles close enough to the window to interact with it.
std::vector<Particle> near_boundary(const std::vector<Particle>& boundary, double n,
                                    double range) {
    std::vector<Particle> near;
    for (const Particle& b : boundary)
        if (box_distance(b.x, n) <= range) near.push_back(b);
    return near;
}

double config_energy(const PotentialModel& model, const std::vector<Particle>& pts,
                     const std::vector<Particle>& bnd) {
    double h = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        for (size_t j = i + 1; j < pts.size(); ++j) {
            double e = model.evaluate(pts[i], pts[j]);
            if (e == kInf) return kInf;
            h += e;
        }
        for (const Particle& b : bnd) {
            double e = model.evaluate(pts[i], b);
            if (e == kInf) return kInf;
            h += e;
        }
    }
    return h;
}

}  // namespace

void GibbsParams::validate() const {
    require(std::isfinite(z) && z > 0.0, "activity z must be positive");
    require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
}

void McmcSettings::validate() const {
    require(thin >= 1, "thin must be >= 1");
    require(p_move >= 0.0 && p_birth >= 0.0 && p_move + p_birth <= 1.0,
            "move probabilities must be nonnegative and sum to at most 1");
    require(std::isfinite(step) && step > 0.0, "step must be positive");
    require(p_spin_refresh >= 0.0 && p_spin_refresh <= 1.0, "p_spin_refresh must be in [0,1]");
}

double hamiltonian(const PotentialModel& model, const MarkedConfiguration& cfg) {
    return pair_sum(model.evaluate, model.interaction_range, cfg);
}

double hamiltonian_pair(const std::function<double(const Particle&, const Particle&)>& pair,
                        double range, const MarkedConfiguration& cfg) {
    return pair_sum(pair, range, cfg);
}

double insertion_energy(const PotentialModel& model, const MarkedConfiguration& cfg,
                        const Particle& p) {
    const double range = model.interaction_range;
    double sum = 0.0;
    auto add = [&](const Particle& q) {
        if (range > 0.0 && (p.x - q.x).norm() > range) return false;
        double e = model.evaluate(p, q);
        if (e == kInf) return true;
        sum += e;
        return false;
    };
    for (const Particle& q : cfg.interior)
        if (add(q)) return kInf;
    for (const Particle& q : cfg.boundary)
        if (add(q)) return kInf;
    return sum;
}

Spin sample_spin(const SpinLaw& law, Rng& rng) {
    switch (law.kind) {
        case SpinKind::Unit: return Spin::unit();
        case SpinKind::Discrete: return Spin::discrete(int(rng.below(uint64_t(law.q))));
        case SpinKind::Scalar: return Spin::scalar(rng.uniform(law.lo, law.hi));
        case SpinKind::Direction: return Spin::direction(rng.uniform(0.0, M_PI));
    }
    return Spin::unit();
}

MarkedConfiguration sample_poisson(double z, double n, const SpinLaw& law, Rng& rng) {
    require(std::isfinite(z) && z >= 0.0, "poisson intensity must be >= 0");
    require(std::isfinite(n) && n > 0.0, "window half-width must be positive");
    MarkedConfiguration cfg;
    cfg.window.n = n;
    uint64_t count = rng.poisson(z * 4.0 * n * n);
    cfg.interior.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        Particle p;
        p.id = int(i);
        p.x = Vec2(rng.uniform(-n, n), rng.uniform(-n, n));
        p.spin = sample_spin(law, rng);
        cfg.interior.push_back(p);
    }
    return cfg;
}

double birth_accept(const PotentialModel& model, const GibbsParams& gp,
                    const MarkedConfiguration& cfg, const Particle& cand) {
    gp.validate();
    double a = cfg.window.area();
    double dh = insertion_energy(model, cfg, cand);
    double np1 = double(cfg.interior.size()) + 1.0;
    return std::min(1.0, gp.z * a / np1 * boltzmann(gp.beta, dh));
}

double death_accept(const PotentialModel& model, const GibbsParams& gp,
                    const MarkedConfiguration& cfg, size_t interior_index) {
    gp.validate();
    require(interior_index < cfg.interior.size(), "death index out of range");
    const Particle& p = cfg.interior[interior_index];
    double e = 0.0;
    for (size_t j = 0; j < cfg.interior.size(); ++j) {
        if (j == interior_index) continue;
        double v = model.evaluate(p, cfg.interior[j]);
        if (v == kInf) return 1.0;  // removing an overlapping particle is free
        e += v;
    }
    for (const Particle& b : cfg.boundary) {
        double v = model.evaluate(p, b);
        if (v == kInf) return 1.0;
        e += v;
    }
    double a = cfg.window.area();
    double n = double(cfg.interior.size());
    return std::min(1.0, n / (gp.z * a) * std::exp(gp.beta * e));
}

std::vector<MarkedConfiguration> sample_gibbs(const PotentialModel& model, const GibbsParams& gp,
                                              double n, const std::vector<Particle>& boundary,
                                              const McmcSettings& mc, size_t count, Rng& rng) {
    gp.validate();
    mc.validate();
    require(std::isfinite(n) && n > 0.0, "window half-width must be positive");
    check_boundary(boundary, n, model.spin_law);

    const double range = model.interaction_range;
    const double area = 4.0 * n * n;
    const SpinLaw& law = model.spin_law;

    // Slot storage with an alive list for O(1) uniform pick, plus a dynamic
    // grid (interior) and a static index over the near boundary.
    std::vector<Particle> slots;
    std::vector<int> pos_in_list;  // slot -> position in alive, -1 if free
    std::vector<int> alive;
    std::vector<int> free_slots;
    DynGrid grid(range > 0.0 ? range : 1.0);
    std::vector<Particle> bnd = near_boundary(boundary, n, range + 1.0);
    CellIndex bidx;
    if (!bnd.empty() && range > 0.0) bidx.rebuild(bnd, range);

    auto local_energy = [&](const Particle& p, int exclude) -> double {
        if (range <= 0.0) return 0.0;
        double sum = 0.0;
        bool infinite = false;
        grid.visit(p.x, [&](int j) {
            if (infinite || j == exclude) return;
            const Particle& q = slots[size_t(j)];
            if ((p.x - q.x).norm() > range) return;
            double e = model.evaluate(p, q);
            if (e == kInf)
                infinite = true;
            else
                sum += e;
        });
        if (infinite) return kInf;
        if (!bnd.empty()) {
            bidx.for_each_within(p.x, range, [&](int j) {
                if (infinite) return;
                double e = model.evaluate(p, bnd[size_t(j)]);
                if (e == kInf)
                    infinite = true;
                else
                    sum += e;
            });
        }
        return infinite ? kInf : sum;
    };

    auto add_particle = [&](const Particle& p) {
        int idx;
        if (!free_slots.empty()) {
            idx = free_slots.back();
            free_slots.pop_back();
            slots[size_t(idx)] = p;
        } else {
            idx = int(slots.size());
            slots.push_back(p);
            pos_in_list.push_back(-1);
        }
        pos_in_list[size_t(idx)] = int(alive.size());
        alive.push_back(idx);
        grid.insert(idx, p.x);
    };

    auto remove_particle = [&](int idx) {
        grid.remove(idx, slots[size_t(idx)].x);
        int pos = pos_in_list[size_t(idx)];
        int last = alive.back();
        alive[size_t(pos)] = last;
        pos_in_list[size_t(last)] = pos;
        alive.pop_back();
        pos_in_list[size_t(idx)] = -1;
        free_slots.push_back(idx);
    };

    auto one_move = [&]() {
        double u = rng.uniform();
        if (u < mc.p_move) {
            if (alive.empty()) return;
            int idx = alive[size_t(rng.below(alive.size()))];
            Particle cand = slots[size_t(idx)];
            cand.x += mc.step * Vec2(rng.normal(), rng.normal());
            if (rng.uniform() < mc.p_spin_refresh) cand.spin = sample_spin(law, rng);
            double accept = 0.0;
            if (sup_norm(cand.x) <= n) {
                double e_old = local_energy(slots[size_t(idx)], idx);
                double e_new = local_energy(cand, idx);
                accept = std::min(1.0, boltzmann(gp.beta, e_new - e_old));
            }
            if (rng.uniform() < accept) {
                grid.remove(idx, slots[size_t(idx)].x);
                slots[size_t(idx)] = cand;
                grid.insert(idx, cand.x);
            }
        } else if (u < mc.p_move + mc.p_birth) {
            Particle cand;
            cand.x = Vec2(rng.uniform(-n, n), rng.uniform(-n, n));
            cand.spin = sample_spin(law, rng);
            double dh = local_energy(cand, -1);
            double accept =
                std::min(1.0, gp.z * area / (double(alive.size()) + 1.0) * boltzmann(gp.beta, dh));
            if (rng.uniform() < accept) add_particle(cand);
        } else {
            if (alive.empty()) return;
            int idx = alive[size_t(rng.below(alive.size()))];
            double e = local_energy(slots[size_t(idx)], idx);
            double accept =
                std::min(1.0, double(alive.size()) / (gp.z * area) * std::exp(gp.beta * e));
            if (rng.uniform() < accept) remove_particle(idx);
        }
    };

    const int base = interior_id_base(boundary);
    auto snapshot = [&]() {
        MarkedConfiguration cfg;
        cfg.window.n = n;
        cfg.boundary = boundary;
        cfg.interior.reserve(alive.size());
        int next = base;
        for (size_t idx = 0; idx < slots.size(); ++idx) {
            if (pos_in_list[idx] < 0) continue;
            Particle p = slots[idx];
            p.id = next++;
            cfg.interior.push_back(p);
        }
        return cfg;
    };

    std::vector<MarkedConfiguration> out;
    out.reserve(count);
    for (uint64_t i = 0; i < mc.burn_in; ++i) one_move();
    for (size_t s = 0; s < count; ++s) {
        for (uint64_t i = 0; i < mc.thin; ++i) one_move();
        out.push_back(snapshot());
    }
    return out;
}

std::vector<double> exact_small_weights(const PotentialModel& model, const GibbsParams& gp,
                                        double n, const std::vector<Particle>& boundary,
                                        int k_max, int grid_budget) {
    gp.validate();
    require(std::isfinite(n) && n > 0.0, "window half-width must be positive");
    require(k_max >= 0, "k_max must be >= 0");
    require(grid_budget >= 2, "grid_budget must be >= 2");
    require(model.spin_law.kind == SpinKind::Unit, "exact sampler handles unit-spin models only");
    check_boundary(boundary, n, model.spin_law);

    const double area = 4.0 * n * n;
    const double za = gp.z * area;
    const std::vector<Particle> bnd = near_boundary(boundary, n, model.interaction_range);
    const double nb = double(bnd.size());
    const double mneg = std::min(0.0, model.min_pair_energy);

    std::vector<double> weights(size_t(k_max) + 1, 0.0);
    weights[0] = 1.0;  // z^0/0! * <e^0>
    for (int k = 1; k <= k_max; ++k) {
        const int g = axis_points(grid_budget, k);
        const int dims = 2 * k;
        std::vector<int> digit(size_t(dims), 0);
        std::vector<Particle> pts(static_cast<size_t>(k));
        double acc = 0.0;
        uint64_t nodes = 1;
        for (int d = 0; d < dims; ++d) nodes *= uint64_t(g);
        for (uint64_t node = 0; node < nodes; ++node) {
            for (int i = 0; i < k; ++i) {
                pts[size_t(i)].x = Vec2(-n + 2.0 * n * (digit[size_t(2 * i)] + 0.5) / g,
                                        -n + 2.0 * n * (digit[size_t(2 * i + 1)] + 0.5) / g);
            }
            acc += boltzmann(gp.beta, config_energy(model, pts, bnd));
            for (int d = 0; d < dims; ++d) {
                if (++digit[size_t(d)] < g) break;
                digit[size_t(d)] = 0;
            }
        }
        double mean = acc / double(nodes);
        weights[size_t(k)] =
            std::exp(double(k) * std::log(za) - std::lgamma(double(k) + 1.0)) * mean;
    }

    double total = 0.0;
    for (double w : weights) total += w;

    // Dominating tail: H_k >= mneg * (k(k-1)/2 + k*|near boundary|), so each
    // missing weight is at most t_k below. Reject k_max if the tail is not
    // clearly summable or not negligible next to the kept mass.
    double tail = 0.0;
    int k = k_max + 1;
    double pairs = 0.5 * double(k) * double(k - 1) + double(k) * nb;
    double log_t = double(k) * std::log(za) - std::lgamma(double(k) + 1.0) -
                   gp.beta * mneg * pairs;
    double t = std::exp(log_t);
    for (int steps = 0; steps < 4096; ++steps) {
        double ratio = za / double(k + 1) * std::exp(-gp.beta * mneg * (double(k) + nb));
        if (ratio >= 0.95)
            throw std::runtime_error(
                "exact_small_weights: k_max too small, dominating tail is not summable");
        tail += t;
        if (t < 1e-18 * std::max(total, 1e-300)) break;
        t *= ratio;
        ++k;
    }
    if (!(tail <= 1e-6 * total))
        throw std::runtime_error("exact_small_weights: k_max too small, tail bound " +
                                 std::to_string(tail / total) + " of kept mass");

    for (double& w : weights) w /= total;
    return weights;
}

std::vector<MarkedConfiguration> exact_sample_small(const PotentialModel& model,
                                                    const GibbsParams& gp, double n,
                                                    const std::vector<Particle>& boundary,
                                                    int k_max, size_t count, Rng& rng,
                                                    int grid_budget) {
    std::vector<double> weights = exact_small_weights(model, gp, n, boundary, k_max, grid_budget);
    const std::vector<Particle> bnd = near_boundary(boundary, n, model.interaction_range);
    const double mneg = std::min(0.0, model.min_pair_energy);
    const int base = interior_id_base(boundary);

    std::vector<MarkedConfiguration> out;
    out.reserve(count);
    for (size_t s = 0; s < count; ++s) {
        double v = rng.uniform();
        int k = 0;
        double cum = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            cum += weights[i];
            if (v < cum || i + 1 == weights.size()) {
                k = int(i);
                break;
            }
        }
        double floor_h = mneg * (0.5 * double(k) * double(k - 1) + double(k) * double(bnd.size()));
        std::vector<Particle> pts(static_cast<size_t>(k));
        for (uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 10000000)
                throw std::runtime_error("exact_sample_small: rejection sampling stalled");
            for (int i = 0; i < k; ++i)
                pts[size_t(i)].x = Vec2(rng.uniform(-n, n), rng.uniform(-n, n));
            double h = config_energy(model, pts, bnd);
            if (rng.uniform() < boltzmann(gp.beta, h - floor_h)) break;
        }
        MarkedConfiguration cfg;
        cfg.window.n = n;
        cfg.boundary = boundary;
        cfg.interior = pts;
        for (int i = 0; i < k; ++i) cfg.interior[size_t(i)].id = base + i;
        out.push_back(std::move(cfg));
    }
    return out;
}

EdgeSet sample_edges(const SmoothDecomposition& d, double beta, const MarkedConfiguration& cfg,
                     Rng& rng) {
    EdgeSet edges;
    if (d.u_range <= 0.0 || cfg.interior.empty()) return edges;
    std::vector<Particle> all = cfg.interior;
    all.insert(all.end(), cfg.boundary.begin(), cfg.boundary.end());
    const int ni = int(cfg.interior.size());
    CellIndex index(all, d.u_range);
    for (int i = 0; i < ni; ++i) {
        index.for_each_within(all[size_t(i)].x, d.u_range, [&](int j) {
            if (j <= i) return;
            double u = d.u_small(all[size_t(i)], all[size_t(j)]);
            if (u <= 0.0) return;
            double p = -std::expm1(-beta * u);
            if (rng.uniform() < p) edges.insert(all[size_t(i)].id, all[size_t(j)].id);
        });
    }
    return edges;
}

CorrelationCheck estimate_correlation(const std::vector<MarkedConfiguration>& samples,
                                      const std::vector<Cell>& cells, double xi) {
    require(!samples.empty(), "estimate_correlation needs samples");
    require(!cells.empty(), "estimate_correlation needs cells");
    CorrelationCheck out;
    out.bound = 1.0;
    for (const Cell& c : cells) out.bound *= xi * c.area();

    double mean = 0.0, m2 = 0.0;
    size_t s = 0;
    for (const MarkedConfiguration& cfg : samples) {
        double prod = 1.0;
        for (const Cell& c : cells) {
            double cnt = 0.0;
            for (const Particle& p : cfg.interior)
                if (c.contains(p.x)) cnt += 1.0;
            prod *= cnt;
        }
        ++s;
        double delta = prod - mean;
        mean += delta / double(s);
        m2 += delta * (prod - mean);
    }
    out.estimate = mean;
    double var = samples.size() > 1 ? m2 / double(samples.size() - 1) : 0.0;
    out.std_error = std::sqrt(var / double(samples.size()));
    out.flagged = out.estimate - out.bound > 3.0 * out.std_error;
    return out;
}

}  // namespace gshift
