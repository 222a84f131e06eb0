#include "gshift/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "gshift/gibbs.hpp"
#include "gshift/potential.hpp"

namespace gshift {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("transform: " + msg);
}

std::vector<Particle> all_particles(const MarkedConfiguration& cfg) {
    std::vector<Particle> all;
    all.reserve(cfg.total());
    all.insert(all.end(), cfg.interior.begin(), cfg.interior.end());
    all.insert(all.end(), cfg.boundary.begin(), cfg.boundary.end());
    return all;
}

// Adjacency of the edge graph, built once per transform so the per-cluster
// closures do not rescan the whole configuration. Ids without edges have no
// entry and are singletons.
struct EdgeGraph {
    std::unordered_map<int, std::vector<int>> nbrs;

    explicit EdgeGraph(const MarkedConfiguration& cfg) {
        nbrs.reserve(cfg.edges.size() * 2);
        for (const auto& [a, b] : cfg.edges.pairs()) {
            nbrs[a].push_back(b);
            nbrs[b].push_back(a);
        }
    }

    // Seeds plus everything edge-reachable from them, sorted; same component
    // semantics as b_cluster.
    std::vector<int> closure(const std::vector<int>& seeds) const {
        std::unordered_set<int> seen;
        std::deque<int> todo;
        for (int s : seeds)
            if (seen.insert(s).second) todo.push_back(s);
        std::vector<int> out;
        while (!todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            out.push_back(v);
            auto it = nbrs.find(v);
            if (it == nbrs.end()) continue;
            for (int w : it->second)
                if (seen.insert(w).second) todo.push_back(w);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Precomputed proposal evaluator; bitwise-identical to shift_proposal.
struct Proposal {
    double n = 1.0, plateau_edge = 1.0, amp = 0.0;
    Proposal(double n_, double c) : n(n_) {
        plateau_edge = std::pow(n, 2.0 / 3.0);
        amp = 3.0 * c / std::sqrt(std::log(n));
    }
    double operator()(double s) const {
        double den = std::max(plateau_edge, std::min(s, n));
        return amp * std::log(n / den);
    }
};

// d/dx1 of the proposal profile s -> proposal(sup_norm) at x; 0 on the
// plateaus, at the kinks, and on the diagonal |x1| == |x2|.
double proposal_deriv_e1(const Vec2& x, const TransformParams& p) {
    double ax = std::abs(x[0]), ay = std::abs(x[1]);
    if (ax <= ay) return 0.0;
    double slope = shift_proposal_slope(ax, p.n, p.c);
    return x[0] > 0.0 ? slope : -slope;
}

// d/dx1 of the contact distance d_core(src, .) at y. Radial cores are exact;
// segment cores fall back to central differences.
double dcore_deriv_e1(const Particle& src, const Particle& y, const SmoothDecomposition& d) {
    if (d.radial_core) {
        Vec2 diff = y.x - src.x;
        double r = diff.norm();
        double rho = d.rho_core(src.spin, y.spin);
        if (r <= rho || r == 0.0) return 0.0;
        return diff[0] / r;
    }
    double step = 1e-6 * (1.0 + y.x.norm());
    Particle hi = y, lo = y;
    hi.x[0] += step;
    lo.x[0] -= step;
    return (d.d_core(src, hi) - d.d_core(src, lo)) / (2.0 * step);
}

double piece_deriv(const ActivePiece& piece, const Particle& y, const Particle* source,
                   const TransformParams& p, const SmoothDecomposition& d) {
    switch (piece.kind) {
        case PieceKind::Proposal:
            return proposal_deriv_e1(y.x, p);
        case PieceKind::ConstTau:
            return 0.0;
        case PieceKind::SlowDown:
            return piece.h / p.eps * dcore_deriv_e1(*source, y, d);
    }
    return 0.0;
}

// Jacobian of the shift map for the requested direction: the product runs in
// cluster order over the minimizing particles, matching how theta is built.
double theta_for(const TransformResult& res, int direction) {
    double theta = 1.0;
    for (size_t k = 1; k < res.clusters.size(); ++k)
        for (int id : res.clusters[k].argmin_ids)
            theta *= std::abs(1.0 + direction * res.deriv_of.at(id));
    return theta;
}

std::vector<int> boundary_ids(const MarkedConfiguration& cfg) {
    std::vector<int> ids;
    ids.reserve(cfg.boundary.size());
    for (const Particle& b : cfg.boundary) ids.push_back(b.id);
    return ids;
}

// Adjacency of the edge graph augmented with extra pairs, lists sorted.
std::unordered_map<int, std::vector<int>> augmented_adjacency(
    const MarkedConfiguration& cfg, const std::vector<std::pair<int, int>>& extra) {
    std::unordered_map<int, std::vector<int>> adj;
    auto add = [&adj](const std::pair<int, int>& pr) {
        adj[pr.first].push_back(pr.second);
        adj[pr.second].push_back(pr.first);
    };
    for (const auto& pr : cfg.edges.pairs()) add(pr);
    for (const auto& pr : extra) add(pr);
    for (auto& [id, nbrs] : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return adj;
}

}  // namespace

void TransformParams::validate() const {
    require(std::isfinite(n) && n > 1.0, "n must be finite and > 1");
    require(std::isfinite(c) && c >= 0.0, "c must be finite and >= 0");
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    require(std::isfinite(eps) && eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    require(std::isfinite(c_K) && c_K > 0.0, "c_K must be positive");
    require(direction == 1 || direction == -1, "direction must be +1 or -1");
    if (strict_mode) {
        require(delta < 1e-6, "strict mode needs delta < 1e-6");
        require(delta < 1.0 / c_K, "strict mode needs delta < 1/c_K");
        require(c <= delta * delta, "strict mode needs c <= delta^2");
        require(n >= std::pow(delta, -8.0), "strict mode needs n >= delta^-8");
    } else {
        require(delta <= 0.5, "delta must be <= 1/2");
    }
    double slope_max = 3.0 * c / (std::pow(n, 2.0 / 3.0) * std::sqrt(std::log(n)));
    require(slope_max <= delta, "proposal slope 3c/(n^{2/3} sqrt(log n)) must be <= delta");
}

TransformParams TransformParams::for_decomposition(const SmoothDecomposition& d, double n,
                                                   double c, double delta, int direction,
                                                   bool strict) {
    TransformParams p;
    p.n = n;
    p.c = c;
    p.delta = delta;
    p.eps = d.eps;
    p.c_K = d.halo_range;
    p.direction = direction;
    p.strict_mode = strict;
    p.validate();
    return p;
}

double shift_proposal(double s, double n, double c) {
    double den = std::max(std::pow(n, 2.0 / 3.0), std::min(s, n));
    double amp = 3.0 * c / std::sqrt(std::log(n));
    return amp * std::log(n / den);
}

double shift_proposal_slope(double s, double n, double c) {
    double lo = std::pow(n, 2.0 / 3.0);
    if (!(s > lo) || !(s < n)) return 0.0;
    return -3.0 * c / (std::sqrt(std::log(n)) * s);
}

double slowdown(const Particle& y, double tau, const Particle& y2, const TransformParams& p,
                const SmoothDecomposition& d) {
    double h = std::abs(shift_proposal(sup_norm(y.x) - p.c_K, p.n, p.c) - tau);
    if (h > p.delta * p.eps) return tau;
    double dk = d.d_core(y, y2);
    if (dk > p.eps) return kInf;
    return tau + h / p.eps * dk;
}

double TransformResult::shift(int id) const {
    auto it = shift_of.find(id);
    if (it == shift_of.end())
        throw std::out_of_range("transform shift: unknown particle id " + std::to_string(id));
    return it->second;
}

TransformResult build_transform(const MarkedConfiguration& cfg, const TransformParams& p,
                                const SmoothDecomposition& d) {
    p.validate();
    require(cfg.window.n == p.n, "configuration window must match params.n");
    cfg.validate();

    const std::vector<Particle> all = all_particles(cfg);
    const int total = int(all.size());
    const Proposal proposal(p.n, p.c);
    const double hmax = p.delta * p.eps;
    const EdgeGraph egraph(cfg);

    CellIndex index(all, std::max(p.c_K, 1e-9));
    std::unordered_map<int, int> idx_of_id;
    idx_of_id.reserve(size_t(total));
    std::vector<int> cluster_of_idx(size_t(total), -1);
    std::vector<double> t_cur(static_cast<size_t>(total));
    std::vector<ActivePiece> piece(static_cast<size_t>(total));
    for (int i = 0; i < total; ++i) {
        t_cur[size_t(i)] = proposal(sup_norm(all[size_t(i)].x));
        idx_of_id[all[size_t(i)].id] = i;
    }

    TransformResult res;
    res.direction = p.direction;
    bool m_star_set = false;

    // Push the slow-down pieces of a freshly assigned cluster onto everything
    // still unassigned. A member with exhausted headroom turns its whole
    // profile into the constant tau, which then reaches every particle.
    auto process_cluster = [&](int k, const std::vector<int>& member_idx, double tau) {
        bool any_const = false;
        int const_src = -1;
        for (int mi : member_idx) {
            const Particle& src = all[size_t(mi)];
            double h = std::abs(proposal(sup_norm(src.x) - p.c_K) - tau);
            if (h > hmax) {
                if (!any_const) {
                    any_const = true;
                    const_src = src.id;
                }
                continue;
            }
            index.for_each_within(src.x, p.c_K, [&](int j) {
                if (cluster_of_idx[size_t(j)] >= 0) return;
                double dk = d.d_core(src, all[size_t(j)]);
                if (dk > p.eps) return;
                double val = tau + h / p.eps * dk;
                if (val < t_cur[size_t(j)]) {
                    t_cur[size_t(j)] = val;
                    piece[size_t(j)] = ActivePiece{PieceKind::SlowDown, src.id, tau, h};
                }
            });
        }
        if (any_const) {
            if (!m_star_set) {
                res.m_star = k;
                m_star_set = true;
            }
            for (int j = 0; j < total; ++j) {
                if (cluster_of_idx[size_t(j)] >= 0) continue;
                if (tau < t_cur[size_t(j)]) {
                    t_cur[size_t(j)] = tau;
                    piece[size_t(j)] = ActivePiece{PieceKind::ConstTau, const_src, tau, 0.0};
                }
            }
        }
    };

    auto assign_cluster = [&](int k, const std::vector<int>& member_ids,
                              const std::vector<int>& argmin_ids, double tau) {
        ClusterInfo info;
        info.ids = member_ids;
        info.argmin_ids = argmin_ids;
        info.tau = tau;
        std::vector<int> member_idx;
        member_idx.reserve(member_ids.size());
        for (int id : member_ids) {
            int i = idx_of_id.at(id);
            if (cluster_of_idx[size_t(i)] >= 0)
                throw std::logic_error("transform: edge cluster collided with an assigned cluster");
            cluster_of_idx[size_t(i)] = k;
            member_idx.push_back(i);
            res.cluster_of[id] = k;
            res.shift_of[id] = tau;
        }
        if (k > 0) {
            for (int id : argmin_ids) {
                int i = idx_of_id.at(id);
                const ActivePiece& ap = piece[size_t(i)];
                const Particle* src = ap.kind == PieceKind::SlowDown
                                          ? &all[size_t(idx_of_id.at(ap.source_id))]
                                          : nullptr;
                double dv = piece_deriv(ap, all[size_t(i)], src, p, d);
                res.piece_of[id] = ap;
                res.deriv_of[id] = dv;
                res.jacobian_factors[id] = std::abs(1.0 + p.direction * dv);
            }
        }
        res.clusters.push_back(std::move(info));
        res.m = k;
        process_cluster(k, member_idx, tau);
        return member_ids.size();
    };

    // Cluster 0: the edge-connected hull of the outside particles, shift 0.
    size_t assigned = 0;
    {
        std::vector<int> seeds = boundary_ids(cfg);
        std::vector<int> members = egraph.closure(seeds);
        std::sort(seeds.begin(), seeds.end());
        assigned += assign_cluster(0, members, seeds, 0.0);
    }

    int k = 0;
    while (assigned < size_t(total)) {
        ++k;
        double tau = std::numeric_limits<double>::infinity();
        for (int i = 0; i < total; ++i)
            if (cluster_of_idx[size_t(i)] < 0) tau = std::min(tau, t_cur[size_t(i)]);
        std::vector<int> argmin_ids;
        for (int i = 0; i < total; ++i)
            if (cluster_of_idx[size_t(i)] < 0 && t_cur[size_t(i)] == tau)
                argmin_ids.push_back(all[size_t(i)].id);
        std::sort(argmin_ids.begin(), argmin_ids.end());
        std::vector<int> members = egraph.closure(argmin_ids);
        assigned += assign_cluster(k, members, argmin_ids, tau);
    }

    if (!m_star_set) res.m_star = res.m;
    res.theta = theta_for(res, p.direction);
    return res;
}

MarkedConfiguration apply_transform(const MarkedConfiguration& cfg,
                                    const TransformResult& result) {
    MarkedConfiguration out = cfg;
    auto move = [&result](Particle& q) {
        double s = result.shift(q.id);
        if (s != 0.0) q.x[0] += result.direction * s;
    };
    for (Particle& q : out.interior) move(q);
    for (Particle& q : out.boundary) move(q);
    return out;
}

MarkedConfiguration invert_transform(const MarkedConfiguration& cfg, const TransformParams& p,
                                     const SmoothDecomposition& d) {
    p.validate();
    require(cfg.window.n == p.n, "configuration window must match params.n");
    cfg.validate();

    const std::vector<Particle> all = all_particles(cfg);
    const int total = int(all.size());
    const Proposal proposal(p.n, p.c);
    const double dir = double(p.direction);
    const double cap = proposal(0.0);  // largest possible shift
    const double hmax = p.delta * p.eps;

    std::unordered_map<int, int> idx_of_id;
    idx_of_id.reserve(size_t(total));
    for (int i = 0; i < total; ++i) idx_of_id[all[size_t(i)].id] = i;
    const EdgeGraph egraph(cfg);

    // Composed profile value at the preimage of particle j: the unique root of
    // v = profile(y - dir*v*e1). Every evaluated profile is capped by the base
    // proposal, so the root lies in [0, cap]; the profile is delta-Lipschitz,
    // making v -> profile(..) - v strictly decreasing.
    auto solve_root = [&](int j, auto&& prof) {
        const Vec2& y = all[size_t(j)].x;
        auto g = [&](double v) {
            Vec2 w = y;
            w[0] -= dir * v;
            return prof(w) - v;
        };
        if (cap <= 0.0 || g(0.0) <= 0.0) return 0.0;
        double lo = 0.0, hi = cap;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (g(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        return hi;
    };

    auto base_profile = [&](const Vec2& w) { return proposal(sup_norm(w)); };

    std::vector<double> v(static_cast<size_t>(total));
    std::vector<int> cluster_of_idx(size_t(total), -1);
    std::vector<double> tau_of_idx(size_t(total), 0.0);
    for (int i = 0; i < total; ++i) v[size_t(i)] = solve_root(i, base_profile);

    // Mirror of the forward cluster pieces: sources are anchored at their
    // shifted-back positions and every remaining particle re-solves its
    // composed value against the new pieces (min over pieces of roots).
    auto process_cluster = [&](const std::vector<int>& member_idx, double tau) {
        bool any_const = false;
        for (int mi : member_idx) {
            Particle src = all[size_t(mi)];
            if (tau != 0.0) src.x[0] -= dir * tau;
            double h = std::abs(proposal(sup_norm(src.x) - p.c_K) - tau);
            if (h > hmax) {
                any_const = true;
                continue;
            }
            for (int j = 0; j < total; ++j) {
                if (cluster_of_idx[size_t(j)] >= 0 || v[size_t(j)] <= tau) continue;
                const Vec2& yj = all[size_t(j)].x;
                if (std::abs(yj[1] - src.x[1]) > p.c_K) continue;
                double dx = (yj[0] - src.x[0]) * dir;
                if (dx < -p.c_K || dx > cap + p.c_K) continue;
                double root = solve_root(j, [&](const Vec2& w) {
                    Particle wp = all[size_t(j)];
                    wp.x = w;
                    double dk = d.d_core(src, wp);
                    double pv = dk > p.eps ? kInf : tau + h / p.eps * dk;
                    return std::min(base_profile(w), pv);
                });
                if (root < v[size_t(j)]) v[size_t(j)] = root;
            }
        }
        if (any_const) {
            for (int j = 0; j < total; ++j)
                if (cluster_of_idx[size_t(j)] < 0 && tau < v[size_t(j)]) v[size_t(j)] = tau;
        }
    };

    auto assign_cluster = [&](const std::vector<int>& member_ids, double tau) {
        std::vector<int> member_idx;
        member_idx.reserve(member_ids.size());
        for (int id : member_ids) {
            int i = idx_of_id.at(id);
            if (cluster_of_idx[size_t(i)] >= 0)
                throw std::logic_error("transform: edge cluster collided with an assigned cluster");
            cluster_of_idx[size_t(i)] = 0;  // mark assigned; index not needed
            tau_of_idx[size_t(i)] = tau;
            member_idx.push_back(i);
        }
        process_cluster(member_idx, tau);
        return member_ids.size();
    };

    size_t assigned = 0;
    {
        std::vector<int> seeds = boundary_ids(cfg);
        std::vector<int> members = egraph.closure(seeds);
        assigned += assign_cluster(members, 0.0);
    }
    while (assigned < size_t(total)) {
        double tau = std::numeric_limits<double>::infinity();
        for (int i = 0; i < total; ++i)
            if (cluster_of_idx[size_t(i)] < 0) tau = std::min(tau, v[size_t(i)]);
        std::vector<int> argmin_ids;
        for (int i = 0; i < total; ++i)
            if (cluster_of_idx[size_t(i)] < 0 && v[size_t(i)] == tau)
                argmin_ids.push_back(all[size_t(i)].id);
        std::vector<int> members = egraph.closure(argmin_ids);
        assigned += assign_cluster(members, tau);
    }

    MarkedConfiguration moved;
    moved.window = cfg.window;
    moved.interior.reserve(size_t(total));
    for (int i = 0; i < total; ++i) {
        Particle q = all[size_t(i)];
        if (tau_of_idx[size_t(i)] != 0.0) q.x[0] -= dir * tau_of_idx[size_t(i)];
        moved.interior.push_back(q);
    }
    moved.edges = cfg.edges;
    return restrict_window(moved, p.n);
}

std::vector<std::pair<int, int>> halo_pairs(const MarkedConfiguration& cfg,
                                            const TransformParams& p,
                                            const SmoothDecomposition& d) {
    std::vector<Particle> all = all_particles(cfg);
    CellIndex index(all, std::max(p.c_K, 1e-9));
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < int(all.size()); ++i) {
        index.for_each_within(all[size_t(i)].x, p.c_K, [&](int j) {
            if (j <= i) return;
            if (d.d_core(all[size_t(i)], all[size_t(j)]) > p.eps) return;
            int a = all[size_t(i)].id, b = all[size_t(j)].id;
            out.emplace_back(std::min(a, b), std::max(a, b));
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

GoodnessVerdict is_good(const MarkedConfiguration& cfg, const TransformParams& p,
                        const SmoothDecomposition& d) {
    p.validate();
    cfg.validate();
    std::vector<std::pair<int, int>> extra = halo_pairs(cfg, p, d);
    Components comps = edge_components(cfg, extra);

    for (const std::vector<int>& members : comps.members) {
        for (int y_id : members) {
            double a = sup_norm(cfg.find(y_id)->x);
            double reach = (a > 1.0 ? std::max(1.0, a * std::log(a)) : 1.0) / p.delta;
            for (int far_id : members) {
                if (sup_norm(cfg.find(far_id)->x) <= reach) continue;
                GoodnessWitness w;
                w.y_id = y_id;
                w.far_id = far_id;
                // breadth-first path through the augmented edge graph
                auto adj = augmented_adjacency(cfg, extra);
                std::unordered_map<int, int> parent;
                parent[y_id] = y_id;
                std::deque<int> queue{y_id};
                while (!queue.empty() && !parent.count(far_id)) {
                    int cur = queue.front();
                    queue.pop_front();
                    for (int nb : adj[cur])
                        if (!parent.count(nb)) {
                            parent[nb] = cur;
                            queue.push_back(nb);
                        }
                }
                for (int cur = far_id; cur != y_id; cur = parent.at(cur)) w.path.push_back(cur);
                w.path.push_back(y_id);
                std::reverse(w.path.begin(), w.path.end());
                return GoodnessVerdict{false, w};
            }
        }
    }
    return GoodnessVerdict{true, std::nullopt};
}

int descent_witness(const MarkedConfiguration& cfg, const TransformResult& result,
                    const TransformParams& p, const SmoothDecomposition& d, int id) {
    require(result.cluster_of.count(id) > 0, "descent witness: unknown particle id");
    auto adj = augmented_adjacency(cfg, halo_pairs(cfg, p, d));

    // Reachability through augmented edges with non-increasing cluster index.
    std::unordered_set<int> seen{id};
    std::deque<int> queue{id};
    int k_min = result.cluster_of.at(id);
    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        int kc = result.cluster_of.at(cur);
        k_min = std::min(k_min, kc);
        for (int nb : adj[cur]) {
            if (seen.count(nb) || result.cluster_of.at(nb) > kc) continue;
            seen.insert(nb);
            queue.push_back(nb);
        }
    }
    for (int cand : result.clusters[size_t(k_min)].argmin_ids)
        if (seen.count(cand)) return cand;
    // Every cluster hangs off its minimizing particles through plain edges of
    // equal index, so one of them is always reachable.
    throw std::logic_error("transform: descent witness search found no seeding particle");
}

JacobianDensity jacobian_density(const MarkedConfiguration& cfg, const TransformResult& result,
                                 const TransformParams& p, const SmoothDecomposition& d,
                                 double beta) {
    require(p.direction == result.direction, "density direction must match the built transform");
    JacobianDensity out;
    out.theta = theta_for(result, result.direction);
    out.phi = out.theta;
    if (!d.trivial) {
        MarkedConfiguration image = apply_transform(cfg, result);
        double e0 = hamiltonian_pair(d.u_bar, d.ubar_range, cfg);
        double e1 = hamiltonian_pair(d.u_bar, d.ubar_range, image);
        out.phi = std::exp(-beta * (e1 - e0)) * out.theta;
    }
    return out;
}

ShiftDiagnostics diagnostics(const MarkedConfiguration& cfg, const TransformParams& p,
                             const SmoothDecomposition& d) {
    TransformParams plus = p;
    plus.direction = +1;
    TransformResult res = build_transform(cfg, plus, d);
    ShiftDiagnostics out;
    out.theta_plus = theta_for(res, +1);
    out.theta_minus = theta_for(res, -1);
    out.s2 = std::abs(std::log(out.theta_plus * out.theta_minus));
    if (d.trivial) return out;  // smooth part identically zero, s1 = 0
    TransformResult resm = res;
    resm.direction = -1;
    MarkedConfiguration img_p = apply_transform(cfg, res);
    MarkedConfiguration img_m = apply_transform(cfg, resm);
    double h0 = hamiltonian_pair(d.u_bar, d.ubar_range, cfg);
    double hp = hamiltonian_pair(d.u_bar, d.ubar_range, img_p);
    double hm = hamiltonian_pair(d.u_bar, d.ubar_range, img_m);
    out.s1 = std::abs(hp + hm - 2.0 * h0);
    return out;
}

}  // namespace gshift
