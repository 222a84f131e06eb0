#include "gshift/core.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace gshift {

bool SpinLaw::valid_spin(const Spin& s) const {
    if (s.kind != kind) return false;
    switch (kind) {
        case SpinKind::Unit: return true;
        case SpinKind::Discrete: return s.label >= 0 && s.label < q;
        case SpinKind::Scalar: return s.value >= lo && s.value <= hi;
        case SpinKind::Direction: return s.value >= 0.0 && s.value < M_PI;
    }
    return false;
}

// --- EdgeSet ---------------------------------------------------------------

uint64_t EdgeSet::key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (uint64_t(uint32_t(a)) << 32) | uint64_t(uint32_t(b));
}

void EdgeSet::insert(int a, int b) {
    if (a == b) throw std::invalid_argument("EdgeSet: self-loop on id " + std::to_string(a));
    uint64_t k = key(a, b);
    if (keys_.insert(k).second) list_.emplace_back(std::min(a, b), std::max(a, b));
}

bool EdgeSet::contains(int a, int b) const { return keys_.count(key(a, b)) > 0; }

// --- MarkedConfiguration ---------------------------------------------------

void MarkedConfiguration::validate(const SpinLaw* law) const {
    std::unordered_set<int> ids;
    for (const Particle& p : interior) {
        if (!p.x.allFinite()) throw std::invalid_argument("non-finite interior coordinate");
        if (sup_norm(p.x) > window.n)
            throw std::invalid_argument("interior particle id " + std::to_string(p.id) +
                                        " outside window");
        if (!ids.insert(p.id).second)
            throw std::invalid_argument("duplicate id " + std::to_string(p.id));
        if (law && !law->valid_spin(p.spin))
            throw std::invalid_argument("spin out of law for id " + std::to_string(p.id));
    }
    for (const Particle& p : boundary) {
        if (!p.x.allFinite()) throw std::invalid_argument("non-finite boundary coordinate");
        if (sup_norm(p.x) <= window.n)
            throw std::invalid_argument("boundary particle id " + std::to_string(p.id) +
                                        " inside window");
        if (!ids.insert(p.id).second)
            throw std::invalid_argument("duplicate id " + std::to_string(p.id));
        if (law && !law->valid_spin(p.spin))
            throw std::invalid_argument("spin out of law for id " + std::to_string(p.id));
    }
    for (auto [a, b] : edges.pairs())
        if (!ids.count(a) || !ids.count(b))
            throw std::invalid_argument("edge references unknown id");
}

const Particle* MarkedConfiguration::find(int id) const {
    for (const Particle& p : interior)
        if (p.id == id) return &p;
    for (const Particle& p : boundary)
        if (p.id == id) return &p;
    return nullptr;
}

std::vector<const Particle*> MarkedConfiguration::all() const {
    std::vector<const Particle*> v;
    v.reserve(total());
    for (const Particle& p : interior) v.push_back(&p);
    for (const Particle& p : boundary) v.push_back(&p);
    return v;
}

int MarkedConfiguration::max_id() const {
    int m = -1;
    for (const Particle& p : interior) m = std::max(m, p.id);
    for (const Particle& p : boundary) m = std::max(m, p.id);
    return m;
}

MarkedConfiguration restrict_window(const MarkedConfiguration& cfg, double n) {
    MarkedConfiguration out;
    out.window = Window{n};
    for (const Particle& p : cfg.interior)
        (sup_norm(p.x) <= n ? out.interior : out.boundary).push_back(p);
    for (const Particle& p : cfg.boundary)
        (sup_norm(p.x) <= n ? out.interior : out.boundary).push_back(p);
    out.edges = cfg.edges;
    return out;
}

// --- CellIndex ---------------------------------------------------------------

CellIndex::CellIndex(const std::vector<Particle>& pts, double range) { rebuild(pts, range); }

void CellIndex::rebuild(const std::vector<Particle>& pts, double range) {
    pts_ = &pts;
    range_ = std::max(range, 1e-12);
    cell_ = range_;
    grid_.clear();
    grid_.reserve(pts.size() * 2);
    for (size_t i = 0; i < pts.size(); ++i)
        grid_[cell_key(pts[i].x[0], pts[i].x[1])].push_back(int(i));
}

// Cells are clamped to a finite integer range so extreme coordinates (huge
// symbolic windows) still hash; the distance filter keeps queries exact.
int64_t CellIndex::cell_key(double x, double y) const {
    const double lim = 1e9;
    auto c = [&](double v) {
        double f = std::floor(v / cell_);
        f = std::min(std::max(f, -lim), lim);
        return int64_t(f);
    };
    return c(x) * 4000000037LL + c(y);
}

void CellIndex::for_each_within(const Vec2& p, double r,
                                const std::function<void(int)>& fn) const {
    if (!pts_) return;
    const double r2 = r * r;
    const double lim = 1e9;
    auto cc = [&](double v) {
        double f = std::floor(v / cell_);
        return int64_t(std::min(std::max(f, -lim), lim));
    };
    int64_t x0 = cc(p[0] - r), x1 = cc(p[0] + r);
    int64_t y0 = cc(p[1] - r), y1 = cc(p[1] + r);
    for (int64_t ix = x0; ix <= x1; ++ix)
        for (int64_t iy = y0; iy <= y1; ++iy) {
            auto it = grid_.find(ix * 4000000037LL + iy);
            if (it == grid_.end()) continue;
            for (int i : it->second)
                if (((*pts_)[i].x - p).squaredNorm() <= r2) fn(i);
        }
}

std::vector<int> CellIndex::query(const Vec2& p, double r) const {
    std::vector<int> out;
    for_each_within(p, r, [&](int i) { out.push_back(i); });
    return out;
}

// --- edge graph clusters -----------------------------------------------------

static std::unordered_map<int, std::vector<int>> adjacency(
    const MarkedConfiguration& cfg, const std::vector<std::pair<int, int>>& extra) {
    std::unordered_map<int, std::vector<int>> adj;
    for (const Particle& p : cfg.interior) adj[p.id];
    for (const Particle& p : cfg.boundary) adj[p.id];
    auto add = [&](int a, int b) {
        if (!adj.count(a) || !adj.count(b))
            throw std::invalid_argument("edge references unknown id");
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (auto [a, b] : cfg.edges.pairs()) add(a, b);
    for (auto [a, b] : extra) add(a, b);
    return adj;
}

std::vector<int> b_cluster(const MarkedConfiguration& cfg, const std::vector<int>& seeds) {
    auto adj = adjacency(cfg, {});
    std::unordered_set<int> seen;
    std::deque<int> todo;
    for (int s : seeds) {
        if (!adj.count(s)) throw std::invalid_argument("b_cluster: unknown id " + std::to_string(s));
        if (seen.insert(s).second) todo.push_back(s);
    }
    std::vector<int> out;
    while (!todo.empty()) {
        int v = todo.front();
        todo.pop_front();
        out.push_back(v);
        for (int w : adj[v])
            if (seen.insert(w).second) todo.push_back(w);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Components edge_components(const MarkedConfiguration& cfg,
                           const std::vector<std::pair<int, int>>& extra_pairs) {
    auto adj = adjacency(cfg, extra_pairs);
    Components comps;
    std::vector<int> ids;
    ids.reserve(adj.size());
    for (auto& kv : adj) ids.push_back(kv.first);
    std::sort(ids.begin(), ids.end());
    for (int start : ids) {
        if (comps.comp_of.count(start)) continue;
        int ci = int(comps.members.size());
        std::vector<int> mem;
        std::deque<int> todo{start};
        comps.comp_of[start] = ci;
        while (!todo.empty()) {
            int v = todo.front();
            todo.pop_front();
            mem.push_back(v);
            for (int w : adj[v])
                if (!comps.comp_of.count(w)) {
                    comps.comp_of[w] = ci;
                    todo.push_back(w);
                }
        }
        std::sort(mem.begin(), mem.end());
        comps.members.push_back(std::move(mem));
    }
    return comps;
}

}  // namespace gshift
