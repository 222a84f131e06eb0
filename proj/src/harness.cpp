#include "gshift/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gshift {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("harness: " + msg);
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& val) {
    size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(val, &pos);
    } catch (const std::exception&) {
        require(false, "key '" + key + "' needs a number, got '" + val + "'");
    }
    require(pos == val.size(), "key '" + key + "' needs a number, got '" + val + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& val) {
    size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(val, &pos);
    } catch (const std::exception&) {
        require(false, "key '" + key + "' needs an integer, got '" + val + "'");
    }
    require(pos == val.size(), "key '" + key + "' needs an integer, got '" + val + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1") return true;
    if (val == "false" || val == "0") return false;
    require(false, "key '" + key + "' needs true/false, got '" + val + "'");
    return false;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / double(xs.size());
    if (xs.size() < 2) return out;
    double sq = 0.0;
    for (double x : xs) sq += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(sq / (double(xs.size()) * double(xs.size() - 1)));
    return out;
}

std::vector<std::pair<std::string, std::string>> canonical_pairs(const ExperimentSpec& s) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto put = [&](const char* k, const std::string& v) { kv.emplace_back(k, v); };
    put("name", s.name);
    put("model", model_kind_name(s.model.kind));
    switch (s.model.kind) {
        case ModelKind::HardCore: put("r0", fmt(s.model.r0)); break;
        case ModelKind::SoftCore:
            put("c1", fmt(s.model.c1));
            put("r1", fmt(s.model.r1));
            break;
        case ModelKind::Well:
            put("r0", fmt(s.model.r0));
            put("r1", fmt(s.model.r1));
            put("c1", fmt(s.model.c1));
            put("c2", fmt(s.model.c2));
            put("rcut", fmt(s.model.rcut));
            break;
        case ModelKind::LennardJones:
            put("c1", fmt(s.model.c1));
            put("c2", fmt(s.model.c2));
            put("rcut", fmt(s.model.rcut));
            break;
        case ModelKind::WidomRowlinson:
            put("q", std::to_string(s.model.q));
            put("r", fmt(s.model.r));
            break;
        case ModelKind::RandomRadii: put("rmax", fmt(s.model.rmax)); break;
        case ModelKind::HardRods: put("r", fmt(s.model.r)); break;
    }
    put("beta", fmt(s.beta));
    put("z", fmt(s.z));
    put("xi", fmt(s.xi));
    put("n", fmt(s.n));
    put("pad", fmt(s.pad));
    switch (s.boundary) {
        case BoundarySource::Empty: put("boundary", "empty"); break;
        case BoundarySource::Lattice: put("boundary", "lattice"); break;
        case BoundarySource::File: put("boundary", "file"); break;
    }
    if (!s.boundary_file.empty()) put("boundary_file", s.boundary_file);
    if (s.lattice_spacing > 0.0) put("lattice_spacing", fmt(s.lattice_spacing));
    put("sampler", s.exact_sampler ? "exact" : "mcmc");
    if (s.exact_sampler) {
        put("k_max", std::to_string(s.k_max));
        put("grid_budget", std::to_string(s.grid_budget));
    } else {
        put("burn_in", std::to_string(s.mc.burn_in));
        put("thin", std::to_string(s.mc.thin));
        put("step", fmt(s.mc.step));
        put("p_move", fmt(s.mc.p_move));
        put("p_birth", fmt(s.mc.p_birth));
        put("p_spin_refresh", fmt(s.mc.p_spin_refresh));
    }
    put("c", fmt(s.c));
    put("delta", fmt(s.delta));
    put("strict", s.strict ? "true" : "false");
    put("gamma", fmt(s.dopt.gamma));
    put("mollifier_width", fmt(s.dopt.mollifier_width));
    put("require_feasible", s.dopt.require_feasible ? "true" : "false");
    put("samples", std::to_string(s.samples));
    put("seed", std::to_string(s.seed));
    put("workers", std::to_string(s.workers));
    put("out_dir", s.out_dir);
    return kv;
}

json echo_json(const ExperimentSpec& s) {
    json j = json::object();
    for (const auto& [k, v] : canonical_pairs(s)) j[k] = v;
    return j;
}

double plateau_of(const TransformParams& p) { return shift_proposal(0.0, p.n, p.c); }

// ---- per-configuration predicates -----------------------------------------

std::optional<std::string> check_boundary_fixed(const MarkedConfiguration& cfg,
                                                const TransformResult& res) {
    for (const Particle& b : cfg.boundary)
        if (res.shift(b.id) != 0.0)
            return "boundary particle id " + std::to_string(b.id) + " shifted by " +
                   fmt(res.shift(b.id));
    // The window is invariant: shifted interior particles stay in the closed
    // box (the proposal decays at least as fast as the distance to the edge).
    for (const Particle& y : cfg.interior) {
        double moved = y.x[0] + res.direction * res.shift(y.id);
        if (std::max(std::abs(moved), std::abs(y.x[1])) > cfg.window.n)
            return "interior particle id " + std::to_string(y.id) + " left the window: |" +
                   fmt(moved) + "| > " + fmt(cfg.window.n);
    }
    return std::nullopt;
}

std::optional<std::string> check_monotone(const MarkedConfiguration& cfg,
                                          const TransformParams& p, const TransformResult& res) {
    if (res.clusters.at(0).tau != 0.0) return "boundary cluster has nonzero shift";
    for (size_t k = 2; k < res.clusters.size(); ++k)
        if (res.clusters[k].tau < res.clusters[k - 1].tau)
            return "cluster shift decreased at step " + std::to_string(k) + ": " +
                   fmt(res.clusters[k - 1].tau) + " -> " + fmt(res.clusters[k].tau);
    for (const Particle* q : cfg.all()) {
        double cap = shift_proposal(sup_norm(q->x), p.n, p.c);
        if (res.shift(q->id) > cap)
            return "particle id " + std::to_string(q->id) + " shifted above its proposal: " +
                   fmt(res.shift(q->id)) + " > " + fmt(cap);
    }
    return std::nullopt;
}

std::optional<std::string> check_rigid(const MarkedConfiguration& cfg,
                                       const SmoothDecomposition& d, const TransformResult& res) {
    for (auto [a, b] : cfg.edges.pairs())
        if (res.shift(a) != res.shift(b))
            return "edge pair (" + std::to_string(a) + "," + std::to_string(b) +
                   ") shifted unequally: " + fmt(res.shift(a)) + " vs " + fmt(res.shift(b));
    // Contact pairs (core membership, d_core == 0) ride rigidly; pairs merely
    // inside the eps-halo pick up interpolated slow-downs and are exempt.
    auto all = cfg.all();
    std::vector<Particle> pts(all.size());
    for (size_t i = 0; i < all.size(); ++i) pts[i] = *all[i];
    double range = std::max(d.core_range, 1e-9);
    CellIndex index(pts, range);
    std::optional<std::string> bad;
    for (size_t i = 0; i < pts.size() && !bad; ++i) {
        index.for_each_within(pts[i].x, range, [&](int j) {
            if (bad || size_t(j) <= i) return;
            const Particle& q = pts[size_t(j)];
            if (!d.in_core(pts[i], q)) return;
            if (res.shift(pts[i].id) != res.shift(q.id))
                bad = "contact pair (" + std::to_string(pts[i].id) + "," + std::to_string(q.id) +
                      ") shifted unequally: " + fmt(res.shift(pts[i].id)) + " vs " +
                      fmt(res.shift(q.id));
        });
    }
    return bad;
}

std::optional<std::string> check_lipschitz(const MarkedConfiguration& cfg,
                                           const TransformParams& p, const TransformResult& res) {
    // Pairs farther apart than plateau/delta satisfy the bound automatically
    // (shift differences never exceed the plateau), so only near pairs are
    // enumerated.
    double plateau = plateau_of(p);
    if (plateau <= 0.0) return std::nullopt;
    auto all = cfg.all();
    std::vector<Particle> pts;
    pts.reserve(all.size());
    for (const Particle* q : all) pts.push_back(*q);
    double range = plateau / p.delta;
    CellIndex index(pts, range);
    std::optional<std::string> bad;
    for (size_t i = 0; i < pts.size() && !bad; ++i) {
        index.for_each_within(pts[i].x, range, [&](int j) {
            if (bad || size_t(j) <= i) return;
            double lhs = std::abs(res.shift(pts[i].id) - res.shift(pts[size_t(j)].id));
            double rhs = p.delta * (pts[i].x - pts[size_t(j)].x).norm() + 1e-12;
            if (lhs > rhs)
                bad = "pair (" + std::to_string(pts[i].id) + "," +
                      std::to_string(pts[size_t(j)].id) + ") breaks the Lipschitz bound: " +
                      fmt(lhs) + " > " + fmt(rhs);
        });
    }
    return bad;
}

std::optional<std::string> check_round_trip(const MarkedConfiguration& cfg,
                                            const TransformParams& p,
                                            const SmoothDecomposition& d,
                                            const TransformResult& res) {
    MarkedConfiguration img = apply_transform(cfg, res);
    MarkedConfiguration back = invert_transform(img, p, d);
    if (back.interior.size() != cfg.interior.size() || back.boundary.size() != cfg.boundary.size())
        return "inverse changed the particle split: " + std::to_string(back.interior.size()) +
               "/" + std::to_string(back.boundary.size()) + " vs " +
               std::to_string(cfg.interior.size()) + "/" + std::to_string(cfg.boundary.size());
    for (size_t i = 0; i < cfg.interior.size(); ++i) {
        if (back.interior[i].id != cfg.interior[i].id)
            return "inverse permuted interior ids at slot " + std::to_string(i);
        double err = std::max(std::abs(back.interior[i].x[0] - cfg.interior[i].x[0]),
                              std::abs(back.interior[i].x[1] - cfg.interior[i].x[1]));
        if (err > 1e-9)
            return "round trip missed particle id " + std::to_string(cfg.interior[i].id) +
                   " by " + fmt(err);
    }
    for (size_t i = 0; i < cfg.boundary.size(); ++i)
        if (back.boundary[i].x[0] != cfg.boundary[i].x[0] ||
            back.boundary[i].x[1] != cfg.boundary[i].x[1])
            return "round trip moved boundary particle id " + std::to_string(cfg.boundary[i].id);
    return std::nullopt;
}

std::optional<std::string> check_good_central(const MarkedConfiguration& cfg,
                                              const TransformParams& p,
                                              const SmoothDecomposition& d,
                                              const TransformResult& res,
                                              const GoodnessVerdict* pre = nullptr) {
    GoodnessVerdict verdict = pre ? *pre : is_good(cfg, p, d);
    if (!verdict.good) return std::nullopt;  // only good configurations are constrained
    double plateau = plateau_of(p);
    double central = std::sqrt(p.n);
    for (const Particle& q : cfg.interior) {
        if (sup_norm(q.x) > central) continue;
        if (res.shift(q.id) != plateau)
            return "good configuration: central particle id " + std::to_string(q.id) +
                   " shifted by " + fmt(res.shift(q.id)) + " instead of " + fmt(plateau);
    }
    return std::nullopt;
}

std::optional<std::string> dispatch_check(const std::string& check,
                                          const MarkedConfiguration& cfg,
                                          const TransformParams& p, const SmoothDecomposition& d,
                                          const TransformResult& res) {
    if (check == "boundary-fixed") return check_boundary_fixed(cfg, res);
    if (check == "monotone-clusters") return check_monotone(cfg, p, res);
    if (check == "rigid-pairs") return check_rigid(cfg, d, res);
    if (check == "lipschitz") return check_lipschitz(cfg, p, res);
    if (check == "round-trip") return check_round_trip(cfg, p, d, res);
    if (check == "good-shift-central") return check_good_central(cfg, p, d, res);
    throw std::invalid_argument("harness: unknown check '" + check + "'");
}

struct ExperimentContext {
    PotentialModel model;
    SmoothDecomposition d;
    TransformParams p;
};

ExperimentContext make_context(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentContext ctx;
    ctx.model = make_model(spec.model);
    ctx.d = smooth_decompose(ctx.model, spec.dopt);
    ctx.p = TransformParams::for_decomposition(ctx.d, spec.n, spec.c, spec.delta);
    ctx.p.strict_mode = spec.strict;
    ctx.p.validate();
    return ctx;
}

long long elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
}

}  // namespace

// ---- spec parsing ----------------------------------------------------------

void ExperimentSpec::validate() const {
    require(std::isfinite(n) && n > 1.0, "window n must be finite and > 1");
    require(!(pad >= 0.0) || std::isfinite(pad), "pad must be finite");
    require(samples >= 1, "sample count must be >= 1");
    require(std::isfinite(z) && z > 0.0, "activity z must be positive");
    require(std::isfinite(beta) && beta >= 0.0, "beta must be nonnegative");
    require(std::isfinite(xi) && xi > 0.0, "xi must be positive");
    require(workers >= 1, "workers must be >= 1");
    require(std::isfinite(c) && c >= 0.0, "shift amplitude c must be nonnegative");
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    if (exact_sampler)
        require(k_max >= 1 && grid_budget >= 2, "exact sampler needs k_max >= 1, grid_budget >= 2");
    if (boundary == BoundarySource::File) {
        require(!boundary_file.empty(), "boundary = file needs a boundary_file");
        require(std::filesystem::exists(boundary_file),
                "boundary_file does not exist: " + boundary_file);
    }
    mc.validate();
}

double ExperimentSpec::effective_pad(const PotentialModel& model) const {
    return pad >= 0.0 ? pad : 2.0 * model.interaction_range;
}

ExperimentSpec parse_experiment_text(const std::string& text) {
    ExperimentSpec spec;
    std::string kind = "hard_core";
    bool model_given = false;
    double r0 = 0, r1 = 0, c1 = 0, c2 = 0, rcut = 0, r = 0, rmax = 0;
    int q = 0;

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        bool quoted = false;
        size_t cut = std::string::npos;
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] == '"') quoted = !quoted;
            else if (raw[i] == '#' && !quoted) {
                cut = i;
                break;
            }
        }
        std::string line = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
        if (line.empty()) continue;
        size_t eq = line.find('=');
        require(eq != std::string::npos, "config line missing '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        require(!key.empty(), "config line missing key: " + line);
        require(!val.empty(), "empty value for key '" + key + "'");
        spec.echo.emplace_back(key, val);

        if (key == "name") spec.name = val;
        else if (key == "model") { kind = val; model_given = true; }
        else if (key == "r0") { r0 = parse_double(key, val); model_given = true; }
        else if (key == "r1") { r1 = parse_double(key, val); model_given = true; }
        else if (key == "c1") { c1 = parse_double(key, val); model_given = true; }
        else if (key == "c2") { c2 = parse_double(key, val); model_given = true; }
        else if (key == "rcut") { rcut = parse_double(key, val); model_given = true; }
        else if (key == "r") { r = parse_double(key, val); model_given = true; }
        else if (key == "rmax") { rmax = parse_double(key, val); model_given = true; }
        else if (key == "q") { q = int(parse_int(key, val)); model_given = true; }
        else if (key == "beta") spec.beta = parse_double(key, val);
        else if (key == "z") spec.z = parse_double(key, val);
        else if (key == "xi") spec.xi = parse_double(key, val);
        else if (key == "n") spec.n = parse_double(key, val);
        else if (key == "pad") spec.pad = parse_double(key, val);
        else if (key == "boundary") {
            if (val == "empty") spec.boundary = BoundarySource::Empty;
            else if (val == "lattice") spec.boundary = BoundarySource::Lattice;
            else if (val == "file") spec.boundary = BoundarySource::File;
            else require(false, "boundary must be empty|lattice|file, got '" + val + "'");
        } else if (key == "boundary_file") spec.boundary_file = val;
        else if (key == "lattice_spacing") spec.lattice_spacing = parse_double(key, val);
        else if (key == "burn_in") spec.mc.burn_in = uint64_t(parse_int(key, val));
        else if (key == "thin") spec.mc.thin = uint64_t(parse_int(key, val));
        else if (key == "step") spec.mc.step = parse_double(key, val);
        else if (key == "p_move") spec.mc.p_move = parse_double(key, val);
        else if (key == "p_birth") spec.mc.p_birth = parse_double(key, val);
        else if (key == "p_spin_refresh") spec.mc.p_spin_refresh = parse_double(key, val);
        else if (key == "sampler") {
            if (val == "mcmc") spec.exact_sampler = false;
            else if (val == "exact") spec.exact_sampler = true;
            else require(false, "sampler must be mcmc|exact, got '" + val + "'");
        } else if (key == "k_max") spec.k_max = int(parse_int(key, val));
        else if (key == "grid_budget") spec.grid_budget = int(parse_int(key, val));
        else if (key == "c") spec.c = parse_double(key, val);
        else if (key == "delta") spec.delta = parse_double(key, val);
        else if (key == "strict") spec.strict = parse_bool(key, val);
        else if (key == "gamma") spec.dopt.gamma = parse_double(key, val);
        else if (key == "mollifier_width") spec.dopt.mollifier_width = parse_double(key, val);
        else if (key == "require_feasible") spec.dopt.require_feasible = parse_bool(key, val);
        else if (key == "samples") spec.samples = size_t(parse_int(key, val));
        else if (key == "seed") spec.seed = uint64_t(parse_int(key, val));
        else if (key == "workers") spec.workers = int(parse_int(key, val));
        else if (key == "out_dir") spec.out_dir = val;
        else require(false, "unknown config key '" + key + "'");
    }

    if (model_given) {
        if (kind == "hard_core") spec.model = ModelSpec::hard_core(r0);
        else if (kind == "soft_core") spec.model = ModelSpec::soft_core(c1, r1);
        else if (kind == "well") spec.model = ModelSpec::well(r0, r1, c1, c2, rcut);
        else if (kind == "lennard_jones") spec.model = ModelSpec::lennard_jones(c1, c2, rcut);
        else if (kind == "widom_rowlinson") spec.model = ModelSpec::widom_rowlinson(q, r);
        else if (kind == "random_radii") spec.model = ModelSpec::random_radii(rmax);
        else if (kind == "hard_rods") spec.model = ModelSpec::hard_rods(r);
        else require(false, "unknown model '" + kind + "'");
    }
    return spec;
}

ExperimentSpec parse_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("harness: cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_text(buf.str());
}

std::string spec_to_text(const ExperimentSpec& spec) {
    std::string out;
    for (const auto& [k, v] : canonical_pairs(spec)) out += k + " = " + v + "\n";
    return out;
}

std::vector<std::string> recipe_names() {
    return {"poisson-sanity", "hard-disks", "widom-rowlinson", "lennard-jones-well", "hard-rods"};
}

ExperimentSpec recipe(const std::string& name) {
    ExperimentSpec s;
    s.name = name;
    s.dopt.gamma = 2.0 / 3.0;
    s.mc.burn_in = 20000;
    s.mc.thin = 200;
    s.mc.step = 0.3;
    s.seed = 2026;
    s.out_dir = "out";
    s.beta = 1.0;
    s.xi = 0.5;
    if (name == "poisson-sanity") {
        s.model = ModelSpec::soft_core(0.0, 0.5);  // zero step height: free gas
        s.n = 16.0;
        s.z = 0.5;
        s.c = 0.05;
        s.delta = 0.1;
        s.samples = 200;
    } else if (name == "hard-disks") {
        s.model = ModelSpec::hard_core(0.5);
        s.n = 32.0;
        s.z = 0.5;
        s.c = 0.05;
        s.delta = 0.1;
        s.samples = 200;
    } else if (name == "widom-rowlinson") {
        s.model = ModelSpec::widom_rowlinson(2, 0.5);
        s.n = 16.0;
        s.z = 0.4;
        s.c = 0.05;
        s.delta = 0.1;
        s.samples = 150;
    } else if (name == "lennard-jones-well") {
        s.model = ModelSpec::well(0.5, 1.0, 0.3, 0.4, 3.0);
        s.n = 16.0;
        s.z = 0.3;
        s.c = 0.05;
        s.delta = 0.1;
        s.samples = 150;
    } else if (name == "hard-rods") {
        s.model = ModelSpec::hard_rods(0.5);
        s.n = 16.0;
        s.z = 0.3;
        s.c = 0.05;
        s.delta = 0.1;
        s.samples = 150;
    } else {
        require(false, "unknown recipe '" + name + "'");
    }
    s.echo = canonical_pairs(s);
    return s;
}

// ---- sampling --------------------------------------------------------------

std::vector<Particle> make_boundary(const ExperimentSpec& spec, const PotentialModel& model,
                                    Rng& rng) {
    double total = spec.n + spec.effective_pad(model);
    const int id0 = 10000000;
    switch (spec.boundary) {
        case BoundarySource::Empty: return {};
        case BoundarySource::Lattice: {
            double s = spec.lattice_spacing > 0.0
                           ? spec.lattice_spacing
                           : (model.interaction_range > 0.0 ? model.interaction_range : 1.0);
            double outer = total + 2.0 * s;
            double row_h = s * std::sqrt(3.0) / 2.0;
            int jmax = int(std::ceil(outer / row_h)) + 1;
            int imax = int(std::ceil(outer / s)) + 1;
            std::vector<Particle> out;
            int id = id0;
            for (int j = -jmax; j <= jmax; ++j) {
                double off = (j & 1) ? 0.5 * s : 0.0;
                for (int i = -imax; i <= imax; ++i) {
                    Vec2 x(i * s + off, j * row_h);
                    double sn = sup_norm(x);
                    if (sn <= total || sn > outer) continue;
                    Particle p;
                    p.id = id++;
                    p.x = x;
                    p.spin = sample_spin(model.spin_law, rng);
                    out.push_back(p);
                }
            }
            return out;
        }
        case BoundarySource::File: {
            auto cfgs = read_configs_jsonl(spec.boundary_file);
            require(!cfgs.empty(), "boundary_file holds no configurations: " + spec.boundary_file);
            std::vector<Particle> out;
            int id = id0;
            for (const Particle* p : cfgs[0].all()) {
                require(sup_norm(p->x) > total,
                        "boundary_file particle inside the sampling window (|x| <= " +
                            fmt(total) + ")");
                Particle q = *p;
                q.id = id++;
                out.push_back(q);
            }
            return out;
        }
    }
    return {};
}

std::vector<MarkedConfiguration> sample_experiment_configs(const ExperimentSpec& spec,
                                                           const PotentialModel& model,
                                                           size_t count, uint64_t seed) {
    spec.validate();
    Rng root(seed);
    Rng brng = root.split(101);
    std::vector<Particle> boundary = make_boundary(spec, model, brng);
    double total = spec.n + spec.effective_pad(model);
    GibbsParams gp;
    gp.z = spec.z;
    gp.beta = spec.beta;

    std::vector<MarkedConfiguration> raw;
    if (spec.exact_sampler) {
        Rng srng = root.split(202);
        raw = exact_sample_small(model, gp, total, boundary, spec.k_max, count, srng,
                                 spec.grid_budget);
    } else if (spec.workers <= 1) {
        Rng crng = root.split(303);
        raw = sample_gibbs(model, gp, total, boundary, spec.mc, count, crng);
    } else {
        // replicas fan out across workers; assembly is an ordered reduce, so
        // the result is identical however the threads are scheduled
        size_t w_count = size_t(spec.workers);
        size_t per = (count + w_count - 1) / w_count;
        std::vector<std::vector<MarkedConfiguration>> parts(w_count);
        std::vector<std::thread> threads;
        for (size_t w = 0; w < w_count; ++w) {
            size_t start = w * per;
            if (start >= count) break;
            size_t take = std::min(per, count - start);
            threads.emplace_back([&, w, take] {
                Rng crng = root.split(303 + w);
                parts[w] = sample_gibbs(model, gp, total, boundary, spec.mc, take, crng);
            });
        }
        for (auto& t : threads) t.join();
        for (auto& part : parts)
            for (auto& c : part) raw.push_back(std::move(c));
    }

    std::vector<MarkedConfiguration> out;
    out.reserve(raw.size());
    for (const auto& c : raw) out.push_back(restrict_window(c, spec.n));
    return out;
}

// ---- reports ---------------------------------------------------------------

json ExperimentReport::to_json() const {
    json j;
    j["name"] = name;
    j["seed"] = seed;
    j["samples"] = samples;
    j["pass"] = pass;
    j["central_shift"] = central_shift;
    j["spec"] = spec_echo;
    j["checks"] = json::array();
    for (const auto& c : checks) {
        json cj;
        cj["name"] = c.name;
        cj["kind"] = c.kind;
        cj["pass"] = c.pass;
        cj["observed"] = c.observed;
        cj["bound"] = c.bound;
        cj["std_error"] = c.std_error;
        if (!c.note.empty()) cj["note"] = c.note;
        j["checks"].push_back(cj);
    }
    if (!density.empty()) {
        j["density"] = json::array();
        for (const auto& r : density) {
            json rj;
            rj["functional"] = r.functional;
            rj["lhs"] = r.lhs;
            rj["lhs_se"] = r.lhs_se;
            rj["rhs"] = r.rhs;
            rj["rhs_se"] = r.rhs_se;
            rj["diff"] = r.diff;
            rj["combined_se"] = r.combined_se;
            rj["pass"] = r.pass;
            j["density"].push_back(rj);
        }
    }
    if (good_fraction >= 0.0) j["good_fraction"] = good_fraction;
    if (mean_beta_s1 >= 0.0) {
        j["mean_beta_s1"] = mean_beta_s1;
        j["se_beta_s1"] = se_beta_s1;
    }
    if (mean_s2 >= 0.0) {
        j["mean_s2"] = mean_s2;
        j["se_s2"] = se_s2;
    }
    if (!replay_artifact.empty()) j["replay_artifact"] = replay_artifact;
    j["wall_clock_ms"] = wall_clock_ms;
    return j;
}

std::string ExperimentReport::to_string() const { return to_json().dump(2); }

// ---- hard checks and the property suite ------------------------------------

std::vector<std::string> hard_check_names(bool strict) {
    std::vector<std::string> names = {"boundary-fixed", "monotone-clusters", "rigid-pairs",
                                      "lipschitz", "round-trip"};
    if (strict) names.push_back("good-shift-central");
    return names;
}

std::optional<std::string> run_hard_check(const std::string& check,
                                          const MarkedConfiguration& cfg,
                                          const TransformParams& p,
                                          const SmoothDecomposition& d) {
    TransformResult res = build_transform(cfg, p, d);
    return dispatch_check(check, cfg, p, d, res);
}

ExperimentReport run_property_suite(const ExperimentSpec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentContext ctx = make_context(spec);

    ExperimentReport rep;
    rep.name = spec.name;
    rep.seed = spec.seed;
    rep.samples = spec.samples;
    rep.spec_echo = echo_json(spec);
    rep.central_shift = plateau_of(ctx.p);

    auto configs = sample_experiment_configs(spec, ctx.model, spec.samples, spec.seed);
    Rng erng = Rng(spec.seed).split(404);
    for (auto& cfg : configs) cfg.edges = sample_edges(ctx.d, spec.beta, cfg, erng);

    const auto names = hard_check_names(spec.strict);
    std::map<std::string, CheckResult> hard;
    for (const auto& nm : names) {
        CheckResult c;
        c.name = nm;
        c.kind = "hard";
        hard[nm] = c;
    }

    size_t processed = 0;
    size_t good_count = 0;
    size_t central_attained = 0;
    std::vector<double> phis;
    bool aborted = false;
    for (const auto& cfg : configs) {
        TransformResult res = build_transform(cfg, ctx.p, ctx.d);
        for (const auto& nm : names) {
            std::optional<std::string> bad = dispatch_check(nm, cfg, ctx.p, ctx.d, res);
            if (bad) {
                rep.replay_artifact = write_replay_artifact(spec, cfg, nm, *bad);
                auto& row = hard[nm];
                row.pass = false;
                row.observed = 1.0;
                row.note = *bad + " (sweep aborted after " + std::to_string(processed + 1) +
                           " configurations; artifact written)";
                aborted = true;
                break;
            }
        }
        if (aborted) break;
        ++processed;

        GoodnessVerdict verdict = is_good(cfg, ctx.p, ctx.d);
        if (verdict.good) {
            ++good_count;
            if (!check_good_central(cfg, ctx.p, ctx.d, res, &verdict)) ++central_attained;
        }
        phis.push_back(jacobian_density(cfg, res, ctx.p, ctx.d, spec.beta).phi);
    }

    for (const auto& nm : names) rep.checks.push_back(hard[nm]);

    double gf = processed ? double(good_count) / double(processed) : 0.0;
    rep.good_fraction = gf;
    if (!spec.strict) {
        CheckResult c;
        c.name = "good-shift-central";
        c.kind = "informative";
        c.observed = good_count ? 1.0 - double(central_attained) / double(good_count) : 0.0;
        c.bound = 0.0;
        c.pass = c.observed == 0.0;
        c.note = "fraction of good configurations missing the full central shift";
        rep.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "good-fraction";
        c.kind = "informative";
        c.observed = gf;
        c.bound = 1.0 - spec.delta;
        c.std_error = processed ? std::sqrt(std::max(gf * (1.0 - gf), 0.0) / double(processed))
                                : 0.0;
        c.pass = gf + 3.0 * c.std_error >= c.bound;
        rep.checks.push_back(c);
    }
    {
        MeanSe m = mean_se(phis);
        CheckResult c;
        c.name = "phi-mean";
        c.kind = "informative";
        c.observed = m.mean;
        c.bound = 1.0;
        c.std_error = m.se;
        c.pass = std::abs(m.mean - 1.0) <= 3.0 * m.se;
        c.note = "chain snapshots may be correlated; the density check is the gating test";
        rep.checks.push_back(c);
    }

    rep.pass = true;
    for (const auto& c : rep.checks)
        if (c.kind != "informative" && !c.pass) rep.pass = false;
    rep.wall_clock_ms = elapsed_ms(t0);
    return rep;
}

// ---- density identity ------------------------------------------------------

std::vector<Functional> bundled_functionals(const ExperimentSpec& spec) {
    double half = std::min(1.0, spec.n / 4.0);
    std::vector<Functional> fs;
    fs.push_back({"const-one", [](const MarkedConfiguration&) { return 1.0; }});
    fs.push_back({"left-half-count", [](const MarkedConfiguration& cfg) {
                      double k = 0.0;
                      for (const Particle& p : cfg.interior)
                          if (p.x[0] <= 0.0) k += 1.0;
                      return k;
                  }});
    fs.push_back({"edge-count", [](const MarkedConfiguration& cfg) {
                      return double(cfg.edges.pairs().size());
                  }});
    fs.push_back({"cell-occupancy-1", [half](const MarkedConfiguration& cfg) {
                      int k = 0;
                      for (const Particle& p : cfg.interior)
                          if (std::abs(p.x[0]) <= half && std::abs(p.x[1]) <= half) ++k;
                      return k == 1 ? 1.0 : 0.0;
                  }});
    return fs;
}

ExperimentReport run_density_check(const ExperimentSpec& spec,
                                   const std::vector<Functional>& functionals) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentContext ctx = make_context(spec);
    require(!functionals.empty(), "density check needs at least one functional");

    ExperimentReport rep;
    rep.name = spec.name;
    rep.seed = spec.seed;
    rep.samples = spec.samples;
    rep.spec_echo = echo_json(spec);
    rep.central_shift = plateau_of(ctx.p);

    auto configs = sample_experiment_configs(spec, ctx.model, spec.samples, spec.seed);
    Rng erng = Rng(spec.seed).split(404);

    std::vector<std::vector<double>> lhs(functionals.size()), rhs(functionals.size());
    for (auto& cfg : configs) {
        cfg.edges = sample_edges(ctx.d, spec.beta, cfg, erng);
        TransformResult res = build_transform(cfg, ctx.p, ctx.d);
        double phi = jacobian_density(cfg, res, ctx.p, ctx.d, spec.beta).phi;
        MarkedConfiguration img = apply_transform(cfg, res);
        for (size_t k = 0; k < functionals.size(); ++k) {
            lhs[k].push_back(phi * functionals[k].f(img));
            rhs[k].push_back(functionals[k].f(cfg));
        }
    }

    rep.pass = true;
    for (size_t k = 0; k < functionals.size(); ++k) {
        MeanSe l = mean_se(lhs[k]);
        MeanSe r = mean_se(rhs[k]);
        DensityRow row;
        row.functional = functionals[k].name;
        row.lhs = l.mean;
        row.lhs_se = l.se;
        row.rhs = r.mean;
        row.rhs_se = r.se;
        row.diff = l.mean - r.mean;
        row.combined_se = std::hypot(l.se, r.se);
        row.pass = std::abs(row.diff) <= 3.0 * row.combined_se;
        rep.density.push_back(row);
        if (!row.pass) rep.pass = false;
    }
    rep.wall_clock_ms = elapsed_ms(t0);
    return rep;
}

// ---- diagnostics -----------------------------------------------------------

ExperimentReport run_diagnostics_experiment(const ExperimentSpec& spec) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentContext ctx = make_context(spec);

    ExperimentReport rep;
    rep.name = spec.name;
    rep.seed = spec.seed;
    rep.samples = spec.samples;
    rep.spec_echo = echo_json(spec);
    rep.central_shift = plateau_of(ctx.p);

    auto configs = sample_experiment_configs(spec, ctx.model, spec.samples, spec.seed);
    Rng erng = Rng(spec.seed).split(404);

    std::vector<double> beta_s1, s2;
    size_t zero_violations = 0;
    for (auto& cfg : configs) {
        cfg.edges = sample_edges(ctx.d, spec.beta, cfg, erng);
        ShiftDiagnostics diag = diagnostics(cfg, ctx.p, ctx.d);
        beta_s1.push_back(spec.beta * diag.s1);
        s2.push_back(diag.s2);
        if (spec.c == 0.0 && (diag.s1 != 0.0 || diag.s2 != 0.0)) ++zero_violations;
    }

    MeanSe m1 = mean_se(beta_s1);
    MeanSe m2 = mean_se(s2);
    rep.mean_beta_s1 = m1.mean;
    rep.se_beta_s1 = m1.se;
    rep.mean_s2 = m2.mean;
    rep.se_s2 = m2.se;

    {
        CheckResult c;
        c.name = "mean-beta-s1";
        c.kind = "informative";
        c.observed = m1.mean;
        c.bound = spec.delta;
        c.std_error = m1.se;
        c.pass = m1.mean <= spec.delta;
        rep.checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "mean-s2";
        c.kind = "informative";
        c.observed = m2.mean;
        c.bound = spec.delta;
        c.std_error = m2.se;
        c.pass = m2.mean <= spec.delta;
        rep.checks.push_back(c);
    }
    if (spec.c == 0.0) {
        CheckResult c;
        c.name = "zero-amplitude-identity";
        c.kind = "hard";
        c.observed = double(zero_violations);
        c.bound = 0.0;
        c.pass = zero_violations == 0;
        rep.checks.push_back(c);
    }

    rep.pass = true;
    for (const auto& c : rep.checks)
        if (c.kind != "informative" && !c.pass) rep.pass = false;
    rep.wall_clock_ms = elapsed_ms(t0);
    return rep;
}

// ---- displacement table ----------------------------------------------------

std::vector<DisplacementRow> run_displacement_experiment(const ExperimentSpec& spec,
                                                         const std::vector<double>& n_values) {
    require(!n_values.empty(), "displacement experiment needs at least one window size");
    for (size_t i = 1; i < n_values.size(); ++i)
        require(n_values[i] > n_values[i - 1], "window sizes must be strictly increasing");

    std::vector<DisplacementRow> rows;
    for (double n : n_values) {
        ExperimentSpec s = spec;
        s.n = n;
        ExperimentContext ctx = make_context(s);

        auto configs = sample_experiment_configs(s, ctx.model, s.samples, s.seed);
        Rng erng = Rng(s.seed).split(404);

        DisplacementRow row;
        row.n = n;
        row.log_n = std::log(n);
        row.central_shift = plateau_of(ctx.p);
        row.central_shift_sq = row.central_shift * row.central_shift;
        row.samples = configs.size();

        size_t good_count = 0;
        double acc = 0.0;
        size_t acc_n = 0;
        double central = std::sqrt(n);
        for (auto& cfg : configs) {
            cfg.edges = sample_edges(ctx.d, s.beta, cfg, erng);
            TransformResult res = build_transform(cfg, ctx.p, ctx.d);
            if (is_good(cfg, ctx.p, ctx.d).good) ++good_count;
            for (const Particle& q : cfg.interior) {
                if (sup_norm(q.x) > central) continue;
                acc += std::abs(res.shift(q.id));
                ++acc_n;
            }
        }
        row.good_fraction = configs.empty() ? 0.0 : double(good_count) / double(configs.size());
        row.mean_abs_shift_central = acc_n ? acc / double(acc_n) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

std::string displacement_csv(const std::vector<DisplacementRow>& rows) {
    std::string out =
        "n,log_n,central_shift,central_shift_sq,good_fraction,mean_abs_shift_central,samples\n";
    for (const auto& r : rows) {
        out += fmt(r.n) + "," + fmt(r.log_n) + "," + fmt(r.central_shift) + "," +
               fmt(r.central_shift_sq) + "," + fmt(r.good_fraction) + "," +
               fmt(r.mean_abs_shift_central) + "," + std::to_string(r.samples) + "\n";
    }
    return out;
}

// ---- replay artifacts ------------------------------------------------------

std::string write_replay_artifact(const ExperimentSpec& spec, const MarkedConfiguration& cfg,
                                  const std::string& check, const std::string& detail) {
    std::string dir = spec.out_dir.empty() ? "." : spec.out_dir;
    std::filesystem::create_directories(dir);
    std::string path =
        (std::filesystem::path(dir) / (spec.name + ".replay." + check + ".json")).string();
    json j;
    j["check"] = check;
    j["detail"] = detail;
    j["spec_text"] = spec_to_text(spec);
    j["config"] = config_to_json(cfg);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("harness: cannot write replay artifact: " + path);
    out << j.dump(2) << "\n";
    return path;
}

ReplayOutcome replay_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("harness: cannot open replay artifact: " + path);
    json j = json::parse(in);
    ExperimentSpec spec = parse_experiment_text(j.at("spec_text").get<std::string>());
    MarkedConfiguration cfg = config_from_json(j.at("config"));
    ExperimentContext ctx = make_context(spec);

    ReplayOutcome out;
    out.check = j.at("check").get<std::string>();
    std::optional<std::string> bad = run_hard_check(out.check, cfg, ctx.p, ctx.d);
    out.reproduced = bad.has_value();
    out.detail = bad.value_or("");
    return out;
}

}  // namespace gshift
