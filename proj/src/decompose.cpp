#include "gshift/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "gshift/quad.hpp"

namespace gshift {

namespace {

const double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("smooth_decompose: " + msg);
}

// Positive root of  pi e^2 + 2 pi r0 e = budget  (annulus area around a disc).
double annulus_gap(double r0, double budget) {
    return -r0 + std::sqrt(r0 * r0 + budget / kPi);
}

// --- compactly supported bump of half-width delta, unit mass ----------------
struct Bump {
    double delta = 0.0;
    double inv_norm = 0.0;

    static double shape(double t) {
        double w = 1.0 - t * t;
        return w > 0.0 ? std::exp(-1.0 / w) : 0.0;
    }
    // shape' = shape * g with g = -2t/(1-t^2)^2; shape'' = shape * (g^2 + g').
    static double shape_d1(double t) {
        double w = 1.0 - t * t;
        if (!(w > 0.0)) return 0.0;
        return shape(t) * (-2.0 * t / (w * w));
    }
    static double shape_d2(double t) {
        double w = 1.0 - t * t;
        if (!(w > 0.0)) return 0.0;
        double g = -2.0 * t / (w * w);
        double gp = -2.0 / (w * w) - 8.0 * t * t / (w * w * w);
        return shape(t) * (g * g + gp);
    }
    explicit Bump(double d) : delta(d) {
        double mass = integrate([](double t) { return shape(t); }, -1.0, 1.0, 1e-15);
        inv_norm = 1.0 / (mass * d);
    }
    double operator()(double s) const {
        if (std::abs(s) >= delta) return 0.0;
        return shape(s / delta) * inv_norm;
    }
    double d1(double s) const {
        if (std::abs(s) >= delta) return 0.0;
        return shape_d1(s / delta) * inv_norm / delta;
    }
    double d2(double s) const {
        if (std::abs(s) >= delta) return 0.0;
        return shape_d2(s / delta) * inv_norm / (delta * delta);
    }
    // CDF: exactly 0 below -delta and exactly 1 above +delta.
    double cdf(double x) const {
        if (x <= -delta) return 0.0;
        if (x >= delta) return 1.0;
        double v = integrate([this](double s) { return (*this)(s); }, -delta, x, 1e-14);
        return std::clamp(v, 0.0, 1.0);
    }
};

// --- smoothed radial profile, evaluated on demand ----------------------------
// Convolution of a piecewise majorant vhat with the bump, glued back onto the
// exact profile across [R, R + 2 dm]. Derivatives fall on the bump weights.
struct SmoothProfile {
    RadialProfile prof;
    Bump bump;
    double M = 0.0, L = 0.0, dm = 0.0, R = 0.0;
    double inner_limit = 0.0, cw = 0.0, u_range = 0.0;
    std::vector<double> centers;
    std::vector<double> breaks;  // discontinuities of vhat

    bool in_M(double t) const {
        if (t <= inner_limit || t >= R) return true;
        for (double p : centers)
            if (std::abs(t - p) <= cw) return true;
        return false;
    }
    double vhat(double t) const {
        if (in_M(t)) return M;
        return prof.V(t, Spin::unit(), Spin::unit()) + dm * L;
    }
    // integral of w_k(s) * vhat(r - s), w_0 = bump, w_1 = bump', w_2 = bump''
    double conv(double r, int k) const {
        std::vector<double> sbreaks;
        for (double b : breaks) {
            double s = r - b;
            if (s > -dm && s < dm) sbreaks.push_back(s);
        }
        double scale = std::max({M, std::abs(vhat(r - dm)), std::abs(vhat(r + dm)), 1.0}) /
                       std::pow(dm, k);
        auto w = [this, k](double s) {
            return k == 0 ? bump(s) : (k == 1 ? bump.d1(s) : bump.d2(s));
        };
        return integrate([&](double s) { return w(s) * vhat(r - s); }, -dm, dm, 1e-12 * scale,
                         sbreaks);
    }
    // blended value and its first/second radial derivatives
    double value(double r) const {
        if (r >= u_range) return 0.0;
        double x = r - R - dm;
        if (x <= -dm) return conv(r, 0);
        return conv(r, 0) * (1.0 - bump.cdf(x));
    }
    double d1(double r) const {
        if (r >= u_range) return 0.0;
        double x = r - R - dm;
        if (x <= -dm) return conv(r, 1);
        double F = bump.cdf(x);
        return conv(r, 1) * (1.0 - F) - conv(r, 0) * bump(x);
    }
    double d2(double r) const {
        if (r >= u_range) return 0.0;
        double x = r - R - dm;
        if (x <= -dm) return conv(r, 2);
        double F = bump.cdf(x);
        return conv(r, 2) * (1.0 - F) - 2.0 * conv(r, 1) * bump(x) - conv(r, 0) * bump.d1(x);
    }
};

// sup |V| and sup |dV| over the smooth pieces of a radial profile restricted
// to [lo_limit, R]; pieces are delimited by the profile's jump radii.
struct PieceSup {
    double M = 0.0;
    double L = 0.0;
};
PieceSup scan_pieces(const RadialProfile& prof, double lo_limit) {
    PieceSup out;
    Spin s = Spin::unit();
    std::vector<double> pts{lo_limit};
    for (double j : prof.jumps)
        if (j > lo_limit) pts.push_back(j);
    if (pts.back() < prof.R) pts.push_back(prof.R);
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        double a = pts[k], b = pts[k + 1];
        double w = b - a;
        if (!(w > 0)) continue;
        double a_in = a + 1e-9 * w, b_in = b - 1e-9 * w;
        for (int i = 0; i <= 2000; ++i) {
            double r = a_in + (b_in - a_in) * i / 2000.0;
            double val = prof.V(r, s, s);
            if (std::isfinite(val)) out.M = std::max(out.M, std::abs(val));
            out.L = std::max(out.L, std::abs(prof.dV(r, s, s)));
        }
    }
    return out;
}

void run_checks(SmoothDecomposition& d, const ModelKind kind, bool require_feasible) {
    d.feasible = true;
    std::string bad;
    for (const auto& c : d.checks)
        if (!c.ok()) {
            d.feasible = false;
            if (bad.empty()) {
                std::ostringstream os;
                os << "smooth_decompose: bound '" << c.name << "' = " << c.value
                   << " exceeds budget gamma = " << c.budget << " for " << model_kind_name(kind);
                bad = os.str();
            }
        }
    if (!d.feasible && require_feasible) throw std::runtime_error(bad);
}

std::function<double(const Particle&, const Particle&)> zero_pair() {
    return [](const Particle&, const Particle&) { return 0.0; };
}

// Shared wiring for models whose contact body is a disc of per-spin-pair
// radius hard_radius + eps0.
void wire_radial_core(SmoothDecomposition& d) {
    auto hard = d.hard_radius;
    double e0 = d.eps0;
    d.rho_core = [hard, e0](const Spin& a, const Spin& b) { return hard(a, b) + e0; };
    auto rho = d.rho_core;
    d.d_core = [rho](const Particle& a, const Particle& b) {
        return std::max(0.0, (a.x - b.x).norm() - rho(a.spin, b.spin));
    };
    d.in_core = [rho](const Particle& a, const Particle& b) {
        return (a.x - b.x).norm() <= rho(a.spin, b.spin);
    };
}

SmoothDecomposition trivial_decompose(const PotentialModel& model, const DecomposeOptions& opts) {
    SmoothDecomposition d;
    d.kind = model.kind;
    d.spin_law = model.spin_law;
    d.trivial = true;
    d.gamma = opts.gamma;
    d.u_bar = zero_pair();
    d.u_small = zero_pair();
    d.psi = zero_pair();
    d.u_radial = [](double) { return 0.0; };
    d.ubar_radial = [](double) { return 0.0; };

    if (model.kind == ModelKind::HardRods) {
        require(!opts.eps0 || *opts.eps0 == 0.0, "segment cores take eps0 = 0");
        double h = model.rod_half_length;
        d.radial_core = false;
        d.rod_half_length = h;
        d.eps0 = 0.0;
        // Halo width from the exact outer-shell area: 8h*e + pi e^2 <= gamma/2.
        double per = 8.0 * h;
        double target = 0.5 * opts.gamma;
        double es = (-per + std::sqrt(per * per + 4.0 * kPi * target)) / (2.0 * kPi);
        d.eps = opts.eps ? *opts.eps : std::min(0.9 * es, 0.99);
        require(d.eps > 0, "halo width must be positive");
        d.core_range = 2.0 * h;
        d.hard_radius = [h](const Spin&, const Spin&) { return 2.0 * h; };
        d.rho_core = d.hard_radius;
        d.d_core = [h](const Particle& a, const Particle& b) {
            if ((a.x - b.x).norm() <= 2.0 * h &&
                segments_intersect(a.x, a.spin.value, b.x, b.spin.value, h))
                return 0.0;
            return segment_distance(a.x, a.spin.value, b.x, b.spin.value, h);
        };
        d.in_core = [h](const Particle& a, const Particle& b) {
            if ((a.x - b.x).norm() > 2.0 * h) return false;
            return segments_intersect(a.x, a.spin.value, b.x, b.spin.value, h);
        };
        d.checks.push_back({"area(K \\ K^U)", 0.0, opts.gamma});
    } else {
        const RadialProfile& prof = *model.radial;
        double r0max = prof.core_radius_max;
        d.radial_core = true;
        double e0s = annulus_gap(r0max, opts.gamma);
        d.eps0 = opts.eps0 ? *opts.eps0 : std::min(0.9 * e0s, 0.99);
        require(d.eps0 >= 0, "eps0 must be >= 0");
        d.eps = opts.eps ? *opts.eps : std::min(std::max(d.eps0, 1e-3), 0.99);
        require(d.eps > 0, "halo width must be positive");
        d.core_range = r0max + d.eps0;
        d.hard_radius = prof.core_radius;
        wire_radial_core(d);
        double area = kPi * ((r0max + d.eps0) * (r0max + d.eps0) - r0max * r0max);
        d.checks.push_back({"area(K \\ K^U)", area, opts.gamma});
    }
    d.halo_range = d.core_range + d.eps;
    return d;
}

SmoothDecomposition mollified_decompose(const PotentialModel& model, const DecomposeOptions& opts) {
    const RadialProfile& prof = *model.radial;
    const Spin us = Spin::unit();
    require(model.spin_law.kind == SpinKind::Unit, "mollified profiles need unit spins");
    require(!prof.jumps.empty(), "mollified profiles need at least one jump");

    SmoothDecomposition d;
    d.kind = model.kind;
    d.spin_law = model.spin_law;
    d.trivial = false;
    d.radial_core = true;
    d.gamma = opts.gamma;

    const double r0 = prof.core_radius_max;
    const double R = prof.R;
    const double gamma = opts.gamma;
    const double first_jump = prof.jumps.front();

    // Core enlargement: half the area budget, kept clear of the first jump.
    double e0s = annulus_gap(r0, 0.5 * gamma);
    d.eps0 = opts.eps0 ? *opts.eps0 : std::min({0.9 * e0s, 0.45 * (first_jump - r0), 0.99});
    require(d.eps0 >= 0, "eps0 must be >= 0");
    const double rho = r0 + d.eps0;
    require(rho < first_jump, "enlarged core must stay below the first jump");

    // Collar centers: the hard-core radius plus every jump of the profile.
    std::vector<double> centers{r0};
    for (double j : prof.jumps) centers.push_back(j);

    // Halo width: estimate the collar + seam mass against half the budget,
    // assuming the bump half-width stays below 0.45 * eps.
    double min_gap = 1e300;
    for (size_t i = 0; i + 1 < centers.size(); ++i)
        min_gap = std::min(min_gap, centers[i + 1] - centers[i]);
    auto collar_mass = [&](double e) {
        double cw = 1.45 * e;
        double s = 0.0;
        for (double p : centers) s += 2.0 * kPi * (p + cw) * 2.0 * cw;
        s += 2.0 * kPi * (R + 0.9 * e) * 0.9 * e;  // blend band past R
        return s;
    };
    double elo = 0.0, ehi = std::min({0.3 * min_gap, 0.6 * std::max(d.eps0, 1e-3), 0.99});
    require(ehi > 0, "profile structure leaves no room for a halo");
    if (collar_mass(ehi) <= 0.5 * gamma) {
        elo = ehi;
    } else {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (elo + ehi);
            (collar_mass(mid) <= 0.5 * gamma ? elo : ehi) = mid;
        }
    }
    d.eps = opts.eps ? *opts.eps : 0.9 * elo;
    require(d.eps > 0, "halo width must be positive");

    double dm = std::min(opts.mollifier_width, 0.45 * d.eps);
    require(dm >= 1e-5, "mollifier width below resolution floor 1e-5");
    d.mollifier_width = dm;
    const double cw = d.eps + dm;  // collar half-width

    d.core_range = rho;
    d.halo_range = rho + d.eps;
    d.u_range = R + 2.0 * dm;
    d.ubar_range = d.u_range;
    d.psi_range = 2.0 * d.u_range;
    d.hard_radius = prof.core_radius;
    wire_radial_core(d);

    // Piecewise majorant of the profile: the constant M on the collars, below
    // inner_limit, and beyond R; V + dm * L on the smooth pieces in between.
    const double inner_limit = std::max(r0, rho - 0.02 - 3.0 * dm);
    PieceSup sup = scan_pieces(prof, inner_limit);

    auto sp = std::make_shared<SmoothProfile>(SmoothProfile{
        prof, Bump(dm), std::max(0.0, sup.M), 1.02 * sup.L, dm, R, inner_limit, cw, d.u_range,
        centers, {}});
    sp->breaks.push_back(inner_limit);
    for (double p : centers) {
        sp->breaks.push_back(p - cw);
        sp->breaks.push_back(p + cw);
    }
    std::sort(sp->breaks.begin(), sp->breaks.end());

    const double u_range = d.u_range;
    auto profV = prof.V;
    d.ubar_radial = [sp](double r) { return sp->value(r); };
    d.u_radial = [sp, u_range, rho, profV, us](double r) {
        if (r >= u_range || r <= rho) return 0.0;
        return std::max(0.0, sp->value(r) - profV(r, us, us));
    };
    auto ubar_r = d.ubar_radial;
    auto u_r = d.u_radial;
    d.u_bar = [ubar_r](const Particle& a, const Particle& b) {
        return ubar_r((a.x - b.x).norm());
    };
    d.u_small = [u_r](const Particle& a, const Particle& b) {
        return u_r((a.x - b.x).norm());
    };

    // Envelope for |d^2 Ubar|: calibrate (|f''| + 2|f'|/r) r^alpha over a scan
    // that is dense near every kink of the majorant and near the glue seam,
    // coarse elsewhere; then psi = 1.05 * 2^alpha * max / r^alpha.
    d.psi_alpha = model.kind == ModelKind::LennardJones ? 8.0 : 5.0;
    {
        std::vector<double> scan;
        double coarse = std::max(dm, (d.u_range - rho) / 1200.0);
        for (double r = rho + 1e-9; r < d.u_range; r += coarse) scan.push_back(r);
        std::vector<double> feats = sp->breaks;
        feats.insert(feats.end(), {rho, R, R + dm, R + 2.0 * dm});
        for (double b : feats)
            for (double r = b - 1.5 * dm; r <= b + 1.5 * dm; r += dm / 40.0)
                if (r > rho && r < d.u_range) scan.push_back(r);
        double c1p = 0.0;
        for (double r : scan) {
            double d1v = sp->d1(r), d2v = sp->d2(r);
            c1p = std::max(c1p,
                           (std::abs(d2v) + 2.0 * std::abs(d1v) / r) * std::pow(r, d.psi_alpha));
        }
        d.psi_coeff = c1p > 0.0 ? 1.05 * std::pow(2.0, d.psi_alpha) * c1p : 0.0;
    }
    {
        double coeff = d.psi_coeff, alpha = d.psi_alpha, prange = d.psi_range;
        d.psi = [coeff, alpha, rho, prange](const Particle& a, const Particle& b) {
            double r = (a.x - b.x).norm();
            if (r <= rho || r > prange) return 0.0;
            return coeff * std::pow(r, -alpha);
        };
    }

    // Kink radii of the smoothed function, used to split later quadratures.
    d.radial_breaks = {rho, R, R + dm, d.u_range};
    for (double b : sp->breaks) {
        d.radial_breaks.push_back(b - dm);
        d.radial_breaks.push_back(b + dm);
    }
    std::sort(d.radial_breaks.begin(), d.radial_breaks.end());

    // Feasibility: area of the core enlargement, and the integral of u ^ 1.
    double area = kPi * (rho * rho - r0 * r0);
    d.checks.push_back({"area(K \\ K^U)", area, gamma});
    double iu = 2.0 * kPi *
                integrate([&](double r) { return r * std::min(u_r(r), 1.0); }, rho, d.u_range,
                          1e-9, d.radial_breaks);
    d.checks.push_back({"int(u ^ 1)", iu, gamma});
    return d;
}

}  // namespace

std::vector<std::pair<Spin, double>> spin_grid(const SpinLaw& law, int resolution) {
    std::vector<std::pair<Spin, double>> g;
    switch (law.kind) {
        case SpinKind::Unit:
            g.emplace_back(Spin::unit(), 1.0);
            break;
        case SpinKind::Discrete:
            for (int i = 0; i < law.q; ++i) g.emplace_back(Spin::discrete(i), 1.0 / law.q);
            break;
        case SpinKind::Scalar:
            for (int i = 0; i < resolution; ++i)
                g.emplace_back(Spin::scalar(law.lo + (law.hi - law.lo) * (i + 0.5) / resolution),
                               1.0 / resolution);
            break;
        case SpinKind::Direction:
            for (int i = 0; i < resolution; ++i)
                g.emplace_back(Spin::direction(kPi * (i + 0.5) / resolution), 1.0 / resolution);
            break;
    }
    return g;
}

SmoothDecomposition smooth_decompose(const PotentialModel& model, const DecomposeOptions& opts) {
    require(opts.gamma > 0 && std::isfinite(opts.gamma), "gamma must be positive and finite");
    require(opts.mollifier_width > 0, "mollifier width must be positive");
    SmoothDecomposition d = model.pure_hard_core ? trivial_decompose(model, opts)
                                                 : mollified_decompose(model, opts);
    run_checks(d, model.kind, opts.require_feasible);
    return d;
}

DerivedConstants derive_constants(const SmoothDecomposition& d, double xi, double beta) {
    if (!(xi > 0) || !std::isfinite(xi))
        throw std::invalid_argument("derive_constants: xi must be positive and finite");
    if (!(beta > 0) || !std::isfinite(beta))
        throw std::invalid_argument("derive_constants: beta must be positive and finite");

    DerivedConstants c;
    c.xi = xi;
    c.beta = beta;
    c.gamma = 1.0 / (3.0 * xi * std::max(1.0, beta));
    c.c_contact = d.halo_range;

    // Tail integrals of beta*u ^ 1, plain and |x|^2-weighted (unit-spin only).
    double uw1 = 0.0, uw2 = 0.0;
    if (!d.trivial) {
        auto u_r = d.u_radial;
        double lo = d.core_range, hi = d.u_range;
        uw1 = 2.0 * kPi *
              integrate([&](double r) { return r * std::min(beta * u_r(r), 1.0); }, lo, hi, 1e-9,
                        d.radial_breaks);
        uw2 = 2.0 * kPi *
              integrate([&](double r) { return r * r * r * std::min(beta * u_r(r), 1.0); }, lo,
                        hi, 1e-9, d.radial_breaks);
    }

    if (d.radial_core) {
        auto grid = spin_grid(d.spin_law);
        double sup1 = 0.0, sup2 = 0.0;
        for (const auto& [sa, wa] : grid) {
            (void)wa;
            double avg1 = 0.0, avg2 = 0.0;
            for (const auto& [sb, wb] : grid) {
                double r0 = d.hard_radius(sa, sb);
                double out = d.rho_core(sa, sb) + d.eps;
                avg1 += wb * kPi * (out * out - r0 * r0);
                avg2 += wb * 0.5 * kPi * (out * out * out * out - r0 * r0 * r0 * r0);
            }
            sup1 = std::max(sup1, avg1 + uw1);
            sup2 = std::max(sup2, avg2 + uw2);
        }
        c.c_u = xi * sup1;
        c.c_u_sq = xi * sup2;
    } else {
        // Segment cores: exact outer-shell area; |x|^2 weight by 2D quadrature
        // averaged over the relative rod angle.
        double h = d.rod_half_length;
        double area = 8.0 * h * d.eps + kPi * d.eps * d.eps;
        c.c_u = xi * area;
        double W = 2.0 * h + d.eps;
        auto grid = spin_grid(d.spin_law, 12);
        double avg2 = 0.0;
        for (const auto& [sb, wb] : grid) {
            Particle a{0, Vec2::Zero(), Spin::direction(0.0)};
            Particle b{1, Vec2::Zero(), sb};
            auto f = [&](double x, double y) {
                b.x = Vec2(x, y);
                double dd = d.d_core(a, b);
                return (dd > 0.0 && dd < d.eps) ? x * x + y * y : 0.0;
            };
            avg2 += wb * integrate2d(f, -W, W, -W, W, 2.5e-4 * area * W * W);
        }
        c.c_u_sq = xi * avg2;
    }

    if (d.psi_coeff > 0.0) {
        double coeff = d.psi_coeff, alpha = d.psi_alpha;
        c.c_psi = xi * 2.0 * kPi *
                  integrate(
                      [&](double r) {
                          return r * coeff * std::pow(r, -alpha) * std::max(r * r, 1.0);
                      },
                      d.core_range, d.psi_range, 1e-10, {1.0});
    }

    if (!(c.c_u < 1.0)) {
        std::ostringstream os;
        os << "derive_constants: c_u = " << c.c_u << " >= 1 (xi = " << xi << ", beta = " << beta
           << "); interaction too strong for the expansion";
        throw std::invalid_argument(os.str());
    }
    return c;
}

}  // namespace gshift
