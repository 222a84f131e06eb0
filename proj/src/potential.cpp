#include "gshift/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace gshift {

std::string model_kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::HardCore: return "hard_core";
        case ModelKind::SoftCore: return "soft_core";
        case ModelKind::Well: return "well";
        case ModelKind::LennardJones: return "lennard_jones";
        case ModelKind::WidomRowlinson: return "widom_rowlinson";
        case ModelKind::RandomRadii: return "random_radii";
        case ModelKind::HardRods: return "hard_rods";
    }
    return "?";
}

ModelSpec ModelSpec::hard_core(double r0) {
    ModelSpec s;
    s.kind = ModelKind::HardCore;
    s.r0 = r0;
    return s;
}
ModelSpec ModelSpec::soft_core(double c1, double r1) {
    ModelSpec s;
    s.kind = ModelKind::SoftCore;
    s.c1 = c1;
    s.r1 = r1;
    return s;
}
ModelSpec ModelSpec::well(double r0, double r1, double c1, double c2, double rcut) {
    ModelSpec s;
    s.kind = ModelKind::Well;
    s.r0 = r0;
    s.r1 = r1;
    s.c1 = c1;
    s.c2 = c2;
    s.rcut = rcut > 0 ? rcut : 3.0 * r1;
    return s;
}
ModelSpec ModelSpec::lennard_jones(double c1, double c2, double rcut) {
    ModelSpec s;
    s.kind = ModelKind::LennardJones;
    s.c1 = c1;
    s.c2 = c2;
    if (rcut <= 0) {
        double sigma = c2 > 0 ? std::pow(c1 / c2, 1.0 / 6.0) : std::pow(c1, 1.0 / 12.0);
        rcut = 2.5 * sigma;
    }
    s.rcut = rcut;
    return s;
}
ModelSpec ModelSpec::widom_rowlinson(int q, double r) {
    ModelSpec s;
    s.kind = ModelKind::WidomRowlinson;
    s.q = q;
    s.r = r;
    return s;
}
ModelSpec ModelSpec::random_radii(double rmax) {
    ModelSpec s;
    s.kind = ModelKind::RandomRadii;
    s.rmax = rmax;
    return s;
}
ModelSpec ModelSpec::hard_rods(double r) {
    ModelSpec s;
    s.kind = ModelKind::HardRods;
    s.r = r;
    return s;
}

double segment_distance(const Vec2& a, double ta, const Vec2& b, double tb, double h) {
    // Closest-point parameters on two segments of half-length h; the usual
    // clamped quadratic minimization with a parallel-case fallback.
    const Vec2 da = unit_direction(ta), db = unit_direction(tb);
    const Vec2 p0 = a - h * da, q0 = b - h * db;
    const Vec2 u = 2.0 * h * da, v = 2.0 * h * db;
    const Vec2 w = p0 - q0;
    const double A = u.dot(u), B = u.dot(v), C = v.dot(v);
    const double D = u.dot(w), E = v.dot(w);
    const double den = A * C - B * B;
    double s, t;
    if (den > 1e-14 * A * C) {
        s = (B * E - C * D) / den;
        t = (A * E - B * D) / den;
    } else {
        s = 0.0;  // parallel: pick one end, optimize the other
        t = C > 0 ? E / C : 0.0;
    }
    auto clamp01 = [](double x) { return x < 0 ? 0.0 : (x > 1 ? 1.0 : x); };
    s = clamp01(s);
    t = clamp01(t);
    // refine once with each parameter clamped (handles corner solutions)
    t = C > 0 ? clamp01((E + B * s) / C) : 0.0;
    s = A > 0 ? clamp01((B * t - D) / A) : 0.0;
    double best = (w + s * u - t * v).norm();
    // endpoint sweeps make the corner cases exact
    for (double ss : {0.0, 1.0}) {
        double tt = C > 0 ? clamp01((E + B * ss) / C) : 0.0;
        best = std::min(best, (w + ss * u - tt * v).norm());
    }
    for (double tt : {0.0, 1.0}) {
        double ss = A > 0 ? clamp01((B * tt - D) / A) : 0.0;
        best = std::min(best, (w + ss * u - tt * v).norm());
    }
    return best;
}

bool segments_intersect(const Vec2& a, double ta, const Vec2& b, double tb, double h) {
    const Vec2 da = unit_direction(ta), db = unit_direction(tb);
    const Vec2 p1 = a - h * da, p2 = a + h * da;
    const Vec2 q1 = b - h * db, q2 = b + h * db;
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        double v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        return v > 0 ? 1 : (v < 0 ? -1 : 0);
    };
    auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        // r collinear with pq: is it inside the bounding box?
        return std::min(p[0], q[0]) <= r[0] && r[0] <= std::max(p[0], q[0]) &&
               std::min(p[1], q[1]) <= r[1] && r[1] <= std::max(p[1], q[1]);
    };
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("make_model: " + msg);
}

double pair_dist(const Particle& p, const Particle& q) { return (p.x - q.x).norm(); }

}  // namespace

PotentialModel make_model(const ModelSpec& spec) {
    PotentialModel m;
    m.kind = spec.kind;
    m.spec = spec;
    switch (spec.kind) {
        case ModelKind::HardCore: {
            require(spec.r0 > 0, "hard_core needs r0 > 0");
            const double r0 = spec.r0;
            m.spin_law = SpinLaw::unit();
            m.interaction_range = r0;
            m.pure_hard_core = true;
            m.in_hard_core = [r0](const Particle& a, const Particle& b) {
                return pair_dist(a, b) < r0;
            };
            m.evaluate = [r0](const Particle& a, const Particle& b) {
                return pair_dist(a, b) < r0 ? kInf : 0.0;
            };
            RadialProfile rp;
            rp.V = [r0](double r, const Spin&, const Spin&) { return r < r0 ? kInf : 0.0; };
            rp.dV = [](double, const Spin&, const Spin&) { return 0.0; };
            rp.core_radius = [r0](const Spin&, const Spin&) { return r0; };
            rp.core_radius_max = r0;
            rp.jumps = {};
            rp.R = r0;
            m.radial = rp;
            break;
        }
        case ModelKind::SoftCore: {
            require(spec.c1 >= 0, "soft_core needs c1 >= 0");
            require(spec.r1 > 0, "soft_core needs r1 > 0");
            const double c1 = spec.c1, r1 = spec.r1;
            m.spin_law = SpinLaw::unit();
            m.interaction_range = r1;
            m.pure_hard_core = false;
            m.in_hard_core = [](const Particle& a, const Particle& b) {
                return a.x == b.x;  // only coincident points are forbidden
            };
            m.evaluate = [c1, r1](const Particle& a, const Particle& b) {
                double r = pair_dist(a, b);
                if (r == 0.0) return kInf;
                return r < r1 ? c1 : 0.0;
            };
            RadialProfile rp;
            rp.V = [c1, r1](double r, const Spin&, const Spin&) {
                if (r == 0.0) return kInf;
                return r < r1 ? c1 : 0.0;
            };
            rp.dV = [](double, const Spin&, const Spin&) { return 0.0; };
            rp.core_radius = [](const Spin&, const Spin&) { return 0.0; };
            rp.core_radius_max = 0.0;
            rp.jumps = {r1};
            rp.R = r1;
            m.radial = rp;
            break;
        }
        case ModelKind::Well: {
            require(spec.r0 > 0, "well needs r0 > 0");
            require(spec.r1 > spec.r0, "well needs r1 > r0");
            require(spec.c1 >= 0 && spec.c2 >= 0, "well needs c1, c2 >= 0");
            require(spec.rcut > spec.r1, "well needs rcut > r1");
            const double r0 = spec.r0, r1 = spec.r1, c1 = spec.c1, c2 = spec.c2, rc = spec.rcut;
            m.spin_law = SpinLaw::unit();
            m.interaction_range = rc;
            m.pure_hard_core = false;
            m.min_pair_energy = -c1;
            auto prof = [r0, r1, c1, c2, rc](double r) {
                if (r < r0) return kInf;
                if (r < r1) return -c1;
                if (r < rc) return c2 / (r * r * r);
                return 0.0;
            };
            m.in_hard_core = [r0](const Particle& a, const Particle& b) {
                return pair_dist(a, b) < r0;
            };
            m.evaluate = [prof](const Particle& a, const Particle& b) {
                return prof(pair_dist(a, b));
            };
            RadialProfile rp;
            rp.V = [prof](double r, const Spin&, const Spin&) { return prof(r); };
            rp.dV = [r1, rc, c2](double r, const Spin&, const Spin&) {
                if (r > r1 && r < rc) return -3.0 * c2 / (r * r * r * r);
                return 0.0;
            };
            rp.core_radius = [r0](const Spin&, const Spin&) { return r0; };
            rp.core_radius_max = r0;
            rp.jumps = {r1, rc};
            rp.R = rc;
            m.radial = rp;
            break;
        }
        case ModelKind::LennardJones: {
            require(spec.c1 > 0, "lennard_jones needs c1 > 0");
            require(spec.c2 >= 0, "lennard_jones needs c2 >= 0");
            require(spec.rcut > 0, "lennard_jones needs rcut > 0");
            const double c1 = spec.c1, c2 = spec.c2, rc = spec.rcut;
            m.spin_law = SpinLaw::unit();
            m.interaction_range = rc;
            m.pure_hard_core = false;
            if (c2 > 0) {
                double rmin = std::pow(2.0 * c1 / c2, 1.0 / 6.0);
                m.min_pair_energy = rmin < rc ? -c2 * c2 / (4.0 * c1) : 0.0;
            }
            auto prof = [c1, c2, rc](double r) {
                if (r == 0.0) return kInf;
                if (r >= rc) return 0.0;
                double r6 = std::pow(r, 6.0);
                return c1 / (r6 * r6) - c2 / r6;
            };
            m.in_hard_core = [](const Particle& a, const Particle& b) { return a.x == b.x; };
            m.evaluate = [prof](const Particle& a, const Particle& b) {
                return prof(pair_dist(a, b));
            };
            RadialProfile rp;
            rp.V = [prof](double r, const Spin&, const Spin&) { return prof(r); };
            rp.dV = [c1, c2, rc](double r, const Spin&, const Spin&) {
                if (r <= 0.0 || r >= rc) return 0.0;
                double r7 = std::pow(r, 7.0);
                return -12.0 * c1 / (r7 * std::pow(r, 6.0)) + 6.0 * c2 / r7;
            };
            rp.core_radius = [](const Spin&, const Spin&) { return 0.0; };
            rp.core_radius_max = 0.0;
            rp.jumps = {rc};
            rp.R = rc;
            m.radial = rp;
            break;
        }
        case ModelKind::WidomRowlinson: {
            require(spec.q >= 2, "widom_rowlinson needs q >= 2");
            require(spec.r > 0, "widom_rowlinson needs r > 0");
            const double d = 2.0 * spec.r;
            m.spin_law = SpinLaw::discrete(spec.q);
            m.interaction_range = d;
            m.pure_hard_core = true;
            m.in_hard_core = [d](const Particle& a, const Particle& b) {
                if (a.spin.label == b.spin.label) return a.x == b.x;
                return pair_dist(a, b) < d;
            };
            m.evaluate = [d](const Particle& a, const Particle& b) {
                if (a.spin.label == b.spin.label) return a.x == b.x ? kInf : 0.0;
                return pair_dist(a, b) < d ? kInf : 0.0;
            };
            RadialProfile rp;
            rp.V = [d](double r, const Spin& sa, const Spin& sb) {
                if (sa.label == sb.label) return r == 0.0 ? kInf : 0.0;
                return r < d ? kInf : 0.0;
            };
            rp.dV = [](double, const Spin&, const Spin&) { return 0.0; };
            rp.core_radius = [d](const Spin& sa, const Spin& sb) {
                return sa.label == sb.label ? 0.0 : d;
            };
            rp.core_radius_max = d;
            rp.jumps = {};
            rp.R = d;
            m.radial = rp;
            break;
        }
        case ModelKind::RandomRadii: {
            require(spec.rmax > 0, "random_radii needs rmax > 0");
            const double rmax = spec.rmax;
            m.spin_law = SpinLaw::scalar(0.0, rmax);
            m.interaction_range = 2.0 * rmax;
            m.pure_hard_core = true;
            m.in_hard_core = [](const Particle& a, const Particle& b) {
                return pair_dist(a, b) < a.spin.value + b.spin.value;
            };
            m.evaluate = [](const Particle& a, const Particle& b) {
                return pair_dist(a, b) < a.spin.value + b.spin.value ? kInf : 0.0;
            };
            RadialProfile rp;
            rp.V = [](double r, const Spin& sa, const Spin& sb) {
                return r < sa.value + sb.value ? kInf : 0.0;
            };
            rp.dV = [](double, const Spin&, const Spin&) { return 0.0; };
            rp.core_radius = [](const Spin& sa, const Spin& sb) {
                return sa.value + sb.value;
            };
            rp.core_radius_max = 2.0 * rmax;
            rp.jumps = {};
            rp.R = 2.0 * rmax;
            m.radial = rp;
            break;
        }
        case ModelKind::HardRods: {
            require(spec.r > 0, "hard_rods needs r > 0");
            const double h = spec.r;
            m.spin_law = SpinLaw::direction();
            m.interaction_range = 2.0 * h;
            m.pure_hard_core = true;
            m.rod_half_length = h;
            m.in_hard_core = [h](const Particle& a, const Particle& b) {
                if ((a.x - b.x).norm() > 2.0 * h) return false;
                return segments_intersect(a.x, a.spin.value, b.x, b.spin.value, h);
            };
            m.evaluate = [h](const Particle& a, const Particle& b) {
                if ((a.x - b.x).norm() > 2.0 * h) return 0.0;
                return segments_intersect(a.x, a.spin.value, b.x, b.spin.value, h) ? kInf : 0.0;
            };
            break;
        }
    }
    return m;
}

}  // namespace gshift
