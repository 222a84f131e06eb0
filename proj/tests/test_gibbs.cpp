#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gshift/decompose.hpp"
#include "gshift/gibbs.hpp"
#include "gshift/potential.hpp"
#include "gshift/rng.hpp"

using namespace gshift;

namespace {

// Pair-energy sum with at least one interior endpoint, by unindexed loops.
double brute_hamiltonian(const PotentialModel& m, const MarkedConfiguration& cfg) {
    double h = 0.0;
    for (size_t i = 0; i < cfg.interior.size(); ++i) {
        for (size_t j = i + 1; j < cfg.interior.size(); ++j) {
            double e = m.evaluate(cfg.interior[i], cfg.interior[j]);
            if (e == kInf) return kInf;
            h += e;
        }
        for (const Particle& b : cfg.boundary) {
            double e = m.evaluate(cfg.interior[i], b);
            if (e == kInf) return kInf;
            h += e;
        }
    }
    return h;
}

MarkedConfiguration random_config(const PotentialModel& m, double n, size_t ni, size_t nb,
                                  Rng& rng) {
    MarkedConfiguration cfg;
    cfg.window.n = n;
    for (size_t i = 0; i < ni; ++i) {
        Particle p;
        p.id = int(i);
        p.x = Vec2(rng.uniform(-n, n), rng.uniform(-n, n));
        p.spin = sample_spin(m.spin_law, rng);
        cfg.interior.push_back(p);
    }
    for (size_t i = 0; i < nb; ++i) {
        Particle p;
        p.id = int(ni + i);
        double side = rng.uniform() < 0.5 ? 1.0 : -1.0;
        p.x = Vec2(side * rng.uniform(n + 1e-6, n + 1.0), rng.uniform(-n, n));
        if (rng.uniform() < 0.5) std::swap(p.x[0], p.x[1]);
        p.spin = sample_spin(m.spin_law, rng);
        cfg.boundary.push_back(p);
    }
    return cfg;
}

// Interaction-free model: every pair contributes zero energy.
PotentialModel free_model() {
    PotentialModel m;
    m.kind = ModelKind::SoftCore;
    m.spin_law = SpinLaw::unit();
    m.interaction_range = 0.0;
    m.min_pair_energy = 0.0;
    m.pure_hard_core = false;
    m.evaluate = [](const Particle&, const Particle&) { return 0.0; };
    m.in_hard_core = [](const Particle&, const Particle&) { return false; };
    return m;
}

double poisson_pmf(double mean, int k) {
    return std::exp(double(k) * std::log(mean) - mean - std::lgamma(double(k) + 1.0));
}

}  // namespace

TEST_CASE("parameter validation") {
    GibbsParams bad_z{0.0, 1.0};
    CHECK_THROWS_WITH_AS(bad_z.validate(), doctest::Contains("activity"), std::invalid_argument);
    GibbsParams bad_beta{1.0, -0.5};
    CHECK_THROWS_WITH_AS(bad_beta.validate(), doctest::Contains("beta"), std::invalid_argument);
    GibbsParams{2.5, 0.0}.validate();

    McmcSettings mc;
    mc.thin = 0;
    CHECK_THROWS_WITH_AS(mc.validate(), doctest::Contains("thin"), std::invalid_argument);
    mc = McmcSettings{};
    mc.p_move = 0.7;
    mc.p_birth = 0.7;
    CHECK_THROWS_AS(mc.validate(), std::invalid_argument);
    mc = McmcSettings{};
    mc.step = 0.0;
    CHECK_THROWS_WITH_AS(mc.validate(), doctest::Contains("step"), std::invalid_argument);
    McmcSettings{}.validate();
}

TEST_CASE("boltzmann convention at infinite energy") {
    CHECK(boltzmann(1.0, kInf) == 0.0);
    CHECK(boltzmann(0.0, kInf) == 0.0);
    CHECK(boltzmann(2.0, 0.5) == std::exp(-1.0));
    CHECK(boltzmann(1.0, -kInf) == kInf);
}

TEST_CASE("sample_spin respects the mark space") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_spin(SpinLaw::unit(), rng) == Spin::unit());
        Spin d = sample_spin(SpinLaw::discrete(3), rng);
        CHECK(SpinLaw::discrete(3).valid_spin(d));
        Spin s = sample_spin(SpinLaw::scalar(0.25, 0.5), rng);
        CHECK(SpinLaw::scalar(0.25, 0.5).valid_spin(s));
        Spin a = sample_spin(SpinLaw::direction(), rng);
        CHECK(SpinLaw::direction().valid_spin(a));
    }
    // Discrete labels hit every class.
    Rng r2(12);
    std::vector<int> seen(3, 0);
    for (int i = 0; i < 300; ++i) ++seen[size_t(sample_spin(SpinLaw::discrete(3), r2).label)];
    for (int c : seen) CHECK(c > 50);
}

TEST_CASE("sample_poisson: counts, void probability, validity") {
    Rng rng(2024);
    const double z = 2.0, n = 2.0;
    const size_t reps = 4000;
    double mean = 0.0, voids = 0.0;
    for (size_t r = 0; r < reps; ++r) {
        MarkedConfiguration cfg = sample_poisson(z, n, SpinLaw::unit(), rng);
        cfg.validate();
        mean += double(cfg.interior.size());
        bool empty_cell = true;
        for (const Particle& p : cfg.interior)
            if (p.x[0] >= 0.0 && p.x[0] <= 1.0 && p.x[1] >= 0.0 && p.x[1] <= 1.0)
                empty_cell = false;
        voids += empty_cell ? 1.0 : 0.0;
    }
    mean /= double(reps);
    voids /= double(reps);
    double lam = z * 4.0 * n * n;  // 32
    CHECK(std::abs(mean - lam) < 4.0 * std::sqrt(lam / double(reps)));
    double pv = std::exp(-z);  // unit-area void cell
    CHECK(std::abs(voids - pv) < 4.0 * std::sqrt(pv * (1.0 - pv) / double(reps)));
}

TEST_CASE("hamiltonian matches brute force over mixed models") {
    std::vector<PotentialModel> models;
    models.push_back(make_model(ModelSpec::hard_core(0.5)));
    models.push_back(make_model(ModelSpec::well(0.5, 1.0, 0.3, 0.4, 3.0)));
    models.push_back(make_model(ModelSpec::widom_rowlinson(2, 0.5)));
    models.push_back(make_model(ModelSpec::hard_rods(0.5)));
    models.push_back(make_model(ModelSpec::random_radii(0.4)));
    Rng rng(7);
    int infinite_seen = 0;
    for (const PotentialModel& m : models) {
        for (int rep = 0; rep < 40; ++rep) {
            MarkedConfiguration cfg = random_config(m, 2.0, 14, 6, rng);
            double a = hamiltonian(m, cfg);
            double b = brute_hamiltonian(m, cfg);
            if (b == kInf) {
                CHECK(a == kInf);
                ++infinite_seen;
            } else {
                CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
            }
            double c = hamiltonian_pair(m.evaluate, m.interaction_range, cfg);
            CHECK(((c == kInf && a == kInf) || std::abs(c - a) <= 1e-12 * (1.0 + std::abs(a))));
        }
    }
    CHECK(infinite_seen > 10);  // hard cores actually exercised

    // Boundary-boundary pairs never count: two overlapping boundary disks.
    PotentialModel hc = make_model(ModelSpec::hard_core(0.5));
    MarkedConfiguration cfg;
    cfg.window.n = 1.0;
    cfg.boundary.push_back({1, Vec2(1.5, 0.0), Spin::unit()});
    cfg.boundary.push_back({2, Vec2(1.6, 0.0), Spin::unit()});
    CHECK(hamiltonian(hc, cfg) == 0.0);
    cfg.interior.push_back({3, Vec2(0.0, 0.0), Spin::unit()});
    CHECK(hamiltonian(hc, cfg) == 0.0);
    cfg.interior.push_back({4, Vec2(0.3, 0.0), Spin::unit()});
    CHECK(hamiltonian(hc, cfg) == kInf);
}

TEST_CASE("insertion energy is the hamiltonian increment") {
    PotentialModel m = make_model(ModelSpec::well(0.5, 1.0, 0.3, 0.4, 3.0));
    Rng rng(21);
    int finite = 0;
    for (int rep = 0; rep < 90; ++rep) {
        MarkedConfiguration cfg = random_config(m, 3.0, 6, 3, rng);
        Particle p;
        p.id = 99;
        p.x = Vec2(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
        p.spin = Spin::unit();
        double h0 = hamiltonian(m, cfg);
        double de = insertion_energy(m, cfg, p);
        MarkedConfiguration plus = cfg;
        plus.interior.push_back(p);
        double h1 = hamiltonian(m, plus);
        if (h0 == kInf) continue;
        if (de == kInf) {
            CHECK(h1 == kInf);
        } else {
            ++finite;
            CHECK(std::abs(h1 - (h0 + de)) <= 1e-9 * (1.0 + std::abs(h1)));
        }
    }
    CHECK(finite > 20);
}

TEST_CASE("birth and death acceptances are in detailed balance") {
    PotentialModel m = make_model(ModelSpec::well(0.5, 1.0, 0.3, 0.4, 3.0));
    GibbsParams gp{1.7, 1.3};
    Rng rng(31);
    int checked = 0, zeros = 0;
    for (int rep = 0; rep < 80; ++rep) {
        MarkedConfiguration cfg = random_config(m, 2.0, 6, 3, rng);
        if (hamiltonian(m, cfg) == kInf) continue;
        Particle cand;
        cand.id = 77;
        cand.x = Vec2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
        cand.spin = Spin::unit();
        double de = insertion_energy(m, cfg, cand);
        double ab = birth_accept(m, gp, cfg, cand);
        MarkedConfiguration plus = cfg;
        plus.interior.push_back(cand);
        double ad = death_accept(m, gp, plus, plus.interior.size() - 1);
        if (de == kInf) {
            CHECK(ab == 0.0);
            CHECK(ad == 1.0);
            ++zeros;
            continue;
        }
        // min(1,R)/min(1,1/R) == R for the grand-canonical ratio R.
        double ratio = gp.z * cfg.window.area() / (double(cfg.interior.size()) + 1.0) *
                       boltzmann(gp.beta, de);
        CHECK(ab > 0.0);
        CHECK(ad > 0.0);
        CHECK(std::abs(ab / ad - ratio) <= 1e-12 * (1.0 + ratio));
        ++checked;
    }
    CHECK(checked > 30);
    CHECK(zeros > 2);
    CHECK_THROWS_WITH_AS(death_accept(m, gp, MarkedConfiguration{}, 0),
                         doctest::Contains("death index"), std::invalid_argument);
}

TEST_CASE("interaction-free weights reproduce the Poisson size distribution") {
    PotentialModel m = free_model();
    GibbsParams gp{0.5, 1.0};
    const double n = 0.5;  // area 1, so z*A = 0.5
    std::vector<double> w = exact_small_weights(m, gp, n, {}, 7);
    REQUIRE(w.size() == 8);
    double za = gp.z * 4.0 * n * n;
    double norm = 0.0;
    for (int k = 0; k <= 7; ++k) norm += poisson_pmf(za, k);
    double mean_w = 0.0, sum_w = 0.0;
    for (int k = 0; k <= 7; ++k) {
        double expect = poisson_pmf(za, k) / norm;
        CHECK(std::abs(w[size_t(k)] - expect) <= 1e-12 * expect + 1e-15);
        sum_w += w[size_t(k)];
        mean_w += k * w[size_t(k)];
    }
    CHECK(std::abs(sum_w - 1.0) <= 1e-12);
    CHECK(mean_w == doctest::Approx(za).epsilon(1e-6));
}

TEST_CASE("exact sampler guards: spins, unsummable tails") {
    GibbsParams gp{1.0, 1.0};
    PotentialModel wr = make_model(ModelSpec::widom_rowlinson(2, 0.5));
    CHECK_THROWS_WITH_AS(exact_small_weights(wr, gp, 0.5, {}, 3),
                         doctest::Contains("unit-spin"), std::invalid_argument);
    PotentialModel m = free_model();
    GibbsParams hot{50.0, 1.0};  // z*A = 50 dwarfs any tiny k_max
    CHECK_THROWS_WITH_AS(exact_small_weights(m, hot, 0.5, {}, 4),
                         doctest::Contains("k_max too small"), std::runtime_error);
    GibbsParams warm{3.0, 1.0};  // summable but fat tail past k_max = 3
    CHECK_THROWS_WITH_AS(exact_small_weights(m, warm, 0.5, {}, 3),
                         doctest::Contains("k_max too small"), std::runtime_error);
}

TEST_CASE("hard-disk exact sampler: support, size law, boundary exclusion") {
    PotentialModel m = make_model(ModelSpec::hard_core(0.4));
    GibbsParams gp{0.25, 1.0};
    const double n = 0.6;
    std::vector<Particle> boundary = {{5, Vec2(0.65, 0.0), Spin::unit()}};
    std::vector<double> w = exact_small_weights(m, gp, n, boundary, 6);
    REQUIRE(w.size() == 7);

    // Hard cores thin the size law below the free law at equal activity.
    double za = gp.z * 4.0 * n * n;
    CHECK(w[2] / w[0] < std::exp(2.0 * std::log(za) - std::lgamma(3.0)));

    Rng rng(404);
    const size_t reps = 3000;
    std::vector<MarkedConfiguration> samples = exact_sample_small(m, gp, n, boundary, 6, reps, rng);
    REQUIRE(samples.size() == reps);
    std::vector<double> freq(w.size(), 0.0);
    for (const MarkedConfiguration& cfg : samples) {
        cfg.validate(&m.spin_law);
        REQUIRE(cfg.interior.size() < w.size());
        freq[cfg.interior.size()] += 1.0 / double(reps);
        for (size_t i = 0; i < cfg.interior.size(); ++i) {
            CHECK(cfg.interior[i].id == 6 + int(i));  // ids follow the boundary ids
            CHECK(sup_norm(cfg.interior[i].x) <= n);
            CHECK(!m.in_hard_core(cfg.interior[i], cfg.boundary[0]));
            for (size_t j = i + 1; j < cfg.interior.size(); ++j)
                CHECK(!m.in_hard_core(cfg.interior[i], cfg.interior[j]));
        }
    }
    for (size_t k = 0; k < w.size(); ++k) {
        double se = std::sqrt(std::max(w[k] * (1.0 - w[k]), 1e-12) / double(reps));
        CHECK(std::abs(freq[k] - w[k]) <= 4.0 * se + 1e-3);
    }

    // Same seed, same draw; the sampler is a pure function of (inputs, seed).
    Rng r1(99), r2(99);
    auto s1 = exact_sample_small(m, gp, n, boundary, 6, 5, r1);
    auto s2 = exact_sample_small(m, gp, n, boundary, 6, 5, r2);
    for (size_t s = 0; s < 5; ++s) {
        REQUIRE(s1[s].interior.size() == s2[s].interior.size());
        for (size_t i = 0; i < s1[s].interior.size(); ++i) {
            CHECK(s1[s].interior[i].x == s2[s].interior[i].x);
            CHECK(s1[s].interior[i].id == s2[s].interior[i].id);
        }
    }
}

TEST_CASE("chain matches the exact size distribution on a tiny window") {
    PotentialModel m = make_model(ModelSpec::hard_core(0.4));
    GibbsParams gp{0.25, 1.0};
    const double n = 0.6;
    std::vector<double> w = exact_small_weights(m, gp, n, {}, 6);
    double exact_mean = 0.0;
    for (size_t k = 0; k < w.size(); ++k) exact_mean += double(k) * w[k];

    McmcSettings mc;
    mc.burn_in = 20000;
    mc.thin = 400;
    Rng rng(515);
    const size_t reps = 500;
    std::vector<MarkedConfiguration> chain = sample_gibbs(m, gp, n, {}, mc, reps, rng);
    REQUIRE(chain.size() == reps);
    double mean = 0.0, sq = 0.0;
    for (const MarkedConfiguration& cfg : chain) {
        double k = double(cfg.interior.size());
        mean += k;
        sq += k * k;
    }
    mean /= double(reps);
    sq /= double(reps);
    double se = std::sqrt(std::max(sq - mean * mean, 1e-12) / double(reps));
    CHECK(std::abs(mean - exact_mean) <= 4.0 * se + 0.01);
}

TEST_CASE("ideal-gas chain recovers Poisson occupancy") {
    PotentialModel m = free_model();
    GibbsParams gp{2.0, 1.0};
    const double n = 1.0;
    McmcSettings mc;
    mc.burn_in = 10000;
    mc.thin = 300;
    Rng rng(616);
    const size_t reps = 400;
    std::vector<MarkedConfiguration> chain = sample_gibbs(m, gp, n, {}, mc, reps, rng);
    double lam = gp.z * 4.0 * n * n;  // 8
    double mean = 0.0, sq = 0.0;
    for (const MarkedConfiguration& cfg : chain) {
        double k = double(cfg.interior.size());
        mean += k;
        sq += k * k;
    }
    mean /= double(reps);
    sq /= double(reps);
    double se = std::sqrt(std::max(sq - mean * mean, 1e-12) / double(reps));
    CHECK(std::abs(mean - lam) <= 4.0 * se + 0.05);
    // Second moment consistent with Poisson (var = mean).
    CHECK(std::abs((sq - mean * mean) - lam) <= 0.2 * lam);
}

TEST_CASE("chain respects hard cores, the window, and the fixed boundary") {
    PotentialModel m = make_model(ModelSpec::hard_core(0.5));
    GibbsParams gp{1.0, 1.0};
    const double n = 1.5;
    std::vector<Particle> boundary = {{3, Vec2(1.7, 0.0), Spin::unit()},
                                      {9, Vec2(0.0, -1.9), Spin::unit()}};
    McmcSettings mc;
    mc.burn_in = 5000;
    mc.thin = 200;
    Rng rng(717);
    std::vector<MarkedConfiguration> chain = sample_gibbs(m, gp, n, boundary, mc, 100, rng);
    double occupied = 0.0;
    for (const MarkedConfiguration& cfg : chain) {
        cfg.validate(&m.spin_law);
        REQUIRE(cfg.boundary.size() == 2);
        CHECK(cfg.boundary[0].id == 3);
        CHECK(cfg.boundary[1].id == 9);
        occupied += cfg.interior.empty() ? 0.0 : 1.0;
        for (size_t i = 0; i < cfg.interior.size(); ++i) {
            CHECK(cfg.interior[i].id == 10 + int(i));
            CHECK(sup_norm(cfg.interior[i].x) <= n);
            for (const Particle& b : cfg.boundary) CHECK(!m.in_hard_core(cfg.interior[i], b));
            for (size_t j = i + 1; j < cfg.interior.size(); ++j)
                CHECK(!m.in_hard_core(cfg.interior[i], cfg.interior[j]));
        }
    }
    CHECK(occupied > 50.0);  // the chain actually moved off the empty state

    // Bad boundary input is rejected up front.
    std::vector<Particle> inside = {{1, Vec2(0.0, 0.0), Spin::unit()}};
    CHECK_THROWS_WITH_AS(sample_gibbs(m, gp, n, inside, mc, 1, rng),
                         doctest::Contains("boundary particle inside"), std::invalid_argument);
    std::vector<Particle> dup = {{4, Vec2(1.7, 0.0), Spin::unit()},
                                 {4, Vec2(-1.7, 0.0), Spin::unit()}};
    CHECK_THROWS_WITH_AS(sample_gibbs(m, gp, n, dup, mc, 1, rng),
                         doctest::Contains("duplicate boundary id"), std::invalid_argument);
}

TEST_CASE("chain is deterministic in the seed, with spins preserved") {
    PotentialModel m = make_model(ModelSpec::widom_rowlinson(2, 0.5));
    GibbsParams gp{0.8, 1.0};
    McmcSettings mc;
    mc.burn_in = 3000;
    mc.thin = 100;
    Rng r1(88), r2(88), r3(89);
    auto a = sample_gibbs(m, gp, 1.2, {}, mc, 20, r1);
    auto b = sample_gibbs(m, gp, 1.2, {}, mc, 20, r2);
    auto c = sample_gibbs(m, gp, 1.2, {}, mc, 20, r3);
    bool all_equal = true, any_diff = false;
    size_t particles = 0;
    for (size_t s = 0; s < 20; ++s) {
        if (a[s].interior.size() != b[s].interior.size()) all_equal = false;
        for (size_t i = 0; all_equal && i < a[s].interior.size(); ++i) {
            if (a[s].interior[i].x != b[s].interior[i].x ||
                !(a[s].interior[i].spin == b[s].interior[i].spin))
                all_equal = false;
        }
        particles += a[s].interior.size();
        if (a[s].interior.size() != c[s].interior.size()) any_diff = true;
        a[s].validate(&m.spin_law);
    }
    CHECK(all_equal);
    CHECK(any_diff);
    CHECK(particles > 20);
}

TEST_CASE("edge process: trivial split never draws, u-driven pairs are Bernoulli") {
    // Trivial decomposition (pure hard core): u == 0, no edges at all.
    PotentialModel hc = make_model(ModelSpec::hard_core(0.5));
    SmoothDecomposition dhc = smooth_decompose(hc, {});
    Rng rng(13);
    MarkedConfiguration cfg;
    cfg.window.n = 2.0;
    cfg.interior.push_back({0, Vec2(0.0, 0.0), Spin::unit()});
    cfg.interior.push_back({1, Vec2(0.7, 0.0), Spin::unit()});
    cfg.interior.push_back({2, Vec2(0.0, 0.7), Spin::unit()});
    CHECK(sample_edges(dhc, 1.0, cfg, rng).empty());

    // Synthetic split: u == ln 2 within distance 1, so each nearby pair draws
    // an edge with probability exactly 1/2 at beta = 1.
    SmoothDecomposition d;
    d.trivial = false;
    d.u_range = 1.0;
    d.u_small = [](const Particle& a, const Particle& b) {
        return (a.x - b.x).norm() <= 1.0 ? std::log(2.0) : 0.0;
    };
    cfg.interior.push_back({3, Vec2(-1.8, -1.8), Spin::unit()});  // isolated
    cfg.boundary.push_back({4, Vec2(2.2, 0.0), Spin::unit()});
    cfg.boundary.push_back({5, Vec2(2.9, 0.0), Spin::unit()});  // boundary-boundary pair
    const size_t reps = 10000;
    double total = 0.0;
    Rng r2(14);
    for (size_t rep = 0; rep < reps; ++rep) {
        EdgeSet e = sample_edges(d, 1.0, cfg, r2);
        for (auto [x, y] : e.pairs()) {
            CHECK(x < y);
            CHECK(x <= 2);  // never the isolated interior, never boundary-boundary
            CHECK(y <= 2);
        }
        total += double(e.size());
    }
    double mean = total / double(reps);  // Binomial(3, 1/2) mean 1.5
    double se = std::sqrt(3.0 * 0.25 / double(reps));
    CHECK(std::abs(mean - 1.5) <= 4.0 * se);

    // Same seed -> identical edge draws.
    Rng r3(15), r4(15);
    EdgeSet e1 = sample_edges(d, 1.0, cfg, r3);
    EdgeSet e2 = sample_edges(d, 1.0, cfg, r4);
    REQUIRE(e1.size() == e2.size());
    for (size_t i = 0; i < e1.size(); ++i) CHECK(e1.pairs()[i] == e2.pairs()[i]);
}

TEST_CASE("correlation estimator flags only real bound violations") {
    Rng rng(303);
    std::vector<MarkedConfiguration> samples;
    for (int i = 0; i < 4000; ++i) samples.push_back(sample_poisson(1.0, 2.0, SpinLaw::unit(), rng));
    std::vector<Cell> cells = {{Vec2(-1.0, 0.0), 0.5}, {Vec2(1.0, 0.0), 0.5}};
    CHECK(cells[0].area() == 1.0);

    // Poisson(1) has pair-moment density 1: a bound from xi = 1.2 holds...
    CorrelationCheck ok = estimate_correlation(samples, cells, 1.2);
    CHECK(std::abs(ok.estimate - 1.0) <= 4.0 * ok.std_error);
    CHECK(ok.bound == doctest::Approx(1.44));
    CHECK(!ok.flagged);
    // ...and an artificially small xi = 0.4 is flagged.
    CorrelationCheck bad = estimate_correlation(samples, cells, 0.4);
    CHECK(bad.flagged);
    CHECK_THROWS_AS(estimate_correlation({}, cells, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(estimate_correlation(samples, {}, 1.0), std::invalid_argument);
}
