#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gshift/core.hpp"
#include "gshift/decompose.hpp"
#include "gshift/gibbs.hpp"
#include "gshift/harness.hpp"
#include "gshift/jsonl.hpp"
#include "gshift/potential.hpp"
#include "gshift/rng.hpp"
#include "gshift/transform.hpp"

namespace {

using namespace gshift;
namespace fs = std::filesystem;

std::string tmp_dir() {
    static int counter = 0;
    std::string dir = "harness_test_tmp_" + std::to_string(counter++);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ExperimentSpec quick_hard_disks(const std::string& dir) {
    ExperimentSpec s;
    s.name = "quick-hard-disks";
    s.model = ModelSpec::hard_core(0.5);
    s.n = 8.0;
    s.z = 0.2;
    s.c = 0.05;
    s.delta = 0.1;
    s.dopt.gamma = 2.0 / 3.0;
    s.samples = 8;
    s.seed = 99;
    s.mc.burn_in = 2000;
    s.mc.thin = 50;
    s.out_dir = dir;
    return s;
}

}  // namespace

TEST_CASE("experiment config parsing: keys, comments, quoting, errors") {
    std::string text =
        "# full demo\n"
        "name = \"demo # run\"   # quoted values keep their hash\n"
        "model = well\n"
        "r0 = 0.5\n"
        "r1 = 1.0\n"
        "c1 = 0.3\n"
        "c2 = 0.4\n"
        "rcut = 3.0\n"
        "beta = 1.5\n"
        "z = 0.25\n"
        "xi = 0.6\n"
        "n = 12\n"
        "pad = 1.5\n"
        "boundary = lattice\n"
        "lattice_spacing = 0.9\n"
        "burn_in = 500\n"
        "thin = 25\n"
        "step = 0.2\n"
        "sampler = mcmc\n"
        "c = 0.03\n"
        "delta = 0.2\n"
        "strict = false\n"
        "gamma = 0.5\n"
        "samples = 17\n"
        "seed = 31\n"
        "workers = 2\n"
        "out_dir = out\n";
    ExperimentSpec s = parse_experiment_text(text);
    CHECK(s.name == "demo # run");
    CHECK(s.model.kind == ModelKind::Well);
    CHECK(s.model.r0 == 0.5);
    CHECK(s.model.rcut == 3.0);
    CHECK(s.beta == 1.5);
    CHECK(s.z == 0.25);
    CHECK(s.xi == 0.6);
    CHECK(s.n == 12.0);
    CHECK(s.pad == 1.5);
    CHECK(s.boundary == BoundarySource::Lattice);
    CHECK(s.lattice_spacing == 0.9);
    CHECK(s.mc.burn_in == 500);
    CHECK(s.mc.thin == 25);
    CHECK(s.mc.step == 0.2);
    CHECK_FALSE(s.exact_sampler);
    CHECK(s.c == 0.03);
    CHECK(s.delta == 0.2);
    CHECK(s.dopt.gamma == 0.5);
    CHECK(s.samples == 17);
    CHECK(s.seed == 31);
    CHECK(s.workers == 2);
    CHECK(s.echo.size() == 26);
    CHECK_NOTHROW(s.validate());

    // defaults survive when the model block is absent
    ExperimentSpec d = parse_experiment_text("name = bare\n");
    CHECK(d.model.kind == ModelKind::HardCore);
    CHECK(d.model.r0 == 0.5);

    CHECK_THROWS_WITH_AS(parse_experiment_text("volume = 3\n"),
                         doctest::Contains("unknown config key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("model = perfect_gas\n"),
                         doctest::Contains("unknown model"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("boundary = wall\n"),
                         doctest::Contains("boundary must be"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("n 12\n"), doctest::Contains("missing '='"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("n =\n"), doctest::Contains("empty value"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("n = twelve\n"), doctest::Contains("needs a number"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment_text("strict = maybe\n"),
                         doctest::Contains("needs true/false"), std::invalid_argument);
}

TEST_CASE("spec validation rejects broken experiments") {
    ExperimentSpec s = quick_hard_disks("unused");
    CHECK_NOTHROW(s.validate());
    {
        ExperimentSpec q = s;
        q.samples = 0;
        CHECK_THROWS_WITH_AS(q.validate(), doctest::Contains("sample count"),
                             std::invalid_argument);
        q = s;
        q.n = 1.0;
        CHECK_THROWS_WITH_AS(q.validate(), doctest::Contains("window n"), std::invalid_argument);
        q = s;
        q.z = 0.0;
        CHECK_THROWS_WITH_AS(q.validate(), doctest::Contains("activity z"), std::invalid_argument);
        q = s;
        q.workers = 0;
        CHECK_THROWS_WITH_AS(q.validate(), doctest::Contains("workers"), std::invalid_argument);
        q = s;
        q.boundary = BoundarySource::File;
        q.boundary_file = "no/such/file.jsonl";
        CHECK_THROWS_WITH_AS(q.validate(), doctest::Contains("does not exist"),
                             std::invalid_argument);
    }
}

TEST_CASE("canonical spec text is a parse fixpoint") {
    for (const std::string& nm : recipe_names()) {
        CAPTURE(nm);
        ExperimentSpec s = recipe(nm);
        std::string text = spec_to_text(s);
        ExperimentSpec back = parse_experiment_text(text);
        CHECK(spec_to_text(back) == text);
        CHECK(back.name == s.name);
        CHECK(back.model.kind == s.model.kind);
        CHECK(back.n == s.n);
        CHECK(back.z == s.z);
        CHECK(back.c == s.c);
        CHECK(back.delta == s.delta);
        CHECK(back.samples == s.samples);
        CHECK(back.seed == s.seed);
    }
}

TEST_CASE("bundled recipes build their models, decompositions, and transform params") {
    CHECK(recipe_names().size() == 5);
    for (const std::string& nm : recipe_names()) {
        CAPTURE(nm);
        ExperimentSpec s = recipe(nm);
        CHECK(s.name == nm);
        CHECK_NOTHROW(s.validate());
        PotentialModel model = make_model(s.model);
        SmoothDecomposition d = smooth_decompose(model, s.dopt);
        TransformParams p = TransformParams::for_decomposition(d, s.n, s.c, s.delta);
        CHECK_NOTHROW(p.validate());
    }
    CHECK_THROWS_WITH_AS(recipe("tricritical"), doctest::Contains("unknown recipe"),
                         std::invalid_argument);
    // the sanity recipe really is interaction-free
    PotentialModel free_gas = make_model(recipe("poisson-sanity").model);
    Particle a;
    a.x = Vec2(0.0, 0.0);
    Particle b;
    b.x = Vec2(0.1, 0.0);
    CHECK(free_gas.evaluate(a, b) == 0.0);
    CHECK_FALSE(free_gas.in_hard_core(a, b));
}

TEST_CASE("boundary generators: empty, triangular shell, file") {
    ExperimentSpec s = quick_hard_disks("unused");
    PotentialModel model = make_model(s.model);
    double total = s.n + s.effective_pad(model);
    CHECK(total == 9.0);  // pad defaults to twice the interaction range

    {
        Rng rng(7);
        CHECK(make_boundary(s, model, rng).empty());
    }
    {
        ExperimentSpec lat = s;
        lat.boundary = BoundarySource::Lattice;
        Rng rng(7);
        auto ring = make_boundary(lat, model, rng);
        REQUIRE(ring.size() > 20);
        double spacing = model.interaction_range;  // default lattice pitch
        for (const Particle& p : ring) {
            CHECK(sup_norm(p.x) > total);
            CHECK(sup_norm(p.x) <= total + 2.0 * spacing);
            CHECK(p.id >= 10000000);
        }
        double min_dist = 1e9;
        for (size_t i = 0; i < ring.size(); ++i)
            for (size_t j = i + 1; j < ring.size(); ++j)
                min_dist = std::min(min_dist, (ring[i].x - ring[j].x).norm());
        CHECK(min_dist >= spacing - 1e-9);
        Rng rng2(7);
        auto ring2 = make_boundary(lat, model, rng2);
        REQUIRE(ring2.size() == ring.size());
        for (size_t i = 0; i < ring.size(); ++i) {
            CHECK(ring2[i].x[0] == ring[i].x[0]);
            CHECK(ring2[i].x[1] == ring[i].x[1]);
        }
    }
    {
        std::string dir = tmp_dir();
        MarkedConfiguration outer;
        outer.window.n = 64.0;
        Particle far;
        far.id = 3;
        far.x = Vec2(20.0, -11.0);
        far.spin = Spin::unit();
        outer.interior.push_back(far);
        std::string path = dir + "/outer.jsonl";
        write_configs_jsonl(path, {outer});

        ExperimentSpec filed = s;
        filed.boundary = BoundarySource::File;
        filed.boundary_file = path;
        Rng rng(7);
        auto loaded = make_boundary(filed, model, rng);
        REQUIRE(loaded.size() == 1);
        CHECK(loaded[0].id == 10000000);
        CHECK(loaded[0].x[0] == 20.0);
        CHECK(loaded[0].x[1] == -11.0);

        // particles inside the sampling window are rejected
        outer.interior[0].x = Vec2(3.0, 3.0);
        write_configs_jsonl(path, {outer});
        Rng rng3(7);
        CHECK_THROWS_WITH_AS(make_boundary(filed, model, rng3),
                             doctest::Contains("inside the sampling window"),
                             std::invalid_argument);
        fs::remove_all(dir);
    }
}

TEST_CASE("experiment sampling restricts the padded window deterministically") {
    ExperimentSpec s = quick_hard_disks("unused");
    PotentialModel model = make_model(s.model);
    auto configs = sample_experiment_configs(s, model, 5, s.seed);
    REQUIRE(configs.size() == 5);
    bool annulus_seen = false;
    for (const auto& cfg : configs) {
        CHECK(cfg.window.n == s.n);
        CHECK_NOTHROW(cfg.validate());
        for (const Particle& p : cfg.interior) CHECK(sup_norm(p.x) <= s.n);
        for (const Particle& p : cfg.boundary) {
            CHECK(sup_norm(p.x) > s.n);
            CHECK(sup_norm(p.x) <= 9.0);  // annulus of the padded window
            annulus_seen = true;
        }
        // hard-core validity survives the split
        auto all = cfg.all();
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j)
                CHECK_FALSE(model.in_hard_core(*all[i], *all[j]));
    }
    CHECK(annulus_seen);

    auto again = sample_experiment_configs(s, model, 5, s.seed);
    REQUIRE(again.size() == configs.size());
    for (size_t k = 0; k < configs.size(); ++k) {
        REQUIRE(again[k].interior.size() == configs[k].interior.size());
        for (size_t i = 0; i < configs[k].interior.size(); ++i) {
            CHECK(again[k].interior[i].x[0] == configs[k].interior[i].x[0]);
            CHECK(again[k].interior[i].x[1] == configs[k].interior[i].x[1]);
        }
    }

    // worker fan-out stays deterministic (ordered reduce over worker chunks)
    ExperimentSpec w = s;
    w.workers = 2;
    auto fan1 = sample_experiment_configs(w, model, 5, w.seed);
    auto fan2 = sample_experiment_configs(w, model, 5, w.seed);
    REQUIRE(fan1.size() == 5);
    REQUIRE(fan2.size() == 5);
    for (size_t k = 0; k < fan1.size(); ++k) {
        REQUIRE(fan1[k].interior.size() == fan2[k].interior.size());
        for (size_t i = 0; i < fan1[k].interior.size(); ++i)
            CHECK(fan1[k].interior[i].x[0] == fan2[k].interior[i].x[0]);
    }
}

TEST_CASE("property suite passes on dilute hard disks and reports its shape") {
    std::string dir = tmp_dir();
    ExperimentSpec s = quick_hard_disks(dir);
    ExperimentReport rep = run_property_suite(s);

    CHECK(rep.pass);
    CHECK(rep.name == s.name);
    CHECK(rep.samples == s.samples);
    CHECK(rep.replay_artifact.empty());
    CHECK(rep.good_fraction >= 0.0);
    CHECK(rep.good_fraction <= 1.0);
    CHECK(rep.central_shift == shift_proposal(0.0, s.n, s.c));

    std::set<std::string> names;
    for (const auto& c : rep.checks) names.insert(c.name);
    for (const char* want : {"boundary-fixed", "monotone-clusters", "rigid-pairs", "lipschitz",
                             "round-trip", "good-shift-central", "good-fraction", "phi-mean"})
        CHECK(names.count(want) == 1);
    for (const auto& c : rep.checks)
        if (c.kind == "hard") CHECK(c.pass);

    json j = rep.to_json();
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("spec").at("model").get<std::string>() == "hard_core");
    CHECK(j.contains("wall_clock_ms"));
    fs::remove_all(dir);
}

TEST_CASE("reports are byte-identical across reruns up to the wall clock") {
    std::string dir = tmp_dir();
    ExperimentSpec s = quick_hard_disks(dir);
    json a = run_property_suite(s).to_json();
    json b = run_property_suite(s).to_json();
    a.erase("wall_clock_ms");
    b.erase("wall_clock_ms");
    CHECK(a.dump() == b.dump());

    ExperimentSpec other = s;
    other.seed = 100;
    json c = run_property_suite(other).to_json();
    c.erase("wall_clock_ms");
    CHECK(a.dump() != c.dump());
    fs::remove_all(dir);
}

TEST_CASE("single hard checks can be re-run standalone") {
    ExperimentSpec s = quick_hard_disks("unused");
    PotentialModel model = make_model(s.model);
    SmoothDecomposition d = smooth_decompose(model, s.dopt);
    TransformParams p = TransformParams::for_decomposition(d, s.n, s.c, s.delta);

    MarkedConfiguration cfg;
    cfg.window.n = s.n;
    Particle a;
    a.id = 0;
    a.x = Vec2(1.0, 2.0);
    cfg.interior.push_back(a);

    CHECK(hard_check_names(false).size() == 5);
    CHECK(hard_check_names(true).size() == 6);
    for (const auto& nm : hard_check_names(true)) {
        CAPTURE(nm);
        CHECK_FALSE(run_hard_check(nm, cfg, p, d).has_value());
    }
    CHECK_THROWS_WITH_AS(run_hard_check("nope", cfg, p, d), doctest::Contains("unknown check"),
                         std::invalid_argument);
}

TEST_CASE("replay artifacts round-trip and re-run their check") {
    std::string dir = tmp_dir();
    ExperimentSpec s = quick_hard_disks(dir);

    MarkedConfiguration cfg;
    cfg.window.n = s.n;
    Particle a;
    a.id = 4;
    a.x = Vec2(-2.0, 1.0);
    cfg.interior.push_back(a);

    std::string path = write_replay_artifact(s, cfg, "round-trip", "synthetic note");
    CHECK(fs::exists(path));
    ReplayOutcome out = replay_artifact(path);
    CHECK(out.check == "round-trip");
    CHECK_FALSE(out.reproduced);  // the transform is correct, so nothing reproduces
    CHECK(out.detail.empty());

    std::string bogus = write_replay_artifact(s, cfg, "nope", "bad check name");
    CHECK_THROWS_WITH_AS(replay_artifact(bogus), doctest::Contains("unknown check"),
                         std::invalid_argument);
    fs::remove_all(dir);
}

TEST_CASE("density identity holds on the exactly-sampled tiny box") {
    ExperimentSpec s;
    s.name = "tiny-density";
    s.model = ModelSpec::hard_core(0.5);
    s.n = 2.0;
    s.pad = 0.0;
    s.z = 0.008;
    s.c = 0.02;
    s.delta = 0.1;
    s.dopt.gamma = 2.0 / 3.0;
    s.exact_sampler = true;
    s.k_max = 4;
    s.samples = 2000;
    s.seed = 5150;
    ExperimentReport rep = run_density_check(s, bundled_functionals(s));

    REQUIRE(rep.density.size() == 4);
    CHECK(rep.pass);
    for (const auto& row : rep.density) {
        CAPTURE(row.functional);
        CHECK(row.pass);
        CHECK(std::abs(row.diff) <= 3.0 * row.combined_se);
    }
    CHECK(rep.density[0].functional == "const-one");
    CHECK(rep.density[0].rhs == 1.0);
    CHECK(rep.density[0].rhs_se == 0.0);
    CHECK(std::abs(rep.density[0].lhs - 1.0) <= 3.0 * rep.density[0].lhs_se + 1e-12);
    // hard disks carry no smooth tail, so the edge process is empty
    CHECK(rep.density[2].functional == "edge-count");
    CHECK(rep.density[2].lhs == 0.0);
    CHECK(rep.density[2].rhs == 0.0);
}

TEST_CASE("diagnostics experiment: trivial models, zero amplitude, smooth tails") {
    ExperimentSpec s = quick_hard_disks("unused");
    s.samples = 6;
    ExperimentReport rep = run_diagnostics_experiment(s);
    CHECK(rep.pass);
    CHECK(rep.mean_beta_s1 == 0.0);  // no smooth part: the energy defect vanishes
    CHECK(rep.mean_s2 >= 0.0);
    REQUIRE(rep.checks.size() == 2);
    CHECK(rep.checks[0].name == "mean-beta-s1");
    CHECK(rep.checks[1].name == "mean-s2");

    ExperimentSpec zero = s;
    zero.c = 0.0;
    ExperimentReport rz = run_diagnostics_experiment(zero);
    CHECK(rz.pass);
    CHECK(rz.mean_beta_s1 == 0.0);
    CHECK(rz.mean_s2 == 0.0);
    REQUIRE(rz.checks.size() == 3);
    CHECK(rz.checks[2].name == "zero-amplitude-identity");
    CHECK(rz.checks[2].kind == "hard");
    CHECK(rz.checks[2].pass);

    ExperimentSpec well = s;
    well.name = "quick-well";
    well.model = ModelSpec::well(0.5, 1.0, 0.3, 0.4, 3.0);
    well.samples = 4;
    ExperimentReport rw = run_diagnostics_experiment(well);
    CHECK(rw.mean_beta_s1 >= 0.0);
    CHECK(std::isfinite(rw.mean_beta_s1));
    CHECK(std::isfinite(rw.mean_s2));
}

TEST_CASE("displacement table scales with the window and collapses at zero amplitude") {
    ExperimentSpec s = quick_hard_disks("unused");
    s.samples = 4;
    std::vector<double> sizes = {16.0, 32.0};
    auto rows = run_displacement_experiment(s, sizes);
    REQUIRE(rows.size() == 2);
    for (size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].n == sizes[k]);
        CHECK(rows[k].log_n == std::log(sizes[k]));
        CHECK(rows[k].central_shift == shift_proposal(0.0, sizes[k], s.c));
        CHECK(rows[k].central_shift_sq == rows[k].central_shift * rows[k].central_shift);
        CHECK(rows[k].good_fraction >= 0.0);
        CHECK(rows[k].good_fraction <= 1.0);
        CHECK(rows[k].samples == s.samples);
    }
    CHECK(rows[1].central_shift > rows[0].central_shift);

    std::string csv = displacement_csv(rows);
    CHECK(csv.rfind("n,log_n,central_shift,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

    ExperimentSpec zero = s;
    zero.c = 0.0;
    auto flat = run_displacement_experiment(zero, {16.0});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].central_shift == 0.0);
    CHECK(flat[0].mean_abs_shift_central == 0.0);

    CHECK_THROWS_WITH_AS(run_displacement_experiment(s, {32.0, 16.0}),
                         doctest::Contains("strictly increasing"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(run_displacement_experiment(s, {}),
                         doctest::Contains("at least one window"), std::invalid_argument);
}

TEST_CASE("property suite covers the interaction-free recipe and spin models") {
    std::string dir = tmp_dir();
    ExperimentSpec s = recipe("poisson-sanity");
    s.samples = 6;
    s.mc.burn_in = 2000;
    s.mc.thin = 50;
    s.n = 8.0;
    s.out_dir = dir;
    ExperimentReport rep = run_property_suite(s);
    CHECK(rep.pass);
    CHECK(rep.good_fraction == 1.0);

    ExperimentSpec wr = recipe("widom-rowlinson");
    wr.samples = 4;
    wr.mc.burn_in = 2000;
    wr.mc.thin = 50;
    wr.n = 8.0;
    wr.out_dir = dir;
    ExperimentReport rep2 = run_property_suite(wr);
    CHECK(rep2.pass);
    fs::remove_all(dir);
}

TEST_CASE("configurations survive the jsonl round trip bit-exactly") {
    std::string dir = tmp_dir();
    Rng rng(1234);
    MarkedConfiguration cfg = sample_poisson(0.3, 4.0, SpinLaw::direction(), rng);
    Particle b;
    b.id = 500;
    b.x = Vec2(5.125, -4.75);
    b.spin = Spin::direction(0.771234567891234);
    cfg.boundary.push_back(b);
    if (cfg.interior.size() >= 2) cfg.edges.insert(cfg.interior[0].id, cfg.interior[1].id);

    std::string path = dir + "/cfgs.jsonl";
    write_configs_jsonl(path, {cfg});
    auto back = read_configs_jsonl(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].window.n == cfg.window.n);
    REQUIRE(back[0].interior.size() == cfg.interior.size());
    for (size_t i = 0; i < cfg.interior.size(); ++i) {
        CHECK(back[0].interior[i].id == cfg.interior[i].id);
        CHECK(back[0].interior[i].x[0] == cfg.interior[i].x[0]);
        CHECK(back[0].interior[i].x[1] == cfg.interior[i].x[1]);
        CHECK(back[0].interior[i].spin == cfg.interior[i].spin);
    }
    REQUIRE(back[0].boundary.size() == 1);
    CHECK(back[0].boundary[0].spin == b.spin);
    CHECK(back[0].edges.pairs() == cfg.edges.pairs());
    fs::remove_all(dir);
}
