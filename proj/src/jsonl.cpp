#include "gshift/jsonl.hpp"

#include <fstream>
#include <stdexcept>

namespace gshift {

json spin_to_json(const Spin& s) {
    switch (s.kind) {
        case SpinKind::Unit: return json{{"kind", "unit"}};
        case SpinKind::Discrete: return json{{"kind", "discrete"}, {"label", s.label}};
        case SpinKind::Scalar: return json{{"kind", "scalar"}, {"value", s.value}};
        case SpinKind::Direction: return json{{"kind", "direction"}, {"angle", s.value}};
    }
    return json{{"kind", "unit"}};
}

Spin spin_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "unit") return Spin::unit();
    if (kind == "discrete") return Spin::discrete(j.at("label").get<int>());
    if (kind == "scalar") return Spin::scalar(j.at("value").get<double>());
    if (kind == "direction") return Spin::direction(j.at("angle").get<double>());
    throw std::invalid_argument("unknown spin kind: " + kind);
}

static json particle_to_json(const Particle& p) {
    return json{{"id", p.id}, {"x", {p.x[0], p.x[1]}}, {"spin", spin_to_json(p.spin)}};
}

static Particle particle_from_json(const json& j) {
    Particle p;
    p.id = j.at("id").get<int>();
    p.x = Vec2(j.at("x").at(0).get<double>(), j.at("x").at(1).get<double>());
    p.spin = spin_from_json(j.at("spin"));
    return p;
}

json config_to_json(const MarkedConfiguration& cfg) {
    json j;
    j["window_n"] = cfg.window.n;
    j["interior"] = json::array();
    for (const Particle& p : cfg.interior) j["interior"].push_back(particle_to_json(p));
    j["boundary"] = json::array();
    for (const Particle& p : cfg.boundary) j["boundary"].push_back(particle_to_json(p));
    j["edges"] = json::array();
    for (auto [a, b] : cfg.edges.pairs()) j["edges"].push_back(json::array({a, b}));
    return j;
}

MarkedConfiguration config_from_json(const json& j) {
    MarkedConfiguration cfg;
    cfg.window.n = j.at("window_n").get<double>();
    for (const auto& pj : j.at("interior")) cfg.interior.push_back(particle_from_json(pj));
    for (const auto& pj : j.at("boundary")) cfg.boundary.push_back(particle_from_json(pj));
    for (const auto& ej : j.at("edges")) cfg.edges.insert(ej.at(0).get<int>(), ej.at(1).get<int>());
    return cfg;
}

std::string config_to_line(const MarkedConfiguration& cfg) { return config_to_json(cfg).dump(); }

MarkedConfiguration config_from_line(const std::string& line) {
    return config_from_json(json::parse(line));
}

void write_configs_jsonl(const std::string& path, const std::vector<MarkedConfiguration>& cfgs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& c : cfgs) out << config_to_line(c) << "\n";
}

std::vector<MarkedConfiguration> read_configs_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for read: " + path);
    std::vector<MarkedConfiguration> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(config_from_line(line));
    }
    return out;
}

}  // namespace gshift
