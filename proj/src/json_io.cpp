#include "sti/io/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace sti {

json region_to_json(const Region& region) {
    const Lattice& lat = region.lattice();
    json j;
    j["format"] = 1;
    j["lattice"] = {{"d", lat.dimension()},
                    {"n", lat.halfwidth()},
                    {"side", lat.side()},
                    {"boundary", lat.boundary() == SpatialBoundary::periodic ? "periodic" : "free"}};
    j["beta"] = region.beta();
    j["topology"] = region.topology() == TimeTopology::circle ? "circle" : "interval";
    json lines = json::array();
    for (std::int32_t v = 0; v < lat.vertex_count(); ++v) {
        json pieces = json::array();
        for (const auto& p : region.vertex_line(v).pieces()) pieces.push_back({p.a, p.b});
        lines.push_back({{"vertex", v}, {"pieces", pieces}});
    }
    j["vertex_lines"] = lines;
    return j;
}

Region region_from_json(const json& j) {
    if (j.at("format").get<int>() != 1) throw std::invalid_argument("unknown region format");
    const auto& jl = j.at("lattice");
    Lattice lat = jl.at("boundary").get<std::string>() == "periodic"
                      ? Lattice(jl.at("d").get<int>(), jl.at("n").get<int>(),
                                SpatialBoundary::periodic)
                      : (jl.at("n").get<int>() * 2 + 1 == jl.at("side").get<int>()
                             ? Lattice(jl.at("d").get<int>(), jl.at("n").get<int>(),
                                       SpatialBoundary::free)
                             : Lattice::chain(jl.at("side").get<int>()));
    TimeTopology top = j.at("topology").get<std::string>() == "circle" ? TimeTopology::circle
                                                                       : TimeTopology::interval;
    Region region(lat, j.at("beta").get<double>(), top, false);
    for (const auto& line : j.at("vertex_lines")) {
        std::int32_t v = line.at("vertex").get<std::int32_t>();
        std::vector<IntervalSet::Piece> pieces;
        for (const auto& p : line.at("pieces"))
            pieces.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        region.mutable_vertex_line(v) =
            IntervalSet::from_pieces(top, region.beta(), std::move(pieces));
    }
    region.rebuild_edges();
    return region;
}

json configuration_to_json(const Configuration& c) {
    json j;
    j["format"] = 1;
    json b = json::array(), g = json::array(), d = json::array();
    for (const auto& x : c.bridges) b.push_back({x.edge, x.t});
    for (const auto& x : c.ghosts) g.push_back({x.vertex, x.t});
    for (const auto& x : c.deaths) d.push_back({x.vertex, x.t});
    j["bridges"] = b;
    j["ghosts"] = g;
    j["deaths"] = d;
    return j;
}

Configuration configuration_from_json(const json& j) {
    if (j.at("format").get<int>() != 1) throw std::invalid_argument("unknown configuration format");
    Configuration c;
    for (const auto& x : j.at("bridges"))
        c.bridges.push_back({x.at(0).get<std::int32_t>(), x.at(1).get<double>()});
    for (const auto& x : j.at("ghosts"))
        c.ghosts.push_back({x.at(0).get<std::int32_t>(), x.at(1).get<double>()});
    for (const auto& x : j.at("deaths"))
        c.deaths.push_back({x.at(0).get<std::int32_t>(), x.at(1).get<double>()});
    return c;
}

json backbone_to_json(const Backbone& bb) {
    json paths = json::array();
    for (const auto& p : bb.paths) {
        json steps = json::array();
        for (const auto& s : p.steps)
            steps.push_back({{"vertex", s.vertex},
                             {"from", s.from},
                             {"to", s.to},
                             {"increasing", s.increasing}});
        paths.push_back({{"start", {p.start.vertex, p.start.time}},
                         {"end", {p.end.vertex, p.end.time}},
                         {"to_ghost", p.to_ghost},
                         {"steps", steps}});
    }
    return json{{"format", 1}, {"paths", paths}};
}

json estimate_to_json(const Estimate& e) {
    return json{{"value", e.value},
                {"std_error", e.std_error},
                {"n_samples", e.n_samples},
                {"exact", e.exact}};
}

json checkpoint_to_json(const SpinWorld& world, std::uint64_t rng_seed) {
    json lines = json::array();
    for (std::int32_t v = 0; v < world.lattice().vertex_count(); ++v)
        lines.push_back({{"spin0", world.spin0(v)}, {"flips", world.flips(v)}});
    return json{{"format", 1},
                {"sweeps", world.sweep_count()},
                {"rng_seed", rng_seed},
                {"lines", lines}};
}

void checkpoint_into_world(const json& j, SpinWorld& world) {
    if (j.at("format").get<int>() != 1) throw std::invalid_argument("unknown checkpoint format");
    std::vector<int> spin0;
    std::vector<std::vector<double>> flips;
    for (const auto& line : j.at("lines")) {
        spin0.push_back(line.at("spin0").get<int>());
        flips.push_back(line.at("flips").get<std::vector<double>>());
    }
    world.set_state(std::move(spin0), std::move(flips), j.at("sweeps").get<std::int64_t>());
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << text;
}

}  // namespace sti
