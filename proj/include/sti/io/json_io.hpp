#pragma once

#include <string>

#include "json.hpp"
#include "sti/backbone/backbone.hpp"
#include "sti/domain/events.hpp"
#include "sti/domain/region.hpp"
#include "sti/mcmc/spin_world.hpp"

namespace sti {

using nlohmann::json;

// Region / Configuration golden-file schema, "format": 1
json region_to_json(const Region& region);
Region region_from_json(const json& j);

json configuration_to_json(const Configuration& c);
Configuration configuration_from_json(const json& j);

// backbone path lists for external plotting
json backbone_to_json(const Backbone& bb);

json estimate_to_json(const Estimate& e);

// mcmc checkpoint: world snapshot + generator state
struct Checkpoint {
    std::vector<int> spin0;
    std::vector<std::vector<double>> flips;
    std::int64_t sweeps = 0;
    std::uint64_t rng_seed = 0;  // stream is re-derived from (seed, sweeps)
};
json checkpoint_to_json(const SpinWorld& world, std::uint64_t rng_seed);
void checkpoint_into_world(const json& j, SpinWorld& world);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace sti
