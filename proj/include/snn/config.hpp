#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "snn/dynamics.hpp"
#include "snn/plasticity.hpp"
#include "snn/topology.hpp"

namespace snn {

/// Engine options that affect simulation results.
struct EngineConfig {
    double input_gain = kDefaultInputGain;
    double v_threshold = kDefaultThreshold;
    std::uint32_t window_ms = 10;       // DVS batching window
    std::uint32_t downscale = 1;        // sensor pixels per layer cell, per axis
    bool train = true;
    bool loop_stimulus = false;
    std::uint32_t count_window_ms = 300; // spike-count (PSTH) window

    void validate() const;
};

/// Everything the simulation state is a function of (besides the stimulus).
struct SimulationConfig {
    TopologyConfig topology;
    PlasticityConfig plasticity;
    EngineConfig engine;

    void validate() const;
};

/// Run-level options: how long, where from, where to, how often.
struct RunOptions {
    std::uint64_t steps = 1000;
    std::string stimulus;       // DVSE file; empty = zero-input mode
    std::string out_dir = "out";
    std::uint32_t entropy_every_ms = 300; // 0 disables periodic maps
    std::uint64_t checkpoint_every = 10000; // 0 disables periodic checkpoints
    std::uint32_t workers = 1;

    void validate() const;
};

struct RunConfig {
    SimulationConfig sim;
    RunOptions run;

    void validate() const {
        sim.validate();
        run.validate();
    }
};

/// Config file or value error. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const SimulationConfig& cfg);
nlohmann::json to_json(const RunConfig& cfg);

/// Strict parsing: unknown keys and wrongly typed values raise ConfigError.
/// Missing keys keep their defaults.
SimulationConfig simulation_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical text used for digests: sorted keys, no whitespace.
std::string canonical_text(const SimulationConfig& cfg);

} // namespace snn
