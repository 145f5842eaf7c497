#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snn/analytics.hpp"
#include "snn/config.hpp"
#include "snn/digest.hpp"
#include "snn/dynamics.hpp"
#include "snn/events.hpp"
#include "snn/plasticity.hpp"
#include "snn/random.hpp"
#include "snn/topology.hpp"

namespace snn {

struct StepReport {
    std::uint64_t step = 0;
    std::vector<std::uint32_t> spikes_per_layer;
    double wall_seconds = 0.0;
    std::optional<CompletedWindow> window; // spike-count window closed by this step
};

/// Checkpoint load/validation failure.
class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Digest of a frame sequence's content (window, dims, cells).
Digest frames_digest(const FrameSequence& frames);

/// The sparse simulation engine.
///
/// Per step: layer-0 currents come from the current frame, deeper layers
/// gather from the previous step's spike buffer, every neuron integrates,
/// then (when training) traces decay, STDP and iSTDP run on this step's
/// spikes with pre-bump traces, traces are bumped, weights are clamped, and
/// the buffers swap. Results do not depend on the worker count.
class Simulation {
public:
    explicit Simulation(SimulationConfig cfg, std::optional<FrameSequence> stimulus = std::nullopt);

    StepReport step(RasterLog* raster = nullptr);

    /// True once a non-looping stimulus has run out of frames. Zero-input
    /// simulations (no stimulus) are never exhausted.
    bool exhausted() const;

    void set_workers(std::uint32_t workers) { workers_ = workers == 0 ? 1 : workers; }
    std::uint32_t workers() const { return workers_; }

    const SimulationConfig& config() const { return cfg_; }
    const Network& network() const { return net_; }
    Network& network() { return net_; }
    std::uint64_t step_count() const { return step_; }
    std::span<const NeuronState> states() const { return state_; }
    std::span<NeuronState> states() { return state_; }
    /// Flags of the most recently completed step.
    std::span<const std::uint8_t> last_spikes() const { return spikes_prev_; }
    const TraceState& traces() const { return traces_; }
    const SpikeCountWindow& count_window() const { return counts_; }
    const std::optional<FrameSequence>& stimulus() const { return stimulus_; }
    const Xoshiro256& rng() const { return rng_; }

    /// Frame for a given step, or nullptr for zero input.
    const std::vector<std::uint8_t>* frame_for_step(std::uint64_t step) const;

    /// Checkpoint image ("SNNC"); see checkpoint.cpp for the layout.
    std::vector<std::uint8_t> save() const;
    /// Rebuilds a simulation from a checkpoint. The stimulus, if the
    /// checkpoint was taken with one, must have the same content digest.
    static Simulation load(std::span<const std::uint8_t> bytes,
                           std::optional<FrameSequence> stimulus = std::nullopt);

    void save_checkpoint(const std::filesystem::path& path) const;
    static Simulation load_checkpoint(const std::filesystem::path& path,
                                      std::optional<FrameSequence> stimulus = std::nullopt);

    /// SHA-256 of save(): a digest of the full dynamic state.
    Digest state_digest() const { return sha256(save()); }

private:
    Simulation() = default;
    void integrate_layer(std::uint32_t layer, const std::vector<std::uint8_t>* frame);
    void plasticity_phase();

    SimulationConfig cfg_;
    Network net_;
    std::vector<NeuronState> state_;
    std::vector<std::uint8_t> spikes_prev_;
    std::vector<std::uint8_t> spikes_curr_;
    TraceState traces_;
    std::uint64_t step_ = 0;
    Xoshiro256 rng_;
    SpikeCountWindow counts_;
    std::optional<FrameSequence> stimulus_;
    Digest stimulus_digest_{};
    std::uint32_t workers_ = 1;
};

/// Header summary of a checkpoint, for inspection. Validates the checksum.
struct CheckpointInfo {
    std::uint16_t version = 0;
    std::uint64_t step = 0;
    std::uint32_t layers = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint64_t neurons = 0;
    std::uint64_t synapses = 0;
    std::string config_digest;
};
CheckpointInfo inspect_checkpoint(std::span<const std::uint8_t> bytes);

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Straightforward dense re-implementation of the step semantics, used only
/// to cross-check the sparse engine. Weights live in full per-block matrices
/// (absent synapses are 0 and masked for the additive iSTDP rule).
class DenseOracle {
public:
    /// Snapshot of `sim`'s current state and stimulus.
    explicit DenseOracle(const Simulation& sim);

    void step(RasterLog* raster = nullptr);

    std::uint64_t step_count() const { return step_; }
    std::span<const std::uint8_t> last_spikes() const { return prev_; }
    /// Weights in the order of `table`'s entries (table must be the
    /// structure the oracle was built from).
    std::vector<double> weights_as_sparse(const SynapseTable& table) const;

private:
    double& ff(std::uint32_t layer, std::size_t post, std::size_t pre) {
        return ff_[layer - 1][post * n_ + pre];
    }
    double& lat(std::uint32_t layer, std::size_t post, std::size_t pre) { return lat_[layer][post * n_ + pre]; }

    SimulationConfig cfg_;
    std::uint32_t layers_ = 0;
    std::size_t n_ = 0;
    std::vector<Polarity> polarity_;
    std::vector<NeuronParams> params_;
    std::vector<std::vector<double>> ff_;  // [layer-1][post * n + pre]
    std::vector<std::vector<std::uint8_t>> ff_mask_;
    std::vector<std::vector<double>> lat_; // [layer][post * n + pre]
    std::vector<double> v_, u_, trace_;
    std::vector<std::uint8_t> prev_, curr_;
    std::optional<FrameSequence> stimulus_;
    std::uint64_t step_ = 0;
};

struct RunSummary {
    std::uint64_t steps_run = 0;
    std::vector<std::uint64_t> spikes_per_layer;
    std::vector<double> initial_mean_exc_entropy;
    std::vector<double> final_mean_exc_entropy;
    std::vector<CompletedWindow> windows;
    std::string raster_digest;
    std::string state_digest;
};

struct RunHooks {
    std::ostream* summary = nullptr;        // one line per completed count window
    std::filesystem::path out_dir;          // empty: write no artifacts
    std::uint32_t entropy_every_ms = 300;
    std::uint64_t checkpoint_every = 10000;
};

/// Steps `sim` up to `steps` times (stopping early if a non-looping
/// stimulus is exhausted), appending to `raster`, and writes artifacts.
RunSummary run(Simulation& sim, std::uint64_t steps, RasterLog& raster, const RunHooks& hooks);

/// Loads the stimulus named by the config, builds the simulation and runs.
RunSummary run(const RunConfig& cfg, std::ostream* summary = nullptr);

/// Reads a DVSE file and batches it for `cfg`'s layer and window.
FrameSequence load_stimulus(const std::filesystem::path& path, const SimulationConfig& cfg);

/// Mean E_exc per layer over neurons with at least two FF outgoing synapses.
std::vector<double> mean_exc_entropy(const Network& net);

/// One-line window summary as printed by `run`.
std::string format_window_line(const CompletedWindow& w, const Network& net, std::span<const double> mean_entropy);

struct BenchReport {
    std::uint64_t steps = 0;
    std::uint64_t neurons = 0;
    std::uint64_t synapses = 0;
    double steps_per_s_plastic_off = 0.0;
    double steps_per_s_plastic_on = 0.0;
    double synapse_events_per_s = 0.0;
    /// off / on: how much slower a training step is.
    double plasticity_overhead = 0.0;
    std::optional<double> oracle_steps_per_s;
    std::optional<double> sparse_vs_oracle;

    bool empty() const { return steps == 0; }
};

struct BenchOptions {
    std::uint64_t steps = 500;
    std::uint64_t warmup = 50;
    bool compare_oracle = false;
    std::uint64_t oracle_steps = 10;
};

/// Times the sparse engine with plasticity off and on (warmup excluded),
/// and optionally the dense oracle, on the same stimulus.
BenchReport benchmark(const SimulationConfig& cfg, const std::optional<FrameSequence>& stimulus,
                      const BenchOptions& opts);

void print_bench_table(const BenchReport& r, std::ostream& out);
void write_bench_csv(const BenchReport& r, const std::filesystem::path& path);

} // namespace snn
