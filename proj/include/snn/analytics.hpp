#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snn/topology.hpp"

namespace snn {

/// Normalized Shannon entropy of one neuron's outgoing weights of a single
/// polarity class:
///   p_j = |w_j| / sum |w|,   E = -(1 / ln K) * sum p_j ln p_j
/// with K the number of non-zero weights. Zero weights are skipped; E is 0
/// when K <= 1. Throws std::invalid_argument on mixed signs.
double neuron_entropy(std::span<const double> weights);

/// Per-neuron excitatory-class and inhibitory-class entropies, indexed by
/// global neuron id.
struct EntropyMap {
    std::vector<double> exc;
    std::vector<double> inh;
    // Number of non-zero weights each entropy was taken over.
    std::vector<std::uint32_t> k_exc;
    std::vector<std::uint32_t> k_inh;
};

/// Entropy over each neuron's FF outgoing synapses (or all outgoing
/// synapses when `include_lateral`). The class is the pre neuron's polarity,
/// so a neuron contributes to exactly one of the two maps; the other is 0.
EntropyMap layer_entropy_map(const Network& net, bool include_lateral = false);

/// Mean of `values` over one layer's slice.
double layer_mean(std::span<const double> values, const Network& net, std::uint32_t layer);
/// Mean over the layer's neurons whose entropy is defined (K >= 2). Returns
/// 0 when there are none.
double layer_mean_defined(std::span<const double> values, std::span<const std::uint32_t> degree,
                          const Network& net, std::uint32_t layer);

/// Spike counts per neuron over half-open windows [k*W, (k+1)*W) of steps.
struct SpikeCountWindow {
    std::uint64_t window_steps = 300;
    std::uint64_t index = 0;
    std::vector<std::uint32_t> counts;

    SpikeCountWindow() = default;
    SpikeCountWindow(std::uint64_t window, std::size_t neurons) : window_steps(window), counts(neurons, 0) {}
};

struct CompletedWindow {
    std::uint64_t index = 0;
    std::vector<std::uint32_t> counts;
};

/// Closes the current window if `step` lies beyond it (returning it), then
/// counts this step's spikes into the window that contains `step`.
std::optional<CompletedWindow> update_spike_counts(SpikeCountWindow& window, std::span<const std::uint8_t> spikes,
                                                   std::uint64_t step);

struct SpikeRecord {
    std::uint64_t step = 0;
    NeuronId neuron = 0;
    bool operator==(const SpikeRecord&) const = default;
};

/// Append-only spike log; steps never decrease.
class RasterLog {
public:
    void append(std::uint64_t step, NeuronId neuron);
    void append_step(std::uint64_t step, std::span<const std::uint8_t> spikes);
    const std::vector<SpikeRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool operator==(const RasterLog&) const = default;

private:
    std::vector<SpikeRecord> records_;
};

/// Plain "P2" graymap, maxval 255, pixel = round(255 * x) with x clamped to
/// [0,1], one image row per line.
void export_map_pgm(std::span<const double> field, const LayerSpec& layer, const std::filesystem::path& path);
std::string encode_pgm(std::span<const double> field, const LayerSpec& layer);

/// "step,neuron_id" then one line per record.
std::string encode_raster_csv(const RasterLog& log);
void export_raster_csv(const RasterLog& log, const std::filesystem::path& path);

/// "window,neuron_id,count"; only non-zero counts are written.
void export_counts_csv(std::span<const CompletedWindow> windows, const std::filesystem::path& path);

/// Largest 4-connected component of cells whose count is at or above the
/// 90th-percentile count of the layer (zero-count cells never qualify).
std::size_t largest_top_decile_cluster(std::span<const std::uint32_t> layer_counts, const LayerSpec& layer);

} // namespace snn
