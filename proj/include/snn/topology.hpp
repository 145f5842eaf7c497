#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace snn {

using NeuronId = std::uint32_t;

/// Dimensions of one neuron sheet. Every layer of a network shares them.
struct LayerSpec {
    std::uint32_t width = 32;
    std::uint32_t height = 32;

    std::size_t size() const { return std::size_t(width) * height; }
    bool operator==(const LayerSpec&) const = default;
};

struct Coord {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    bool operator==(const Coord&) const = default;
};

enum class Polarity : std::uint8_t { Excitatory = 0, Inhibitory = 1 };
enum class SynapseKind : std::uint8_t { FeedForward = 0, Lateral = 1 };

struct TopologyConfig {
    std::uint32_t num_layers = 3;
    LayerSpec layer{};
    std::uint32_t kernel_ff = 5;
    std::uint32_t kernel_lat = 5;
    double p_keep_ff = 0.20;
    double p_keep_lat = 0.30;
    double inhibitory_fraction = 0.20;
    // Initial weights are drawn from (min, max] (excitatory) and
    // [-max, -min) (inhibitory magnitudes).
    double w_init_max_exc = 7.0;
    double w_init_max_inh_mag = 30.0;
    double w_init_min_exc = 0.0;
    double w_init_min_inh_mag = 0.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;
};

/// Izhikevich parameters for one neuron.
struct NeuronParams {
    double a = 0.02;
    double b = 0.2;
    double c = -65.0;
    double d = 2.0;
    bool operator==(const NeuronParams&) const = default;
};

/// Incoming-indexed sparse connectivity (CSR by post neuron).
///
/// Row layout for each post neuron: feed-forward entries first, then lateral,
/// each ascending by global pre id. Because layer ids are contiguous and FF
/// pres live in the previous layer, the whole row is ascending by pre id.
/// Structure is immutable after construction; weights are mutable in place.
class SynapseTable {
public:
    SynapseTable() = default;
    SynapseTable(std::vector<std::uint64_t> row_ptr, std::vector<std::uint64_t> lat_begin,
                 std::vector<NeuronId> pre, std::vector<double> weight);

    std::size_t neuron_count() const { return lat_begin_.size(); }
    std::size_t size() const { return pre_.size(); }

    std::uint64_t row_begin(NeuronId post) const { return row_ptr_[post]; }
    std::uint64_t lat_begin(NeuronId post) const { return lat_begin_[post]; }
    std::uint64_t row_end(NeuronId post) const { return row_ptr_[post + 1]; }

    SynapseKind kind(NeuronId post, std::uint64_t entry) const {
        return entry < lat_begin_[post] ? SynapseKind::FeedForward : SynapseKind::Lateral;
    }

    std::span<const NeuronId> pre_ids() const { return pre_; }
    std::span<const double> weights() const { return weight_; }
    std::span<double> weights() { return weight_; }

    std::span<const std::uint64_t> row_ptr() const { return row_ptr_; }
    std::span<const std::uint64_t> lat_begins() const { return lat_begin_; }

    std::size_t feed_forward_count() const;

    /// Same structure (ignores weights).
    bool same_structure(const SynapseTable& other) const;
    bool operator==(const SynapseTable&) const = default;

private:
    std::vector<std::uint64_t> row_ptr_{0};
    std::vector<std::uint64_t> lat_begin_;
    std::vector<NeuronId> pre_;
    std::vector<double> weight_;
};

/// Outgoing FF view derived from a SynapseTable: for each pre neuron, the
/// table indices of its FF synapses in ascending post order.
struct OutgoingView {
    std::vector<std::uint64_t> offsets;
    std::vector<std::uint64_t> entries;

    std::span<const std::uint64_t> of(NeuronId pre) const {
        return std::span<const std::uint64_t>(entries).subspan(offsets[pre], offsets[pre + 1] - offsets[pre]);
    }
};

struct Network {
    TopologyConfig config;
    std::vector<Polarity> polarity;
    std::vector<NeuronParams> params;
    SynapseTable synapses;

    std::size_t layer_size() const { return config.layer.size(); }
    std::uint32_t num_layers() const { return config.num_layers; }
    std::size_t neuron_count() const { return polarity.size(); }
    NeuronId first_of_layer(std::uint32_t layer) const { return NeuronId(layer * layer_size()); }
    std::uint32_t layer_of(NeuronId id) const { return std::uint32_t(id / layer_size()); }

    /// FF outgoing view; with `include_lateral` the view also lists lateral
    /// fan-out (used by benchmark event counting).
    OutgoingView outgoing(bool include_lateral = false) const;
};

/// Coordinates of the side x side box around `center`, clipped at the sheet
/// border, row-major. Throws std::invalid_argument for an out-of-bounds
/// center or an even side.
std::vector<Coord> kernel_targets(const LayerSpec& layer, Coord center, std::uint32_t side);

/// Deterministic construction from (config, config.seed).
///
/// Draw order: per layer a partial Fisher-Yates shuffle picks the inhibitory
/// neurons, then one r per neuron randomizes c and d; then, layer-major and
/// pre-neuron row-major, each FF candidate (row-major in the next layer)
/// followed by each lateral candidate takes one keep draw and, if kept, one
/// weight draw.
Network build_network(const TopologyConfig& config);

class Xoshiro256;
/// As above, drawing from `rng` (seeded by the caller) and leaving it advanced.
Network build_network(const TopologyConfig& config, Xoshiro256& rng);

} // namespace snn
