#include "snn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "snn/random.hpp"

namespace snn {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("topology: ") + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

} // namespace

void TopologyConfig::validate() const {
    require(num_layers >= 2, "num_layers must be >= 2");
    require(layer.width >= 1 && layer.height >= 1, "layer dimensions must be >= 1");
    require(kernel_ff >= 1 && kernel_ff % 2 == 1, "kernel_ff must be odd and >= 1");
    require(kernel_lat >= 1 && kernel_lat % 2 == 1, "kernel_lat must be odd and >= 1");
    require(is_probability(p_keep_ff), "p_keep_ff must lie in [0,1]");
    require(is_probability(p_keep_lat), "p_keep_lat must lie in [0,1]");
    require(is_probability(inhibitory_fraction), "inhibitory_fraction must lie in [0,1]");
    require(w_init_max_exc > 0.0 && std::isfinite(w_init_max_exc), "w_init_max_exc must be > 0");
    require(w_init_max_inh_mag > 0.0 && std::isfinite(w_init_max_inh_mag), "w_init_max_inh_mag must be > 0");
    require(w_init_min_exc >= 0.0 && w_init_min_exc < w_init_max_exc, "w_init_min_exc must lie in [0, w_init_max_exc)");
    require(w_init_min_inh_mag >= 0.0 && w_init_min_inh_mag < w_init_max_inh_mag,
            "w_init_min_inh_mag must lie in [0, w_init_max_inh_mag)");
    require(double(layer.size()) * num_layers < 4.0e9, "network too large for 32-bit neuron ids");
}

SynapseTable::SynapseTable(std::vector<std::uint64_t> row_ptr, std::vector<std::uint64_t> lat_begin,
                           std::vector<NeuronId> pre, std::vector<double> weight)
    : row_ptr_(std::move(row_ptr)), lat_begin_(std::move(lat_begin)), pre_(std::move(pre)),
      weight_(std::move(weight)) {
    if (row_ptr_.size() != lat_begin_.size() + 1 || pre_.size() != weight_.size() ||
        row_ptr_.back() != pre_.size() || row_ptr_.front() != 0)
        throw std::invalid_argument("synapse table: inconsistent CSR arrays");
    for (std::size_t i = 0; i < lat_begin_.size(); ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1] || lat_begin_[i] < row_ptr_[i] || lat_begin_[i] > row_ptr_[i + 1])
            throw std::invalid_argument("synapse table: malformed row " + std::to_string(i));
        for (auto e = row_ptr_[i]; e < row_ptr_[i + 1]; ++e) {
            if (pre_[e] >= lat_begin_.size())
                throw std::invalid_argument("synapse table: pre id out of range in row " + std::to_string(i));
            if (e > row_ptr_[i] && pre_[e] <= pre_[e - 1])
                throw std::invalid_argument("synapse table: row " + std::to_string(i) + " not canonical");
        }
    }
}

std::size_t SynapseTable::feed_forward_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < lat_begin_.size(); ++i) n += lat_begin_[i] - row_ptr_[i];
    return n;
}

bool SynapseTable::same_structure(const SynapseTable& other) const {
    return row_ptr_ == other.row_ptr_ && lat_begin_ == other.lat_begin_ && pre_ == other.pre_;
}

OutgoingView Network::outgoing(bool include_lateral) const {
    const auto& t = synapses;
    const std::size_t n = t.neuron_count();
    OutgoingView view;
    view.offsets.assign(n + 1, 0);
    auto pre = t.pre_ids();
    auto end_of = [&](NeuronId post) { return include_lateral ? t.row_end(post) : t.lat_begin(post); };
    for (NeuronId post = 0; post < n; ++post)
        for (auto e = t.row_begin(post); e < end_of(post); ++e) ++view.offsets[pre[e] + 1];
    std::partial_sum(view.offsets.begin(), view.offsets.end(), view.offsets.begin());
    view.entries.resize(view.offsets.back());
    std::vector<std::uint64_t> cursor(view.offsets.begin(), view.offsets.end() - 1);
    // Posts are visited ascending, so each pre's list comes out ascending by post.
    for (NeuronId post = 0; post < n; ++post)
        for (auto e = t.row_begin(post); e < end_of(post); ++e) view.entries[cursor[pre[e]]++] = e;
    return view;
}

std::vector<Coord> kernel_targets(const LayerSpec& layer, Coord center, std::uint32_t side) {
    if (center.row >= layer.height || center.col >= layer.width)
        throw std::invalid_argument("kernel_targets: center out of bounds");
    if (side == 0 || side % 2 == 0) throw std::invalid_argument("kernel_targets: side must be odd");
    const std::int64_t half = side / 2;
    const std::int64_t r0 = std::max<std::int64_t>(0, std::int64_t(center.row) - half);
    const std::int64_t r1 = std::min<std::int64_t>(layer.height - 1, std::int64_t(center.row) + half);
    const std::int64_t c0 = std::max<std::int64_t>(0, std::int64_t(center.col) - half);
    const std::int64_t c1 = std::min<std::int64_t>(layer.width - 1, std::int64_t(center.col) + half);
    std::vector<Coord> out;
    out.reserve(std::size_t((r1 - r0 + 1) * (c1 - c0 + 1)));
    for (auto r = r0; r <= r1; ++r)
        for (auto c = c0; c <= c1; ++c) out.push_back({std::uint32_t(r), std::uint32_t(c)});
    return out;
}

Network build_network(const TopologyConfig& config) {
    Xoshiro256 rng(config.seed);
    return build_network(config, rng);
}

Network build_network(const TopologyConfig& config, Xoshiro256& rng) {
    config.validate();
    Network net;
    net.config = config;
    const std::size_t per_layer = config.layer.size();
    const std::size_t total = per_layer * config.num_layers;
    net.polarity.assign(total, Polarity::Excitatory);
    net.params.assign(total, NeuronParams{});

    const auto n_inh = static_cast<std::size_t>(std::llround(config.inhibitory_fraction * double(per_layer)));
    std::vector<std::uint32_t> order(per_layer);
    for (std::uint32_t layer = 0; layer < config.num_layers; ++layer) {
        const NeuronId base = NeuronId(layer * per_layer);
        std::iota(order.begin(), order.end(), 0u);
        for (std::size_t i = 0; i < n_inh; ++i) {
            const auto j = i + rng.bounded(per_layer - i);
            std::swap(order[i], order[j]);
            net.polarity[base + order[i]] = Polarity::Inhibitory;
        }
        for (std::size_t i = 0; i < per_layer; ++i) {
            const double r = rng.uniform();
            auto& p = net.params[base + i];
            p.c = -65.0 + 15.0 * r * r;
            p.d = 2.0 - 6.0 * r * r;
        }
    }

    // Outgoing edges in draw order; then a stable counting sort by post.
    struct Edge {
        NeuronId post;
        NeuronId pre;
        double weight;
        SynapseKind kind;
    };
    std::vector<Edge> edges;
    const auto draw_weight = [&](Polarity pol) {
        const double u = 1.0 - rng.uniform(); // (0, 1]
        if (pol == Polarity::Excitatory)
            return config.w_init_min_exc + (config.w_init_max_exc - config.w_init_min_exc) * u;
        return -(config.w_init_min_inh_mag + (config.w_init_max_inh_mag - config.w_init_min_inh_mag) * u);
    };
    const auto& dims = config.layer;
    for (std::uint32_t layer = 0; layer < config.num_layers; ++layer) {
        const NeuronId base = NeuronId(layer * per_layer);
        for (std::uint32_t row = 0; row < dims.height; ++row) {
            for (std::uint32_t col = 0; col < dims.width; ++col) {
                const NeuronId pre = base + row * dims.width + col;
                const Polarity pol = net.polarity[pre];
                if (layer + 1 < config.num_layers) {
                    const NeuronId next = NeuronId(base + per_layer);
                    for (const auto& c : kernel_targets(dims, {row, col}, config.kernel_ff)) {
                        if (rng.uniform() < config.p_keep_ff)
                            edges.push_back({next + c.row * dims.width + c.col, pre, draw_weight(pol),
                                             SynapseKind::FeedForward});
                    }
                }
                for (const auto& c : kernel_targets(dims, {row, col}, config.kernel_lat)) {
                    const NeuronId post = base + c.row * dims.width + c.col;
                    if (post == pre) continue;
                    if (rng.uniform() < config.p_keep_lat)
                        edges.push_back({post, pre, draw_weight(pol), SynapseKind::Lateral});
                }
            }
        }
    }

    std::vector<std::uint64_t> row_ptr(total + 1, 0);
    std::vector<std::uint64_t> ff_count(total, 0);
    for (const auto& e : edges) {
        ++row_ptr[e.post + 1];
        if (e.kind == SynapseKind::FeedForward) ++ff_count[e.post];
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    std::vector<std::uint64_t> lat_begin(total);
    for (std::size_t i = 0; i < total; ++i) lat_begin[i] = row_ptr[i] + ff_count[i];
    std::vector<NeuronId> pre(edges.size());
    std::vector<double> weight(edges.size());
    std::vector<std::uint64_t> cursor(row_ptr.begin(), row_ptr.end() - 1);
    // Edges arrive with ascending pre for a fixed post (pre-major iteration),
    // and FF pres precede lateral pres numerically, so rows end up canonical.
    for (const auto& e : edges) {
        const auto slot = cursor[e.post]++;
        pre[slot] = e.pre;
        weight[slot] = e.weight;
    }
    net.synapses = SynapseTable(std::move(row_ptr), std::move(lat_begin), std::move(pre), std::move(weight));
    return net;
}

} // namespace snn
