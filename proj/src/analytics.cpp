#include "snn/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace snn {

double neuron_entropy(std::span<const double> weights) {
    bool any_pos = false;
    bool any_neg = false;
    std::size_t k = 0;
    double total = 0.0;
    for (double w : weights) {
        if (w > 0.0) any_pos = true;
        if (w < 0.0) any_neg = true;
        if (w != 0.0) {
            ++k;
            total += std::abs(w);
        }
    }
    if (any_pos && any_neg) throw std::invalid_argument("neuron_entropy: weights mix polarities");
    if (k <= 1 || total == 0.0) return 0.0;

    // A uniform distribution has entropy ln K exactly.
    double first = 0.0;
    bool uniform = true;
    for (double w : weights) {
        if (w == 0.0) continue;
        if (first == 0.0) first = std::abs(w);
        else if (std::abs(w) != first) {
            uniform = false;
            break;
        }
    }
    if (uniform) return 1.0;

    double h = 0.0;
    for (double w : weights) {
        if (w == 0.0) continue;
        const double p = std::abs(w) / total;
        if (p > 0.0) h -= p * std::log(p);
    }
    const double e = h / std::log(double(k));
    return std::clamp(e, 0.0, 1.0);
}

EntropyMap layer_entropy_map(const Network& net, bool include_lateral) {
    const auto view = net.outgoing(include_lateral);
    const auto w = net.synapses.weights();
    const std::size_t n = net.neuron_count();
    EntropyMap map{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<std::uint32_t>(n, 0),
                   std::vector<std::uint32_t>(n, 0)};
    std::vector<double> scratch;
    for (NeuronId i = 0; i < n; ++i) {
        scratch.clear();
        for (auto e : view.of(i)) scratch.push_back(w[e]);
        const auto k = std::uint32_t(std::count_if(scratch.begin(), scratch.end(), [](double x) { return x != 0.0; }));
        if (net.polarity[i] == Polarity::Excitatory) {
            map.exc[i] = neuron_entropy(scratch);
            map.k_exc[i] = k;
        } else {
            map.inh[i] = neuron_entropy(scratch);
            map.k_inh[i] = k;
        }
    }
    return map;
}

double layer_mean(std::span<const double> values, const Network& net, std::uint32_t layer) {
    const auto first = net.first_of_layer(layer);
    const auto n = net.layer_size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[first + i];
    return n ? sum / double(n) : 0.0;
}

double layer_mean_defined(std::span<const double> values, std::span<const std::uint32_t> degree, const Network& net,
                          std::uint32_t layer) {
    const auto first = net.first_of_layer(layer);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < net.layer_size(); ++i) {
        if (degree[first + i] < 2) continue;
        sum += values[first + i];
        ++count;
    }
    return count ? sum / double(count) : 0.0;
}

std::optional<CompletedWindow> update_spike_counts(SpikeCountWindow& window, std::span<const std::uint8_t> spikes,
                                                   std::uint64_t step) {
    std::optional<CompletedWindow> done;
    if (step >= (window.index + 1) * window.window_steps) {
        done = CompletedWindow{window.index, window.counts};
        std::fill(window.counts.begin(), window.counts.end(), 0u);
        window.index = step / window.window_steps;
    }
    for (std::size_t i = 0; i < spikes.size(); ++i)
        if (spikes[i]) ++window.counts[i];
    return done;
}

void RasterLog::append(std::uint64_t step, NeuronId neuron) {
    if (!records_.empty() && step < records_.back().step)
        throw std::invalid_argument("RasterLog: step " + std::to_string(step) + " precedes last record");
    records_.push_back({step, neuron});
}

void RasterLog::append_step(std::uint64_t step, std::span<const std::uint8_t> spikes) {
    for (std::size_t i = 0; i < spikes.size(); ++i)
        if (spikes[i]) append(step, NeuronId(i));
}

std::string encode_pgm(std::span<const double> field, const LayerSpec& layer) {
    if (field.size() != layer.size())
        throw std::invalid_argument("export_map_pgm: field size does not match layer dimensions");
    std::ostringstream out;
    out << "P2\n" << layer.width << ' ' << layer.height << "\n255\n";
    for (std::uint32_t r = 0; r < layer.height; ++r) {
        for (std::uint32_t c = 0; c < layer.width; ++c) {
            const double x = std::clamp(field[std::size_t(r) * layer.width + c], 0.0, 1.0);
            if (c) out << ' ';
            out << std::lround(255.0 * x);
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::ofstream open_text(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

} // namespace

void export_map_pgm(std::span<const double> field, const LayerSpec& layer, const std::filesystem::path& path) {
    const auto text = encode_pgm(field, layer);
    auto out = open_text(path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string encode_raster_csv(const RasterLog& log) {
    std::string text = "step,neuron_id\n";
    for (const auto& r : log.records()) {
        text += std::to_string(r.step);
        text += ',';
        text += std::to_string(r.neuron);
        text += '\n';
    }
    return text;
}

void export_raster_csv(const RasterLog& log, const std::filesystem::path& path) {
    auto out = open_text(path);
    out << encode_raster_csv(log);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void export_counts_csv(std::span<const CompletedWindow> windows, const std::filesystem::path& path) {
    auto out = open_text(path);
    out << "window,neuron_id,count\n";
    for (const auto& w : windows)
        for (std::size_t i = 0; i < w.counts.size(); ++i)
            if (w.counts[i]) out << w.index << ',' << i << ',' << w.counts[i] << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::size_t largest_top_decile_cluster(std::span<const std::uint32_t> counts, const LayerSpec& layer) {
    if (counts.size() != layer.size()) throw std::invalid_argument("cluster: count size mismatch");
    if (counts.empty()) return 0;
    std::vector<std::uint32_t> sorted(counts.begin(), counts.end());
    const std::size_t rank = (sorted.size() * 9) / 10;
    std::nth_element(sorted.begin(), sorted.begin() + std::ptrdiff_t(rank), sorted.end());
    const std::uint32_t threshold = std::max<std::uint32_t>(sorted[rank], 1);

    std::vector<std::uint8_t> seen(counts.size(), 0);
    std::vector<std::size_t> stack;
    std::size_t best = 0;
    for (std::size_t start = 0; start < counts.size(); ++start) {
        if (seen[start] || counts[start] < threshold) continue;
        std::size_t size = 0;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            const auto cell = stack.back();
            stack.pop_back();
            ++size;
            const auto r = cell / layer.width, c = cell % layer.width;
            const auto visit = [&](std::size_t next) {
                if (!seen[next] && counts[next] >= threshold) {
                    seen[next] = 1;
                    stack.push_back(next);
                }
            };
            if (r > 0) visit(cell - layer.width);
            if (r + 1 < layer.height) visit(cell + layer.width);
            if (c > 0) visit(cell - 1);
            if (c + 1 < layer.width) visit(cell + 1);
        }
        best = std::max(best, size);
    }
    return best;
}

} // namespace snn
