#include "snn/dynamics.hpp"

#include <cmath>

namespace snn {

bool izhikevich_step(NeuronState& state, const NeuronParams& params, double current, double threshold) {
    double v = state.v;
    double u = state.u;
    if (!std::isfinite(v) || !std::isfinite(u) || !std::isfinite(current))
        throw NumericFault("non-finite neuron state or input current", 0, 0);

    v += 0.5 * (0.04 * v * v + 5.0 * v + 140.0 - u + current);
    v += 0.5 * (0.04 * v * v + 5.0 * v + 140.0 - u + current);
    u += params.a * (params.b * v - u);

    if (!std::isfinite(v) || !std::isfinite(u)) throw NumericFault("neuron state diverged", 0, 0);

    const bool fired = v >= threshold;
    if (fired) {
        v = params.c;
        u += params.d;
    }
    state.v = v;
    state.u = u;
    return fired;
}

double synaptic_current(NeuronId post, const SynapseTable& table, std::span<const std::uint8_t> prev_spikes) {
    const auto pre = table.pre_ids();
    const auto w = table.weights();
    double sum = 0.0;
    for (auto e = table.row_begin(post), end = table.row_end(post); e < end; ++e)
        if (prev_spikes[pre[e]]) sum += w[e];
    return sum;
}

std::vector<double> inject_input_layer(std::span<const std::uint8_t> frame, const LayerSpec& layer, double gain) {
    if (frame.size() != layer.size())
        throw std::invalid_argument("inject_input_layer: frame has " + std::to_string(frame.size()) +
                                    " cells, layer has " + std::to_string(layer.size()));
    std::vector<double> current(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) current[i] = frame[i] ? gain : 0.0;
    return current;
}

NeuronState resting_state(const NeuronParams& params) {
    const double p = 5.0 - params.b;
    const double disc = p * p - 4.0 * 0.04 * 140.0;
    const double v = (-p - std::sqrt(disc)) / (2.0 * 0.04);
    return {v, params.b * v};
}

} // namespace snn
