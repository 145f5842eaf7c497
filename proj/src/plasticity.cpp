#include "snn/plasticity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snn {

void PlasticityConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("plasticity: ") + what);
    };
    require(a_ltp >= 0.0 && a_ltd >= 0.0, "rates must be >= 0");
    require(istdp_eta >= 0.0 && istdp_target_rate >= 0.0, "iSTDP rates must be >= 0");
    require(tau_trace > 0.0, "tau_trace must be > 0");
    require(w_max_exc > 0.0 && w_max_inh_mag > 0.0, "weight caps must be > 0");
}

void decay_traces(TraceState& traces, double dt, double tau) {
    const double factor = std::exp(-dt / tau);
    for (auto& t : traces.value) t *= factor;
}

void bump_traces(TraceState& traces, std::span<const std::uint8_t> spikes) {
    for (std::size_t i = 0; i < spikes.size(); ++i)
        if (spikes[i]) traces.value[i] = kTraceMax;
}

void decay_and_bump_traces(TraceState& traces, std::span<const std::uint8_t> spikes, double dt, double tau) {
    decay_traces(traces, dt, tau);
    bump_traces(traces, spikes);
}

void apply_stdp(SynapseTable& table, std::span<const Polarity> polarity, std::span<const std::uint8_t> spikes,
                std::span<const double> traces, const PlasticityConfig& cfg, PostRange posts) {
    const auto pre = table.pre_ids();
    auto w = table.weights();
    for (NeuronId post = posts.first; post < posts.last; ++post) {
        const bool post_fired = spikes[post];
        const double t_post = traces[post];
        for (auto e = table.row_begin(post), end = table.lat_begin(post); e < end; ++e) {
            const NeuronId j = pre[e];
            if (polarity[j] != Polarity::Excitatory) continue;
            const bool pre_fired = spikes[j];
            if (!pre_fired && !post_fired) continue;
            double x = w[e];
            if (!cfg.inverted_pairing) {
                if (pre_fired) x -= cfg.a_ltd * x * t_post;
                if (post_fired) x += cfg.a_ltp * x * traces[j];
            } else {
                if (pre_fired) x += cfg.a_ltp * x * t_post;
                if (post_fired) x -= cfg.a_ltd * x * traces[j];
            }
            w[e] = x < 0.0 ? 0.0 : (x > cfg.w_max_exc ? cfg.w_max_exc : x);
        }
    }
}

void apply_istdp(SynapseTable& table, std::span<const Polarity> polarity, std::span<const std::uint8_t> spikes,
                 std::span<const double> traces, const PlasticityConfig& cfg, PostRange posts) {
    if (!cfg.istdp_enabled) return;
    const double alpha = cfg.istdp_alpha();
    const auto pre = table.pre_ids();
    auto w = table.weights();
    for (NeuronId post = posts.first; post < posts.last; ++post) {
        if (polarity[post] != Polarity::Excitatory) continue;
        const bool post_fired = spikes[post];
        const double t_post = traces[post];
        for (auto e = table.row_begin(post), end = table.lat_begin(post); e < end; ++e) {
            const NeuronId j = pre[e];
            if (polarity[j] != Polarity::Inhibitory) continue;
            const bool pre_fired = spikes[j];
            if (!pre_fired && !post_fired) continue;
            double mag = -w[e];
            if (pre_fired) mag += cfg.istdp_eta * (t_post - alpha);
            if (post_fired) mag += cfg.istdp_eta * traces[j];
            mag = mag < 0.0 ? 0.0 : (mag > cfg.w_max_inh_mag ? cfg.w_max_inh_mag : mag);
            w[e] = -mag;
        }
    }
}

void clamp_weights(SynapseTable& table, std::span<const Polarity> polarity, const PlasticityConfig& cfg,
                   PostRange posts) {
    const auto pre = table.pre_ids();
    auto w = table.weights();
    for (auto e = table.row_begin(posts.first), end = table.row_begin(posts.last); e < end; ++e)
        w[e] = clamp_weight(w[e], polarity[pre[e]], cfg);
}

void clamp_weights(SynapseTable& table, std::span<const Polarity> polarity, const PlasticityConfig& cfg) {
    clamp_weights(table, polarity, cfg, {0, NeuronId(table.neuron_count())});
}

} // namespace snn
