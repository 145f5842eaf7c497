#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snn/topology.hpp"

namespace snn {

inline constexpr double kTraceMax = 2.0;

struct PlasticityConfig {
    double a_ltp = 0.010;
    double a_ltd = 0.012;
    double tau_trace = 20.0; // ms
    double w_max_exc = 7.0;
    double w_max_inh_mag = 30.0;
    bool istdp_enabled = false;
    double istdp_eta = 0.001;
    double istdp_target_rate = 5.0; // Hz
    // Potentiate on the pre spike (scaled by the post trace) and depress on
    // the post spike, i.e. the reverse of the usual timing rule.
    bool inverted_pairing = false;

    void validate() const;

    /// Homeostatic offset for iSTDP: 2 * rate (spikes/ms) * tau.
    double istdp_alpha() const { return 2.0 * (istdp_target_rate / 1000.0) * tau_trace; }
};

/// One trace per neuron, used as both the pre and the post trace.
struct TraceState {
    std::vector<double> value;

    explicit TraceState(std::size_t n = 0) : value(n, 0.0) {}
};

/// T <- T * exp(-dt / tau) for every neuron.
void decay_traces(TraceState& traces, double dt, double tau);
/// T <- kTraceMax for every neuron that fired.
void bump_traces(TraceState& traces, std::span<const std::uint8_t> spikes);
/// decay then bump.
void decay_and_bump_traces(TraceState& traces, std::span<const std::uint8_t> spikes, double dt, double tau);

/// Range of post neurons [first, last) a plasticity pass touches.
struct PostRange {
    NeuronId first = 0;
    NeuronId last = 0;
};

/// Excitatory STDP on the FF synapses of posts in `posts` whose pre is
/// excitatory. Uses this step's spikes and pre-bump traces:
///   pre fired:  w -= a_ltd * w * T_post
///   post fired: w += a_ltp * w * T_pre
/// applied in that order, then clamped to [0, w_max_exc].
void apply_stdp(SynapseTable& table, std::span<const Polarity> polarity, std::span<const std::uint8_t> spikes,
                std::span<const double> traces, const PlasticityConfig& cfg, PostRange posts);

/// Inhibitory plasticity on FF synapses from inhibitory pres onto excitatory
/// posts. With m = |w|:
///   pre fired:  m += eta * (T_post - alpha)
///   post fired: m += eta * T_pre
/// then m is clamped to [0, w_max_inh_mag] and w = -m. No-op when disabled.
void apply_istdp(SynapseTable& table, std::span<const Polarity> polarity, std::span<const std::uint8_t> spikes,
                 std::span<const double> traces, const PlasticityConfig& cfg, PostRange posts);

/// Projects every weight in the rows of `posts` onto its polarity interval.
void clamp_weights(SynapseTable& table, std::span<const Polarity> polarity, const PlasticityConfig& cfg,
                   PostRange posts);
void clamp_weights(SynapseTable& table, std::span<const Polarity> polarity, const PlasticityConfig& cfg);

/// Scalar projection used by clamp_weights.
inline double clamp_weight(double w, Polarity pre, const PlasticityConfig& cfg) {
    if (pre == Polarity::Excitatory) return w < 0.0 ? 0.0 : (w > cfg.w_max_exc ? cfg.w_max_exc : w);
    return w > 0.0 ? 0.0 : (w < -cfg.w_max_inh_mag ? -cfg.w_max_inh_mag : w);
}

} // namespace snn
