#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snn/topology.hpp"

namespace snn {

/// Simulation step length in ms. The integrator below is written for it.
inline constexpr double kStepMs = 1.0;
inline constexpr double kDefaultThreshold = -30.0;
inline constexpr double kDefaultInputGain = 20.0;

struct NeuronState {
    double v = -65.0;
    double u = -13.0;
    bool operator==(const NeuronState&) const = default;
};

/// Raised when a neuron's state or input current stops being finite.
class NumericFault : public std::runtime_error {
public:
    NumericFault(const std::string& what, NeuronId neuron, std::uint64_t step)
        : std::runtime_error(what), neuron_(neuron), step_(step) {}
    NeuronId neuron() const { return neuron_; }
    std::uint64_t step() const { return step_; }

private:
    NeuronId neuron_;
    std::uint64_t step_;
};

/// One 1 ms Izhikevich update. v takes two forward-Euler half steps of
/// 0.5 ms, then u takes one full step from the updated v. A neuron whose v
/// reaches `threshold` fires: v <- c, u <- u + d.
///
/// The arithmetic sequence is fixed; do not reassociate. Throws NumericFault
/// (neuron id 0, step 0; callers attach context) on non-finite input/state.
bool izhikevich_step(NeuronState& state, const NeuronParams& params, double current,
                     double threshold = kDefaultThreshold);

/// Sum of weight * fired(pre) over the incoming row of `post`, in storage
/// order. `prev_spikes` holds the flags of the previous step.
double synaptic_current(NeuronId post, const SynapseTable& table, std::span<const std::uint8_t> prev_spikes);

/// Input current for the first layer: gain * frame cell (cells are 0 or 1).
std::vector<double> inject_input_layer(std::span<const std::uint8_t> frame, const LayerSpec& layer,
                                       double gain = kDefaultInputGain);

/// Resting equilibrium of the RS model for given (a, b): the stable root of
/// 0.04 v^2 + (5 - b) v + 140 = 0 with u = b v.
NeuronState resting_state(const NeuronParams& params);

} // namespace snn
