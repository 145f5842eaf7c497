#include <cmath>

#include "snn/engine.hpp"

namespace snn {

DenseOracle::DenseOracle(const Simulation& sim)
    : cfg_(sim.config()), layers_(sim.network().num_layers()), n_(sim.network().layer_size()),
      polarity_(sim.network().polarity), params_(sim.network().params), stimulus_(sim.stimulus()),
      step_(sim.step_count()) {
    ff_.assign(layers_ - 1, std::vector<double>(n_ * n_, 0.0));
    ff_mask_.assign(layers_ - 1, std::vector<std::uint8_t>(n_ * n_, 0));
    lat_.assign(layers_, std::vector<double>(n_ * n_, 0.0));
    const auto& t = sim.network().synapses;
    const auto pre = t.pre_ids();
    const auto w = t.weights();
    for (NeuronId post = 0; post < t.neuron_count(); ++post) {
        const std::uint32_t layer = std::uint32_t(post / n_);
        const std::size_t i = post % n_;
        for (auto e = t.row_begin(post); e < t.row_end(post); ++e) {
            const std::size_t j = pre[e] % n_;
            if (t.kind(post, e) == SynapseKind::FeedForward) {
                ff(layer, i, j) = w[e];
                ff_mask_[layer - 1][i * n_ + j] = 1;
            } else {
                lat(layer, i, j) = w[e];
            }
        }
    }
    const auto total = n_ * layers_;
    v_.resize(total);
    u_.resize(total);
    for (std::size_t k = 0; k < total; ++k) {
        v_[k] = sim.states()[k].v;
        u_[k] = sim.states()[k].u;
    }
    trace_ = sim.traces().value;
    prev_.assign(sim.last_spikes().begin(), sim.last_spikes().end());
    curr_.assign(total, 0);
}

void DenseOracle::step(RasterLog* raster) {
    const auto& eng = cfg_.engine;
    const auto& pc = cfg_.plasticity;

    const std::vector<std::uint8_t>* frame = nullptr;
    if (stimulus_ && !stimulus_->frames.empty()) {
        const auto k = step_ / eng.window_ms;
        if (k < stimulus_->frames.size()) frame = &stimulus_->frames[k];
        else if (eng.loop_stimulus) frame = &stimulus_->frames[k % stimulus_->frames.size()];
    }

    for (std::uint32_t l = 0; l < layers_; ++l) {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t id = l * n_ + i;
            double current = 0.0;
            if (l == 0) {
                current = (frame && (*frame)[i]) ? eng.input_gain : 0.0;
            } else {
                for (std::size_t j = 0; j < n_; ++j) current += ff(l, i, j) * prev_[(l - 1) * n_ + j];
                for (std::size_t j = 0; j < n_; ++j) current += lat(l, i, j) * prev_[l * n_ + j];
            }
            double v = v_[id];
            double u = u_[id];
            v += 0.5 * (0.04 * v * v + 5.0 * v + 140.0 - u + current);
            v += 0.5 * (0.04 * v * v + 5.0 * v + 140.0 - u + current);
            u += params_[id].a * (params_[id].b * v - u);
            curr_[id] = 0;
            if (v >= eng.v_threshold) {
                v = params_[id].c;
                u += params_[id].d;
                curr_[id] = 1;
            }
            v_[id] = v;
            u_[id] = u;
        }
    }

    const double decay = std::exp(-1.0 / pc.tau_trace);
    for (auto& x : trace_) x *= decay;

    if (eng.train) {
        const double alpha = 2.0 * (pc.istdp_target_rate / 1000.0) * pc.tau_trace;
        for (std::uint32_t l = 1; l < layers_; ++l) {
            for (std::size_t i = 0; i < n_; ++i) {
                const std::size_t post = l * n_ + i;
                for (std::size_t j = 0; j < n_; ++j) {
                    if (!ff_mask_[l - 1][i * n_ + j]) continue;
                    const std::size_t pre = (l - 1) * n_ + j;
                    double& w = ff(l, i, j);
                    if (polarity_[pre] == Polarity::Excitatory) {
                        if (!pc.inverted_pairing) {
                            if (curr_[pre]) w -= pc.a_ltd * w * trace_[post];
                            if (curr_[post]) w += pc.a_ltp * w * trace_[pre];
                        } else {
                            if (curr_[pre]) w += pc.a_ltp * w * trace_[post];
                            if (curr_[post]) w -= pc.a_ltd * w * trace_[pre];
                        }
                        if (w < 0.0) w = 0.0;
                        if (w > pc.w_max_exc) w = pc.w_max_exc;
                    } else if (pc.istdp_enabled && polarity_[post] == Polarity::Excitatory &&
                               (curr_[pre] || curr_[post])) {
                        double mag = -w;
                        if (curr_[pre]) mag += pc.istdp_eta * (trace_[post] - alpha);
                        if (curr_[post]) mag += pc.istdp_eta * trace_[pre];
                        if (mag < 0.0) mag = 0.0;
                        if (mag > pc.w_max_inh_mag) mag = pc.w_max_inh_mag;
                        w = -mag;
                    }
                }
            }
        }
    }

    for (std::size_t k = 0; k < curr_.size(); ++k)
        if (curr_[k]) trace_[k] = 2.0;

    if (eng.train) {
        auto clamp_block = [&](std::vector<double>& block, std::uint32_t pre_layer) {
            for (std::size_t i = 0; i < n_; ++i) {
                for (std::size_t j = 0; j < n_; ++j) {
                    double& w = block[i * n_ + j];
                    if (polarity_[pre_layer * n_ + j] == Polarity::Excitatory) {
                        if (w < 0.0) w = 0.0;
                        if (w > pc.w_max_exc) w = pc.w_max_exc;
                    } else {
                        if (w > 0.0) w = 0.0;
                        if (w < -pc.w_max_inh_mag) w = -pc.w_max_inh_mag;
                    }
                }
            }
        };
        for (std::uint32_t l = 1; l < layers_; ++l) clamp_block(ff_[l - 1], l - 1);
        for (std::uint32_t l = 0; l < layers_; ++l) clamp_block(lat_[l], l);
    }

    if (raster) raster->append_step(step_, curr_);
    std::swap(prev_, curr_);
    ++step_;
}

std::vector<double> DenseOracle::weights_as_sparse(const SynapseTable& table) const {
    std::vector<double> out(table.size());
    const auto pre = table.pre_ids();
    for (NeuronId post = 0; post < table.neuron_count(); ++post) {
        const std::uint32_t layer = std::uint32_t(post / n_);
        const std::size_t i = post % n_;
        for (auto e = table.row_begin(post); e < table.row_end(post); ++e) {
            const std::size_t j = pre[e] % n_;
            out[e] = table.kind(post, e) == SynapseKind::FeedForward ? ff_[layer - 1][i * n_ + j]
                                                                     : lat_[layer][i * n_ + j];
        }
    }
    return out;
}

} // namespace snn
