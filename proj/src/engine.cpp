#include "snn/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace snn {

namespace {

constexpr std::size_t kPlasticityChunk = 256;

// Runs fn(i) for i in [begin, end). Workers only split the index range; each
// index writes only its own outputs, so the result is independent of the
// worker count. The exception from the lowest failing index is rethrown.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, std::uint32_t workers, F&& fn) {
    if (workers <= 1 || end - begin < 2) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::size_t error_index = end;
    const auto count = static_cast<std::ptrdiff_t>(end - begin);
#pragma omp parallel for num_threads(workers) schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const std::size_t i = begin + std::size_t(k);
        try {
            fn(i);
        } catch (...) {
#pragma omp critical(snn_parallel_error)
            if (i < error_index) {
                error_index = i;
                error = std::current_exception();
            }
        }
    }
    if (error) std::rethrow_exception(error);
}

} // namespace

Digest frames_digest(const FrameSequence& frames) {
    std::vector<std::uint8_t> buf;
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(std::uint8_t(v >> (8 * i)));
    };
    put32(frames.window_ms);
    put32(frames.layer.width);
    put32(frames.layer.height);
    put32(std::uint32_t(frames.frames.size()));
    for (const auto& f : frames.frames) buf.insert(buf.end(), f.begin(), f.end());
    return sha256(buf);
}

Simulation::Simulation(SimulationConfig cfg, std::optional<FrameSequence> stimulus)
    : cfg_(std::move(cfg)), rng_(cfg_.topology.seed) {
    cfg_.validate();
    net_ = build_network(cfg_.topology, rng_);
    const auto n = net_.neuron_count();
    state_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        state_[i].v = -65.0;
        state_[i].u = net_.params[i].b * state_[i].v;
    }
    spikes_prev_.assign(n, 0);
    spikes_curr_.assign(n, 0);
    traces_ = TraceState(n);
    counts_ = SpikeCountWindow(cfg_.engine.count_window_ms, n);
    if (stimulus) {
        if (stimulus->layer != cfg_.topology.layer)
            throw std::invalid_argument("stimulus frames do not match layer dimensions");
        if (stimulus->window_ms != cfg_.engine.window_ms)
            throw std::invalid_argument("stimulus window_ms does not match engine window_ms");
        for (const auto& f : stimulus->frames)
            if (f.size() != cfg_.topology.layer.size()) throw std::invalid_argument("stimulus frame has wrong size");
        stimulus_digest_ = frames_digest(*stimulus);
        stimulus_ = std::move(stimulus);
    }
}

const std::vector<std::uint8_t>* Simulation::frame_for_step(std::uint64_t step) const {
    if (!stimulus_ || stimulus_->frames.empty()) return nullptr;
    // One step is 1 ms, so the frame index is elapsed_ms / window_ms.
    const auto index = step / cfg_.engine.window_ms;
    const auto size = stimulus_->frames.size();
    if (index < size) return &stimulus_->frames[index];
    if (cfg_.engine.loop_stimulus) return &stimulus_->frames[index % size];
    return nullptr;
}

bool Simulation::exhausted() const {
    if (!stimulus_ || cfg_.engine.loop_stimulus) return false;
    return step_ / cfg_.engine.window_ms >= stimulus_->frames.size();
}

void Simulation::integrate_layer(std::uint32_t layer, const std::vector<std::uint8_t>* frame) {
    const auto first = net_.first_of_layer(layer);
    const auto n = net_.layer_size();
    const double threshold = cfg_.engine.v_threshold;
    std::vector<double> input;
    if (layer == 0) {
        input = frame ? inject_input_layer(*frame, cfg_.topology.layer, cfg_.engine.input_gain)
                      : std::vector<double>(n, 0.0);
    }
    parallel_for(0, n, workers_, [&](std::size_t i) {
        const NeuronId id = NeuronId(first + i);
        const double current = layer == 0 ? input[i] : synaptic_current(id, net_.synapses, spikes_prev_);
        try {
            spikes_curr_[id] = izhikevich_step(state_[id], net_.params[id], current, threshold) ? 1 : 0;
        } catch (const NumericFault& f) {
            throw NumericFault(std::string(f.what()) + " (neuron " + std::to_string(id) + ", step " +
                                   std::to_string(step_) + ")",
                               id, step_);
        }
    });
}

void Simulation::plasticity_phase() {
    const auto& pc = cfg_.plasticity;
    decay_traces(traces_, kStepMs, pc.tau_trace);
    const NeuronId begin = net_.first_of_layer(1);
    const NeuronId end = NeuronId(net_.neuron_count());
    const std::size_t chunks = (end - begin + kPlasticityChunk - 1) / kPlasticityChunk;
    auto range = [&](std::size_t c) {
        const auto first = NeuronId(begin + c * kPlasticityChunk);
        return PostRange{first, std::min<NeuronId>(end, NeuronId(first + kPlasticityChunk))};
    };
    if (cfg_.engine.train) {
        parallel_for(0, chunks, workers_, [&](std::size_t c) {
            apply_stdp(net_.synapses, net_.polarity, spikes_curr_, traces_.value, pc, range(c));
            apply_istdp(net_.synapses, net_.polarity, spikes_curr_, traces_.value, pc, range(c));
        });
    }
    bump_traces(traces_, spikes_curr_);
    if (cfg_.engine.train) {
        parallel_for(0, chunks, workers_,
                     [&](std::size_t c) { clamp_weights(net_.synapses, net_.polarity, pc, range(c)); });
    }
}

StepReport Simulation::step(RasterLog* raster) {
    const auto t0 = std::chrono::steady_clock::now();
    StepReport report;
    report.step = step_;
    const auto* frame = frame_for_step(step_);
    for (std::uint32_t layer = 0; layer < net_.num_layers(); ++layer) integrate_layer(layer, frame);
    plasticity_phase();

    report.spikes_per_layer.assign(net_.num_layers(), 0);
    for (std::size_t i = 0; i < spikes_curr_.size(); ++i)
        if (spikes_curr_[i]) ++report.spikes_per_layer[net_.layer_of(NeuronId(i))];
    if (raster) raster->append_step(step_, spikes_curr_);
    report.window = update_spike_counts(counts_, spikes_curr_, step_);

    std::swap(spikes_prev_, spikes_curr_);
    ++step_;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

void Simulation::save_checkpoint(const std::filesystem::path& path) const { write_file_bytes(path, save()); }

Simulation Simulation::load_checkpoint(const std::filesystem::path& path, std::optional<FrameSequence> stimulus) {
    return load(read_file_bytes(path), std::move(stimulus));
}

std::vector<double> mean_exc_entropy(const Network& net) {
    const auto map = layer_entropy_map(net);
    std::vector<double> out(net.num_layers());
    for (std::uint32_t l = 0; l < net.num_layers(); ++l) out[l] = layer_mean_defined(map.exc, map.k_exc, net, l);
    return out;
}

std::string format_window_line(const CompletedWindow& w, const Network& net, std::span<const double> mean_entropy) {
    std::vector<std::uint64_t> totals(net.num_layers(), 0);
    for (std::size_t i = 0; i < w.counts.size(); ++i) totals[net.layer_of(NeuronId(i))] += w.counts[i];
    std::string line = "window " + std::to_string(w.index) + " spikes";
    for (auto t : totals) line += " " + std::to_string(t);
    line += " mean_e_exc";
    char buf[32];
    for (double e : mean_entropy) {
        std::snprintf(buf, sizeof buf, " %.6f", e);
        line += buf;
    }
    return line;
}

FrameSequence load_stimulus(const std::filesystem::path& path, const SimulationConfig& cfg) {
    return batch_frames(read_events(path), cfg.engine.window_ms, cfg.topology.layer, cfg.engine.downscale);
}

namespace {

void write_maps(const Network& net, const std::filesystem::path& dir, const std::string& suffix) {
    const auto map = layer_entropy_map(net);
    const auto n = net.layer_size();
    for (std::uint32_t l = 0; l < net.num_layers(); ++l) {
        const auto first = net.first_of_layer(l);
        std::span<const double> exc(map.exc.data() + first, n);
        std::span<const double> inh(map.inh.data() + first, n);
        const auto layer_name = "L" + std::to_string(l + 1);
        export_map_pgm(exc, net.config.layer, dir / ("entropy_exc_" + layer_name + suffix + ".pgm"));
        export_map_pgm(inh, net.config.layer, dir / ("entropy_inh_" + layer_name + suffix + ".pgm"));
    }
}

} // namespace

RunSummary run(Simulation& sim, std::uint64_t steps, RasterLog& raster, const RunHooks& hooks) {
    RunSummary summary;
    const auto& net = sim.network();
    summary.spikes_per_layer.assign(net.num_layers(), 0);
    summary.initial_mean_exc_entropy = mean_exc_entropy(net);
    const bool artifacts = !hooks.out_dir.empty();
    if (artifacts) std::filesystem::create_directories(hooks.out_dir / "maps");

    for (std::uint64_t s = 0; s < steps; ++s) {
        if (sim.exhausted()) break;
        auto report = sim.step(&raster);
        ++summary.steps_run;
        for (std::size_t l = 0; l < report.spikes_per_layer.size(); ++l)
            summary.spikes_per_layer[l] += report.spikes_per_layer[l];
        if (report.window) {
            const auto entropy = mean_exc_entropy(net);
            if (hooks.summary) *hooks.summary << format_window_line(*report.window, net, entropy) << '\n';
            summary.windows.push_back(std::move(*report.window));
        }
        const auto now = sim.step_count();
        if (artifacts && hooks.entropy_every_ms && now % hooks.entropy_every_ms == 0) {
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "_t%08llu", static_cast<unsigned long long>(now));
            write_maps(net, hooks.out_dir / "maps", suffix);
        }
        if (artifacts && hooks.checkpoint_every && now % hooks.checkpoint_every == 0)
            sim.save_checkpoint(hooks.out_dir / ("checkpoint_" + std::to_string(now) + ".snnc"));
    }

    summary.final_mean_exc_entropy = mean_exc_entropy(net);
    const auto raster_text = encode_raster_csv(raster);
    summary.raster_digest = to_hex(sha256(raster_text));
    const auto image = sim.save();
    summary.state_digest = to_hex(sha256(image));

    if (artifacts) {
        write_maps(net, hooks.out_dir, "");
        {
            std::ofstream out(hooks.out_dir / "raster.csv", std::ios::trunc);
            out << raster_text;
            if (!out) throw std::runtime_error("write failed for raster.csv");
        }
        export_counts_csv(summary.windows, hooks.out_dir / "counts.csv");
        write_file_bytes(hooks.out_dir / "checkpoint.snnc", image);
        nlohmann::json j;
        j["steps_run"] = summary.steps_run;
        j["final_step"] = sim.step_count();
        j["spikes_per_layer"] = summary.spikes_per_layer;
        j["initial_mean_e_exc"] = summary.initial_mean_exc_entropy;
        j["final_mean_e_exc"] = summary.final_mean_exc_entropy;
        j["raster_sha256"] = summary.raster_digest;
        j["state_sha256"] = summary.state_digest;
        std::ofstream out(hooks.out_dir / "summary.json", std::ios::trunc);
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("write failed for summary.json");
    }
    return summary;
}

RunSummary run(const RunConfig& cfg, std::ostream* summary_out) {
    cfg.validate();
    std::optional<FrameSequence> stimulus;
    if (!cfg.run.stimulus.empty()) stimulus = load_stimulus(cfg.run.stimulus, cfg.sim);
    Simulation sim(cfg.sim, std::move(stimulus));
    sim.set_workers(cfg.run.workers);
    RasterLog raster;
    RunHooks hooks;
    hooks.summary = summary_out;
    hooks.out_dir = cfg.run.out_dir;
    hooks.entropy_every_ms = cfg.run.entropy_every_ms;
    hooks.checkpoint_every = cfg.run.checkpoint_every;
    return run(sim, cfg.run.steps, raster, hooks);
}

} // namespace snn
