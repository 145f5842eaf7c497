#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "snn/engine.hpp"

namespace snn {

namespace {

using Clock = std::chrono::steady_clock;

struct Timed {
    double seconds = 0.0;
    std::uint64_t synapse_events = 0;
};

// Number of synapses each neuron's spike drives into a current computation.
// Layer-0 lateral synapses are excluded: layer 0 is driven by input only.
std::vector<std::uint64_t> delivering_fanout(const Network& net) {
    std::vector<std::uint64_t> fan(net.neuron_count(), 0);
    const auto& t = net.synapses;
    const auto pre = t.pre_ids();
    for (NeuronId post = net.first_of_layer(1); post < t.neuron_count(); ++post)
        for (auto e = t.row_begin(post); e < t.row_end(post); ++e) ++fan[pre[e]];
    return fan;
}

Timed time_sparse(const SimulationConfig& cfg, const std::optional<FrameSequence>& stimulus, bool train,
                  const BenchOptions& opts) {
    auto c = cfg;
    c.engine.train = train;
    c.engine.loop_stimulus = true;
    Simulation sim(c, stimulus);
    const auto fan = delivering_fanout(sim.network());
    for (std::uint64_t s = 0; s < opts.warmup; ++s) sim.step();
    Timed t;
    const auto t0 = Clock::now();
    for (std::uint64_t s = 0; s < opts.steps; ++s) {
        sim.step();
        const auto spikes = sim.last_spikes();
        for (std::size_t i = 0; i < spikes.size(); ++i)
            if (spikes[i]) t.synapse_events += fan[i];
    }
    t.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return t;
}

} // namespace

BenchReport benchmark(const SimulationConfig& cfg, const std::optional<FrameSequence>& stimulus,
                      const BenchOptions& opts) {
    BenchReport r;
    if (opts.steps == 0) return r;
    r.steps = opts.steps;
    {
        const auto net = build_network(cfg.topology);
        r.neurons = net.neuron_count();
        r.synapses = net.synapses.size();
    }
    const auto off = time_sparse(cfg, stimulus, false, opts);
    const auto on = time_sparse(cfg, stimulus, true, opts);
    r.steps_per_s_plastic_off = double(opts.steps) / off.seconds;
    r.steps_per_s_plastic_on = double(opts.steps) / on.seconds;
    r.synapse_events_per_s = double(off.synapse_events) / off.seconds;
    r.plasticity_overhead = r.steps_per_s_plastic_off / r.steps_per_s_plastic_on;

    if (opts.compare_oracle && opts.oracle_steps > 0) {
        auto c = cfg;
        c.engine.train = false;
        c.engine.loop_stimulus = true;
        Simulation sim(c, stimulus);
        for (std::uint64_t s = 0; s < opts.warmup; ++s) sim.step();
        DenseOracle oracle(sim);
        const auto t0 = Clock::now();
        for (std::uint64_t s = 0; s < opts.oracle_steps; ++s) oracle.step();
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        r.oracle_steps_per_s = double(opts.oracle_steps) / seconds;
        r.sparse_vs_oracle = r.steps_per_s_plastic_off / *r.oracle_steps_per_s;
    }
    return r;
}

void print_bench_table(const BenchReport& r, std::ostream& out) {
    if (r.empty()) {
        out << "no steps requested; nothing to report\n";
        return;
    }
    char line[160];
    auto row = [&](const char* name, double value, const char* unit) {
        std::snprintf(line, sizeof line, "%-28s %16.3f %s\n", name, value, unit);
        out << line;
    };
    std::snprintf(line, sizeof line, "%-28s %16llu\n", "steps", static_cast<unsigned long long>(r.steps));
    out << line;
    std::snprintf(line, sizeof line, "%-28s %16llu\n", "neurons", static_cast<unsigned long long>(r.neurons));
    out << line;
    std::snprintf(line, sizeof line, "%-28s %16llu\n", "synapses", static_cast<unsigned long long>(r.synapses));
    out << line;
    row("rate (plasticity off)", r.steps_per_s_plastic_off, "steps/s");
    row("rate (plasticity on)", r.steps_per_s_plastic_on, "steps/s");
    row("synapse events", r.synapse_events_per_s, "events/s");
    row("plasticity overhead", r.plasticity_overhead, "x (off/on)");
    if (r.oracle_steps_per_s) {
        row("dense oracle rate", *r.oracle_steps_per_s, "steps/s");
        row("sparse vs oracle", *r.sparse_vs_oracle, "x");
    }
}

void write_bench_csv(const BenchReport& r, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "metric,value\n";
    if (!r.empty()) {
        out << "steps," << r.steps << '\n';
        out << "neurons," << r.neurons << '\n';
        out << "synapses," << r.synapses << '\n';
        out << "steps_per_s_plastic_off," << r.steps_per_s_plastic_off << '\n';
        out << "steps_per_s_plastic_on," << r.steps_per_s_plastic_on << '\n';
        out << "synapse_events_per_s," << r.synapse_events_per_s << '\n';
        out << "plasticity_overhead," << r.plasticity_overhead << '\n';
        if (r.oracle_steps_per_s) {
            out << "oracle_steps_per_s," << *r.oracle_steps_per_s << '\n';
            out << "sparse_vs_oracle," << *r.sparse_vs_oracle << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace snn
