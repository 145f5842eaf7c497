#include <doctest.h>

#include <cmath>

#include "snn/plasticity.hpp"
#include "snn/random.hpp"

using namespace snn;

namespace {

// Neuron 0 (pre) feeds neuron 1 (post) with one FF synapse.
struct Pair {
    SynapseTable table{{0, 0, 1}, {0, 1}, {0}, {1.0}};
    std::vector<Polarity> polarity{Polarity::Excitatory, Polarity::Excitatory};
    PlasticityConfig cfg;

    double w() const { return table.weights()[0]; }
    void set_w(double x) { table.weights()[0] = x; }
    void apply(std::vector<std::uint8_t> spikes, std::vector<double> traces) {
        apply_stdp(table, polarity, spikes, traces, cfg, {0, 2});
        apply_istdp(table, polarity, spikes, traces, cfg, {0, 2});
    }
};

// Trace of a neuron that fired five steps earlier, after this step's decay.
const double kTrace5 = 2.0 * std::exp(-5.0 / 20.0);

} // namespace

TEST_CASE("trace decays by exp(-dt/tau) and saturates at the maximum") {
    TraceState t(3);
    std::vector<std::uint8_t> spikes{1, 0, 1};
    bump_traces(t, spikes);
    CHECK(t.value == std::vector<double>{2.0, 0.0, 2.0});
    decay_traces(t, 1.0, 20.0);
    CHECK(t.value[0] == 2.0 * std::exp(-1.0 / 20.0));
    for (int i = 0; i < 19; ++i) decay_traces(t, 1.0, 20.0);
    CHECK(t.value[0] == doctest::Approx(0.7357588823428847));
    decay_and_bump_traces(t, spikes, 1.0, 20.0);
    CHECK(t.value[2] == kTraceMax); // bump resets rather than adds
}

TEST_CASE("post after pre potentiates") {
    Pair p;
    p.apply({0, 1}, {kTrace5, 0.0});
    CHECK(p.w() - 1.0 == doctest::Approx(0.015576015661428098).epsilon(1e-12));
}

TEST_CASE("pre after post depresses") {
    Pair p;
    p.apply({1, 0}, {0.0, kTrace5});
    CHECK(p.w() - 1.0 == doctest::Approx(-0.01869121879371372).epsilon(1e-12));
}

TEST_CASE("inverted pairing swaps the roles") {
    Pair p;
    p.cfg.inverted_pairing = true;
    p.apply({0, 1}, {kTrace5, 0.0});
    CHECK(p.w() < 1.0);
    Pair q;
    q.cfg.inverted_pairing = true;
    q.apply({1, 0}, {0.0, kTrace5});
    CHECK(q.w() > 1.0);
}

TEST_CASE("no spikes, no change") {
    Pair p;
    p.apply({0, 0}, {2.0, 2.0});
    CHECK(p.w() == 1.0);
}

TEST_CASE("STDP clamps at the cap and keeps zero at zero") {
    Pair p;
    p.set_w(7.0);
    p.apply({0, 1}, {2.0, 0.0});
    CHECK(p.w() == 7.0);
    p.set_w(0.0);
    p.apply({0, 1}, {2.0, 0.0});
    CHECK(p.w() == 0.0);
}

TEST_CASE("STDP ignores lateral synapses and inhibitory pres") {
    Pair lat;
    lat.table = SynapseTable({0, 0, 1}, {0, 0}, {0}, {1.0});
    lat.apply({0, 1}, {2.0, 0.0});
    CHECK(lat.w() == 1.0);

    Pair inh;
    inh.polarity[0] = Polarity::Inhibitory;
    inh.set_w(-1.0);
    inh.apply({0, 1}, {2.0, 0.0});
    CHECK(inh.w() == -1.0); // iSTDP is off by default
}

TEST_CASE("iSTDP is additive on the magnitude") {
    Pair p;
    p.polarity[0] = Polarity::Inhibitory;
    p.cfg.istdp_enabled = true;
    p.set_w(-1.0);
    CHECK(p.cfg.istdp_alpha() == doctest::Approx(0.2));
    p.apply({1, 0}, {0.0, 0.0});
    CHECK(p.w() == doctest::Approx(-1.0 + 0.001 * 0.2)); // pre alone weakens
    p.set_w(-1.0);
    p.apply({0, 1}, {1.5, 0.0});
    CHECK(p.w() == doctest::Approx(-1.0 - 0.0015)); // post strengthens
    p.set_w(0.0);
    p.apply({1, 0}, {0.0, 0.0});
    CHECK(p.w() == 0.0); // magnitude clamped at 0
    p.set_w(-30.0);
    p.apply({0, 1}, {2.0, 0.0});
    CHECK(p.w() == -30.0);
}

TEST_CASE("iSTDP skips inhibitory posts") {
    Pair p;
    p.polarity = {Polarity::Inhibitory, Polarity::Inhibitory};
    p.cfg.istdp_enabled = true;
    p.set_w(-1.0);
    p.apply({0, 1}, {2.0, 0.0});
    CHECK(p.w() == -1.0);
}

TEST_CASE("clamp projects every weight onto its polarity interval") {
    PlasticityConfig cfg;
    CHECK(clamp_weight(9.0, Polarity::Excitatory, cfg) == 7.0);
    CHECK(clamp_weight(-1.0, Polarity::Excitatory, cfg) == 0.0);
    CHECK(clamp_weight(-31.0, Polarity::Inhibitory, cfg) == -30.0);
    CHECK(clamp_weight(0.5, Polarity::Inhibitory, cfg) == 0.0);
    SynapseTable t({0, 0, 2}, {0, 1}, {0, 1}, {12.0, 3.0});
    std::vector<Polarity> pol{Polarity::Excitatory, Polarity::Inhibitory};
    clamp_weights(t, pol, cfg);
    CHECK(t.weights()[0] == 7.0);
    CHECK(t.weights()[1] == 0.0);
}

TEST_CASE("random spike trains keep weights in bounds") {
    Pair p;
    p.cfg.istdp_enabled = true;
    auto rng = random_stream(9);
    TraceState tr(2);
    for (int s = 0; s < 5000; ++s) {
        std::vector<std::uint8_t> spikes{std::uint8_t(rng.uniform() < 0.3), std::uint8_t(rng.uniform() < 0.3)};
        decay_traces(tr, 1.0, 20.0);
        p.apply(spikes, tr.value);
        bump_traces(tr, spikes);
        REQUIRE(p.w() >= 0.0);
        REQUIRE(p.w() <= 7.0);
        for (double x : tr.value) REQUIRE((x >= 0.0 && x <= 2.0));
    }
}

TEST_CASE("config validation") {
    PlasticityConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau_trace = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.a_ltp = -0.1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
