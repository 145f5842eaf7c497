#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "snn/engine.hpp"

using namespace snn;

namespace {

SimulationConfig small_config(std::uint64_t seed = 3) {
    SimulationConfig c;
    c.topology.num_layers = 3;
    c.topology.layer = {12, 12};
    c.topology.seed = seed;
    c.plasticity.istdp_enabled = true;
    return c;
}

FrameSequence bar_frames(const SimulationConfig& c, std::uint32_t duration_ms = 600) {
    MovingBarParams p;
    p.width = std::uint16_t(c.topology.layer.width);
    p.height = std::uint16_t(c.topology.layer.height);
    p.bar_width = 3;
    p.speed_px_per_s = 60.0;
    p.duration_ms = duration_ms;
    return batch_frames(gen_moving_bar(p), c.engine.window_ms, c.topology.layer);
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("initial state") {
    Simulation sim(small_config());
    CHECK(sim.step_count() == 0);
    for (const auto& s : sim.states()) {
        CHECK(s.v == -65.0);
        CHECK(s.u == -13.0);
    }
    for (auto f : sim.last_spikes()) CHECK(f == 0);
}

TEST_CASE("zero input leaves every layer silent") {
    Simulation sim(small_config());
    const auto before = std::vector<double>(sim.network().synapses.weights().begin(),
                                            sim.network().synapses.weights().end());
    RasterLog raster;
    for (int s = 0; s < 300; ++s) sim.step(&raster);
    CHECK(raster.size() == 0);
    // No spikes means no plasticity.
    CHECK(std::equal(before.begin(), before.end(), sim.network().synapses.weights().begin()));
    CHECK_FALSE(sim.exhausted());
}

TEST_CASE("stimulus drives the input layer and propagates") {
    const auto c = small_config();
    const auto frames = bar_frames(c);
    Simulation sim(c, frames);
    std::vector<std::uint64_t> totals(3, 0);
    while (!sim.exhausted()) {
        const auto r = sim.step();
        for (int l = 0; l < 3; ++l) totals[l] += r.spikes_per_layer[l];
    }
    CHECK(sim.step_count() == frames.size() * 10);
    CHECK(totals[0] > 0);
    CHECK(totals[1] > 0);
}

TEST_CASE("sparse engine matches the dense oracle bit for bit") {
    auto c = small_config(5);
    c.plasticity.a_ltp = 0.05; // larger rates make any divergence show quickly
    c.plasticity.a_ltd = 0.06;
    c.plasticity.istdp_eta = 0.05;
    Simulation sim(c, bar_frames(c));
    for (int s = 0; s < 20; ++s) sim.step();
    DenseOracle oracle(sim);
    RasterLog a, b;
    for (int s = 0; s < 300; ++s) {
        sim.step(&a);
        oracle.step(&b);
    }
    CHECK(a.size() > 0);
    CHECK(a == b);
    const auto w = oracle.weights_as_sparse(sim.network().synapses);
    const auto sw = sim.network().synapses.weights();
    CHECK(std::equal(w.begin(), w.end(), sw.begin(), sw.end()));
}

TEST_CASE("worker count does not change results") {
    const auto c = small_config(6);
    const auto frames = bar_frames(c);
    Simulation one(c, frames), four(c, frames);
    four.set_workers(4);
    RasterLog a, b;
    for (int s = 0; s < 300; ++s) {
        one.step(&a);
        four.step(&b);
    }
    CHECK(a == b);
    CHECK(one.state_digest() == four.state_digest());
}

TEST_CASE("training flag") {
    auto c = small_config(7);
    c.engine.train = false;
    Simulation sim(c, bar_frames(c));
    const std::vector<double> before(sim.network().synapses.weights().begin(), sim.network().synapses.weights().end());
    while (!sim.exhausted()) sim.step();
    CHECK(std::equal(before.begin(), before.end(), sim.network().synapses.weights().begin()));

    c.engine.train = true;
    Simulation trained(c, bar_frames(c));
    while (!trained.exhausted()) trained.step();
    CHECK_FALSE(std::equal(before.begin(), before.end(), trained.network().synapses.weights().begin()));
}

TEST_CASE("weights stay inside their caps while training") {
    const auto c = small_config(8);
    Simulation sim(c, bar_frames(c));
    const auto pre = sim.network().synapses.pre_ids();
    while (!sim.exhausted()) {
        sim.step();
        const auto w = sim.network().synapses.weights();
        for (std::size_t e = 0; e < w.size(); ++e) {
            if (sim.network().polarity[pre[e]] == Polarity::Excitatory) REQUIRE((w[e] >= 0.0 && w[e] <= 7.0));
            else REQUIRE((w[e] <= 0.0 && w[e] >= -30.0));
        }
        for (double t : sim.traces().value) REQUIRE((t >= 0.0 && t <= 2.0));
    }
}

TEST_CASE("looping stimulus never exhausts") {
    auto c = small_config();
    c.engine.loop_stimulus = true;
    const auto frames = bar_frames(c, 100);
    const auto period = frames.size() * 10;
    Simulation sim(c, frames);
    for (std::size_t s = 0; s < 3 * period; ++s) sim.step();
    CHECK_FALSE(sim.exhausted());
    CHECK(sim.frame_for_step(2 * period + 49) == sim.frame_for_step(49));
}

TEST_CASE("stimulus must match the layer") {
    auto c = small_config();
    auto frames = bar_frames(c);
    c.topology.layer = {10, 10};
    CHECK_THROWS_AS(Simulation(c, frames), std::invalid_argument);
}

TEST_CASE("numeric faults carry neuron and step") {
    auto c = small_config();
    c.engine.input_gain = 1e308;
    Simulation sim(c, bar_frames(c));
    CHECK_THROWS_AS(
        [&] {
            for (int s = 0; s < 50; ++s) sim.step();
        }(),
        NumericFault);
}

TEST_CASE("checkpoint round trip resumes identically") {
    const auto c = small_config(9);
    const auto frames = bar_frames(c);
    Simulation full(c, frames);
    RasterLog full_raster;
    for (int s = 0; s < 400; ++s) full.step(&full_raster);

    Simulation first(c, frames);
    RasterLog resumed_raster;
    for (int s = 0; s < 150; ++s) first.step(&resumed_raster);
    const auto image = first.save();
    auto second = Simulation::load(image, frames);
    CHECK(second.step_count() == 150);
    CHECK(second.state_digest() == first.state_digest());
    for (int s = 0; s < 250; ++s) second.step(&resumed_raster);
    CHECK(resumed_raster == full_raster);
    CHECK(second.state_digest() == full.state_digest());
}

TEST_CASE("checkpoint file round trip and inspection") {
    const auto dir = scratch_dir("snn_test_ckpt");
    std::filesystem::create_directories(dir);
    const auto c = small_config();
    Simulation sim(c);
    for (int s = 0; s < 10; ++s) sim.step();
    sim.save_checkpoint(dir / "a.snnc");
    const auto back = Simulation::load_checkpoint(dir / "a.snnc");
    CHECK(back.state_digest() == sim.state_digest());
    const auto info = inspect_checkpoint(read_file_bytes(dir / "a.snnc"));
    CHECK(info.version == kCheckpointVersion);
    CHECK(info.step == 10);
    CHECK(info.layers == 3);
    CHECK(info.synapses == sim.network().synapses.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("corrupted checkpoints are rejected") {
    const auto c = small_config();
    const auto frames = bar_frames(c);
    Simulation sim(c, frames);
    for (int s = 0; s < 10; ++s) sim.step();
    const auto image = sim.save();

    SUBCASE("flipped byte") {
        auto bad = image;
        bad[bad.size() / 2] ^= 0x40;
        CHECK_THROWS_AS(Simulation::load(bad, frames), CheckpointError);
    }
    SUBCASE("truncated") {
        auto bad = image;
        bad.resize(bad.size() - 7);
        CHECK_THROWS_AS(Simulation::load(bad, frames), CheckpointError);
    }
    SUBCASE("version") {
        auto bad = image;
        bad[4] = 9;
        CHECK_THROWS_WITH_AS(Simulation::load(bad, frames), doctest::Contains("version"), CheckpointError);
    }
    SUBCASE("magic") {
        auto bad = image;
        bad[0] = 'X';
        CHECK_THROWS_AS(Simulation::load(bad, frames), CheckpointError);
    }
    SUBCASE("missing stimulus") {
        CHECK_THROWS_AS(Simulation::load(image), CheckpointError);
    }
    SUBCASE("different stimulus") {
        CHECK_THROWS_AS(Simulation::load(image, bar_frames(c, 300)), CheckpointError);
    }
}

TEST_CASE("run writes artifacts and window lines") {
    const auto dir = scratch_dir("snn_test_run");
    const auto c = small_config();
    const auto frames = bar_frames(c);
    Simulation sim(c, frames);
    RasterLog raster;
    std::ostringstream lines;
    RunHooks hooks{&lines, dir, 300, 500};
    const auto summary = run(sim, 1000, raster, hooks);
    CHECK(summary.steps_run == frames.size() * 10); // stops when the stimulus runs out
    CHECK(summary.windows.size() == 1);
    CHECK(lines.str().rfind("window 0 spikes ", 0) == 0);
    for (const char* f : {"raster.csv", "counts.csv", "checkpoint.snnc", "summary.json", "entropy_exc_L1.pgm",
                          "entropy_inh_L3.pgm", "maps/entropy_exc_L2_t00000300.pgm", "checkpoint_500.snnc"})
        CHECK_MESSAGE(std::filesystem::exists(dir / f), f);
    const auto back = Simulation::load_checkpoint(dir / "checkpoint.snnc", bar_frames(c));
    CHECK(to_hex(back.state_digest()) == summary.state_digest);
    std::filesystem::remove_all(dir);
}

TEST_CASE("mean excitatory entropy per layer") {
    Simulation sim(small_config());
    const auto e = mean_exc_entropy(sim.network());
    REQUIRE(e.size() == 3);
    CHECK(e[0] > 0.5);
    CHECK(e[2] == 0.0); // last layer has no FF fan-out
}

TEST_CASE("benchmark") {
    auto c = small_config();
    BenchOptions o;
    o.steps = 0;
    CHECK(benchmark(c, bar_frames(c), o).empty());
    std::ostringstream out;
    print_bench_table(BenchReport{}, out);
    CHECK(out.str() == "no steps requested; nothing to report\n");
    o.steps = 50;
    o.warmup = 5;
    o.compare_oracle = true;
    o.oracle_steps = 3;
    const auto r = benchmark(c, bar_frames(c), o);
    CHECK(r.steps == 50);
    CHECK(r.steps_per_s_plastic_off > 0.0);
    CHECK(r.oracle_steps_per_s.has_value());
}

TEST_CASE("training never touches lateral weights") {
    const auto c = small_config(10);
    Simulation sim(c, bar_frames(c));
    const auto& t = sim.network().synapses;
    auto lateral = [&] {
        std::vector<double> out;
        for (NeuronId post = 0; post < t.neuron_count(); ++post)
            for (auto e = t.lat_begin(post); e < t.row_end(post); ++e) out.push_back(t.weights()[e]);
        return out;
    };
    const auto before = lateral();
    while (!sim.exhausted()) sim.step();
    CHECK(lateral() == before);
}
