#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "snn/config.hpp"

using namespace snn;
using nlohmann::json;

TEST_CASE("defaults") {
    const RunConfig c;
    CHECK(c.sim.topology.num_layers == 3);
    CHECK(c.sim.topology.layer == LayerSpec{32, 32});
    CHECK(c.sim.topology.kernel_ff == 5);
    CHECK(c.sim.topology.p_keep_ff == 0.2);
    CHECK(c.sim.topology.p_keep_lat == 0.3);
    CHECK(c.sim.topology.inhibitory_fraction == 0.2);
    CHECK(c.sim.plasticity.a_ltp == 0.010);
    CHECK(c.sim.plasticity.a_ltd == 0.012);
    CHECK(c.sim.plasticity.tau_trace == 20.0);
    CHECK(c.sim.engine.input_gain == 20.0);
    CHECK(c.sim.engine.v_threshold == -30.0);
    CHECK(c.sim.engine.window_ms == 10);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("JSON round trip") {
    RunConfig c;
    c.sim.topology.seed = 99;
    c.sim.topology.layer = {16, 8};
    c.sim.plasticity.istdp_enabled = true;
    c.sim.engine.train = false;
    c.run.steps = 1234;
    c.run.workers = 3;
    const auto back = run_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.sim.topology.layer == LayerSpec{16, 8});
}

TEST_CASE("missing keys keep defaults") {
    const auto c = run_config_from_json(json::parse(R"({"topology":{"seed":7}})"));
    CHECK(c.sim.topology.seed == 7);
    CHECK(c.sim.topology.num_layers == 3);
    CHECK(c.run.steps == 1000);
}

TEST_CASE("strict parsing") {
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":{"sede":7}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"extra":{}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":{"seed":"7"}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":{"seed":-1}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"engine":{"train":1}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":[]})")), ConfigError);
    CHECK_THROWS_AS(simulation_config_from_json(json::parse(R"({"run":{}})")), ConfigError);
}

TEST_CASE("value validation surfaces as ConfigError") {
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":{"kernel_ff":4}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"topology":{"w_init_max_exc":8}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"run":{"workers":0}})")), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(json::parse(R"({"engine":{"window_ms":0}})")), ConfigError);
}

TEST_CASE("load from file") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = dir / "snn_test_good.json";
    const auto bad = dir / "snn_test_bad.json";
    std::ofstream(good) << R"({"run":{"steps":5}})";
    std::ofstream(bad) << "{ not json";
    CHECK(load_run_config(good).run.steps == 5);
    CHECK_THROWS_AS(load_run_config(bad), ConfigError);
    CHECK_THROWS_AS(load_run_config(dir / "snn_no_such_file.json"), ConfigError);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
}

TEST_CASE("canonical text is stable and sensitive") {
    SimulationConfig a, b;
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(canonical_text(a).find(' ') == std::string::npos);
    b.plasticity.a_ltp = 0.011;
    CHECK(canonical_text(a) != canonical_text(b));
}
