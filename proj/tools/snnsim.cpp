// snnsim: command-line front end. Exit codes: 0 ok, 2 usage/config/input
// error, 3 numeric fault, 1 anything else.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "snn/config.hpp"
#include "snn/engine.hpp"
#include "snn/events.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct GenArgs {
    snn::MovingBarParams bar;
    std::string out;
};

struct RunArgs {
    std::string config;
    std::string out_dir;
    std::string stimulus;
    std::string train;
    std::optional<std::uint64_t> steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> workers;
};

struct BenchArgs {
    std::string config;
    std::string stimulus;
    std::string csv;
    snn::BenchOptions opts;
};

int cmd_gen(const GenArgs& a) {
    const auto stream = snn::gen_moving_bar(a.bar);
    if (stream.events.empty()) std::cerr << "warning: stimulus has zero events\n";
    snn::write_events(stream, a.out);
    std::cout << "wrote " << stream.events.size() << " events to " << a.out << '\n';
    return 0;
}

snn::RunConfig base_config(const std::string& path) {
    return path.empty() ? snn::RunConfig{} : snn::load_run_config(path);
}

int cmd_run(const RunArgs& a) {
    auto cfg = base_config(a.config);
    if (!a.out_dir.empty()) cfg.run.out_dir = a.out_dir;
    if (!a.stimulus.empty()) cfg.run.stimulus = a.stimulus;
    if (a.steps) cfg.run.steps = *a.steps;
    if (a.seed) cfg.sim.topology.seed = *a.seed;
    if (a.workers) cfg.run.workers = *a.workers;
    if (!a.train.empty()) cfg.sim.engine.train = a.train == "on";
    if (!cfg.run.stimulus.empty() && !std::filesystem::exists(cfg.run.stimulus))
        throw snn::ConfigError("stimulus file not found: " + cfg.run.stimulus);
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw snn::ConfigError(e.what());
    }
    const auto summary = snn::run(cfg, &std::cout);
    std::cout << "steps " << summary.steps_run << " raster_sha256 " << summary.raster_digest << " state_sha256 "
              << summary.state_digest << '\n';
    return 0;
}

// A looping bar across the full layer, used when bench is given no stimulus.
snn::FrameSequence default_bench_stimulus(const snn::SimulationConfig& cfg) {
    const auto& layer = cfg.topology.layer;
    const auto ds = cfg.engine.downscale;
    snn::MovingBarParams p;
    p.width = std::uint16_t(layer.width * ds);
    p.height = std::uint16_t(layer.height * ds);
    p.bar_width = std::uint16_t(std::max<std::uint32_t>(1, p.width / 8));
    p.speed_px_per_s = 100.0 * ds;
    p.duration_ms = layer.width * 10 + 1; // one full sweep
    return snn::batch_frames(snn::gen_moving_bar(p), cfg.engine.window_ms, layer, ds);
}

int cmd_bench(const BenchArgs& a) {
    const auto cfg = base_config(a.config);
    const auto stimulus =
        a.stimulus.empty() ? default_bench_stimulus(cfg.sim) : snn::load_stimulus(a.stimulus, cfg.sim);
    const auto report = snn::benchmark(cfg.sim, stimulus, a.opts);
    snn::print_bench_table(report, std::cout);
    if (!a.csv.empty()) snn::write_bench_csv(report, a.csv);
    return 0;
}

int cmd_inspect(const std::string& path) {
    const auto bytes = snn::read_file_bytes(path);
    const std::string magic(bytes.begin(), bytes.begin() + std::min<std::size_t>(4, bytes.size()));
    if (magic == "DVSE") {
        const auto h = snn::read_events_header(bytes);
        std::cout << "DVSE v" << h.version << ", " << h.width << 'x' << h.height << ", " << h.count << " events\n";
        return 0;
    }
    if (magic == "SNNC") {
        const auto info = snn::inspect_checkpoint(bytes);
        std::cout << "SNNC v" << info.version << ", step=" << info.step << ", layers=" << info.layers
                  << ", synapses=" << info.synapses << '\n'
                  << "layer " << info.width << 'x' << info.height << ", neurons=" << info.neurons << '\n'
                  << "config sha256 " << info.config_digest << '\n';
        return 0;
    }
    std::cerr << "error: " << path << ": unrecognized file type\n";
    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Layered spiking network simulator"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a moving-bar DVS stimulus");
    gen_cmd->add_option("--width", gen.bar.width, "Sensor width")->capture_default_str();
    gen_cmd->add_option("--height", gen.bar.height, "Sensor height")->capture_default_str();
    gen_cmd->add_option("--bar-width", gen.bar.bar_width, "Bar width in pixels")->capture_default_str();
    gen_cmd->add_option("--speed", gen.bar.speed_px_per_s, "Speed in px/s")->capture_default_str();
    gen_cmd->add_option("--duration", gen.bar.duration_ms, "Duration in ms")->capture_default_str();
    gen_cmd->add_option("--seed", gen.bar.seed, "Jitter seed")->capture_default_str();
    gen_cmd->add_option("--jitter", gen.bar.jitter_ms, "Max per-event delay in ms")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output DVSE file")->required();

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation and write artifacts");
    run_cmd->add_option("--config", run.config, "JSON config file");
    run_cmd->add_option("--out-dir", run.out_dir, "Artifact directory");
    run_cmd->add_option("--stimulus", run.stimulus, "DVSE stimulus file");
    run_cmd->add_option("--steps", run.steps, "Number of 1 ms steps");
    run_cmd->add_option("--seed", run.seed, "Network seed");
    run_cmd->add_option("--workers", run.workers, "Worker threads");
    run_cmd->add_option("--train", run.train, "Plasticity on or off")->check(CLI::IsMember({"on", "off"}));

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measure simulation throughput");
    bench_cmd->add_option("--config", bench.config, "JSON config file");
    bench_cmd->add_option("--stimulus", bench.stimulus, "DVSE stimulus file (default: generated bar)");
    bench_cmd->add_option("--steps", bench.opts.steps, "Timed steps")->capture_default_str();
    bench_cmd->add_option("--warmup", bench.opts.warmup, "Untimed warmup steps")->capture_default_str();
    bench_cmd->add_flag("--compare-oracle", bench.opts.compare_oracle, "Also time the dense oracle");
    bench_cmd->add_option("--oracle-steps", bench.opts.oracle_steps, "Timed oracle steps")->capture_default_str();
    bench_cmd->add_option("--csv", bench.csv, "Also write the table as CSV");

    std::string inspect_path;
    auto* inspect_cmd = app.add_subcommand("inspect", "Describe a DVSE or checkpoint file");
    inspect_cmd->add_option("file", inspect_path, "File to inspect")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen_cmd) return cmd_gen(gen);
        if (*run_cmd) return cmd_run(run);
        if (*bench_cmd) return cmd_bench(bench);
        if (*inspect_cmd) return cmd_inspect(inspect_path);
    } catch (const snn::NumericFault& e) {
        std::cerr << "numeric fault: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const snn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const snn::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const snn::CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
