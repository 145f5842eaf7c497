#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "snn/events.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "snn_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

Result snnsim(const std::string& args) {
    const auto out = work_dir() / "stdout.txt";
    const auto err = work_dir() / "stderr.txt";
    const std::string cmd = std::string(SNNSIM_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string path(const std::string& name) { return (work_dir() / name).string(); }

void write_text(const std::string& name, const std::string& text) { std::ofstream(work_dir() / name) << text; }

// Records of a raster CSV for one step.
std::string raster_rows_for_step(const std::string& csv, const std::string& step) {
    std::istringstream in(csv);
    std::string line, rows;
    while (std::getline(in, line))
        if (line.rfind(step + ",", 0) == 0) rows += line + "\n";
    return rows;
}

} // namespace

TEST_CASE("gen writes a valid DVSE file") {
    const auto r = snnsim("gen --width 64 --height 64 --speed 100 --duration 2000 --out " + path("bar.dvse"));
    CHECK(r.code == 0);
    const auto s = snn::read_events(path("bar.dvse"));
    CHECK(s.width == 64);
    CHECK(s.events.size() == 199u * 2 * 64);
}

TEST_CASE("gen with zero duration writes a header-only file") {
    const auto r = snnsim("gen --duration 0 --out " + path("empty.dvse"));
    CHECK(r.code == 0);
    CHECK(snn::read_events(path("empty.dvse")).events.empty());
    CHECK(r.err.find("zero events") != std::string::npos);
}

TEST_CASE("gen with zero speed warns") {
    const auto r = snnsim("gen --speed 0 --out " + path("still.dvse"));
    CHECK(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(snnsim("").code == 2);
    CHECK(snnsim("frobnicate").code == 2);
    CHECK(snnsim("gen --width 64").code == 2); // --out missing
    CHECK(snnsim("gen --bar-width 0 --out " + path("x.dvse")).code == 2);
    CHECK(snnsim("run --train maybe").code == 2);
    CHECK(snnsim("run --config " + path("no_such.json")).code == 2);
}

TEST_CASE("config errors exit 2") {
    write_text("typo.json", R"({"topology":{"num_layer":3}})");
    const auto r = snnsim("run --config " + path("typo.json") + " --out-dir " + path("typo_out"));
    CHECK(r.code == 2);
    CHECK(r.err.find("num_layer") != std::string::npos);
}

TEST_CASE("inspect") {
    snnsim("gen --width 64 --height 64 --duration 100 --out " + path("small.dvse"));
    auto r = snnsim("inspect " + path("small.dvse"));
    CHECK(r.code == 0);
    CHECK(r.out == "DVSE v1, 64x64, 1152 events\n");

    write_text("junk.bin", "this is not a recognized file");
    r = snnsim("inspect " + path("junk.bin"));
    CHECK(r.code == 2);
    CHECK(r.err.find("unrecognized") != std::string::npos);
}

TEST_CASE("run is deterministic and writes artifacts") {
    snnsim("gen --width 16 --height 16 --bar-width 3 --speed 50 --duration 1000 --out " + path("bar16.dvse"));
    write_text("small.json", R"({"topology":{"width":16,"height":16,"seed":4},"run":{"checkpoint_every":0}})");
    const std::string common = "run --config " + path("small.json") + " --stimulus " + path("bar16.dvse") +
                               " --steps 1000 --out-dir ";
    const auto a = snnsim(common + path("run_a"));
    const auto b = snnsim(common + path("run_b") + " --workers 3");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("window 0 spikes ", 0) == 0);
    for (const char* f : {"raster.csv", "counts.csv", "summary.json", "checkpoint.snnc", "entropy_exc_L1.pgm"}) {
        CHECK_MESSAGE(fs::exists(fs::path(path("run_a")) / f), f);
        CHECK(slurp(fs::path(path("run_a")) / f) == slurp(fs::path(path("run_b")) / f));
    }
    const auto r = snnsim("inspect " + (fs::path(path("run_a")) / "checkpoint.snnc").string());
    CHECK(r.code == 0);
    CHECK(r.out.rfind("SNNC v1, step=", 0) == 0);
    CHECK(r.out.find(", layers=3, synapses=") != std::string::npos);
}

TEST_CASE("train off and on agree on the first step and then diverge") {
    const std::string common = "run --config " + path("small.json") + " --stimulus " + path("bar16.dvse") +
                               " --steps 1000 --out-dir ";
    REQUIRE(snnsim(common + path("train_on") + " --train on").code == 0);
    REQUIRE(snnsim(common + path("train_off") + " --train off").code == 0);
    const auto on = slurp(fs::path(path("train_on")) / "raster.csv");
    const auto off = slurp(fs::path(path("train_off")) / "raster.csv");
    CHECK(raster_rows_for_step(on, "0") == raster_rows_for_step(off, "0"));
    CHECK(on != off);
}

TEST_CASE("numeric fault exits 3 with context") {
    write_text("blowup.json", R"({"topology":{"width":16,"height":16},"engine":{"input_gain":1e308}})");
    const auto r = snnsim("run --config " + path("blowup.json") + " --stimulus " + path("bar16.dvse") +
                          " --steps 100 --out-dir " + path("blowup_out"));
    CHECK(r.code == 3);
    CHECK(r.err.find("neuron") != std::string::npos);
    CHECK(r.err.find("step") != std::string::npos);
}

TEST_CASE("bench") {
    auto r = snnsim("bench --steps 0");
    CHECK(r.code == 0);
    CHECK(r.out == "no steps requested; nothing to report\n");
    write_text("bench.json", R"({"topology":{"width":16,"height":16}})");
    r = snnsim("bench --config " + path("bench.json") + " --steps 30 --warmup 5 --csv " + path("bench.csv"));
    CHECK(r.code == 0);
    CHECK(r.out.find("rate (plasticity off)") != std::string::npos);
    CHECK(slurp(path("bench.csv")).rfind("metric,value\nsteps,30\n", 0) == 0);
}
