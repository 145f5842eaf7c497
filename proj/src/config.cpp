#include "snn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace snn {

using nlohmann::json;

void EngineConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("engine: ") + what);
    };
    require(std::isfinite(input_gain), "input_gain must be finite");
    require(std::isfinite(v_threshold), "v_threshold must be finite");
    require(window_ms >= 1, "window_ms must be >= 1");
    require(downscale >= 1, "downscale must be >= 1");
    require(count_window_ms >= 1, "count_window_ms must be >= 1");
}

void SimulationConfig::validate() const {
    topology.validate();
    plasticity.validate();
    engine.validate();
    if (topology.w_init_max_exc > plasticity.w_max_exc)
        throw std::invalid_argument("w_init_max_exc exceeds the excitatory weight cap");
    if (topology.w_init_max_inh_mag > plasticity.w_max_inh_mag)
        throw std::invalid_argument("w_init_max_inh_mag exceeds the inhibitory weight cap");
}

void RunOptions::validate() const {
    if (workers < 1) throw std::invalid_argument("run: workers must be >= 1");
}

namespace {

// Reads declared fields from an object and rejects anything left over.
class StrictObject {
public:
    StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_integer()) throw ConfigError("");
                if constexpr (std::is_unsigned_v<T>)
                    if (it->is_number_integer() && !it->is_number_unsigned()) throw ConfigError("");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError("");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!it->is_string()) throw ConfigError("");
            }
            out = it->template get<T>();
        } catch (const std::exception&) {
            throw ConfigError(where_ + "." + key + ": wrong type (" + std::string(it->type_name()) + ")");
        }
    }

    const json& sub(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        auto it = j_.find(key);
        return it == j_.end() ? empty : *it;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key \"" + it.key() + "\"");
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

TopologyConfig read_topology(const json& j) {
    TopologyConfig c;
    StrictObject o(j, "topology");
    o.get("num_layers", c.num_layers);
    o.get("width", c.layer.width);
    o.get("height", c.layer.height);
    o.get("kernel_ff", c.kernel_ff);
    o.get("kernel_lat", c.kernel_lat);
    o.get("p_keep_ff", c.p_keep_ff);
    o.get("p_keep_lat", c.p_keep_lat);
    o.get("inhibitory_fraction", c.inhibitory_fraction);
    o.get("w_init_max_exc", c.w_init_max_exc);
    o.get("w_init_max_inh_mag", c.w_init_max_inh_mag);
    o.get("w_init_min_exc", c.w_init_min_exc);
    o.get("w_init_min_inh_mag", c.w_init_min_inh_mag);
    o.get("seed", c.seed);
    o.finish();
    return c;
}

PlasticityConfig read_plasticity(const json& j) {
    PlasticityConfig c;
    StrictObject o(j, "plasticity");
    o.get("a_ltp", c.a_ltp);
    o.get("a_ltd", c.a_ltd);
    o.get("tau_trace", c.tau_trace);
    o.get("w_max_exc", c.w_max_exc);
    o.get("w_max_inh_mag", c.w_max_inh_mag);
    o.get("istdp_enabled", c.istdp_enabled);
    o.get("istdp_eta", c.istdp_eta);
    o.get("istdp_target_rate", c.istdp_target_rate);
    o.get("inverted_pairing", c.inverted_pairing);
    o.finish();
    return c;
}

EngineConfig read_engine(const json& j) {
    EngineConfig c;
    StrictObject o(j, "engine");
    o.get("input_gain", c.input_gain);
    o.get("v_threshold", c.v_threshold);
    o.get("window_ms", c.window_ms);
    o.get("downscale", c.downscale);
    o.get("train", c.train);
    o.get("loop_stimulus", c.loop_stimulus);
    o.get("count_window_ms", c.count_window_ms);
    o.finish();
    return c;
}

RunOptions read_run(const json& j) {
    RunOptions c;
    StrictObject o(j, "run");
    o.get("steps", c.steps);
    o.get("stimulus", c.stimulus);
    o.get("out_dir", c.out_dir);
    o.get("entropy_every_ms", c.entropy_every_ms);
    o.get("checkpoint_every", c.checkpoint_every);
    o.get("workers", c.workers);
    o.finish();
    return c;
}

template <typename F>
auto checked(F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

} // namespace

json to_json(const SimulationConfig& cfg) {
    const auto& t = cfg.topology;
    const auto& p = cfg.plasticity;
    const auto& e = cfg.engine;
    return json{
        {"topology",
         {{"num_layers", t.num_layers},
          {"width", t.layer.width},
          {"height", t.layer.height},
          {"kernel_ff", t.kernel_ff},
          {"kernel_lat", t.kernel_lat},
          {"p_keep_ff", t.p_keep_ff},
          {"p_keep_lat", t.p_keep_lat},
          {"inhibitory_fraction", t.inhibitory_fraction},
          {"w_init_max_exc", t.w_init_max_exc},
          {"w_init_max_inh_mag", t.w_init_max_inh_mag},
          {"w_init_min_exc", t.w_init_min_exc},
          {"w_init_min_inh_mag", t.w_init_min_inh_mag},
          {"seed", t.seed}}},
        {"plasticity",
         {{"a_ltp", p.a_ltp},
          {"a_ltd", p.a_ltd},
          {"tau_trace", p.tau_trace},
          {"w_max_exc", p.w_max_exc},
          {"w_max_inh_mag", p.w_max_inh_mag},
          {"istdp_enabled", p.istdp_enabled},
          {"istdp_eta", p.istdp_eta},
          {"istdp_target_rate", p.istdp_target_rate},
          {"inverted_pairing", p.inverted_pairing}}},
        {"engine",
         {{"input_gain", e.input_gain},
          {"v_threshold", e.v_threshold},
          {"window_ms", e.window_ms},
          {"downscale", e.downscale},
          {"train", e.train},
          {"loop_stimulus", e.loop_stimulus},
          {"count_window_ms", e.count_window_ms}}},
    };
}

json to_json(const RunConfig& cfg) {
    json j = to_json(cfg.sim);
    const auto& r = cfg.run;
    j["run"] = {{"steps", r.steps},
                {"stimulus", r.stimulus},
                {"out_dir", r.out_dir},
                {"entropy_every_ms", r.entropy_every_ms},
                {"checkpoint_every", r.checkpoint_every},
                {"workers", r.workers}};
    return j;
}

SimulationConfig simulation_config_from_json(const json& j) {
    StrictObject o(j, "config");
    SimulationConfig c;
    c.topology = read_topology(o.sub("topology"));
    c.plasticity = read_plasticity(o.sub("plasticity"));
    c.engine = read_engine(o.sub("engine"));
    o.finish();
    checked([&] {
        c.validate();
        return 0;
    });
    return c;
}

RunConfig run_config_from_json(const json& j) {
    StrictObject o(j, "config");
    RunConfig c;
    c.sim.topology = read_topology(o.sub("topology"));
    c.sim.plasticity = read_plasticity(o.sub("plasticity"));
    c.sim.engine = read_engine(o.sub("engine"));
    c.run = read_run(o.sub("run"));
    o.finish();
    checked([&] {
        c.validate();
        return 0;
    });
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

std::string canonical_text(const SimulationConfig& cfg) { return to_json(cfg).dump(); }

} // namespace snn
