// Checkpoint image, all integers little-endian, doubles as IEEE-754 bits:
//
//   "SNNC" | u16 version | 32-byte SHA-256 of the CONF payload |
//   sections, each: 4-byte tag | u64 payload length | payload
//
// Sections, in this order:
//   CONF  canonical config JSON
//   STIM  u8 has_stimulus | 32-byte frame-content digest
//   TOPO  u64 neurons | u64 synapses | row_ptr[n+1] u64 | lat_begin[n] u64 | pre[nnz] u32
//   NRNS  polarity[n] u8 | params[n] x (a, b, c, d) f64
//   WGHT  weight[nnz] f64
//   STAT  (v, u)[n] f64
//   TRCE  trace[n] f64
//   SPKB  previous-step spike flags[n] u8
//   RNG   4 x u64 generator words
//   CNTR  u64 step | u64 count window steps | u64 count window index | counts[n] u32
//   CSUM  SHA-256 of every preceding byte
#include <cstring>

#include <json.hpp>

#include "snn/byteio.hpp"
#include "snn/engine.hpp"

namespace snn {

namespace {

constexpr const char* kSectionOrder[] = {"CONF", "STIM", "TOPO", "NRNS", "WGHT", "STAT",
                                         "TRCE", "SPKB", "RNG ", "CNTR", "CSUM"};
constexpr std::size_t kHeaderBytes = 4 + 2 + 32;

class SectionWriter {
public:
    explicit SectionWriter(byteio::Writer& out) : out_(out) {}

    template <typename F>
    void section(const char* tag, F&& body) {
        byteio::Writer payload;
        body(payload);
        out_.tag(tag);
        out_.u64(payload.size());
        out_.bytes(payload.buffer());
    }

private:
    byteio::Writer& out_;
};

struct Sections {
    std::uint16_t version = 0;
    Digest config_digest{};
    // payload spans and their absolute offsets, in kSectionOrder order
    std::vector<std::span<const std::uint8_t>> payload;
    std::vector<std::uint64_t> offset;
};

// Splits and verifies the container; does not interpret payloads.
Sections split(std::span<const std::uint8_t> bytes) {
    try {
        byteio::Reader r(bytes);
        if (r.tag(4, "magic") != "SNNC") throw CheckpointError("not a checkpoint: bad magic");
        Sections s;
        s.version = r.u16("version");
        if (s.version != kCheckpointVersion)
            throw CheckpointError("checkpoint version " + std::to_string(s.version) + " not supported (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
        auto digest = r.bytes(32, "config digest");
        std::memcpy(s.config_digest.data(), digest.data(), 32);
        for (const char* expected : kSectionOrder) {
            const auto at = r.offset();
            const auto tag = r.tag(4, "section tag");
            if (tag != expected)
                throw CheckpointError("unexpected section '" + tag + "' at byte " + std::to_string(at) +
                                      " (expected '" + expected + "')");
            const auto len = r.u64("section length");
            if (len > r.remaining())
                throw CheckpointError("truncated section " + tag + " at byte " + std::to_string(at));
            if (tag == "CSUM") {
                const auto body = bytes.first(std::size_t(at));
                const auto want = sha256(body);
                auto have = r.bytes(std::size_t(len), "checksum");
                if (len != 32 || std::memcmp(have.data(), want.data(), 32) != 0)
                    throw CheckpointError("checkpoint checksum mismatch (file corrupted)");
                s.payload.push_back(have);
            } else {
                s.offset.push_back(r.offset());
                s.payload.push_back(r.bytes(std::size_t(len), "section payload"));
            }
        }
        if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
        const auto conf = s.payload[0];
        if (sha256(conf) != s.config_digest) throw CheckpointError("config digest mismatch");
        return s;
    } catch (const FormatError& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
}

void expect_done(const byteio::Reader& r, const char* section) {
    if (!r.done()) throw CheckpointError(std::string("section ") + section + " has trailing bytes");
}

} // namespace

std::vector<std::uint8_t> Simulation::save() const {
    const auto conf = canonical_text(cfg_);
    byteio::Writer out;
    out.tag("SNNC");
    out.u16(kCheckpointVersion);
    const auto digest = sha256(conf);
    out.bytes(digest);
    SectionWriter sw(out);
    const auto& t = net_.synapses;
    const auto n = net_.neuron_count();
    sw.section("CONF", [&](byteio::Writer& w) { w.tag(conf); });
    sw.section("STIM", [&](byteio::Writer& w) {
        w.u8(stimulus_ ? 1 : 0);
        w.bytes(stimulus_digest_);
    });
    sw.section("TOPO", [&](byteio::Writer& w) {
        w.u64(n);
        w.u64(t.size());
        for (auto x : t.row_ptr()) w.u64(x);
        for (auto x : t.lat_begins()) w.u64(x);
        for (auto x : t.pre_ids()) w.u32(x);
    });
    sw.section("NRNS", [&](byteio::Writer& w) {
        for (auto p : net_.polarity) w.u8(static_cast<std::uint8_t>(p));
        for (const auto& p : net_.params) {
            w.f64(p.a);
            w.f64(p.b);
            w.f64(p.c);
            w.f64(p.d);
        }
    });
    sw.section("WGHT", [&](byteio::Writer& w) {
        for (auto x : t.weights()) w.f64(x);
    });
    sw.section("STAT", [&](byteio::Writer& w) {
        for (const auto& s : state_) {
            w.f64(s.v);
            w.f64(s.u);
        }
    });
    sw.section("TRCE", [&](byteio::Writer& w) {
        for (auto x : traces_.value) w.f64(x);
    });
    sw.section("SPKB", [&](byteio::Writer& w) { w.bytes(spikes_prev_); });
    sw.section("RNG ", [&](byteio::Writer& w) {
        for (auto x : rng_.state()) w.u64(x);
    });
    sw.section("CNTR", [&](byteio::Writer& w) {
        w.u64(step_);
        w.u64(counts_.window_steps);
        w.u64(counts_.index);
        for (auto c : counts_.counts) w.u32(c);
    });
    const auto checksum = sha256(out.buffer());
    out.tag("CSUM");
    out.u64(32);
    out.bytes(checksum);
    return out.take();
}

Simulation Simulation::load(std::span<const std::uint8_t> bytes, std::optional<FrameSequence> stimulus) {
    const auto s = split(bytes);
    Simulation sim;
    try {
        const auto& conf = s.payload[0];
        sim.cfg_ = simulation_config_from_json(nlohmann::json::parse(conf.begin(), conf.end()));
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("invalid CONF section: ") + e.what());
    }
    const auto& cfg = sim.cfg_;
    const std::size_t n = cfg.topology.layer.size() * cfg.topology.num_layers;

    try {
        byteio::Reader stim(s.payload[1], s.offset[1]);
        const bool had_stimulus = stim.u8("STIM") != 0;
        Digest digest{};
        auto d = stim.bytes(32, "STIM");
        std::memcpy(digest.data(), d.data(), 32);
        expect_done(stim, "STIM");
        if (had_stimulus != stimulus.has_value())
            throw CheckpointError(had_stimulus ? "checkpoint was taken with a stimulus; none supplied"
                                               : "checkpoint was taken in zero-input mode; stimulus supplied");
        if (stimulus) {
            if (frames_digest(*stimulus) != digest)
                throw CheckpointError("stimulus content differs from the one the checkpoint was taken with");
            sim.stimulus_digest_ = digest;
            sim.stimulus_ = std::move(stimulus);
        }

        byteio::Reader topo(s.payload[2], s.offset[2]);
        if (topo.u64("TOPO") != n) throw CheckpointError("TOPO neuron count does not match config");
        const auto nnz = topo.u64("TOPO");
        if (nnz > topo.remaining() / 4) throw CheckpointError("TOPO synapse count exceeds section size");
        std::vector<std::uint64_t> row_ptr(n + 1), lat_begin(n);
        std::vector<NeuronId> pre(nnz);
        for (auto& x : row_ptr) x = topo.u64("TOPO");
        for (auto& x : lat_begin) x = topo.u64("TOPO");
        for (auto& x : pre) x = topo.u32("TOPO");
        expect_done(topo, "TOPO");

        byteio::Reader nrns(s.payload[3], s.offset[3]);
        sim.net_.config = cfg.topology;
        sim.net_.polarity.resize(n);
        sim.net_.params.resize(n);
        for (auto& p : sim.net_.polarity) {
            const auto v = nrns.u8("NRNS");
            if (v > 1) throw CheckpointError("invalid polarity flag");
            p = static_cast<Polarity>(v);
        }
        for (auto& p : sim.net_.params) {
            p.a = nrns.f64("NRNS");
            p.b = nrns.f64("NRNS");
            p.c = nrns.f64("NRNS");
            p.d = nrns.f64("NRNS");
        }
        expect_done(nrns, "NRNS");

        byteio::Reader wght(s.payload[4], s.offset[4]);
        std::vector<double> weight(nnz);
        for (auto& x : weight) x = wght.f64("WGHT");
        expect_done(wght, "WGHT");
        try {
            sim.net_.synapses =
                SynapseTable(std::move(row_ptr), std::move(lat_begin), std::move(pre), std::move(weight));
        } catch (const std::invalid_argument& e) {
            throw CheckpointError(std::string("invalid TOPO section: ") + e.what());
        }

        byteio::Reader stat(s.payload[5], s.offset[5]);
        sim.state_.resize(n);
        for (auto& st : sim.state_) {
            st.v = stat.f64("STAT");
            st.u = stat.f64("STAT");
        }
        expect_done(stat, "STAT");

        byteio::Reader trce(s.payload[6], s.offset[6]);
        sim.traces_ = TraceState(n);
        for (auto& x : sim.traces_.value) x = trce.f64("TRCE");
        expect_done(trce, "TRCE");

        byteio::Reader spkb(s.payload[7], s.offset[7]);
        auto flags = spkb.bytes(n, "SPKB");
        sim.spikes_prev_.assign(flags.begin(), flags.end());
        sim.spikes_curr_.assign(n, 0);
        expect_done(spkb, "SPKB");

        byteio::Reader rng(s.payload[8], s.offset[8]);
        Xoshiro256::State words{};
        for (auto& x : words) x = rng.u64("RNG");
        sim.rng_ = Xoshiro256::from_state(words);
        expect_done(rng, "RNG");

        byteio::Reader cntr(s.payload[9], s.offset[9]);
        sim.step_ = cntr.u64("CNTR");
        sim.counts_.window_steps = cntr.u64("CNTR");
        sim.counts_.index = cntr.u64("CNTR");
        sim.counts_.counts.resize(n);
        for (auto& c : sim.counts_.counts) c = cntr.u32("CNTR");
        expect_done(cntr, "CNTR");
        if (sim.counts_.window_steps != cfg.engine.count_window_ms)
            throw CheckpointError("count window does not match config");
    } catch (const FormatError& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
    return sim;
}

CheckpointInfo inspect_checkpoint(std::span<const std::uint8_t> bytes) {
    const auto s = split(bytes);
    CheckpointInfo info;
    info.version = s.version;
    info.config_digest = to_hex(s.config_digest);
    try {
        const auto& conf = s.payload[0];
        const auto cfg = simulation_config_from_json(nlohmann::json::parse(conf.begin(), conf.end()));
        info.layers = cfg.topology.num_layers;
        info.width = cfg.topology.layer.width;
        info.height = cfg.topology.layer.height;
    } catch (const std::exception& e) {
        throw CheckpointError(std::string("invalid CONF section: ") + e.what());
    }
    try {
        byteio::Reader topo(s.payload[2], s.offset[2]);
        info.neurons = topo.u64("TOPO");
        info.synapses = topo.u64("TOPO");
        byteio::Reader cntr(s.payload[9], s.offset[9]);
        info.step = cntr.u64("CNTR");
    } catch (const FormatError& e) {
        throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
    }
    return info;
}

} // namespace snn
