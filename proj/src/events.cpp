#include "snn/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "snn/byteio.hpp"
#include "snn/random.hpp"

namespace snn {

void EventStream::validate() const {
    std::uint32_t last = 0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        const auto offset = kDvseHeaderBytes + i * kDvseRecordBytes;
        if (e.x >= width || e.y >= height)
            throw FormatError("event " + std::to_string(i) + " at (" + std::to_string(e.x) + "," +
                                  std::to_string(e.y) + ") outside " + std::to_string(width) + "x" +
                                  std::to_string(height) + " sensor",
                              offset);
        if (e.t_us < last) throw FormatError("timestamp regression at event " + std::to_string(i), offset);
        last = e.t_us;
    }
}

std::vector<std::uint8_t> encode_events(const EventStream& stream) {
    stream.validate();
    byteio::Writer w;
    w.buffer().reserve(kDvseHeaderBytes + stream.events.size() * kDvseRecordBytes);
    w.tag("DVSE");
    w.u16(kDvseVersion);
    w.u16(stream.width);
    w.u16(stream.height);
    w.u64(stream.events.size());
    for (const auto& e : stream.events) {
        w.u32(e.t_us);
        w.u16(e.x);
        w.u16(e.y);
        w.u8(static_cast<std::uint8_t>(e.polarity));
    }
    return w.take();
}

DvseHeader read_events_header(std::span<const std::uint8_t> bytes) {
    byteio::Reader r(bytes);
    if (r.tag(4, "magic") != "DVSE") throw FormatError("bad magic, expected DVSE", 0);
    DvseHeader h;
    h.version = r.u16("version");
    if (h.version != kDvseVersion)
        throw FormatError("unsupported DVSE version " + std::to_string(h.version), 4);
    h.width = r.u16("width");
    h.height = r.u16("height");
    h.count = r.u64("event count");
    return h;
}

EventStream decode_events(std::span<const std::uint8_t> bytes) {
    const auto h = read_events_header(bytes);
    byteio::Reader r(bytes.subspan(kDvseHeaderBytes), kDvseHeaderBytes);
    if (h.count > r.remaining() / kDvseRecordBytes)
        throw FormatError("truncated record: header declares " + std::to_string(h.count) + " events",
                          kDvseHeaderBytes + (r.remaining() / kDvseRecordBytes) * kDvseRecordBytes);
    EventStream s;
    s.width = h.width;
    s.height = h.height;
    s.events.reserve(h.count);
    std::uint32_t last = 0;
    for (std::uint64_t i = 0; i < h.count; ++i) {
        const auto offset = r.offset();
        DvsEvent e;
        e.t_us = r.u32("record");
        e.x = r.u16("record");
        e.y = r.u16("record");
        const auto pol = r.u8("record");
        if (pol > 1) throw FormatError("invalid polarity " + std::to_string(pol), offset);
        e.polarity = static_cast<EventPolarity>(pol);
        if (e.t_us < last) throw FormatError("timestamp regression at event " + std::to_string(i), offset);
        if (e.x >= s.width || e.y >= s.height)
            throw FormatError("event " + std::to_string(i) + " outside sensor bounds", offset);
        last = e.t_us;
        s.events.push_back(e);
    }
    if (!r.done()) throw FormatError("trailing bytes after last record", r.offset());
    return s;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_events(const EventStream& stream, const std::filesystem::path& path) {
    write_file_bytes(path, encode_events(stream));
}

EventStream read_events(const std::filesystem::path& path) { return decode_events(read_file_bytes(path)); }

FrameSequence batch_frames(const EventStream& stream, std::uint32_t window_ms, const LayerSpec& layer,
                           std::uint32_t downscale) {
    if (window_ms == 0) throw std::invalid_argument("batch_frames: window_ms must be > 0");
    if (downscale == 0) throw std::invalid_argument("batch_frames: downscale must be > 0");
    if (std::uint64_t(layer.width) * downscale != stream.width ||
        std::uint64_t(layer.height) * downscale != stream.height)
        throw std::invalid_argument("batch_frames: sensor " + std::to_string(stream.width) + "x" +
                                    std::to_string(stream.height) + " does not map onto layer " +
                                    std::to_string(layer.width) + "x" + std::to_string(layer.height) +
                                    " with downscale " + std::to_string(downscale));
    FrameSequence seq;
    seq.window_ms = window_ms;
    seq.layer = layer;
    if (stream.events.empty()) return seq;
    const std::uint64_t window_us = std::uint64_t(window_ms) * 1000;
    const std::uint64_t n_frames = stream.events.back().t_us / window_us + 1;
    seq.frames.assign(n_frames, std::vector<std::uint8_t>(layer.size(), 0));
    for (const auto& e : stream.events) {
        const auto frame = e.t_us / window_us;
        const std::size_t cell = std::size_t(e.y / downscale) * layer.width + e.x / downscale;
        seq.frames[frame][cell] = 1;
    }
    return seq;
}

EventStream gen_moving_bar(const MovingBarParams& p) {
    if (p.bar_width == 0 || p.bar_width > p.width)
        throw std::invalid_argument("gen_moving_bar: bar must fit in the frame");
    if (p.height == 0) throw std::invalid_argument("gen_moving_bar: height must be > 0");
    if (!(p.speed_px_per_s >= 0.0) || !std::isfinite(p.speed_px_per_s))
        throw std::invalid_argument("gen_moving_bar: speed must be finite and >= 0");
    if (std::uint64_t(p.duration_ms) * 1000 + std::uint64_t(p.jitter_ms) * 1000 > UINT32_MAX)
        throw std::invalid_argument("gen_moving_bar: duration exceeds 32-bit microsecond timestamps");

    EventStream s;
    s.width = p.width;
    s.height = p.height;
    if (p.bar_width == p.width) return s; // full-frame bar: nothing changes
    auto displacement = [&](std::uint32_t t_ms) {
        return static_cast<std::uint64_t>(std::floor(p.speed_px_per_s * double(t_ms) / 1000.0));
    };
    Xoshiro256 rng(p.seed);
    for (std::uint32_t t = 1; t < p.duration_ms; ++t) {
        const auto from = displacement(t - 1);
        const auto to = displacement(t);
        for (auto k = from; k < to; ++k) {
            const auto lead = std::uint16_t((k + p.bar_width) % p.width);
            const auto trail = std::uint16_t(k % p.width);
            for (std::uint16_t y = 0; y < p.height; ++y)
                s.events.push_back({t * 1000u, lead, y, EventPolarity::On});
            for (std::uint16_t y = 0; y < p.height; ++y)
                s.events.push_back({t * 1000u, trail, y, EventPolarity::Off});
        }
    }
    if (p.jitter_ms > 0) {
        for (auto& e : s.events) e.t_us += std::uint32_t(rng.bounded(p.jitter_ms + 1)) * 1000u;
        std::stable_sort(s.events.begin(), s.events.end(),
                         [](const DvsEvent& a, const DvsEvent& b) { return a.t_us < b.t_us; });
    }
    return s;
}

namespace {

std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
    return std::uint32_t(b[at]) << 24 | std::uint32_t(b[at + 1]) << 16 | std::uint32_t(b[at + 2]) << 8 |
           std::uint32_t(b[at + 3]);
}

} // namespace

EventStream decode_aedat(std::span<const std::uint8_t> bytes) {
    // Header: lines starting with '#'; the first one names the version.
    std::size_t pos = 0;
    std::string version;
    while (pos < bytes.size() && bytes[pos] == '#') {
        auto eol = pos;
        while (eol < bytes.size() && bytes[eol] != '\n') ++eol;
        std::string line(bytes.begin() + std::ptrdiff_t(pos), bytes.begin() + std::ptrdiff_t(eol));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pos == 0 && line.rfind("#!AER-DAT", 0) == 0) version = line.substr(9);
        pos = eol < bytes.size() ? eol + 1 : eol;
    }
    if (version.empty()) {
        // jAER writes headerless files as AEDAT 1.0, but then there is nothing
        // to identify the file by; refuse rather than guess.
        throw FormatError("not an AEDAT file (missing #!AER-DAT header)", 0);
    }
    std::size_t addr_bytes = 0;
    if (version == "1.0") addr_bytes = 2;
    else if (version == "2.0") addr_bytes = 4;
    else throw FormatError("unsupported AEDAT version " + version, 0);

    const std::size_t record = addr_bytes + 4;
    const std::size_t payload = bytes.size() - pos;
    if (payload % record != 0)
        throw FormatError("truncated AEDAT record", pos + (payload / record) * record);

    EventStream s;
    s.width = 128;
    s.height = 128;
    s.events.reserve(payload / record);
    std::uint32_t first = 0;
    std::uint32_t last = 0;
    for (std::size_t at = pos; at < bytes.size(); at += record) {
        const std::uint32_t addr = addr_bytes == 2 ? (std::uint32_t(bytes[at]) << 8 | bytes[at + 1]) : be32(bytes, at);
        const std::uint32_t ts = be32(bytes, at + addr_bytes);
        // DVS128 address: bit 0 polarity (0 = ON), bits 1..7 x (mirrored), bits 8..14 y.
        if (addr & ~std::uint32_t(0x7FFF))
            throw FormatError("AEDAT address 0x" + [&] {
                char buf[16];
                std::snprintf(buf, sizeof buf, "%08X", addr);
                return std::string(buf);
            }() + " outside DVS128 sensor bounds", at);
        if (at == pos) first = last = ts;
        if (ts < last) throw FormatError("AEDAT timestamp regression", at);
        last = ts;
        DvsEvent e;
        e.t_us = ts - first;
        e.x = std::uint16_t(127 - ((addr >> 1) & 0x7F));
        e.y = std::uint16_t((addr >> 8) & 0x7F);
        e.polarity = (addr & 1) ? EventPolarity::Off : EventPolarity::On;
        s.events.push_back(e);
    }
    return s;
}

EventStream import_aedat(const std::filesystem::path& path) { return decode_aedat(read_file_bytes(path)); }

} // namespace snn
