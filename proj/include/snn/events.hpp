#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "snn/topology.hpp"

namespace snn {

enum class EventPolarity : std::uint8_t { Off = 0, On = 1 };

struct DvsEvent {
    std::uint32_t t_us = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    EventPolarity polarity = EventPolarity::On;
    bool operator==(const DvsEvent&) const = default;
};

struct EventStream {
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::vector<DvsEvent> events;

    /// Throws FormatError if an event is out of bounds or timestamps regress.
    void validate() const;
    bool operator==(const EventStream&) const = default;
};

/// Malformed event or checkpoint file. `offset` is the byte offset of the
/// offending header field or record.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const { return offset_; }

private:
    std::uint64_t offset_;
};

/// Binary frames of layer dimensions, one per batching window.
struct FrameSequence {
    std::uint32_t window_ms = 10;
    LayerSpec layer{};
    std::vector<std::vector<std::uint8_t>> frames;

    std::size_t size() const { return frames.size(); }
};

// Native "DVSE" container, little-endian:
//   "DVSE" | u16 version (1) | u16 width | u16 height | u64 count |
//   count x { u32 t_us | u16 x | u16 y | u8 polarity }
inline constexpr std::uint16_t kDvseVersion = 1;
inline constexpr std::size_t kDvseHeaderBytes = 4 + 2 + 2 + 2 + 8;
inline constexpr std::size_t kDvseRecordBytes = 4 + 2 + 2 + 1;

std::vector<std::uint8_t> encode_events(const EventStream& stream);
EventStream decode_events(std::span<const std::uint8_t> bytes);
void write_events(const EventStream& stream, const std::filesystem::path& path);
EventStream read_events(const std::filesystem::path& path);

/// Header-only summary for inspection; does not read records.
struct DvseHeader {
    std::uint16_t version = 0;
    std::uint16_t width = 0;
    std::uint16_t height = 0;
    std::uint64_t count = 0;
};
DvseHeader read_events_header(std::span<const std::uint8_t> bytes);

/// Groups events into half-open windows [n*w, (n+1)*w) and marks each pixel
/// hit by at least one event (either polarity). Frames run from window 0
/// through the window of the last event. Sensor pixels map to layer cells by
/// integer division by `downscale`; sensor dims must equal layer dims times
/// the downscale factor.
FrameSequence batch_frames(const EventStream& stream, std::uint32_t window_ms, const LayerSpec& layer,
                           std::uint32_t downscale = 1);

struct MovingBarParams {
    std::uint16_t width = 32;
    std::uint16_t height = 32;
    std::uint16_t bar_width = 4;
    double speed_px_per_s = 100.0;
    std::uint32_t duration_ms = 1000;
    std::uint64_t seed = 1;
    // Each event is delayed by a uniform integer number of ms in [0, jitter_ms].
    std::uint32_t jitter_ms = 0;
};

/// Vertical bar of `bar_width` columns starting at columns [0, bar_width)
/// and translating right with wraparound. Its displacement at time t ms is
/// floor(speed * t / 1000) px. Each 1 px advance emits ON events down the
/// newly covered column and OFF events down the newly uncovered one.
EventStream gen_moving_bar(const MovingBarParams& params);

/// jAER AEDAT 1.0/2.0 files from a DVS128 (128x128). Timestamps are shifted
/// so the first event is at 0.
EventStream import_aedat(const std::filesystem::path& path);
EventStream decode_aedat(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

} // namespace snn
