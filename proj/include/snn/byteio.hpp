#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "snn/events.hpp"

namespace snn::byteio {

/// Little-endian append-only encoder.
class Writer {
public:
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
    void tag(std::string_view t) { out_.insert(out_.end(), t.begin(), t.end()); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    std::size_t size() const { return out_.size(); }
    std::vector<std::uint8_t>& buffer() { return out_; }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) out_.push_back(std::uint8_t(v >> (8 * i)));
    }
    std::vector<std::uint8_t> out_;
};

/// Little-endian bounds-checked decoder; throws FormatError with the offset
/// of the first byte that could not be read.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> in, std::uint64_t base = 0) : in_(in), base_(base) {}

    std::uint64_t offset() const { return base_ + pos_; }
    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return pos_ == in_.size(); }

    std::span<const std::uint8_t> bytes(std::size_t n, const char* what) {
        need(n, what);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::string tag(std::size_t n, const char* what) {
        auto b = bytes(n, what);
        return std::string(b.begin(), b.end());
    }
    std::uint8_t u8(const char* what) { return std::uint8_t(get(1, what)); }
    std::uint16_t u16(const char* what) { return std::uint16_t(get(2, what)); }
    std::uint32_t u32(const char* what) { return std::uint32_t(get(4, what)); }
    std::uint64_t u64(const char* what) { return get(8, what); }
    double f64(const char* what) { return std::bit_cast<double>(get(8, what)); }

private:
    void need(std::size_t n, const char* what) {
        if (remaining() < n) throw FormatError(std::string("truncated ") + what, offset());
    }
    std::uint64_t get(int n, const char* what) {
        need(std::size_t(n), what);
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t(in_[pos_ + i]) << (8 * i);
        pos_ += std::size_t(n);
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::uint64_t base_;
    std::size_t pos_ = 0;
};

} // namespace snn::byteio
