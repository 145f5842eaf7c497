#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace snn {

using Digest = std::array<std::uint8_t, 32>;

/// SHA-256.
Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view text);
Digest sha256_file(const std::filesystem::path& path);

std::string to_hex(std::span<const std::uint8_t> bytes);

} // namespace snn
