#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace causaforge {

std::string sha256_hex(std::string_view data);

// 64-bit FNV-1a; platform independent, used for seeding.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace causaforge
