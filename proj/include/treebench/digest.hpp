#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace treebench {

// FNV-1a 64-bit over bytes. Keys stage caches and run manifests; not a
// cryptographic hash.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// 16-char lowercase hex form used in artifact filenames.
std::string digest_hex(std::string_view bytes);

}  // namespace treebench
