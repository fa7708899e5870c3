#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ranlab {

// FIPS 180-4 SHA-256, hex-encoded digest of the input bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace ranlab
