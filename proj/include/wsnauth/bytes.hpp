#ifndef WSNAUTH_BYTES_HPP
#define WSNAUTH_BYTES_HPP

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsnauth/errors.hpp"

namespace wsnauth {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

Bytes to_bytes(std::string_view s);

std::string to_hex(BytesView b);
Result<Bytes> from_hex(std::string_view hex);

Bytes concat(std::initializer_list<BytesView> parts);

void append(Bytes& out, BytesView b);
void append_u64_be(Bytes& out, std::uint64_t v);
std::uint64_t read_u64_be(const std::uint8_t* p);

// Comparison time depends only on the lengths.
bool ct_equal(BytesView a, BytesView b);

// Requires a.size() == b.size().
Bytes xor_bytes(BytesView a, BytesView b);

inline bool equal(BytesView a, BytesView b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace wsnauth

#endif
