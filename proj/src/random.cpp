#include "wsnauth/random.hpp"

#include <openssl/rand.h>
#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

namespace wsnauth {

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("system randomness unavailable");
  }
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (buffer_.empty()) {
      std::uint8_t block[16];
      for (int i = 0; i < 8; ++i) {
        block[i] = static_cast<std::uint8_t>(seed_ >> (56 - 8 * i));
        block[8 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
      }
      ++counter_;
      buffer_.resize(SHA256_DIGEST_LENGTH);
      SHA256(block, sizeof(block), buffer_.data());
    }
    std::size_t take = std::min(out.size() - done, buffer_.size());
    std::memcpy(out.data() + done, buffer_.data(), take);
    buffer_.erase(buffer_.begin(),
                  buffer_.begin() + static_cast<std::ptrdiff_t>(take));
    done += take;
  }
}

}  // namespace wsnauth
