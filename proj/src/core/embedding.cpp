#include "hmem/core/embedding.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>

#include "hmem/error.hpp"

namespace hmem {

double l2_norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(s);
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  for (std::size_t i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

Embedding Embedding::normalize(std::vector<float> values) {
  if (values.empty()) throw InvalidArgument("embedding is empty");
  double norm = l2_norm(values);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw InvalidArgument("embedding has zero norm");
  for (float& x : values) x = static_cast<float>(static_cast<double>(x) / norm);
  return Embedding(std::move(values));
}

Embedding Embedding::from_unit(std::vector<float> values) {
  if (values.empty()) throw InvalidArgument("embedding is empty");
  double norm = l2_norm(values);
  if (!(std::fabs(norm - 1.0) <= kNormTolerance)) {
    throw InvalidArgument("embedding is not unit norm (|v| = " + std::to_string(norm) + ")");
  }
  return Embedding(std::move(values));
}

std::string Embedding::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(values_.size() * 8);
  for (float f : values_) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    for (int byte = 0; byte < 4; ++byte) {
      auto b = static_cast<unsigned>((bits >> (8 * byte)) & 0xffu);
      out.push_back(kDigits[b >> 4]);
      out.push_back(kDigits[b & 0xf]);
    }
  }
  return out;
}

Embedding Embedding::from_hex(std::string_view hex) {
  if (hex.empty()) return {};
  if (hex.size() % 8 != 0) throw InvalidArgument("embedding hex length not a multiple of 8");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::vector<float> values(hex.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int byte = 0; byte < 4; ++byte) {
      int hi = nibble(hex[i * 8 + byte * 2]);
      int lo = nibble(hex[i * 8 + byte * 2 + 1]);
      if (hi < 0 || lo < 0) throw InvalidArgument("embedding hex has a non-hex digit");
      bits |= static_cast<std::uint32_t>(hi << 4 | lo) << (8 * byte);
    }
    std::memcpy(&values[i], &bits, sizeof bits);
  }
  return from_unit(std::move(values));
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
  }
  double c = dot(a.values(), b.values());
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

}  // namespace hmem
