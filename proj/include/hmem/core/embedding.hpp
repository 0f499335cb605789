#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmem {

// Dense vector with unit L2 norm. Construction enforces the norm so that
// every downstream cosine is a plain dot product.
class Embedding {
 public:
  static constexpr double kNormTolerance = 1e-6;

  Embedding() = default;

  // Throws InvalidArgument when the vector is empty or has zero norm.
  static Embedding normalize(std::vector<float> values);

  // Throws InvalidArgument unless |norm - 1| <= kNormTolerance.
  static Embedding from_unit(std::vector<float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const float> values() const noexcept { return values_; }

  // Little-endian IEEE-754 binary32, lowercase hex.
  std::string to_hex() const;
  static Embedding from_hex(std::string_view hex);

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  explicit Embedding(std::vector<float> values) : values_(std::move(values)) {}
  std::vector<float> values_;
};

double l2_norm(std::span<const float> v);

// Raw dot product accumulated in double; for unit vectors this is the cosine.
double dot(std::span<const float> a, std::span<const float> b);

// Cosine of two embeddings clamped to [-1, 1]. Dimension mismatch throws.
double cosine(const Embedding& a, const Embedding& b);

// Affine map of a cosine from [-1, 1] onto [0, 1].
inline double cosine_to_unit(double c) noexcept {
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return (c + 1.0) / 2.0;
}

}  // namespace hmem
