#include "proxverify/sampling.hpp"

#include "proxverify/errors.hpp"

namespace proxverify {

namespace {

Vector draw(SplitMix64& rng, std::size_t dim, double radius) {
  std::vector<double> e(dim);
  for (double& v : e) v = rng.next_symmetric(radius);
  return Vector(std::move(e));
}

void validate(const SampleSpec& spec, std::size_t dim) {
  if (spec.count == 0) throw DomainError("SampleSpec: count must be positive");
  if (!(spec.radius > 0)) throw DomainError("SampleSpec: radius must be positive");
  if (dim == 0) throw DimensionError("SampleSpec: dimension must be positive");
}

}  // namespace

std::vector<Vector> sample_points(const SampleSpec& spec, std::size_t dim) {
  validate(spec, dim);
  SplitMix64 rng(spec.seed);
  std::vector<Vector> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) out.push_back(draw(rng, dim, spec.radius));
  return out;
}

std::vector<PointPair> sample_pairs(const SampleSpec& spec, std::size_t dim) {
  validate(spec, dim);
  SplitMix64 rng(spec.seed);
  std::vector<PointPair> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) {
    Vector x = draw(rng, dim, spec.radius);
    Vector y = draw(rng, dim, spec.radius);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

SymOperator sample_psd_operator(SplitMix64& rng, std::size_t dim) {
  std::vector<double> b(dim * dim);
  for (double& v : b) v = rng.next_symmetric(1.0);
  std::vector<double> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += b[i * dim + k] * b[j * dim + k];
      m[i * dim + j] = m[j * dim + i] = s / static_cast<double>(dim);
    }
  }
  return SymOperator(dim, std::move(m));
}

SymOperator sample_symmetric_operator(SplitMix64& rng, std::size_t dim, double scale) {
  std::vector<double> m(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m[i * dim + j] = m[j * dim + i] = rng.next_symmetric(scale);
  }
  return SymOperator(dim, std::move(m));
}

}  // namespace proxverify
