#pragma once

#include <cstdint>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace evoset {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;
/// Discrete time index of the chain.
using Time = std::int64_t;
/// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<Vertex>;
/// Subset of a tiny vertex set (bit v set iff vertex v is a member).
using Mask = std::uint64_t;

/// Exact arithmetic for the tiny-graph oracle suite.
using Rational = boost::multiprecision::mpq_rational;

template <class Real>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool kExact = false;
  static double from_double(double x) { return x; }
  static double to_double(double x) { return x; }
  /// Absolute slack allowed when checking identities.
  static double tolerance() { return 1e-12; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool kExact = true;
  // mpq_set_d is exact, so every double weight maps to the same rational.
  static Rational from_double(double x) { return Rational(x); }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational tolerance() { return Rational(0); }
};

inline Mask to_mask(const VertexSet& set) {
  Mask m = 0;
  for (Vertex v : set) m |= Mask{1} << v;
  return m;
}

inline VertexSet from_mask(Mask m) {
  VertexSet out;
  for (Vertex v = 0; m != 0; ++v, m >>= 1) {
    if (m & 1U) out.push_back(v);
  }
  return out;
}

}  // namespace evoset
