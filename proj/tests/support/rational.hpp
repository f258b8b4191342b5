#pragma once

#include <cstdint>
#include <numeric>
#include <optional>

#include "pcgnet/metrics.hpp"

namespace pcgnet::testing {

// Exact rational arithmetic, used as an oracle for the floating-point metrics.
struct Fraction {
  std::int64_t num = 0, den = 1;

  Fraction(std::int64_t n, std::int64_t d) : num(n), den(d) {
    const auto g = std::gcd(num, den);
    if (g) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline std::optional<Fraction> ratio(std::uint64_t n, std::uint64_t d) {
  if (d == 0) return std::nullopt;
  return Fraction(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

// Harmonic mean of two fractions, exactly: 2ab / (a + b).
inline std::optional<Fraction> harmonic(std::optional<Fraction> a, std::optional<Fraction> b) {
  if (!a || !b) return std::nullopt;
  const std::int64_t n = 2 * a->num * b->num;
  const std::int64_t d = a->num * b->den + b->num * a->den;
  if (d == 0) return std::nullopt;
  return Fraction(n, d);
}

struct ExactMetrics {
  std::optional<Fraction> accuracy, sensitivity, specificity, precision, f1;
};

inline ExactMetrics exact_metrics(const ConfusionMatrix& cm) {
  ExactMetrics m;
  m.accuracy = ratio(cm.tp + cm.tn, cm.total());
  m.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.f1 = harmonic(m.precision, m.sensitivity);
  return m;
}

}  // namespace pcgnet::testing
