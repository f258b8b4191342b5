// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcgnet/recording.hpp"

namespace pcgnet {

inline constexpr double kDefaultThreshold = 0.5;

// Abnormal is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept;
  bool operator==(const ConfusionMatrix&) const = default;
};

// Predicts Abnormal iff p >= threshold. Throws LengthMismatch.
ConfusionMatrix confusion(std::span<const double> probs, std::span<const Label> labels,
                          double threshold = kDefaultThreshold);

enum class Metric { Accuracy, Sensitivity, Specificity, Precision, F1 };
inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::Accuracy, Metric::Sensitivity,
                                                      Metric::Specificity, Metric::Precision,
                                                      Metric::F1};
std::string_view to_string(Metric m) noexcept;

// nullopt marks a metric whose denominator is zero.
struct MetricsReport {
  std::optional<double> accuracy, sensitivity, specificity, precision, f1;

  std::optional<double> get(Metric m) const noexcept;
  std::optional<double>& get(Metric m) noexcept;
};

MetricsReport compute_metrics(const ConfusionMatrix& cm);

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> stddev;  // population standard deviation
  std::optional<double> max;
  std::size_t excluded = 0;      // folds where the metric was undefined
};

struct AggregateReport {
  std::array<MetricSummary, 5> metrics;  // indexed like kAllMetrics
  std::size_t folds = 0;

  const MetricSummary& operator[](Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
  MetricsReport mean_report() const;
};

// Throws EmptyInput on an empty list.
AggregateReport aggregate_folds(std::span<const MetricsReport> reports);

std::string format_metric(std::optional<double> v, int precision = 4);

// `fold,tp,fp,tn,fn,accuracy,sensitivity,specificity,precision,f1`;
// undefined values are written as "undefined".
void write_metrics_csv_header(std::ostream& os);
void write_metrics_csv_row(std::ostream& os, std::string_view fold, const ConfusionMatrix& cm,
                           const MetricsReport& m);

}  // namespace pcgnet
