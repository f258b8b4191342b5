// Copyright 2026 The pcgnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pcgnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "pcgnet/errors.hpp"

namespace pcgnet {

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(std::span<const double> probs, std::span<const Label> labels,
                          double threshold) {
  if (probs.size() != labels.size()) {
    fail(ErrorCode::LengthMismatch, std::to_string(probs.size()) + " probabilities vs " +
                                        std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted_abnormal = probs[i] >= threshold;
    const bool abnormal = labels[i] == Label::Abnormal;
    if (predicted_abnormal) (abnormal ? cm.tp : cm.fp) += 1;
    else (abnormal ? cm.fn : cm.tn) += 1;
  }
  return cm;
}

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::Accuracy: return "accuracy";
    case Metric::Sensitivity: return "sensitivity";
    case Metric::Specificity: return "specificity";
    case Metric::Precision: return "precision";
    case Metric::F1: return "f1";
  }
  return "?";
}

std::optional<double> MetricsReport::get(Metric m) const noexcept {
  switch (m) {
    case Metric::Accuracy: return accuracy;
    case Metric::Sensitivity: return sensitivity;
    case Metric::Specificity: return specificity;
    case Metric::Precision: return precision;
    case Metric::F1: return f1;
  }
  return std::nullopt;
}

std::optional<double>& MetricsReport::get(Metric m) noexcept {
  switch (m) {
    case Metric::Accuracy: return accuracy;
    case Metric::Sensitivity: return sensitivity;
    case Metric::Specificity: return specificity;
    case Metric::Precision: return precision;
    case Metric::F1: break;
  }
  return f1;
}

namespace {

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  MetricsReport r;
  r.accuracy = ratio(cm.tp + cm.tn, cm.total());
  r.sensitivity = ratio(cm.tp, cm.tp + cm.fn);
  r.specificity = ratio(cm.tn, cm.tn + cm.fp);
  r.precision = ratio(cm.tp, cm.tp + cm.fp);
  if (r.precision && r.sensitivity) {
    // 2PR/(P+R) == 2tp/(2tp+fp+fn); undefined when both are zero.
    r.f1 = ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn);
    if (cm.tp == 0) r.f1 = std::nullopt;
  }
  return r;
}

MetricsReport AggregateReport::mean_report() const {
  MetricsReport r;
  for (Metric m : kAllMetrics) r.get(m) = (*this)[m].mean;
  return r;
}

AggregateReport aggregate_folds(std::span<const MetricsReport> reports) {
  if (reports.empty()) fail(ErrorCode::EmptyInput, "no fold reports to aggregate");
  AggregateReport agg;
  agg.folds = reports.size();
  for (std::size_t k = 0; k < kAllMetrics.size(); ++k) {
    std::vector<double> vals;
    for (const auto& r : reports) {
      if (const auto v = r.get(kAllMetrics[k])) vals.push_back(*v);
    }
    auto& s = agg.metrics[k];
    s.excluded = reports.size() - vals.size();
    if (vals.empty()) continue;
    double sum = 0.0;
    for (double v : vals) sum += v;
    const double mean = sum / static_cast<double>(vals.size());
    double sq = 0.0;
    for (double v : vals) sq += (v - mean) * (v - mean);
    s.mean = mean;
    s.stddev = std::sqrt(sq / static_cast<double>(vals.size()));
    s.max = *std::max_element(vals.begin(), vals.end());
  }
  return agg;
}

std::string format_metric(std::optional<double> v, int precision) {
  if (!v) return "undefined";
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << *v;
  return os.str();
}

void write_metrics_csv_header(std::ostream& os) {
  os << "fold,tp,fp,tn,fn,accuracy,sensitivity,specificity,precision,f1\n";
}

void write_metrics_csv_row(std::ostream& os, std::string_view fold, const ConfusionMatrix& cm,
                           const MetricsReport& m) {
  os << fold << ',' << cm.tp << ',' << cm.fp << ',' << cm.tn << ',' << cm.fn;
  for (Metric k : kAllMetrics) os << ',' << format_metric(m.get(k), 6);
  os << '\n';
}

}  // namespace pcgnet
