#pragma once

#include <cstddef>
#include <span>

namespace textgcn {

/// One-vs-rest counts for a chosen positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion_counts(std::span<const int> pred, std::span<const int> truth, int positive);

/// 100 (TP + TN) / (TP + FP + TN + FN).
double accuracy_from_counts(const ConfusionCounts& counts);

/// Percentage of positions where pred == truth. For two classes this equals
/// accuracy_from_counts of either class's one-vs-rest counts.
double accuracy(std::span<const int> pred, std::span<const int> truth);

}  // namespace textgcn
