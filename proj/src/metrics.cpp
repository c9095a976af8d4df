#include "textgcn/metrics.hpp"

#include "textgcn/error.hpp"

namespace textgcn {

ConfusionCounts confusion_counts(std::span<const int> pred, std::span<const int> truth, int positive) {
  if (pred.size() != truth.size()) throw ValidationError("confusion_counts: prediction and truth lengths differ");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool predicted = pred[i] == positive;
    const bool actual = truth[i] == positive;
    if (predicted && actual)
      ++c.tp;
    else if (predicted)
      ++c.fp;
    else if (actual)
      ++c.fn;
    else
      ++c.tn;
  }
  return c;
}

double accuracy_from_counts(const ConfusionCounts& counts) {
  if (counts.total() == 0) throw ValidationError("accuracy of an empty evaluation set");
  return 100.0 * static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw ValidationError("accuracy: prediction and truth lengths differ");
  if (pred.empty()) throw ValidationError("accuracy of an empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
  return 100.0 * static_cast<double>(correct) / static_cast<double>(pred.size());
}

}  // namespace textgcn
