#include "edgesync/types.hpp"

#include <cmath>

namespace edgesync {

int argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() == 0) throw ValidationError("argmax of empty vector");
  int best = 0;
  for (int i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void Sample::validate(int classes) const {
  if (true_label < 0 || true_label >= classes)
    throw ValidationError("sample true_label out of range");
  if (probs) {
    if (probs->size() != classes)
      throw ValidationError("sample probs length != class count");
    double sum = 0.0;
    for (int i = 0; i < probs->size(); ++i) {
      const double p = (*probs)[i];
      if (!(p >= 0.0 && p <= 1.0))
        throw ValidationError("sample probs entry outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("sample probs do not sum to 1");
    if (predicted_label && *predicted_label != argmax_lowest(*probs))
      throw ValidationError("predicted_label != argmax(probs)");
  }
  if (predicted_label && (*predicted_label < 0 || *predicted_label >= classes))
    throw ValidationError("sample predicted_label out of range");
}

void HyperParams::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("learning_rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw ValidationError("momentum must lie in [0,1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay))
    throw ValidationError("weight_decay must be non-negative");
}

}  // namespace edgesync
