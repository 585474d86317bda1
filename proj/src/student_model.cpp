#include "edgesync/student_model.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace edgesync {

void LabeledBatch::validate(int classes) const {
  if (features.rows() < 1) throw ValidationError("batch must be non-empty");
  if (features.rows() != static_cast<Eigen::Index>(labels.size()))
    throw ValidationError("batch feature/label count mismatch");
  for (int y : labels) {
    if (y < 0 || y >= classes)
      throw ValidationError("batch label out of range");
  }
}

LabeledBatch LabeledBatch::rows(Eigen::Index begin, Eigen::Index count) const {
  LabeledBatch out;
  out.features = features.middleRows(begin, count);
  out.labels.assign(labels.begin() + begin, labels.begin() + begin + count);
  return out;
}

StudentModel::StudentModel(int classes, int dim)
    : weights(Eigen::MatrixXd::Zero(classes, dim)),
      biases(Eigen::VectorXd::Zero(classes)),
      weight_momentum(Eigen::MatrixXd::Zero(classes, dim)),
      bias_momentum(Eigen::VectorXd::Zero(classes)) {
  if (classes < 2 || dim < 1)
    throw ValidationError("student model needs classes >= 2 and dim >= 1");
}

void StudentModel::reset_momentum() {
  weight_momentum.setZero();
  bias_momentum.setZero();
}

namespace {

// Row-wise logits for a batch: N x C.
Eigen::MatrixXd batch_logits(const StudentModel& m, const Eigen::MatrixXd& x) {
  return (x * m.weights.transpose()).rowwise() + m.biases.transpose();
}

// Row-wise softmax plus the per-row log-sum-exp needed for losses.
void softmax_rows(const Eigen::MatrixXd& logits, Eigen::MatrixXd& probs,
                  Eigen::VectorXd& log_norm) {
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  probs = (logits.colwise() - row_max).array().exp();
  const Eigen::VectorXd sums = probs.rowwise().sum();
  log_norm = row_max.array() + sums.array().log();
  probs.array().colwise() /= sums.array();
}

}  // namespace

Eigen::VectorXd forward(const StudentModel& model,
                        const Eigen::Ref<const Eigen::VectorXd>& features) {
  if (features.size() != model.dim())
    throw ValidationError("forward: feature dimension mismatch");
  Eigen::VectorXd z = model.weights * features + model.biases;
  z.array() -= z.maxCoeff();
  Eigen::VectorXd p = z.array().exp();
  p /= p.sum();
  return p;
}

double entropy(const Eigen::Ref<const Eigen::VectorXd>& probs) {
  double sum = 0.0;
  double h = 0.0;
  for (int i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p < 0.0) throw ValidationError("entropy: negative probability");
    sum += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw ValidationError("entropy: probabilities do not sum to 1");
  return h;
}

Gradients ce_gradients(const StudentModel& model, const LabeledBatch& batch) {
  batch.validate(model.classes());
  const Eigen::Index n = batch.size();
  Eigen::MatrixXd probs;
  Eigen::VectorXd log_norm;
  softmax_rows(batch_logits(model, batch.features), probs, log_norm);
  for (Eigen::Index i = 0; i < n; ++i) probs(i, batch.labels[i]) -= 1.0;
  Gradients g;
  g.weights = probs.transpose() * batch.features / static_cast<double>(n);
  g.biases = probs.colwise().mean();
  return g;
}

double train_epoch(StudentModel& model, const LabeledBatch& batch,
                   const HyperParams& h, int mini_batch_size, Rng& rng) {
  batch.validate(model.classes());
  h.validate();
  if (mini_batch_size < 1)
    throw ValidationError("mini_batch_size must be >= 1");

  const Eigen::Index n = batch.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  rng.shuffle(order);

  double loss_sum = 0.0;
  for (Eigen::Index start = 0; start < n; start += mini_batch_size) {
    const Eigen::Index count = std::min<Eigen::Index>(mini_batch_size, n - start);
    LabeledBatch mb;
    mb.features.resize(count, batch.features.cols());
    mb.labels.resize(static_cast<std::size_t>(count));
    for (Eigen::Index r = 0; r < count; ++r) {
      const Eigen::Index src = order[static_cast<std::size_t>(start + r)];
      mb.features.row(r) = batch.features.row(src);
      mb.labels[static_cast<std::size_t>(r)] = batch.labels[static_cast<std::size_t>(src)];
    }

    // pre-update loss on this mini-batch
    Eigen::MatrixXd probs;
    Eigen::VectorXd log_norm;
    const Eigen::MatrixXd logits = batch_logits(model, mb.features);
    softmax_rows(logits, probs, log_norm);
    double mb_loss = 0.0;
    for (Eigen::Index i = 0; i < count; ++i)
      mb_loss += log_norm[i] - logits(i, mb.labels[static_cast<std::size_t>(i)]);
    loss_sum += mb_loss;

    for (Eigen::Index i = 0; i < count; ++i)
      probs(i, mb.labels[static_cast<std::size_t>(i)]) -= 1.0;
    Eigen::MatrixXd dw =
        probs.transpose() * mb.features / static_cast<double>(count);
    dw += h.weight_decay * model.weights;  // no decay on biases
    const Eigen::VectorXd db = probs.colwise().mean();

    if (!dw.allFinite() || !db.allFinite() || !std::isfinite(mb_loss))
      throw TrainingDiverged("non-finite loss or gradient in mini-batch SGD");

    model.weight_momentum = h.momentum * model.weight_momentum + dw;
    model.bias_momentum = h.momentum * model.bias_momentum + db;
    model.weights -= h.learning_rate * model.weight_momentum;
    model.biases -= h.learning_rate * model.bias_momentum;
  }

  const double epoch_loss = loss_sum / static_cast<double>(n);
  if (!std::isfinite(epoch_loss))
    throw TrainingDiverged("non-finite epoch loss");
  return epoch_loss;
}

EvalResult evaluate(const StudentModel& model, const LabeledBatch& batch) {
  batch.validate(model.classes());
  const Eigen::Index n = batch.size();
  const Eigen::MatrixXd logits = batch_logits(model, batch.features);
  Eigen::MatrixXd probs;
  Eigen::VectorXd log_norm;
  softmax_rows(logits, probs, log_norm);

  Eigen::Index correct = 0;
  double loss_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = batch.labels[static_cast<std::size_t>(i)];
    loss_sum += log_norm[i] - logits(i, y);
    if (argmax_lowest(probs.row(i).transpose()) == y) ++correct;
  }
  return {static_cast<double>(correct) / static_cast<double>(n),
          loss_sum / static_cast<double>(n)};
}

void save_model(const StudentModel& model, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot open " + tmp + " for writing");
    out << "EDGESYNC-MODEL v1 C=" << model.classes() << " D=" << model.dim()
        << "\n";
    char buf[64];
    for (int c = 0; c < model.classes(); ++c) {
      for (int d = 0; d < model.dim(); ++d) {
        std::snprintf(buf, sizeof buf, "%.17g", model.weights(c, d));
        out << (d ? " " : "") << buf;
      }
      out << "\n";
    }
    for (int c = 0; c < model.classes(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", model.biases[c]);
      out << (c ? " " : "") << buf;
    }
    out << "\n";
    if (!out) throw ValidationError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

StudentModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file " + path);
  std::string magic, version;
  int classes = 0, dim = 0;
  std::string header;
  if (!std::getline(in, header)) throw ParseError(path + ": empty file");
  {
    std::istringstream hs(header);
    std::string ctok, dtok;
    hs >> magic >> version >> ctok >> dtok;
    if (magic != "EDGESYNC-MODEL" || version != "v1" ||
        ctok.rfind("C=", 0) != 0 || dtok.rfind("D=", 0) != 0)
      throw ParseError(path + ": bad model header");
    classes = std::stoi(ctok.substr(2));
    dim = std::stoi(dtok.substr(2));
  }
  if (classes < 2 || dim < 1) throw ParseError(path + ": bad dimensions");
  StudentModel m(classes, dim);
  for (int c = 0; c < classes; ++c)
    for (int d = 0; d < dim; ++d)
      if (!(in >> m.weights(c, d)))
        throw ParseError(path + ": truncated weight matrix");
  for (int c = 0; c < classes; ++c)
    if (!(in >> m.biases[c])) throw ParseError(path + ": truncated biases");
  return m;
}

}  // namespace edgesync
