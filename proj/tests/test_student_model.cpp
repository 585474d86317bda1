#include <doctest.h>

#include <cmath>

#include "edgesync/student_model.hpp"

using namespace edgesync;

namespace {

StudentModel random_model(int classes, int dim, RngSeed seed, double scale = 0.7) {
  Rng rng(seed);
  StudentModel m(classes, dim);
  for (int c = 0; c < classes; ++c) {
    for (int d = 0; d < dim; ++d) m.weights(c, d) = scale * rng.normal();
    m.biases[c] = scale * rng.normal();
  }
  return m;
}

LabeledBatch random_batch(int n, int classes, int dim, RngSeed seed) {
  Rng rng(seed);
  LabeledBatch b;
  b.features.resize(n, dim);
  b.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) b.features(i, d) = rng.normal();
    b.labels[static_cast<std::size_t>(i)] =
        static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(classes)));
  }
  return b;
}

// independent loss evaluation for the finite-difference oracle: plain loops,
// no shared code with the library's vectorized path
double naive_mean_ce(const StudentModel& m, const LabeledBatch& batch) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    double max_z = -1e300;
    std::vector<double> z(static_cast<std::size_t>(m.classes()));
    for (int c = 0; c < m.classes(); ++c) {
      double dot = m.biases[c];
      for (int d = 0; d < m.dim(); ++d) dot += m.weights(c, d) * batch.features(i, d);
      z[static_cast<std::size_t>(c)] = dot;
      max_z = std::max(max_z, dot);
    }
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - max_z);
    const double lse = max_z + std::log(sum);
    total += lse - z[static_cast<std::size_t>(batch.labels[static_cast<std::size_t>(i)])];
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("forward of the zero model is uniform") {
  const StudentModel m(6, 8);
  const Eigen::VectorXd p = forward(m, Eigen::VectorXd::Random(8));
  for (int c = 0; c < 6; ++c) CHECK(p[c] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("forward saturates toward the aligned class") {
  StudentModel m(3, 4);
  Eigen::VectorXd x(4);
  x << 1.0, -0.5, 0.25, 2.0;
  m.weights.row(0) = 50.0 * x.transpose();
  const Eigen::VectorXd p = forward(m, x);
  CHECK(p[0] > 0.999999);
}

TEST_CASE("forward matches an independent reimplementation") {
  const StudentModel m = random_model(6, 32, RngSeed{11});
  Rng rng(RngSeed{12});
  Eigen::VectorXd x(32);
  for (int d = 0; d < 32; ++d) x[d] = rng.normal();
  const Eigen::VectorXd p = forward(m, x);

  // direct evaluation
  Eigen::VectorXd z = m.weights * x + m.biases;
  double denom = 0.0;
  for (int c = 0; c < 6; ++c) denom += std::exp(z[c]);
  for (int c = 0; c < 6; ++c)
    CHECK(p[c] == doctest::Approx(std::exp(z[c]) / denom).epsilon(1e-12));
}

TEST_CASE("forward is pure and rejects bad dimensions") {
  const StudentModel m = random_model(3, 4, RngSeed{1});
  const Eigen::MatrixXd before = m.weights;
  (void)forward(m, Eigen::VectorXd::Ones(4));
  CHECK(m.weights == before);
  CHECK_THROWS_AS(forward(m, Eigen::VectorXd::Ones(5)), ValidationError);
}

TEST_CASE("entropy of the named distributions") {
  CHECK(entropy(Eigen::VectorXd::Constant(6, 1.0 / 6)) ==
        doctest::Approx(std::log(6.0)).epsilon(1e-12));

  Eigen::VectorXd onehot = Eigen::VectorXd::Zero(6);
  onehot[3] = 1.0;
  CHECK(entropy(onehot) == 0.0);

  Eigen::VectorXd half = Eigen::VectorXd::Zero(6);
  half[0] = half[1] = 0.5;
  CHECK(entropy(half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("entropy rejects invalid distributions") {
  Eigen::VectorXd bad(3);
  bad << 0.5, 0.6, 0.1;  // sums to 1.2
  CHECK_THROWS_AS(entropy(bad), ValidationError);
  bad << -0.1, 0.6, 0.5;
  CHECK_THROWS_AS(entropy(bad), ValidationError);
}

TEST_CASE("zero learning rate leaves the model alone, loss equals evaluate") {
  StudentModel m = random_model(4, 6, RngSeed{21});
  const Eigen::MatrixXd w0 = m.weights;
  const LabeledBatch batch = random_batch(50, 4, 6, RngSeed{22});
  HyperParams h;
  h.learning_rate = 1e-300;  // effectively zero but passes validation
  h.momentum = 0.0;
  h.weight_decay = 0.0;
  Rng rng(RngSeed{23});
  const double loss = train_epoch(m, batch, h, 32, rng);
  CHECK((m.weights - w0).cwiseAbs().maxCoeff() < 1e-250);
  CHECK(loss == doctest::Approx(evaluate(m, batch).loss).epsilon(1e-12));
}

TEST_CASE("single step without decay or momentum is the closed-form update") {
  // one sample, one mini-batch: update must be lr * (p - onehot(y)) x^T
  StudentModel m = random_model(3, 4, RngSeed{31});
  LabeledBatch batch;
  batch.features.resize(1, 4);
  batch.features << 0.5, -1.0, 2.0, 0.25;
  batch.labels = {1};

  const Eigen::VectorXd p = forward(m, batch.features.row(0).transpose());
  Eigen::VectorXd g = p;
  g[1] -= 1.0;
  const Eigen::MatrixXd expect_w =
      m.weights - 0.1 * g * batch.features.row(0);
  const Eigen::VectorXd expect_b = m.biases - 0.1 * g;

  HyperParams h{0.1, 0.0, 0.0};
  Rng rng(RngSeed{32});
  train_epoch(m, batch, h, 32, rng);
  CHECK((m.weights - expect_w).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.biases - expect_b).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic gradient matches central finite differences") {
  // a small 3-class/4-dim instance plus 20 seeded cases
  for (std::uint64_t trial = 0; trial < 21; ++trial) {
    const int classes = trial == 0 ? 3 : 3 + static_cast<int>(trial % 4);
    const int dim = trial == 0 ? 4 : 2 + static_cast<int>(trial % 7);
    const int n = 1 + static_cast<int>(trial % 6) * 7;
    StudentModel m = random_model(classes, dim, RngSeed{100 + trial});
    const LabeledBatch batch = random_batch(n, classes, dim, RngSeed{200 + trial});

    const Gradients g = ce_gradients(m, batch);
    const double step = 1e-5;
    double max_rel = 0.0;
    auto check_entry = [&](double analytic, double* param) {
      const double keep = *param;
      *param = keep + step;
      const double up = naive_mean_ce(m, batch);
      *param = keep - step;
      const double down = naive_mean_ce(m, batch);
      *param = keep;
      const double fd = (up - down) / (2.0 * step);
      const double rel =
          std::abs(analytic - fd) /
          std::max({1e-3, std::abs(analytic), std::abs(fd)});
      max_rel = std::max(max_rel, rel);
    };
    for (int c = 0; c < classes; ++c) {
      for (int d = 0; d < dim; ++d) check_entry(g.weights(c, d), &m.weights(c, d));
      check_entry(g.biases[c], &m.biases[c]);
    }
    CHECK(max_rel < 1e-5);
  }
}

TEST_CASE("full-batch descent is non-increasing on separable data") {
  // two well-separated clusters per class, batch fits one mini-batch
  const int classes = 3, dim = 4, n = 30;
  Rng rng(RngSeed{301});
  LabeledBatch batch;
  batch.features.resize(n, dim);
  batch.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const int y = i % classes;
    batch.labels[static_cast<std::size_t>(i)] = y;
    for (int d = 0; d < dim; ++d)
      batch.features(i, d) = (d == y ? 4.0 : 0.0) + 0.1 * rng.normal();
  }
  for (double lr : {0.01, 0.05, 0.1}) {
    StudentModel m(classes, dim);
    HyperParams h{lr, 0.0, 0.0};
    Rng epoch_rng(RngSeed{302});
    double prev = 1e300;
    for (int epoch = 0; epoch < 50; ++epoch) {
      const double loss = train_epoch(m, batch, h, n, epoch_rng);
      CHECK(loss <= prev + 1e-12);
      prev = loss;
    }
  }
}

TEST_CASE("evaluate on the zero model over a balanced batch gives ln C") {
  const StudentModel m(6, 8);
  LabeledBatch batch;
  batch.features = Eigen::MatrixXd::Random(12, 8);
  batch.labels = {0, 1, 2, 3, 4, 5, 0, 1, 2, 3, 4, 5};
  const EvalResult ev = evaluate(m, batch);
  CHECK(ev.loss == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("evaluate matches a brute-force recomputation") {
  const StudentModel m = random_model(5, 9, RngSeed{41});
  const LabeledBatch batch = random_batch(64, 5, 9, RngSeed{42});
  const EvalResult ev = evaluate(m, batch);

  long correct = 0;
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    const Eigen::VectorXd p = forward(m, batch.features.row(i).transpose());
    int best = 0;
    for (int c = 1; c < 5; ++c)
      if (p[c] > p[best]) best = c;
    if (best == batch.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  CHECK(ev.accuracy == doctest::Approx(static_cast<double>(correct) / 64).epsilon(1e-12));
  CHECK(ev.loss == doctest::Approx(naive_mean_ce(m, batch)).epsilon(1e-10));
}

TEST_CASE("saturated correct logits give accuracy one") {
  const int classes = 4, dim = 4;
  StudentModel m(classes, dim);
  m.weights = 100.0 * Eigen::MatrixXd::Identity(classes, dim);
  LabeledBatch batch;
  batch.features = Eigen::MatrixXd::Identity(4, 4);
  batch.labels = {0, 1, 2, 3};
  CHECK(evaluate(m, batch).accuracy == 1.0);
}

TEST_CASE("divergence raises TrainingDiverged") {
  StudentModel m = random_model(3, 4, RngSeed{51});
  m.weights(0, 0) = std::numeric_limits<double>::infinity();
  const LabeledBatch batch = random_batch(8, 3, 4, RngSeed{52});
  HyperParams h{0.1, 0.0, 0.0};
  Rng rng(RngSeed{53});
  CHECK_THROWS_AS(train_epoch(m, batch, h, 4, rng), TrainingDiverged);
}

TEST_CASE("model checkpoints round-trip exactly") {
  const StudentModel m = random_model(6, 32, RngSeed{61});
  const std::string path = "test_model_checkpoint.txt";
  save_model(m, path);
  const StudentModel back = load_model(path);
  CHECK(back.weights == m.weights);
  CHECK(back.biases == m.biases);
  std::remove(path.c_str());
}
