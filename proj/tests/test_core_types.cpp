#include <doctest.h>

#include <set>

#include "edgesync/rng.hpp"
#include "edgesync/types.hpp"

using namespace edgesync;

TEST_CASE("split_seed is deterministic and pure") {
  const RngSeed a = split_seed(RngSeed{42}, "edge0");
  const RngSeed b = split_seed(RngSeed{42}, "edge0");
  CHECK(a.value == b.value);

  const RngSeed x1 = split_seed(RngSeed{0}, "x");
  const RngSeed x2 = split_seed(RngSeed{0}, "x");
  CHECK(x1.value == x2.value);
}

TEST_CASE("split_seed regression constants") {
  // frozen from an independent evaluation of the hash chain
  CHECK(split_seed(RngSeed{42}, "edge0").value == 0xfec3e1c4d67eaa2aULL);
  CHECK(split_seed(RngSeed{42}, "edge1").value == 0x4ad16c0bb187ef57ULL);
  CHECK(split_seed(RngSeed{0}, "x").value == 0x338262d8f096398fULL);
  CHECK(split_seed(RngSeed{42}, "edge0").value !=
        split_seed(RngSeed{42}, "edge1").value);
}

TEST_CASE("distinct tags spread over distinct seeds") {
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i)
    seen.insert(split_seed(RngSeed{7}, "tag/" + std::to_string(i)).value);
  CHECK(seen.size() == 1000);
}

TEST_CASE("rng uniform stays in [0,1) and replays") {
  Rng r1(RngSeed{123}), r2(RngSeed{123});
  for (int i = 0; i < 1000; ++i) {
    const double u = r1.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == r2.uniform());
  }
}

TEST_CASE("rng uniform_int respects the bound") {
  Rng r(RngSeed{5});
  for (int i = 0; i < 1000; ++i) CHECK(r.uniform_int(7) < 7);
  CHECK(r.uniform_int(1) == 0);
}

TEST_CASE("rng normal has roughly standard moments") {
  Rng r(RngSeed{99});
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  Eigen::VectorXd v(4);
  v << 0.25, 0.25, 0.25, 0.25;
  CHECK(argmax_lowest(v) == 0);
  v << 0.1, 0.4, 0.4, 0.1;
  CHECK(argmax_lowest(v) == 1);
}

TEST_CASE("sample invariants") {
  Sample s;
  s.features = Eigen::VectorXd::Zero(4);
  s.true_label = 2;
  Eigen::VectorXd p(3);
  p << 0.2, 0.5, 0.3;
  s.probs = p;
  s.predicted_label = 1;
  CHECK_NOTHROW(s.validate(3));

  s.predicted_label = 0;  // not the argmax
  CHECK_THROWS_AS(s.validate(3), ValidationError);

  s.predicted_label = 1;
  (*s.probs)[0] = 0.3;  // sum now 1.1
  CHECK_THROWS_AS(s.validate(3), ValidationError);

  s.probs = Eigen::VectorXd::Constant(4, 0.25);  // wrong length
  CHECK_THROWS_AS(s.validate(3), ValidationError);
}

TEST_CASE("hyperparameter range checks") {
  HyperParams h;
  CHECK_NOTHROW(h.validate());
  h.learning_rate = 0.0;
  CHECK_THROWS_AS(h.validate(), ValidationError);
  h.learning_rate = 0.1;
  h.momentum = 1.0;
  CHECK_THROWS_AS(h.validate(), ValidationError);
  h.momentum = 0.5;
  h.weight_decay = -1e-9;
  CHECK_THROWS_AS(h.validate(), ValidationError);
}
