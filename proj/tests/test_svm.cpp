#include <cmath>
#include <vector>

#include "dart/rng.hpp"
#include "dart/svm.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace dart;

namespace {

DataMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
  DataMatrix m;
  for (const auto& r : rows) m.push_row(r);
  return m;
}

int sign_of(double s) { return s > 0.0 ? 1 : -1; }

}  // namespace

TEST_CASE("a two-point problem separates with the right polarity") {
  const DataMatrix X = matrix_from({{1.0}, {-1.0}});
  const SvmModel m = svm_train(X, {1, -1}, 1.0, 50, 3);
  CHECK(m.w.size() == 1);
  CHECK(m.w[0] > 0.0);
  CHECK(svm_score(m, {1.0}) > 0.0);
  CHECK(svm_score(m, {-1.0}) < 0.0);
  CHECK(m.lambda == doctest::Approx(1.0 / (1.0 * 2.0)).epsilon(1e-12));
  CHECK(m.final_step > 0.0);
}

TEST_CASE("flipping every label exactly negates the model") {
  Rng rng(5);
  DataMatrix X;
  std::vector<int> y, y_neg;
  for (int i = 0; i < 40; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    X.push_row({label * 1.5 + rng.normal() * 0.3, label * -0.7 + rng.normal() * 0.3,
                rng.normal() * 0.3});
    y.push_back(label);
    y_neg.push_back(-label);
  }
  const SvmModel a = svm_train(X, y, 2.0, 20, 11);
  const SvmModel b = svm_train(X, y_neg, 2.0, 20, 11);
  REQUIRE(a.w.size() == b.w.size());
  for (size_t j = 0; j < a.w.size(); ++j) CHECK(b.w[j] == -a.w[j]);
  CHECK(b.b == -a.b);
}

TEST_CASE("a separable blob trains to full sign accuracy") {
  Rng rng(21);
  DataMatrix X;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    X.push_row({label * 2.0 + rng.normal() * 0.4, label * 2.0 + rng.normal() * 0.4});
    y.push_back(label);
  }
  const SvmModel m = svm_train(X, y, 1.0, 50, 7);
  int correct = 0;
  for (size_t i = 0; i < X.rows; ++i) {
    const std::vector<double> x{X.row(i)[0], X.row(i)[1]};
    if (sign_of(svm_score(m, x)) == y[i]) ++correct;
  }
  CHECK(correct == 200);
}

TEST_CASE("an asymmetric offset problem needs and learns a bias") {
  // Both classes on the positive axis: separation happens at x = 5, so a
  // bias-free score w*x cannot carve them apart with a margin.
  Rng rng(9);
  DataMatrix X;
  std::vector<int> y;
  for (int i = 0; i < 100; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    X.push_row({5.0 + label * 1.0 + rng.normal() * 0.15});
    y.push_back(label);
  }
  const SvmModel m = svm_train(X, y, 10.0, 50, 13);
  int correct = 0;
  for (size_t i = 0; i < X.rows; ++i)
    if (sign_of(svm_score(m, {X.row(i)[0]})) == y[i]) ++correct;
  CHECK(correct == 100);
  CHECK(m.b < 0.0);  // decision threshold sits at positive x
}

TEST_CASE("training demands both labels and consistent shapes") {
  const DataMatrix X = matrix_from({{1.0}, {2.0}});
  CHECK_THROWS_AS(svm_train(X, {1, 1}, 1.0, 5, 0), DegenerateTraining);
  CHECK_THROWS_AS(svm_train(X, {-1, -1}, 1.0, 5, 0), DegenerateTraining);
  CHECK_THROWS_AS(svm_train(X, {1}, 1.0, 5, 0), ShapeError);
  const DataMatrix empty;
  CHECK_THROWS_AS(svm_train(empty, {}, 1.0, 5, 0), ShapeError);
  CHECK_THROWS_AS(svm_train(X, {1, 0}, 1.0, 5, 0), ConfigError);
  CHECK_THROWS_AS(svm_train(X, {1, -1}, -1.0, 5, 0), ConfigError);
  CHECK_THROWS_AS(svm_train(X, {1, -1}, 1.0, 0, 0), ConfigError);
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
  Rng rng(33);
  DataMatrix X;
  std::vector<int> y;
  for (int i = 0; i < 64; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    X.push_row({rng.normal() + label, rng.normal(), rng.normal()});
    y.push_back(label);
  }
  const SvmModel a = svm_train(X, y, 1.0, 10, 99);
  const SvmModel b = svm_train(X, y, 1.0, 10, 99);
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
}

TEST_CASE("scoring is the plain inner product plus bias") {
  SvmModel m;
  m.w = {0.5, -1.0, 2.0};
  m.b = 0.25;
  const std::vector<double> x{1.0, 2.0, 3.0};
  CHECK(svm_score(m, x) == doctest::Approx(0.5 - 2.0 + 6.0 + 0.25).epsilon(1e-12));
  CHECK(svm_score(m, x) == doctest::Approx(oracle::dot_oracle(m.w, x) + m.b));
  CHECK_THROWS_AS(svm_score(m, {1.0, 2.0}), ShapeError);
}

TEST_CASE("online updates shrink, correct violations, and settle near the margin") {
  SvmModel m;
  m.w = {2.0, 0.0};
  m.b = 0.5;
  m.lambda = 0.5;

  // Margin comfortably satisfied: pure shrink of w and b.
  SvmModel shrunk = m;
  svm_update_online(shrunk, {3.0, 0.0}, 1, 0.1);
  const double factor = 1.0 - 0.1 * 0.5;
  CHECK(shrunk.w[0] == doctest::Approx(2.0 * factor).epsilon(1e-12));
  CHECK(shrunk.w[1] == 0.0);
  CHECK(shrunk.b == doctest::Approx(0.5 * factor).epsilon(1e-12));

  // Violated margin: the step moves the score toward the label.
  SvmModel moved = m;
  const std::vector<double> x{-0.1, 1.0};
  const double before = svm_score(moved, x);
  REQUIRE(before < 1.0);
  svm_update_online(moved, x, 1, 0.1);
  CHECK(svm_score(moved, x) > before * factor);  // hinge step beat the shrink

  // Repeated violating updates oscillate around the unit margin.
  SvmModel settle;
  settle.w = {0.0};
  settle.b = 0.0;
  settle.lambda = 0.05;
  const std::vector<double> xs{1.0};
  for (int i = 0; i < 500; ++i) svm_update_online(settle, xs, 1, 0.05);
  const double s = svm_score(settle, xs);
  CHECK(s > 0.8);
  CHECK(s < 1.2);
}

TEST_CASE("one-vs-rest separates three corner classes") {
  Rng rng(55);
  DataMatrix X;
  std::vector<int> y;
  const double cx[3] = {0.0, 4.0, 0.0};
  const double cy[3] = {0.0, 0.0, 4.0};
  for (int i = 0; i < 120; ++i) {
    const int label = i % 3;
    X.push_row({cx[label] + rng.normal() * 0.3, cy[label] + rng.normal() * 0.3});
    y.push_back(label);
  }
  const MulticlassModel mc = multiclass_train(X, y, 1.0, 30, 77);
  REQUIRE(mc.labels == std::vector<int>{0, 1, 2});
  REQUIRE(mc.models.size() == 3);
  int correct = 0;
  for (size_t i = 0; i < X.rows; ++i) {
    const std::vector<double> x{X.row(i)[0], X.row(i)[1]};
    if (multiclass_predict(mc, x) == y[i]) ++correct;
  }
  CHECK(correct == 120);
  const std::vector<double> scores = multiclass_scores(mc, {4.0, 0.0});
  REQUIRE(scores.size() == 3);
  CHECK(scores[1] > scores[0]);
  CHECK(scores[1] > scores[2]);
}

TEST_CASE("prediction ties resolve to the lowest label") {
  MulticlassModel mc;
  mc.labels = {3, 7, 9};
  for (int i = 0; i < 3; ++i) {
    SvmModel m;
    m.w = {0.0};
    m.b = (i == 2) ? -1.0 : 0.5;  // labels 3 and 7 tie, 9 trails
    mc.models.push_back(m);
  }
  CHECK(multiclass_predict(mc, {1.0}) == 3);
}

TEST_CASE("sparse labels keep their own identity through training") {
  // Non-contiguous labels: the ensemble reports them, not their positions.
  DataMatrix X = matrix_from({{0.0}, {0.1}, {5.0}, {5.1}, {-5.0}, {-5.1}});
  const std::vector<int> y{10, 10, 40, 40, 20, 20};
  const MulticlassModel mc = multiclass_train(X, y, 1.0, 40, 1);
  REQUIRE(mc.labels == std::vector<int>{10, 20, 40});
  CHECK(multiclass_predict(mc, {5.05}) == 40);
  CHECK(multiclass_predict(mc, {-5.05}) == 20);
  CHECK(multiclass_predict(mc, {0.05}) == 10);
}

TEST_CASE("model files round trip binary and ensemble forms") {
  Rng rng(8);
  SvmModel m;
  for (int i = 0; i < 10; ++i) m.w.push_back(rng.normal());
  m.b = rng.normal();
  m.C = 2.5;
  m.lambda = 0.004;
  m.final_step = 12.5;
  m.score_mean = 0.33;
  m.score_count = 17;
  const SvmModel back = parse_svm(serialize_svm(m));
  CHECK(back.w == m.w);
  CHECK(back.b == m.b);
  CHECK(back.C == m.C);
  CHECK(back.lambda == m.lambda);
  CHECK(back.final_step == m.final_step);
  CHECK(back.score_mean == m.score_mean);
  CHECK(back.score_count == m.score_count);

  MulticlassModel mc;
  mc.labels = {0, 2, 5};
  for (int c = 0; c < 3; ++c) {
    SvmModel cm;
    cm.w = {rng.normal(), rng.normal()};
    cm.b = rng.normal();
    mc.models.push_back(cm);
  }
  const MulticlassModel mback = parse_multiclass(serialize_multiclass(mc));
  REQUIRE(mback.labels == mc.labels);
  REQUIRE(mback.models.size() == mc.models.size());
  for (size_t c = 0; c < mc.models.size(); ++c) {
    CHECK(mback.models[c].w == mc.models[c].w);
    CHECK(mback.models[c].b == mc.models[c].b);
  }
}
