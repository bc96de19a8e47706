#include "dart/svm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dart/binio.hpp"
#include "dart/rng.hpp"

namespace dart {

SvmModel svm_train(const DataMatrix& samples, const std::vector<int>& labels, double C,
                   int epochs, uint64_t seed) {
  const size_t n = samples.rows, d = samples.dim;
  if (n == 0 || d == 0) throw ShapeError("svm_train: empty sample matrix");
  if (labels.size() != n) throw ShapeError("svm_train: label count mismatch");
  if (!(C > 0.0)) throw ConfigError("svm_train: C must be positive");
  if (epochs < 1) throw ConfigError("svm_train: epochs must be >= 1");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1)
      has_pos = true;
    else if (y == -1)
      has_neg = true;
    else
      throw ConfigError("svm_train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw DegenerateTraining("svm_train: single-class input");

  // Sparse row views: kernel-mapped inputs are mostly zero blocks.
  std::vector<std::vector<std::pair<uint32_t, double>>> sparse(n);
  for (size_t i = 0; i < n; ++i) {
    const double* row = samples.row(i);
    for (size_t j = 0; j < d; ++j)
      if (row[j] != 0.0) sparse[i].emplace_back(static_cast<uint32_t>(j), row[j]);
  }

  const double lambda = 1.0 / (C * static_cast<double>(n));
  // w and b are kept as scale * (v, bv); the 1 - 1/t shrink telescopes into
  // the scale so each step touches only the sample's nonzeros. The bias rides
  // the same schedule as an implicit all-ones feature: without the shrink its
  // early steps (magnitude 1/lambda) would dwarf every later correction.
  std::vector<double> v(d, 0.0);
  double scale = 1.0, bv = 0.0;
  uint64_t t = 0;

  Rng rng(seed);
  std::vector<uint32_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = static_cast<uint32_t>(i);

  for (int e = 0; e < epochs; ++e) {
    rng.shuffle(order);
    for (uint32_t i : order) {
      ++t;
      const double step = 1.0 / (lambda * static_cast<double>(t));
      if (t > 1) scale *= 1.0 - 1.0 / static_cast<double>(t);  // t=1 zeroes w; v is 0
      double dot = 0.0;
      for (const auto& [j, x] : sparse[i]) dot += v[j] * x;
      const double score = scale * (dot + bv);
      const double y = static_cast<double>(labels[i]);
      if (y * score < 1.0) {
        const double g = step * y / scale;
        for (const auto& [j, x] : sparse[i]) v[j] += g * x;
        bv += g;
      }
    }
  }

  SvmModel m;
  m.w.resize(d);
  for (size_t j = 0; j < d; ++j) m.w[j] = scale * v[j];
  m.b = scale * bv;
  m.C = C;
  m.lambda = lambda;
  m.final_step = 1.0 / (lambda * static_cast<double>(t));
  return m;
}

double svm_score(const SvmModel& model, const std::vector<double>& psi) {
  if (psi.size() != model.w.size()) throw ShapeError("svm_score: dimension mismatch");
  double s = 0.0;
  for (size_t j = 0; j < psi.size(); ++j) s += model.w[j] * psi[j];
  return s + model.b;
}

void svm_update_online(SvmModel& model, const std::vector<double>& psi, int label,
                       double rate) {
  if (psi.size() != model.w.size())
    throw ShapeError("svm_update_online: dimension mismatch");
  const double y = static_cast<double>(label);
  double s = 0.0;
  for (size_t j = 0; j < psi.size(); ++j) s += model.w[j] * psi[j];
  s += model.b;
  const double shrink = 1.0 - rate * model.lambda;
  for (double& wj : model.w) wj *= shrink;
  model.b *= shrink;
  if (y * s < 1.0) {
    for (size_t j = 0; j < psi.size(); ++j) model.w[j] += rate * y * psi[j];
    model.b += rate * y;
  }
}

MulticlassModel multiclass_train(const DataMatrix& samples, const std::vector<int>& labels,
                                 double C, int epochs, uint64_t seed) {
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2)
    throw DegenerateTraining("multiclass_train: need at least two classes");
  MulticlassModel mc;
  mc.labels.assign(distinct.begin(), distinct.end());
  std::vector<int> ovr(labels.size());
  for (size_t c = 0; c < mc.labels.size(); ++c) {
    for (size_t i = 0; i < labels.size(); ++i)
      ovr[i] = labels[i] == mc.labels[c] ? 1 : -1;
    mc.models.push_back(svm_train(samples, ovr, C, epochs, seed + c));
  }
  return mc;
}

int multiclass_predict(const MulticlassModel& mc, const std::vector<double>& psi) {
  if (mc.models.empty()) throw ConfigError("multiclass_predict: empty model");
  size_t best = 0;
  double best_s = svm_score(mc.models[0], psi);
  for (size_t c = 1; c < mc.models.size(); ++c) {
    const double s = svm_score(mc.models[c], psi);
    if (s > best_s) {  // strict: ties keep the lowest label
      best_s = s;
      best = c;
    }
  }
  return mc.labels[best];
}

std::vector<double> multiclass_scores(const MulticlassModel& mc,
                                      const std::vector<double>& psi) {
  std::vector<double> out;
  out.reserve(mc.models.size());
  for (const SvmModel& m : mc.models) out.push_back(svm_score(m, psi));
  return out;
}

namespace {

void put_model_body(std::vector<uint8_t>& out, const SvmModel& m) {
  le_put_u32(out, static_cast<uint32_t>(m.w.size()));
  le_put_f64(out, m.b);
  le_put_f64(out, m.C);
  le_put_f64(out, m.lambda);
  le_put_f64(out, m.final_step);
  le_put_f64(out, m.score_mean);
  le_put_u64(out, m.score_count);
  for (double wj : m.w) le_put_f64(out, wj);
}

SvmModel read_model_body(ByteReader& r) {
  SvmModel m;
  const uint32_t dim = r.u32();
  m.b = r.f64();
  m.C = r.f64();
  m.lambda = r.f64();
  m.final_step = r.f64();
  m.score_mean = r.f64();
  m.score_count = r.u64();
  m.w.resize(dim);
  for (double& wj : m.w) wj = r.f64();
  return m;
}

}  // namespace

std::vector<uint8_t> serialize_svm(const SvmModel& model) {
  std::vector<uint8_t> out = {'D', 'R', 'T', 'S'};
  put_model_body(out, model);
  return out;
}

SvmModel parse_svm(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes, "svm model");
  r.expect_magic("DRTS");
  SvmModel m = read_model_body(r);
  r.done();
  return m;
}

std::vector<uint8_t> serialize_multiclass(const MulticlassModel& mc) {
  std::vector<uint8_t> out = {'D', 'R', 'T', 'M'};
  le_put_u32(out, static_cast<uint32_t>(mc.labels.size()));
  for (size_t c = 0; c < mc.labels.size(); ++c) {
    le_put_u32(out, static_cast<uint32_t>(mc.labels[c]));
    put_model_body(out, mc.models[c]);
  }
  return out;
}

MulticlassModel parse_multiclass(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes, "multiclass model");
  r.expect_magic("DRTM");
  const uint32_t n = r.u32();
  MulticlassModel mc;
  for (uint32_t c = 0; c < n; ++c) {
    mc.labels.push_back(static_cast<int>(r.u32()));
    mc.models.push_back(read_model_body(r));
  }
  r.done();
  return mc;
}

}  // namespace dart
