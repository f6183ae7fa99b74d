#include "macp/toy_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "macp/baselines.hpp"
#include "macp/errors.hpp"
#include "macp/rng.hpp"

namespace macp {

namespace {

DenseMatrix kaiming_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix m(rows, cols);
  const double bound = kaiming_bound(cols);
  for (double& v : m.values()) v = rng.uniform(-bound, bound);
  return m;
}

void check_delta_shape(const ToyModel& model, const DenseMatrix& adapter_delta) {
  if (!adapter_delta.same_shape(model.hidden_base)) {
    throw ShapeError("adapter delta must be " + std::to_string(model.hidden_base.rows()) + "x" +
                     std::to_string(model.hidden_base.cols()));
  }
}

class Adam {
 public:
  Adam(std::size_t size, const TrainConfig& config)
      : config_(config), m_(size, 0.0), v_(size, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grads[i];
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grads[i] * grads[i];
      const double m_hat = m_[i] / c1;
      const double v_hat = v_[i] / c2;
      params[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }

 private:
  TrainConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

// Uniform view over the three adapter kinds: a flat parameter vector, the
// delta it produces, and the chain rule back from d(loss)/d(delta).
class AdapterParams {
 public:
  AdapterParams(const ToyModel& model, const MethodConfig& method, std::uint64_t seed)
      : method_(method.method) {
    const std::size_t d_2 = model.hidden_base.rows();
    const std::size_t d_1 = model.hidden_base.cols();
    switch (method_) {
      case Method::kMacp:
        spectral_ = init_adapter(model.hidden_base, method.scheme, method.n, method.delta,
                                 method.alpha, seed, method.init);
        break;
      case Method::kRandomSpectral:
        spectral_ = random_spectral_init(d_1, d_2, method.n, method.alpha, seed, method.init);
        break;
      case Method::kLowRank:
        lowrank_ = lowrank_init(d_1, d_2, method.rank, seed);
        break;
    }
  }

  std::size_t count() const {
    return method_ == Method::kLowRank ? lowrank_.trainable_count() : spectral_.trainable_count();
  }

  DenseMatrix delta() const {
    return method_ == Method::kLowRank ? lowrank_delta(lowrank_) : delta_weight(spectral_);
  }

  std::vector<double> gradient(const DenseMatrix& grad_delta) const {
    if (method_ != Method::kLowRank) return grad_coeffs(spectral_, grad_delta);
    const auto g = lowrank_grads(lowrank_, grad_delta);
    std::vector<double> flat(g.grad_a.values().begin(), g.grad_a.values().end());
    flat.insert(flat.end(), g.grad_b.values().begin(), g.grad_b.values().end());
    return flat;
  }

  void apply(Adam& adam, const std::vector<double>& grads) {
    if (method_ != Method::kLowRank) {
      adam.step(spectral_.coeffs, grads);
      return;
    }
    std::vector<double> flat(lowrank_.a.values().begin(), lowrank_.a.values().end());
    flat.insert(flat.end(), lowrank_.b.values().begin(), lowrank_.b.values().end());
    adam.step(flat, grads);
    const auto split = static_cast<std::ptrdiff_t>(lowrank_.a.size());
    std::copy(flat.begin(), flat.begin() + split, lowrank_.a.values().begin());
    std::copy(flat.begin() + split, flat.end(), lowrank_.b.values().begin());
  }

 private:
  Method method_;
  AdapterState spectral_;
  LowRankState lowrank_;
};

}  // namespace

ToyModel make_toy_model(std::uint64_t seed, std::size_t hidden, std::size_t classes) {
  Rng rng(seed, RngStream::kModelWeights);
  ToyModel model;
  model.w_in = kaiming_matrix(hidden, 2, rng);
  model.hidden_base = kaiming_matrix(hidden, hidden, rng);
  model.w_out = kaiming_matrix(classes, hidden, rng);
  return model;
}

std::vector<double> forward_model(const ToyModel& model, const DenseMatrix& adapter_delta,
                                  std::span<const double> x) {
  check_delta_shape(model, adapter_delta);
  if (x.size() != model.w_in.cols()) throw ShapeError("forward_model: input must be 2-dimensional");
  auto h1 = matvec(model.w_in, x);
  for (double& v : h1) v = std::max(v, 0.0);
  auto h2 = matvec(add(model.hidden_base, adapter_delta), h1);
  for (double& v : h2) v = std::max(v, 0.0);
  return matvec(model.w_out, h2);
}

DenseMatrix forward_batch(const ToyModel& model, const DenseMatrix& adapter_delta,
                          const Dataset& batch) {
  check_delta_shape(model, adapter_delta);
  if (batch.size() == 0) throw InvalidArgument("forward_batch: empty batch");
  DenseMatrix logits(batch.size(), model.w_out.rows());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto row = forward_model(model, adapter_delta, batch.points[s]);
    std::copy(row.begin(), row.end(), logits.values().begin() + static_cast<std::ptrdiff_t>(s * row.size()));
  }
  return logits;
}

ToyObjective::ToyObjective(const ToyModel& model, const Dataset& batch)
    : model_(&model), labels_(batch.labels) {
  if (batch.size() == 0) throw InvalidArgument("toy objective: empty batch");
  if (batch.labels.size() != batch.size()) throw ShapeError("toy objective: label count mismatch");
  const std::size_t classes = model.w_out.rows();
  for (auto y : labels_) {
    if (y >= classes) throw InvalidArgument("toy objective: label out of range");
  }
  RowMajorMatrix x(2, batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    x(0, s) = batch.points[s][0];
    x(1, s) = batch.points[s][1];
  }
  features_ = (model.w_in.map() * x).cwiseMax(0.0);
}

LossGrad ToyObjective::evaluate(const DenseMatrix& adapter_delta, bool with_grad) const {
  check_delta_shape(*model_, adapter_delta);
  const auto n = static_cast<Eigen::Index>(labels_.size());
  const RowMajorMatrix weight = model_->hidden_base.map() + adapter_delta.map();
  const Eigen::MatrixXd pre = weight * features_;
  const Eigen::MatrixXd act = pre.cwiseMax(0.0);
  Eigen::MatrixXd logits = model_->w_out.map() * act;  // classes x N

  LossGrad out;
  std::size_t hits = 0;
  double loss = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    auto col = logits.col(s);
    Eigen::Index argmax = 0;
    const double top = col.maxCoeff(&argmax);
    const auto y = static_cast<Eigen::Index>(labels_[static_cast<std::size_t>(s)]);
    if (argmax == y) ++hits;
    const double shifted_target = col(y) - top;
    // Softmax written back in place for the backward pass.
    col = (col.array() - top).exp().matrix();
    const double z = col.sum();
    loss += std::log(z) - shifted_target;
    col /= z;
    col(y) -= 1.0;
  }
  out.loss = loss / static_cast<double>(n);
  out.accuracy = static_cast<double>(hits) / static_cast<double>(n);
  if (!with_grad) return out;

  logits /= static_cast<double>(n);
  Eigen::MatrixXd grad_act = model_->w_out.map().transpose() * logits;
  grad_act = (pre.array() > 0.0).select(grad_act, 0.0);
  out.grad_delta = DenseMatrix(adapter_delta.rows(), adapter_delta.cols());
  out.grad_delta.map().noalias() = grad_act * features_.transpose();
  return out;
}

DenseMatrix backward_model(const ToyModel& model, const DenseMatrix& adapter_delta,
                           const Dataset& batch) {
  return ToyObjective(model, batch).evaluate(adapter_delta).grad_delta;
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kMacp: return "macp";
    case Method::kLowRank: return "lowrank";
    case Method::kRandomSpectral: return "random_spectral";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (auto m : {Method::kMacp, Method::kLowRank, Method::kRandomSpectral}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

double RunRecord::final_accuracy() const { return epochs.empty() ? 0.0 : epochs.back().train_acc; }

std::optional<std::size_t> RunRecord::epochs_to_reach(double threshold) const {
  for (const auto& e : epochs) {
    if (e.train_acc >= threshold) return e.epoch;
  }
  return std::nullopt;
}

RunRecord train(const ToyModel& model, const MethodConfig& method, const TrainConfig& config,
                const Dataset& dataset) {
  if (config.epochs < 1) throw InvalidArgument("train: epochs must be at least 1");
  if (!(config.lr >= 0.0)) throw InvalidArgument("train: learning rate must be non-negative");
  const ToyObjective objective(model, dataset);
  AdapterParams params(model, method, config.seed);
  Adam adam(params.count(), config);

  RunRecord record;
  record.method = std::string(method_name(method.method));
  record.trainable_params = params.count();
  double best = 0.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto result = objective.evaluate(params.delta());
    if (!std::isfinite(result.loss)) {
      record.failed = true;
      record.failure = "non-finite loss at epoch " + std::to_string(epoch);
      break;
    }
    best = std::max(best, result.accuracy);
    record.epochs.push_back({epoch, result.loss, result.accuracy, best});
    params.apply(adam, params.gradient(result.grad_delta));
  }
  return record;
}

std::uint64_t fingerprint(const ToyModel& model) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const DenseMatrix* m : {&model.w_in, &model.hidden_base, &model.w_out}) {
    for (double v : m->values()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
      }
    }
  }
  return hash;
}

}  // namespace macp
