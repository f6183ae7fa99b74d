#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macp/dense_matrix.hpp"
#include "macp/partition.hpp"
#include "macp/spectral_adapter.hpp"

namespace macp {

/// Labelled 2D points.
struct Dataset {
  std::vector<std::array<double, 2>> points;
  std::vector<std::size_t> labels;
  std::size_t num_classes = 8;

  std::size_t size() const noexcept { return points.size(); }
};

/// logits = w_out * relu((hidden_base + delta) * relu(w_in * x)).
/// All three matrices are frozen; only the adapter on hidden_base trains.
struct ToyModel {
  DenseMatrix w_in;         // hidden x 2
  DenseMatrix hidden_base;  // hidden x hidden
  DenseMatrix w_out;        // classes x hidden
};

/// Kaiming-uniform frozen weights (fan_in = columns of each matrix).
ToyModel make_toy_model(std::uint64_t seed, std::size_t hidden = 64, std::size_t classes = 8);

std::vector<double> forward_model(const ToyModel& model, const DenseMatrix& adapter_delta,
                                  std::span<const double> x);

/// Logits for every sample, one row per sample.
DenseMatrix forward_batch(const ToyModel& model, const DenseMatrix& adapter_delta,
                          const Dataset& batch);

struct LossGrad {
  double loss = 0.0;      // mean softmax cross-entropy
  double accuracy = 0.0;  // fraction of argmax hits
  DenseMatrix grad_delta; // mean d(loss)/d(adapter_delta)
};

/// Full-batch objective with the frozen first layer precomputed.
class ToyObjective {
 public:
  ToyObjective(const ToyModel& model, const Dataset& batch);

  LossGrad evaluate(const DenseMatrix& adapter_delta, bool with_grad = true) const;

 private:
  const ToyModel* model_;
  RowMajorMatrix features_;  // hidden x N, relu(w_in * X)
  std::vector<std::size_t> labels_;
};

/// Mean cross-entropy gradient with respect to the adapter delta. ReLU
/// subgradient at zero is taken as zero. Throws InvalidArgument on an empty
/// batch.
DenseMatrix backward_model(const ToyModel& model, const DenseMatrix& adapter_delta,
                           const Dataset& batch);

enum class Method { kMacp, kLowRank, kRandomSpectral };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct MethodConfig {
  Method method = Method::kMacp;
  std::size_t n = 90;       // spectral coefficients (macp, random_spectral)
  std::size_t rank = 1;     // lowrank
  double delta = 0.7;
  double alpha = 1.0;
  PartitionScheme scheme = PartitionScheme::kThreeBand;
  CoeffInit init = CoeffInit::kKaimingUniform;
};

struct TrainConfig {
  std::size_t epochs = 2000;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double train_acc = 0.0;
  double best_acc = 0.0;  // running max of train_acc

  bool operator==(const EpochLog&) const = default;
};

struct RunRecord {
  std::string method;
  std::size_t trainable_params = 0;
  std::vector<EpochLog> epochs;
  bool failed = false;
  std::string failure;

  double final_accuracy() const;
  /// First epoch whose train_acc reaches the threshold.
  std::optional<std::size_t> epochs_to_reach(double threshold) const;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Full-batch Adam on the adapter parameters only. Metrics logged for an
/// epoch are those of the parameters entering that epoch. A non-finite loss
/// ends the run and marks it failed.
RunRecord train(const ToyModel& model, const MethodConfig& method, const TrainConfig& config,
                const Dataset& dataset);

/// FNV-1a over the raw bytes of the frozen matrices.
std::uint64_t fingerprint(const ToyModel& model);

}  // namespace macp
