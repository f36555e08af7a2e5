#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sgf/filter_spec.hpp"
#include "sgf/graph.hpp"
#include "sgf/signal.hpp"

namespace sgf {

// Deterministic shuffle; sizes floor(r0 n), floor(r1 n), remainder.
Splits split_dataset(std::size_t n, std::pair<double, double> ratios = {0.6, 0.2}, std::uint64_t seed = 0);

enum class HeadKind : std::uint8_t { kLinear = 0, kMlp2 = 1 };
enum class Optimizer { kSgd, kAdam };

HeadKind parse_head_kind(const std::string& s);
Optimizer parse_optimizer(const std::string& s);

// logits = X W0 + b0 (linear) or relu(X W0 + b0) W1 + b1 (mlp2).
struct HeadModel {
  HeadKind kind = HeadKind::kLinear;
  DenseMatrix W0;
  Vector b0;
  DenseMatrix W1;
  Vector b1;

  Eigen::Index inputs() const { return W0.rows(); }
  Eigen::Index outputs() const { return kind == HeadKind::kLinear ? W0.cols() : W1.cols(); }
  DenseMatrix logits(const DenseMatrix& x) const;
  // argmax per row, ties to the lowest class id
  std::vector<int> predict(const DenseMatrix& x) const;
  bool finite() const;
};

// Glorot-uniform weights, zero biases.
HeadModel init_head(HeadKind kind, Eigen::Index inputs, Eigen::Index hidden, Eigen::Index classes,
                    std::uint64_t seed);

struct HeadGradient {
  DenseMatrix W0;
  Vector b0;
  DenseMatrix W1;
  Vector b1;
};

struct LossGradient {
  double loss = 0.0;  // mean cross-entropy over the rows
  HeadGradient grad;
  DenseMatrix input_grad;  // d loss / d x for the selected rows (full-batch mode)
};

// Mean softmax cross-entropy over rows of x and its analytic gradient.
LossGradient loss_and_gradient(const HeadModel& m, const DenseMatrix& x, std::span<const int> labels,
                               bool want_input_grad = false);

struct TrainConfig {
  int epochs = 500;
  std::size_t batch_size = 4096;
  double lr = 0.01;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;
  HeadKind head = HeadKind::kLinear;
  Eigen::Index hidden = 128;
  bool shuffle = true;
  bool keep_best = true;  // return the best-validation snapshot instead of the last state
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

struct TrainResult {
  HeadModel model;  // best-validation snapshot
  std::vector<double> epoch_loss;
  std::vector<double> val_accuracy;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
};

// Mini-batch training on precomputed embeddings.
TrainResult train_head(const DenseMatrix& embeddings, std::span<const int> labels, const Splits& splits,
                       const TrainConfig& cfg);

// Adam/SGD state for one parameter set; exposed for the full-batch trainer.
class HeadOptimizer {
 public:
  HeadOptimizer(const HeadModel& like, const TrainConfig& cfg);
  void step(HeadModel& m, const HeadGradient& g);

 private:
  TrainConfig cfg_;
  HeadGradient m_, v_;
  long t_ = 0;
};

double accuracy(std::span<const int> predicted, std::span<const int> labels);
// Rank statistic with ties counting 1/2; labels are 0/1.
double roc_auc(std::span<const double> scores, std::span<const int> positive);

enum class Metric { kAccuracy, kRocAuc };

// Accuracy, or ROC AUC (binary: softmax score of class 1; multi-class:
// macro one-vs-rest) over the given rows.
double evaluate(const HeadModel& m, const DenseMatrix& embeddings, std::span<const int> labels,
                std::span<const std::size_t> rows, Metric metric);

struct DegreeGap {
  double gap = 0.0;  // acc(high) - acc(low)
  double acc_high = 0.0;
  double acc_low = 0.0;
  std::size_t n_high = 0;
  std::size_t n_low = 0;
  std::size_t threshold = 0;  // lower median of test-node degrees; low bucket is degree <= threshold
};

DegreeGap degree_gap(const CsrGraph& graph, std::span<const int> labels, std::span<const int> predictions,
                     std::span<const std::size_t> test);

// Embeddings from the spectral stage: filter output for fixed filters and
// filters with theta; the concatenated basis stack for thetaless variable ones.
DenseMatrix precompute_embeddings(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                                  std::size_t* peak_working_bytes = nullptr);

struct PipelineResult {
  double accuracy = 0.0;
  std::optional<double> rocauc;
  DegreeGap gap;
  TrainResult train;
  std::vector<int> predictions;
  double precompute_seconds = 0.0;
  double train_seconds = 0.0;
  double inference_seconds = 0.0;
  std::size_t peak_working_bytes = 0;
};

// precompute -> train_head -> test evaluation -> degree gap.
PipelineResult run_decoupled(const LabeledGraph& g, const FilterSpec& spec, double rho, const TrainConfig& cfg);

// Full-batch scheme: phi0 linear layer, the fixed filter inside the loop,
// then the head. Gradients flow back through g(L~)^T = g(L~(1 - rho)).
class FullBatchModel {
 public:
  FullBatchModel(const LabeledGraph& g, FilterSpec spec, double rho, const TrainConfig& cfg, bool use_phi0 = true);

  // g(L~) (X W + b), or g(L~) X without phi0.
  SignalMatrix propagate(const SignalMatrix& h) const;
  SignalMatrix forward_embeddings() const;
  TrainResult train();
  const HeadModel& head() const { return head_; }

 private:
  const LabeledGraph& g_;
  FilterSpec spec_;
  NormalizedAdjacency adj_, adj_t_;
  TrainConfig cfg_;
  bool use_phi0_;
  DenseMatrix phi_w_;
  Vector phi_b_;
  HeadModel head_;
};

struct SweepRow {
  double rho = 0.5;
  int K = 0;
  double accuracy = 0.0;
  double gap = 0.0;
  double acc_high = 0.0;
  double acc_low = 0.0;
};

// Grid points run on up to `jobs` threads; rows keep grid order.
std::vector<SweepRow> rho_sweep(const LabeledGraph& g, const FilterSpec& spec, std::span<const double> rho_grid,
                                const TrainConfig& cfg, int jobs = 1);
std::vector<SweepRow> hop_sweep(const LabeledGraph& g, const FilterSpec& spec, std::span<const int> k_grid,
                                double rho, const TrainConfig& cfg, int jobs = 1);

// Runs body(i) for i in [0, count) on up to `jobs` threads. The first
// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

double spearman(std::span<const double> a, std::span<const double> b);

// "SGH1", u8 kind, u64 rows/cols per tensor, f64 values.
void save_head(const std::filesystem::path& path, const HeadModel& m);
HeadModel load_head(const std::filesystem::path& path);

}  // namespace sgf
