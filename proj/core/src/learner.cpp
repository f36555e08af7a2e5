#include "sgf/learner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <mutex>
#include <random>
#include <thread>

#include "sgf/errors.hpp"
#include "sgf/filter_basis.hpp"
#include "sgf/filter_engine.hpp"

namespace sgf {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

DenseMatrix gather_rows(const DenseMatrix& x, std::span<const std::size_t> rows) {
  DenseMatrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> gather(std::span<const int> v, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(v[r]);
  return out;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
  DenseMatrix p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - mx).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

void glorot(DenseMatrix& w, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
}

HeadGradient zeros_like(const HeadModel& m) {
  return {DenseMatrix::Zero(m.W0.rows(), m.W0.cols()), Vector::Zero(m.b0.size()),
          DenseMatrix::Zero(m.W1.rows(), m.W1.cols()), Vector::Zero(m.b1.size())};
}

int class_count(std::span<const int> labels) {
  int c = 0;
  for (int y : labels) {
    if (y < 0) throw ValidationError("negative class id");
    c = std::max(c, y + 1);
  }
  return c;
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

Splits split_dataset(std::size_t n, std::pair<double, double> ratios, std::uint64_t seed) {
  const auto [r_train, r_val] = ratios;
  if (!(r_train >= 0.0 && r_val >= 0.0 && r_train + r_val <= 1.0)) throw DomainError("split ratios must be a partition");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(r_train * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::floor(r_val * static_cast<double>(n)));
  Splits s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

HeadKind parse_head_kind(const std::string& s) {
  if (s == "linear") return HeadKind::kLinear;
  if (s == "mlp2" || s == "mlp") return HeadKind::kMlp2;
  throw ValidationError("head must be linear or mlp2, got '" + s + "'");
}

Optimizer parse_optimizer(const std::string& s) {
  if (s == "adam") return Optimizer::kAdam;
  if (s == "sgd") return Optimizer::kSgd;
  throw ValidationError("optimizer must be adam or sgd, got '" + s + "'");
}

DenseMatrix HeadModel::logits(const DenseMatrix& x) const {
  if (x.cols() != W0.rows()) {
    throw ShapeError("head expects " + std::to_string(W0.rows()) + " inputs, got " + std::to_string(x.cols()));
  }
  DenseMatrix z = x * W0;
  z.rowwise() += b0.transpose();
  if (kind == HeadKind::kLinear) return z;
  DenseMatrix out = z.cwiseMax(0.0) * W1;
  out.rowwise() += b1.transpose();
  return out;
}

std::vector<int> HeadModel::predict(const DenseMatrix& x) const {
  const DenseMatrix z = logits(x);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < z.cols(); ++c) {
      if (z(i, c) > z(i, best)) best = c;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

bool HeadModel::finite() const { return W0.allFinite() && b0.allFinite() && W1.allFinite() && b1.allFinite(); }

HeadModel init_head(HeadKind kind, Eigen::Index inputs, Eigen::Index hidden, Eigen::Index classes,
                    std::uint64_t seed) {
  if (inputs < 1 || classes < 1) throw ShapeError("head needs at least one input and one class");
  std::mt19937_64 rng(seed);
  HeadModel m;
  m.kind = kind;
  if (kind == HeadKind::kLinear) {
    m.W0.resize(inputs, classes);
    glorot(m.W0, rng);
    m.b0 = Vector::Zero(classes);
    m.W1.resize(0, 0);
    m.b1.resize(0);
  } else {
    if (hidden < 1) throw ShapeError("mlp2 needs a positive hidden width");
    m.W0.resize(inputs, hidden);
    m.W1.resize(hidden, classes);
    glorot(m.W0, rng);
    glorot(m.W1, rng);
    m.b0 = Vector::Zero(hidden);
    m.b1 = Vector::Zero(classes);
  }
  return m;
}

LossGradient loss_and_gradient(const HeadModel& m, const DenseMatrix& x, std::span<const int> labels,
                               bool want_input_grad) {
  if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ShapeError("label count does not match rows");
  const Eigen::Index rows = x.rows();
  if (rows == 0) throw ShapeError("empty batch");
  const Eigen::Index classes = m.outputs();
  LossGradient out;
  DenseMatrix z = x * m.W0;
  z.rowwise() += m.b0.transpose();
  DenseMatrix hidden;
  DenseMatrix logits;
  if (m.kind == HeadKind::kLinear) {
    logits = z;
  } else {
    hidden = z.cwiseMax(0.0);
    logits = hidden * m.W1;
    logits.rowwise() += m.b1.transpose();
  }
  DenseMatrix d = softmax_rows(logits);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= classes) throw ValidationError("label " + std::to_string(y) + " outside the head's classes");
    loss -= std::log(std::max(d(i, y), std::numeric_limits<double>::min()));
    d(i, y) -= 1.0;
  }
  const double inv = 1.0 / static_cast<double>(rows);
  out.loss = loss * inv;
  d *= inv;
  if (m.kind == HeadKind::kLinear) {
    out.grad.W0 = x.transpose() * d;
    out.grad.b0 = d.colwise().sum().transpose();
    out.grad.W1.resize(0, 0);
    out.grad.b1.resize(0);
    if (want_input_grad) out.input_grad = d * m.W0.transpose();
  } else {
    out.grad.W1 = hidden.transpose() * d;
    out.grad.b1 = d.colwise().sum().transpose();
    DenseMatrix dz = (d * m.W1.transpose()).array() * (z.array() > 0.0).cast<double>();
    out.grad.W0 = x.transpose() * dz;
    out.grad.b0 = dz.colwise().sum().transpose();
    if (want_input_grad) out.input_grad = dz * m.W0.transpose();
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("learning rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be >= 0");
}

HeadOptimizer::HeadOptimizer(const HeadModel& like, const TrainConfig& cfg)
    : cfg_(cfg), m_(zeros_like(like)), v_(zeros_like(like)) {}

void HeadOptimizer::step(HeadModel& m, const HeadGradient& g) {
  ++t_;
  const double lr = cfg_.lr, wd = cfg_.weight_decay;
  auto update = [&](auto& w, const auto& grad, auto& mom, auto& vel, bool decay) {
    if (cfg_.optimizer == Optimizer::kSgd) {
      if (decay && wd > 0.0) {
        w -= lr * (grad + wd * w);
      } else {
        w -= lr * grad;
      }
      return;
    }
    const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
    mom = b1 * mom + (1.0 - b1) * grad;
    vel = b2 * vel + (1.0 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    if (decay && wd > 0.0) w *= 1.0 - lr * wd;
    w.array() -= lr * (mom.array() / c1) / ((vel.array() / c2).sqrt() + cfg_.adam_eps);
  };
  update(m.W0, g.W0, m_.W0, v_.W0, true);
  update(m.b0, g.b0, m_.b0, v_.b0, false);
  if (m.kind == HeadKind::kMlp2) {
    update(m.W1, g.W1, m_.W1, v_.W1, true);
    update(m.b1, g.b1, m_.b1, v_.b1, false);
  }
}

TrainResult train_head(const DenseMatrix& embeddings, std::span<const int> labels, const Splits& splits,
                       const TrainConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(embeddings.rows()) != labels.size()) {
    throw ShapeError("embeddings have " + std::to_string(embeddings.rows()) + " rows, labels " +
                     std::to_string(labels.size()));
  }
  if (splits.train.empty()) throw ValidationError("empty training split");
  for (const auto* part : {&splits.train, &splits.val}) {
    for (std::size_t i : *part) {
      if (i >= labels.size()) throw BoundsError("split index out of range");
    }
  }
  if (!embeddings.allFinite()) throw NumericalError("embeddings contain NaN or Inf");
  const int classes = class_count(labels);
  TrainResult res;
  res.model = init_head(cfg.head, embeddings.cols(), cfg.hidden, classes, cfg.seed);
  HeadModel best = res.model;
  HeadOptimizer opt(res.model, cfg);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order = splits.train;
  const DenseMatrix val_x = gather_rows(embeddings, splits.val);
  const std::vector<int> val_y = gather(labels, splits.val);
  const std::span<const std::size_t> select_rows = splits.val.empty() ? std::span<const std::size_t>(splits.train)
                                                                      : std::span<const std::size_t>(splits.val);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + start, stop - start);
      const DenseMatrix xb = gather_rows(embeddings, rows);
      const std::vector<int> yb = gather(labels, rows);
      const LossGradient lg = loss_and_gradient(res.model, xb, yb);
      if (!std::isfinite(lg.loss)) {
        throw NumericalError("loss became non-finite at epoch " + std::to_string(epoch) + " (lr " +
                             std::to_string(cfg.lr) + " may be too high)");
      }
      total += lg.loss * static_cast<double>(rows.size());
      opt.step(res.model, lg.grad);
    }
    res.epoch_loss.push_back(total / static_cast<double>(order.size()));
    const double acc = evaluate(res.model, embeddings, labels, select_rows, Metric::kAccuracy);
    res.val_accuracy.push_back(acc);
    if (res.best_epoch < 0 || acc > res.best_val_accuracy) {
      res.best_val_accuracy = acc;
      res.best_epoch = epoch;
      best = res.model;
    }
  }
  if (!res.model.finite()) throw NumericalError("head weights became non-finite");
  if (cfg.keep_best) res.model = best;
  return res;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size()) throw ShapeError("prediction count does not match labels");
  if (labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hit += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> positive) {
  if (scores.size() != positive.size()) throw ShapeError("score count does not match labels");
  const auto rank = average_ranks(scores);
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (positive[i]) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(scores.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw ValidationError("ROC AUC needs both positive and negative examples");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double evaluate(const HeadModel& m, const DenseMatrix& embeddings, std::span<const int> labels,
                std::span<const std::size_t> rows, Metric metric) {
  const DenseMatrix x = gather_rows(embeddings, rows);
  const std::vector<int> y = gather(labels, rows);
  if (metric == Metric::kAccuracy) return accuracy(m.predict(x), y);
  const DenseMatrix p = softmax_rows(m.logits(x));
  auto column_auc = [&](Eigen::Index c) {
    std::vector<double> s(static_cast<std::size_t>(p.rows()));
    std::vector<int> pos(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = p(static_cast<Eigen::Index>(i), c);
      pos[i] = y[i] == c ? 1 : 0;
    }
    return roc_auc(s, pos);
  };
  if (p.cols() == 2) return column_auc(1);
  double sum = 0.0;
  int used = 0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const auto count = std::count(y.begin(), y.end(), static_cast<int>(c));
    if (count == 0 || count == static_cast<long>(y.size())) continue;
    sum += column_auc(c);
    ++used;
  }
  if (used == 0) throw ValidationError("ROC AUC needs at least two classes among the rows");
  return sum / used;
}

DegreeGap degree_gap(const CsrGraph& graph, std::span<const int> labels, std::span<const int> predictions,
                     std::span<const std::size_t> test) {
  if (labels.size() != graph.n() || predictions.size() != graph.n()) {
    throw ShapeError("labels and predictions must cover every node");
  }
  const DegreeStats ds = degree_stats(graph);
  std::vector<std::size_t> test_degrees;
  for (std::size_t i : test) {
    if (i >= graph.n()) throw BoundsError("test index out of range");
    test_degrees.push_back(ds.degrees[i]);
  }
  DegreeGap g;
  g.threshold = lower_median(test_degrees);
  std::size_t hit_high = 0, hit_low = 0;
  for (std::size_t i : test) {
    const bool hit = predictions[i] == labels[i];
    if (ds.degrees[i] > g.threshold) {
      ++g.n_high;
      hit_high += hit ? 1 : 0;
    } else {
      ++g.n_low;
      hit_low += hit ? 1 : 0;
    }
  }
  g.acc_high = g.n_high ? static_cast<double>(hit_high) / static_cast<double>(g.n_high) : 0.0;
  g.acc_low = g.n_low ? static_cast<double>(hit_low) / static_cast<double>(g.n_low) : 0.0;
  // one empty bucket (e.g. a regular graph) gives no gap to measure
  g.gap = (g.n_high && g.n_low) ? g.acc_high - g.acc_low : 0.0;
  return g;
}

DenseMatrix precompute_embeddings(const FilterSpec& spec, const NormalizedAdjacency& adj, const SignalMatrix& x,
                                  std::size_t* peak_working_bytes) {
  if (spec.taxonomy() == Taxonomy::kVariable && spec.theta.empty()) {
    FilterSpec s = spec;
    s.theta.assign(static_cast<std::size_t>(spec.K) + 1, 1.0);
    const BasisStack st = export_basis(s, adj, x);
    if (peak_working_bytes) *peak_working_bytes = 0;
    return st.concatenated();
  }
  FilterResult r = run_filter(spec, adj, x);
  if (peak_working_bytes) *peak_working_bytes = r.diagnostics.peak_working_bytes;
  if (r.diagnostics.non_finite_output) throw NumericalError("filter output contains NaN or Inf");
  return r.output;
}

PipelineResult run_decoupled(const LabeledGraph& g, const FilterSpec& spec, double rho, const TrainConfig& cfg) {
  g.validate();
  if (g.labels.empty()) throw ValidationError("pipeline needs labels");
  if (g.features.size() == 0) throw ValidationError("pipeline needs features");
  PipelineResult res;
  const NormalizedAdjacency adj = normalize(g.graph, rho);
  auto t0 = Clock::now();
  const DenseMatrix emb = precompute_embeddings(spec, adj, g.features, &res.peak_working_bytes);
  res.precompute_seconds = seconds_since(t0);
  t0 = Clock::now();
  res.train = train_head(emb, g.labels, g.splits, cfg);
  res.train_seconds = seconds_since(t0);
  t0 = Clock::now();
  res.predictions = res.train.model.predict(emb);
  res.inference_seconds = seconds_since(t0);
  const std::vector<int> test_pred = gather(res.predictions, g.splits.test);
  const std::vector<int> test_y = gather(g.labels, g.splits.test);
  res.accuracy = accuracy(test_pred, test_y);
  try {
    res.rocauc = evaluate(res.train.model, emb, g.labels, g.splits.test, Metric::kRocAuc);
  } catch (const ValidationError&) {
    res.rocauc.reset();
  }
  res.gap = degree_gap(*g.graph, g.labels, res.predictions, g.splits.test);
  return res;
}

FullBatchModel::FullBatchModel(const LabeledGraph& g, FilterSpec spec, double rho, const TrainConfig& cfg,
                               bool use_phi0)
    : g_(g),
      spec_(std::move(spec)),
      adj_(g.graph, rho),
      adj_t_(g.graph, 1.0 - rho),
      cfg_(cfg),
      use_phi0_(use_phi0) {
  cfg_.validate();
  g_.validate();
  if (!is_signal_independent(spec_.basis) || spec_.fusion == Fusion::kConcat) {
    throw ValidationError("full-batch mode needs a signal-independent filter with sum fusion");
  }
  validate(spec_, g_.features.cols());
  const Eigen::Index f = g_.features.cols();
  std::mt19937_64 rng(cfg_.seed + 17);
  Eigen::Index width = f;
  if (use_phi0_) {
    width = cfg_.hidden;
    phi_w_.resize(f, width);
    glorot(phi_w_, rng);
    phi_b_ = Vector::Zero(width);
  }
  head_ = init_head(cfg_.head, width, cfg_.hidden, class_count(g_.labels), cfg_.seed);
}

SignalMatrix FullBatchModel::propagate(const SignalMatrix& h) const { return apply_filter(spec_, adj_, h); }

SignalMatrix FullBatchModel::forward_embeddings() const {
  if (!use_phi0_) return propagate(g_.features);
  SignalMatrix h = g_.features * phi_w_;
  h.rowwise() += phi_b_.transpose();
  return propagate(h);
}

TrainResult FullBatchModel::train() {
  TrainResult res;
  HeadOptimizer head_opt(head_, cfg_);
  HeadModel phi;  // phi0 carried as a linear head so it shares the optimizer
  phi.kind = HeadKind::kLinear;
  phi.W0 = phi_w_;
  phi.b0 = phi_b_;
  std::optional<HeadOptimizer> phi_opt;
  if (use_phi0_) phi_opt.emplace(phi, cfg_);
  const std::vector<int> train_y = gather(g_.labels, g_.splits.train);
  const std::span<const std::size_t> select_rows =
      g_.splits.val.empty() ? std::span<const std::size_t>(g_.splits.train) : std::span<const std::size_t>(g_.splits.val);
  HeadModel best_head = head_;
  HeadModel best_phi = phi;
  for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
    const SignalMatrix z = forward_embeddings();
    const DenseMatrix zt = gather_rows(z, g_.splits.train);
    const LossGradient lg = loss_and_gradient(head_, zt, train_y, use_phi0_);
    if (!std::isfinite(lg.loss)) throw NumericalError("full-batch loss became non-finite at epoch " + std::to_string(epoch));
    res.epoch_loss.push_back(lg.loss);
    if (use_phi0_) {
      SignalMatrix dz = SignalMatrix::Zero(z.rows(), z.cols());
      for (std::size_t i = 0; i < g_.splits.train.size(); ++i) {
        dz.row(static_cast<Eigen::Index>(g_.splits.train[i])) = lg.input_grad.row(static_cast<Eigen::Index>(i));
      }
      const SignalMatrix dh = apply_filter(spec_, adj_t_, dz);
      HeadGradient pg;
      pg.W0 = g_.features.transpose() * dh;
      pg.b0 = dh.colwise().sum().transpose();
      phi_opt->step(phi, pg);
      phi_w_ = phi.W0;
      phi_b_ = phi.b0;
    }
    head_opt.step(head_, lg.grad);
    const SignalMatrix z_after = forward_embeddings();
    const double acc = evaluate(head_, z_after, g_.labels, select_rows, Metric::kAccuracy);
    res.val_accuracy.push_back(acc);
    if (res.best_epoch < 0 || acc > res.best_val_accuracy) {
      res.best_val_accuracy = acc;
      res.best_epoch = epoch;
      best_head = head_;
      best_phi = phi;
    }
  }
  if (cfg_.keep_best) {
    head_ = best_head;
    phi_w_ = best_phi.W0;
    phi_b_ = best_phi.b0;
  }
  res.model = head_;
  return res;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::vector<SweepRow> rho_sweep(const LabeledGraph& g, const FilterSpec& spec, std::span<const double> rho_grid,
                                const TrainConfig& cfg, int jobs) {
  std::vector<SweepRow> rows(rho_grid.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    const double rho = rho_grid[i];
    const PipelineResult r = run_decoupled(g, spec, rho, cfg);
    rows[i] = {rho, spec.K, r.accuracy, r.gap.gap, r.gap.acc_high, r.gap.acc_low};
  });
  return rows;
}

std::vector<SweepRow> hop_sweep(const LabeledGraph& g, const FilterSpec& spec, std::span<const int> k_grid,
                                double rho, const TrainConfig& cfg, int jobs) {
  std::vector<SweepRow> rows(k_grid.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    FilterSpec s = spec;
    s.K = k_grid[i];
    const PipelineResult r = run_decoupled(g, s, rho, cfg);
    rows[i] = {rho, s.K, r.accuracy, r.gap.gap, r.gap.acc_high, r.gap.acc_low};
  });
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.precision(17);
  out << "rho,K,accuracy,degree_gap,acc_high,acc_low\n";
  for (const auto& r : rows) {
    out << r.rho << ',' << r.K << ',' << r.accuracy << ',' << r.gap << ',' << r.acc_high << ',' << r.acc_low << '\n';
  }
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("spearman: length mismatch");
  if (a.size() < 2) return 0.0;
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

void put_tensor(std::ofstream& out, const DenseMatrix& m) {
  const std::uint64_t r = static_cast<std::uint64_t>(m.rows()), c = static_cast<std::uint64_t>(m.cols());
  out.write(reinterpret_cast<const char*>(&r), sizeof r);
  out.write(reinterpret_cast<const char*>(&c), sizeof c);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
}

DenseMatrix get_tensor(std::ifstream& in, const std::filesystem::path& path) {
  std::uint64_t r = 0, c = 0;
  in.read(reinterpret_cast<char*>(&r), sizeof r);
  in.read(reinterpret_cast<char*>(&c), sizeof c);
  if (!in || r > (1u << 24) || c > (1u << 24) || r * c * 8 > std::filesystem::file_size(path)) {
    throw ParseError("corrupt checkpoint " + path.string());
  }
  DenseMatrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      m(i, j) = v;
    }
  }
  if (!in) throw ParseError("truncated checkpoint " + path.string());
  return m;
}

}  // namespace

void save_head(const std::filesystem::path& path, const HeadModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out.write("SGH1", 4);
  const auto kind = static_cast<std::uint8_t>(m.kind);
  out.write(reinterpret_cast<const char*>(&kind), 1);
  put_tensor(out, m.W0);
  put_tensor(out, m.b0);
  put_tensor(out, m.W1);
  put_tensor(out, m.b1);
  if (!out) throw ValidationError("write failed on " + path.string());
}

HeadModel load_head(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SGH1") throw ParseError(path.string() + ": not an SGH1 checkpoint");
  std::uint8_t kind = 0;
  in.read(reinterpret_cast<char*>(&kind), 1);
  if (kind > 1) throw ParseError(path.string() + ": unknown head kind");
  HeadModel m;
  m.kind = static_cast<HeadKind>(kind);
  m.W0 = get_tensor(in, path);
  m.b0 = get_tensor(in, path);
  m.W1 = get_tensor(in, path);
  m.b1 = get_tensor(in, path);
  const bool ok = m.b0.size() == m.W0.cols() &&
                  (m.kind == HeadKind::kLinear ? m.W1.size() == 0 : (m.W1.rows() == m.W0.cols() && m.b1.size() == m.W1.cols()));
  if (!ok) throw ParseError(path.string() + ": inconsistent head shapes");
  return m;
}

}  // namespace sgf
