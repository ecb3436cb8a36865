#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "riskguard/selective.hpp"

namespace riskguard {

/// Per-class scores of a single forward pass plus the true label.
struct PredictionRecord {
  std::vector<double> scores;
  int label = 0;
  std::optional<std::string> id;
};

/// T stochastic forward passes (rows) over C classes (columns).
struct McDropoutRecord {
  std::vector<std::vector<double>> passes;
  int label = 0;
  std::optional<std::string> id;
};

/// Raised for records that break their layout's invariants. `index` is the
/// position of the offending record when known.
class RecordError : public std::runtime_error {
 public:
  explicit RecordError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), index_(index) {}
  std::optional<std::size_t> index() const { return index_; }

 private:
  std::optional<std::size_t> index_;
};

void validate(const PredictionRecord& rec);
void validate(const McDropoutRecord& rec);

std::vector<double> softmax(std::span<const double> scores);

/// Maximum class probability. With `already_probabilities` the scores must be
/// a distribution (nonnegative, summing to 1 within 1e-6); otherwise they are
/// treated as logits and normalized first.
double softmax_response(const PredictionRecord& rec, bool already_probabilities);

/// Negative unbiased variance, across passes, of the column whose mean
/// response is largest (lowest index on ties).
double mc_dropout_kappa(const McDropoutRecord& rec);

/// 0 iff the label is among the k highest scores, ranked by (score desc,
/// index asc).
int topk_loss(std::span<const double> scores, int label, int k);
inline int topk_loss(const PredictionRecord& rec, int k) { return topk_loss(rec.scores, rec.label, k); }

/// Column means of the pass matrix.
std::vector<double> mean_response(const McDropoutRecord& rec);

enum class KappaKind { softmax_response, mc_dropout, precomputed };

struct LossKind {
  enum class Kind { topk, precomputed } kind = Kind::topk;
  int k = 1;

  static LossKind top(int k) { return {Kind::topk, k}; }
  static LossKind given() { return {Kind::precomputed, 0}; }
};

using RecordBatch =
    std::variant<std::vector<ScoredExample>, std::vector<PredictionRecord>, std::vector<McDropoutRecord>>;

struct ScoringOptions {
  KappaKind kappa = KappaKind::softmax_response;
  LossKind loss = LossKind::top(1);
  // Prediction scores are probabilities rather than logits.
  bool probabilities = true;
};

/// Turns a homogeneous batch of records into a scored dataset, one example
/// per record in input order. MC-dropout losses are taken on the mean
/// response. Incompatible kind/layout combinations and bad records raise
/// RecordError carrying the record index.
ScoredDataset score_dataset(const RecordBatch& records, const ScoringOptions& opts);

}  // namespace riskguard
