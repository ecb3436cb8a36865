#include "riskguard/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskguard {

namespace {

void require_scores(std::span<const double> row, const char* what) {
  if (row.size() < 2) {
    throw RecordError(std::string(what) + ": need at least 2 classes");
  }
  for (double v : row) {
    if (!std::isfinite(v)) throw RecordError(std::string(what) + ": non-finite score");
  }
}

void require_label(int label, std::size_t classes) {
  if (label < 0 || static_cast<std::size_t>(label) >= classes) {
    throw RecordError("label " + std::to_string(label) + " out of range for " + std::to_string(classes) +
                      " classes");
  }
}

}  // namespace

void validate(const PredictionRecord& rec) {
  require_scores(rec.scores, "prediction record");
  require_label(rec.label, rec.scores.size());
}

void validate(const McDropoutRecord& rec) {
  if (rec.passes.size() < 2) {
    throw RecordError("mc-dropout record: need T >= 2 passes, got " + std::to_string(rec.passes.size()));
  }
  const auto classes = rec.passes.front().size();
  for (const auto& row : rec.passes) {
    require_scores(row, "mc-dropout record");
    if (row.size() != classes) throw RecordError("mc-dropout record: ragged pass matrix");
  }
  require_label(rec.label, classes);
}

std::vector<double> softmax(std::span<const double> scores) {
  require_scores(scores, "softmax");
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(), [peak](double s) { return std::exp(s - peak); });
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

double softmax_response(const PredictionRecord& rec, bool already_probabilities) {
  validate(rec);
  if (already_probabilities) {
    double total = 0.0;
    for (double v : rec.scores) {
      if (v < 0.0) throw RecordError("softmax response: negative probability");
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw RecordError("softmax response: probabilities sum to " + std::to_string(total));
    }
    return *std::max_element(rec.scores.begin(), rec.scores.end());
  }
  const auto probs = softmax(rec.scores);
  return *std::max_element(probs.begin(), probs.end());
}

std::vector<double> mean_response(const McDropoutRecord& rec) {
  validate(rec);
  std::vector<double> mean(rec.passes.front().size(), 0.0);
  for (const auto& row : rec.passes) {
    for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(rec.passes.size());
  return mean;
}

double mc_dropout_kappa(const McDropoutRecord& rec) {
  const auto mean = mean_response(rec);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  const auto top = static_cast<std::size_t>(std::max_element(mean.begin(), mean.end()) - mean.begin());
  const double first = rec.passes.front()[top];
  if (std::all_of(rec.passes.begin(), rec.passes.end(), [&](const auto& row) { return row[top] == first; })) {
    return 0.0;
  }
  const double mu = mean[top];
  double ss = 0.0;
  for (const auto& row : rec.passes) ss += (row[top] - mu) * (row[top] - mu);
  return -ss / static_cast<double>(rec.passes.size() - 1);
}

int topk_loss(std::span<const double> scores, int label, int k) {
  require_scores(scores, "top-k loss");
  require_label(label, scores.size());
  if (k < 1 || static_cast<std::size_t>(k) > scores.size()) {
    throw RecordError("top-k loss: k must lie in [1, C]");
  }
  // Rank of the label under (score desc, index asc).
  const double own = scores[static_cast<std::size_t>(label)];
  int ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const auto ji = static_cast<int>(j);
    if (scores[j] > own || (scores[j] == own && ji < label)) ++ahead;
  }
  return ahead < k ? 0 : 1;
}

namespace {

int record_loss(std::span<const double> scores, int label, const LossKind& loss) {
  if (loss.kind == LossKind::Kind::precomputed) {
    throw RecordError("precomputed loss requires scored records");
  }
  return topk_loss(scores, label, loss.k);
}

template <typename Fn>
void each_indexed(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (const RecordError& e) {
      throw RecordError("record " + std::to_string(i) + ": " + e.what(), i);
    } catch (const std::invalid_argument& e) {
      throw RecordError("record " + std::to_string(i) + ": " + e.what(), i);
    }
  }
}

}  // namespace

ScoredDataset score_dataset(const RecordBatch& records, const ScoringOptions& opts) {
  std::vector<ScoredExample> out;
  if (const auto* scored = std::get_if<std::vector<ScoredExample>>(&records)) {
    if (opts.kappa != KappaKind::precomputed || opts.loss.kind != LossKind::Kind::precomputed) {
      throw RecordError("scored records carry precomputed kappa and loss only");
    }
    each_indexed(scored->size(), [&](std::size_t i) {
      validate((*scored)[i]);
      out.push_back((*scored)[i]);
    });
  } else if (const auto* preds = std::get_if<std::vector<PredictionRecord>>(&records)) {
    if (opts.kappa != KappaKind::softmax_response) {
      throw RecordError("prediction records support softmax-response confidence only");
    }
    out.reserve(preds->size());
    each_indexed(preds->size(), [&](std::size_t i) {
      const auto& rec = (*preds)[i];
      out.push_back({softmax_response(rec, opts.probabilities), record_loss(rec.scores, rec.label, opts.loss),
                     rec.id});
    });
  } else {
    const auto& mcs = std::get<std::vector<McDropoutRecord>>(records);
    if (opts.kappa != KappaKind::mc_dropout) {
      throw RecordError("mc-dropout records support mc-dropout confidence only");
    }
    out.reserve(mcs.size());
    each_indexed(mcs.size(), [&](std::size_t i) {
      const auto& rec = mcs[i];
      const auto mean = mean_response(rec);
      out.push_back({mc_dropout_kappa(rec), record_loss(mean, rec.label, opts.loss), rec.id});
    });
  }
  return ScoredDataset(std::move(out));
}

}  // namespace riskguard
