#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include <json.hpp>

#include "vfl/errors.hpp"
#include "vfl/image.hpp"

namespace vfl {

// Threshold accuracy levels: 1.25, 1.25^2, 1.25^3.
inline constexpr double kDeltaThreshold1 = 1.25;
inline constexpr double kDeltaThreshold2 = 1.5625;
inline constexpr double kDeltaThreshold3 = 1.953125;

struct MetricsReport {
  double rel = 0;
  double rms = 0;
  double log10 = 0;
  double delta1 = 0;
  double delta2 = 0;
  double delta3 = 0;
  std::int64_t valid_pixel_count = 0;
  // Predictions excluded from the log10 mean (non-positive or non-finite);
  // they still count against rel, rms and every delta.
  std::int64_t nonpositive_pred_count = 0;
};

inline nlohmann::json to_json(const MetricsReport& r) {
  return nlohmann::json{{"rel", r.rel},
                        {"rms", r.rms},
                        {"log10", r.log10},
                        {"delta1", r.delta1},
                        {"delta2", r.delta2},
                        {"delta3", r.delta3},
                        {"valid_pixel_count", r.valid_pixel_count},
                        {"nonpositive_pred_count", r.nonpositive_pred_count}};
}

// Pools pixels across any number of map pairs; aggregate metrics weight
// every pixel equally rather than averaging per-frame numbers.
class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(std::optional<double> cap_m = std::nullopt) : cap_(cap_m) {
    if (cap_ && !(*cap_ > 0)) throw InputError("depth cap must be positive");
  }

  // Ground-truth pixels are evaluated when finite, positive and within the
  // cap; everything else is skipped.
  void add(const DepthMap& pred, const DepthMap& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height())
      throw InputError("prediction and ground truth differ in size");
    for (std::size_t i = 0; i < gt.size(); ++i) {
      const double yt = gt[i];
      if (!(yt > 0) || !std::isfinite(yt)) continue;
      if (cap_ && yt > *cap_) continue;
      const double yp = pred[i];
      ++n_;
      const double err = yp - yt;
      sum_rel_ += std::abs(err) / yt;
      sum_sq_ += err * err;
      if (yp > 0 && std::isfinite(yp)) {
        sum_log_ += std::abs(std::log10(yp) - std::log10(yt));
        ++n_log_;
        const double ratio = std::max(yp / yt, yt / yp);
        hits1_ += ratio < kDeltaThreshold1;
        hits2_ += ratio < kDeltaThreshold2;
        hits3_ += ratio < kDeltaThreshold3;
      } else {
        ++nonpos_;
      }
    }
  }

  std::int64_t valid_pixel_count() const { return n_; }
  bool empty() const { return n_ == 0; }

  MetricsReport report() const {
    if (n_ == 0) throw EmptyEvaluationError("no pixels passed the validity mask");
    const double n = static_cast<double>(n_);
    MetricsReport r;
    r.rel = sum_rel_ / n;
    r.rms = std::sqrt(sum_sq_ / n);
    r.log10 = n_log_ > 0 ? sum_log_ / static_cast<double>(n_log_) : 0.0;
    r.delta1 = static_cast<double>(hits1_) / n;
    r.delta2 = static_cast<double>(hits2_) / n;
    r.delta3 = static_cast<double>(hits3_) / n;
    r.valid_pixel_count = n_;
    r.nonpositive_pred_count = nonpos_;
    return r;
  }

 private:
  std::optional<double> cap_;
  std::int64_t n_ = 0;
  std::int64_t n_log_ = 0;
  std::int64_t nonpos_ = 0;
  std::int64_t hits1_ = 0, hits2_ = 0, hits3_ = 0;
  double sum_rel_ = 0;
  double sum_sq_ = 0;
  double sum_log_ = 0;
};

inline MetricsReport evaluate(const DepthMap& pred, const DepthMap& gt,
                              std::optional<double> cap_m = std::nullopt) {
  MetricsAccumulator acc(cap_m);
  acc.add(pred, gt);
  return acc.report();
}

// Mean squared error over pixels with finite positive ground truth.
inline double mse_loss(const DepthMap& pred, const DepthMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw InputError("prediction and ground truth differ in size");
  double s = 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double yt = gt[i];
    if (!(yt > 0) || !std::isfinite(yt)) continue;
    const double err = pred[i] - yt;
    s += err * err;
    ++n;
  }
  if (n == 0) throw EmptyEvaluationError("no pixels passed the validity mask");
  return s / static_cast<double>(n);
}

// Reverse Huber: residuals within c of zero contribute |r|, larger ones
// (r^2 + c^2) / (2c), with c = 0.05 * max |r| over the evaluated pixels.
inline double berhu_loss(const DepthMap& pred, const DepthMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height())
    throw InputError("prediction and ground truth differ in size");
  double max_abs = 0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double yt = gt[i];
    if (!(yt > 0) || !std::isfinite(yt)) continue;
    max_abs = std::max(max_abs, std::abs(pred[i] - yt));
    ++n;
  }
  if (n == 0) throw EmptyEvaluationError("no pixels passed the validity mask");
  if (max_abs == 0) return 0;
  const double c = 0.05 * max_abs;
  double s = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double yt = gt[i];
    if (!(yt > 0) || !std::isfinite(yt)) continue;
    const double r = pred[i] - yt;
    const double a = std::abs(r);
    s += a <= c ? a : (r * r + c * c) / (2 * c);
  }
  return s / static_cast<double>(n);
}

}  // namespace vfl
