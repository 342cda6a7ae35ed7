#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "driftwidth/common.hpp"
#include "driftwidth/errors.hpp"

namespace driftwidth {

enum class Decay { Constant, InverseSqrt };

/// Interval around a point prediction; lq <= mid <= uq always holds.
struct PredictionInterval {
    double lq = 0.0;
    double mid = 0.0;
    double uq = 0.0;
    double width = 0.0;

    static PredictionInterval make(double lq, double mid, double uq) {
        return {lq, mid, uq, uq - lq};
    }
};

/// Pinball (quantile) loss; minimized in expectation by the alpha-quantile
/// of y given the prediction's conditioning information.
inline double pinball_loss(double alpha, double y, double yhat) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("alpha", "must be in (0,1)");
    const double diff = y - yhat;
    return diff >= 0.0 ? alpha * diff : (alpha - 1.0) * diff;
}

/**
 * Linear model trained by per-sample subgradient descent on pinball loss.
 *
 * Update for a sample (x, y) with prediction yhat = w.x + b:
 *   g = -alpha      if y > yhat
 *   g = (1 - alpha) if y < yhat
 *   g = 0           if y == yhat   (tie rule: valid subgradient, no drift on exact hits)
 * then w <- w - eta*g*x, b <- b - eta*g with eta = eta0 (Constant) or
 * eta0/sqrt(n_updates+1) (InverseSqrt).
 */
class OnlineQuantileRegressor {
public:
    OnlineQuantileRegressor(double alpha, std::size_t dim, double eta0 = 0.05,
                            Decay decay = Decay::Constant)
        : alpha_(alpha), eta0_(eta0), decay_(decay), w_(dim, 0.0) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw ValidationError("alpha", "must be in (0,1)");
        if (!(eta0 > 0.0)) throw ValidationError("eta0", "must be > 0");
        if (dim == 0) throw ValidationError("dim", "must be >= 1");
    }

    double predict(std::span<const double> x) const {
        check_dim(x);
        return dot(w_, x) + b_;
    }

    void update(std::span<const double> x, double y) {
        check_dim(x);
        if (!all_finite(x) || !std::isfinite(y))
            throw ValidationError("sample", "non-finite input rejected");
        const double yhat = dot(w_, x) + b_;
        double g = 0.0;
        if (y > yhat)
            g = -alpha_;
        else if (y < yhat)
            g = 1.0 - alpha_;
        const double eta = step_size();
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] -= eta * g * x[i];
        b_ -= eta * g;
        ++n_updates_;
    }

    double step_size() const {
        return decay_ == Decay::Constant
                   ? eta0_
                   : eta0_ / std::sqrt(static_cast<double>(n_updates_ + 1));
    }

    double alpha() const noexcept { return alpha_; }
    double eta0() const noexcept { return eta0_; }
    Decay decay() const noexcept { return decay_; }
    const std::vector<double>& weights() const noexcept { return w_; }
    double bias() const noexcept { return b_; }
    std::int64_t n_updates() const noexcept { return n_updates_; }
    std::size_t dim() const noexcept { return w_.size(); }

    // Snapshot restore; used by the serializer.
    void restore(std::vector<double> w, double b, std::int64_t n_updates) {
        if (w.size() != w_.size()) throw ValidationError("w", "dimension mismatch");
        w_ = std::move(w);
        b_ = b;
        n_updates_ = n_updates;
    }

private:
    void check_dim(std::span<const double> x) const {
        if (x.size() != w_.size()) throw ValidationError("x", "dimension mismatch");
    }

    double alpha_;
    double eta0_;
    Decay decay_;
    std::vector<double> w_;
    double b_ = 0.0;
    std::int64_t n_updates_ = 0;
};

/**
 * Three independent quantile regressors (lower, median, upper) forming a
 * prediction interval. Raw predictions can cross since the three
 * optimizations are uncoupled; prediction sorts them into a valid interval
 * and counts how often the raw order differed.
 */
class IntervalModelTrio {
public:
    IntervalModelTrio(double alpha_lo, double alpha_hi, std::size_t dim,
                      double eta0 = 0.05, Decay decay = Decay::Constant)
        : lo_(alpha_lo, dim, eta0, decay),
          mid_(0.5, dim, eta0, decay),
          hi_(alpha_hi, dim, eta0, decay) {
        if (!(alpha_lo < 0.5)) throw ValidationError("alpha_lo", "must be < 0.5");
        if (!(alpha_hi > 0.5)) throw ValidationError("alpha_hi", "must be > 0.5");
    }

    PredictionInterval predict_interval(std::span<const double> x) {
        double a = lo_.predict(x);
        double b = mid_.predict(x);
        double c = hi_.predict(x);
        if (!(a <= b && b <= c)) {
            ++crossing_count_;
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
        }
        return PredictionInterval::make(a, b, c);
    }

    void update(std::span<const double> x, double y) {
        lo_.update(x, y);
        mid_.update(x, y);
        hi_.update(x, y);
    }

    const OnlineQuantileRegressor& lo() const noexcept { return lo_; }
    const OnlineQuantileRegressor& mid() const noexcept { return mid_; }
    const OnlineQuantileRegressor& hi() const noexcept { return hi_; }
    OnlineQuantileRegressor& lo() noexcept { return lo_; }
    OnlineQuantileRegressor& mid() noexcept { return mid_; }
    OnlineQuantileRegressor& hi() noexcept { return hi_; }
    std::int64_t crossing_count() const noexcept { return crossing_count_; }
    void set_crossing_count(std::int64_t n) noexcept { crossing_count_ = n; }
    std::size_t dim() const noexcept { return mid_.dim(); }

private:
    OnlineQuantileRegressor lo_;
    OnlineQuantileRegressor mid_;
    OnlineQuantileRegressor hi_;
    std::int64_t crossing_count_ = 0;
};

/// Welford running mean/variance state.
struct WelfordState {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    bool warming_up() const noexcept { return count < 2; }
};

inline WelfordState welford_update(WelfordState s, double r) {
    if (!std::isfinite(r)) throw ValidationError("r", "non-finite input rejected");
    ++s.count;
    const double delta = r - s.mean;
    s.mean += delta / static_cast<double>(s.count);
    s.m2 += delta * (r - s.mean);
    return s;
}

/// Sample standard deviation; 0 while warming up (count < 2).
inline double welford_std(const WelfordState& s) {
    if (s.count < 2) return 0.0;
    return std::sqrt(s.m2 / static_cast<double>(s.count - 1));
}

/**
 * Squared-loss SGD regressor with a Gaussian interval: yhat +- c*sigma
 * where sigma is the running standard deviation of pre-update residuals.
 * With `window` set, sigma is computed over the most recent W residuals
 * instead of the whole history, which makes the width respond faster
 * after a drift.
 */
class GaussianIntervalModel {
public:
    GaussianIntervalModel(double c, std::size_t dim, double eta0 = 0.05,
                          Decay decay = Decay::Constant,
                          std::optional<std::size_t> window = std::nullopt)
        : c_(c), eta0_(eta0), decay_(decay), w_(dim, 0.0), window_(window) {
        if (!(c > 0.0)) throw ValidationError("c", "must be > 0");
        if (!(eta0 > 0.0)) throw ValidationError("eta0", "must be > 0");
        if (dim == 0) throw ValidationError("dim", "must be >= 1");
        if (window_ && *window_ < 2) throw ValidationError("window", "must be >= 2");
    }

    double predict(std::span<const double> x) const {
        check_dim(x);
        return dot(w_, x) + b_;
    }

    double sigma() const {
        if (!window_) return welford_std(resid_stats_);
        const std::size_t n = resid_window_.size();
        if (n < 2) return 0.0;
        double mean = 0.0;
        for (double r : resid_window_) mean += r;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double r : resid_window_) ss += (r - mean) * (r - mean);
        return std::sqrt(ss / static_cast<double>(n - 1));
    }

    PredictionInterval predict_interval(std::span<const double> x) const {
        const double yhat = predict(x);
        const double half = c_ * sigma();
        return PredictionInterval::make(yhat - half, yhat, yhat + half);
    }

    void update(std::span<const double> x, double y) {
        check_dim(x);
        if (!all_finite(x) || !std::isfinite(y))
            throw ValidationError("sample", "non-finite input rejected");
        const double r = y - (dot(w_, x) + b_);
        const double eta = step_size();
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] += eta * r * x[i];
        b_ += eta * r;
        ++n_updates_;
        resid_stats_ = welford_update(resid_stats_, r);
        if (window_) {
            resid_window_.push_back(r);
            if (resid_window_.size() > *window_) resid_window_.pop_front();
        }
    }

    double step_size() const {
        return decay_ == Decay::Constant
                   ? eta0_
                   : eta0_ / std::sqrt(static_cast<double>(n_updates_ + 1));
    }

    double c() const noexcept { return c_; }
    double eta0() const noexcept { return eta0_; }
    Decay decay() const noexcept { return decay_; }
    const std::vector<double>& weights() const noexcept { return w_; }
    double bias() const noexcept { return b_; }
    std::int64_t n_updates() const noexcept { return n_updates_; }
    const WelfordState& resid_stats() const noexcept { return resid_stats_; }
    std::optional<std::size_t> window() const noexcept { return window_; }
    const std::deque<double>& resid_window() const noexcept { return resid_window_; }
    std::size_t dim() const noexcept { return w_.size(); }

    void restore(std::vector<double> w, double b, std::int64_t n_updates,
                 WelfordState stats, std::deque<double> window_contents = {}) {
        if (w.size() != w_.size()) throw ValidationError("w", "dimension mismatch");
        w_ = std::move(w);
        b_ = b;
        n_updates_ = n_updates;
        resid_stats_ = stats;
        resid_window_ = std::move(window_contents);
    }

private:
    void check_dim(std::span<const double> x) const {
        if (x.size() != w_.size()) throw ValidationError("x", "dimension mismatch");
    }

    double c_;
    double eta0_;
    Decay decay_;
    std::vector<double> w_;
    double b_ = 0.0;
    std::int64_t n_updates_ = 0;
    WelfordState resid_stats_;
    std::optional<std::size_t> window_;
    std::deque<double> resid_window_;
};

}  // namespace driftwidth
