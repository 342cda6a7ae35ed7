#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "driftwidth/errors.hpp"
#include "driftwidth/model.hpp"

namespace driftwidth {

/// A detector firing: when, which detector, and the alarm-time statistic
/// (Page-Hinkley: cum - cum_min; threshold: standardized excess).
struct DriftEvent {
    std::int64_t t = 0;
    std::string detector;
    double statistic = 0.0;
};

inline constexpr const char* kPageHinkleyId = "page_hinkley";
inline constexpr const char* kThresholdId = "threshold";

/**
 * Page-Hinkley increase test over the interval-width signal.
 *
 * Per observation: the running mean is refreshed with the new width, the
 * cumulative deviation accumulates (width - mean - delta), and an alarm
 * fires once cum - min(cum) exceeds lambda (strict). After an alarm the
 * accumulator and the running mean restart, so a later second rise can
 * fire again. No alarms while fewer than burn_in observations have been
 * consumed since the last reset.
 */
class PageHinkley {
public:
    PageHinkley(double delta, double lambda, std::int64_t burn_in)
        : delta_(delta), lambda_(lambda), burn_in_(burn_in) {
        if (!(delta >= 0.0) || !std::isfinite(delta))
            throw ValidationError("delta", "must be >= 0");
        if (!(lambda > 0.0) || !std::isfinite(lambda))
            throw ValidationError("lambda", "must be > 0");
        if (burn_in < 0) throw ValidationError("burn_in", "must be >= 0");
    }

    std::optional<DriftEvent> observe(std::int64_t t, double width) {
        if (!std::isfinite(width) || width < 0.0)
            throw ValidationError("width", "must be finite and >= 0");
        ++count_;
        running_mean_ += (width - running_mean_) / static_cast<double>(count_);
        cum_ += width - running_mean_ - delta_;
        cum_min_ = std::min(cum_min_, cum_);
        const double stat = cum_ - cum_min_;
        if (count_ >= burn_in_ && stat > lambda_) {
            cum_ = 0.0;
            cum_min_ = 0.0;
            running_mean_ = 0.0;
            count_ = 0;
            return DriftEvent{t, kPageHinkleyId, stat};
        }
        return std::nullopt;
    }

    double delta() const noexcept { return delta_; }
    double lambda() const noexcept { return lambda_; }
    std::int64_t burn_in() const noexcept { return burn_in_; }
    double statistic() const noexcept { return cum_ - cum_min_; }

private:
    double delta_;
    double lambda_;
    std::int64_t burn_in_;
    double running_mean_ = 0.0;
    double cum_ = 0.0;
    double cum_min_ = 0.0;
    std::int64_t count_ = 0;
};

/**
 * Page-Hinkley with scale-free defaults: the first `warmup` widths only
 * calibrate delta = delta_scale * mean and lambda = lambda_scale * std
 * (sample std over the warm-up), then the test runs on everything after.
 * No alarms during warm-up. The default warm-up of 100 samples covers the
 * width ramp of a zero-initialized model; calibrating on a shorter prefix
 * bakes the ramp into the baseline and produces false alarms on
 * stationary streams.
 */
class AutoPageHinkley {
public:
    explicit AutoPageHinkley(std::int64_t warmup = 100, double delta_scale = 0.05,
                             double lambda_scale = 10.0)
        : warmup_(warmup), delta_scale_(delta_scale), lambda_scale_(lambda_scale) {
        if (warmup < 2) throw ValidationError("warmup", "must be >= 2");
        if (!(delta_scale >= 0.0)) throw ValidationError("delta_scale", "must be >= 0");
        if (!(lambda_scale > 0.0)) throw ValidationError("lambda_scale", "must be > 0");
    }

    std::optional<DriftEvent> observe(std::int64_t t, double width) {
        if (inner_) return inner_->observe(t, width);
        if (!std::isfinite(width) || width < 0.0)
            throw ValidationError("width", "must be finite and >= 0");
        warm_ = welford_update(warm_, width);
        if (warm_.count >= warmup_)
            inner_.emplace(delta_scale_ * warm_.mean, lambda_scale_ * welford_std(warm_),
                           /*burn_in=*/0);
        return std::nullopt;
    }

    bool calibrated() const noexcept { return inner_.has_value(); }
    const PageHinkley* inner() const noexcept { return inner_ ? &*inner_ : nullptr; }

private:
    std::int64_t warmup_;
    double delta_scale_;
    double lambda_scale_;
    WelfordState warm_;
    std::optional<PageHinkley> inner_;
};

/**
 * Frozen-baseline threshold detector. Collects `baseline_window` widths,
 * freezes their mean/std, then alarms when a width strictly exceeds
 * mean + k*std; an alarm re-enters baseline collection.
 */
class ThresholdDetector {
public:
    ThresholdDetector(std::int64_t baseline_window, double k)
        : baseline_window_(baseline_window), k_(k) {
        if (baseline_window <= 1) throw ValidationError("baseline_window", "must be > 1");
        if (!(k > 0.0)) throw ValidationError("k", "must be > 0");
        buffer_.reserve(static_cast<std::size_t>(baseline_window));
    }

    std::optional<DriftEvent> observe(std::int64_t t, double width) {
        if (!std::isfinite(width)) throw ValidationError("width", "must be finite");
        if (!armed_) {
            buffer_.push_back(width);
            if (static_cast<std::int64_t>(buffer_.size()) == baseline_window_) {
                freeze();
                armed_ = true;
                buffer_.clear();
            }
            return std::nullopt;
        }
        if (width > frozen_mean_ + k_ * frozen_std_) {
            const double stat = frozen_std_ > 0.0 ? (width - frozen_mean_) / frozen_std_
                                                  : width - frozen_mean_;
            armed_ = false;
            return DriftEvent{t, kThresholdId, stat};
        }
        return std::nullopt;
    }

    bool armed() const noexcept { return armed_; }
    double frozen_mean() const noexcept { return frozen_mean_; }
    double frozen_std() const noexcept { return frozen_std_; }

private:
    void freeze() {
        WelfordState s;
        for (double w : buffer_) s = welford_update(s, w);
        frozen_mean_ = s.mean;
        frozen_std_ = welford_std(s);
    }

    std::int64_t baseline_window_;
    double k_;
    std::vector<double> buffer_;
    double frozen_mean_ = 0.0;
    double frozen_std_ = 0.0;
    bool armed_ = false;
};

/// Placeholder for detector-less runs.
struct NoDetector {
    std::optional<DriftEvent> observe(std::int64_t, double) { return std::nullopt; }
};

}  // namespace driftwidth
