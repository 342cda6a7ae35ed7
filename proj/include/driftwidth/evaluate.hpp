#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftwidth/detect.hpp"
#include "driftwidth/errors.hpp"
#include "driftwidth/model.hpp"
#include "driftwidth/stream.hpp"

namespace driftwidth {

template <class M>
concept IntervalModel = requires(M m, std::span<const double> x, double y) {
    { m.predict_interval(x) } -> std::same_as<PredictionInterval>;
    m.update(x, y);
};

template <class D>
concept WidthDetector = requires(D d, std::int64_t t, double w) {
    { d.observe(t, w) } -> std::same_as<std::optional<DriftEvent>>;
};

/// Analysis windows for the experiment metrics. Bounds are inclusive
/// timesteps; windows falling outside the log are clamped.
struct EvalWindows {
    std::int64_t smooth_w = 25;
    std::int64_t corr_lo = 450, corr_hi = 650;
    std::int64_t pre_lo = 400, pre_hi = 480;
    std::int64_t post_lo = 520, post_hi = 600;
    std::int64_t burn_in = 50;

    void validate() const {
        if (smooth_w < 1) throw ValidationError("smooth_w", "must be >= 1");
        if (corr_hi < corr_lo) throw ValidationError("corr_window", "hi must be >= lo");
        if (pre_hi < pre_lo) throw ValidationError("pre_window", "hi must be >= lo");
        if (post_hi < post_lo) throw ValidationError("post_window", "hi must be >= lo");
        if (burn_in < 0) throw ValidationError("burn_in", "must be >= 0");
    }
};

struct RunRow {
    std::int64_t t = 0;
    double y = 0.0;
    double lq = 0.0;
    double mid = 0.0;
    double uq = 0.0;
    double abs_err = 0.0;
    double width = 0.0;
    std::string event;  // detector id, empty if none fired at t
};

/// Per-timestep record of one prequential run; the substrate of all
/// metrics and of the runlog CSV.
struct RunLog {
    std::vector<RunRow> rows;
    std::vector<DriftEvent> events;
    std::uint64_t seed = 0;
    std::string config_echo;
    std::int64_t crossing_count = 0;
};

/**
 * Prequential (test-then-train) loop. For every sample, in order:
 * predict the interval, record the row, feed the width to the detector,
 * and only then update the model. The model never sees y before its
 * prediction is logged. A component failure aborts with the offending t.
 */
template <IntervalModel M, WidthDetector D>
RunLog run_prequential(std::span<const Sample> stream, M& model, D& detector) {
    RunLog log;
    log.rows.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const Sample& s = stream[i];
        if (s.t != static_cast<std::int64_t>(i))
            throw ValidationError("stream", "timesteps must be dense from 0");
        try {
            const PredictionInterval pi = model.predict_interval(s.x);
            RunRow row{s.t,   s.y,      pi.lq,    pi.mid,
                       pi.uq, std::abs(s.y - pi.mid), pi.width, {}};
            if (auto ev = detector.observe(s.t, pi.width)) {
                row.event = ev->detector;
                log.events.push_back(*ev);
            }
            log.rows.push_back(std::move(row));
            model.update(s.x, s.y);
        } catch (const PrequentialError&) {
            throw;
        } catch (const std::exception& e) {
            throw PrequentialError(s.t, e.what());
        }
    }
    if constexpr (requires { model.crossing_count(); })
        log.crossing_count = model.crossing_count();
    return log;
}

/// Trailing mean with an expanding head: out[i] = mean(s[max(0,i-w+1)..i]).
inline std::vector<double> rolling_mean(std::span<const double> series, std::int64_t w) {
    if (w < 1) throw ValidationError("w", "must be >= 1");
    std::vector<double> out;
    out.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t lo = i + 1 >= static_cast<std::size_t>(w)
                                   ? i + 1 - static_cast<std::size_t>(w)
                                   : 0;
        double acc = 0.0;
        for (std::size_t j = lo; j <= i; ++j) acc += series[j];
        out.push_back(acc / static_cast<double>(i - lo + 1));
    }
    return out;
}

/// Sample Pearson correlation. Constant input is a hard error: a flat
/// series here almost always means a broken pipeline, not zero signal.
inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ValidationError("series", "length mismatch");
    if (a.size() < 2) throw ValidationError("series", "need at least 2 points");
    auto [amin, amax] = std::minmax_element(a.begin(), a.end());
    auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
    if (*amin == *amax || *bmin == *bmax)
        throw UndefinedCorrelationError("correlation undefined for constant series");

    const std::size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    const double denom = std::sqrt(saa) * std::sqrt(sbb);
    if (denom == 0.0)
        throw UndefinedCorrelationError("correlation undefined: zero variance");
    return std::clamp(sab / denom, -1.0, 1.0);
}

/// Fraction of rows with t >= burn_in whose target lies inside the interval.
inline double coverage(const RunLog& log, std::int64_t burn_in) {
    if (burn_in < 0 || burn_in >= static_cast<std::int64_t>(log.rows.size()))
        throw ValidationError("burn_in", "must be < log length");
    std::int64_t inside = 0, total = 0;
    for (const RunRow& r : log.rows) {
        if (r.t < burn_in) continue;
        ++total;
        if (r.lq <= r.y && r.y <= r.uq) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

struct DetectionMetrics {
    std::optional<std::int64_t> delay;
    std::int64_t false_alarms = 0;
};

/// Events in [burn_in, drift_t) are false alarms; delay is the gap to the
/// first event at/after the true drift. Without a true drift time, every
/// post-burn-in event is a false alarm and delay is absent.
inline DetectionMetrics detection_metrics(const RunLog& log,
                                          std::optional<std::int64_t> true_drift_t,
                                          std::int64_t burn_in) {
    if (true_drift_t && burn_in > *true_drift_t)
        throw ValidationError("burn_in", "must be <= true drift time");
    DetectionMetrics m;
    for (const DriftEvent& e : log.events) {
        if (e.t < burn_in) continue;
        if (true_drift_t && e.t >= *true_drift_t) {
            if (!m.delay) m.delay = e.t - *true_drift_t;
        } else {
            ++m.false_alarms;
        }
    }
    return m;
}

struct RunSummary {
    double pearson_drift_window = 0.0;
    double mae_pre = 0.0;
    double mae_post = 0.0;
    double width_pre = 0.0;
    double width_post = 0.0;
    double coverage = 0.0;
    std::optional<std::int64_t> detection_delay;
    std::int64_t false_alarms = 0;
    std::int64_t crossing_count = 0;
};

namespace detail {
inline double window_mean(std::span<const double> series, std::int64_t lo, std::int64_t hi) {
    const std::int64_t n = static_cast<std::int64_t>(series.size());
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, n - 1);
    if (lo > hi) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (std::int64_t i = lo; i <= hi; ++i) acc += series[static_cast<std::size_t>(i)];
    return acc / static_cast<double>(hi - lo + 1);
}
}  // namespace detail

/// Correlation of the smoothed MAE and width series over the correlation
/// window, plus window means, coverage and detection metrics.
inline RunSummary summarize(const RunLog& log, std::optional<std::int64_t> drift_t,
                            const EvalWindows& win) {
    win.validate();
    if (log.rows.empty()) throw ValidationError("log", "empty run log");

    std::vector<double> abs_err, width;
    abs_err.reserve(log.rows.size());
    width.reserve(log.rows.size());
    for (const RunRow& r : log.rows) {
        abs_err.push_back(r.abs_err);
        width.push_back(r.width);
    }
    const auto sm_err = rolling_mean(abs_err, win.smooth_w);
    const auto sm_width = rolling_mean(width, win.smooth_w);

    const std::int64_t n = static_cast<std::int64_t>(log.rows.size());
    const std::int64_t lo = std::max<std::int64_t>(win.corr_lo, 0);
    const std::int64_t hi = std::min<std::int64_t>(win.corr_hi, n - 1);
    if (hi - lo + 1 < 2) throw ValidationError("corr_window", "fewer than 2 points in log");

    RunSummary s;
    s.pearson_drift_window =
        pearson(std::span(sm_err).subspan(lo, hi - lo + 1),
                std::span(sm_width).subspan(lo, hi - lo + 1));
    s.mae_pre = detail::window_mean(abs_err, win.pre_lo, win.pre_hi);
    s.mae_post = detail::window_mean(abs_err, win.post_lo, win.post_hi);
    s.width_pre = detail::window_mean(width, win.pre_lo, win.pre_hi);
    s.width_post = detail::window_mean(width, win.post_lo, win.post_hi);
    s.coverage = coverage(log, win.burn_in);
    const DetectionMetrics dm = detection_metrics(log, drift_t, win.burn_in);
    s.detection_delay = dm.delay;
    s.false_alarms = dm.false_alarms;
    s.crossing_count = log.crossing_count;
    return s;
}

}  // namespace driftwidth
