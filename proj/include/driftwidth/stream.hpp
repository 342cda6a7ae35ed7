#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "driftwidth/common.hpp"
#include "driftwidth/errors.hpp"
#include "driftwidth/rng.hpp"

namespace driftwidth {

/**
 * Synthetic drifting regression streams.
 *
 * A stream is a sequence of (x, y) samples where x[i] ~ N(x_mean[i],
 * x_sigma[i]) and y = beta0 + betas.x + eps with eps ~ N(0, noise_sigma).
 * A schedule stitches several such concepts over time; changing only the
 * x distribution is a feature drift, changing the linear law is a real
 * drift.
 */
struct ConceptSpec {
    double beta0 = 0.0;
    std::vector<double> betas;
    double noise_sigma = 0.0;
    std::vector<double> x_mean;
    std::vector<double> x_sigma;

    std::size_t dim() const noexcept { return betas.size(); }

    void validate() const {
        if (betas.empty()) throw ValidationError("betas", "must have length >= 1");
        if (x_mean.size() != betas.size())
            throw ValidationError("x_mean", "length must match betas");
        if (x_sigma.size() != betas.size())
            throw ValidationError("x_sigma", "length must match betas");
        if (!std::isfinite(beta0)) throw ValidationError("beta0", "must be finite");
        if (!all_finite(betas)) throw ValidationError("betas", "must be finite");
        if (!all_finite(x_mean)) throw ValidationError("x_mean", "must be finite");
        if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
            throw ValidationError("noise_sigma", "must be >= 0");
        for (double s : x_sigma)
            if (!std::isfinite(s) || s < 0.0)
                throw ValidationError("x_sigma", "every entry must be >= 0");
    }
};

enum class TransitionKind { Abrupt, LinearBlend };

struct Transition {
    TransitionKind kind = TransitionKind::Abrupt;
    std::int64_t blend_width = 0;

    static Transition abrupt() { return {}; }
    static Transition linear_blend(std::int64_t width) {
        return {TransitionKind::LinearBlend, width};
    }
};

struct Segment {
    std::int64_t start_t = 0;
    ConceptSpec spec;
};

struct DriftSchedule {
    std::vector<Segment> segments;
    Transition transition;
    std::int64_t total_len = 0;

    std::size_t dim() const { return segments.empty() ? 0 : segments.front().spec.dim(); }

    /// Start of the second segment, i.e. the first true drift time.
    std::optional<std::int64_t> first_boundary() const {
        if (segments.size() < 2) return std::nullopt;
        return segments[1].start_t;
    }

    void validate() const {
        if (total_len <= 0) throw ValidationError("total_len", "must be > 0");
        if (segments.empty()) throw ValidationError("segments", "must be non-empty");
        if (segments.front().start_t != 0)
            throw ValidationError("segments", "first start_t must be 0");
        for (std::size_t i = 0; i < segments.size(); ++i) {
            segments[i].spec.validate();
            if (segments[i].spec.dim() != dim())
                throw ValidationError("segments", "all segments must share one dimension");
            if (segments[i].start_t >= total_len)
                throw ValidationError("segments", "start_t must be < total_len");
            if (i > 0 && segments[i].start_t <= segments[i - 1].start_t)
                throw ValidationError("segments", "start_t must be strictly increasing");
        }
        if (transition.kind == TransitionKind::LinearBlend && transition.blend_width <= 0)
            throw ValidationError("transition", "blend width must be > 0");
    }

    /// Effective concept parameters at time t. Under LinearBlend(w) the
    /// parameters move from the previous concept to the segment's own in w
    /// equal steps starting at the boundary; the w-th step lands exactly
    /// on the new concept.
    ConceptSpec concept_at(std::int64_t t) const {
        std::size_t k = segments.size() - 1;
        while (k > 0 && segments[k].start_t > t) --k;
        const ConceptSpec& cur = segments[k].spec;
        if (k == 0 || transition.kind == TransitionKind::Abrupt) return cur;

        const double w = static_cast<double>(transition.blend_width);
        const double lam =
            std::min(1.0, static_cast<double>(t - segments[k].start_t + 1) / w);
        if (lam >= 1.0) return cur;

        const ConceptSpec& prev = segments[k - 1].spec;
        ConceptSpec out = cur;
        auto lerp = [lam](double a, double b) { return a + lam * (b - a); };
        out.beta0 = lerp(prev.beta0, cur.beta0);
        out.noise_sigma = lerp(prev.noise_sigma, cur.noise_sigma);
        for (std::size_t i = 0; i < out.dim(); ++i) {
            out.betas[i] = lerp(prev.betas[i], cur.betas[i]);
            out.x_mean[i] = lerp(prev.x_mean[i], cur.x_mean[i]);
            out.x_sigma[i] = lerp(prev.x_sigma[i], cur.x_sigma[i]);
        }
        return out;
    }
};

struct Sample {
    std::int64_t t = 0;
    std::vector<double> x;
    double y = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

/**
 * Incremental sample source. One RNG sequence is threaded through the
 * whole stream, so a prefix of a longer stream equals the shorter stream
 * with the same seed. Draw order per step: x[0..d-1], then the noise term
 * (always drawn, even when its sigma is zero).
 */
class StreamGenerator {
public:
    StreamGenerator(DriftSchedule schedule, std::uint64_t seed)
        : schedule_(std::move(schedule)), rng_(seed) {
        schedule_.validate();
    }

    std::optional<Sample> next() {
        if (t_ >= schedule_.total_len) return std::nullopt;
        const ConceptSpec c = schedule_.concept_at(t_);
        Sample s;
        s.t = t_;
        s.x.resize(c.dim());
        for (std::size_t i = 0; i < c.dim(); ++i)
            s.x[i] = c.x_mean[i] + c.x_sigma[i] * rng_.next_gaussian();
        const double eps = c.noise_sigma * rng_.next_gaussian();
        s.y = c.beta0 + dot(c.betas, s.x) + eps;
        ++t_;
        return s;
    }

    const DriftSchedule& schedule() const noexcept { return schedule_; }

private:
    DriftSchedule schedule_;
    RngState rng_;
    std::int64_t t_ = 0;
};

/// Materialize the full stream. Pure function of (schedule, seed).
inline std::vector<Sample> generate(const DriftSchedule& schedule, std::uint64_t seed) {
    StreamGenerator gen(schedule, seed);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(schedule.total_len));
    while (auto s = gen.next()) out.push_back(std::move(*s));
    return out;
}

// ---------------------------------------------------------------------------
// CSV stream format: header `t,x0,...,x{d-1},y`, '\n' newlines, '.' decimal
// separator. Reals are written in shortest round-trip form.
// ---------------------------------------------------------------------------

inline void write_stream_csv(std::ostream& os, std::span<const Sample> samples) {
    const std::size_t d = samples.empty() ? 1 : samples.front().x.size();
    os << 't';
    for (std::size_t i = 0; i < d; ++i) os << ",x" << i;
    os << ",y\n";
    for (const Sample& s : samples) {
        os << s.t;
        for (double xi : s.x) os << ',' << format_double(xi);
        os << ',' << format_double(s.y) << '\n';
    }
}

inline void write_stream_csv(const std::filesystem::path& path,
                             std::span<const Sample> samples) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    write_stream_csv(os, samples);
    os.flush();
    if (!os) throw IoError("write failed: " + path.string());
}

inline std::vector<Sample> load_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvError("no header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split(line, ',');
    if (header.size() < 3 || header.front() != "t" || header.back() != "y")
        throw CsvError(1, "header must be t,x0,...,y");
    const std::size_t d = header.size() - 2;
    for (std::size_t i = 0; i < d; ++i)
        if (header[i + 1] != "x" + std::to_string(i))
            throw CsvError(1, "expected column x" + std::to_string(i));

    std::vector<Sample> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != d + 2)
            throw CsvError(lineno, "expected " + std::to_string(d + 2) + " columns, got " +
                                       std::to_string(cells.size()));
        Sample s;
        if (!parse_int64(cells[0], s.t)) throw CsvError(lineno, "bad t value: " + cells[0]);
        if (s.t != static_cast<std::int64_t>(out.size()))
            throw CsvError(lineno, "non-dense t: expected " + std::to_string(out.size()) +
                                       ", got " + std::to_string(s.t));
        s.x.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            if (!parse_double(cells[i + 1], s.x[i]))
                throw CsvError(lineno, "bad x value: " + cells[i + 1]);
        if (!parse_double(cells.back(), s.y))
            throw CsvError(lineno, "bad y value: " + cells.back());
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<Sample> load_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open: " + path.string());
    return load_csv(is);
}

}  // namespace driftwidth
