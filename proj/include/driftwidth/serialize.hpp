#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftwidth/common.hpp"
#include "driftwidth/detect.hpp"
#include "driftwidth/errors.hpp"
#include "driftwidth/evaluate.hpp"
#include "driftwidth/model.hpp"

namespace driftwidth {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Model snapshots. Flat JSON; integers round-trip exactly, reals are emitted
// in shortest round-trip form so parse(dump(m)) restores bit-equal values.
// ---------------------------------------------------------------------------

inline const char* decay_name(Decay d) {
    return d == Decay::Constant ? "constant" : "inverse_sqrt";
}

inline Decay decay_from_name(const std::string& s) {
    if (s == "constant") return Decay::Constant;
    if (s == "inverse_sqrt") return Decay::InverseSqrt;
    throw ValidationError("decay", "unknown decay '" + s + "'");
}

inline json to_json(const OnlineQuantileRegressor& m) {
    return json{{"alpha", m.alpha()},   {"w", m.weights()},
                {"b", m.bias()},        {"eta0", m.eta0()},
                {"decay", decay_name(m.decay())}, {"n_updates", m.n_updates()}};
}

inline OnlineQuantileRegressor quantile_regressor_from_json(const json& j) {
    const auto w = j.at("w").get<std::vector<double>>();
    OnlineQuantileRegressor m(j.at("alpha").get<double>(), w.size(),
                              j.at("eta0").get<double>(),
                              decay_from_name(j.at("decay").get<std::string>()));
    m.restore(w, j.at("b").get<double>(), j.at("n_updates").get<std::int64_t>());
    return m;
}

inline json to_json(const IntervalModelTrio& t) {
    return json{{"lo", to_json(t.lo())},
                {"mid", to_json(t.mid())},
                {"hi", to_json(t.hi())},
                {"crossing_count", t.crossing_count()}};
}

inline IntervalModelTrio trio_from_json(const json& j) {
    const auto lo = quantile_regressor_from_json(j.at("lo"));
    const auto mid = quantile_regressor_from_json(j.at("mid"));
    const auto hi = quantile_regressor_from_json(j.at("hi"));
    IntervalModelTrio t(lo.alpha(), hi.alpha(), lo.dim(), lo.eta0(), lo.decay());
    t.lo() = lo;
    t.mid() = mid;
    t.hi() = hi;
    t.set_crossing_count(j.at("crossing_count").get<std::int64_t>());
    return t;
}

inline json to_json(const WelfordState& s) {
    return json{{"count", s.count}, {"mean", s.mean}, {"m2", s.m2}};
}

inline WelfordState welford_from_json(const json& j) {
    return WelfordState{j.at("count").get<std::int64_t>(), j.at("mean").get<double>(),
                        j.at("m2").get<double>()};
}

inline json to_json(const GaussianIntervalModel& m) {
    json j{{"c", m.c()},
           {"w", m.weights()},
           {"b", m.bias()},
           {"eta0", m.eta0()},
           {"decay", decay_name(m.decay())},
           {"n_updates", m.n_updates()},
           {"welford", to_json(m.resid_stats())}};
    if (m.window()) {
        j["window"] = *m.window();
        j["resid_window"] = std::vector<double>(m.resid_window().begin(),
                                                m.resid_window().end());
    }
    return j;
}

inline GaussianIntervalModel gaussian_from_json(const json& j) {
    const auto w = j.at("w").get<std::vector<double>>();
    std::optional<std::size_t> window;
    if (j.contains("window")) window = j.at("window").get<std::size_t>();
    GaussianIntervalModel m(j.at("c").get<double>(), w.size(), j.at("eta0").get<double>(),
                            decay_from_name(j.at("decay").get<std::string>()), window);
    std::deque<double> ring;
    if (j.contains("resid_window"))
        for (const auto& r : j.at("resid_window")) ring.push_back(r.get<double>());
    m.restore(w, j.at("b").get<double>(), j.at("n_updates").get<std::int64_t>(),
              welford_from_json(j.at("welford")), std::move(ring));
    return m;
}

// ---------------------------------------------------------------------------
// Drift events: one JSON object per line.
// ---------------------------------------------------------------------------

inline json to_json(const DriftEvent& e) {
    return json{{"t", e.t}, {"detector", e.detector}, {"statistic", e.statistic}};
}

inline void write_events_jsonl(std::ostream& os, std::span<const DriftEvent> events) {
    for (const DriftEvent& e : events) os << to_json(e).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Run log CSV: header `t,y,lq,mid,uq,abs_err,width,event`.
// ---------------------------------------------------------------------------

inline void write_runlog_csv(std::ostream& os, const RunLog& log) {
    os << "t,y,lq,mid,uq,abs_err,width,event\n";
    for (const RunRow& r : log.rows) {
        os << r.t << ',' << format_double(r.y) << ',' << format_double(r.lq) << ','
           << format_double(r.mid) << ',' << format_double(r.uq) << ','
           << format_double(r.abs_err) << ',' << format_double(r.width) << ',' << r.event
           << '\n';
    }
}

inline void write_runlog_csv(const std::filesystem::path& path, const RunLog& log) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    write_runlog_csv(os, log);
    os.flush();
    if (!os) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Run summaries. NaN window means serialize as null (nlohmann behavior).
// ---------------------------------------------------------------------------

inline json summary_to_json(const RunSummary& s, std::uint64_t seed,
                            const std::string& config_hash) {
    json j{{"pearson_drift_window", s.pearson_drift_window},
           {"mae_pre", s.mae_pre},
           {"mae_post", s.mae_post},
           {"width_pre", s.width_pre},
           {"width_post", s.width_post},
           {"coverage", s.coverage},
           {"false_alarms", s.false_alarms},
           {"crossing_count", s.crossing_count},
           {"seed", seed},
           {"config_hash", config_hash}};
    if (s.detection_delay)
        j["detection_delay"] = *s.detection_delay;
    else
        j["detection_delay"] = nullptr;
    return j;
}

// ---------------------------------------------------------------------------
// FNV-1a 64-bit digest; provenance fingerprint for configs, not a
// cryptographic hash.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace driftwidth
