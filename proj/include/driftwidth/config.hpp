#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "driftwidth/detect.hpp"
#include "driftwidth/errors.hpp"
#include "driftwidth/evaluate.hpp"
#include "driftwidth/model.hpp"
#include "driftwidth/serialize.hpp"
#include "driftwidth/stream.hpp"

namespace driftwidth {

// ---------------------------------------------------------------------------
// Experiment configuration: one JSON document describing the stream
// schedule, the interval model, the detector, the analysis windows and the
// seed(s). Every section is optional and falls back to the default
// experiment (two concepts, abrupt real drift at t=500, quantile trio,
// auto-calibrated Page-Hinkley).
// ---------------------------------------------------------------------------

struct TrioConfig {
    double alpha_lo = 0.05;
    double alpha_hi = 0.95;
    double eta0 = 0.05;
    Decay decay = Decay::Constant;
};

struct GaussianConfig {
    double c = 1.96;
    double eta0 = 0.05;
    Decay decay = Decay::Constant;
    std::optional<std::size_t> window;
};

struct ModelConfig {
    enum class Kind { Trio, Gaussian };
    Kind kind = Kind::Trio;
    TrioConfig trio;
    GaussianConfig gaussian;
};

struct AutoPageHinkleyConfig {
    std::int64_t warmup = 100;
    double delta_scale = 0.05;
    double lambda_scale = 10.0;
};

struct ExplicitPageHinkleyConfig {
    double delta = 0.0;
    double lambda = 1.0;
    std::int64_t burn_in = 100;
};

struct ThresholdConfig {
    std::int64_t baseline_window = 100;
    double k = 4.0;
};

struct DetectorConfig {
    enum class Kind { PageHinkleyAuto, PageHinkleyExplicit, Threshold, None };
    Kind kind = Kind::PageHinkleyAuto;
    AutoPageHinkleyConfig auto_ph;
    ExplicitPageHinkleyConfig explicit_ph;
    ThresholdConfig threshold;
};

struct ExperimentConfig {
    DriftSchedule schedule;
    ModelConfig model;
    DetectorConfig detector;
    EvalWindows windows;
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::uint64_t> inject_fail_seeds;  // test hook for sweep error paths
};

namespace detail {

inline void check_keys(const json& j, const std::string& where,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ValidationError(where, "unknown field '" + key + "'");
    }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(where + "." + key, "wrong type");
    }
}

inline ConceptSpec parse_concept(const json& j, const std::string& where) {
    check_keys(j, where, {"beta0", "betas", "noise_sigma", "x_mean", "x_sigma"});
    ConceptSpec c;
    try {
        c.beta0 = j.at("beta0").get<double>();
        c.betas = j.at("betas").get<std::vector<double>>();
        c.noise_sigma = j.at("noise_sigma").get<double>();
        c.x_mean = j.at("x_mean").get<std::vector<double>>();
        c.x_sigma = j.at("x_sigma").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ValidationError(where, std::string("missing or bad field: ") + e.what());
    }
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(where + "." + e.field(), e.what());
    }
    return c;
}

inline std::pair<std::int64_t, std::int64_t> parse_window(const json& j, const char* key,
                                                          std::int64_t lo, std::int64_t hi,
                                                          const std::string& where) {
    if (!j.contains(key)) return {lo, hi};
    const json& w = j.at(key);
    if (!w.is_array() || w.size() != 2 || !w[0].is_number_integer() ||
        !w[1].is_number_integer())
        throw ValidationError(where + "." + key, "expected [lo, hi]");
    return {w[0].get<std::int64_t>(), w[1].get<std::int64_t>()};
}

}  // namespace detail

inline DriftSchedule default_schedule() {
    DriftSchedule s;
    s.total_len = 1000;
    s.transition = Transition::abrupt();
    s.segments = {
        {0, ConceptSpec{1.0, {2.0}, 0.5, {0.0}, {1.0}}},
        {500, ConceptSpec{5.0, {-2.0}, 0.5, {0.0}, {1.0}}},
    };
    return s;
}

inline ExperimentConfig parse_config(const json& root) {
    if (!root.is_object()) throw ValidationError("config", "top level must be an object");
    detail::check_keys(root, "config",
                       {"schedule", "model", "detector", "windows", "seed", "seeds",
                        "inject_fail_seeds"});
    ExperimentConfig cfg;

    if (root.contains("schedule")) {
        const json& js = root.at("schedule");
        detail::check_keys(js, "schedule", {"total_len", "transition", "segments"});
        DriftSchedule s;
        s.total_len = detail::get_or<std::int64_t>(js, "total_len", 1000, "schedule");
        if (js.contains("transition")) {
            const json& jt = js.at("transition");
            if (jt.is_string() && jt.get<std::string>() == "abrupt") {
                s.transition = Transition::abrupt();
            } else if (jt.is_object() && jt.contains("linear_blend")) {
                detail::check_keys(jt, "schedule.transition", {"linear_blend"});
                s.transition =
                    Transition::linear_blend(jt.at("linear_blend").get<std::int64_t>());
            } else {
                throw ValidationError("schedule.transition",
                                      "expected \"abrupt\" or {\"linear_blend\": w}");
            }
        }
        if (!js.contains("segments"))
            throw ValidationError("schedule.segments", "required when schedule given");
        std::size_t idx = 0;
        for (const json& jseg : js.at("segments")) {
            const std::string where = "schedule.segments[" + std::to_string(idx) + "]";
            detail::check_keys(jseg, where, {"start_t", "concept"});
            Segment seg;
            seg.start_t = detail::get_or<std::int64_t>(jseg, "start_t", 0, where);
            if (!jseg.contains("concept"))
                throw ValidationError(where + ".concept", "required");
            seg.spec = detail::parse_concept(jseg.at("concept"), where + ".concept");
            s.segments.push_back(std::move(seg));
            ++idx;
        }
        try {
            s.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("schedule." + e.field(), e.what());
        }
        cfg.schedule = std::move(s);
    } else {
        cfg.schedule = default_schedule();
    }

    if (root.contains("model")) {
        const json& jm = root.at("model");
        const auto type = detail::get_or<std::string>(jm, "type", "trio", "model");
        if (type == "trio") {
            detail::check_keys(jm, "model", {"type", "alpha_lo", "alpha_hi", "eta0", "decay"});
            cfg.model.kind = ModelConfig::Kind::Trio;
            TrioConfig& t = cfg.model.trio;
            t.alpha_lo = detail::get_or<double>(jm, "alpha_lo", t.alpha_lo, "model");
            t.alpha_hi = detail::get_or<double>(jm, "alpha_hi", t.alpha_hi, "model");
            t.eta0 = detail::get_or<double>(jm, "eta0", t.eta0, "model");
            t.decay = decay_from_name(
                detail::get_or<std::string>(jm, "decay", "constant", "model"));
        } else if (type == "gaussian") {
            detail::check_keys(jm, "model", {"type", "c", "eta0", "decay", "window"});
            cfg.model.kind = ModelConfig::Kind::Gaussian;
            GaussianConfig& g = cfg.model.gaussian;
            g.c = detail::get_or<double>(jm, "c", g.c, "model");
            g.eta0 = detail::get_or<double>(jm, "eta0", g.eta0, "model");
            g.decay = decay_from_name(
                detail::get_or<std::string>(jm, "decay", "constant", "model"));
            if (jm.contains("window"))
                g.window = jm.at("window").get<std::size_t>();
        } else {
            throw ValidationError("model.type", "expected \"trio\" or \"gaussian\"");
        }
    }

    if (root.contains("detector")) {
        const json& jd = root.at("detector");
        const auto type = detail::get_or<std::string>(jd, "type", "page_hinkley", "detector");
        if (type == "page_hinkley") {
            if (jd.contains("delta") || jd.contains("lambda")) {
                detail::check_keys(jd, "detector", {"type", "delta", "lambda", "burn_in"});
                cfg.detector.kind = DetectorConfig::Kind::PageHinkleyExplicit;
                ExplicitPageHinkleyConfig& p = cfg.detector.explicit_ph;
                if (!jd.contains("delta") || !jd.contains("lambda"))
                    throw ValidationError("detector",
                                          "explicit page_hinkley needs delta and lambda");
                p.delta = jd.at("delta").get<double>();
                p.lambda = jd.at("lambda").get<double>();
                p.burn_in = detail::get_or<std::int64_t>(jd, "burn_in", p.burn_in, "detector");
            } else {
                detail::check_keys(jd, "detector",
                                   {"type", "warmup", "delta_scale", "lambda_scale"});
                cfg.detector.kind = DetectorConfig::Kind::PageHinkleyAuto;
                AutoPageHinkleyConfig& p = cfg.detector.auto_ph;
                p.warmup = detail::get_or<std::int64_t>(jd, "warmup", p.warmup, "detector");
                p.delta_scale =
                    detail::get_or<double>(jd, "delta_scale", p.delta_scale, "detector");
                p.lambda_scale =
                    detail::get_or<double>(jd, "lambda_scale", p.lambda_scale, "detector");
            }
        } else if (type == "threshold") {
            detail::check_keys(jd, "detector", {"type", "baseline_window", "k"});
            cfg.detector.kind = DetectorConfig::Kind::Threshold;
            ThresholdConfig& t = cfg.detector.threshold;
            t.baseline_window =
                detail::get_or<std::int64_t>(jd, "baseline_window", t.baseline_window,
                                             "detector");
            t.k = detail::get_or<double>(jd, "k", t.k, "detector");
        } else if (type == "none") {
            detail::check_keys(jd, "detector", {"type"});
            cfg.detector.kind = DetectorConfig::Kind::None;
        } else {
            throw ValidationError("detector.type",
                                  "expected \"page_hinkley\", \"threshold\" or \"none\"");
        }
    }

    if (root.contains("windows")) {
        const json& jw = root.at("windows");
        detail::check_keys(jw, "windows",
                           {"smooth_w", "corr_window", "pre_window", "post_window",
                            "burn_in"});
        EvalWindows& w = cfg.windows;
        w.smooth_w = detail::get_or<std::int64_t>(jw, "smooth_w", w.smooth_w, "windows");
        std::tie(w.corr_lo, w.corr_hi) =
            detail::parse_window(jw, "corr_window", w.corr_lo, w.corr_hi, "windows");
        std::tie(w.pre_lo, w.pre_hi) =
            detail::parse_window(jw, "pre_window", w.pre_lo, w.pre_hi, "windows");
        std::tie(w.post_lo, w.post_hi) =
            detail::parse_window(jw, "post_window", w.post_lo, w.post_hi, "windows");
        w.burn_in = detail::get_or<std::int64_t>(jw, "burn_in", w.burn_in, "windows");
        w.validate();
    }

    if (root.contains("seed") && root.contains("seeds"))
        throw ValidationError("seeds", "give either seed or seeds, not both");
    if (root.contains("seed")) {
        cfg.seeds = {root.at("seed").get<std::uint64_t>()};
    } else if (root.contains("seeds")) {
        cfg.seeds = root.at("seeds").get<std::vector<std::uint64_t>>();
        if (cfg.seeds.empty()) throw ValidationError("seeds", "must be non-empty");
    }
    cfg.inject_fail_seeds = detail::get_or<std::vector<std::uint64_t>>(
        root, "inject_fail_seeds", {}, "config");

    return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------------------
// Canonical form: the fully-populated effective config with sorted keys.
// The hash covers everything except the seeds so one sweep shares a single
// fingerprint across its runs.
// ---------------------------------------------------------------------------

inline json canonical_config(const ExperimentConfig& cfg) {
    json segs = json::array();
    for (const Segment& s : cfg.schedule.segments) {
        segs.push_back(json{{"start_t", s.start_t},
                            {"concept",
                             {{"beta0", s.spec.beta0},
                              {"betas", s.spec.betas},
                              {"noise_sigma", s.spec.noise_sigma},
                              {"x_mean", s.spec.x_mean},
                              {"x_sigma", s.spec.x_sigma}}}});
    }
    json transition;
    if (cfg.schedule.transition.kind == TransitionKind::Abrupt)
        transition = "abrupt";
    else
        transition = json{{"linear_blend", cfg.schedule.transition.blend_width}};

    json model;
    if (cfg.model.kind == ModelConfig::Kind::Trio) {
        model = json{{"type", "trio"},
                     {"alpha_lo", cfg.model.trio.alpha_lo},
                     {"alpha_hi", cfg.model.trio.alpha_hi},
                     {"eta0", cfg.model.trio.eta0},
                     {"decay", decay_name(cfg.model.trio.decay)}};
    } else {
        model = json{{"type", "gaussian"},
                     {"c", cfg.model.gaussian.c},
                     {"eta0", cfg.model.gaussian.eta0},
                     {"decay", decay_name(cfg.model.gaussian.decay)}};
        if (cfg.model.gaussian.window) model["window"] = *cfg.model.gaussian.window;
    }

    json detector;
    switch (cfg.detector.kind) {
        case DetectorConfig::Kind::PageHinkleyAuto:
            detector = json{{"type", "page_hinkley"},
                            {"warmup", cfg.detector.auto_ph.warmup},
                            {"delta_scale", cfg.detector.auto_ph.delta_scale},
                            {"lambda_scale", cfg.detector.auto_ph.lambda_scale}};
            break;
        case DetectorConfig::Kind::PageHinkleyExplicit:
            detector = json{{"type", "page_hinkley"},
                            {"delta", cfg.detector.explicit_ph.delta},
                            {"lambda", cfg.detector.explicit_ph.lambda},
                            {"burn_in", cfg.detector.explicit_ph.burn_in}};
            break;
        case DetectorConfig::Kind::Threshold:
            detector = json{{"type", "threshold"},
                            {"baseline_window", cfg.detector.threshold.baseline_window},
                            {"k", cfg.detector.threshold.k}};
            break;
        case DetectorConfig::Kind::None:
            detector = json{{"type", "none"}};
            break;
    }

    return json{{"schedule",
                 {{"total_len", cfg.schedule.total_len},
                  {"transition", transition},
                  {"segments", segs}}},
                {"model", model},
                {"detector", detector},
                {"windows",
                 {{"smooth_w", cfg.windows.smooth_w},
                  {"corr_window", {cfg.windows.corr_lo, cfg.windows.corr_hi}},
                  {"pre_window", {cfg.windows.pre_lo, cfg.windows.pre_hi}},
                  {"post_window", {cfg.windows.post_lo, cfg.windows.post_hi}},
                  {"burn_in", cfg.windows.burn_in}}},
                {"seeds", cfg.seeds}};
}

inline std::string config_hash(const ExperimentConfig& cfg) {
    json c = canonical_config(cfg);
    c.erase("seeds");
    return hex64(fnv1a64(c.dump()));
}

// ---------------------------------------------------------------------------
// Single-seed experiment driver shared by the CLI run and sweep commands.
// ---------------------------------------------------------------------------

using ModelVariant = std::variant<IntervalModelTrio, GaussianIntervalModel>;
using DetectorVariant =
    std::variant<AutoPageHinkley, PageHinkley, ThresholdDetector, NoDetector>;

inline ModelVariant make_model(const ModelConfig& mc, std::size_t dim) {
    if (mc.kind == ModelConfig::Kind::Trio)
        return IntervalModelTrio(mc.trio.alpha_lo, mc.trio.alpha_hi, dim, mc.trio.eta0,
                                 mc.trio.decay);
    return GaussianIntervalModel(mc.gaussian.c, dim, mc.gaussian.eta0, mc.gaussian.decay,
                                 mc.gaussian.window);
}

inline DetectorVariant make_detector(const DetectorConfig& dc) {
    switch (dc.kind) {
        case DetectorConfig::Kind::PageHinkleyAuto:
            return AutoPageHinkley(dc.auto_ph.warmup, dc.auto_ph.delta_scale,
                                   dc.auto_ph.lambda_scale);
        case DetectorConfig::Kind::PageHinkleyExplicit:
            return PageHinkley(dc.explicit_ph.delta, dc.explicit_ph.lambda,
                               dc.explicit_ph.burn_in);
        case DetectorConfig::Kind::Threshold:
            return ThresholdDetector(dc.threshold.baseline_window, dc.threshold.k);
        case DetectorConfig::Kind::None:
        default:
            return NoDetector{};
    }
}

struct RunOutput {
    RunLog log;
    RunSummary summary;
};

inline RunOutput run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
    const std::vector<Sample> stream = generate(cfg.schedule, seed);
    ModelVariant model = make_model(cfg.model, cfg.schedule.dim());
    DetectorVariant detector = make_detector(cfg.detector);

    RunOutput out;
    std::visit(
        [&](auto& m, auto& d) { out.log = run_prequential(std::span(stream), m, d); },
        model, detector);
    out.log.seed = seed;
    out.log.config_echo = canonical_config(cfg).dump();
    out.summary = summarize(out.log, cfg.schedule.first_boundary(), cfg.windows);
    return out;
}

}  // namespace driftwidth
