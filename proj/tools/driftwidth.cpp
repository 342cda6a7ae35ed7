// driftwidth CLI: generate synthetic drifting streams, run prequential
// experiments, sweep seeds.
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 runtime failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftwidth/driftwidth.hpp"

namespace fs = std::filesystem;
using driftwidth::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitRuntime = 4;

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw driftwidth::IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw driftwidth::IoError("cannot open for writing: " + path.string());
    os << content;
    os.flush();
    if (!os) throw driftwidth::IoError("write failed: " + path.string());
}

driftwidth::ExperimentConfig load_config(const fs::path& path,
                                         std::optional<std::uint64_t> seed_override) {
    auto cfg = driftwidth::parse_config_text(read_file(path));
    if (seed_override) cfg.seeds = {*seed_override};
    return cfg;
}

std::string summary_line(std::uint64_t seed, const driftwidth::RunSummary& s) {
    std::ostringstream os;
    os << "seed=" << seed
       << " pearson_drift_window=" << driftwidth::format_double(s.pearson_drift_window)
       << " detection_delay="
       << (s.detection_delay ? std::to_string(*s.detection_delay) : std::string("none"))
       << " false_alarms=" << s.false_alarms;
    return os.str();
}

int cmd_gen(const fs::path& config_path, const fs::path& out_path,
            std::optional<std::uint64_t> seed_override) {
    const auto cfg = load_config(config_path, seed_override);
    const auto samples = driftwidth::generate(cfg.schedule, cfg.seeds.front());
    driftwidth::write_stream_csv(out_path, samples);
    return kExitOk;
}

void write_run_outputs(const fs::path& dir, const driftwidth::ExperimentConfig& cfg,
                       std::uint64_t seed, const driftwidth::RunOutput& out) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw driftwidth::IoError("cannot create directory: " + dir.string());
    driftwidth::write_runlog_csv(dir / "runlog.csv", out.log);
    write_file(dir / "summary.json",
               driftwidth::summary_to_json(out.summary, seed, driftwidth::config_hash(cfg))
                       .dump(2) +
                   "\n");
    std::ostringstream ev;
    driftwidth::write_events_jsonl(ev, out.log.events);
    write_file(dir / "events.jsonl", ev.str());
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir,
            std::optional<std::uint64_t> seed_override, bool quiet) {
    const auto cfg = load_config(config_path, seed_override);
    if (cfg.seeds.size() != 1)
        throw driftwidth::ValidationError("seeds", "run needs exactly one seed");
    const std::uint64_t seed = cfg.seeds.front();
    const auto out = driftwidth::run_experiment(cfg, seed);
    write_run_outputs(out_dir, cfg, seed, out);
    if (!quiet) std::cout << summary_line(seed, out.summary) << '\n';
    return kExitOk;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

json stats_of(const std::vector<double>& v) {
    if (v.empty()) return nullptr;
    return json{{"median", median(v)},
                {"min", *std::min_element(v.begin(), v.end())},
                {"max", *std::max_element(v.begin(), v.end())}};
}

int cmd_sweep(const fs::path& config_path, const fs::path& out_dir, bool quiet) {
    const auto cfg = load_config(config_path, std::nullopt);
    if (cfg.seeds.size() < 2)
        throw driftwidth::ValidationError("seeds", "sweep needs at least 2 seeds");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec && !fs::is_directory(out_dir))
        throw driftwidth::IoError("cannot create directory: " + out_dir.string());

    struct SeedResult {
        std::uint64_t seed = 0;
        std::optional<driftwidth::RunSummary> summary;
        std::string error;
    };

    auto run_one = [&cfg, &out_dir](std::uint64_t seed) -> SeedResult {
        SeedResult r;
        r.seed = seed;
        try {
            if (std::find(cfg.inject_fail_seeds.begin(), cfg.inject_fail_seeds.end(),
                          seed) != cfg.inject_fail_seeds.end())
                throw driftwidth::PrequentialError(0, "injected failure (test hook)");
            const auto out = driftwidth::run_experiment(cfg, seed);
            const fs::path dir = out_dir / ("seed_" + std::to_string(seed));
            std::error_code dec;
            fs::create_directories(dir, dec);
            if (dec && !fs::is_directory(dir))
                throw driftwidth::IoError("cannot create directory: " + dir.string());
            write_file(dir / "summary.json",
                       driftwidth::summary_to_json(out.summary, seed,
                                                   driftwidth::config_hash(cfg))
                               .dump(2) +
                           "\n");
            r.summary = out.summary;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        return r;
    };

    std::vector<std::future<SeedResult>> futures;
    futures.reserve(cfg.seeds.size());
    for (std::uint64_t seed : cfg.seeds)
        futures.push_back(std::async(std::launch::async, run_one, seed));

    std::vector<SeedResult> results;
    results.reserve(futures.size());
    for (auto& f : futures) results.push_back(f.get());

    std::vector<double> pearsons, mae_pre, mae_post, width_pre, width_post, cov, fa, cross,
        delays;
    std::vector<std::uint64_t> failed;
    std::int64_t detected = 0, completed = 0;
    for (const SeedResult& r : results) {
        if (!r.summary) {
            failed.push_back(r.seed);
            if (!quiet) std::cout << "seed=" << r.seed << " FAILED: " << r.error << '\n';
            continue;
        }
        ++completed;
        const auto& s = *r.summary;
        pearsons.push_back(s.pearson_drift_window);
        mae_pre.push_back(s.mae_pre);
        mae_post.push_back(s.mae_post);
        width_pre.push_back(s.width_pre);
        width_post.push_back(s.width_post);
        cov.push_back(s.coverage);
        fa.push_back(static_cast<double>(s.false_alarms));
        cross.push_back(static_cast<double>(s.crossing_count));
        if (s.detection_delay) {
            delays.push_back(static_cast<double>(*s.detection_delay));
            ++detected;
        }
        if (!quiet) std::cout << summary_line(r.seed, s) << '\n';
    }

    json agg{{"n_seeds", cfg.seeds.size()},
             {"completed_seeds", completed},
             {"failed_seeds", failed},
             {"config_hash", driftwidth::config_hash(cfg)},
             {"detection_success_rate",
              completed > 0 ? json(static_cast<double>(detected) /
                                   static_cast<double>(completed))
                            : json(nullptr)},
             {"pearson_drift_window", stats_of(pearsons)},
             {"mae_pre", stats_of(mae_pre)},
             {"mae_post", stats_of(mae_post)},
             {"width_pre", stats_of(width_pre)},
             {"width_post", stats_of(width_post)},
             {"coverage", stats_of(cov)},
             {"false_alarms", stats_of(fa)},
             {"crossing_count", stats_of(cross)},
             {"detection_delay", stats_of(delays)}};
    write_file(out_dir / "aggregate.json", agg.dump(2) + "\n");

    return failed.empty() ? kExitOk : kExitRuntime;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const driftwidth::ValidationError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const driftwidth::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitIo;
    } catch (const driftwidth::PrequentialError& e) {
        std::cerr << "runtime error at " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driftwidth: interval-width drift detection on regression streams"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub, const char* out_help) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, out_help)->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_flag("--quiet", quiet, "suppress per-run output lines");
    };

    CLI::App* gen = app.add_subcommand("gen", "generate a stream CSV");
    add_common(gen, "output CSV path");
    CLI::App* run = app.add_subcommand("run", "run one prequential experiment");
    add_common(run, "output directory");
    CLI::App* sweep = app.add_subcommand("sweep", "run all configured seeds");
    add_common(sweep, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return guarded([&] { return cmd_gen(config_path, out_path, seed); });
    if (run->parsed())
        return guarded([&] { return cmd_run(config_path, out_path, seed, quiet); });
    return guarded([&] {
        if (seed)
            throw driftwidth::ValidationError("seed",
                                              "sweep uses the config seeds list");
        return cmd_sweep(config_path, out_path, quiet);
    });
}
