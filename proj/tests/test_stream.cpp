#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "driftwidth/config.hpp"
#include "driftwidth/stream.hpp"

namespace {

using namespace driftwidth;

DriftSchedule single_concept(std::int64_t len, ConceptSpec c) {
    DriftSchedule s;
    s.total_len = len;
    s.segments = {{0, std::move(c)}};
    return s;
}

ConceptSpec concept_a() { return ConceptSpec{1.0, {2.0}, 0.5, {0.0}, {1.0}}; }

struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
};

Moments moments(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

TEST(Generate, DefaultExperimentShape) {
    const auto samples = generate(default_schedule(), 1);
    ASSERT_EQ(samples.size(), 1000u);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        EXPECT_EQ(samples[i].t, static_cast<std::int64_t>(i));
        ASSERT_EQ(samples[i].x.size(), 1u);
    }
    // Residual against concept A stays at noise scale before the drift and
    // blows up after it (concept B has a different linear law).
    double pre = 0.0, post = 0.0;
    for (std::size_t i = 0; i < 500; ++i)
        pre += std::abs(samples[i].y - (1.0 + 2.0 * samples[i].x[0]));
    for (std::size_t i = 500; i < 1000; ++i)
        post += std::abs(samples[i].y - (1.0 + 2.0 * samples[i].x[0]));
    pre /= 500.0;
    post /= 500.0;
    EXPECT_LT(pre, 1.0);
    EXPECT_GT(post, 5.0 * pre);
}

TEST(Generate, IdenticalConceptSegmentsMatchSingleSegment) {
    DriftSchedule two;
    two.total_len = 400;
    two.segments = {{0, concept_a()}, {200, concept_a()}};
    const auto split_stream = generate(two, 99);
    const auto plain = generate(single_concept(400, concept_a()), 99);
    ASSERT_EQ(split_stream.size(), plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_EQ(split_stream[i], plain[i]);
}

TEST(Generate, DeterministicGivenScheduleAndSeed) {
    const auto a = generate(default_schedule(), 1234);
    const auto b = generate(default_schedule(), 1234);
    EXPECT_EQ(a, b);
    const auto c = generate(default_schedule(), 1235);
    EXPECT_NE(a, c);
}

TEST(Generate, IteratorMatchesEagerMaterialization) {
    StreamGenerator gen(default_schedule(), 7);
    const auto eager = generate(default_schedule(), 7);
    std::size_t i = 0;
    while (auto s = gen.next()) {
        ASSERT_LT(i, eager.size());
        EXPECT_EQ(*s, eager[i]);
        ++i;
    }
    EXPECT_EQ(i, eager.size());
    EXPECT_FALSE(gen.next().has_value());
}

TEST(Generate, MarginalMomentsMatchConceptWithinThreeStandardErrors) {
    const int n = 10000;
    const auto samples = generate(single_concept(n, concept_a()), 5);
    std::vector<double> xs, residuals;
    for (const Sample& s : samples) {
        xs.push_back(s.x[0]);
        residuals.push_back(s.y - (1.0 + 2.0 * s.x[0]));
    }
    const auto mx = moments(xs);
    const auto mr = moments(residuals);
    const double se_mean_x = 1.0 / std::sqrt(n);
    const double se_std_x = 1.0 / std::sqrt(2.0 * n);
    const double se_mean_r = 0.5 / std::sqrt(n);
    const double se_std_r = 0.5 / std::sqrt(2.0 * n);
    EXPECT_NEAR(mx.mean, 0.0, 3.0 * se_mean_x);
    EXPECT_NEAR(mx.stddev, 1.0, 3.0 * se_std_x);
    EXPECT_NEAR(mr.mean, 0.0, 3.0 * se_mean_r);
    EXPECT_NEAR(mr.stddev, 0.5, 3.0 * se_std_r);
}

TEST(Generate, FeatureDriftLeavesConditionalLawUnchanged) {
    DriftSchedule fd;
    fd.total_len = 10000;
    fd.segments = {{0, concept_a()},
                   {5000, ConceptSpec{1.0, {2.0}, 0.5, {3.0}, {1.0}}}};
    const auto samples = generate(fd, 11);
    std::vector<double> pre, post;
    for (const Sample& s : samples) {
        const double r = s.y - (1.0 + 2.0 * s.x[0]);
        (s.t < 5000 ? pre : post).push_back(r);
    }
    const auto mp = moments(pre);
    const auto mq = moments(post);
    const double se_mean = 0.5 * std::sqrt(1.0 / 5000 + 1.0 / 5000);
    const double se_std = 0.5 * std::sqrt(1.0 / 10000 + 1.0 / 10000);
    EXPECT_NEAR(mp.mean, mq.mean, 3.0 * se_mean);
    EXPECT_NEAR(mp.stddev, mq.stddev, 3.0 * se_std);
}

TEST(Generate, LinearBlendInterpolatesParameters) {
    // Deterministic stream (no noise, fixed x): y exposes the blended
    // parameters directly.
    DriftSchedule s;
    s.total_len = 110;
    s.transition = Transition::linear_blend(4);
    s.segments = {{0, ConceptSpec{0.0, {1.0}, 0.0, {1.0}, {0.0}}},
                  {100, ConceptSpec{10.0, {3.0}, 0.0, {1.0}, {0.0}}}};
    const auto samples = generate(s, 1);
    EXPECT_DOUBLE_EQ(samples[99].y, 1.0);    // pure concept A: 0 + 1*1
    EXPECT_DOUBLE_EQ(samples[100].y, 4.0);   // lambda 1/4: y = 1 + 12*lambda
    EXPECT_DOUBLE_EQ(samples[101].y, 7.0);   // lambda 1/2
    EXPECT_DOUBLE_EQ(samples[102].y, 10.0);  // lambda 3/4
    EXPECT_DOUBLE_EQ(samples[103].y, 13.0);  // lambda 1: pure concept B
    EXPECT_DOUBLE_EQ(samples[109].y, 13.0);
}

TEST(Csv, RoundTripIsExact) {
    DriftSchedule s;
    s.total_len = 50;
    s.segments = {{0, ConceptSpec{1.0, {2.0, -0.5}, 0.5, {0.0, 1.0}, {1.0, 2.0}}}};
    const auto samples = generate(s, 3);
    std::stringstream ss;
    write_stream_csv(ss, samples);
    const auto loaded = load_csv(ss);
    ASSERT_EQ(loaded.size(), samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) EXPECT_EQ(loaded[i], samples[i]);
}

TEST(Csv, ParsesSimpleFile) {
    std::stringstream ss("t,x0,y\n0,1.0,2.0\n1,0.5,1.5\n");
    const auto samples = load_csv(ss);
    ASSERT_EQ(samples.size(), 2u);
    EXPECT_EQ(samples[0].x.size(), 1u);
    EXPECT_DOUBLE_EQ(samples[0].x[0], 1.0);
    EXPECT_DOUBLE_EQ(samples[0].y, 2.0);
    EXPECT_DOUBLE_EQ(samples[1].x[0], 0.5);
    EXPECT_DOUBLE_EQ(samples[1].y, 1.5);
}

TEST(Csv, EmptyFileReportsNoHeader) {
    std::stringstream ss("");
    try {
        load_csv(ss);
        FAIL() << "expected CsvError";
    } catch (const CsvError& e) {
        EXPECT_NE(std::string(e.what()).find("no header"), std::string::npos);
    }
}

TEST(Csv, NonDenseTimestepNamesLine) {
    std::stringstream ss("t,x0,y\n0,1.0,2.0\n2,0.5,1.5\n");
    try {
        load_csv(ss);
        FAIL() << "expected CsvError";
    } catch (const CsvError& e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(Csv, MalformedValueNamesLine) {
    std::stringstream ss("t,x0,y\n0,abc,2.0\n");
    try {
        load_csv(ss);
        FAIL() << "expected CsvError";
    } catch (const CsvError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Csv, InconsistentColumnCountRejected) {
    std::stringstream ss("t,x0,y\n0,1.0,2.0\n1,0.5,1.5,9.9\n");
    EXPECT_THROW(load_csv(ss), CsvError);
}

TEST(Csv, BadHeaderRejected) {
    std::stringstream ss("time,x0,y\n0,1.0,2.0\n");
    EXPECT_THROW(load_csv(ss), CsvError);
}

TEST(Csv, MissingFileIsIoError) {
    EXPECT_THROW(load_csv(std::filesystem::path("/nonexistent/stream.csv")), IoError);
}

TEST(ScheduleValidation, NamesViolatedInvariant) {
    auto expect_field = [](DriftSchedule s, const std::string& name) {
        try {
            s.validate();
            FAIL() << "expected ValidationError for " << name;
        } catch (const ValidationError& e) {
            EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << e.what();
        }
    };

    DriftSchedule bad_noise = single_concept(10, concept_a());
    bad_noise.segments[0].spec.noise_sigma = -1.0;
    expect_field(bad_noise, "noise_sigma");

    DriftSchedule bad_sigma = single_concept(10, concept_a());
    bad_sigma.segments[0].spec.x_sigma[0] = -0.1;
    expect_field(bad_sigma, "x_sigma");

    DriftSchedule empty;
    empty.total_len = 10;
    expect_field(empty, "segments");

    DriftSchedule late_start = single_concept(10, concept_a());
    late_start.segments[0].start_t = 1;
    expect_field(late_start, "segments");

    DriftSchedule not_increasing;
    not_increasing.total_len = 10;
    not_increasing.segments = {{0, concept_a()}, {5, concept_a()}, {5, concept_a()}};
    expect_field(not_increasing, "segments");

    DriftSchedule out_of_range;
    out_of_range.total_len = 10;
    out_of_range.segments = {{0, concept_a()}, {10, concept_a()}};
    expect_field(out_of_range, "segments");

    DriftSchedule dim_mismatch;
    dim_mismatch.total_len = 10;
    dim_mismatch.segments = {
        {0, concept_a()},
        {5, ConceptSpec{1.0, {2.0, 1.0}, 0.5, {0.0, 0.0}, {1.0, 1.0}}}};
    expect_field(dim_mismatch, "segments");

    DriftSchedule bad_blend = single_concept(10, concept_a());
    bad_blend.transition = Transition::linear_blend(0);
    expect_field(bad_blend, "transition");
}

TEST(ScheduleValidation, GeneratorRejectsInvalidSchedule) {
    DriftSchedule s = single_concept(10, concept_a());
    s.segments[0].spec.noise_sigma = -1.0;
    EXPECT_THROW(StreamGenerator(s, 1), ValidationError);
}

}  // namespace
