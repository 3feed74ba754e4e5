#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <partition_lab/verify.hpp>

using namespace partition_lab;

namespace {

Report run(ExperimentId id, ParamMap params, std::uint64_t seed = 42, int workers = 1)
{
    ExperimentConfig c;
    c.id = id;
    c.params = std::move(params);
    c.seed = seed;
    c.workers = workers;
    return run_experiment(c);
}

}  // namespace

TEST(Verify, TableIsComplete)
{
    for (ExperimentId id : all_experiments) {
        EXPECT_EQ(parse_experiment_id(to_string(id)), id);
        EXPECT_FALSE(experiment_claim(id).empty());
        EXPECT_FALSE(default_params(id).empty());
        auto const thresholds = default_thresholds(id);
        ASSERT_FALSE(thresholds.empty());
        for (auto const& t : thresholds)
            EXPECT_FALSE(t.origin.empty()) << to_string(id);
    }
    EXPECT_THROW(parse_experiment_id("THM_9_9"), std::invalid_argument);
}

TEST(Verify, UnknownParameterIsRejected)
{
    EXPECT_THROW(run(ExperimentId::LEMMA_2_1_IDENTITY, {{"bogus", 1}}), std::invalid_argument);
    ExperimentConfig c;
    c.workers = 0;
    EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Verify, LemmaPassesOnSmallInputs)
{
    Report const r = run(ExperimentId::LEMMA_2_1_IDENTITY, {{"n", 80}, {"m", 6}});
    EXPECT_TRUE(r.pass);
    EXPECT_FALSE(r.refused);
    ASSERT_TRUE(r.primary_value());
    EXPECT_EQ(*r.primary_value(), 0.0);
}

TEST(Verify, ReportsAreReproducible)
{
    ParamMap const p{{"samples", 3000}};
    auto const a = to_json(run(ExperimentId::THM_1_1_JOINT, p, 7), false).dump();
    auto const b = to_json(run(ExperimentId::THM_1_1_JOINT, p, 7), false).dump();
    EXPECT_EQ(a, b);
    auto const c = to_json(run(ExperimentId::THM_1_1_JOINT, p, 8), false).dump();
    EXPECT_NE(a, c);
}

TEST(Verify, WorkerCountDoesNotChangeResults)
{
    for (ExperimentId id : {ExperimentId::THM_1_1_JOINT, ExperimentId::COR_1_2_MARGINAL,
                            ExperimentId::THM_1_4_GENERAL}) {
        ParamMap const p{{"samples", 9000}};
        ParamMap q = p;
        if (id == ExperimentId::THM_1_4_GENERAL)
            q["reference_samples"] = 9000;
        auto const one = to_json(run(id, q, 3, 1), false).dump();
        auto const four = to_json(run(id, q, 3, 4), false).dump();
        EXPECT_EQ(one, four) << to_string(id);
    }
}

TEST(Verify, BudgetRefusalIsStructured)
{
    Report const r = run(ExperimentId::THM_1_1_JOINT, {{"n", 200'000'001}, {"samples", 1000}});
    EXPECT_TRUE(r.refused);
    EXPECT_FALSE(r.pass);
    EXPECT_NE(r.refusal.find("budget"), std::string::npos);
    auto const j = to_json(r);
    EXPECT_TRUE(j["refused"].get<bool>());
    EXPECT_TRUE(j.contains("refusal"));
}

TEST(Verify, JsonHasStableFields)
{
    auto const j = to_json(run(ExperimentId::LEMMA_2_1_IDENTITY, {{"n", 50}, {"m", 4}}));
    std::vector<std::string> keys;
    for (auto const& [k, v] : j.items())
        keys.push_back(k);
    std::vector<std::string> const expected{"experiment_id", "claim",     "build",    "seed",    "inputs",
                                            "statistics",    "checks",    "primary_statistic", "threshold",
                                            "primary_pass",  "escalated", "pass",     "refused", "notes",
                                            "artifacts",     "runtime_ms"};
    EXPECT_EQ(keys, expected);
    EXPECT_EQ(j["build"].get<std::string>(), build_id());
}

TEST(Verify, ThresholdOverride)
{
    Report const strict = run(ExperimentId::COR_1_2_MARGINAL, {{"samples", 2000}, {"threshold", 1e-9}});
    EXPECT_FALSE(strict.pass);
    Report const loose = run(ExperimentId::COR_1_2_MARGINAL, {{"samples", 2000}, {"threshold", 1.0}});
    EXPECT_TRUE(loose.primary_pass);
}

TEST(Verify, ArtifactsCarryHeaders)
{
    auto const dir = std::filesystem::temp_directory_path() / "partition_lab_artifacts_test";
    std::filesystem::remove_all(dir);
    ExperimentConfig c;
    c.id = ExperimentId::COR_1_2_MARGINAL;
    c.params = {{"samples", 1000}};
    c.artifact_dir = dir;
    Report const r = run_experiment(c);
    ASSERT_FALSE(r.artifacts.empty());
    std::ifstream is(dir / r.artifacts.front());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "# experiment: COR_1_2_MARGINAL");
    std::getline(is, line);
    EXPECT_EQ(line, "# seed: 42");
    std::filesystem::remove_all(dir);
}

TEST(Verify, TextReportMentionsVerdict)
{
    std::string const text = to_text(run(ExperimentId::LEMMA_2_1_IDENTITY, {{"n", 50}, {"m", 4}}));
    EXPECT_NE(text.find("LEMMA_2_1_IDENTITY"), std::string::npos);
    EXPECT_NE(text.find("pass: true"), std::string::npos);
}
