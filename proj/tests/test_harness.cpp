#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "tebc/harness.hpp"

using namespace tebc;

namespace {

std::string fixture(const char* name) { return std::string(TEBC_FIXTURE_DIR) + "/" + name; }

ExperimentConfig small_smoothing_config() {
  return parse_config(json::parse(read_text_file(fixture("smoothing_small.json"))), Track::Smoothing);
}

}  // namespace

TEST(Sources, UniformDrawsAreInUnitIntervalAndNormalize) {
  Rng rng(1);
  const auto v = draw_source_values(Uniform01{}, 500, rng);
  for (double x : v) {
    EXPECT_GT(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  const auto d = gen_real_distribution({Uniform01{}, "u"}, 50, 3);
  double s = 0.0;
  for (double p : d.probs()) s += p;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(d, gen_real_distribution({Uniform01{}, "u"}, 50, 3));
  EXPECT_NE(d, gen_real_distribution({Uniform01{}, "u"}, 50, 4));
  EXPECT_THROW(gen_real_distribution({Uniform01{}, "u"}, 1, 3), std::invalid_argument);
}

TEST(Sources, BinomialMeanWithinThreeSigma) {
  // Zero draws are redrawn, so the target is E[X | X > 0].
  const double p0 = std::pow(0.8, 30);
  const double mean = 6.0 / (1.0 - p0);
  const double second = (4.8 + 36.0) / (1.0 - p0);
  const double sd = std::sqrt(second - mean * mean);
  Rng rng(5);
  const auto v = draw_source_values(BinomialSource{30, 0.2}, 10000, rng);
  double s = 0.0;
  for (double x : v) {
    EXPECT_GE(x, 1.0);
    s += x;
  }
  EXPECT_NEAR(s / 1e4, mean, 3.0 * sd / 100.0);
}

TEST(Sources, ContinuousFamilyMeans) {
  Rng rng(6);
  const int n = 20000;
  auto avg = [&](const SourceKind& k) {
    double s = 0.0;
    for (double x : draw_source_values(k, n, rng)) s += x;
    return s / n;
  };
  // |N(0,1)| has mean sqrt(2/pi) and variance 1 - 2/pi.
  EXPECT_NEAR(avg(AbsStdNormal{}), std::sqrt(2.0 / M_PI), 4.0 * std::sqrt((1.0 - 2.0 / M_PI) / n));
  EXPECT_NEAR(avg(ChiSquareSource{10.0}), 10.0, 4.0 * std::sqrt(20.0 / n));
  EXPECT_NEAR(avg(BetaSource{3.0, 6.0}), 1.0 / 3.0, 4.0 * std::sqrt(18.0 / (81.0 * 10.0) / n));
  EXPECT_NEAR(avg(NormalSource{3.0, 1.0}), 3.0, 4.0 * std::sqrt(1.0 / n));
}

TEST(Sources, InvalidParametersRejected) {
  EXPECT_THROW(validate_source(NormalSource{0.0, 0.0}), ConfigError);
  EXPECT_THROW(validate_source(ChiSquareSource{-1.0}), ConfigError);
  EXPECT_THROW(validate_source(BinomialSource{10, 1.0}), ConfigError);
  EXPECT_THROW(validate_source(BetaSource{0.0, 1.0}), ConfigError);
}

TEST(Sampling, DegenerateRealPutsEverythingInOneBin) {
  const auto s = sample_counts(Distribution({0.0, 1.0, 0.0}), 25, 1);
  EXPECT_EQ(s[1], 25);
  EXPECT_EQ(sample_counts(Distribution({0.2, 0.8}), 10, 9), sample_counts(Distribution({0.2, 0.8}), 10, 9));
}

TEST(Sampling, MeansAndChiSquare) {
  const Distribution real({0.1, 0.2, 0.3, 0.4});
  const int reps = 10000;
  const std::int64_t n = 20;
  std::vector<double> total(4, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto s = sample_counts(real, n, derive_seed(77, {static_cast<std::uint64_t>(r)}));
    EXPECT_EQ(s.n(), n);
    for (std::size_t i = 0; i < 4; ++i) total[i] += static_cast<double>(s[i]);
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double expect = static_cast<double>(n) * real[i];
    const double sd = std::sqrt(static_cast<double>(n) * real[i] * (1.0 - real[i]) / reps);
    EXPECT_NEAR(total[i] / reps, expect, 4.0 * sd);
    const double e = expect * reps;
    chi2 += (total[i] - e) * (total[i] - e) / e;
  }
  EXPECT_LT(chi2, 11.345);  // chi-square(3) 99% quantile
}

TEST(Ingest, CountsFile) {
  const auto src = ingest_counts(FileCounts{fixture("counts_two_bins.txt")});
  EXPECT_DOUBLE_EQ(src.real[0], 0.75);
  EXPECT_DOUBLE_EQ(src.real[1], 0.25);
  EXPECT_EQ(src.draw(40, 1).n(), 40);
  EXPECT_EQ(src.draw(40, 1), src.draw(40, 1));
}

TEST(Ingest, ZeroCountBinNamesTheBin) {
  try {
    ingest_counts(FileCounts{fixture("counts_zero_bin.txt")});
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("zero-count bin 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ingest_counts(FileCounts{fixture("missing.txt")}), std::runtime_error);
}

TEST(Ingest, FeatureBinningMatchesHandCount) {
  // Range [0.1, 10.0], cut at 5.05: four low values, six high.
  const auto src = ingest_counts(FileFeatureBinned{fixture("two_clusters.csv"), 1, 2});
  EXPECT_EQ(src.counts, (std::vector<std::int64_t>{4, 6}));
  EXPECT_DOUBLE_EQ(src.real[0], 0.4);
  // Too many bins leave a gap between the clusters.
  EXPECT_THROW(ingest_counts(FileFeatureBinned{fixture("two_clusters.csv"), 1, 5}), std::runtime_error);
}

TEST(Ingest, BinValuesEdges) {
  EXPECT_EQ(bin_values({0.0, 0.5, 1.0}, 2), (std::vector<std::int64_t>{1, 2}));
  EXPECT_THROW(bin_values({1.0, 1.0}, 2), std::runtime_error);
  EXPECT_THROW(bin_values({}, 2), std::runtime_error);
}

TEST(Methods, RegistryNames) {
  for (const auto& name : default_methods(Track::Smoothing)) {
    EXPECT_TRUE(method_in_track(parse_method(name), Track::Smoothing)) << name;
  }
  for (const auto& name : default_methods(Track::Maxent)) {
    EXPECT_TRUE(method_in_track(parse_method(name), Track::Maxent)) << name;
  }
  EXPECT_EQ(parse_method("f-lidstone").bias, BiasChoice::Naive);
  EXPECT_EQ(parse_method("b-ml-tebc").bias, BiasChoice::Bayes);
  EXPECT_EQ(parse_method("fb-jsd-tebc").bias, BiasChoice::Bootstrap);
  EXPECT_EQ(parse_method("ml-seb").bias, BiasChoice::Seb);
  EXPECT_THROW(parse_method("kneser-ney"), ConfigError);
  EXPECT_THROW(parse_method("f-ml-seb"), ConfigError);
  EXPECT_FALSE(method_in_track(parse_method("sme"), Track::Smoothing));
}

TEST(Methods, RunMethodProducesValidEstimates) {
  const auto s = sample_counts(gen_real_distribution({Uniform01{}, "u"}, 15, 1), 150, 2);
  MethodContext ctx;
  ctx.certain = generate_certain_constraints(s.to_distribution(), 2, 3);
  for (Track track : {Track::Smoothing, Track::Maxent}) {
    for (const auto& name : default_methods(track)) {
      const auto r = run_method(parse_method(name), s, ctx);
      double sum = 0.0;
      for (double p : r.estimate.probs()) sum += p;
      EXPECT_NEAR(sum, 1.0, 1e-12) << name;
    }
  }
  EXPECT_THROW(run_method(parse_method("teb-lidstone"), s, ctx), ConfigError);
  EXPECT_NO_THROW(run_method(parse_method("teb-lidstone"), s, ctx, BiasChoice::Bayes));
  EXPECT_THROW(run_method(parse_method("laplace"), s, ctx, BiasChoice::Bayes), ConfigError);
  EXPECT_THROW(run_method(parse_method("l22-seb"), s, ctx, BiasChoice::Naive), ConfigError);
}

TEST(Config, DefaultsAndValidation) {
  const auto cfg = parse_config(json::object(), Track::Maxent);
  EXPECT_EQ(cfg.m, 100);
  EXPECT_EQ(cfg.n, 1000);
  EXPECT_EQ(cfg.r, 10);
  EXPECT_EQ(cfg.s, 20);
  EXPECT_EQ(cfg.k, 20);
  EXPECT_DOUBLE_EQ(cfg.delta, 6e-4);
  EXPECT_EQ(cfg.sources.size(), 6u);
  EXPECT_EQ(parse_config(json{{"m", 50}}, Track::Maxent).n, 500);

  EXPECT_THROW(parse_config(json{{"mm", 3}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"r", 0}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"n", 1}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"methods", {"sme"}}}, Track::Smoothing), ConfigError);
  EXPECT_THROW(parse_config(json{{"methods", {"l22-tebc"}}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"methods", {"sample", "sample"}}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"sources", {{{"kind", "normal"}, {"std", -1}}}}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"sources", {{{"kind", "beta"}, {"a", 1}, {"b", 1}, {"c", 1}}}}}, Track::Maxent),
               ConfigError);
  EXPECT_THROW(parse_config(json{{"sources", {{{"kind", "cauchy"}}}}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"ps_mode", "median"}}, Track::Maxent), ConfigError);
  EXPECT_THROW(parse_config(json{{"m", "ten"}}, Track::Maxent), ConfigError);
}

TEST(Config, RoundTripsThroughJson) {
  const auto cfg = small_smoothing_config();
  const auto again = parse_config(to_json(cfg), Track::Smoothing);
  EXPECT_EQ(to_json(again), to_json(cfg));
  EXPECT_EQ(config_hash(again), config_hash(cfg));
  EXPECT_EQ(cfg.sources[1].name, "beta_3_6");
}

TEST(Benchmark, SampleOnlyScoresOne) {
  auto cfg = small_smoothing_config();
  cfg.methods = {"sample"};
  const auto report = run_benchmark(cfg, Track::Smoothing);
  ASSERT_EQ(report.cells.size(), 4u);
  for (const auto& c : report.cells) {
    // An infinite log loss scores zero even when it is the only entry.
    EXPECT_DOUBLE_EQ(c.performance_score, std::isinf(c.mean_value) ? 0.0 : 1.0);
    EXPECT_EQ(c.values.size(), 6u);
  }
}

TEST(Benchmark, CellsCompleteAndCsvDeterministic) {
  const auto cfg = small_smoothing_config();
  const auto a = run_benchmark(cfg, Track::Smoothing);
  const auto b = run_benchmark(cfg, Track::Smoothing);
  EXPECT_EQ(a.cells.size(), cfg.sources.size() * cfg.methods.size() * 2);
  for (const auto& c : a.cells) {
    EXPECT_FALSE(c.error) << *c.error;
    EXPECT_EQ(c.values.size(), static_cast<std::size_t>(cfg.r * cfg.s));
    EXPECT_GE(c.performance_score, 0.0);
    EXPECT_LE(c.performance_score, 1.0);
  }
  const auto csv = to_csv(a);
  EXPECT_EQ(csv, to_csv(b));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kReportCsvHeader);
}

TEST(Benchmark, AddingAMethodLeavesOthersUntouched) {
  auto cfg = small_smoothing_config();
  cfg.methods = {"sample", "laplace"};
  const auto a = run_benchmark(cfg, Track::Smoothing);
  cfg.methods = {"sample", "sgt", "laplace"};
  const auto b = run_benchmark(cfg, Track::Smoothing);
  for (const char* name : {"sample", "laplace"}) {
    EXPECT_EQ(a.find("uniform01", name, Criterion::JsDivergence)->values,
              b.find("uniform01", name, Criterion::JsDivergence)->values);
  }
}

TEST(Benchmark, MaxentTrackRuns) {
  const auto cfg = parse_config(json::parse(read_text_file(fixture("maxent_small.json"))), Track::Maxent);
  const auto report = run_benchmark(cfg, Track::Maxent);
  EXPECT_EQ(report.cells.size(), cfg.methods.size() * 2);
  for (const auto& c : report.cells) EXPECT_FALSE(c.error) << c.method << ": " << *c.error;
  const auto j = to_json(report);
  EXPECT_EQ(j.at("metadata").at("config_hash"), config_hash(cfg));
}

TEST(Benchmark, FailedCellIsMarkedAndExcluded) {
  ExperimentConfig cfg = small_smoothing_config();
  cfg.sources = {{FileCounts{fixture("counts_two_bins.txt")}, "two"}};
  cfg.methods = {"sample", "f-lidstone", "laplace"};
  cfg.n = 1;  // too small for Frequentist-TEB
  const auto report = run_benchmark(cfg, Track::Smoothing);
  const auto* failed = report.find("two", "f-lidstone", Criterion::JsDivergence);
  ASSERT_NE(failed, nullptr);
  ASSERT_TRUE(failed->error.has_value());
  EXPECT_NE(failed->error->find("sample too small"), std::string::npos);
  EXPECT_TRUE(std::isnan(failed->performance_score));
  EXPECT_FALSE(report.find("two", "laplace", Criterion::JsDivergence)->error);
  EXPECT_NE(to_csv(report).find("two,f-lidstone,jsd,nan,nan"), std::string::npos);
}

TEST(Report, CsvQuotesCommas) {
  BenchmarkReport r;
  CellResult c;
  c.dataset = "a,b";
  c.method = "sample";
  c.mean_value = 0.5;
  c.performance_score = 1.0;
  r.cells.push_back(c);
  EXPECT_NE(to_csv(r).find("\"a,b\",sample,jsd,0.5,1"), std::string::npos);
}

TEST(Io, ParseCountsAndDistributionJson) {
  EXPECT_EQ(parse_counts("3,1\n0 2\r\n"), (std::vector<std::int64_t>{3, 1, 0, 2}));
  EXPECT_THROW(parse_counts("3,-1"), std::invalid_argument);
  EXPECT_THROW(parse_counts("3,x"), std::invalid_argument);
  const Distribution d({0.25, 0.75});
  EXPECT_EQ(distribution_from_json(to_json(d)), d);
  EXPECT_THROW(distribution_from_json(json{{"q", {0.5, 0.5}}}), std::invalid_argument);
  const auto b = to_json(frequentist_teb_naive(CountSample({8, 2})));
  EXPECT_EQ(b.at("kind"), "frequentist_naive");
  EXPECT_TRUE(b.at("khat").is_null());
}
