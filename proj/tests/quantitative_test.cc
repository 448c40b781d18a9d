#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ghcft/error.h"
#include "ghcft/oracle.h"
#include "ghcft/quantitative.h"
#include "support.h"

namespace ghcft {
namespace {

using testing::CftComponent;
using testing::Fig3Cmc;
using testing::Fig4Cmc;
using testing::Fig5Model;

std::vector<std::vector<double>> Dense(const GeneratorView& gen) {
  std::vector<std::vector<double>> rates(gen.size(), std::vector<double>(gen.size()));
  for (std::size_t i = 0; i < gen.size(); ++i)
    for (std::size_t j = 0; j < gen.size(); ++j) rates[i][j] = gen.rate(i, j);
  return rates;
}

TEST(Generator, Fig3OffDiagonals) {
  GeneratorView gen = build_generator(Fig3Cmc(), {});
  EXPECT_EQ(gen.rate(0, 1), 0.03);
  EXPECT_EQ(gen.rate(1, 2), 0.02);
  EXPECT_EQ(gen.rate(2, 0), 0.5);
  EXPECT_EQ(gen.rate(0, 2), 0.0);
  EXPECT_EQ(gen.rate(1, 0), 0.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(gen.matrix().row(i).sum(), 0.0, 1e-15);
}

TEST(Generator, Fig4WithZeroInputsMatchesFig3) {
  GeneratorView gen = build_generator(Fig4Cmc(), {{"a", 0.0}, {"b", 0.0}});
  EXPECT_EQ(gen.rate(0, 1), 0.03);
  EXPECT_EQ(gen.rate(1, 2), 0.02);
  EXPECT_EQ(gen.rate(2, 0), 0.5);
  EXPECT_EQ(gen.rate(2, 3), 0.0);
}

TEST(Generator, Fig4InputsAddExactly) {
  const double tau_a = 6.0e-7, tau_b = 3.7e-4;
  GeneratorView gen = build_generator(Fig4Cmc(), {{"a", tau_a}, {"b", tau_b}});
  EXPECT_EQ(gen.rate(0, 1), 0.03 + tau_a);
  EXPECT_EQ(gen.rate(1, 2), 0.02);
  EXPECT_EQ(gen.rate(2, 0), 0.5);
  EXPECT_EQ(gen.rate(2, 3), tau_b);
}

TEST(Generator, MissingInput) {
  EXPECT_THROW(build_generator(Fig4Cmc(), {{"a", 1.0}}), UnresolvedInputError);
}

TEST(Generator, TimeVaryingInput) {
  GeneratorView gen = build_generator(Fig4Cmc(), {{"a", 1.0}, {"b", 2.0}});
  TimeVaryingInputs inputs{{"a", [](double t) { return 10 * t; }}};
  Eigen::MatrixXd q = gen.matrix_at(0.5, inputs);
  EXPECT_EQ(q(0, 1), 0.03 + 5.0);
  EXPECT_EQ(q(2, 3), 2.0);
  EXPECT_NEAR(q.row(0).sum(), 0, 1e-15);
  TimeVaryingInputs bad{{"a", [](double) { return -1.0; }}};
  EXPECT_THROW(gen.matrix_at(0, bad), DomainError);
}

TEST(MttfRate, SingleTransition) {
  CmcElement cmc;
  cmc.states = {"up", "down"};
  cmc.initial = "up";
  cmc.error_states = {"down"};
  cmc.transitions = {{"up", "down", Rate::PerHour(1e-3)}};
  auto r = mttf_rate(build_generator(cmc, {}), "down");
  EXPECT_DOUBLE_EQ(r.rate, 1e-3);
  EXPECT_TRUE(r.diagnostics.empty());
}

// Hitting time of state 4 in the four-state chain with inputs applied;
// reference value from an independent elimination, also frozen.
TEST(MttfRate, Fig4Target4) {
  GeneratorView gen = build_generator(Fig4Cmc(), {{"a", 1e-6}, {"b", 1e-3}});
  double reference = 1 / testing::ReferenceMeanHittingTime(Dense(gen), 0, 3);
  auto r = mttf_rate(gen, "4");
  EXPECT_NEAR(r.rate / reference, 1, 1e-12);
  EXPECT_NEAR(r.rate, 2.3392117454456384e-05, 1e-12 * 2.34e-5);
}

TEST(MttfRate, AgreesWithReferenceOnRandomChains) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    CmcElement cmc = testing::RandomAbsorbingCmc(rng);
    GeneratorView gen = build_generator(cmc, {});
    double reference =
        1 / testing::ReferenceMeanHittingTime(Dense(gen), 0, gen.size() - 1);
    EXPECT_NEAR(mttf_rate(gen, cmc.states.back()).rate / reference, 1, 1e-10);
  }
}

TEST(MttfRate, UnreachableTarget) {
  CmcElement cmc = Fig3Cmc();
  cmc.states.push_back("4");
  auto r = mttf_rate(build_generator(cmc, {}), "4");
  EXPECT_EQ(r.rate, 0);
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(MttfRate, TargetMissedWithPositiveProbability) {
  CmcElement cmc;
  cmc.states = {"1", "2", "3"};
  cmc.initial = "1";
  cmc.transitions = {{"1", "2", Rate::PerHour(1)}, {"1", "3", Rate::PerHour(1)}};
  EXPECT_THROW(mttf_rate(build_generator(cmc, {}), "3"), DomainError);
}

TEST(MttfRate, IllConditionedWarns) {
  CmcElement cmc;
  cmc.states = {"1", "2", "3"};
  cmc.initial = "1";
  cmc.transitions = {{"1", "2", Rate::PerHour(1e9)},
                     {"2", "1", Rate::PerHour(1e9)},
                     {"2", "3", Rate::PerHour(1e-4)}};
  auto r = mttf_rate(build_generator(cmc, {}), "3");
  // Mean passage 2/1e-4 + 1/1e9 h; accuracy is limited to about
  // cond * eps = 4e13 * 1.1e-16.
  EXPECT_NEAR(r.rate * (2e4 + 1e-9), 1, 1e-2);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_NE(r.diagnostics[0].find("condition"), std::string::npos);
}

TEST(MttfRate, NumericallySingularFails) {
  // 1e9 + 1e-9 rounds to 1e9: the hitting-time system is singular in
  // double precision.
  CmcElement cmc;
  cmc.states = {"1", "2", "3"};
  cmc.initial = "1";
  cmc.transitions = {{"1", "2", Rate::PerHour(1e9)},
                     {"2", "1", Rate::PerHour(1e9)},
                     {"2", "3", Rate::PerHour(1e-9)}};
  EXPECT_THROW(mttf_rate(build_generator(cmc, {}), "3"), NumericalError);
}

TEST(SteadyState, Fig3Frequency) {
  GeneratorView gen = build_generator(Fig3Cmc(), {});
  // Balance: pi = (50, 75, 3) / 128; frequency into 3 = pi(2) * 0.02.
  auto pi = stationary_distribution(gen);
  EXPECT_NEAR(pi(0), 50.0 / 128, 1e-14);
  EXPECT_NEAR(pi(1), 75.0 / 128, 1e-14);
  EXPECT_NEAR(pi(2), 3.0 / 128, 1e-14);
  EXPECT_NEAR(steady_state_frequency(gen, "3").rate, 75.0 / 128 * 0.02, 1e-15);
}

TEST(SteadyState, TransientTargetRejected) {
  GeneratorView gen = build_generator(Fig4Cmc(), {{"a", 0.0}, {"b", 1e-3}});
  EXPECT_THROW(steady_state_frequency(gen, "3"), DomainError);
}

TEST(SteadyState, NoUniqueClosedClass) {
  CmcElement cmc;
  cmc.states = {"1", "2", "3"};
  cmc.initial = "1";
  cmc.transitions = {{"1", "2", Rate::PerHour(1)}, {"1", "3", Rate::PerHour(1)}};
  EXPECT_THROW(stationary_distribution(build_generator(cmc, {})), DomainError);
}

TEST(Scaling, RatesScaleWithTime) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    CmcElement cmc = testing::RandomAbsorbingCmc(rng);
    GeneratorView gen = build_generator(cmc, {});
    double base = mttf_rate(gen, cmc.states.back()).rate;
    EXPECT_EQ(mttf_rate(gen.scaled(8), cmc.states.back()).rate, 8 * base);
    EXPECT_NEAR(mttf_rate(gen.scaled(3), cmc.states.back()).rate / (3 * base), 1, 1e-13);
  }
  GeneratorView fig3 = build_generator(Fig3Cmc(), {});
  double f = steady_state_frequency(fig3, "3").rate;
  EXPECT_EQ(steady_state_frequency(fig3.scaled(4), "3").rate, 4 * f);
  EXPECT_NEAR(steady_state_frequency(fig3.scaled(0.3), "3").rate / (0.3 * f), 1, 1e-13);
}

TEST(SeriesPathRate, MatchesMttfOnSeriesChains) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> exponent(-7, 0);
  for (int i = 0; i < 100; ++i) {
    std::size_t n = 1 + rng() % 6;
    CmcElement cmc;
    std::vector<double> rates;
    cmc.states = {"0"};
    cmc.initial = "0";
    for (std::size_t k = 0; k < n; ++k) {
      rates.push_back(std::pow(10.0, exponent(rng)));
      cmc.states.push_back(std::to_string(k + 1));
      cmc.transitions.push_back({std::to_string(k), std::to_string(k + 1),
                                 Rate::PerHour(rates.back())});
    }
    double series = series_path_rate(rates).rate;
    double mttf = mttf_rate(build_generator(cmc, {}), cmc.states.back()).rate;
    EXPECT_NEAR(series / mttf, 1, 1e-12);
  }
}

TEST(SeriesPathRate, EdgeCases) {
  EXPECT_THROW(series_path_rate({}), DomainError);
  std::vector<double> with_zero{1.0, 0.0};
  auto r = series_path_rate(with_zero);
  EXPECT_EQ(r.rate, 0);
  EXPECT_FALSE(r.diagnostics.empty());
  std::vector<double> negative{-1.0};
  EXPECT_THROW(series_path_rate(negative), DomainError);
}

TEST(AndGateRate, EquivalentConstantRate) {
  std::vector<double> rates{1e-3, 2e-3};
  double t = 100;
  double q = (1 - std::exp(-0.1)) * (1 - std::exp(-0.2));
  EXPECT_NEAR(and_gate_rate(rates, t), -std::log(1 - q) / t, 1e-15);
  std::vector<double> single{1e-3};
  EXPECT_NEAR(and_gate_rate(single, t), 1e-3, 1e-15);
}

TEST(EvaluateGhcft, Fig5WorkedExample) {
  auto result = evaluate_ghcft(Fig5Model(), {"c3", "c"});
  EXPECT_NEAR(result.rate / 6.66e-7, 1, 5e-3);
  EXPECT_NEAR(result.rate, 1 / (1 / 1e-5 + 1 / 6e-7) + 1e-7, 1e-18);
  EXPECT_EQ(result.method, RateMethod::kFaultTree);
  EXPECT_DOUBLE_EQ(result.mtbf, 1 / result.rate);
  const ModeRate* b = nullptr;
  for (const auto& m : result.modes)
    if (m.mode.str() == "c2.b") b = &m;
  ASSERT_NE(b, nullptr);
  EXPECT_NEAR(b->rate / 5.66e-7, 1, 5e-3);
  EXPECT_EQ(b->method, RateMethod::kMttfReciprocal);
  EXPECT_FALSE(b->diagnostics.empty());
}

TEST(EvaluateGhcft, MethodSelection) {
  // Repairable error state: long-run entering frequency.
  SystemModel model;
  model.components.push_back({"m", {}, {"out"}, Fig3Cmc()});
  auto result = evaluate_ghcft(model, {"m", "fail"});
  EXPECT_EQ(result.method, RateMethod::kSteadyStateFrequency);
  EXPECT_NEAR(result.rate, 0.01171875, 1e-15);

  // Absorbing error state: reciprocal of the mean time to reach it.
  CmcElement cmc = Fig3Cmc();
  cmc.transitions.pop_back();
  model.components[0].flm = cmc;
  result = evaluate_ghcft(model, {"m", "fail"});
  EXPECT_EQ(result.method, RateMethod::kMttfReciprocal);
  EXPECT_NEAR(result.rate, 1 / (1 / 0.03 + 1 / 0.02), 1e-15);
}

TEST(EvaluateGhcft, OrIsAdditiveAndOrderFree) {
  CftElement cft;
  cft.events = {{"x", Rate::PerHour(3e-6), false}, {"y", Rate::Fit(250), false},
                {"z", Rate::PerHour(1e-7), true}};
  cft.gates = {{"g1", GateKind::kOr, {"x", "y", "z"}}, {"g2", GateKind::kOr, {"z", "y", "x"}}};
  cft.ofms = {{"f1", "o", "g1"}, {"f2", "o", "g2"}};
  SystemModel model;
  model.components.push_back(CftComponent("k", cft, {}, {"o"}));
  double r1 = evaluate_ghcft(model, {"k", "f1"}).rate;
  double r2 = evaluate_ghcft(model, {"k", "f2"}).rate;
  EXPECT_DOUBLE_EQ(r1, 3e-6 + 2.5e-7);
  EXPECT_DOUBLE_EQ(r1, r2);
}

TEST(EvaluateGhcft, AndNeedsMissionTime) {
  CftElement cft;
  cft.events = {{"x", Rate::PerHour(1e-3), false}, {"y", Rate::PerHour(2e-3), false}};
  cft.gates = {{"g", GateKind::kAnd, {"x", "y"}}};
  cft.ofms = {{"f", "o", "g"}};
  SystemModel model;
  model.components.push_back(CftComponent("k", cft, {}, {"o"}));
  try {
    evaluate_ghcft(model, {"k", "f"});
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("mission time"), std::string::npos);
  }
  SolverConfig cfg;
  cfg.mission_time = 100;
  std::vector<double> rates{1e-3, 2e-3};
  EXPECT_DOUBLE_EQ(evaluate_ghcft(model, {"k", "f"}, cfg).rate, and_gate_rate(rates, 100));
}

TEST(EvaluateGhcft, SharedEventRefused) {
  CftElement src;
  src.events = {{"e", Rate::PerHour(1e-4), false}};
  src.ofms = {{"f1", "o1", "e"}, {"f2", "o2", "e"}};
  CftElement sink;
  sink.ifms = {{"in", "i", ""}};
  sink.ofms = {{"top", "o", "in"}};
  SystemModel model;
  model.components = {CftComponent("src", src, {}, {"o1", "o2"}),
                      {"m", {"ia", "ib"}, {"oc", "od"}, Fig4Cmc()},
                      CftComponent("sink", sink, {"i"}, {"o"})};
  model.connections = {{{"src", "o1"}, {"m", "ia"}},
                       {{"src", "o2"}, {"m", "ib"}},
                       {{"m", "od"}, {"sink", "i"}}};
  EXPECT_THROW(evaluate_ghcft(model, {"sink", "top"}), SharedEventError);
}

TEST(EvaluateGhcft, UnknownTop) {
  EXPECT_THROW(evaluate_ghcft(Fig5Model(), {"c3", "nope"}), LookupError);
}

TEST(EvaluateGhcft, MultipleErrorStatesSummed) {
  CmcElement cmc = Fig4Cmc();
  cmc.output_deps = {{"3", "c"}, {"4", "c"}, {"4", "d"}};
  SystemModel model;
  model.components.push_back({"m", {"ia", "ib"}, {"oc", "od"}, cmc});
  auto result = evaluate_ghcft(model, {"m", "c"});
  GeneratorView gen = build_generator(cmc, {{"a", 0.0}, {"b", 0.0}});
  // With b unconnected 4 is unreachable; 3 is recurrent.
  EXPECT_NEAR(result.rate, steady_state_frequency(gen, "3").rate, 1e-16);
  bool noted = false;
  for (const auto& d : result.diagnostics) noted |= d.find("summed") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(EvaluateGhcft, CaseStudyRates) {
  auto doc = testing::LoadShipped("case_study");
  auto spurious = evaluate_ghcft(doc.system, {"E", "sporadic-braking"});
  auto missing = evaluate_ghcft(doc.system, {"E", "no-emergency-braking"});
  EXPECT_EQ(spurious.modes.size(), missing.modes.size());
  // Frequency of entering "spurious" is pi(ok) * 1000 FIT; of "no_detect",
  // pi(degraded) * 50000 FIT; both chains share one stationary law.
  GeneratorView gen = build_generator(
      doc.system.find("EBC")->cmc(),
      component_input_rates(doc.system, "EBC"));
  auto pi = stationary_distribution(gen);
  EXPECT_NEAR(spurious.rate, pi(0) * 1e-6, 1e-20);
  EXPECT_NEAR(missing.rate, pi(1) * 5e-5, 1e-20);
}

TEST(EvaluateGhcft, TransientRatesModeOnSingleTransition) {
  CmcElement cmc;
  cmc.states = {"up", "down"};
  cmc.initial = "up";
  cmc.error_states = {"down"};
  cmc.transitions = {{"up", "down", Rate::PerHour(1e-3)}};
  cmc.ofms = {{"f", "o"}};
  cmc.output_deps = {{"down", "f"}};
  SystemModel model;
  model.components.push_back({"m", {}, {"o"}, cmc});
  SolverConfig cfg;
  cfg.transient_rates = true;
  EXPECT_THROW(evaluate_ghcft(model, {"m", "f"}, cfg), DomainError);
  cfg.mission_time = 1000;
  auto r = evaluate_ghcft(model, {"m", "f"}, cfg);
  EXPECT_EQ(r.method, RateMethod::kTransient);
  EXPECT_NEAR(r.rate / 1e-3, 1, 1e-6);
}

TEST(ComponentInputRates, Fig5) {
  auto rates = component_input_rates(Fig5Model(), "c2");
  ASSERT_EQ(rates.size(), 1u);
  EXPECT_DOUBLE_EQ(rates.at("a"), 6e-7);
  EXPECT_THROW(component_input_rates(Fig5Model(), "zz"), LookupError);
}

TEST(SolverConfig, Checks) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.check());
  cfg.rel_tol = 0;
  EXPECT_THROW(cfg.check(), DomainError);
  cfg = {};
  cfg.mission_time = -1;
  EXPECT_THROW(cfg.check(), DomainError);
}

}  // namespace
}  // namespace ghcft
