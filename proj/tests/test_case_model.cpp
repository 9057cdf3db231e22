#include <gtest/gtest.h>

#include <numeric>

#include "seopf/builtin_cases.hpp"
#include "seopf/case_io.hpp"
#include "seopf/case_model.hpp"

using namespace seopf;

namespace {

double sum_field(const CaseData& cs, double Aggregator::*field) {
  return std::accumulate(cs.aggregators.begin(), cs.aggregators.end(), 0.0,
                         [field](double s, const Aggregator& a) { return s + a.*field; });
}

}  // namespace

TEST(BuiltinCases, FiveBusAggregatorsAndRatings) {
  const auto cs = five_bus_case();
  ASSERT_EQ(cs.buses.size(), 5u);
  ASSERT_EQ(cs.lines.size(), 6u);
  ASSERT_EQ(cs.generators.size(), 5u);
  ASSERT_EQ(cs.aggregators.size(), 7u);

  const auto& a = cs.aggregators[1];
  EXPECT_EQ(a.bus, 2);
  EXPECT_EQ(a.sigma, 85);
  EXPECT_EQ(a.gamma, 38.68);
  EXPECT_EQ(a.mu, 0.045);
  EXPECT_EQ(a.p_n, 338.49);
  EXPECT_EQ(a.p_c, 168.00);
  EXPECT_EQ(aggregator_labels(cs)[1], "2_2");

  bool found = false;
  for (const auto& l : cs.lines)
    if (l.from_bus == 1 && l.to_bus == 4) {
      EXPECT_EQ(l.s_max, 100.0);
      found = true;
    }
  EXPECT_TRUE(found);

  EXPECT_NEAR(sum_field(cs, &Aggregator::p_n), 1410.39, 1e-9);
  EXPECT_NEAR(sum_field(cs, &Aggregator::p_c), 700.00, 1e-9);
  EXPECT_NEAR(sum_field(cs, &Aggregator::q_n), 428.23, 1e-9);
}

TEST(BuiltinCases, FiveBusGenerationIsScarce) {
  const auto cs = five_bus_case();
  double p_max = 0.0;
  for (const auto& g : cs.generators) p_max += g.p_max;
  EXPECT_LT(p_max, sum_field(cs, &Aggregator::p_n));
  EXPECT_GT(sum_field(cs, &Aggregator::p_n), sum_field(cs, &Aggregator::p_c));
  // Largest whole percentage that produces scarcity.
  EXPECT_EQ(cs.metadata.at("p_max_derate_pct"), "92");
  EXPECT_GE(p_max / 0.92 * 0.93, sum_field(cs, &Aggregator::p_n));
}

TEST(BuiltinCases, BothValidate) {
  EXPECT_TRUE(validate_case(builtin_case("five_bus")).empty());
  EXPECT_TRUE(validate_case(builtin_case("rts24")).empty());
  for (std::uint64_t seed : {1u, 7u, 99u}) EXPECT_TRUE(validate_case(rts24_case(seed)).empty()) << seed;
}

TEST(BuiltinCases, UnknownNameThrows) { EXPECT_THROW(builtin_case("ieee14"), InputError); }

TEST(BuiltinCases, Rts24FollowsGenerationRules) {
  const auto cs = rts24_case();
  EXPECT_EQ(cs.buses.size(), 24u);
  EXPECT_EQ(cs.lines.size(), 38u);
  EXPECT_EQ(cs.generators.size(), 33u);
  double p_max = 0.0;
  for (const auto& g : cs.generators) p_max += g.p_max;
  EXPECT_GE(sum_field(cs, &Aggregator::p_n), p_max);

  std::map<int, int> per_bus;
  for (const auto& a : cs.aggregators) {
    ++per_bus[a.bus];
    EXPECT_GE(a.sigma, 10.0);
    EXPECT_LE(a.sigma, 110.0);
    EXPECT_LE(a.p_c, a.p_n);
    EXPECT_GT(a.mu, 0.0);
  }
  EXPECT_EQ(per_bus.size(), 17u);
  for (const auto& [bus, count] : per_bus) {
    EXPECT_GE(count, 2) << bus;
    EXPECT_LE(count, 3) << bus;
  }
  EXPECT_EQ(cs.metadata.at("synthetic_seed"), "24");
}

TEST(BuiltinCases, Rts24RatingsWithinReducedRange) {
  const auto cs = rts24_case();
  const double original[] = {175, 175, 175, 175, 175, 175, 400, 175, 175, 175, 175, 175, 175,
                             400, 400, 400, 400, 500, 500, 500, 500, 500, 500, 500, 500, 500,
                             500, 500, 500, 500, 500, 500, 500, 500, 500, 500, 500, 500};
  for (std::size_t l = 0; l < cs.lines.size(); ++l) {
    EXPECT_GE(cs.lines[l].s_max, 0.15 * original[l] - 0.005) << l;
    EXPECT_LE(cs.lines[l].s_max, 0.80 * original[l] + 0.005) << l;
  }
}

TEST(BuiltinCases, Rts24IsSeedDeterministic) {
  EXPECT_EQ(dump_case(rts24_case(5)), dump_case(rts24_case(5)));
  EXPECT_NE(dump_case(rts24_case(5)), dump_case(rts24_case(6)));
}

TEST(Validate, CriticalAboveNormalNamesAggregator) {
  auto cs = five_bus_case();
  cs.aggregators[0].p_c = 90.0;
  const auto rep = validate_case(cs);
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep[0].entity, "aggregator 2_1");
  EXPECT_EQ(rep[0].rule, "p_c exceeds p_n");
}

TEST(Validate, TwoSlackBuses) {
  auto cs = five_bus_case();
  cs.buses[0].is_slack = true;
  const auto rep = validate_case(cs);
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep[0], (Violation{"case", "multiple slack buses"}));
}

TEST(Validate, StructuralRules) {
  auto base = five_bus_case();
  {
    auto cs = base;
    cs.lines.clear();
    cs.lines.push_back({1, 2, 0.0, 0.1, 100});
    const auto rep = validate_case(cs);
    EXPECT_NE(std::find(rep.begin(), rep.end(), Violation{"case", "network is not connected"}), rep.end());
  }
  {
    auto cs = base;
    cs.lines[0].x = 0.0;
    EXPECT_EQ(validate_case(cs).size(), 1u);
  }
  {
    auto cs = base;
    cs.generators[0].bus = 42;
    EXPECT_EQ(validate_case(cs), (ValidationReport{{"generator 42_1", "references unknown bus"}}));
  }
  {
    auto cs = base;
    cs.aggregators.push_back(cs.aggregators.back());
    EXPECT_EQ(validate_case(cs), (ValidationReport{{"bus 4", "hosts more than 3 aggregators"}}));
  }
  {
    auto cs = base;
    cs.aggregators[3].mu = 0.0;
    cs.generators[2].a = -1.0;
    EXPECT_EQ(validate_case(cs).size(), 2u);
  }
  {
    auto cs = base;
    cs.buses[2].v_min = 1.1;
    EXPECT_EQ(validate_case(cs), (ValidationReport{{"bus 3", "v_min exceeds v_max"}}));
  }
}

TEST(ScaleSes, IdentityAndExample) {
  const auto cs = five_bus_case();
  const auto same = scale_ses(cs, 1.0);
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k) EXPECT_EQ(same.aggregators[k].sigma, cs.aggregators[k].sigma);
  EXPECT_DOUBLE_EQ(scale_ses(cs, 0.4).aggregators[4].sigma, 40.0);
  EXPECT_EQ(cs.aggregators[4].sigma, 100.0) << "input must stay unmodified";
}

TEST(ScaleSes, RejectsNonPositive) {
  const auto cs = five_bus_case();
  EXPECT_THROW(scale_ses(cs, 0.0), InputError);
  EXPECT_THROW(scale_ses(cs, -1.0), InputError);
  EXPECT_THROW(scale_ses(cs, std::nan("")), InputError);
}

TEST(ScaleSes, ComposesMultiplicatively) {
  const auto cs = rts24_case();
  detail::PortableUniform rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.between(0.05, 3.0), b = rng.between(0.05, 3.0);
    const auto twice = scale_ses(scale_ses(cs, a), b);
    const auto once = scale_ses(cs, a * b);
    for (std::size_t k = 0; k < cs.aggregators.size(); ++k)
      EXPECT_NEAR(twice.aggregators[k].sigma, once.aggregators[k].sigma, 1e-12 * once.aggregators[k].sigma);
  }
}

TEST(BusDemand, Examples) {
  const auto cs = five_bus_case();
  std::vector<double> normal, critical;
  for (const auto& a : cs.aggregators) {
    normal.push_back(a.p_n);
    critical.push_back(a.p_c);
  }
  EXPECT_NEAR(bus_demand(cs, 4, normal), 564.16, 1e-9);
  EXPECT_NEAR(bus_demand(cs, 3, critical), 210.00, 1e-9);
  EXPECT_EQ(bus_demand(cs, 1, normal), 0.0);
  EXPECT_THROW(bus_demand(cs, 9, normal), InputError);
  EXPECT_THROW(bus_demand(cs, 4, std::vector<double>(3, 0.0)), InputError);
}

TEST(CaseIo, RoundTripPreservesEveryNumber) {
  for (const auto& cs : {five_bus_case(), rts24_case()}) {
    const auto back = parse_case(dump_case(cs));
    EXPECT_EQ(dump_case(back), dump_case(cs));
    ASSERT_EQ(back.aggregators.size(), cs.aggregators.size());
    for (std::size_t k = 0; k < cs.aggregators.size(); ++k) {
      EXPECT_EQ(back.aggregators[k].mu, cs.aggregators[k].mu);
      EXPECT_EQ(back.aggregators[k].p_n, cs.aggregators[k].p_n);
    }
    EXPECT_EQ(back.metadata, cs.metadata);
  }
}

TEST(CaseIo, ReportsMalformedInput) {
  EXPECT_THROW(parse_case("{not json"), InputError);
  EXPECT_THROW(parse_case("[]"), InputError);
  EXPECT_THROW(parse_case(R"({"s_base": 100})"), InputError);
  try {
    parse_case(R"({"s_base": 100, "buses": [{"id": 1, "is_slack": true, "v_min": 0.9}], "lines": [],
                   "generators": [], "aggregators": []})");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("buses[0]: missing field 'v_max'"), std::string::npos);
  }
  EXPECT_THROW(load_case_file("/nonexistent/case.json"), InputError);
}
