#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <string_view>

#include "seopf/case_model.hpp"

namespace seopf {

namespace detail {

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

inline std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Uniform [0,1) from the raw mt19937_64 stream. std::uniform_real_distribution
/// is implementation-defined, this is not.
class PortableUniform {
 public:
  explicit PortableUniform(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * next(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() * static_cast<double>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

/// Modified PJM 5-bus system with the seven aggregators, line ratings and
/// generator cost rows of the social-equity scarcity study.
inline CaseData five_bus_case() {
  CaseData cs;
  cs.name = "five_bus";
  cs.s_base = 100.0;
  for (int id = 1; id <= 5; ++id) cs.buses.push_back({id, id == 4, 0.95, 1.05});

  cs.lines = {
      {1, 2, 0.00281, 0.0281, 200.0}, {1, 4, 0.00304, 0.0304, 100.0},
      {1, 5, 0.00064, 0.0064, 120.0}, {2, 3, 0.00108, 0.0108, 100.0},
      {3, 4, 0.00297, 0.0297, 150.0}, {4, 5, 0.00297, 0.0297, 120.0},
  };

  //                bus  a    b     c     pmin  pmax   qmin    qmax
  cs.generators = {
      {1, 2.0, 14.0, 60.0, 0.0, 40.0, -30.0, 30.0},
      {1, 2.0, 15.0, 35.0, 0.0, 170.0, -127.5, 127.5},
      {3, 2.0, 30.0, 25.0, 0.0, 520.0, -390.0, 390.0},
      {4, 2.0, 40.0, 20.0, 0.0, 200.0, -150.0, 150.0},
      {5, 2.0, 10.0, 50.0, 0.0, 600.0, -450.0, 450.0},
  };

  //                 bus sigma gamma  mu     p_n     p_c     q_n     q_c
  cs.aggregators = {
      {2, 15, 11.05, 0.016, 84.62, 42.00, 25.69, 13.81},
      {2, 85, 38.68, 0.045, 338.49, 168.00, 102.78, 55.22},
      {3, 56, 63.54, 0.066, 211.56, 105.00, 64.24, 34.51},
      {3, 32, 45.34, 0.034, 211.56, 105.00, 64.24, 34.51},
      {4, 100, 29.99, 0.089, 324.39, 161.00, 98.48, 52.92},
      {4, 77, 21.23, 0.024, 105.78, 52.50, 32.12, 17.26},
      {4, 105, 10.0, 0.087, 133.99, 66.50, 40.68, 21.86},
  };

  // Scarcity requires total normal demand to exceed total generation
  // capacity; the stock capacities (1530 MW) do not, so derate uniformly by
  // the largest whole percentage that does.
  const double p_n_total = std::accumulate(cs.aggregators.begin(), cs.aggregators.end(), 0.0,
                                           [](double s, const Aggregator& a) { return s + a.p_n; });
  const double p_max_total =
      std::accumulate(cs.generators.begin(), cs.generators.end(), 0.0,
                      [](double s, const Generator& g) { return s + g.p_max; });
  int derate_pct = 100;
  while (derate_pct > 1 && derate_pct * p_max_total / 100.0 >= p_n_total) --derate_pct;
  for (auto& g : cs.generators) g.p_max = g.p_max * derate_pct / 100.0;

  cs.metadata = {
      {"source", "PJM 5-bus system (MATPOWER case5 impedances, limits and reference bus)"},
      {"p_max_derate_pct", std::to_string(derate_pct)},
      {"line_charging", "dropped (series-only line model)"},
      {"fixed_loads", "replaced by aggregators"},
      {"voltage_limits", "0.95-1.05 p.u."},
  };
  return cs;
}

/// Default seed for the synthetic RTS-24 aggregators.
inline constexpr std::uint64_t kRts24Seed = 24;

/// IEEE 24-bus reliability test system with stock generator costs, line
/// ratings reduced into [15%, 80%] of the original and synthetic aggregators
/// drawn from `seed`:
///  - every load bus gets 2 or 3 aggregators sharing the bus load, scaled so
///    total normal demand is 105% of total generation capacity;
///  - sigma uniform in [10, 110] (whole numbers);
///  - p_c/p_n uniform in [0.45, 0.55]; q follows the bus power factor;
///  - gamma uniform in [10, 65] $/MWh; saturation gamma/mu uniform in
///    [0.8, 2.5] x p_n.
inline CaseData rts24_case(std::uint64_t seed = kRts24Seed) {
  CaseData cs;
  cs.name = "rts24";
  cs.s_base = 100.0;
  for (int id = 1; id <= 24; ++id) cs.buses.push_back({id, id == 13, 0.95, 1.05});

  struct RawBranch {
    int f, t;
    double r, x, rate;
  };
  const RawBranch branches[] = {
      {1, 2, 0.0026, 0.0139, 175},   {1, 3, 0.0546, 0.2112, 175},   {1, 5, 0.0218, 0.0845, 175},
      {2, 4, 0.0328, 0.1267, 175},   {2, 6, 0.0497, 0.1920, 175},   {3, 9, 0.0308, 0.1190, 175},
      {3, 24, 0.0023, 0.0839, 400},  {4, 9, 0.0268, 0.1037, 175},   {5, 10, 0.0228, 0.0883, 175},
      {6, 10, 0.0139, 0.0605, 175},  {7, 8, 0.0159, 0.0614, 175},   {8, 9, 0.0427, 0.1651, 175},
      {8, 10, 0.0427, 0.1651, 175},  {9, 11, 0.0023, 0.0839, 400},  {9, 12, 0.0023, 0.0839, 400},
      {10, 11, 0.0023, 0.0839, 400}, {10, 12, 0.0023, 0.0839, 400}, {11, 13, 0.0061, 0.0476, 500},
      {11, 14, 0.0054, 0.0418, 500}, {12, 13, 0.0061, 0.0476, 500}, {12, 23, 0.0124, 0.0966, 500},
      {13, 23, 0.0111, 0.0865, 500}, {14, 16, 0.0050, 0.0389, 500}, {15, 16, 0.0022, 0.0173, 500},
      {15, 21, 0.0063, 0.0490, 500}, {15, 21, 0.0063, 0.0490, 500}, {15, 24, 0.0067, 0.0519, 500},
      {16, 17, 0.0033, 0.0259, 500}, {16, 19, 0.0030, 0.0231, 500}, {17, 18, 0.0018, 0.0144, 500},
      {17, 22, 0.0135, 0.1053, 500}, {18, 21, 0.0033, 0.0259, 500}, {18, 21, 0.0033, 0.0259, 500},
      {19, 20, 0.0051, 0.0396, 500}, {19, 20, 0.0051, 0.0396, 500}, {20, 23, 0.0028, 0.0216, 500},
      {20, 23, 0.0028, 0.0216, 500}, {21, 22, 0.0087, 0.0678, 500},
  };

  // Unit types of the RTS: {a, b, c, p_min, p_max, q_min, q_max}.
  const Generator u20{0, 0.0, 130.0, 400.6849, 16.0, 20.0, 0.0, 10.0};
  const Generator u76{0, 0.014142, 16.0811, 212.3076, 15.2, 76.0, -25.0, 30.0};
  const Generator u100{0, 0.052672, 43.6615, 781.521, 25.0, 100.0, 0.0, 60.0};
  const Generator u197{0, 0.00717, 48.5804, 832.7575, 69.0, 197.0, 0.0, 80.0};
  const Generator syncond{0, 0.0, 0.0, 0.0, 0.0, 0.0, -50.0, 200.0};
  const Generator u12{0, 0.328412, 56.564, 86.3852, 2.4, 12.0, 0.0, 6.0};
  const Generator u155{0, 0.008342, 12.3883, 382.2391, 54.3, 155.0, -50.0, 80.0};
  const Generator u400{0, 0.000213, 4.4231, 395.3749, 100.0, 400.0, -50.0, 200.0};
  const Generator u50{0, 0.0, 0.001, 0.001, 10.0, 50.0, -10.0, 16.0};
  const Generator u350{0, 0.004895, 11.8495, 665.1094, 140.0, 350.0, -25.0, 150.0};
  auto add = [&cs](int bus, const Generator& type, int count) {
    for (int k = 0; k < count; ++k) {
      Generator g = type;
      g.bus = bus;
      cs.generators.push_back(g);
    }
  };
  for (int bus : {1, 2}) {
    add(bus, u20, 2);
    add(bus, u76, 2);
  }
  add(7, u100, 3);
  add(13, u197, 3);
  add(14, syncond, 1);
  add(15, u12, 5);
  add(15, u155, 1);
  add(16, u155, 1);
  add(18, u400, 1);
  add(21, u400, 1);
  add(22, u50, 6);
  add(23, u155, 2);
  add(23, u350, 1);

  struct Load {
    int bus;
    double p, q;
  };
  const Load loads[] = {{1, 108, 22},  {2, 97, 20},   {3, 180, 37},  {4, 74, 15},   {5, 71, 14},
                        {6, 136, 28},  {7, 125, 25},  {8, 171, 35},  {9, 175, 36},  {10, 195, 40},
                        {13, 265, 54}, {14, 194, 39}, {15, 317, 64}, {16, 100, 20}, {18, 333, 68},
                        {19, 181, 37}, {20, 128, 26}};

  detail::PortableUniform rng(seed);

  for (const auto& br : branches) {
    const double factor = rng.between(0.15, 0.80);
    cs.lines.push_back({br.f, br.t, br.r, br.x, detail::round2(br.rate * factor)});
  }

  double p_max_total = 0.0, load_total = 0.0;
  for (const auto& g : cs.generators) p_max_total += g.p_max;
  for (const auto& l : loads) load_total += l.p;
  const double demand_scale = 1.05 * p_max_total / load_total;

  for (const auto& l : loads) {
    const int count = rng.integer(2, 3);
    std::vector<double> weights(count);
    for (auto& w : weights) w = rng.between(0.5, 1.5);
    const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double pf = l.q / l.p;
    for (int k = 0; k < count; ++k) {
      Aggregator a;
      a.bus = l.bus;
      a.sigma = std::round(rng.between(10.0, 110.0));
      a.p_n = detail::round2(l.p * demand_scale * weights[k] / weight_sum);
      a.p_c = detail::round2(a.p_n * rng.between(0.45, 0.55));
      a.q_n = detail::round2(a.p_n * pf);
      a.q_c = detail::round2(a.p_c * pf);
      a.gamma = detail::round2(rng.between(10.0, 65.0));
      const double saturation = a.p_n * rng.between(0.8, 2.5);
      a.mu = std::round(a.gamma / saturation * 1e5) / 1e5;
      cs.aggregators.push_back(a);
    }
  }

  cs.metadata = {
      {"source", "IEEE 24-bus RTS (MATPOWER case24_ieee_rts impedances, ratings, limits, costs)"},
      {"synthetic_seed", std::to_string(seed)},
      {"line_rating_factor_range", "0.15-0.80"},
      {"demand_scale", detail::fmt_number(demand_scale)},
      {"line_charging", "dropped (series-only line model)"},
      {"transformer_taps", "ignored"},
      {"bus_shunts", "ignored"},
  };
  return cs;
}

/// Resolves "five_bus" or "rts24".
inline CaseData builtin_case(std::string_view name) {
  if (name == "five_bus") return five_bus_case();
  if (name == "rts24") return rts24_case();
  throw InputError("unknown builtin case '" + std::string(name) + "'");
}

}  // namespace seopf
