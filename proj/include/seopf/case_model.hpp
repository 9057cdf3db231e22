#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace seopf {

/// Thrown for malformed inputs: bad cases, bad ranges, unknown names.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Bus {
  int id = 0;
  bool is_slack = false;
  double v_min = 0.95;  // p.u.
  double v_max = 1.05;  // p.u.
};

struct Line {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;      // p.u.
  double x = 0.0;      // p.u.
  double s_max = 0.0;  // MW
};

/// Quadratic-cost generator. Cost is a*p^2 + b*p + c with p in MW.
struct Generator {
  int bus = 0;
  double a = 0.0;  // $/MW^2h
  double b = 0.0;  // $/MWh
  double c = 0.0;  // $/h
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
};

/// Dispatchable load aggregator with a socioeconomic score (sigma) and a
/// saturating quadratic satisfaction curve (gamma, mu).
struct Aggregator {
  int bus = 0;
  double sigma = 0.0;
  double gamma = 0.0;  // $/MWh
  double mu = 0.0;     // $/MW^2h
  double p_n = 0.0;    // normal active demand, MW
  double p_c = 0.0;    // critical active demand, MW
  double q_n = 0.0;    // MVAr
  double q_c = 0.0;    // MVAr
};

/// Whole scenario. Powers are stored in MW/MVAr; computations convert to
/// per-unit on s_base.
struct CaseData {
  std::string name;
  double s_base = 100.0;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<Aggregator> aggregators;
  std::map<std::string, std::string> metadata;

  /// Position of a bus id in `buses`; throws InputError for unknown ids.
  std::size_t bus_index(int id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i].id == id) return i;
    throw InputError("unknown bus id " + std::to_string(id));
  }

  bool has_bus(int id) const {
    for (const auto& b : buses)
      if (b.id == id) return true;
    return false;
  }

  std::size_t slack_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i].is_slack) return i;
    throw InputError("case has no slack bus");
  }
};

/// 1-based position of each aggregator among the aggregators of its bus,
/// in case order. Aggregator k is labelled "<bus>_<position>".
inline std::vector<int> aggregator_positions(const CaseData& cs) {
  std::unordered_map<int, int> seen;
  std::vector<int> pos;
  pos.reserve(cs.aggregators.size());
  for (const auto& a : cs.aggregators) pos.push_back(++seen[a.bus]);
  return pos;
}

inline std::vector<std::string> aggregator_labels(const CaseData& cs) {
  const auto pos = aggregator_positions(cs);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k)
    out.push_back(std::to_string(cs.aggregators[k].bus) + "_" + std::to_string(pos[k]));
  return out;
}

inline std::vector<std::string> generator_labels(const CaseData& cs) {
  std::unordered_map<int, int> seen;
  std::vector<std::string> out;
  for (const auto& g : cs.generators)
    out.push_back(std::to_string(g.bus) + "_" + std::to_string(++seen[g.bus]));
  return out;
}

inline std::string line_label(const Line& l) {
  return std::to_string(l.from_bus) + "-" + std::to_string(l.to_bus);
}

struct Violation {
  std::string entity;  // e.g. "aggregator 2_1", "case"
  std::string rule;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

namespace detail {

inline bool graph_connected(const CaseData& cs) {
  const std::size_t n = cs.buses.size();
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& l : cs.lines) {
    if (!cs.has_bus(l.from_bus) || !cs.has_bus(l.to_bus)) continue;
    const auto i = cs.bus_index(l.from_bus), j = cs.bus_index(l.to_bus);
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (auto j : adj[i])
      if (!seen[j]) {
        seen[j] = true;
        ++count;
        stack.push_back(j);
      }
  }
  return count == n;
}

}  // namespace detail

/// Checks every structural and parameter invariant of a case. The report is
/// empty iff the case is usable.
inline ValidationReport validate_case(const CaseData& cs) {
  ValidationReport out;
  auto flag = [&out](std::string entity, std::string rule) {
    out.push_back({std::move(entity), std::move(rule)});
  };

  if (!(cs.s_base > 0.0)) flag("case", "s_base must be positive");
  if (cs.buses.empty()) flag("case", "no buses");

  std::size_t slack_count = 0;
  std::unordered_map<int, int> id_count;
  for (const auto& b : cs.buses) {
    const std::string name = "bus " + std::to_string(b.id);
    if (++id_count[b.id] == 2) flag(name, "duplicate bus id");
    if (b.is_slack) ++slack_count;
    if (!(b.v_min > 0.0)) flag(name, "v_min must be positive");
    if (!(b.v_min <= b.v_max)) flag(name, "v_min exceeds v_max");
  }
  if (slack_count == 0 && !cs.buses.empty()) flag("case", "no slack bus");
  if (slack_count > 1) flag("case", "multiple slack buses");

  for (const auto& l : cs.lines) {
    const std::string name = "line " + line_label(l);
    if (l.from_bus == l.to_bus) flag(name, "from_bus equals to_bus");
    if (!cs.has_bus(l.from_bus) || !cs.has_bus(l.to_bus)) flag(name, "references unknown bus");
    if (l.x == 0.0) flag(name, "reactance x must be nonzero");
    if (!(l.s_max > 0.0)) flag(name, "s_max must be positive");
  }
  if (!detail::graph_connected(cs)) flag("case", "network is not connected");

  const auto glabels = generator_labels(cs);
  for (std::size_t k = 0; k < cs.generators.size(); ++k) {
    const auto& g = cs.generators[k];
    const std::string name = "generator " + glabels[k];
    if (!cs.has_bus(g.bus)) flag(name, "references unknown bus");
    if (!(g.p_min <= g.p_max)) flag(name, "p_min exceeds p_max");
    if (!(g.q_min <= g.q_max)) flag(name, "q_min exceeds q_max");
    if (!(g.a >= 0.0)) flag(name, "quadratic cost coefficient a must be nonnegative");
  }

  const auto alabels = aggregator_labels(cs);
  std::map<int, int> per_bus;
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k) {
    const auto& a = cs.aggregators[k];
    const std::string name = "aggregator " + alabels[k];
    ++per_bus[a.bus];
    if (!cs.has_bus(a.bus)) flag(name, "references unknown bus");
    if (!(a.sigma >= 0.0)) flag(name, "sigma must be nonnegative");
    if (!(a.gamma > 0.0)) flag(name, "gamma must be positive");
    if (!(a.mu > 0.0)) flag(name, "mu must be positive");
    if (!(a.p_c >= 0.0)) flag(name, "p_c must be nonnegative");
    if (!(a.p_c <= a.p_n)) flag(name, "p_c exceeds p_n");
    if (!(a.q_c >= 0.0)) flag(name, "q_c must be nonnegative");
    if (!(a.q_c <= a.q_n)) flag(name, "q_c exceeds q_n");
  }
  for (const auto& [bus, count] : per_bus)
    if (count > 3) flag("bus " + std::to_string(bus), "hosts more than 3 aggregators");

  return out;
}

inline std::string describe(const ValidationReport& report) {
  std::string s;
  for (const auto& v : report) s += v.entity + ": " + v.rule + "\n";
  return s;
}

/// Returns a copy of the case with every aggregator's sigma multiplied by
/// `factor`.
inline CaseData scale_ses(const CaseData& cs, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw InputError("SES scale factor must be positive and finite");
  CaseData out = cs;
  for (auto& a : out.aggregators) a.sigma *= factor;
  return out;
}

/// Total active demand (MW) of the aggregators hosted at `bus`.
inline double bus_demand(const CaseData& cs, int bus, std::span<const double> p_values) {
  if (!cs.has_bus(bus)) throw InputError("unknown bus id " + std::to_string(bus));
  if (p_values.size() != cs.aggregators.size())
    throw InputError("p_values size does not match aggregator count");
  double total = 0.0;
  for (std::size_t k = 0; k < cs.aggregators.size(); ++k)
    if (cs.aggregators[k].bus == bus) total += p_values[k];
  return total;
}

}  // namespace seopf
