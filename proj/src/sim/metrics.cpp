#include "pilotmesh/sim/metrics.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

namespace pilotmesh::sim {

namespace {
double inverse_pct(int steps) { return steps <= 0 ? 0.0 : 100.0 / static_cast<double>(steps); }
double clamp_pct(double v) { return std::clamp(v, 0.0, 100.0); }
}  // namespace

double energy_units(const overlay::LinkCounts& links, const MeasurePolicy& policy) {
  return links.cellular * policy.cellular_energy + links.wifi * policy.wifi_energy +
         links.bluetooth_d2d * policy.bluetooth_energy;
}

ParamArray measure_parameters(const LookupMeasurement& m, const MeasurePolicy& policy) {
  using overlay::LookupCase;
  const auto& r = m.result;
  ParamArray p{};
  p[0] = r.found && r.links.cellular == 0 ? 100.0 : 0.0;
  p[1] = r.found ? clamp_pct(100.0 * (1.0 - r.hops / policy.max_hops)) : 0.0;
  p[2] = clamp_pct(100.0 * (1.0 - energy_units(r.links, policy) / policy.max_energy_units));
  p[3] = r.found && (m.self_held || r.case_used == LookupCase::case1) ? 100.0 : 0.0;
  p[4] = clamp_pct(m.keyword_pct);
  if (m.self_held) {
    p[5] = 100.0;
  } else {
    p[5] = r.found ? inverse_pct(m.target_d2d_hops) : 0.0;
  }
  if (m.self_held) {
    p[6] = 100.0;
  } else if (r.found) {
    int connect = r.hops;
    if (r.case_used == LookupCase::case0 || r.case_used == LookupCase::case2 || r.case_used == LookupCase::case3) {
      connect -= 1;
    }
    p[6] = inverse_pct(std::max(1, connect));
  }
  if (m.attached) p[7] = m.is_pilot ? 100.0 : inverse_pct(m.pilot_hops);
  p[8] = m.attached ? inverse_pct(m.is_pilot ? 1 : m.pilot_hops + 1) : inverse_pct(2);
  return p;
}

ParamArray parameter_percentages(const std::vector<LookupMeasurement>& ledger, const MeasurePolicy& policy) {
  if (ledger.empty()) throw std::invalid_argument("parameter_percentages: empty ledger");
  ParamArray sum{};
  for (const auto& m : ledger) {
    const ParamArray p = measure_parameters(m, policy);
    for (std::size_t i = 0; i < kParamCount; ++i) sum[i] += p[i];
  }
  for (double& s : sum) s /= static_cast<double>(ledger.size());
  return sum;
}

double user_score(const ParamArray& pct, std::size_t n_params, const qoe::RatingPolicy& policy) {
  if (n_params < 1 || n_params > kParamCount) throw std::invalid_argument("user_score: n_params outside 1..9");
  std::vector<int> ratings(n_params);
  for (std::size_t i = 0; i < n_params; ++i) ratings[i] = qoe::rate_percentage(pct[i], policy).value();
  return qoe::us_overall(ratings);
}

double RunMetrics::mean_us() const {
  if (iterations.empty()) return 0.0;
  double s = 0.0;
  for (const auto& it : iterations) s += it.mean_us;
  return s / static_cast<double>(iterations.size());
}

std::string csv_header() {
  return "seed,iteration,mode,mean_us,case0,case1,case2,case3,not_found,bluetooth_d2d,wifi,cellular,"
         "max_pilot_load_mb,p1,p2,p3,p4,p5,p6,p7,p8,p9";
}

void write_csv_rows(std::ostream& os, const RunMetrics& run) {
  for (const auto& it : run.iterations) {
    os << fmt::format("{},{},{},{:.4f},{},{},{},{},{},{},{},{},{:.4f}", run.seed, it.iteration, to_string(run.mode),
                      it.mean_us, it.cases[0], it.cases[1], it.cases[2], it.cases[3], it.not_found,
                      it.links.bluetooth_d2d, it.links.wifi, it.links.cellular, it.max_pilot_load);
    for (double p : it.param_pct) os << fmt::format(",{:.4f}", p);
    os << '\n';
  }
}

std::string event_json_line(const LookupEvent& e) {
  nlohmann::ordered_json j;
  j["iter"] = e.iteration;
  j["requester"] = e.requester;
  j["key"] = e.key;
  j["case"] = overlay::to_string(e.case_used);
  j["hops"] = e.hops;
  j["links"] = {{"bluetooth_d2d", e.links.bluetooth_d2d}, {"wifi", e.links.wifi}, {"cellular", e.links.cellular}};
  j["found"] = e.found;
  return j.dump();
}

}  // namespace pilotmesh::sim
