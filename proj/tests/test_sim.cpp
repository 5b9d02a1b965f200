#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "pilotmesh/sim/metrics.hpp"
#include "pilotmesh/sim/run.hpp"
#include "pilotmesh/sim/scenario.hpp"
#include "support.hpp"

using namespace pilotmesh;
using namespace pilotmesh::sim;
using overlay::LookupCase;

namespace {

SimConfig small_config(std::uint64_t seed = 1) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.n_users = 40;
  cfg.n_eligible = 12;
  cfg.n_pilots = 4;
  cfg.initial_files = 100;
  cfg.files_per_iter = 50;
  cfg.iterations = 5;
  cfg.p_cap_mb = 8000;
  return cfg;
}

LookupMeasurement found_at(LookupCase c, int cellular) {
  LookupMeasurement m;
  m.result.found = true;
  m.result.case_used = c;
  m.result.links.cellular = cellular;
  m.result.links.bluetooth_d2d = 2;
  m.result.hops = m.result.links.total();
  m.attached = true;
  m.pilot_hops = 1;
  m.target_d2d_hops = 1;
  return m;
}

}  // namespace

TEST_CASE("config derived quantities") {
  SimConfig cfg;
  CHECK(cfg.vicinity_size() == 10);
  CHECK(cfg.rb_per_user() == 1.0);
  CHECK(cfg.vicinity_radius() == 25.0);
  cfg.n_users = 105;
  CHECK(cfg.vicinity_size() == 11);
  CHECK_NOTHROW(SimConfig{}.validate());
  cfg = SimConfig{};
  cfg.n_params = 10;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.n_pilots = 30;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.new_file_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(parse_mode("d2d_only") == Mode::d2d_only);
  CHECK(to_string(Strategy::pmedian) == "pmedian");
  CHECK_THROWS_AS(parse_strategy("greedy"), std::invalid_argument);
}

TEST_CASE("scenario generation") {
  const SimConfig cfg = small_config(3);
  const auto a = generate_scenario(cfg);
  const auto b = generate_scenario(cfg);
  CHECK(a.instance.dist == b.instance.dist);
  CHECK(a.instance.demands == b.instance.demands);
  CHECK(a.eligible == b.eligible);
  REQUIRE(a.topology.devices.size() == 40);
  CHECK(a.eligible.size() == 12);
  CHECK(a.instance.members() == 40);
  CHECK(a.instance.pilots_to_open == 4);
  CHECK(a.instance.capacity == 8000);
  for (const auto& d : a.topology.devices) {
    CHECK(distance(d.position, Position{}) <= cfg.isd);
    CHECK(d.shared_mb <= cfg.max_shared_mb);
  }
  for (std::size_t j = 0; j < a.eligible.size(); ++j) {
    CHECK(a.topology.device(a.eligible[j]).pilot_eligible);
    CHECK(a.instance.pilot_data[j] == static_cast<double>(a.topology.device(a.eligible[j]).shared_mb));
  }
  CHECK(a.instance.h(5, 2) ==
        doctest::Approx(distance(a.topology.device(a.members[5]).position,
                                 a.topology.device(a.eligible[2]).position)));
  CHECK(generate_scenario(small_config(4)).instance.dist != a.instance.dist);
}

TEST_CASE("place_pilots examples") {
  Scenario sc;
  sc.instance = testing::tiny_instance();
  sc.members = {0, 1, 2};
  sc.eligible = {7, 8};
  const auto p = place_pilots(sc, Strategy::pmedian, 1);
  CHECK(p.pilots == std::vector<DeviceId>{7});
  CHECK(p.association[2] == DeviceId{7});
  CHECK(p.max_load == 60.0);

  const auto cfg = small_config(5);
  const auto s = generate_scenario(cfg);
  CHECK(place_pilots(s, Strategy::random, 9).pilots == place_pilots(s, Strategy::random, 9).pilots);
  CHECK(place_pilots(s, Strategy::random, 9).pilots.size() == 4);

  SimConfig all = cfg;
  all.n_pilots = all.n_eligible;
  const auto sa = generate_scenario(all);
  auto eligible = sa.eligible;
  std::sort(eligible.begin(), eligible.end());
  for (auto strategy : {Strategy::random, Strategy::pmedian}) {
    CHECK(place_pilots(sa, strategy, 2).pilots == eligible);
  }

  Scenario tight = sc;
  tight.instance.capacity = 50;
  CHECK_THROWS_AS(place_pilots(tight, Strategy::pmedian, 1), pmedian::InfeasibleInstance);
}

TEST_CASE("parameter_percentages examples") {
  const MeasurePolicy policy;
  std::vector<LookupMeasurement> local(4, found_at(LookupCase::case1, 0));
  CHECK(parameter_percentages(local, policy)[0] == 100.0);

  std::vector<LookupMeasurement> missing(3);
  for (auto& m : missing) m.result.case_used = LookupCase::case3;
  CHECK(parameter_percentages(missing, policy)[0] == 0.0);

  std::vector<LookupMeasurement> half{found_at(LookupCase::case1, 0), found_at(LookupCase::case2, 0),
                                      found_at(LookupCase::case3, 3), found_at(LookupCase::case3, 3)};
  CHECK(parameter_percentages(half, policy)[0] == 50.0);
  CHECK_THROWS_AS(parameter_percentages({}, policy), std::invalid_argument);
}

TEST_CASE("measure_parameters per lookup") {
  const MeasurePolicy policy;
  const auto p = measure_parameters(found_at(LookupCase::case1, 0), policy);
  CHECK(p[1] == doctest::Approx(100.0 * (1.0 - 2.0 / 12.0)));
  CHECK(p[2] == doctest::Approx(90.0));
  CHECK(p[3] == 100.0);
  CHECK(p[5] == 100.0);
  CHECK(p[6] == 50.0);
  CHECK(p[7] == 100.0);
  CHECK(p[8] == 50.0);

  const auto c3 = measure_parameters(found_at(LookupCase::case3, 3), policy);
  CHECK(c3[0] == 0.0);
  CHECK(c3[2] == doctest::Approx(100.0 * (1.0 - 17.0 / 20.0)));
  CHECK(c3[3] == 0.0);
  CHECK(energy_units(overlay::LinkCounts{1, 1, 1}, policy) == 8.0);

  sim::Rng rng(3);
  for (int n = 0; n < 2000; ++n) {
    LookupMeasurement m;
    m.result.found = rng.uniform01() < 0.8;
    m.result.case_used = static_cast<LookupCase>(rng.uniform_int(0, 3));
    m.result.links = overlay::LinkCounts{static_cast<int>(rng.uniform_int(0, 6)), static_cast<int>(rng.uniform_int(0, 6)),
                                         static_cast<int>(rng.uniform_int(0, 6))};
    m.result.hops = m.result.links.total();
    m.self_held = rng.uniform01() < 0.1;
    m.target_d2d_hops = static_cast<int>(rng.uniform_int(0, 5));
    m.pilot_hops = static_cast<int>(rng.uniform_int(0, 5));
    m.attached = rng.uniform01() < 0.8;
    m.is_pilot = rng.uniform01() < 0.1;
    m.keyword_pct = 120 * rng.uniform01();
    for (double v : measure_parameters(m, policy)) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 100.0);
    }
  }
}

TEST_CASE("user_score") {
  ParamArray pct{};
  pct.fill(100.0);
  CHECK(user_score(pct, 3, {}) == 2.0);
  pct[1] = 0.0;
  CHECK(user_score(pct, 3, {}) == doctest::Approx(10.0 / 11.0));
  CHECK_THROWS_AS(user_score(pct, 0, {}), std::invalid_argument);
}

TEST_CASE("run invariants") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (auto mode : {Mode::d2d_only, Mode::dht_d2d}) {
      SimConfig cfg = small_config(seed);
      cfg.mode = mode;
      cfg.new_file_fraction = seed % 2 == 0 ? 0.5 : 1.0;
      const auto r = run(cfg);
      CHECK(r.seed == seed);
      CHECK(r.mode == mode);
      CHECK(r.pilots.size() == cfg.n_pilots);
      REQUIRE(r.iterations.size() == cfg.iterations);
      for (const auto& it : r.iterations) {
        CHECK(std::accumulate(it.cases.begin(), it.cases.end(), std::size_t{0}) == cfg.n_users);
        CHECK(it.lookups == cfg.n_users);
        CHECK(it.not_found <= it.lookups);
        CHECK(it.mean_us >= -2.0);
        CHECK(it.mean_us <= 2.0);
        for (double v : it.param_pct) {
          CHECK(v >= 0.0);
          CHECK(v <= 100.0);
        }
        CHECK(it.pilot_loads.size() == cfg.n_pilots);
        for (double l : it.pilot_loads) CHECK(l <= cfg.p_cap_mb + 1e-6);
        if (mode == Mode::d2d_only) CHECK(it.cases[0] == cfg.n_users);
      }
    }
  }
}

TEST_CASE("runs are reproducible") {
  SimConfig cfg = small_config(7);
  cfg.new_file_fraction = 0.25;
  std::vector<LookupEvent> ea;
  std::vector<LookupEvent> eb;
  const auto a = run(cfg, [&](const LookupEvent& e) { ea.push_back(e); });
  const auto b = run(cfg, [&](const LookupEvent& e) { eb.push_back(e); });
  std::ostringstream sa;
  std::ostringstream sb;
  write_csv_rows(sa, a);
  write_csv_rows(sb, b);
  CHECK(sa.str() == sb.str());
  REQUIRE(ea.size() == eb.size());
  CHECK(ea.size() == cfg.n_users * cfg.iterations);
  for (std::size_t i = 0; i < ea.size(); ++i) REQUIRE(event_json_line(ea[i]) == event_json_line(eb[i]));

  const auto seeds = run_seeds(cfg, 3, 6, 3);
  REQUIRE(seeds.size() == 4);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    SimConfig one = cfg;
    one.seed = 3 + i;
    std::ostringstream x;
    std::ostringstream y;
    write_csv_rows(x, seeds[i]);
    write_csv_rows(y, run(one));
    CHECK(x.str() == y.str());
  }
}

TEST_CASE("both modes see the same requests") {
  SimConfig cfg = small_config(2);
  cfg.new_file_fraction = 0.5;
  std::vector<std::pair<DeviceId, std::uint64_t>> d2d;
  std::vector<std::pair<DeviceId, std::uint64_t>> dht;
  cfg.mode = Mode::d2d_only;
  run(cfg, [&](const LookupEvent& e) { d2d.emplace_back(e.requester, e.key); });
  cfg.mode = Mode::dht_d2d;
  run(cfg, [&](const LookupEvent& e) { dht.emplace_back(e.requester, e.key); });
  CHECK(d2d == dht);
}

TEST_CASE("DHT-D2D dominates with cache reuse") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimConfig cfg = small_config(seed);
    cfg.iterations = 8;
    cfg.new_file_fraction = 0.25;
    const auto pr = run_paired(cfg);
    for (std::size_t k = 2; k < cfg.iterations; ++k) {
      CHECK(pr.dht_d2d.iterations[k].mean_us >= pr.d2d_only.iterations[k].mean_us);
    }
  }
}

TEST_CASE("fixed scenarios") {
  const SimConfig cfg = small_config(8);
  const auto sc = generate_scenario(cfg);
  SimConfig other = cfg;
  other.seed = 99;
  const auto r = run(other, sc);
  CHECK(r.pilots == place_pilots(sc, Strategy::pmedian, 99).pilots);
  SimConfig wrong = cfg;
  wrong.n_users = 41;
  wrong.n_eligible = 12;
  CHECK_THROWS_AS(run(wrong, sc), std::invalid_argument);
}

TEST_CASE("file keys") {
  const auto none = [](FileKey) { return false; };
  const FileKey a = file_key(1, 0, 32, none);
  CHECK(a == file_key(1, 0, 32, none));
  CHECK(a != file_key(1, 1, 32, none));
  CHECK(a.value < (1ull << 32));
  const FileKey b = file_key(1, 0, 32, [&](FileKey k) { return k == a; });
  CHECK(b != a);
}

TEST_CASE("csv output") {
  const auto r = run(small_config(1));
  std::ostringstream os;
  write_csv_rows(os, r);
  std::istringstream lines(os.str());
  std::string line;
  std::size_t rows = 0;
  const std::string header = csv_header();
  const auto cols = std::count(header.begin(), header.end(), ',');
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == cols);
  }
  CHECK(rows == r.iterations.size());
}
