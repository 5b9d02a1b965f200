#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "pilotmesh/io/json_io.hpp"
#include "pilotmesh/io/logging.hpp"
#include "pilotmesh/sim/scenario.hpp"
#include "support.hpp"

using namespace pilotmesh;
using io::Json;

namespace {

std::string pointer_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const io::SchemaError& e) {
    return e.pointer();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("instance round trip") {
  for (double cap : {pmedian::kUncapacitated, 123.5}) {
    const auto inst = testing::random_instance(4, 5, 3, 2, cap);
    const Json j = io::to_json(inst);
    const auto back = io::instance_from_json(Json::parse(io::dump(j)));
    CHECK(back.demands == inst.demands);
    CHECK(back.pilot_data == inst.pilot_data);
    CHECK(back.dist == inst.dist);
    CHECK(back.pilots_to_open == 2);
    CHECK(back.capacity == cap);
  }
  CHECK(io::to_json(testing::tiny_instance())["P_cap"].is_null());
}

TEST_CASE("instance schema errors carry a JSON pointer") {
  const Json good = io::to_json(testing::tiny_instance());
  Json j = good;
  j.erase("demands");
  CHECK(pointer_of([&] { io::instance_from_json(j); }) == "/demands");
  j = good;
  j["dist"][1][0] = "far";
  CHECK(pointer_of([&] { io::instance_from_json(j); }) == "/dist/1/0");
  j = good;
  j["dist"][2] = Json::array({1});
  CHECK(pointer_of([&] { io::instance_from_json(j); }) == "/dist/2");
  j = good;
  j["P"] = -1;
  CHECK(pointer_of([&] { io::instance_from_json(j); }) == "/P");
  j = good;
  j["P"] = 5;
  CHECK(pointer_of([&] { io::instance_from_json(j); }) == "");
  CHECK(pointer_of([&] { io::instance_from_json(Json::array()); }) == "");
}

TEST_CASE("topology round trip") {
  sim::SimConfig cfg;
  cfg.n_users = 25;
  cfg.n_eligible = 6;
  cfg.n_pilots = 2;
  const auto sc = sim::generate_scenario(cfg);
  Json j = io::to_json(sc.topology);
  j["meta"] = Json{{"version", io::kVersion}};
  CHECK(io::is_scenario(j));
  CHECK_FALSE(io::is_scenario(io::to_json(sc.instance)));
  const auto back = io::topology_from_json(Json::parse(io::dump(j)));
  REQUIRE(back.devices.size() == sc.topology.devices.size());
  for (std::size_t i = 0; i < back.devices.size(); ++i) {
    CHECK(back.devices[i].position == sc.topology.devices[i].position);
    CHECK(back.devices[i].shared_mb == sc.topology.devices[i].shared_mb);
    CHECK(back.devices[i].pilot_eligible == sc.topology.devices[i].pilot_eligible);
  }
  CHECK(back.widths == sc.topology.widths);

  Json bad = j;
  bad["devices"][3]["id"] = 7;
  CHECK(pointer_of([&] { io::topology_from_json(bad); }) == "/devices/3/id");
  bad = j;
  bad["devices"][1].erase("x");
  CHECK(pointer_of([&] { io::topology_from_json(bad); }) == "/devices/1/x");
  bad = j;
  bad["id_widths"] = Json::array({8, 8});
  CHECK(pointer_of([&] { io::topology_from_json(bad); }) == "/id_widths");
}

TEST_CASE("report round trip") {
  const auto r = qoe::SatisfactionReport::from_ratings({2, -2, 2});
  const auto back = io::report_from_json(io::to_json(r));
  REQUIRE(back.params.size() == 3);
  CHECK(back.params[1].name == r.params[1].name);
  CHECK(back.params[1].rating == qoe::Rating(-2));

  Json j = io::to_json(r);
  j["params"][2]["rating"] = 3;
  CHECK(pointer_of([&] { io::report_from_json(j); }) == "/params/2/rating");
  j["params"][2]["rating"] = 1.5;
  CHECK(pointer_of([&] { io::report_from_json(j); }) == "/params/2/rating");
  CHECK(pointer_of([&] { io::report_from_json(Json{{"params", Json::array()}}); }) == "/params");
}

TEST_CASE("config round trip and overrides") {
  sim::SimConfig cfg;
  cfg.n_users = 77;
  cfg.p_cap_mb = pmedian::kUncapacitated;
  cfg.mode = sim::Mode::d2d_only;
  cfg.measure.rating.bounds = {10, 20, 30, 40};
  cfg.capacity_model = pmedian::CapacityModel::pilot_data_once;
  const auto back = io::config_from_json(Json::parse(io::dump(io::to_json(cfg))));
  CHECK(io::to_json(back) == io::to_json(cfg));

  const auto partial = io::config_from_json(Json{{"iterations", 3}, {"measure", Json{{"max_hops", 6}}}});
  CHECK(partial.iterations == 3);
  CHECK(partial.measure.max_hops == 6.0);
  CHECK(partial.n_users == sim::SimConfig{}.n_users);

  CHECK(pointer_of([&] { io::config_from_json(Json{{"n_user", 3}}); }) == "/n_user");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"measure", Json{{"hops", 3}}}}); }) == "/measure/hops");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"mode", "flood"}}); }) == "/mode");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"capacity_model", "x"}}); }) == "/capacity_model");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"seed", -4}}); }) == "/seed");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"measure", Json{{"rating_bounds", {1, 2}}}}}); }) ==
        "/measure/rating_bounds");
  CHECK(pointer_of([&] { io::config_from_json(Json{{"n_params", 12}}); }) == "");
}

TEST_CASE("solve and oracle reports") {
  const auto inst = testing::tiny_instance(1, 1000);
  const Json s = io::to_json(pmedian::solve(inst), true);
  CHECK(s["objective"] == 70.0);
  CHECK(s["open_pilots"] == Json::array({0}));
  CHECK(s["assignment"] == Json::array({0, 0, 0}));
  CHECK(s["trace"].is_array());
  CHECK_FALSE(io::to_json(pmedian::solve(inst), false).contains("trace"));

  const Json o = io::to_json(pmedian::brute_force_oracle(testing::tiny_instance(1, 50)));
  CHECK(o["feasible"] == false);
  CHECK(o["objective"].is_null());
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "pilotmesh_test_io";
  std::filesystem::remove_all(dir);
  const auto path = dir / "nested" / "x.json";
  io::write_text(path, io::dump(Json{{"a", 1}}));
  CHECK(io::read_json(path)["a"] == 1);
  CHECK_THROWS_AS(io::read_json(dir / "missing.json"), io::FileError);
  std::ofstream(dir / "bad.json") << "{\"a\": ";
  CHECK_THROWS_AS(io::read_json(dir / "bad.json"), io::ParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("dump keeps full precision") {
  const double v = 0.1 + 0.2;
  CHECK(Json::parse(io::dump(Json{{"v", v}}))["v"].get<double>() == v);
  CHECK(io::dump(Json{{"a", 1}}).back() == '\n');
}

TEST_CASE("log levels") {
  CHECK(io::parse_log_level("debug") == spdlog::level::debug);
  CHECK(io::parse_log_level("warning") == spdlog::level::warn);
  CHECK_FALSE(io::parse_log_level("loud").has_value());
}
