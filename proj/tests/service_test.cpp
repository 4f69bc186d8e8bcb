// Copyright 2026 The pmfuzz Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include "catch_amalgamated.hpp"
#include "pmfuzz/bundled_fixtures.hpp"
#include "pmfuzz/service.hpp"

using namespace pmfuzz;
using Catch::Matchers::ContainsSubstring;

namespace {

// Service on an ephemeral port for the lifetime of the object.
class RunningService {
 public:
  RunningService() : service_(store_) {
    service_.install(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~RunningService() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }
  ProjectStore& store() { return store_; }

 private:
  ProjectStore store_;
  ScenarioService service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string fixture(const char* name) { return std::string(*fixtures::find(name)); }

std::string upload(httplib::Client& c, const std::string& body) {
  auto res = c.Post("/api/projects", body, "application/json");
  REQUIRE(res);
  REQUIRE(res->status == 201);
  return io::Json::parse(res->body)["id"].get<std::string>();
}

}  // namespace

TEST_CASE("health probe", "[service]") {
  RunningService svc;
  auto c = svc.client();
  auto res = c.Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "ok");
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
}

TEST_CASE("upload, payoff, and solve", "[service]") {
  RunningService svc;
  auto c = svc.client();
  const std::string id = upload(c, fixture("table1"));
  CHECK(id == "p1");
  CHECK(upload(c, fixture("table1")) == "p2");  // no deduplication

  auto pay = c.Get("/api/projects/" + id + "/payoff");
  REQUIRE(pay);
  REQUIRE(pay->status == 200);
  const auto pj = io::Json::parse(pay->body);
  CHECK(pj["bounds"]["cost"]["lower"] == 3060000);
  CHECK(pj["bounds"]["cost"]["upper"] == 4300000);
  CHECK(pj["bounds"]["time"]["lower"] == 29);
  CHECK(pj["bounds"]["time"]["upper"] == 42);
  CHECK(pj["bounds"]["quality_loss"]["lower"] == 0);
  CHECK(pj["reference_divergence"].size() == 2);

  auto solve = c.Post("/api/projects/" + id + "/solve", fixture("paper-bounds"), "application/json");
  REQUIRE(solve);
  REQUIRE(solve->status == 200);
  const auto sj = io::Json::parse(solve->body);
  CHECK(std::abs(sj["lambda"].get<double>() - 0.7997312) <= 1e-7);
  CHECK(sj["z_time"] == 34);

  auto floors = c.Post("/api/projects/" + id + "/solve", fixture("paper-quality-floors"), "application/json");
  REQUIRE(floors);
  REQUIRE(floors->status == 200);
  CHECK(std::abs(io::Json::parse(floors->body)["lambda"].get<double>() - 0.6133791) <= 1e-7);

  auto stored = c.Get("/api/projects/" + id);
  REQUIRE(stored);
  CHECK(stored->status == 200);
  CHECK(io::Json::parse(stored->body)["activities"].size() == 9);
}

TEST_CASE("wire format equals the CLI machine format", "[service]") {
  RunningService svc;
  auto c = svc.client();
  const std::string id = upload(c, fixture("table1"));
  auto res = c.Post("/api/projects/" + id + "/solve", fixture("deadline-38"), "application/json");
  REQUIRE(res);
  const auto p = io::parse_project_text(fixture("table1"));
  const auto s = io::parse_scenario_text(fixture("deadline-38"));
  CHECK(res->body == io::to_json(solve_scenario(p.network, s, p.coefficient_set)).dump());
}

TEST_CASE("error statuses", "[service]") {
  RunningService svc;
  auto c = svc.client();

  const std::string cyclic = R"({"activities": [
      {"id": "A", "depends_on": ["B"], "normal_time": 2, "crash_time": 1, "normal_cost": 5, "crash_cost": 9, "crash_quality": 0.5},
      {"id": "B", "depends_on": ["A"], "normal_time": 2, "crash_time": 1, "normal_cost": 5, "crash_cost": 9, "crash_quality": 0.5}]})";
  auto bad = c.Post("/api/projects", cyclic, "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 422);
  CHECK(io::Json::parse(bad->body)["violations"][0]["kind"] == "CycleDetected");

  auto garbage = c.Post("/api/projects", "not json", "application/json");
  REQUIRE(garbage);
  CHECK(garbage->status == 422);

  auto missing = c.Get("/api/projects/nope/payoff");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto missing_solve = c.Post("/api/projects/nope/solve", "{}", "application/json");
  REQUIRE(missing_solve);
  CHECK(missing_solve->status == 404);

  const std::string id = upload(c, fixture("table1"));
  auto infeasible = c.Post("/api/projects/" + id + "/solve", fixture("deadline-28"), "application/json");
  REQUIRE(infeasible);
  CHECK(infeasible->status == 409);
  const auto ij = io::Json::parse(infeasible->body);
  CHECK(ij["error"] == "InfeasibleScenario");
  CHECK_THAT(ij["message"].get<std::string>(), ContainsSubstring("29"));

  auto unknown = c.Post("/api/projects/" + id + "/solve", R"({"quality_floors": {"Z": 0.9}})", "application/json");
  REQUIRE(unknown);
  CHECK(unknown->status == 422);
  CHECK(io::Json::parse(unknown->body)["violations"][0]["kind"] == "UnknownActivityInScenario");
}

TEST_CASE("fixed single activity has degenerate bounds", "[service]") {
  RunningService svc;
  auto c = svc.client();
  const std::string id = upload(c, fixture("fixed-activity"));
  auto res = c.Get("/api/projects/" + id + "/payoff");
  REQUIRE(res);
  const auto j = io::Json::parse(res->body);
  for (const char* k : {"cost", "time", "quality_loss"}) CHECK(j["bounds"][k]["lower"] == j["bounds"][k]["upper"]);
}

TEST_CASE("concurrent identical solves return identical bodies", "[service]") {
  RunningService svc;
  auto c = svc.client();
  const std::string a = upload(c, fixture("table1"));
  const std::string b = upload(c, fixture("single-activity"));
  auto solve = [&](const std::string& id, const std::string& body) {
    auto cl = svc.client();
    auto res = cl.Post("/api/projects/" + id + "/solve", body, "application/json");
    return res ? res->body : std::string("no response");
  };
  std::vector<std::future<std::string>> runs;
  for (int k = 0; k < 4; ++k) {
    runs.push_back(std::async(std::launch::async, solve, a, fixture("paper-quality-floors")));
    runs.push_back(std::async(std::launch::async, solve, b, std::string("{}")));
  }
  std::vector<std::string> bodies;
  for (auto& f : runs) bodies.push_back(f.get());
  for (std::size_t k = 2; k < bodies.size(); ++k) CHECK(bodies[k] == bodies[k % 2]);
  CHECK(bodies[0] != bodies[1]);
}

TEST_CASE("preloading a project directory", "[service]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pmfuzz_service_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "table1.json") << fixture("table1");
  std::ofstream(dir / "paper-bounds.json") << fixture("paper-bounds");  // scenario: skipped
  ProjectStore store;
  preload_projects(store, dir);
  CHECK(store.size() == 1);
  CHECK(store.find("table1"));
  CHECK(store.add(io::parse_project_text(fixture("table1"))) == "p1");

  std::ofstream(dir / "broken.json") << R"({"activities": [{"id": "A"}]})";
  ProjectStore other;
  CHECK_THROWS_AS(preload_projects(other, dir), Error);
  CHECK_THROWS_AS(preload_projects(other, dir / "missing"), Error);
  fs::remove_all(dir);
}
