#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "testing.hpp"
#include "uavmp/app.hpp"
#include "uavmp/server.hpp"

using namespace uavmp;
using namespace uavmp::svc;
using nlohmann::json;

namespace {

json tiny_doc() { return testing::fixture_json("tiny.json"); }

ServiceOptions options() {
    ServiceOptions o;
    o.data_dir = testing::source_path("fixtures");
    o.tick_s = 1.0;
    return o;
}

json quick(double runtime = 1.0) { return {{"runtime", runtime}, {"seed", 5}, {"population", 16}}; }

std::vector<std::string> drain(Subscription& s) {
    std::vector<std::string> out;
    while (auto l = s.next(std::chrono::milliseconds(50))) out.push_back(*l);
    return out;
}

} // namespace

TEST_CASE("store round trips and ids") {
    testing::TempDir dir;
    Store st(dir.path);
    const std::string m = st.create_mission(tiny_doc());
    CHECK(m == "m0001");
    CHECK(st.mission(m) == tiny_doc());
    CHECK(st.has_mission(m));
    CHECK_FALSE(st.has_mission("m0002"));
    CHECK_THROWS_AS(st.mission("m0009"), NotFound);
    CHECK_THROWS_AS(st.mission("../etc"), NotFound);
    CHECK(st.create_mission(tiny_doc()) == "m0002");
    CHECK(st.missions() == std::vector<std::string>{"m0001", "m0002"});

    const std::string r1 = st.create_run(m, {{"mode", "plan"}});
    const std::string r2 = st.create_run(m, {{"mode", "replan"}});
    CHECK(r1 != r2);
    CHECK(st.runs(m) == std::vector<std::string>{r1, r2});
    CHECK_FALSE(st.has_result(m, r1));
    st.put_result(m, r1, {{"solutions", json::array()}});
    CHECK(st.has_result(m, r1));
    CHECK(st.result(m, r1)["solutions"].empty());
    CHECK(st.run_config(m, r2)["mode"] == "replan");
    CHECK_THROWS_AS(st.create_run("m0042", {}), NotFound);

    const std::string s = st.create_session(m, {{"runId", r1}});
    st.append_events(m, s, "{\"a\":1}\n");
    st.append_events(m, s, "{\"a\":2}\n");
    CHECK(st.events(m, s) == "{\"a\":1}\n{\"a\":2}\n");
    st.put_session(m, s, {{"runId", r2}});
    CHECK(st.session(m, s)["runId"] == r2);
    CHECK(st.sessions(m) == std::vector<std::string>{s});

    // a second store over the same directory sees everything
    Store again(dir.path);
    CHECK(again.missions().size() == 2);
    CHECK(again.events(m, s) == st.events(m, s));
}

TEST_CASE("atomic writes") {
    testing::TempDir dir;
    const fs::path p = dir.path / "sub" / "doc.txt";
    atomic_write(p, "old");
    CHECK(read_file(p) == "old");

    // readers only ever see a complete version
    const std::string a(200000, 'a'), b(300000, 'b');
    atomic_write(p, a);
    std::atomic<bool> stop{false};
    std::atomic<int> torn{0};
    std::thread reader([&] {
        while (!stop) {
            const std::string t = read_file(p);
            if (t != a && t != b) ++torn;
        }
    });
    for (int i = 0; i < 100; ++i) atomic_write(p, i % 2 ? a : b);
    stop = true;
    reader.join();
    CHECK(torn == 0);

    // a failed replace leaves no temporary behind
    const fs::path d = dir.path / "taken";
    fs::create_directories(d / "inside");
    CHECK_THROWS_AS(atomic_write(d, "x"), IoError);
    int files = 0;
    for (auto& e : fs::directory_iterator(dir.path)) files += e.path().filename().string().find(".tmp") != std::string::npos;
    CHECK(files == 0);
    CHECK_THROWS_AS(read_file(dir.path / "missing"), IoError);
}

TEST_CASE("missions through the service") {
    testing::TempDir dir;
    Store st(dir.path);
    Service svc(st, options());
    const json made = svc.create_mission(tiny_doc());
    const std::string id = made["id"];
    CHECK(made["mission"]["name"] == "Tiny");
    json bad = tiny_doc();
    bad["arcSeconds"] = 20;
    CHECK_THROWS_AS(svc.create_mission(bad), ValidationError);
    CHECK_THROWS_AS(svc.put_mission(id, bad), ValidationError);
    CHECK(svc.mission(id)["mission"]["arcSeconds"] == 30);
    json renamed = tiny_doc();
    renamed["name"] = "Tiny 2";
    svc.put_mission(id, renamed);
    CHECK(svc.missions()[0]["name"] == "Tiny 2");
    CHECK_THROWS_AS(svc.put_mission("m0077", renamed), NotFound);
}

TEST_CASE("planner jobs") {
    testing::TempDir dir;
    Store st(dir.path);
    Service svc(st, options());
    const std::string m = svc.create_mission(tiny_doc())["id"];

    const json j = svc.submit_plan(m, quick(2.0));
    CHECK((j["state"] == "queued" || j["state"] == "running"));
    CHECK_THROWS_AS(svc.submit_plan(m, quick()), Conflict);
    const json done = svc.wait_job(j["id"]);
    CHECK(done["state"] == "done");
    CHECK(svc.job(j["id"])["state"] == "done");
    const json res = svc.plan_result(m, done["runId"]);
    CHECK(!res["solutions"].empty());
    CHECK(svc.runs(m).size() == 1);
    CHECK(svc.runs(m)[0]["finished"] == true);

    // cancel a long run
    const json k = svc.submit_plan(m, quick(60.0));
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    svc.cancel_job(k["id"]);
    const auto t0 = std::chrono::steady_clock::now();
    const json c = svc.wait_job(k["id"]);
    CHECK(c["state"] == "canceled");
    CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(20));

    // the slot frees up after a job ends
    const json again = svc.submit_plan(m, quick());
    CHECK(svc.wait_job(again["id"])["state"] == "done");

    CHECK_THROWS_AS(svc.job("j9999"), NotFound);
    CHECK_THROWS_AS(svc.submit_plan(m, {{"runtime", -1}}), ValidationError);
    CHECK_THROWS_AS(svc.submit_plan("m0099", quick()), NotFound);
}

TEST_CASE("sessions") {
    testing::TempDir dir;
    Store st(dir.path);
    Service svc(st, options());
    const std::string m = svc.create_mission(testing::fixture_json("usecase1.json"))["id"];
    const json j = svc.wait_job(svc.submit_plan(m, quick(4.0))["id"]);
    REQUIRE(j["state"] == "done");
    REQUIRE(!svc.plan_result(m, j["runId"])["solutions"].empty());

    CHECK_THROWS_AS(svc.start_session({{"missionId", m}, {"runId", j["runId"]}, {"solutionIndex", 999}}), BadRequest);
    const json sess = svc.start_session({{"missionId", m}, {"runId", j["runId"]}, {"solutionIndex", 0}});
    const std::string id = sess["id"];
    CHECK(id.rfind(m + "-s", 0) == 0);

    auto early = svc.subscribe(id);
    svc.advance(id, 300.0);
    CHECK(svc.session(id)["telemetry"]["t"] == doctest::Approx(300.0));
    auto late = svc.subscribe(id);
    svc.advance(id, 100.0);
    // every subscriber sees the same log from the start
    const auto a = drain(*early), b = drain(*late);
    CHECK(!a.empty());
    CHECK(a == b);
    CHECK(svc.events(id) == [&] {
        std::string s;
        for (const auto& l : a) s += l + "\n";
        return s;
    }());

    // snapshots do not move the session
    const json snap = svc.snapshot(id, 30.0);
    CHECK(snap["time"] == doctest::Approx(430.0));
    CHECK(svc.session(id)["telemetry"]["t"] == doctest::Approx(400.0));

    const json inj = testing::fixture_json("usecase1_injections.json");
    svc.inject(id, inj[0]);
    CHECK_THROWS_AS(svc.inject(id, inj[0]), ValidationError);
    svc.inject(id, inj[1]);

    CHECK_THROWS_AS(svc.replan(id, {{"seed", 1}}), ValidationError);
    const json rj = svc.replan(id, {{"runtime", 3.0}, {"seed", 9}, {"population", 16}});
    CHECK(rj["snapshotTime"] == doctest::Approx(403.0));
    // the session holds at the snapshot until the replacement is applied
    svc.advance(id, 100.0);
    CHECK(svc.session(id)["telemetry"]["t"].get<double>() <= 403.0 + 1e-9);
    const json rd = svc.wait_job(rj["id"]);
    REQUIRE(rd["state"] == "done");
    const json rr = svc.plan_result(m, rd["runId"]);
    REQUIRE(!rr["solutions"].empty());
    CHECK(rr["snapshotTime"] == doctest::Approx(403.0));
    CHECK_THROWS_AS(svc.apply(id, {{"runId", j["runId"]}, {"solutionIndex", 0}}), NotFound);
    const json applied = svc.apply(id, {{"runId", rd["runId"]}, {"solutionIndex", 0}});
    CHECK(applied["record"]["plans"].size() == 2);
    CHECK(applied["telemetry"]["t"] == doctest::Approx(403.0));

    svc.advance(id, 20000.0);
    const json end = svc.session(id)["telemetry"];
    CHECK(end["terminal"] == true);
    // pacing
    CHECK_THROWS_AS(svc.pace(id, {{"factor", -1}}), ValidationError);
    CHECK(svc.pace(id, {{"factor", 0}})["pace"] == 0.0);
    CHECK_THROWS_AS(svc.session("m0001-s0099"), NotFound);
}

TEST_CASE("pacing moves the clock") {
    testing::TempDir dir;
    Store st(dir.path);
    Service svc(st, options());
    const std::string m = svc.create_mission(tiny_doc())["id"];
    const json j = svc.wait_job(svc.submit_plan(m, quick())["id"]);
    const std::string id = svc.start_session({{"missionId", m}, {"runId", j["runId"]}, {"solutionIndex", 0}})["id"];
    svc.pace(id, {{"factor", 200.0}});
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    svc.pace(id, {{"factor", 0.0}});
    const double t = svc.session(id)["telemetry"]["t"];
    CHECK(t > 20.0);
    CHECK(t < 400.0);
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    CHECK(svc.session(id)["telemetry"]["t"] == t);
}

TEST_CASE("HTTP interface") {
    testing::TempDir dir;
    Store st(dir.path);
    Service svc(st, options());
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread th([&] { server.listen(); });
    while (!server.running()) std::this_thread::sleep_for(std::chrono::milliseconds(10));

    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(60, 0);
    auto body = [](const httplib::Result& r) { return json::parse(r->body); };

    auto h = cli.Get("/health");
    REQUIRE(h);
    CHECK(h->status == 200);

    json bad = tiny_doc();
    bad["arcSeconds"] = 20;
    auto r = cli.Post("/missions", bad.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
    const json problem = body(r);
    CHECK(problem["status"] == 400);
    CHECK(problem.contains("title"));
    CHECK(problem["issues"][0]["path"] == "/arcSeconds");

    r = cli.Post("/missions", "{not json", "application/json");
    CHECK(r->status == 400);

    r = cli.Post("/missions", tiny_doc().dump(), "application/json");
    REQUIRE(r->status == 201);
    const std::string m = body(r)["id"];
    CHECK(cli.Get("/missions/" + m)->status == 200);
    CHECK(cli.Get("/missions/m0999")->status == 404);
    CHECK(body(cli.Get("/missions")).size() == 1);

    r = cli.Post("/missions/" + m + "/plan", quick(1.0).dump(), "application/json");
    REQUIRE(r->status == 202);
    const std::string job = body(r)["id"];
    CHECK(cli.Post("/missions/" + m + "/plan", quick().dump(), "application/json")->status == 409);
    svc.wait_job(job);
    const json jj = body(cli.Get("/jobs/" + job));
    CHECK(jj["state"] == "done");
    const std::string run = jj["runId"];
    CHECK(body(cli.Get("/missions/" + m + "/plans")).size() == 1);
    CHECK(!body(cli.Get("/missions/" + m + "/plans/" + run))["solutions"].empty());

    r = cli.Post("/sessions", json{{"missionId", m}, {"runId", run}, {"solutionIndex", 0}}.dump(), "application/json");
    REQUIRE(r->status == 201);
    const std::string sid = body(r)["id"];
    r = cli.Post("/sessions/" + sid + "/advance", json{{"seconds", 500}}.dump(), "application/json");
    CHECK(r->status == 200);
    CHECK(body(r)["telemetry"]["t"] == doctest::Approx(500.0));
    r = cli.Get("/sessions/" + sid + "/snapshot?delta=10");
    CHECK(body(r)["time"] == doctest::Approx(510.0));
    json obj = {{"name", "P9"}, {"type", "target_photographing"},
                {"geometry", {{"kind", "point"}, {"position", {{"lat", 36.2}, {"lon", -2.6}}}}}};
    CHECK(cli.Post("/sessions/" + sid + "/objectives", obj.dump(), "application/json")->status == 201);
    CHECK(cli.Post("/sessions/" + sid + "/objectives", obj.dump(), "application/json")->status == 400);
    r = cli.Post("/sessions/" + sid + "/replan", json{{"runtime", 2}, {"seed", 3}}.dump(), "application/json");
    REQUIRE(r->status == 202);
    const json rp = body(r);
    CHECK(rp["snapshotTime"] == doctest::Approx(502.0));
    svc.wait_job(rp["id"]);
    r = cli.Post("/sessions/" + sid + "/apply", json{{"runId", rp["runId"]}, {"solutionIndex", 0}}.dump(),
                 "application/json");
    CHECK(r->status == 200);

    r = cli.Get("/sessions/" + sid + "/telemetry?follow=0");
    REQUIRE(r->status == 200);
    int lines = 0;
    std::istringstream in(r->body);
    for (std::string l; std::getline(in, l);) {
        if (l.empty()) continue;
        ++lines;
        CHECK(json::parse(l).contains("kind"));
    }
    CHECK(lines >= 2); // injection and plan switch at least
    CHECK(r->body == svc.events(sid));
    CHECK(cli.Delete("/jobs/j0999")->status == 404);
    CHECK(cli.Get("/nowhere")->status == 404);

    server.stop();
    th.join();
}
