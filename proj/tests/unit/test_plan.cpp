#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "testing.hpp"
#include "uavmp/evaluate.hpp"
#include "uavmp/population.hpp"

using namespace uavmp;
using nlohmann::json;

namespace {

json only(const std::string& uav, std::vector<std::string> tasks, const std::string& profile = "min_consumption") {
    json g = {{"tasks", json::array()}, {"uavs", json::array()}};
    double order = 0;
    for (const auto& t : tasks)
        g["tasks"].push_back({{"task", t}, {"uavs", {uav}}, {"order", order++}, {"profile", profile}, {"sensor", "EO/IR"}});
    for (const char* u : {"A", "B"}) g["uavs"].push_back({{"uav", u}, {"gcs", "G"}, {"returnProfile", profile}});
    return g;
}

// tiny fixture with every task optional, so partial genomes decode
std::shared_ptr<PlanningContext> tiny(const std::function<void(Mission&)>& edit = {}) {
    Mission m = testing::fixture_mission("tiny.json");
    m.profile.all_tasks_mandatory = false;
    for (auto& o : m.objectives) o.mandatory = false;
    if (edit) edit(m);
    auto grid = load_mission_grid(m, "");
    return std::make_shared<PlanningContext>(std::move(m), std::move(grid));
}

double task_start(const Schedule& s, const std::vector<std::size_t>& ts) {
    double v = std::numeric_limits<double>::infinity();
    for (auto t : ts) v = std::min(v, s.tasks[t].start_s);
    return v;
}
double task_end(const Schedule& s, const std::vector<std::size_t>& ts) {
    double v = -std::numeric_limits<double>::infinity();
    for (auto t : ts) v = std::max(v, s.tasks[t].end_s);
    return v;
}

} // namespace

TEST_CASE("risk interpolation") {
    using D = RiskDirection;
    CHECK(risk_interp(50, 50, 90, D::increasing) == 0.0);
    CHECK(risk_interp(90, 50, 90, D::increasing) == 100.0);
    CHECK(risk_interp(70, 50, 90, D::increasing) == doctest::Approx(50.0));
    CHECK(risk_interp(60, 50, 90, D::increasing) == doctest::Approx(25.0));
    CHECK(risk_interp(-1e9, 50, 90, D::increasing) == 0.0);
    CHECK(risk_interp(1e9, 50, 90, D::increasing) == 100.0);
    CHECK(risk_interp(150, 150, 1000, D::decreasing) == 100.0);
    CHECK(risk_interp(1000, 150, 1000, D::decreasing) == 0.0);
    CHECK(risk_interp(575, 150, 1000, D::decreasing) == doctest::Approx(50.0));
    CHECK(risk_interp(0, 150, 1000, D::decreasing) == 100.0);
    CHECK_THROWS_AS(risk_interp(1, 5, 5, D::increasing), Error);
    CHECK_THROWS_AS(risk_interp(1, 6, 5, D::decreasing), Error);
    // monotone and bounded on a sweep
    double prev = -1;
    for (double v = 0; v <= 120; v += 0.5) {
        const double r = risk_interp(v, 50, 90, D::increasing);
        CHECK(r >= prev);
        CHECK(r >= 0);
        CHECK(r <= 100);
        prev = r;
    }
}

TEST_CASE("single task decode matches the closed form") {
    auto ctx = tiny();
    const json snap = testing::oracle("geo_cases.json")["snapshot"];
    const Schedule s = decode_schedule(*ctx, testing::genome(*ctx, only("A", {"P1/photograph"})));
    const std::size_t p1 = ctx->task_index("P1/photograph");
    REQUIRE(s.tasks[p1].performed);
    CHECK(s.tasks[p1].arrival_s == doctest::Approx(snap["arrival"].get<double>()).epsilon(1e-9));
    CHECK(s.tasks[p1].start_s == doctest::Approx(snap["arrival"].get<double>()).epsilon(1e-9));
    CHECK(s.tasks[p1].end_s - s.tasks[p1].start_s == doctest::Approx(60.0));
    CHECK(s.tasks[p1].wait_s == 0.0);

    const UavPlan& a = s.uavs[0];
    REQUIRE(a.used);
    CHECK_FALSE(s.uavs[1].used);
    CHECK(a.segments.front().phase == Phase::takeoff_climb);
    CHECK(a.segments.back().phase == Phase::landing_descent);
    // contiguous timeline
    for (std::size_t k = 1; k < a.segments.size(); ++k) CHECK(a.segments[k].t0 == doctest::Approx(a.segments[k - 1].t1));
    const double t = snap["time"].get<double>();
    const GeoPoint p = position_at(a, t);
    CHECK(p.lat == doctest::Approx(snap["lat"].get<double>()).epsilon(1e-9));
    CHECK(p.lon == doctest::Approx(snap["lon"].get<double>()).epsilon(1e-9));
    CHECK(p.alt == doctest::Approx(snap["alt"].get<double>()).epsilon(1e-9));
    CHECK(40.0 - fuel_burned_until(a, t) == doctest::Approx(snap["fuelLeft"].get<double>()).epsilon(1e-9));
    CHECK(airborne_at(a, t));
    CHECK_FALSE(airborne_at(a, a.landing_s + 10));
}

TEST_CASE("time window forces a wait loiter") {
    auto p = tiny([](Mission& m) {
        m.start_epoch = *parse_timestamp("2024-05-01T08:00:00Z");
        m.objectives[0].window = TimeWindow{2000.0, 4000.0};
    });
    const PlanningContext& ctx = *p;
    const Schedule s = decode_schedule(ctx, testing::genome(ctx, only("A", {"P1/photograph"})));
    const TaskRecord& r = s.tasks[ctx.task_index("P1/photograph")];
    CHECK(r.start_s == doctest::Approx(2000.0));
    CHECK(r.wait_s == doctest::Approx(2000.0 - r.arrival_s));
    bool loiter = false;
    for (const auto& seg : s.uavs[0].segments)
        if (seg.kind == SegmentKind::wait) {
            loiter = true;
            CHECK(seg.from == seg.to);
            CHECK(seg.duration() == doctest::Approx(r.wait_s));
        }
    CHECK(loiter);
    const Evaluated e = evaluate_genome(ctx, testing::genome(ctx, only("A", {"P1/photograph"})));
    CHECK(e.feasible());
}

TEST_CASE("decoded dependencies hold on use case 1") {
    auto ctx = testing::fixture_context("usecase1.json");
    Rng rng(7);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        PlanGenome g = random_genome(*ctx, rng);
        repair(*ctx, g, rng);
        const Schedule s = decode_schedule(*ctx, g);
        if (!s.timing_converged) continue;
        for (const auto& d : ctx->dependencies()) {
            bool all = true;
            for (auto t : d.first) all &= s.tasks[t].performed;
            for (auto t : d.second) all &= s.tasks[t].performed;
            if (!all) continue;
            ++checked;
            const Interval a{task_start(s, d.first), task_end(s, d.first)};
            const Interval b{task_start(s, d.second), task_end(s, d.second)};
            CHECK_MESSAGE(allen_holds(d.relation, a, b, d.offset_s), d.label);
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("closeness") {
    auto ctx = tiny();
    const Schedule one = decode_schedule(*ctx, testing::genome(*ctx, only("A", {"P1/photograph"})));
    CHECK(std::isinf(min_separation(*ctx, one)));
    CHECK(closeness_risk(*ctx, one) == 0.0);

    json both = only("A", {"P1/photograph"});
    both["tasks"].push_back({{"task", "P3/photograph"}, {"uavs", {"B"}}, {"order", 0}, {"profile", "min_consumption"}, {"sensor", "EO/IR"}});
    const Schedule two = decode_schedule(*ctx, testing::genome(*ctx, both));
    const double sep = min_separation(*ctx, two);
    REQUIRE(std::isfinite(sep));
    // independent fine probe; sampling can miss at most the closing distance of one step
    const double slack = 2 * 110 * 1852.0 / 3600.0 * kSampleStepS;
    double probe = std::numeric_limits<double>::infinity();
    for (double t = 0; t < 6000; t += 0.25) {
        if (!airborne_at(two.uavs[0], t) || !airborne_at(two.uavs[1], t)) continue;
        probe = std::min(probe, geo::distance_3d_m(position_at(two.uavs[0], t), position_at(two.uavs[1], t)));
    }
    CHECK(probe <= sep + 1e-6);
    CHECK(probe >= sep - slack);
    CHECK(closeness_risk(*ctx, two) ==
          doctest::Approx(risk_interp(sep, 150, 1000, RiskDirection::decreasing)));
}

TEST_CASE("objectives are finite, non-negative and deterministic") {
    for (const char* f : {"tiny.json", "usecase1.json", "usecase2.json"}) {
        auto ctx = testing::fixture_context(f);
        Rng rng(11);
        for (int i = 0; i < 60; ++i) {
            PlanGenome g = random_genome(*ctx, rng);
            repair(*ctx, g, rng);
            const Evaluated a = evaluate_genome(*ctx, g);
            const Evaluated b = evaluate_genome(*ctx, g);
            CHECK(a.objectives == b.objectives);
            for (std::size_t k = 0; k < 8; ++k) {
                CHECK(std::isfinite(a.objectives[k]));
                if (k != 6) CHECK(a.objectives[k] >= 0.0); // task count is negated
            }
            CHECK(a.objectives[6] <= 0.0);
            const auto c = a.report.criteria();
            for (std::size_t k = 5; k < 9; ++k) {
                CHECK(c[k] >= 0.0);
                CHECK(c[k] <= 100.0);
            }
        }
    }
}

TEST_CASE("more work costs more") {
    auto ctx = tiny();
    const auto one = evaluate_genome(*ctx, testing::genome(*ctx, only("A", {"P1/photograph"})));
    const auto two = evaluate_genome(*ctx, testing::genome(*ctx, only("A", {"P1/photograph", "P2/photograph"})));
    CHECK(two.report.distance_m > one.report.distance_m);
    CHECK(two.report.fuel_kg > one.report.fuel_kg);
    CHECK(two.report.flight_time_s > one.report.flight_time_s);
    CHECK(two.report.cost > one.report.cost);
    CHECK(two.report.n_tasks == one.report.n_tasks + 1);

    const auto fast = evaluate_genome(*ctx, testing::genome(*ctx, only("A", {"P1/photograph"}, "max_speed")));
    CHECK(fast.report.makespan_s < one.report.makespan_s);
    CHECK(fast.report.distance_m == doctest::Approx(one.report.distance_m).epsilon(1e-6));
}

TEST_CASE("genome structure") {
    auto ctx = tiny();
    PlanGenome g = testing::genome(*ctx, only("A", {"P1/photograph"}));
    CHECK(testing::genome(*ctx, to_json(*ctx, g)) == g);
    g.tasks[0].uavs = {7};
    CHECK_THROWS_AS(check_structure(*ctx, g), StructureError);
    CHECK_THROWS_AS(decode_schedule(*ctx, g), StructureError);
    json bad = only("Z", {"P1/photograph"});
    CHECK_THROWS_AS(testing::genome(*ctx, bad), StructureError);
}
