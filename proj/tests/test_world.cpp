#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "crossing/world.hpp"

using namespace crossing;

TEST_CASE("leg names round-trip") {
    for (Leg l : {Leg::North, Leg::South, Leg::East, Leg::West})
        CHECK(parse_leg(leg_name(l)) == l);
    CHECK(!parse_leg("northwest").has_value());
}

TEST_CASE("build rejects bad dimensions") {
    WorldConfig cfg;
    cfg.lane_width = -1.0;
    CHECK_THROWS_AS(build_intersection(cfg), std::invalid_argument);
    cfg = WorldConfig{};
    cfg.left_turn_radius = cfg.lane_width + 1.0;  // conflict leaves the exit straight
    CHECK_THROWS_AS(build_intersection(cfg), std::invalid_argument);
    cfg = WorldConfig{};
    cfg.junction_half = cfg.lane_width / 2.0 - 0.1;
    CHECK_THROWS_AS(build_intersection(cfg), std::invalid_argument);
}

TEST_CASE("waypoint spacing stays within 10 percent of the target") {
    IntersectionMap map = build_intersection(WorldConfig{});
    double lo = map.cfg.spacing * 0.9, hi = map.cfg.spacing * 1.1;
    int checked = 0;
    for (const Chain& c : map.chains) {
        for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i) {
            double d = distance(map.nodes[c.nodes[i]].pos, map.nodes[c.nodes[i + 1]].pos);
            CHECK(d >= lo);
            CHECK(d <= hi);
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("all twelve routes exist and share no route with its own entry") {
    IntersectionMap map = build_intersection(WorldConfig{});
    for (Leg a : {Leg::North, Leg::South, Leg::East, Leg::West}) {
        CHECK_THROWS_AS(plan_route(map, a, a), std::invalid_argument);
        for (Leg b : {Leg::North, Leg::South, Leg::East, Leg::West}) {
            if (a == b) continue;
            WaypointPath p = plan_route(map, a, b);
            CHECK(p.size() >= 2);
            CHECK(p.length() > 2.0 * map.cfg.leg_length * 0.9);
        }
    }
}

TEST_CASE("A* route cost matches the Dijkstra oracle") {
    IntersectionMap map = build_intersection(WorldConfig{});
    for (Leg a : {Leg::North, Leg::South, Leg::East, Leg::West})
        for (Leg b : {Leg::North, Leg::South, Leg::East, Leg::West}) {
            if (a == b) continue;
            WaypointPath p = plan_route(map, a, b);
            CHECK(p.length() == doctest::Approx(shortest_route_cost(map, a, b)).epsilon(1e-12));
        }
}

TEST_CASE("straight route is collinear along the lane") {
    IntersectionMap map = build_intersection(WorldConfig{});
    WaypointPath p = plan_route(map, Leg::North, Leg::South);
    for (const Vec2& q : p.points) CHECK(q.x == doctest::Approx(-map.cfg.lane_width / 2.0));
    CHECK(p.points.front().y > p.points.back().y);
}

TEST_CASE("conflict point of the default scenario routes") {
    IntersectionMap map = build_intersection(WorldConfig{});
    WaypointPath ego = plan_route(map, Leg::South, Leg::West);
    WaypointPath north = plan_route(map, Leg::North, Leg::South);
    auto c = find_conflict_point(ego, north);
    REQUIRE(c.has_value());
    CHECK(c->position.x == doctest::Approx(-map.cfg.lane_width / 2.0));
    CHECK(c->position.y == doctest::Approx(map.cfg.lane_width / 2.0));

    // Brute-force oracle: first index pair with coincident waypoints.
    bool found = false;
    for (std::size_t i = 0; i < ego.size() && !found; ++i)
        for (std::size_t j = 0; j < north.size(); ++j)
            if (distance(ego.points[i], north.points[j]) < 1e-6) {
                CHECK(i == c->ego_index);
                CHECK(j == c->north_index);
                found = true;
                break;
            }
    CHECK(found);
}

TEST_CASE("non-crossing routes have no conflict point") {
    IntersectionMap map = build_intersection(WorldConfig{});
    WaypointPath a = plan_route(map, Leg::South, Leg::East);   // right turn
    WaypointPath b = plan_route(map, Leg::North, Leg::South);  // opposite straight
    CHECK(!find_conflict_point(a, b).has_value());
}

TEST_CASE("quarter-turn symmetry of route lengths") {
    IntersectionMap map = build_intersection(WorldConfig{});
    double l1 = plan_route(map, Leg::South, Leg::West).length();
    double l2 = plan_route(map, Leg::West, Leg::North).length();
    double l3 = plan_route(map, Leg::North, Leg::East).length();
    double l4 = plan_route(map, Leg::East, Leg::South).length();
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-9));
    CHECK(l1 == doctest::Approx(l3).epsilon(1e-9));
    CHECK(l1 == doctest::Approx(l4).epsilon(1e-9));
}

TEST_CASE("path_distance_to is signed around the target") {
    IntersectionMap map = build_intersection(WorldConfig{});
    WaypointPath p = plan_route(map, Leg::North, Leg::South);
    std::size_t target = p.size() / 2;
    Vec2 before = p.points[target - 2], after = p.points[target + 2];
    CHECK(path_distance_to(p, before, target) > 0.0);
    CHECK(path_distance_to(p, after, target) < 0.0);
    CHECK(path_distance_to(p, p.points[target], target) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("inside_junction honors the margin") {
    IntersectionMap map = build_intersection(WorldConfig{});
    double b = map.cfg.junction_half;
    CHECK(map.inside_junction({0, 0}));
    CHECK(map.inside_junction({b, -b}));
    CHECK(!map.inside_junction({b + 0.1, 0}));
    CHECK(map.inside_junction({b + 0.1, 0}, 0.2));
}

TEST_CASE("entry and exit nodes sit at the leg far ends") {
    IntersectionMap map = build_intersection(WorldConfig{});
    double far = map.cfg.junction_half + map.cfg.leg_length;
    const Vec2 entry_south = map.nodes[map.entry_node[static_cast<int>(Leg::South)]].pos;
    CHECK(entry_south.y == doctest::Approx(-far));
    CHECK(entry_south.x == doctest::Approx(map.cfg.lane_width / 2.0));
    const Vec2 exit_south = map.nodes[map.exit_node[static_cast<int>(Leg::South)]].pos;
    CHECK(exit_south.y == doctest::Approx(-far));
    CHECK(exit_south.x == doctest::Approx(-map.cfg.lane_width / 2.0));
}
