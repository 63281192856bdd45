#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crossing/geometry.hpp"

using namespace crossing;

namespace {

PathProgress progress_at(const WaypointPath& p, double s) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        double seg = p.cum_length[i + 1] - p.cum_length[i];
        if (s <= p.cum_length[i + 1] || i + 2 == p.size())
            return {i, (s - p.cum_length[i]) / seg};
    }
    return {0, 0.0};
}

Vec2 at_arc(const WaypointPath& p, double s) { return point_at_progress(p, progress_at(p, s)); }

WaypointPath circle_path(double r, int n) {
    std::vector<Vec2> pts;
    for (int i = 0; i <= n; ++i) {
        double a = 2.0 * M_PI * i / n;
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return make_path(pts);
}

}  // namespace

TEST_CASE("vec2 arithmetic") {
    Vec2 a{3.0, 4.0}, b{-1.0, 2.0};
    CHECK((a + b).x == doctest::Approx(2.0));
    CHECK((a - b).y == doctest::Approx(2.0));
    CHECK(a.dot(b) == doctest::Approx(5.0));
    CHECK(a.norm() == doctest::Approx(5.0));
    CHECK(distance(a, b) == doctest::Approx(std::sqrt(16.0 + 4.0)));
}

TEST_CASE("cumulative length matches pairwise sums") {
    WaypointPath p = make_path({{0, 0}, {3, 0}, {3, 4}, {0, 4}});
    REQUIRE(p.size() == 4);
    CHECK(p.cum_length[0] == 0.0);
    CHECK(p.cum_length[1] == doctest::Approx(3.0));
    CHECK(p.cum_length[2] == doctest::Approx(7.0));
    CHECK(p.length() == doctest::Approx(10.0));
}

TEST_CASE("projection onto a straight path") {
    WaypointPath p = make_path({{0, 0}, {10, 0}});
    PathProgress pr = project_onto_path(p, {4.0, 3.0});
    CHECK(pr.index == 0);
    CHECK(pr.fraction == doctest::Approx(0.4));
    CHECK(progress_arc_length(p, pr) == doctest::Approx(4.0));

    // Beyond the endpoints the projection clamps.
    CHECK(progress_arc_length(p, project_onto_path(p, {-5.0, 1.0})) == doctest::Approx(0.0));
    CHECK(progress_arc_length(p, project_onto_path(p, {15.0, 1.0})) == doctest::Approx(10.0));
}

TEST_CASE("projection at an interior vertex advances to the next segment") {
    WaypointPath p = make_path({{0, 0}, {5, 0}, {5, 5}});
    PathProgress pr = project_onto_path(p, {5.0, 0.0});
    CHECK(((pr.index == 1 && pr.fraction == doctest::Approx(0.0)) ||
           (pr.index == 0 && pr.fraction == doctest::Approx(1.0))));
    CHECK(progress_arc_length(p, pr) == doctest::Approx(5.0));
}

TEST_CASE("point_at_progress inverts progress_arc_length") {
    WaypointPath p = make_path({{0, 0}, {2, 0}, {2, 2}, {4, 2}});
    for (double s : {0.0, 0.7, 2.0, 3.3, 5.9}) {
        PathProgress pr = project_onto_path(p, at_arc(p, s));
        CHECK(progress_arc_length(p, pr) == doctest::Approx(s).epsilon(1e-9));
    }
}

TEST_CASE("signed cross-track: positive left, mirrored paths flip sign") {
    WaypointPath p = make_path({{0, 0}, {10, 0}});
    CHECK(signed_cross_track(p, {5.0, 2.0}) == doctest::Approx(2.0));
    CHECK(signed_cross_track(p, {5.0, -2.0}) == doctest::Approx(-2.0));

    WaypointPath rev = make_path({{10, 0}, {0, 0}});
    CHECK(signed_cross_track(rev, {5.0, 2.0}) == doctest::Approx(-2.0));
}

TEST_CASE("curvature: straight path is zero") {
    WaypointPath p = make_path({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(curvature_at(p, i) == doctest::Approx(0.0));
}

TEST_CASE("curvature: sampled circle recovers 1/r with sign") {
    for (double r : {2.0, 4.5, 10.0}) {
        WaypointPath ccw = circle_path(r, 64);
        // CCW travel turns left: positive curvature.
        CHECK(curvature_at(ccw, 10) == doctest::Approx(1.0 / r).epsilon(1e-6));

        std::vector<Vec2> rev(ccw.points.rbegin(), ccw.points.rend());
        WaypointPath cw = make_path(rev);
        CHECK(curvature_at(cw, 10) == doctest::Approx(-1.0 / r).epsilon(1e-6));
    }
}

TEST_CASE("curvature_at_progress interpolates between waypoints") {
    WaypointPath p = circle_path(3.0, 48);
    PathProgress pr{5, 0.5};
    CHECK(curvature_at_progress(p, pr) == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
}

TEST_CASE("make_path rejects degenerate input") {
    CHECK_THROWS_AS(make_path({}), std::invalid_argument);
    CHECK_THROWS_AS(make_path({{0, 0}}), std::invalid_argument);
}

TEST_CASE("projection arc length is monotone while walking the path") {
    WaypointPath p = make_path({{0, 0}, {4, 1}, {6, 5}, {9, 5}, {12, 8}});
    double prev = -1.0;
    for (double s = 0.0; s <= p.length(); s += 0.05) {
        Vec2 q = at_arc(p, s);
        double arc = progress_arc_length(p, project_onto_path(p, q));
        CHECK(arc >= prev - 1e-12);
        prev = arc;
    }
}
