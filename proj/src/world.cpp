#include "crossing/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace crossing {

const char* leg_name(Leg leg) {
    switch (leg) {
        case Leg::North: return "north";
        case Leg::South: return "south";
        case Leg::East: return "east";
        case Leg::West: return "west";
    }
    return "?";
}

std::optional<Leg> parse_leg(const std::string& name) {
    if (name == "north") return Leg::North;
    if (name == "south") return Leg::South;
    if (name == "east") return Leg::East;
    if (name == "west") return Leg::West;
    return std::nullopt;
}

namespace {

// Quarter-turn rotations about the origin. k = 0 maps the canonical frame to
// the south entry, 1 to east, 2 to north, 3 to west.
Vec2 rot(const Vec2& p, int k) {
    switch (k & 3) {
        case 0: return p;
        case 1: return {-p.y, p.x};
        case 2: return {-p.x, -p.y};
        default: return {p.y, -p.x};
    }
}

Leg rotated_leg(Leg base, int k) {
    static const Leg order[4] = {Leg::South, Leg::East, Leg::North, Leg::West};
    int idx = 0;
    while (order[idx] != base) ++idx;
    return order[(idx + k) & 3];
}

struct Segment {
    bool is_arc = false;
    Vec2 a, b;       // straight endpoints
    Vec2 center;     // arc
    double r = 0.0, th0 = 0.0, th1 = 0.0;
    double len = 0.0;
};

struct Curve {
    std::vector<Segment> segs;
    double total = 0.0;

    void add_straight(const Vec2& a, const Vec2& b) {
        Segment s;
        s.a = a;
        s.b = b;
        s.len = distance(a, b);
        if (s.len <= 0.0) return;
        segs.push_back(s);
        total += s.len;
    }
    void add_arc(const Vec2& center, double r, double th0, double th1) {
        Segment s;
        s.is_arc = true;
        s.center = center;
        s.r = r;
        s.th0 = th0;
        s.th1 = th1;
        s.len = r * std::abs(th1 - th0);
        segs.push_back(s);
        total += s.len;
    }
    Vec2 at(double s) const {
        s = std::clamp(s, 0.0, total);
        for (const auto& seg : segs) {
            if (s <= seg.len + 1e-12) {
                double t = seg.len > 0.0 ? s / seg.len : 0.0;
                if (!seg.is_arc) return seg.a + (seg.b - seg.a) * t;
                double th = seg.th0 + (seg.th1 - seg.th0) * t;
                return seg.center + Vec2{std::cos(th), std::sin(th)} * seg.r;
            }
            s -= seg.len;
        }
        const auto& last = segs.back();
        return last.is_arc ? last.center + Vec2{std::cos(last.th1), std::sin(last.th1)} * last.r
                           : last.b;
    }
};

struct Builder {
    const WorldConfig& cfg;
    IntersectionMap map;
    std::map<std::pair<long long, long long>, int> index;

    explicit Builder(const WorldConfig& c) : cfg(c) { map.cfg = c; }

    int node(const Vec2& p) {
        auto key = std::make_pair(

            static_cast<long long>(std::llround(p.x * 1e7)),
            static_cast<long long>(std::llround(p.y * 1e7)));
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(map.nodes.size());
        map.nodes.push_back(GraphNode{p, {}});
        index.emplace(key, id);
        return id;
    }

    // Samples the curve with forced interior arc-length splits; each span is
    // subdivided into max(1, round(len/spacing)) equal steps. Returns the
    // chain and wires directed edges along it.
    void add_chain(const Curve& curve, std::vector<double> splits,
                   std::vector<Vec2> exact = {}) {
        splits.push_back(0.0);
        splits.push_back(curve.total);
        std::sort(splits.begin(), splits.end());
        Chain chain;
        std::size_t exact_i = 0;
        auto push = [&](const Vec2& p) {
            int id = node(p);
            if (!chain.nodes.empty() && chain.nodes.back() != id) {
                double cost = distance(map.nodes[chain.nodes.back()].pos, p);
                map.nodes[chain.nodes.back()].out.push_back({id, cost});
            }
            if (chain.nodes.empty() || chain.nodes.back() != id) chain.nodes.push_back(id);
        };
        push(exact_i < exact.size() ? exact[exact_i++] : curve.at(0.0));
        for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
            double s0 = splits[s], s1 = splits[s + 1];
            if (s1 - s0 <= 1e-9) continue;
            int n = std::max(1, static_cast<int>(std::llround((s1 - s0) / cfg.spacing)));
            for (int j = 1; j <= n; ++j) {
                bool at_split = (j == n);
                if (at_split && exact_i < exact.size())
                    push(exact[exact_i++]);
                else
                    push(curve.at(s0 + (s1 - s0) * j / n));
            }
        }
        map.chains.push_back(std::move(chain));
    }
};

}  // namespace

IntersectionMap build_intersection(const WorldConfig& cfg) {
    if (cfg.lane_width <= 0.0 || cfg.leg_length <= 0.0 || cfg.spacing <= 0.0 ||
        cfg.left_turn_radius <= 0.0 || cfg.junction_half <= 0.0 || cfg.speed_limit <= 0.0)
        throw std::invalid_argument("intersection dimensions must be positive");
    double h = cfg.lane_width / 2.0;
    double B = cfg.junction_half;
    if (B <= h) throw std::invalid_argument("junction box must be wider than one lane");
    if (cfg.left_turn_radius >= cfg.lane_width)
        throw std::invalid_argument("left turn radius must be below the lane width");

    Builder b(cfg);
    double rho = cfg.left_turn_radius;
    double rho_r = B - h;  // right turns hug the near corner

    for (int k = 0; k < 4; ++k) {
        Leg entry = rotated_leg(Leg::South, k);
        // Entry leg lane, far endpoint first.
        Curve leg_in;
        leg_in.add_straight(rot({h, -B - cfg.leg_length}, k), rot({h, -B}, k));
        b.add_chain(leg_in, {});
        b.map.entry_node[static_cast<int>(entry)] = b.map.chains.back().nodes.front();

        // Exit leg lane, junction boundary first.
        Curve leg_out;
        leg_out.add_straight(rot({-h, -B}, k), rot({-h, -B - cfg.leg_length}, k));
        b.add_chain(leg_out, {});
        b.map.exit_node[static_cast<int>(entry)] = b.map.chains.back().nodes.back();
    }

    for (int k = 0; k < 4; ++k) {
        // Straight connector; the opposing left turn crosses it at (h, -h).
        Curve straight;
        straight.add_straight(rot({h, -B}, k), rot({h, B}, k));
        b.add_chain(straight, {B - h}, {rot({h, -B}, k), rot({h, -h}, k), rot({h, B}, k)});

        // Left turn: straight, quarter arc, straight; crosses the oncoming
        // lane centerline at (-h, h), the shared conflict waypoint.
        Curve left;
        left.add_straight(rot({h, -B}, k), rot({h, h - rho}, k));
        Vec2 lc = rot({h - rho, h - rho}, k);
        double base = (k & 3) * (std::acos(-1.0) / 2.0);
        left.add_arc(lc, rho, base, base + std::acos(-1.0) / 2.0);
        left.add_straight(rot({h - rho, h}, k), rot({-B, h}, k));
        double conflict_s = (B + h - rho) + rho * std::acos(-1.0) / 2.0 + (cfg.lane_width - rho);
        b.add_chain(left, {conflict_s},
                    {rot({h, -B}, k), rot({-h, h}, k), rot({-B, h}, k)});

        // Right turn.
        Curve right;
        right.add_straight(rot({h, -B}, k), rot({h, -h - rho_r}, k));
        Vec2 rc = rot({h + rho_r, -h - rho_r}, k);
        right.add_arc(rc, rho_r, base + std::acos(-1.0), base + std::acos(-1.0) / 2.0);
        right.add_straight(rot({h + rho_r, -h}, k), rot({B, -h}, k));
        b.add_chain(right, {}, {rot({h, -B}, k), rot({B, -h}, k)});
    }

    return b.map;
}

namespace {

std::vector<int> search_backpointers(const IntersectionMap& map, int start, int goal,
                                     bool use_heuristic, double* out_cost) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> g(map.nodes.size(), inf);
    std::vector<int> prev(map.nodes.size(), -1);
    auto h = [&](int n) {
        return use_heuristic ? distance(map.nodes[n].pos, map.nodes[goal].pos) : 0.0;
    };
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    g[start] = 0.0;
    open.push({h(start), start});
    while (!open.empty()) {
        auto [f, n] = open.top();
        open.pop();
        if (n == goal) break;
        if (f > g[n] + h(n) + 1e-12) continue;
        for (const auto& e : map.nodes[n].out) {
            double cand = g[n] + e.cost;
            if (cand < g[e.to] - 1e-15) {
                g[e.to] = cand;
                prev[e.to] = n;
                open.push({cand + h(e.to), e.to});
            }
        }
    }
    if (out_cost) *out_cost = g[goal];
    return prev;
}

}  // namespace

WaypointPath plan_route(const IntersectionMap& map, Leg entry, Leg exit) {
    if (entry == exit) throw std::invalid_argument("entry and exit legs must differ");
    int start = map.entry_node[static_cast<int>(entry)];
    int goal = map.exit_node[static_cast<int>(exit)];
    double cost = 0.0;
    auto prev = search_backpointers(map, start, goal, true, &cost);
    if (!std::isfinite(cost)) throw std::runtime_error("no route between legs");
    std::vector<Vec2> pts;
    for (int n = goal; n != -1; n = prev[n]) pts.push_back(map.nodes[n].pos);
    if (pts.back().x != map.nodes[start].pos.x || pts.back().y != map.nodes[start].pos.y)
        throw std::runtime_error("no route between legs");
    std::reverse(pts.begin(), pts.end());
    return make_path(std::move(pts));
}

double shortest_route_cost(const IntersectionMap& map, Leg entry, Leg exit) {
    if (entry == exit) throw std::invalid_argument("entry and exit legs must differ");
    int start = map.entry_node[static_cast<int>(entry)];
    int goal = map.exit_node[static_cast<int>(exit)];
    double cost = 0.0;
    search_backpointers(map, start, goal, false, &cost);
    return cost;
}

std::optional<ConflictPoint> find_conflict_point(const WaypointPath& path_a,
                                                 const WaypointPath& path_b) {
    if (path_a.empty() || path_b.empty())
        throw std::invalid_argument("conflict search needs non-empty paths");
    const double eps = 1e-6;
    for (std::size_t i = 0; i < path_a.size(); ++i) {
        for (std::size_t j = 0; j < path_b.size(); ++j) {
            if (distance(path_a.points[i], path_b.points[j]) < eps)
                return ConflictPoint{path_a.points[i], i, j};
        }
    }
    return std::nullopt;
}

double path_distance_to(const WaypointPath& path, const Vec2& pose,
                        std::size_t target_index) {
    if (target_index >= path.size()) throw std::invalid_argument("target index out of range");
    PathProgress p = project_onto_path(path, pose);
    return path.cum_length[target_index] - progress_arc_length(path, p);
}

double path_distance_to(const WaypointPath& path, const PathProgress& progress,
                        std::size_t target_index) {
    if (target_index >= path.size()) throw std::invalid_argument("target index out of range");
    return path.cum_length[target_index] - progress_arc_length(path, progress);
}

}  // namespace crossing
