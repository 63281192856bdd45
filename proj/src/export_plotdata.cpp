#include "crossing/export.hpp"

#include <cstdio>
#include <sstream>

#include "crossing/nn.hpp"

namespace crossing {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
    std::ostringstream os;
    os << "t,ego_x,ego_y,ego_v,ego_a_lon,ego_a_lat,north_x,north_y,north_v,north_active,"
          "throttle_learned,throttle_applied,brake_applied,steer_applied,adas,"
          "ttr_ego,ttr_north,d_safe,d_c_ego,gap,"
          "r_adas,r_v,r_lka,r_a_lon,r_a_lat,r_total\n";
    for (const TraceRow& r : trace) {
        os << fmt(r.t) << ',' << fmt(r.ego.x) << ',' << fmt(r.ego.y) << ',' << fmt(r.ego.v)
           << ',' << fmt(r.ego.a_lon) << ',' << fmt(r.ego.a_lat) << ',' << fmt(r.north.x)
           << ',' << fmt(r.north.y) << ',' << fmt(r.north.v) << ','
           << (r.north_active ? 1 : 0) << ',' << fmt(r.learned.throttle) << ','
           << fmt(r.applied.throttle) << ',' << fmt(r.applied.brake) << ','
           << fmt(r.applied.steer) << ',' << (r.adas_active ? 1 : 0) << ','
           << fmt(r.ttr_ego) << ',' << fmt(r.ttr_north) << ',' << fmt(r.d_safe) << ','
           << fmt(r.d_c_ego) << ',' << fmt(r.gap) << ',' << fmt(r.reward.r_adas) << ','
           << fmt(r.reward.r_v) << ',' << fmt(r.reward.r_lka) << ',' << fmt(r.reward.r_a_lon)
           << ',' << fmt(r.reward.r_a_lat) << ',' << fmt(r.reward.total) << '\n';
    }
    return os.str();
}

void export_plotdata(const std::vector<TraceRow>& trace, const std::string& metrics_csv,
                     const std::string& out_dir) {
    std::ostringstream traj, speeds, shield, rewards;
    traj << "t,ego_x,ego_y,north_x,north_y\n";
    speeds << "t,ego_v_kmh,north_v_kmh,throttle,brake\n";
    shield << "t,ttr_ego,ttr_north,ttr_gap,d_safe,d_c_ego,adas\n";
    rewards << "t,r_adas,r_v,r_lka,r_a_lon,r_a_lat,r_total\n";
    for (const TraceRow& r : trace) {
        traj << fmt(r.t) << ',' << fmt(r.ego.x) << ',' << fmt(r.ego.y) << ','
             << fmt(r.north.x) << ',' << fmt(r.north.y) << '\n';
        speeds << fmt(r.t) << ',' << fmt(r.ego.v * 3.6) << ',' << fmt(r.north.v * 3.6) << ','
               << fmt(r.applied.throttle) << ',' << fmt(r.applied.brake) << '\n';
        shield << fmt(r.t) << ',' << fmt(r.ttr_ego) << ',' << fmt(r.ttr_north) << ','
               << fmt(r.ttr_north - r.ttr_ego) << ',' << fmt(r.d_safe) << ','
               << fmt(r.d_c_ego) << ',' << (r.adas_active ? 1 : 0) << '\n';
        rewards << fmt(r.t) << ',' << fmt(r.reward.r_adas) << ',' << fmt(r.reward.r_v) << ','
                << fmt(r.reward.r_lka) << ',' << fmt(r.reward.r_a_lon) << ','
                << fmt(r.reward.r_a_lat) << ',' << fmt(r.reward.total) << '\n';
    }
    write_file(out_dir + "/trajectory.csv", traj.str());
    write_file(out_dir + "/speeds.csv", speeds.str());
    write_file(out_dir + "/shield.csv", shield.str());
    write_file(out_dir + "/rewards.csv", rewards.str());
    if (!metrics_csv.empty()) write_file(out_dir + "/training_curve.csv", metrics_csv);
}

}  // namespace crossing
