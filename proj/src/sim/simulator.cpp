#include "metroflow/sim/simulator.hpp"

#include <algorithm>
#include <sstream>

#include "metroflow/errors.hpp"
#include "metroflow/sim/ca_rules.hpp"

namespace metroflow::sim {

namespace {

// Station index whose cell equals position, or -1.
int station_at(const std::vector<int>& stations, int position) {
    auto it = std::lower_bound(stations.begin(), stations.end(), position);
    if (it != stations.end() && *it == position) return static_cast<int>(it - stations.begin());
    return -1;
}

// First station strictly ahead of position, or -1.
int next_station(const std::vector<int>& stations, int position) {
    auto it = std::upper_bound(stations.begin(), stations.end(), position);
    return it == stations.end() ? -1 : static_cast<int>(it - stations.begin());
}

}  // namespace

Simulation::Simulation(ScenarioConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.rng_seed) {
    cfg_.validate();
    bottleneck_ = cfg_.bottleneck_index();
    log_.horizon_s = cfg_.line.horizon_s;
    log_.station_positions = cfg_.line.station_positions;
    log_.length_cells = cfg_.line.length_cells;
    log_.bottleneck_station = bottleneck_;
    if (cfg_.demand.run_scale_sd > 0) {
        std::normal_distribution<double> n01;
        run_scale_ = std::max(0.0, 1.0 + cfg_.demand.run_scale_sd * n01(rng_));
    }
}

double Simulation::demand_at(int t) {
    const auto& d = cfg_.demand;
    double rate = std::min(d.initial_rate + d.increment_per_step * t, d.max_rate) * run_scale_;
    if (d.step_noise_sd > 0) {
        std::normal_distribution<double> n01;
        rate *= 1.0 + d.step_noise_sd * n01(rng_);
    }
    rate = std::max(rate, 0.0);
    if (d.cap) rate = std::min(rate, *d.cap);
    return rate;
}

int Simulation::planned_dwell_on_arrival(int station, int t, TrainState& train) {
    if (station != bottleneck_) return cfg_.constant_dwell(station);
    const int headway = last_bottleneck_arrival_ ? t - *last_bottleneck_arrival_ : cfg_.injection.interval_at(t);
    last_bottleneck_arrival_ = t;
    const auto res = bottleneck_dwell_time(movement_rate_, headway, std::get<BottleneckDwell>(cfg_.dwell_models[station]));
    train.headway_at_bottleneck = headway;
    train.movements = res.movements;
    return res.seconds;
}

void Simulation::check_ordering(int t) const {
    for (std::size_t k = 1; k < trains_.size(); ++k) {
        if (trains_[k - 1].position - trains_[k].position < 1) {
            std::ostringstream os;
            os << "collision at t=" << t << ": train " << trains_[k].index << " at cell " << trains_[k].position
               << " (v=" << trains_[k].velocity << ") vs leader " << trains_[k - 1].index << " at cell "
               << trains_[k - 1].position << " (v=" << trains_[k - 1].velocity << "); line state:";
            for (const auto& tr : trains_) os << " [" << tr.index << ": x=" << tr.position << " v=" << tr.velocity << "]";
            throw CollisionError(os.str());
        }
    }
}

void Simulation::step(int t) {
    const auto& line = cfg_.line;
    const auto& stations = line.station_positions;
    movement_rate_ = demand_at(t);

    std::vector<bool> occupied(stations.size(), false);
    for (const auto& tr : trains_) {
        if (int s = station_at(stations, tr.position); s >= 0) occupied[s] = true;
    }

    std::vector<TrainState> next;
    next.reserve(trains_.size());
    for (std::size_t k = 0; k < trains_.size(); ++k) {
        const TrainState& tr = trains_[k];
        const bool has_leader = k > 0;
        const int leader_pos = has_leader ? trains_[k - 1].position : 0;
        TrainState nt;

        if (int here = station_at(stations, tr.position); here >= 0) {
            const int gap = has_leader ? leader_pos - tr.position : kNoLeader;
            auto up = update_dwelling(tr, tr.planned_dwell, gap, line);
            nt = up.train;
            if (up.departed) log_.events.push_back({t, tr.index, EventKind::Departure, here});
        } else {
            if (has_leader) {
                nt = update_following(tr, leader_pos, line);
            } else {
                nt = tr;
                nt.velocity = std::min(tr.velocity + line.accel, line.v_max);
                nt.position = tr.position + nt.velocity;
            }
            if (int ns = next_station(stations, tr.position); ns >= 0 && !occupied[ns]) {
                auto approach = update_approaching_empty_station(tr, stations[ns] - tr.position, line);
                if (approach.velocity < nt.velocity) nt = approach;
            }
            if (int arrived = station_at(stations, nt.position); arrived >= 0) {
                nt.dwell_elapsed = 0;
                nt.planned_dwell = planned_dwell_on_arrival(arrived, t, nt);
                TrainEvent ev{t, nt.index, EventKind::Arrival, arrived};
                ev.dwell_s = nt.planned_dwell;
                if (arrived == bottleneck_) {
                    ev.movements = nt.movements;
                    ev.headway_s = nt.headway_at_bottleneck;
                }
                log_.events.push_back(ev);
            }
        }
        if (nt.velocity < 0 || nt.velocity > line.v_max || nt.position < tr.position) {
            throw CollisionError("kinematic bound violated by train " + std::to_string(tr.index) + " at t=" +
                                 std::to_string(t));
        }
        if (nt.position >= line.length_cells) {
            log_.events.push_back({t, nt.index, EventKind::Exit});
            ++exited_;
            continue;
        }
        next.push_back(nt);
    }
    trains_ = std::move(next);
    check_ordering(t);

    try_inject(t);

    for (const auto& tr : trains_) log_.snapshots.push_back({t, tr.index, tr.position, tr.velocity});
}

InjectionResult Simulation::try_inject(int t) {
    const auto& line = cfg_.line;
    if (last_entry_ && t - *last_entry_ < cfg_.injection.interval_at(t)) return InjectionResult::NotDue;
    if (!trains_.empty()) {
        const int clearance = trains_.back().position - 1;
        if (compare_to_min_distance(clearance, line.v_max, line.decel, line.safety_margin) <= 0) {
            return InjectionResult::BlockedBySafetyGap;
        }
    }
    TrainState tr;
    tr.index = ++injected_;
    tr.position = 1;
    tr.velocity = line.v_max;
    trains_.push_back(tr);
    last_entry_ = t;
    return InjectionResult::Entered;
}

TrajectoryLog run_scenario(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    for (int t = 1; t <= cfg.line.horizon_s; ++t) sim.step(t);
    return std::move(sim).take_log();
}

}  // namespace metroflow::sim
