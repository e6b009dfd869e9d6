#include <algorithm>
#include <cmath>

#include "etcsim/harness.hpp"

namespace etcsim {

namespace {

WindowMetrics window(const SimulationTrace& tr, Micros w_end, double t_sm) {
    WindowMetrics m;
    m.switching_time = t_sm;
    const double w_end_s = us_to_s(w_end);

    double top = -INFINITY;
    for (const LevelSample& s : tr.levels) {
        if (s.t > w_end_s) break;
        for (double h : s.h) top = std::max(top, h);
    }
    m.water_level_overshoot = std::isfinite(top) ? top : 0.0;

    std::vector<std::array<Micros, kNodeStates>> dwell(tr.n_nodes);
    for (auto& d : dwell) d.fill(0);
    for (const StateInterval& iv : tr.intervals) {
        const Micros e = std::min(iv.end, w_end);
        if (e > iv.start) dwell[iv.node][static_cast<std::size_t>(iv.state)] += e - iv.start;
    }
    for (const auto& d : dwell) {
        m.sleep_time += us_to_s(d[0]);
        for (std::size_t k = 0; k < kNodeStates; ++k) {
            const double e = discharge_mAh(static_cast<NodeState>(k), d[k], tr.currents);
            m.discharge += e;
            if (k != 0) m.discharge_deep_sleep += e;
        }
    }

    for (const ActuationRecord& a : tr.actuations) {
        if (a.time > w_end) continue;
        m.actuations += 1.0;
        m.valve_movement += std::abs(a.to_deg - a.from_deg);
    }
    for (const FrameRecord& f : tr.frames) {
        if (f.decision > w_end) continue;
        if (f.update) m.violations += 1.0;
        m.control_transmissions += f.control_messages;
    }
    for (const MessageEvent& e : tr.messages) {
        if (!e.success || e.time + e.duration > w_end) continue;
        if (e.kind == MessageKind::StateX || e.kind == MessageKind::IncrementM) m.state_transmissions += 1.0;
    }
    return m;
}

}  // namespace

RunMetrics compute_metrics(const SimulationTrace& trace, double t_sm, double t_end) {
    const Micros end = s_to_us(t_end);
    if (trace.covered_until < end) throw IncompleteTrace("metrics: trace stops before t_end");
    if (!(t_sm <= t_end)) throw std::invalid_argument("metrics: t_sm after t_end");
    RunMetrics r;
    r.t_sm = t_sm;
    r.switched = trace.first_release.has_value();
    r.full = window(trace, end, t_sm);
    r.until_switch = window(trace, s_to_us(t_sm), t_sm);
    return r;
}

namespace {

void add(WindowMetrics& a, const WindowMetrics& b) {
    a.water_level_overshoot += b.water_level_overshoot;
    a.switching_time += b.switching_time;
    a.sleep_time += b.sleep_time;
    a.discharge += b.discharge;
    a.discharge_deep_sleep += b.discharge_deep_sleep;
    a.actuations += b.actuations;
    a.valve_movement += b.valve_movement;
    a.violations += b.violations;
    a.state_transmissions += b.state_transmissions;
    a.control_transmissions += b.control_transmissions;
}

void divide(WindowMetrics& a, double s) {
    a.water_level_overshoot /= s;
    a.switching_time /= s;
    a.sleep_time /= s;
    a.discharge /= s;
    a.discharge_deep_sleep /= s;
    a.actuations /= s;
    a.valve_movement /= s;
    a.violations /= s;
    a.state_transmissions /= s;
    a.control_transmissions /= s;
}

}  // namespace

RunMetrics mean_of(const std::vector<RunMetrics>& runs) {
    RunMetrics m;
    if (runs.empty()) return m;
    m.switched = true;
    for (const RunMetrics& r : runs) {
        add(m.full, r.full);
        add(m.until_switch, r.until_switch);
        m.t_sm += r.t_sm;
        m.switched = m.switched && r.switched;
    }
    const double count = static_cast<double>(runs.size());
    divide(m.full, count);
    divide(m.until_switch, count);
    m.t_sm /= count;
    return m;
}

}  // namespace etcsim
