#include <json.hpp>

#include <cstdio>

#include "etcsim/harness.hpp"

namespace etcsim {

namespace {

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const SweepCell* ttc_reference(const SweepGrid& g, double T, std::size_t* index) {
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        if (g.cells[i].strategy == Strategy::TTC && g.cells[i].T == T) {
            *index = i;
            return &g.cells[i];
        }
    }
    return nullptr;
}

}  // namespace

const std::vector<std::string>& metric_columns() {
    static const std::vector<std::string> cols{
        "water_level_overshoot_m", "switching_time_s", "sleep_time_s",   "discharge_mAh",
        "discharge_deep_sleep_mAh", "actuations",      "valve_movement_deg", "violations",
        "state_transmissions",     "control_transmissions"};
    return cols;
}

std::vector<double> metric_values(const WindowMetrics& w) {
    return {w.water_level_overshoot, w.switching_time, w.sleep_time, w.discharge, w.discharge_deep_sleep,
            w.actuations, w.valve_movement, w.violations, w.state_transmissions, w.control_transmissions};
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports) {
    os << "cell,strategy,protocol,T,sigma,mu,varrho,window,repetitions,switched";
    for (const auto& c : metric_columns()) os << ',' << c;
    os << ",status\n";
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const SweepCell& c = grid.cells[i];
        const MetricsReport& r = reports.at(i);
        for (int w = 0; w < 2; ++w) {
            os << i << ',' << to_string(c.strategy) << ',' << to_string(protocol_for(c.strategy)) << ','
               << num(c.T) << ',' << num(c.sigma) << ',' << num(c.mu) << ',' << num(c.varrho) << ','
               << (w == 0 ? "full" : "until_switch") << ',' << r.runs.size() << ','
               << (r.mean.switched ? 1 : 0);
            const WindowMetrics& m = w == 0 ? r.mean.full : r.mean.until_switch;
            for (double v : metric_values(m)) os << ',' << (r.failed ? "" : num(v));
            os << ',' << (r.failed ? "failed" : "ok") << '\n';
        }
    }
}

void write_savings_csv(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports) {
    os << "cell,label,window";
    for (const auto& c : metric_columns()) os << ',' << c;
    os << '\n';
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const SweepCell& c = grid.cells[i];
        std::size_t ref = 0;
        if (c.strategy == Strategy::TTC || !ttc_reference(grid, c.T, &ref)) continue;
        if (reports[i].failed || reports[ref].failed) continue;
        for (int w = 0; w < 2; ++w) {
            const auto mine = metric_values(w == 0 ? reports[i].mean.full : reports[i].mean.until_switch);
            const auto base = metric_values(w == 0 ? reports[ref].mean.full : reports[ref].mean.until_switch);
            os << i << ",\"" << c.label() << "\"," << (w == 0 ? "full" : "until_switch");
            for (std::size_t k = 0; k < mine.size(); ++k)
                os << ',' << (base[k] != 0.0 ? num(100.0 * (base[k] - mine[k]) / base[k]) : "");
            os << '\n';
        }
    }
}

namespace {

nlohmann::ordered_json window_json(const WindowMetrics& w) {
    nlohmann::ordered_json j;
    const auto vals = metric_values(w);
    for (std::size_t k = 0; k < vals.size(); ++k) j[metric_columns()[k]] = vals[k];
    return j;
}

}  // namespace

void write_runs_jsonl(std::ostream& os, const SweepGrid& grid, const std::vector<MetricsReport>& reports) {
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const SweepCell& c = grid.cells[i];
        const MetricsReport& r = reports.at(i);
        if (r.failed) {
            nlohmann::ordered_json j{{"cell", i}, {"label", c.label()}, {"status", "failed"}, {"error", r.error}};
            os << j.dump() << '\n';
            continue;
        }
        for (std::size_t k = 0; k < r.runs.size(); ++k) {
            const RunMetrics& m = r.runs[k];
            nlohmann::ordered_json j;
            j["cell"] = i;
            j["label"] = c.label();
            j["strategy"] = to_string(c.strategy);
            j["T"] = c.T;
            j["repetition"] = k;
            j["t_sm"] = m.t_sm;
            j["switched"] = m.switched;
            j["full"] = window_json(m.full);
            j["until_switch"] = window_json(m.until_switch);
            os << j.dump() << '\n';
        }
    }
}

void write_schedule(std::ostream& os, const SlotSchedule& s) {
    os << to_string(s.protocol) << " nodes=" << s.n_nodes << " T_min_ms=" << num(s.layout_length() / 1000.0)
       << " frame_ms=" << num(s.frame_length / 1000.0) << '\n';
    os << "slot,node,kind,start_ms,duration_ms,guard_ms\n";
    for (std::size_t k = 0; k < s.slots.size(); ++k) {
        const Slot& sl = s.slots[k];
        os << k << ',' << sl.node + 1 << ',' << to_char(sl.kind) << ',' << num(sl.start / 1000.0) << ','
           << num(sl.footprint / 1000.0) << ',' << num(sl.guard / 1000.0) << '\n';
    }
    os << "decision_ms=" << num(s.decision_offset / 1000.0) << " d_c_ms=" << num(s.d_c / 1000.0)
       << " d_g_ms=" << num(s.d_g / 1000.0) << '\n';
}

}  // namespace etcsim
