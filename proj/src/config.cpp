#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <sstream>

#include "etcsim/harness.hpp"

namespace etcsim {

namespace pt = boost::property_tree;

void ExperimentConfig::validate() const {
    plant.validate();
    gains.validate(plant);
    const std::size_t n = plant.dim();
    TriggerPolicy p = policy;
    p.finalize(n);
    if (!(t_end > 0.0)) throw ConfigError("config: t_end must be positive");
    if (repetitions < 1) throw ConfigError("config: repetitions must be at least 1");
    if (!seeds.empty() && seeds.size() < static_cast<std::size_t>(repetitions))
        throw ConfigError("config: fewer seeds than repetitions");
    if (!(sensor_std >= 0.0)) throw ConfigError("config: sensor_std must be non-negative");
    if (!(sample_dt > 0.0)) throw ConfigError("config: sample_dt must be positive");
    if (!xi0.empty() && xi0.dim() != n) throw ConfigError("config: xi0 dimension mismatch");
    radio.validate(timings);
    (void)build_schedule(protocol(), n, timings, policy.T * 1000.0);
}

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (!tok.empty()) out.push_back(std::stoull(tok));
    }
    return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path, ExperimentConfig c) {
    pt::ptree t;
    try {
        pt::read_ini(path, t);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    try {
        TriggerPolicy& p = c.policy;
        if (auto s = t.get_optional<std::string>("experiment.strategy")) p.kind = parse_strategy(*s);
        p.T = t.get("experiment.period", p.T);
        c.t_end = t.get("experiment.t_end", c.t_end);
        c.repetitions = t.get("experiment.repetitions", c.repetitions);
        c.seed = t.get("experiment.seed", c.seed);
        if (auto s = t.get_optional<std::string>("experiment.seeds")) c.seeds = parse_seeds(*s);
        c.sensor_std = t.get("experiment.sensor_std", c.sensor_std);
        c.sample_dt = t.get("experiment.sample_dt", c.sample_dt);
        c.out_dir = t.get("experiment.out", c.out_dir);
        if (auto s = t.get_optional<std::string>("experiment.xi0")) c.xi0 = parse_vector(*s);
        if (auto m = t.get_optional<int>("experiment.mode0")) {
            if (*m != 1 && *m != 2) throw ConfigError("config: mode0 must be 1 or 2");
            c.mode0 = *m == 1 ? Mode::WeakPump : Mode::BothPumps;
        }

        p.sigma = t.get("trigger.sigma", p.sigma);
        p.mu = t.get("trigger.mu", p.mu);
        p.varrho = t.get("trigger.varrho", p.varrho);
        p.eta_min = t.get("trigger.eta_min", p.eta_min);
        if (auto e = t.get_optional<double>("trigger.eta0")) p.eta0 = *e;
        if (auto w = t.get_optional<std::string>("trigger.omega")) p.omega = parse_vector(*w);
        if (auto te = t.get_optional<std::string>("trigger.te_mode")) {
            if (*te == "fixed_T") p.te_mode = TePolicy::FixedT;
            else if (*te == "last_interevent") p.te_mode = TePolicy::LastInterevent;
            else throw ConfigError("config: te_mode must be fixed_T or last_interevent");
        }
        if (auto r = t.get_optional<std::string>("trigger.rel_update")) {
            if (*r == "contracting") p.rel_rule = RelUpdateRule::Contracting;
            else if (*r == "printed") p.rel_rule = RelUpdateRule::AsPrinted;
            else throw ConfigError("config: rel_update must be contracting or printed");
        }

        RadioModel& r = c.radio;
        r.loss_probability = t.get("radio.loss", r.loss_probability);
        r.per_try_ms = t.get("radio.per_try_ms", r.per_try_ms);
        r.byte_time_us = t.get("radio.byte_time_us", r.byte_time_us);
        r.sense_ms = t.get("radio.sense_ms", r.sense_ms);
        r.actuate_ms = t.get("radio.actuate_ms", r.actuate_ms);
        if (const auto cur = t.get_child_optional("currents")) {
            for (const auto& [name, value] : *cur)
                r.currents.mA[static_cast<std::size_t>(parse_node_state(name))] = value.get_value<double>();
        }

        MacTimings& m = c.timings;
        m.x_slot_ms = t.get("mac.x_slot_ms", m.x_slot_ms);
        m.uv_slot_ms = t.get("mac.uv_slot_ms", m.uv_slot_ms);
        m.d_c_ms = t.get("mac.d_c_ms", m.d_c_ms);
        m.d_g_ms = t.get("mac.d_g_ms", m.d_g_ms);
        m.guard_ms = t.get("mac.guard_ms", m.guard_ms);

        PacketSizes& k = c.packets;
        k.state_x = t.get("packets.x", k.state_x);
        k.ack = t.get("packets.ack", k.ack);
        k.request_r = t.get("packets.r", k.request_r);
        k.request_a = t.get("packets.a", k.request_a);
        k.violation_v = t.get("packets.v", k.violation_v);
        k.control_u = t.get("packets.u", k.control_u);
        k.eta_param = t.get("packets.eta", k.eta_param);
        k.theta_param = t.get("packets.theta", k.theta_param);
        k.increment_m = t.get("packets.m", k.increment_m);

        PlantModel& pl = c.plant;
        if (auto s = t.get_optional<std::string>("plant.A")) pl.A = parse_matrix(*s);
        if (auto s = t.get_optional<std::string>("plant.B1")) pl.B[0] = parse_matrix(*s);
        if (auto s = t.get_optional<std::string>("plant.B2")) pl.B[1] = parse_matrix(*s);
        if (auto s = t.get_optional<std::string>("plant.alpha_bar_1")) pl.alpha_bar[0] = parse_vector(*s);
        if (auto s = t.get_optional<std::string>("plant.alpha_bar_2")) pl.alpha_bar[1] = parse_vector(*s);
        if (auto s = t.get_optional<std::string>("plant.h_ref")) pl.h_ref = parse_vector(*s);
        if (auto s = t.get_optional<std::string>("plant.h_low")) pl.h_low = parse_vector(*s);
        if (auto s = t.get_optional<std::string>("control.K1")) c.gains.K[0] = parse_matrix(*s);
        if (auto s = t.get_optional<std::string>("control.K2")) c.gains.K[1] = parse_matrix(*s);
        c.gains.alpha_bar = pl.alpha_bar;
        c.min_open_sum_deg = t.get("control.min_open_sum_deg", c.min_open_sum_deg);
    } catch (const pt::ptree_bad_data& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    return c;
}

}  // namespace etcsim
