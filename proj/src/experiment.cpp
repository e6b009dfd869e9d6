#include <algorithm>
#include <cmath>
#include <random>

#include "etcsim/harness.hpp"

namespace etcsim {

namespace {

std::uint64_t derive(std::initializer_list<std::uint64_t> parts) {
    std::vector<std::uint32_t> words;
    for (std::uint64_t p : parts) {
        words.push_back(static_cast<std::uint32_t>(p));
        words.push_back(static_cast<std::uint32_t>(p >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;
constexpr std::uint64_t kRadioTag = 0x726164696fULL;

std::uint64_t master_for(const ExperimentConfig& c, int rep) {
    return c.seeds.empty() ? c.seed : c.seeds.at(static_cast<std::size_t>(rep));
}

bool is_padetc(Strategy s) { return s == Strategy::PADETCabs || s == Strategy::PADETCrel; }

class Simulation {
public:
    Simulation(const ExperimentConfig& c, std::uint64_t nseed, std::uint64_t rseed)
        : c_(c),
          pol_(c.policy),
          noise_(NoiseConfig{c.sensor_std, nseed}),
          radio_rng_(rseed),
          sched_(build_schedule(c.protocol(), c.plant.dim(), c.timings, c.policy.T * 1000.0)),
          automaton_(c.mode0),
          guards_(ModeGuards::from_plant(c.plant, c.min_open_sum_deg)),
          ledger_(c.plant.dim(), c.radio.currents) {
        n_ = c.plant.dim();
        pol_.finalize(n_);
        plant_.xi = c.xi0.empty() ? -c.plant.h_ref : c.xi0;
        plant_.mode = c.mode0;
        plant_.time = 0.0;
        xi_hat_ = plant_.xi;
        node_xi_hat_ = xi_hat_;
        valves_ = compute_input(xi_hat_, plant_.mode, c.gains);
        command_ = valves_;

        if (pol_.kind == Strategy::PSDETC) {
            const Vector xdot = drift(c.plant, xi_hat_, valves_, plant_.mode);
            theta_ = psdetc_compute_theta(xi_hat_, xdot, pol_.sigma, pol_.T);
            node_theta_ = theta_;
        }
        if (is_padetc(pol_.kind)) {
            eta_ = pol_.eta0 ? *pol_.eta0 : std::max(xi_hat_.norm() / pol_.varrho, pol_.eta_min);
            eta_delivered_.assign(n_, eta_);
        }
        trace_.n_nodes = n_;
        trace_.t_end = s_to_us(c.t_end);
        trace_.currents = c.radio.currents;
        sample_us_ = std::max<Micros>(1, s_to_us(c.sample_dt));
        record_sample();
        next_sample_ = sample_us_;
    }

    RunResult run() {
        const Micros T = s_to_us(pol_.T);
        const Micros t_end = trace_.t_end;
        for (std::size_t b = 0;; ++b) {
            const Micros F = static_cast<Micros>(b) * T;
            if (F >= t_end) break;
            frame(b, F, std::min(F + T, t_end));
        }
        advance(t_end);
        trace_.covered_until = now_;
        trace_.switch_times = automaton_.switch_times();
        trace_.first_release = automaton_.first_release_time();

        RunResult r;
        const double t_sm = trace_.first_release ? *trace_.first_release : c_.t_end;
        r.metrics = compute_metrics(trace_, t_sm, c_.t_end);
        r.trace = std::move(trace_);
        r.ledger = std::move(ledger_);
        return r;
    }

private:
    double eta_i(std::size_t j, double eta) const { return pol_.omega[j] * pol_.omega[j] * eta * eta; }

    void record_sample() {
        const double t = us_to_s(now_);
        if (!trace_.levels.empty() && trace_.levels.back().t == t) return;
        trace_.levels.push_back({t, plant_.xi + c_.plant.h_ref});
    }

    void advance(Micros to) {
        while (now_ < to) {
            const Micros next = std::min(to, next_sample_);
            plant_ = step(plant_, valves_, us_to_s(next - now_), c_.plant);
            now_ = next;
            plant_.time = us_to_s(now_);
            if (now_ == next_sample_) next_sample_ += sample_us_;
            record_sample();
        }
    }

    void frame(std::size_t b, Micros F, Micros E) {
        advance(F);
        const Vector y = sense(plant_, noise_);

        std::vector<NodeIntent> intents(n_);
        std::vector<double> sent_value(n_, 0.0);  // what xi_hat_j becomes if delivered
        std::vector<Payload> payload(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const double eps = node_xi_hat_[j] - y[j];
            sent_value[j] = y[j];
            switch (pol_.kind) {
                case Strategy::TTC:
                case Strategy::PETC: intents[j].violation = true; break;
                case Strategy::PSDETC:
                    intents[j].violation = psdetc_local_check(y[j], eps, pol_.sigma, node_theta_[j]);
                    break;
                case Strategy::PADETCabs:
                case Strategy::PADETCrel: {
                    const double eta_node = eta_delivered_[j];
                    intents[j].violation = padetc_local_check(eps, pol_.omega[j], eta_node);
                    if (pol_.kind == Strategy::PADETCrel) {
                        intents[j].payload = MessageKind::IncrementM;
                        if (intents[j].violation) {
                            const auto u = padetc_apply_update(node_xi_hat_[j], y[j], eta_i(j, eta_node),
                                                               PadetcMode::Rel, pol_.rel_rule);
                            sent_value[j] = u.xi_hat;
                            payload[j] = u.payload;
                        }
                    }
                    break;
                }
            }
        }

        bool updated = false;
        auto controller = [&](const Reception& rx) {
            advance(rx.decision_time);
            bool update = false;
            switch (pol_.kind) {
                case Strategy::TTC:
                    for (std::size_t j = 0; j < n_; ++j)
                        if (rx.x_received[j]) xi_hat_[j] = y[j];
                    update = true;
                    break;
                case Strategy::PETC: {
                    Vector meas = xi_hat_;
                    for (std::size_t j = 0; j < n_; ++j)
                        if (rx.x_received[j]) meas[j] = y[j];
                    update = petc_decide(meas, xi_hat_, pol_.sigma).control_update_required;
                    if (update) xi_hat_ = meas;
                    break;
                }
                case Strategy::PSDETC:
                    update = rx.event_announced;
                    for (std::size_t j = 0; j < n_ && update; ++j)
                        if (rx.x_received[j]) xi_hat_[j] = y[j];
                    break;
                case Strategy::PADETCabs:
                case Strategy::PADETCrel:
                    for (std::size_t j = 0; j < n_; ++j) {
                        if (!rx.x_received[j]) continue;
                        update = true;
                        if (pol_.kind == Strategy::PADETCabs) {
                            xi_hat_[j] = y[j];
                        } else {
                            const auto& inc = std::get<IncrementPayload>(payload[j]);
                            xi_hat_[j] = padetc_decode(xi_hat_[j], inc, eta_i(j, eta_delivered_[j]), pol_.rel_rule);
                        }
                    }
                    break;
            }

            ControlReply reply;
            reply.update = update;
            reply.command_changed.assign(n_, false);
            if (!update) return reply;
            updated = true;

            const double t_dec = us_to_s(rx.decision_time);
            automaton_.update(xi_hat_, compute_input(xi_hat_, Mode::BothPumps, c_.gains), t_dec, guards_);
            plant_.mode = automaton_.mode();
            command_ = compute_input(xi_hat_, plant_.mode, c_.gains);
            for (std::size_t j = 0; j < n_; ++j) reply.command_changed[j] = command_[j] != valves_[j];

            if (pol_.kind == Strategy::PSDETC) {
                const Vector xdot = drift(c_.plant, xi_hat_, command_, plant_.mode);
                double t_e = pol_.T;
                if (pol_.te_mode == TePolicy::LastInterevent && last_event_) t_e = t_dec - *last_event_;
                theta_ = psdetc_compute_theta(xi_hat_, xdot, pol_.sigma, t_e);
                last_event_ = t_dec;
            }
            if (is_padetc(pol_.kind))
                eta_ = padetc_update_threshold(eta_, xi_hat_, pol_.mu, pol_.varrho, pol_.eta_min);
            return reply;
        };

        const FrameOutcome out = simulate_superframe(sched_, F, E, intents, controller, c_.radio, c_.packets,
                                                     radio_rng_, ledger_, {&trace_.messages, &trace_.intervals});

        for (std::size_t j = 0; j < n_; ++j) {
            if (out.reception.x_received[j]) node_xi_hat_[j] = sent_value[j];
            if (out.u_delivered[j]) {
                if (pol_.kind == Strategy::PSDETC) node_theta_[j] = theta_[j];
                if (is_padetc(pol_.kind)) eta_delivered_[j] = eta_;
            }
        }

        std::vector<std::size_t> order;
        for (std::size_t j = 0; j < n_; ++j)
            if (out.actuated[j]) order.push_back(j);
        std::sort(order.begin(), order.end(), [&](auto a, auto b2) { return out.u_time[a] < out.u_time[b2]; });
        for (std::size_t j : order) {
            advance(out.u_time[j]);
            trace_.actuations.push_back({out.u_time[j], b, j, valves_[j], command_[j]});
            valves_[j] = command_[j];
            record_sample();
        }
        advance(E);

        trace_.frames.push_back({b, F, out.reception.decision_time, updated, out.reception.event_announced,
                                 automaton_.mode(), out.state_transmissions, out.control_messages, out.drops});
    }

    const ExperimentConfig& c_;
    TriggerPolicy pol_;
    std::size_t n_ = 0;
    PlantState plant_;
    SensorNoise noise_;
    std::mt19937_64 radio_rng_;
    SlotSchedule sched_;
    ModeAutomaton automaton_;
    ModeGuards guards_;
    EnergyLedger ledger_;
    SimulationTrace trace_;

    Vector valves_, command_;
    Vector xi_hat_, node_xi_hat_;
    Vector theta_, node_theta_;
    double eta_ = 0.0;
    std::vector<double> eta_delivered_;
    std::optional<double> last_event_;

    Micros now_ = 0;
    Micros next_sample_ = 0;
    Micros sample_us_ = 10000;
};

}  // namespace

std::uint64_t noise_seed(const ExperimentConfig& c, int repetition) {
    return derive({master_for(c, repetition), static_cast<std::uint64_t>(repetition), kNoiseTag});
}

std::uint64_t radio_seed(const ExperimentConfig& c, std::size_t cell, int repetition) {
    return derive({master_for(c, repetition), cell, static_cast<std::uint64_t>(repetition), kRadioTag});
}

RunResult run_single(const ExperimentConfig& config, int repetition, std::size_t cell) {
    config.validate();
    const std::uint64_t ns = noise_seed(config, repetition);
    const std::uint64_t rs = radio_seed(config, cell, repetition);
    Simulation sim(config, ns, rs);
    RunResult r = sim.run();
    r.noise_seed = ns;
    r.radio_seed = rs;
    return r;
}

MetricsReport run_experiment(const ExperimentConfig& config, std::size_t cell) {
    config.validate();
    MetricsReport rep;
    rep.label = to_string(config.policy.kind);
    for (int k = 0; k < config.repetitions; ++k) rep.runs.push_back(run_single(config, k, cell).metrics);
    rep.mean = mean_of(rep.runs);
    return rep;
}

}  // namespace etcsim
