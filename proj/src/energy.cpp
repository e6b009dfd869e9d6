#include "etcsim/macsim.hpp"

namespace etcsim {

std::string to_string(NodeState s) {
    switch (s) {
        case NodeState::Sleep: return "sleep";
        case NodeState::Idle: return "idle";
        case NodeState::Rx: return "rx";
        case NodeState::Tx: return "tx";
        case NodeState::Sense: return "sense";
        case NodeState::Actuate: return "actuate";
    }
    return "?";
}

NodeState parse_node_state(const std::string& name) {
    for (std::size_t k = 0; k < kNodeStates; ++k)
        if (to_string(static_cast<NodeState>(k)) == name) return static_cast<NodeState>(k);
    throw std::invalid_argument("unknown node state '" + name + "'");
}

double discharge_mAh(NodeState s, Micros duration, const Currents& c) {
    return c[s] * us_to_s(duration) / 3600.0;
}

EnergyLedger::EnergyLedger(std::size_t n_nodes, Currents currents) : currents_(currents), time_(n_nodes) {
    for (double i : currents_.mA)
        if (!(i >= 0.0)) throw std::invalid_argument("energy: currents must be non-negative");
    for (auto& row : time_) row.fill(0);
}

void EnergyLedger::account(std::size_t node, NodeState state, Micros duration) {
    if (duration < 0) throw std::invalid_argument("energy: negative duration");
    time_.at(node)[static_cast<std::size_t>(state)] += duration;
}

void EnergyLedger::account(std::size_t node, const std::string& state, double duration_s) {
    if (!(duration_s >= 0.0)) throw std::invalid_argument("energy: negative duration");
    account(node, parse_node_state(state), s_to_us(duration_s));
}

Micros EnergyLedger::total_time(std::size_t node) const {
    Micros t = 0;
    for (Micros x : time_.at(node)) t += x;
    return t;
}

double EnergyLedger::discharge_mAh(std::size_t node) const {
    double e = 0.0;
    for (std::size_t k = 0; k < kNodeStates; ++k)
        e += etcsim::discharge_mAh(static_cast<NodeState>(k), time_.at(node)[k], currents_);
    return e;
}

double EnergyLedger::discharge_deep_sleep_mAh(std::size_t node) const {
    double e = 0.0;
    for (std::size_t k = 1; k < kNodeStates; ++k)
        e += etcsim::discharge_mAh(static_cast<NodeState>(k), time_.at(node)[k], currents_);
    return e;
}

double EnergyLedger::total_discharge_mAh() const {
    double e = 0.0;
    for (std::size_t j = 0; j < nodes(); ++j) e += discharge_mAh(j);
    return e;
}

double EnergyLedger::total_discharge_deep_sleep_mAh() const {
    double e = 0.0;
    for (std::size_t j = 0; j < nodes(); ++j) e += discharge_deep_sleep_mAh(j);
    return e;
}

}  // namespace etcsim
