#include "etcsim/triggers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace etcsim {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::TTC: return "TTC";
        case Strategy::PETC: return "PETC";
        case Strategy::PSDETC: return "PSDETC";
        case Strategy::PADETCabs: return "PADETCabs";
        case Strategy::PADETCrel: return "PADETCrel";
    }
    return "?";
}

Strategy parse_strategy(const std::string& text) {
    std::string t;
    for (char c : text) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "ttc") return Strategy::TTC;
    if (t == "petc") return Strategy::PETC;
    if (t == "psdetc") return Strategy::PSDETC;
    if (t == "padetcabs" || t == "padetc-abs" || t == "padetc_abs") return Strategy::PADETCabs;
    if (t == "padetcrel" || t == "padetc-rel" || t == "padetc_rel") return Strategy::PADETCrel;
    throw ConfigError("unknown strategy '" + text + "'");
}

void TriggerPolicy::finalize(std::size_t n) {
    if (n == 0) throw ConfigError("trigger policy: no nodes");
    if (!(T > 0.0)) throw ConfigError("trigger policy: T must be positive");
    if (!(sigma > 0.0)) throw ConfigError("trigger policy: sigma must be positive");
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("trigger policy: mu must lie in (0,1)");
    if (!(varrho > 0.0)) throw ConfigError("trigger policy: varrho must be positive");
    if (!(eta_min > 0.0)) throw ConfigError("trigger policy: eta_min must be positive");
    if (!(eta >= 0.0)) throw ConfigError("trigger policy: eta must be non-negative");
    if (eta0 && !(*eta0 >= 0.0)) throw ConfigError("trigger policy: eta0 must be non-negative");
    if (theta.empty()) theta = Vector(n);
    if (theta.dim() != n) throw ConfigError("trigger policy: theta dimension mismatch");
    if (omega.empty()) omega = Vector(n, 1.0 / std::sqrt(static_cast<double>(n)));
    if (omega.dim() != n) throw ConfigError("trigger policy: omega dimension mismatch");
    if (std::abs(omega.norm() - 1.0) > 1e-9) throw ConfigError("trigger policy: omega must have unit norm");
}

bool TriggerDecision::fired(std::size_t i) const {
    return std::binary_search(triggered.begin(), triggered.end(), i);
}

namespace {

TriggerDecision all_nodes(const Vector& xi) {
    TriggerDecision d;
    d.control_update_required = true;
    for (std::size_t i = 0; i < xi.dim(); ++i) {
        d.triggered.push_back(i);
        d.payloads.emplace_back(AbsolutePayload{xi[i]});
    }
    return d;
}

TriggerDecision none(std::size_t n) {
    TriggerDecision d;
    d.payloads.assign(n, std::monostate{});
    return d;
}

}  // namespace

TriggerDecision ttc_decide(const Vector& xi) { return all_nodes(xi); }

double petc_quadratic_form(const Vector& xi, const Vector& xi_hat, double sigma) {
    return (1.0 - sigma) * xi.dot(xi) - 2.0 * xi.dot(xi_hat) + xi_hat.dot(xi_hat);
}

TriggerDecision petc_decide(const Vector& xi, const Vector& xi_hat, double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("petc: sigma must be positive");
    if (xi.dim() != xi_hat.dim()) throw DimensionError("petc: state dimension mismatch");
    return petc_quadratic_form(xi, xi_hat, sigma) > 0.0 ? all_nodes(xi) : none(xi.dim());
}

bool psdetc_local_check(double xi_i, double eps_i, double sigma, double theta_i) {
    return eps_i * eps_i - sigma * xi_i * xi_i > theta_i;
}

namespace {

Vector predicted_terms(const Vector& xi, const Vector& xi_dot, double sigma, double t_e) {
    Vector d(xi.dim());
    for (std::size_t i = 0; i < xi.dim(); ++i) {
        const double eps = -xi_dot[i] * t_e;
        const double x = xi[i] + xi_dot[i] * t_e;
        d[i] = eps * eps - sigma * x * x;
    }
    return d;
}

}  // namespace

Vector psdetc_compute_theta(const Vector& xi, const Vector& xi_dot, double sigma, double t_e) {
    if (!(t_e > 0.0)) throw std::invalid_argument("psdetc: t_e must be positive");
    if (xi.dim() != xi_dot.dim() || xi.dim() == 0) throw DimensionError("psdetc: state dimension mismatch");
    const Vector d = predicted_terms(xi, xi_dot, sigma, t_e);
    const double mean = d.sum() / static_cast<double>(d.dim());
    Vector theta(d.dim());
    for (std::size_t i = 0; i < d.dim(); ++i) theta[i] = d[i] - mean;
    // Push the rounding residue into the largest entry so the sum is as
    // close to zero as doubles allow.
    const double residue = theta.sum();
    std::size_t k = 0;
    for (std::size_t i = 1; i < theta.dim(); ++i)
        if (std::abs(theta[i]) > std::abs(theta[k])) k = i;
    theta[k] -= residue;
    return theta;
}

Vector psdetc_predicted_margins(const Vector& xi, const Vector& xi_dot, double sigma, double t_e,
                                const Vector& theta) {
    return predicted_terms(xi, xi_dot, sigma, t_e) - theta;
}

bool padetc_local_check(double eps_i, double omega_i, double eta) {
    return eps_i * eps_i >= omega_i * omega_i * eta * eta;
}

double padetc_update_threshold(double eta, const Vector& xi_hat_plus, double mu, double varrho, double eta_min) {
    const double norm = xi_hat_plus.norm();
    if (norm <= varrho * eta) return eta > eta_min / mu ? mu * eta : eta_min;
    if (norm >= varrho * eta / mu) return eta / mu;
    return eta;
}

PadetcUpdate padetc_apply_update(double xi_hat_prev, double xi, double eta_i, PadetcMode mode, RelUpdateRule rule) {
    if (mode == PadetcMode::Abs) return {xi, AbsolutePayload{xi}};
    if (!(eta_i > 0.0)) throw DegenerateThresholdError("padetc rel: eta_i must be positive");
    const double q = std::sqrt(eta_i);
    const double diff = xi_hat_prev - xi;
    const IncrementPayload p{diff < 0.0 ? -1 : 1, static_cast<long long>(std::floor(std::abs(diff) / q))};
    return {padetc_decode(xi_hat_prev, p, eta_i, rule), p};
}

double padetc_decode(double xi_hat_prev, const IncrementPayload& p, double eta_i, RelUpdateRule rule) {
    const double step = static_cast<double>(p.sign) * static_cast<double>(p.m) * std::sqrt(eta_i);
    return rule == RelUpdateRule::AsPrinted ? xi_hat_prev + step : xi_hat_prev - step;
}

}  // namespace etcsim
