#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "etcsim/numerics.hpp"

namespace etcsim {

enum class Strategy { TTC, PETC, PSDETC, PADETCabs, PADETCrel };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& text);

enum class TePolicy { FixedT, LastInterevent };

/// Sign convention of the relative increment update. The printed law adds
/// sign(xi_hat - xi) m sqrt(eta_i), which pushes the estimate away from the
/// measurement; Contracting subtracts it instead.
enum class RelUpdateRule { Contracting, AsPrinted };

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateThresholdError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TriggerPolicy {
    Strategy kind = Strategy::TTC;
    double sigma = 0.2;
    Vector theta;  // per-node offsets, PSDETC
    double mu = 0.95;
    double varrho = 85.0;
    double eta = 0.0;
    double eta_min = 1e-4;
    std::optional<double> eta0;  // unset: |xi_hat(0)| / varrho
    Vector omega;                // unset: (1/sqrt n) 1
    double T = 1.0;
    TePolicy te_mode = TePolicy::FixedT;
    RelUpdateRule rel_rule = RelUpdateRule::Contracting;

    /// Fills omega and theta for n nodes and checks parameter ranges.
    void finalize(std::size_t n);
};

struct HeldState {
    Vector xi_hat;
    double last_update_time = 0.0;
    double last_event_time = 0.0;

    [[nodiscard]] Vector error(const Vector& xi) const { return xi_hat - xi; }
};

struct AbsolutePayload {
    double value;
};

struct IncrementPayload {
    int sign;          // +1 or -1, sign(xi_hat_prev - xi)
    long long m;       // number of sqrt(eta_i) quanta
};

using Payload = std::variant<std::monostate, AbsolutePayload, IncrementPayload>;

struct TriggerDecision {
    std::vector<std::size_t> triggered;  // J, ascending
    std::vector<Payload> payloads;       // one per node; monostate outside J
    bool control_update_required = false;

    [[nodiscard]] bool fired(std::size_t i) const;
};

TriggerDecision ttc_decide(const Vector& xi);

/// (1 - sigma) xi'xi - 2 xi'xi_hat + xi_hat'xi_hat.
double petc_quadratic_form(const Vector& xi, const Vector& xi_hat, double sigma);
TriggerDecision petc_decide(const Vector& xi, const Vector& xi_hat, double sigma);

bool psdetc_local_check(double xi_i, double eps_i, double sigma, double theta_i);

/// Offsets that equalise the predicted local margins at t_k + t_e under a
/// first-order prediction. Sums to zero.
Vector psdetc_compute_theta(const Vector& xi, const Vector& xi_dot, double sigma, double t_e);

/// Predicted local margin G_i = eps_i^2 - sigma xi_i^2 - theta_i at t_k + t_e.
Vector psdetc_predicted_margins(const Vector& xi, const Vector& xi_dot, double sigma, double t_e,
                                const Vector& theta);

bool padetc_local_check(double eps_i, double omega_i, double eta);

double padetc_update_threshold(double eta, const Vector& xi_hat_plus, double mu, double varrho, double eta_min);

enum class PadetcMode { Abs, Rel };

struct PadetcUpdate {
    double xi_hat;
    Payload payload;
};

PadetcUpdate padetc_apply_update(double xi_hat_prev, double xi, double eta_i, PadetcMode mode,
                                 RelUpdateRule rule = RelUpdateRule::Contracting);

/// Reconstruct xi_hat from an increment payload on the receiving side.
double padetc_decode(double xi_hat_prev, const IncrementPayload& p, double eta_i, RelUpdateRule rule);

}  // namespace etcsim
