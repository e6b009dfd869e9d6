#pragma once

#include <array>
#include <optional>
#include <vector>

#include "etcsim/numerics.hpp"
#include "etcsim/plant.hpp"

namespace etcsim {

inline constexpr double kValveStepDeg = 10.0;
inline constexpr double kValveMaxDeg = 360.0;

/// Valve actuator map: floor to the 10 degree grid, then clamp to [0, 360].
double saturate_quantize(double s);
Vector saturate_quantize(const Vector& s);

/// Switched state-feedback gains v = S(-K_mode xi_hat + alpha_bar_mode).
struct ControllerGains {
    std::array<Matrix, 2> K;          // deg/m
    std::array<Vector, 2> alpha_bar;  // deg

    [[nodiscard]] const Matrix& gain(Mode m) const { return K[mode_index(m)]; }
    [[nodiscard]] const Vector& offset(Mode m) const { return alpha_bar[mode_index(m)]; }

    /// Checks dimensions and that -B_m K_m is Hurwitz for both modes.
    void validate(const PlantModel& plant) const;

    static ControllerGains waterbox();
};

/// Thresholds of the pump-mode automaton.
struct ModeGuards {
    Vector low_trip;                 // h_low - h', weak -> both pumps when any xi_j <= this
    double min_open_sum_deg = 180.0; // both -> weak when the candidate command sums below this

    static ModeGuards from_plant(const PlantModel& plant, double min_open_sum_deg = 180.0);
};

Vector compute_input(const Vector& xi_hat, Mode mode, const ControllerGains& gains);

/// Hybrid pump automaton. Transitions alternate and at most one fires per
/// evaluation.
class ModeAutomaton {
public:
    explicit ModeAutomaton(Mode initial = Mode::BothPumps) : mode_(initial) {}

    [[nodiscard]] Mode mode() const { return mode_; }
    [[nodiscard]] std::size_t switch_count() const { return switch_times_.size(); }
    [[nodiscard]] const std::vector<double>& switch_times() const { return switch_times_; }
    /// Time of the first both-pumps -> weak-pump transition.
    [[nodiscard]] std::optional<double> first_release_time() const { return first_release_; }

    /// Evaluate the guard for the current mode at `time`. `v_candidate` is
    /// S(-K_2 xi + alpha_bar_2) and only matters in BothPumps. Returns true
    /// when the mode changed.
    bool update(const Vector& xi, const Vector& v_candidate, double time, const ModeGuards& guards);

private:
    Mode mode_;
    std::vector<double> switch_times_;
    std::optional<double> first_release_;
};

}  // namespace etcsim
