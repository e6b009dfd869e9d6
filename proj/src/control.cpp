#include "etcsim/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace etcsim {

double saturate_quantize(double s) {
    const double q = kValveStepDeg * std::floor(s / kValveStepDeg);
    return std::max(std::min(q, kValveMaxDeg), 0.0);
}

Vector saturate_quantize(const Vector& s) {
    Vector out(s.dim());
    for (std::size_t i = 0; i < s.dim(); ++i) out[i] = saturate_quantize(s[i]);
    return out;
}

void ControllerGains::validate(const PlantModel& plant) const {
    const std::size_t n = plant.dim();
    for (std::size_t m = 0; m < 2; ++m) {
        if (K[m].rows() != n || K[m].cols() != n) throw std::invalid_argument("controller: K must be n x n");
        if (alpha_bar[m].dim() != n) throw std::invalid_argument("controller: alpha_bar dimension mismatch");
        const Matrix closed = plant.A - plant.B[m] * K[m];
        if (!is_hurwitz(closed))
            throw std::invalid_argument("controller: A - B" + std::to_string(m + 1) + " K" + std::to_string(m + 1) +
                                        " is not Hurwitz");
    }
}

ControllerGains ControllerGains::waterbox() {
    ControllerGains g;
    g.K[0] = Matrix{{99950, 3029, 872}, {-3014, 99940, -1679}, {-922, 1652, 99982}};
    g.K[1] = Matrix{{9998.5, 167.1, 41.0}, {-166.6, 9997.9, -116.0}, {-43.0, 115.3, 9999.2}};
    const PlantModel plant = PlantModel::waterbox();
    g.alpha_bar = plant.alpha_bar;
    return g;
}

ModeGuards ModeGuards::from_plant(const PlantModel& plant, double min_open_sum_deg) {
    return ModeGuards{plant.h_low - plant.h_ref, min_open_sum_deg};
}

Vector compute_input(const Vector& xi_hat, Mode mode, const ControllerGains& gains) {
    return saturate_quantize(-(gains.gain(mode) * xi_hat) + gains.offset(mode));
}

bool ModeAutomaton::update(const Vector& xi, const Vector& v_candidate, double time, const ModeGuards& guards) {
    bool fire = false;
    if (mode_ == Mode::WeakPump) {
        for (std::size_t j = 0; j < xi.dim(); ++j)
            if (xi[j] <= guards.low_trip[j]) fire = true;
    } else {
        // Valve commands are non-negative, so the 1-norm is the plain sum.
        fire = v_candidate.sum_abs() < guards.min_open_sum_deg;
    }
    if (!fire) return false;

    if (!switch_times_.empty() && !(time > switch_times_.back()))
        throw std::logic_error("mode automaton: switch times must increase");
    if (mode_ == Mode::BothPumps && !first_release_) first_release_ = time;
    mode_ = mode_ == Mode::WeakPump ? Mode::BothPumps : Mode::WeakPump;
    switch_times_.push_back(time);
    return true;
}

}  // namespace etcsim
