#include "etcsim/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace etcsim {

void PlantModel::validate() const {
    const std::size_t n = dim();
    if (n == 0) throw std::invalid_argument("plant: empty reference level vector");
    if (A.rows() != n || A.cols() != n) throw std::invalid_argument("plant: A must be n x n");
    if (h_low.dim() != n) throw std::invalid_argument("plant: h_low dimension mismatch");
    for (std::size_t j = 0; j < n; ++j)
        if (!(h_low[j] < h_ref[j])) throw std::invalid_argument("plant: h_low must lie below h_ref");
    for (std::size_t m = 0; m < 2; ++m) {
        if (B[m].rows() != n || B[m].cols() != n) throw std::invalid_argument("plant: B must be n x n");
        if (alpha_bar[m].dim() != n) throw std::invalid_argument("plant: alpha_bar dimension mismatch");
        try {
            (void)inverse(B[m]);
        } catch (const SingularMatrixError&) {
            throw std::invalid_argument("plant: input matrix B" + std::to_string(m + 1) + " is singular");
        }
    }
}

PlantModel PlantModel::waterbox() {
    PlantModel m;
    m.A = Matrix::zeros(3, 3);
    m.B[0] = Matrix{{0.1436, -0.0170, -0.0164},
                    {-0.0098, 0.1060, -0.0100},
                    {-0.0139, -0.0139, 0.1492}} * 1e-5;
    m.B[1] = Matrix{{0.7666, -0.0493, -0.0457},
                    {-0.0274, 0.5848, -0.0279},
                    {-0.0393, -0.0432, 0.7865}} * 1e-5;
    m.alpha_bar[0] = Vector{503.5950, 422.4378, 428.5839};
    m.alpha_bar[1] = Vector{84.5099, 68.2069, 72.8442};
    m.h_ref = Vector{0.06, 0.06, 0.06};
    m.h_low = Vector{0.03, 0.03, 0.03};
    return m;
}

Vector drift(const PlantModel& model, const Vector& xi, const Vector& v, Mode mode) {
    return model.A * xi + model.input_matrix(mode) * (v - model.equilibrium(mode));
}

PlantState step(const PlantState& state, const Vector& v, double dt, const PlantModel& model) {
    if (!(dt > 0.0)) throw std::invalid_argument("plant step: dt must be positive");
    const std::size_t n = model.dim();
    const Vector forcing = model.input_matrix(state.mode) * (v - model.equilibrium(state.mode));

    PlantState next = state;
    if (model.A.max_abs() == 0.0) {
        next.xi = state.xi + forcing * dt;
    } else {
        // Augmented exponential [[A, f], [0, 0]] integrates the affine term exactly.
        Matrix aug(n + 1, n + 1);
        aug.set_block(0, 0, model.A);
        for (std::size_t i = 0; i < n; ++i) aug(i, n) = forcing[i];
        const Matrix e = expm(aug, dt);
        Vector x(n + 1);
        for (std::size_t i = 0; i < n; ++i) x[i] = state.xi[i];
        x[n] = 1.0;
        const Vector y = e * x;
        for (std::size_t i = 0; i < n; ++i) next.xi[i] = y[i];
    }
    for (std::size_t i = 0; i < n; ++i) next.xi[i] = std::max(next.xi[i], -model.h_ref[i]);
    next.time = state.time + dt;
    return next;
}

SensorNoise::SensorNoise(NoiseConfig config) : config_(config), engine_(config.seed) {
    if (!(config.sensor_std >= 0.0)) throw std::invalid_argument("sensor noise: std must be non-negative");
}

double SensorNoise::next_standard_normal() {
    ++draws_;
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    auto uniform = [this] { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; };
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

Vector sense(const PlantState& state, SensorNoise& noise) {
    Vector y = state.xi;
    const double s = noise.config().sensor_std;
    for (std::size_t i = 0; i < y.dim(); ++i) {
        const double w = noise.next_standard_normal();
        if (s > 0.0) y[i] += s * w;
    }
    return y;
}

}  // namespace etcsim
