#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "etcsim/numerics.hpp"

namespace etcsim {

/// Pump configuration of the switched water network.
enum class Mode : int {
    WeakPump = 1,   ///< assistant pump only
    BothPumps = 2,  ///< assistant + powerful pump
};

inline std::size_t mode_index(Mode m) { return m == Mode::WeakPump ? 0 : 1; }

/// Linearised switched tank model around the reference levels. Levels are
/// in metres, valve openings in degrees, time in seconds.
struct PlantModel {
    Matrix A;                         // 1/s
    std::array<Matrix, 2> B;          // per mode, m/(s deg)
    std::array<Vector, 2> alpha_bar;  // equilibrium valve openings per mode, deg
    Vector h_ref;                     // reference levels h'
    Vector h_low;                     // low-level trip points

    [[nodiscard]] std::size_t dim() const { return h_ref.dim(); }
    [[nodiscard]] const Matrix& input_matrix(Mode m) const { return B[mode_index(m)]; }
    [[nodiscard]] const Vector& equilibrium(Mode m) const { return alpha_bar[mode_index(m)]; }

    /// Throws std::invalid_argument on inconsistent dimensions, h_low >= h_ref
    /// or singular input matrices.
    void validate() const;

    /// The identified three-tank WaterBox instance.
    static PlantModel waterbox();
};

/// Deviation state xi = h - h' plus the active pump mode.
struct PlantState {
    Vector xi;
    Mode mode = Mode::BothPumps;
    double time = 0.0;
};

struct NoiseConfig {
    double sensor_std = 0.0005;  // m
    std::uint64_t seed = 1;
};

/// Rate of change of xi under a held valve command.
Vector drift(const PlantModel& model, const Vector& xi, const Vector& v, Mode mode);

/// Exact zero-order-hold update over dt seconds:
///   xi' = A xi + B_mode (v - alpha_bar_mode)
/// followed by clipping the level at the tank floor (h >= 0).
PlantState step(const PlantState& state, const Vector& v, double dt, const PlantModel& model);

/// Seeded Gaussian sensor noise. Draw k of a given seed is reproducible on
/// every platform: the engine is mt19937_64 and the normal transform is
/// Box-Muller written out here rather than std::normal_distribution.
class SensorNoise {
public:
    explicit SensorNoise(NoiseConfig config);

    [[nodiscard]] const NoiseConfig& config() const { return config_; }
    [[nodiscard]] std::uint64_t draws() const { return draws_; }

    double next_standard_normal();

private:
    NoiseConfig config_;
    std::mt19937_64 engine_;
    std::uint64_t draws_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// xi + w with w ~ N(0, sensor_std^2 I).
Vector sense(const PlantState& state, SensorNoise& noise);

}  // namespace etcsim
