#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etcsim/numerics.hpp"

namespace etcsim {

/// A structural assumption of a certificate does not hold (e.g. F11(tau)
/// singular somewhere on [0, T]).
struct AssumptionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CertificateBundle {
    Matrix P;
    double rho = 0.1;
    double T = 1.0;
    double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;
    double gamma = 2.0;
    double beta1 = 1.0, beta2 = 1.0;
    double varrho = 85.0;
    double epsilon_default = 1.0;
    /// (subset bitmask, node index) -> epsilon; missing entries use the default.
    std::map<std::pair<unsigned, std::size_t>, double> epsilon;
    Vector omega;  // empty: uniform unit vector

    [[nodiscard]] double eps(unsigned subset, std::size_t i) const;
};

/// Blocks shared by all three certificates, for n plant states.
struct ClosedLoopMatrices {
    std::size_t n = 0;
    Matrix A_bar;    // [[A, BK], [0, 0]]
    Matrix Q_sigma;  // depends on sigma; rebuilt by q_sigma()
    Matrix J1, J2;

    [[nodiscard]] Matrix q_sigma(double sigma) const;
    [[nodiscard]] Matrix q_i(std::size_t i) const;
    [[nodiscard]] Matrix gamma_subset(unsigned subset) const;
    [[nodiscard]] Matrix j_subset(unsigned subset) const;
    [[nodiscard]] Matrix delta_bar(unsigned subset, const Vector& omega) const;
    [[nodiscard]] Matrix hamiltonian(double rho, double gamma) const;
    [[nodiscard]] Matrix F(double tau, double rho, double gamma) const;
};

/// K is applied as u = K xi_hat; pass K = -K_mode for the valve controller.
ClosedLoopMatrices build_closed_loop(const Matrix& A, const Matrix& B, const Matrix& K, double sigma = 0.2);

/// The two blocks of the periodic ETC LMI, i = 1, 2.
Matrix petc_lmi_block(const CertificateBundle& b, const ClosedLoopMatrices& cl, double sigma, int i);
bool check_petc_certificate(const CertificateBundle& b, double sigma, const ClosedLoopMatrices& cl,
                            double tol = kDefiniteTol);

std::vector<Matrix> psdetc_lmi_blocks(const CertificateBundle& b, const ClosedLoopMatrices& cl, double sigma);
bool check_psdetc_certificate(const CertificateBundle& b, double sigma, const ClosedLoopMatrices& cl,
                              double tol = kDefiniteTol);

/// Pieces of the asynchronous BMI that do not depend on the subset.
struct PadetcFactors {
    Matrix F11_inv;  // F11(T)^{-1}
    Matrix F21;      // F21(T)
    Matrix S_bar;    // S S^T = -F11^{-1}(T) F12(T)
};

/// Checks F11(tau) invertible on a grid of step T/grid_steps and factors
/// -F11^{-1} F12. Throws AssumptionViolated.
PadetcFactors padetc_factors(const CertificateBundle& b, const ClosedLoopMatrices& cl, int grid_steps = 100);

Matrix padetc_bmi_matrix(const CertificateBundle& b, const ClosedLoopMatrices& cl, const PadetcFactors& f,
                         unsigned subset);

/// All 2^n subsets, sequentially.
bool check_padetc_certificate_serial(const CertificateBundle& b, const ClosedLoopMatrices& cl,
                                     double tol = kDefiniteTol);
/// Same result, subsets spread over OpenMP threads.
bool check_padetc_certificate(const CertificateBundle& b, const ClosedLoopMatrices& cl, double tol = kDefiniteTol);

struct CertificateFile {
    std::string kind;  // petc | psdetc | padetc
    double sigma = 0.2;
    Matrix A, B, K;
    CertificateBundle bundle;
};

/// INI-style certificate description; see README for keys.
CertificateFile load_certificate_file(const std::string& path);
bool check_certificate_file(const CertificateFile& f);

}  // namespace etcsim
