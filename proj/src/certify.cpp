#include "etcsim/certify.hpp"

#include <cmath>

namespace etcsim {

double CertificateBundle::eps(unsigned subset, std::size_t i) const {
    const auto it = epsilon.find({subset, i});
    return it == epsilon.end() ? epsilon_default : it->second;
}

ClosedLoopMatrices build_closed_loop(const Matrix& A, const Matrix& B, const Matrix& K, double sigma) {
    const std::size_t n = A.rows();
    if (!A.is_square() || n == 0) throw DimensionError("closed loop: A must be square");
    if (B.rows() != n || K.cols() != n || K.rows() != B.cols())
        throw DimensionError("closed loop: B, K dimensions do not match A");
    ClosedLoopMatrices cl;
    cl.n = n;
    const Matrix Z = Matrix::zeros(n, n);
    const Matrix I = Matrix::identity(n);
    cl.A_bar = Matrix::from_blocks({{A, B * K}, {Z, Z}});
    cl.J1 = Matrix::from_blocks({{I, Z}, {I, Z}});
    cl.J2 = Matrix::identity(2 * n);
    cl.Q_sigma = cl.q_sigma(sigma);
    return cl;
}

Matrix ClosedLoopMatrices::q_sigma(double sigma) const {
    const Matrix I = Matrix::identity(n);
    return Matrix::from_blocks({{(1.0 - sigma) * I, -I}, {-I, I}});
}

Matrix ClosedLoopMatrices::gamma_subset(unsigned subset) const {
    Vector d(n);
    for (std::size_t l = 0; l < n; ++l) d[l] = (subset >> l) & 1u ? 1.0 : 0.0;
    return Matrix::diagonal(d);
}

Matrix ClosedLoopMatrices::q_i(std::size_t i) const {
    const Matrix G = gamma_subset(1u << i);
    return Matrix::from_blocks({{G, -G}, {-G, G}});
}

Matrix ClosedLoopMatrices::j_subset(unsigned subset) const {
    const Matrix G = gamma_subset(subset);
    const Matrix I = Matrix::identity(n);
    return Matrix::from_blocks({{I, Matrix::zeros(n, n)}, {G, I - G}});
}

Matrix ClosedLoopMatrices::delta_bar(unsigned subset, const Vector& omega) const {
    return Matrix::from_blocks({{Matrix::zeros(n, 1)}, {gamma_subset(subset) * Matrix::column(omega)}});
}

Matrix ClosedLoopMatrices::hamiltonian(double rho, double gamma) const {
    if (!(gamma > 1.0)) throw std::invalid_argument("hamiltonian: gamma must exceed 1");
    const std::size_t m = 2 * n;
    const Matrix I = Matrix::identity(m);
    const Matrix H11 = A_bar + rho * I;
    return Matrix::from_blocks({{H11, Matrix::zeros(m, m)}, {(-1.0 / (gamma * gamma - 1.0)) * I, -H11.transpose()}});
}

Matrix ClosedLoopMatrices::F(double tau, double rho, double gamma) const {
    return expm(hamiltonian(rho, gamma), -tau);
}

namespace {

Matrix two_block(const Matrix& top_left, const Matrix& off, const Matrix& P) {
    return Matrix::from_blocks({{top_left, off}, {off.transpose(), P}});
}

Matrix lmi(const CertificateBundle& b, const ClosedLoopMatrices& cl, const Matrix& Q, double signed_mu,
           const Matrix& J) {
    const Matrix eAT_T = expm(cl.A_bar.transpose(), b.T);
    return two_block(std::exp(-2.0 * b.rho * b.T) * b.P + signed_mu * Q, J.transpose() * eAT_T * b.P, b.P);
}

void require_p(const CertificateBundle& b, const ClosedLoopMatrices& cl) {
    if (b.P.rows() != 2 * cl.n || !b.P.is_square()) throw DimensionError("certificate: P must be 2n x 2n");
}

Vector omega_of(const CertificateBundle& b, std::size_t n) {
    if (!b.omega.empty()) {
        if (b.omega.dim() != n) throw DimensionError("certificate: omega dimension mismatch");
        return b.omega;
    }
    return Vector(n, 1.0 / std::sqrt(static_cast<double>(n)));
}

}  // namespace

Matrix petc_lmi_block(const CertificateBundle& b, const ClosedLoopMatrices& cl, double sigma, int i) {
    require_p(b, cl);
    const Matrix Q = cl.q_sigma(sigma);
    return i == 1 ? lmi(b, cl, Q, -b.mu1, cl.J1) : lmi(b, cl, Q, b.mu2, cl.J2);
}

bool check_petc_certificate(const CertificateBundle& b, double sigma, const ClosedLoopMatrices& cl, double tol) {
    if (b.mu1 < 0.0 || b.mu2 < 0.0) return false;
    if (!is_positive_definite(b.P, tol)) return false;
    return is_positive_definite(petc_lmi_block(b, cl, sigma, 1), tol) &&
           is_positive_definite(petc_lmi_block(b, cl, sigma, 2), tol);
}

std::vector<Matrix> psdetc_lmi_blocks(const CertificateBundle& b, const ClosedLoopMatrices& cl, double sigma) {
    require_p(b, cl);
    const Matrix Q = cl.q_sigma(sigma);
    return {lmi(b, cl, Q, -b.mu1, cl.J1), lmi(b, cl, Q, b.mu2, cl.J2), lmi(b, cl, Q, b.mu3, cl.J1)};
}

bool check_psdetc_certificate(const CertificateBundle& b, double sigma, const ClosedLoopMatrices& cl, double tol) {
    if (b.mu1 < 0.0 || b.mu2 < 0.0 || b.mu3 < 0.0) return false;
    if (!is_positive_definite(b.P, tol)) return false;
    for (const Matrix& m : psdetc_lmi_blocks(b, cl, sigma))
        if (!is_positive_definite(m, tol)) return false;
    return true;
}

PadetcFactors padetc_factors(const CertificateBundle& b, const ClosedLoopMatrices& cl, int grid_steps) {
    const std::size_t m = 2 * cl.n;
    for (int k = 0; k <= grid_steps; ++k) {
        const double tau = b.T * static_cast<double>(k) / grid_steps;
        try {
            (void)inverse(cl.F(tau, b.rho, b.gamma).block(0, 0, m, m));
        } catch (const SingularMatrixError&) {
            throw AssumptionViolated("F11(tau) is singular at tau = " + std::to_string(tau));
        }
    }
    const Matrix F = cl.F(b.T, b.rho, b.gamma);
    PadetcFactors f;
    f.F11_inv = inverse(F.block(0, 0, m, m));
    f.F21 = F.block(m, 0, m, m);
    const Matrix M = -(f.F11_inv * F.block(0, m, m, m));
    const double tol = 1e-8;
    try {
        f.S_bar = psd_factor(M.symmetric_part(), tol);
    } catch (const NotPsdError&) {
        throw AssumptionViolated("-F11^{-1}(T) F12(T) is not positive semidefinite");
    }
    return f;
}

Matrix padetc_bmi_matrix(const CertificateBundle& b, const ClosedLoopMatrices& cl, const PadetcFactors& f,
                         unsigned subset) {
    require_p(b, cl);
    const std::size_t n = cl.n;
    const std::size_t m = 2 * n;
    const Matrix I = Matrix::identity(m);
    const Matrix Z = Matrix::zeros(m, m);
    const Matrix z1 = Matrix::zeros(m, 1);
    const Vector omega = omega_of(b, n);
    const Matrix Theta = Matrix::column(omega);

    const Matrix Ft = f.F11_inv.transpose() * b.P * f.F11_inv + f.F21 * f.F11_inv;
    const Matrix JJ = cl.j_subset(subset);
    const Matrix D = cl.delta_bar(subset, omega);

    Matrix H1 = -b.beta1 * I + b.beta2 * (JJ.transpose() * JJ);
    Matrix H2 = Matrix(1, 1, b.beta1 * b.varrho * b.varrho) - b.beta2 * (D.transpose() * D);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = b.eps(subset, i);
        const double s = (subset >> i) & 1u ? 1.0 : -1.0;
        H1 -= (s * e) * cl.q_i(i);
        H2 += (s * e) * (Theta.transpose() * cl.gamma_subset(1u << i) * Theta);
    }
    const Matrix B12 = f.F11_inv.transpose() * b.P * f.S_bar;
    const Matrix B22 = I - f.S_bar.transpose() * b.P * f.S_bar;
    const Matrix B14 = -b.beta2 * JJ;
    const Matrix B44 = b.P + H1;

    return Matrix::from_blocks({
        {b.beta2 * I, B12, Ft, B14, z1},
        {B12.transpose(), B22, Z, Z, z1},
        {Ft.transpose(), Z, Ft, Z, z1},
        {B14.transpose(), Z, Z, B44, z1},
        {z1.transpose(), z1.transpose(), z1.transpose(), z1.transpose(), H2},
    });
}

namespace {

bool padetc_scalars_ok(const CertificateBundle& b, std::size_t n) {
    if (!(b.beta1 > 0.0 && b.beta2 > 0.0 && b.varrho > 0.0 && b.gamma > 1.0)) return false;
    for (unsigned s = 0; s < (1u << n); ++s)
        for (std::size_t i = 0; i < n; ++i)
            if (!(b.eps(s, i) > 0.0)) return false;
    return true;
}

}  // namespace

bool check_padetc_certificate_serial(const CertificateBundle& b, const ClosedLoopMatrices& cl, double tol) {
    require_p(b, cl);
    if (!padetc_scalars_ok(b, cl.n) || !is_positive_definite(b.P, tol)) return false;
    const PadetcFactors f = padetc_factors(b, cl);
    for (unsigned s = 0; s < (1u << cl.n); ++s)
        if (!is_positive_definite(padetc_bmi_matrix(b, cl, f, s), tol)) return false;
    return true;
}

bool check_padetc_certificate(const CertificateBundle& b, const ClosedLoopMatrices& cl, double tol) {
    require_p(b, cl);
    if (!padetc_scalars_ok(b, cl.n) || !is_positive_definite(b.P, tol)) return false;
    const PadetcFactors f = padetc_factors(b, cl);
    const int count = 1 << cl.n;
    bool ok = true;
#pragma omp parallel for reduction(&& : ok) schedule(static)
    for (int s = 0; s < count; ++s)
        ok = ok && is_positive_definite(padetc_bmi_matrix(b, cl, f, static_cast<unsigned>(s)), tol);
    return ok;
}

}  // namespace etcsim
