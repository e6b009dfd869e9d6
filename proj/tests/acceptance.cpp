// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "etcsim/certify.hpp"
#include "etcsim/harness.hpp"
#include "oracles/oracles.hpp"

using namespace etcsim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = budget_s <= 0.0 || dt < budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s [%2d] %s: %s (%.3fs%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), dt,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

Matrix from_oracle(const oracle::Mat& m) {
    Matrix out(m.size(), m[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[0].size(); ++j) out(i, j) = m[i][j];
    return out;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome petc_equivalence() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.01, 0.99);
    int mismatches = 0;
    for (int k = 0; k < 10000; ++k) {
        Vector xi{u(rng), u(rng), u(rng)}, xh(3);
        for (std::size_t i = 0; i < 3; ++i) xh[i] = xi[i] + 0.5 * u(rng);
        // Every third sample sits exactly on the boundary xi_hat = 0, xi = 0.
        if (k % 3 == 0) xi = xh = Vector(3);
        const double sigma = s(rng);
        double direct = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            direct += (1.0 - sigma) * xi[i] * xi[i] - xi[i] * xh[i] - xh[i] * xi[i] + xh[i] * xh[i];
        mismatches += petc_decide(xi, xh, sigma).control_update_required != (direct > 0.0);
    }
    return {mismatches == 0, fmt("%d mismatches in 10000", mismatches)};
}

Outcome psdetc_soundness() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> x(-1.0, 1.0), d(-0.5, 0.5), s(0.05, 0.5), t(0.2, 2.0), f(0.0, 1.2);
    int held = 0, violations = 0;
    double worst_sum = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Vector xi{x(rng), x(rng), x(rng)}, xd{d(rng), d(rng), d(rng)};
        const double sigma = s(rng);
        const Vector theta = psdetc_compute_theta(xi, xd, sigma, t(rng));
        worst_sum = std::max(worst_sum, std::abs(theta.sum()));
        Vector eps(3);
        for (std::size_t i = 0; i < 3; ++i)
            eps[i] = (x(rng) < 0 ? -1.0 : 1.0) * f(rng) * std::sqrt(std::max(0.0, sigma * xi[i] * xi[i] + theta[i]));
        bool all = true;
        for (std::size_t i = 0; i < 3; ++i) all = all && !psdetc_local_check(xi[i], eps[i], sigma, theta[i]);
        if (!all) continue;
        ++held;
        violations += eps.dot(eps) > sigma * xi.dot(xi) + 1e-12;
    }
    return {violations == 0 && worst_sum <= 1e-9,
            fmt("%d violations over %d samples with all local conditions, max |sum theta| = %.1e", violations, held,
                worst_sum)};
}

Outcome theta_residuals() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> x(-0.06, 0.06), d(-0.002, 0.002), s(0.05, 0.5), t(0.5, 2.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Vector xi{x(rng), x(rng), x(rng)}, xd{d(rng), d(rng), d(rng)};
        const double sigma = s(rng), te = t(rng);
        const Vector theta = psdetc_compute_theta(xi, xd, sigma, te);
        double g[3];
        for (std::size_t i = 0; i < 3; ++i) {
            const double e = xd[i] * te, z = xi[i] + xd[i] * te;
            g[i] = e * e - sigma * z * z - theta[i];
        }
        worst = std::max({worst, std::abs(theta.sum()), std::abs(g[0] - g[1]), std::abs(g[1] - g[2])});
    }
    return {worst < 1e-12, fmt("max residual %.2e", worst)};
}

Outcome certificate_oracle() {
    oracle::ScalarToy toy;
    const ClosedLoopMatrices cl = build_closed_loop(Matrix{{toy.a}}, Matrix{{1.0}}, Matrix{{toy.bk}}, toy.sigma);
    auto petc = [&](const oracle::ScalarToy& s, const oracle::PetcPoint& p) {
        CertificateBundle b;
        b.P = from_oracle(p.P);
        b.rho = s.rho;
        b.T = s.T;
        b.mu1 = p.mu1;
        b.mu2 = p.mu2;
        return check_petc_certificate(b, s.sigma, cl);
    };
    auto bmi = [&](const oracle::ScalarToy& s, const oracle::BmiPoint& p) {
        CertificateBundle b;
        b.P = from_oracle(p.P);
        b.rho = s.rho;
        b.T = s.T;
        b.beta1 = p.beta1;
        b.beta2 = p.beta2;
        b.epsilon[{0u, 0}] = p.eps_empty;
        b.epsilon[{1u, 0}] = p.eps_full;
        return check_padetc_certificate(b, cl);
    };

    const auto pf = oracle::petc_grid(toy);
    int petc_accepted = 0;
    for (const auto& p : pf) petc_accepted += petc(toy, p);
    const auto bf = oracle::bmi_grid(toy);
    int bmi_accepted = 0;
    for (const auto& p : bf) bmi_accepted += bmi(toy, p);

    oracle::ScalarToy fast = toy;
    fast.rho = 100.0;
    int petc_fast = 0, bmi_fast = 0;
    for (const auto& P : oracle::petc_grid_P())
        for (double m1 : oracle::petc_grid_mu())
            for (double m2 : oracle::petc_grid_mu()) petc_fast += petc(fast, {P, m1, m2});
    for (const auto& p : bf) bmi_fast += bmi(fast, p);

    const bool ok = !pf.empty() && petc_accepted == static_cast<int>(pf.size()) && petc_fast == 0 && !bf.empty() &&
                    bmi_accepted == static_cast<int>(bf.size()) && bmi_fast == 0;
    return {ok, fmt("periodic: oracle %zu feasible, checker accepts %d, rho=100 accepts %d; asynchronous: oracle %zu "
                    "feasible, checker accepts %d, rho=100 accepts %d",
                    pf.size(), petc_accepted, petc_fast, bf.size(), bmi_accepted, bmi_fast)};
}

Outcome expm_accuracy() {
    const PlantModel p = PlantModel::waterbox();
    const ControllerGains g = ControllerGains::waterbox();
    double nil = 0.0;
    for (Mode m : {Mode::WeakPump, Mode::BothPumps}) {
        const ClosedLoopMatrices cl = build_closed_loop(p.A, p.input_matrix(m), -g.gain(m));
        for (double T : {0.5, 1.0, 2.0}) {
            const Matrix ref = Matrix::identity(6) + cl.A_bar * T;
            nil = std::max(nil, (expm(cl.A_bar, T) - ref).max_abs() / (1.0 + ref.max_abs()));
        }
    }
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> u(-1.0, 1.0), d(0.1, 2.0), ts(0.0, 3.0);
    double semi = 0.0;
    for (int k = 0; k < 200; ++k) {
        Matrix V = Matrix::identity(6) * 3.0, D(6, 6);
        for (std::size_t i = 0; i < 6; ++i) {
            D(i, i) = -d(rng);
            for (std::size_t j = 0; j < 6; ++j) V(i, j) += u(rng);
        }
        const Matrix M = V * D * inverse(V);
        const double s = ts(rng), t = ts(rng);
        semi = std::max(semi, (expm(M, s) * expm(M, t) - expm(M, s + t)).max_abs());
    }
    return {nil <= 4.0 * 2.220446049250313e-16 && semi < 1e-8,
            fmt("nilpotent relative error %.1e, semigroup max error %.1e", nil, semi)};
}

Outcome mac_validity() {
    std::mt19937_64 rng(106), coin(107);
    std::bernoulli_distribution flip(0.5);
    RadioModel radio;
    radio.loss_probability = 0.3;
    std::size_t overlaps = 0, guard_hits = 0;
    for (Protocol p : {Protocol::CTDMA, Protocol::SDCTDMA, Protocol::ADCTDMA})
        for (std::size_t n = 1; n <= 6; ++n) {
            const SlotSchedule s = build_schedule(p, n);
            overlaps += validate_schedule(s).size();
            EnergyLedger ledger(n, radio.currents);
            for (int f = 0; f < 1000; ++f) {
                std::vector<NodeIntent> in(n);
                for (auto& i : in) {
                    i.violation = flip(coin);
                    i.payload = flip(coin) ? MessageKind::StateX : MessageKind::IncrementM;
                }
                std::vector<MessageEvent> msgs;
                const Micros F = f * s.frame_length;
                const bool upd = flip(coin);
                simulate_superframe(
                    s, F, F + s.frame_length, in,
                    [&](const Reception&) { return ControlReply{upd, std::vector<bool>(n, true)}; }, radio, {},
                    rng, ledger, {&msgs});
                guard_hits += validate_frame_trace(s, F, msgs).size();
            }
        }
    const double sdc = min_interval_ms(Protocol::SDCTDMA, 3);
    return {overlaps == 0 && guard_hits == 0 && sdc == 564.0,
            fmt("%zu schedule issues, %zu trace issues over 18x1000 frames, SDC-TDMA T_min(N=3) = %.0f ms", overlaps,
                guard_hits, sdc)};
}

Outcome energy_conservation() {
    std::size_t runs = 0, time_bad = 0;
    double worst = 0.0;
    for (Strategy s : {Strategy::TTC, Strategy::PETC, Strategy::PSDETC, Strategy::PADETCabs, Strategy::PADETCrel})
        for (double loss : {0.0, 0.2}) {
            ExperimentConfig c;
            c.policy.kind = s;
            c.radio.loss_probability = loss;
            const RunResult r = run_single(c);
            ++runs;
            for (std::size_t j = 0; j < 3; ++j) {
                time_bad += r.ledger.total_time(j) != s_to_us(c.t_end);
                double direct = 0.0;
                for (std::size_t k = 0; k < kNodeStates; ++k)
                    direct += r.ledger.currents().mA[k] * us_to_s(r.ledger.time_in(j, static_cast<NodeState>(k))) /
                              3600.0;
                worst = std::max(worst, std::abs(r.ledger.discharge_mAh(j) - direct) / direct);
            }
        }
    return {time_bad == 0 && worst < 1e-12,
            fmt("%zu runs, %zu nodes with time sum != t_end, max relative discharge error %.1e", runs, time_bad, worst)};
}

Outcome convergence() {
    ExperimentConfig c;
    c.policy.kind = Strategy::TTC;
    c.policy.T = 0.5;
    c.sensor_std = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_single(c);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const LevelSample& last = r.trace.levels.back();
    double dev = 0.0;
    for (std::size_t j = 0; j < 3; ++j) dev = std::max(dev, std::abs(last.h[j] - c.plant.h_ref[j]));
    const bool switched = r.trace.first_release.has_value();
    return {dev <= 0.005 && switched && dt < 1.0,
            fmt("final max |h - h'| = %.2f mm, switched to mode 1: %s, run time %.3fs", dev * 1000.0,
                switched ? "yes" : "no", dt)};
}

Outcome trends() {
    ExperimentConfig base;
    base.policy.sigma = 0.2;
    base.policy.mu = 0.95;
    base.policy.varrho = 85.0;
    const SweepGrid main = SweepGrid::cross(
        base, {Strategy::TTC, Strategy::PETC, Strategy::PSDETC, Strategy::PADETCabs, Strategy::PADETCrel}, {1.0},
        {0.2}, {0.95}, {85.0});
    const SweepGrid sig = SweepGrid::cross(base, {Strategy::PETC}, {1.0}, {0.05, 0.1, 0.2}, {0.95}, {85.0});
    const SweepGrid per = SweepGrid::cross(base, {Strategy::TTC}, {0.5, 1.0, 2.0}, {0.2}, {0.95}, {85.0});
    const auto m = sweep_parallel(main), s = sweep_parallel(sig), p = sweep_parallel(per);

    auto st = [&](std::size_t i) { return m[i].mean.full.state_transmissions; };
    const double v_ttc = m[0].mean.full.violations, v_petc = m[1].mean.full.violations;
    const bool a = v_petc < v_ttc;
    const bool b1 = st(3) < st(2), b2 = st(2) < st(0), b3 = st(4) < st(0);
    const bool c = s[0].mean.full.violations >= s[1].mean.full.violations &&
                   s[1].mean.full.violations >= s[2].mean.full.violations;
    const bool d = p[0].mean.full.sleep_time < p[1].mean.full.sleep_time &&
                   p[1].mean.full.sleep_time < p[2].mean.full.sleep_time &&
                   p[0].mean.full.switching_time <= p[1].mean.full.switching_time &&
                   p[1].mean.full.switching_time <= p[2].mean.full.switching_time;

    std::printf("     (a) violations TTC %.1f, PETC %.1f: %s\n", v_ttc, v_petc, a ? "ok" : "violated");
    std::printf("     (b) state transmissions TTC %.1f, PSDETC %.1f, PADETCabs %.1f, PADETCrel %.1f: "
                "PADETCabs<PSDETC %s, PSDETC<TTC %s, PADETCrel<TTC %s\n",
                st(0), st(2), st(3), st(4), b1 ? "ok" : "violated", b2 ? "ok" : "violated", b3 ? "ok" : "violated");
    std::printf("     (c) PETC violations at sigma 0.05/0.1/0.2: %.1f / %.1f / %.1f: %s\n", s[0].mean.full.violations,
                s[1].mean.full.violations, s[2].mean.full.violations, c ? "ok" : "violated");
    std::printf("     (d) TTC sleep at T 0.5/1/2: %.1f / %.1f / %.1f s, switching %.1f / %.1f / %.1f s: %s\n",
                p[0].mean.full.sleep_time, p[1].mean.full.sleep_time, p[2].mean.full.sleep_time,
                p[0].mean.full.switching_time, p[1].mean.full.switching_time, p[2].mean.full.switching_time,
                d ? "ok" : "violated");
    const bool ok = a && b1 && b2 && b3 && c && d;
    return {ok, fmt("(a) %s, (b) %s, (c) %s, (d) %s", a ? "ok" : "FAIL", b1 && b2 && b3 ? "ok" : "FAIL",
                    c ? "ok" : "FAIL", d ? "ok" : "FAIL")};
}

Outcome determinism() {
    ExperimentConfig base;
    base.radio.loss_probability = 0.1;
    const SweepGrid g = SweepGrid::cross(
        base, {Strategy::TTC, Strategy::PETC, Strategy::PSDETC, Strategy::PADETCabs, Strategy::PADETCrel}, {1.0, 2.0},
        {0.1, 0.2}, {0.75, 0.95}, {85.0, 120.0});
    auto dump = [&](const std::vector<MetricsReport>& r) {
        std::ostringstream os;
        write_sweep_csv(os, g, r);
        write_savings_csv(os, g, r);
        write_runs_jsonl(os, g, r);
        return os.str();
    };
    const std::string a = dump(sweep_serial(g)), b = dump(sweep_parallel(g)), c = dump(sweep_parallel(g));
    return {a == b && b == c, fmt("%zu cells, %zu report bytes, serial==parallel: %s, parallel==parallel: %s",
                                  g.cells.size(), a.size(), a == b ? "yes" : "no", b == c ? "yes" : "no")};
}

}  // namespace

int main() {
    criterion(1, "trigger-condition oracle equivalence", 1.0, petc_equivalence);
    criterion(2, "synchronous decentralised soundness", 0.0, psdetc_soundness);
    criterion(3, "theta solver residuals", 0.0, theta_residuals);
    criterion(4, "certificate checker vs brute-force oracle", 30.0, certificate_oracle);
    criterion(5, "matrix exponential accuracy", 0.0, expm_accuracy);
    criterion(6, "MAC schedule validity", 0.0, mac_validity);
    criterion(7, "energy conservation", 0.0, energy_conservation);
    criterion(8, "end-to-end convergence", 0.0, convergence);
    criterion(9, "trend reproduction", 300.0, trends);
    criterion(10, "determinism", 0.0, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
