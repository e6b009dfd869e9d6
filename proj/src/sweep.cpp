#include <cstdio>
#include <optional>

#include "etcsim/harness.hpp"

namespace etcsim {

std::string SweepCell::label() const {
    char buf[128];
    switch (strategy) {
        case Strategy::TTC: std::snprintf(buf, sizeof buf, "TTC T=%g", T); break;
        case Strategy::PETC:
        case Strategy::PSDETC:
            std::snprintf(buf, sizeof buf, "%s T=%g sigma=%g", to_string(strategy).c_str(), T, sigma);
            break;
        default:
            std::snprintf(buf, sizeof buf, "%s T=%g mu=%g varrho=%g", to_string(strategy).c_str(), T, mu, varrho);
    }
    return buf;
}

SweepGrid SweepGrid::cross(const ExperimentConfig& base, const std::vector<Strategy>& strategies,
                           const std::vector<double>& periods, const std::vector<double>& sigmas,
                           const std::vector<double>& mus, const std::vector<double>& varrhos) {
    SweepGrid g;
    g.base = base;
    const SweepCell d{base.policy.kind, base.policy.T, base.policy.sigma, base.policy.mu, base.policy.varrho};
    for (Strategy s : strategies) {
        for (double T : periods) {
            switch (s) {
                case Strategy::TTC: g.cells.push_back({s, T, d.sigma, d.mu, d.varrho}); break;
                case Strategy::PETC:
                case Strategy::PSDETC:
                    for (double sg : sigmas) g.cells.push_back({s, T, sg, d.mu, d.varrho});
                    break;
                case Strategy::PADETCabs:
                case Strategy::PADETCrel:
                    for (double mu : mus)
                        for (double vr : varrhos) g.cells.push_back({s, T, d.sigma, mu, vr});
                    break;
            }
        }
    }
    if (g.cells.empty()) throw ConfigError("sweep: empty grid");
    return g;
}

ExperimentConfig cell_config(const SweepGrid& grid, std::size_t cell) {
    ExperimentConfig c = grid.base;
    const SweepCell& k = grid.cells.at(cell);
    c.policy.kind = k.strategy;
    c.policy.T = k.T;
    c.policy.sigma = k.sigma;
    c.policy.mu = k.mu;
    c.policy.varrho = k.varrho;
    return c;
}

std::vector<MetricsReport> sweep_serial(const SweepGrid& grid) {
    std::vector<MetricsReport> out(grid.cells.size());
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        out[i].label = grid.cells[i].label();
        try {
            out[i] = run_experiment(cell_config(grid, i), i);
            out[i].label = grid.cells[i].label();
        } catch (const std::exception& e) {
            out[i].failed = true;
            out[i].error = e.what();
        }
    }
    return out;
}

std::vector<MetricsReport> sweep_parallel(const SweepGrid& grid) {
    const std::size_t cells = grid.cells.size();
    std::vector<ExperimentConfig> configs;
    std::vector<MetricsReport> out(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        configs.push_back(cell_config(grid, i));
        out[i].label = grid.cells[i].label();
        try {
            configs.back().validate();
        } catch (const std::exception& e) {
            out[i].failed = true;
            out[i].error = e.what();
        }
    }

    struct Job {
        std::size_t cell;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < cells; ++i)
        if (!out[i].failed)
            for (int k = 0; k < configs[i].repetitions; ++k) jobs.push_back({i, k});

    std::vector<std::optional<RunMetrics>> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const long long count = static_cast<long long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long long k = 0; k < count; ++k) {
        const Job& jb = jobs[static_cast<std::size_t>(k)];
        try {
            results[static_cast<std::size_t>(k)] = run_single(configs[jb.cell], jb.rep, jb.cell).metrics;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(k)] = e.what();
        }
    }

    for (std::size_t k = 0; k < jobs.size(); ++k) {
        MetricsReport& r = out[jobs[k].cell];
        if (r.failed) continue;
        if (!results[k]) {
            r.failed = true;
            r.error = errors[k];
            r.runs.clear();
            continue;
        }
        r.runs.push_back(*results[k]);
    }
    for (MetricsReport& r : out)
        if (!r.failed) r.mean = mean_of(r.runs);
    return out;
}

}  // namespace etcsim
