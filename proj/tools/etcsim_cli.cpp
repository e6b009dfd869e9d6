#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "etcsim/certify.hpp"
#include "etcsim/harness.hpp"

using namespace etcsim;

namespace {

struct Overrides {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string strategy;
    double period = 0, sigma = 0, mu = 0, varrho = 0, loss = -1;
    int repetitions = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "scenario INI file");
    cmd->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t s) { o.seed = s; o.seed_set = true; },
                                             "master seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--strategy", o.strategy, "TTC | PETC | PSDETC | PADETCabs | PADETCrel");
    cmd->add_option("--period", o.period, "super-frame length T in seconds");
    cmd->add_option("--sigma", o.sigma, "PETC/PSDETC sigma");
    cmd->add_option("--mu", o.mu, "PADETC mu");
    cmd->add_option("--varrho", o.varrho, "PADETC varrho");
    cmd->add_option("--loss", o.loss, "per-try loss probability");
    cmd->add_option("--repetitions", o.repetitions, "repetitions per scenario");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed_set) c.seed = o.seed;
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.strategy.empty()) c.policy.kind = parse_strategy(o.strategy);
    if (o.period > 0) c.policy.T = o.period;
    if (o.sigma > 0) c.policy.sigma = o.sigma;
    if (o.mu > 0) c.policy.mu = o.mu;
    if (o.varrho > 0) c.policy.varrho = o.varrho;
    if (o.loss >= 0) c.radio.loss_probability = o.loss;
    if (o.repetitions > 0) c.repetitions = o.repetitions;
    return c;
}

std::vector<double> parse_list(const std::string& s) {
    return parse_vector(s).values();
}

void write_reports(const SweepGrid& grid, const std::vector<MetricsReport>& reports, const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream csv(dir + "/sweep.csv"), sav(dir + "/savings.csv"), runs(dir + "/runs.jsonl");
    write_sweep_csv(csv, grid, reports);
    write_savings_csv(sav, grid, reports);
    write_runs_jsonl(runs, grid, reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered control over TDMA co-simulator"};
    app.require_subcommand(1);

    Overrides run_o, sweep_o, sched_o;
    auto* run = app.add_subcommand("run", "simulate one scenario");
    add_common(run, run_o);

    auto* sweep = app.add_subcommand("sweep", "simulate a parameter grid");
    add_common(sweep, sweep_o);
    std::string strategies = "TTC PETC PSDETC PADETCabs PADETCrel", periods = "1", sigmas = "0.05 0.1 0.2",
                mus = "0.75 0.95", varrhos = "85 120";
    bool serial = false;
    sweep->add_option("--strategies", strategies, "space separated strategy list");
    sweep->add_option("--periods", periods);
    sweep->add_option("--sigmas", sigmas);
    sweep->add_option("--mus", mus);
    sweep->add_option("--varrhos", varrhos);
    sweep->add_flag("--serial", serial, "use the serial reference sweep");

    auto* certify = app.add_subcommand("certify", "check a certificate file");
    std::string cert_path;
    certify->add_option("file", cert_path, "certificate INI")->required();

    auto* schedule = app.add_subcommand("schedule", "print the slot layout and T_min");
    add_common(schedule, sched_o);
    int nodes = 3;
    schedule->add_option("--nodes", nodes);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            ExperimentConfig c = resolve(run_o);
            SweepGrid grid;
            grid.base = c;
            grid.cells.push_back({c.policy.kind, c.policy.T, c.policy.sigma, c.policy.mu, c.policy.varrho});
            const auto reports = sweep_parallel(grid);
            if (reports[0].failed) throw std::runtime_error(reports[0].error);
            write_reports(grid, reports, c.out_dir);
            write_sweep_csv(std::cout, grid, reports);
        } else if (*sweep) {
            ExperimentConfig c = resolve(sweep_o);
            std::vector<Strategy> ss;
            std::istringstream is(strategies);
            for (std::string tok; is >> tok;) ss.push_back(parse_strategy(tok));
            const SweepGrid grid = SweepGrid::cross(c, ss, parse_list(periods), parse_list(sigmas), parse_list(mus),
                                                    parse_list(varrhos));
            const auto reports = serial ? sweep_serial(grid) : sweep_parallel(grid);
            write_reports(grid, reports, c.out_dir);
            write_savings_csv(std::cout, grid, reports);
        } else if (*certify) {
            const CertificateFile f = load_certificate_file(cert_path);
            const bool ok = check_certificate_file(f);
            std::cout << f.kind << " certificate: " << (ok ? "feasible" : "rejected") << '\n';
            return ok ? 0 : 2;
        } else if (*schedule) {
            ExperimentConfig c = resolve(sched_o);
            const Protocol p = protocol_for(c.policy.kind);
            const double T = sched_o.period > 0 ? c.policy.T * 1000.0 : 0.0;
            write_schedule(std::cout, build_schedule(p, static_cast<std::size_t>(nodes), c.timings, T));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
