// Command-line entry point: simulate | sweep | verify | oracle-compare.
//
// Exit codes: 0 success, 1 verify failure / internal error, 2 config or
// usage error (nothing written), 3 propagation failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <eitmem/eitmem.hpp>
#include <eitmem/io.hpp>

namespace fs = std::filesystem;
using namespace eitmem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        grid.push_back(std::stod(item));
    }
    return grid;
}

// Trajectory of a full schedule: t, f, theta, per-mode populations of the
// true single-excitation image of the photon mode, overlap with the
// instantaneous dark mode, and the running leakage against the reference.
std::string trajectory_csv(const SubEnsembleConfig& cfg, const ControlSchedule& sched,
                           const InputState& input) {
    const Propagator prop = evolve_modes(cfg, sched);
    const Propagator prop0 =
        cfg.homogeneous() ? prop : evolve_modes(cfg, sched, 0, /*use_homogeneous=*/true);

    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(cfg.dim());
    e0[0] = 1.0;
    const double fscale = sched.peak * cfg.g0_sqrtN();

    std::ostringstream out;
    out << "t,f,theta";
    out << ",amp2_a";
    for (int s = 1; s <= cfg.m; ++s) out << ",amp2_A" << s;
    for (int s = 1; s <= cfg.m; ++s) out << ",amp2_C" << s;
    out << ",dark_overlap,xi\n";

    for (std::size_t k = 0; k < prop.times.size(); ++k) {
        const double t = prop.times[k];
        const double f = fscale * sched.envelope01(t);
        const Eigen::VectorXcd u = prop.matrices[k] * e0;
        const Eigen::VectorXcd u0 = prop0.matrices[k] * e0;
        const ModeVector dark = dark_mode_vector(cfg, f);
        const double dark_overlap = std::abs(dark.amplitudes.dot(u));
        const double xi = std::max(0.0, 1.0 - std::norm(state_overlap(input, u, u0)));

        out << fmt12(t) << ',' << fmt12(f) << ',' << fmt12(mixing_angles(cfg, f).theta);
        for (int i = 0; i < cfg.dim(); ++i) out << ',' << fmt12(std::norm(u[i]));
        out << ',' << fmt12(dark_overlap) << ',' << fmt12(xi) << '\n';
    }
    return out.str();
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const io::RunConfig rc = io::load_run_config(config_path);
    if (!rc.system) throw SchemaError("$.system: required for simulate");
    if (!rc.schedule) throw SchemaError("$.schedule: required for simulate");
    const SubEnsembleConfig cfg = rc.system->realize();
    const ControlSchedule sched = *rc.schedule;
    rc.input.validate();

    ControlSchedule storage_leg = sched;
    storage_leg.direction = Direction::storage;

    io::json summary;
    summary["config"] = io::to_json(cfg);
    summary["schedule"] = io::to_json(sched);

    const LeakageReport leak = leakage(cfg, storage_leg, rc.input);
    summary["leakage"] = io::to_json(leak);

    if (sched.direction == Direction::roundtrip) {
        ControlSchedule retrieval_leg = sched;
        retrieval_leg.direction = Direction::retrieval;
        const RoundtripReport rt =
            roundtrip_fidelity(cfg, storage_leg, sched.hold, retrieval_leg, rc.input);
        io::json j;
        j["fidelity"] = io::num12(rt.fidelity);
        j["infidelity"] = io::num12(1.0 - rt.fidelity);
        j["mid_xi"] = io::num12(rt.mid_xi);
        j["photon_weight"] = io::num12(rt.photon_weight);
        summary["roundtrip"] = j;
    }
    if (cfg.m >= 2 && storage_leg.ramp_time * cfg.g0_sqrtN() >= 100.0)
        summary["stored_ratios"] = io::to_json(stored_ratios(cfg, storage_leg));

    const std::string csv = trajectory_csv(cfg, sched, rc.input);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "trajectory.csv", csv);
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    std::printf("simulate: xi = %s", fmt12(leak.xi).c_str());
    if (summary.contains("roundtrip"))
        std::printf(", roundtrip fidelity = %s",
                    fmt12(summary["roundtrip"]["fidelity"].get<double>()).c_str());
    std::printf("\nartifacts: %s/trajectory.csv, %s/summary.json\n", out_dir.c_str(),
                out_dir.c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& axis_flag, const std::string& grid_flag) {
    const io::RunConfig rc = io::load_run_config(config_path);
    if (!rc.system) throw SchemaError("$.system: required for sweep");
    if (!rc.schedule) throw SchemaError("$.schedule: required for sweep");

    const std::string axis_name = !axis_flag.empty()
                                      ? axis_flag
                                      : rc.sweep_axis.value_or("");
    if (axis_name.empty()) throw SchemaError("sweep: no axis given (flag --axis or $.sweep.axis)");
    const SweepAxis axis = parse_axis(axis_name);
    const std::vector<double> grid = !grid_flag.empty() ? parse_grid(grid_flag) : rc.sweep_grid;
    if (grid.empty()) throw SchemaError("sweep: empty grid (flag --grid or $.sweep.grid)");

    const SweepTable table = sweep(*rc.system, axis, grid, *rc.schedule, rc.input);

    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "sweep.csv", table.to_csv());
    std::printf("sweep over %s (%zu points) -> %s/sweep.csv\n", table.axis.c_str(),
                table.rows.size(), out_dir.c_str());
    return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& out_dir, const std::string& replay_path) {
    if (!replay_path.empty()) {
        const auto [suite, vc] = io::parse_replay_record(io::Doc::parse_file(replay_path));
        const CheckOutcome out = replay_case(suite, vc);
        std::printf("%s  replay %s: defect %s%s%s\n", out.ok ? "PASS" : "FAIL", suite.c_str(),
                    fmt12(out.defect).c_str(), out.why.empty() ? "" : " - ", out.why.c_str());
        return out.ok ? 0 : 1;
    }

    const std::vector<SuiteResult> results = run_verify_suites(seed);
    bool all_ok = true;
    for (const SuiteResult& r : results) {
        std::printf("%s  %-15s cases %-5ld worst defect %s%s%s\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.cases, fmt12(r.worst_defect).c_str(),
                    r.detail.empty() ? "" : " - ", r.detail.c_str());
        if (!r.passed) {
            all_ok = false;
            if (r.counterexample) {
                fs::create_directories(out_dir);
                const fs::path path = fs::path(out_dir) / ("counterexample_" + r.name + ".json");
                write_file(path, io::to_json(r.name, *r.counterexample).dump(2) + "\n");
                std::printf("      counterexample written to %s (replay with --replay)\n",
                            path.string().c_str());
            }
        }
    }
    return all_ok ? 0 : 1;
}

int cmd_oracle_compare(const std::string& config_path, const std::string& out_dir) {
    const io::RunConfig rc = io::load_run_config(config_path);
    if (!rc.oracle) throw SchemaError("$.oracle: required for oracle-compare");
    if (!rc.schedule) throw SchemaError("$.schedule: required for oracle-compare");
    ControlSchedule leg = *rc.schedule;
    if (leg.direction == Direction::roundtrip) leg.direction = Direction::storage;

    std::ostringstream csv;
    csv << "atom_count,groups,final_overlap,max_deviation,max_leak_outside\n";
    std::vector<std::string> traj_files;

    fs::create_directories(out_dir);
    for (int n_atoms : rc.oracle->atom_grid) {
        const ExactRegister reg = rc.oracle->make_register(n_atoms);
        for (int m : rc.oracle->partitions) {
            const auto sizes = io::OracleRunSpec::split_sizes(n_atoms, m);
            const ComparisonReport rep =
                compare_to_bosonic(reg, sizes, leg, rc.oracle->photon_number);
            csv << n_atoms << ',' << m << ',' << fmt12(rep.final_overlap) << ','
                << fmt12(rep.max_deviation) << ',' << fmt12(rep.max_leak_outside) << '\n';

            std::ostringstream traj;
            traj << "t,deviation,leak_outside\n";
            for (const ComparisonSample& s : rep.trajectory)
                traj << fmt12(s.t) << ',' << fmt12(s.deviation) << ',' << fmt12(s.leak_outside)
                     << '\n';
            const std::string name =
                "oracle_traj_N" + std::to_string(n_atoms) + "_m" + std::to_string(m) + ".csv";
            write_file(fs::path(out_dir) / name, traj.str());
            traj_files.push_back(name);

            std::printf("N=%-3d m=%-2d final overlap %s  max deviation %s  leak %s\n", n_atoms,
                        m, fmt12(rep.final_overlap).c_str(), fmt12(rep.max_deviation).c_str(),
                        fmt12(rep.max_leak_outside).c_str());
        }
    }
    write_file(fs::path(out_dir) / "oracle_compare.csv", csv.str());
    std::printf("artifacts: %s/oracle_compare.csv (+%zu trajectory files)\n", out_dir.c_str(),
                traj_files.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EIT quantum-memory storage/retrieval simulator for inhomogeneously "
                 "coupled atomic sub-ensembles"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", axis, grid, replay;
    std::uint64_t seed = 0;

    CLI::App* sim = app.add_subcommand("simulate", "run one storage/roundtrip simulation");
    sim->add_option("--config", config_path, "config document (JSON)")->required();
    sim->add_option("--out", out_dir, "output directory");

    CLI::App* swp = app.add_subcommand("sweep", "sweep a named parameter axis");
    swp->add_option("--config", config_path, "config document (JSON)")->required();
    swp->add_option("--out", out_dir, "output directory");
    swp->add_option("--axis", axis, "inhomogeneity | subensembles | ramp-time | photon-number");
    swp->add_option("--grid", grid, "comma-separated grid values");

    CLI::App* ver = app.add_subcommand("verify", "run the randomized invariant suites");
    ver->add_option("--seed", seed, "suite seed");
    ver->add_option("--out", out_dir, "directory for counterexample records");
    ver->add_option("--replay", replay, "replay a serialized counterexample");

    CLI::App* orc = app.add_subcommand("oracle-compare",
                                       "exact few-atom register vs the bosonic model");
    orc->add_option("--config", config_path, "config document (JSON)")->required();
    orc->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir);
        if (swp->parsed()) return cmd_sweep(config_path, out_dir, axis, grid);
        if (ver->parsed()) return cmd_verify(seed, out_dir, replay);
        if (orc->parsed()) return cmd_oracle_compare(config_path, out_dir);
    } catch (const SchemaError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const PropagationError& e) {
        std::fprintf(stderr, "propagation error: %s (defect %.3e, delta %.3e)\n", e.what(),
                     e.last_defect, e.last_delta);
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
