// am2-cascade: steady states, stability, operating diagrams and simulations of the two-tank AM2 cascade.

#include "am2/io.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitNoConvergence = 4;

struct Args {
    std::string preset;
    std::string params_file;
    std::optional<double> D, r, s1in, s2in;
    std::string plane;
    std::vector<int> grid;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    std::string out;
    int jobs = 0;
    // simulate / basins
    std::vector<double> ic;
    double tmax = 1e4;
    int n = 200;
    bool reduced = false;
};

struct Setup {
    am2::KineticParams params{};
    am2::Config cfg;
};

Setup load(const Args& a) {
    Setup s;
    if (!a.params_file.empty()) s.cfg = am2::load_config(a.params_file);
    if (!a.preset.empty()) s.cfg.set("params", "preset", a.preset);
    s.params = am2::params_from_config(s.cfg);
    return s;
}

am2::OperatingPoint point_of(const Args& a, const Setup& s) {
    auto op = am2::point_from_config(s.cfg).value_or(am2::OperatingPoint{0.0, 1.0 / 3.0, 0.0, 0.0});
    const bool in_cfg = s.cfg.has("point");
    if (!in_cfg && !(a.D && a.s1in && a.s2in)) throw am2::ConfigError("a point needs --D, --s1in and --s2in (or a [point] section)");
    if (a.D) op.D = *a.D;
    if (a.r) op.r = *a.r;
    if (a.s1in) op.S1in = *a.s1in;
    if (a.s2in) op.S2in = *a.s2in;
    op.validate();
    return op;
}

fs::path out_dir(const Args& a) {
    fs::path p = a.out.empty() ? fs::path(".") : fs::path(a.out);
    fs::create_directories(p);
    return p;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw am2::ConfigError("cannot write " + p.string());
    return os;
}

am2::IntegratorOptions integrator_of(const Args& a) {
    am2::IntegratorOptions o;
    if (a.tol) {
        if (!(*a.tol > 0.0)) throw am2::ConfigError("--tol must be positive");
        o.rtol = *a.tol;
        o.atol = *a.tol * 1e-2;
    }
    if (!(a.tmax > 0.0)) throw am2::ConfigError("--tmax must be positive");
    o.tmax = a.tmax;
    return o;
}

int cmd_lambda(const Args& a) {
    const auto s = load(a);
    const auto m = am2::make_model(s.params);
    const auto op = point_of(a, s);
    const auto be = am2::break_evens(m, op);
    const auto cr = am2::critical_rates(m, op);
    auto line = [](const char* name, double v) { std::printf("%-10s %s\n", name, am2::fmt9(v).c_str()); };
    line("lambda1^1", be.lam1(1).or_infinity());
    line("lambda1^2", be.lam1(2).or_infinity());
    line("lambda2^11", be.lam2(1, 1).or_infinity());
    line("lambda2^12", be.lam2(1, 2).or_infinity());
    line("lambda2^21", be.lam2(2, 1).or_infinity());
    line("lambda2^22", be.lam2(2, 2).or_infinity());
    line("D1^m", cr.D1m);
    line("D2^m", cr.D2m);
    line("D1^*", cr.D1star);
    line("D2^*", cr.D2star);
    line("S2^m", cr.S2m);
    line("mu2(S2^m)", cr.mu2_max);
    return 0;
}

int cmd_steady_states(const Args& a) {
    const auto s = load(a);
    const auto m = am2::make_model(s.params);
    const auto op = point_of(a, s);
    am2::RootScanOptions ro;
    if (a.tol) ro.rel_tol = *a.tol;
    const auto av = am2::aux_values(m, op, ro);
    const auto states = am2::classify_all(m, op, av, am2::enumerate_steady_states(m, op, av, ro));
    std::printf("%-8s %-6s %-9s %-9s %-9s %-5s %s\n", "label", "branch", "analytic", "numeric", "agree", "", "X11 X21 X12 X22");
    for (const auto& c : states) {
        const auto& st = c.state;
        if (!st.exists) {
            std::printf("%-8s %-6s absent    (%s)\n", st.label.str().c_str(), "-", st.condition.c_str());
            continue;
        }
        std::printf("%-8s %d/%-4d %-9s %-9s %-9s %-5s %s %s %s %s\n", st.label.str().c_str(), st.branch, st.branch_count,
                    am2::to_string(c.check.analytic), am2::to_string(c.check.numeric), c.check.agree ? "yes" : "NO",
                    st.tangency ? "tang" : "", am2::fmt9(st.x[0]).c_str(), am2::fmt9(st.x[1]).c_str(),
                    am2::fmt9(st.x[2]).c_str(), am2::fmt9(st.x[3]).c_str());
    }
    if (!a.out.empty()) {
        auto os = open_out(out_dir(a) / "steady_states.json");
        os << am2::steady_states_json(m, op, states).dump(2) << '\n';
    }
    return 0;
}

int cmd_diagram(const Args& a) {
    auto s = load(a);
    if (!a.plane.empty()) s.cfg.set("plane", "preset", a.plane);
    auto plane = am2::plane_from_config(s.cfg);
    if (!plane) throw am2::ConfigError("diagram needs --plane <fig3..fig7> or a [plane] section");
    auto& [pl, implied] = *plane;
    // A figure preset carries its own kinetic constants unless the user chose some.
    if (a.preset.empty() && !s.cfg.get("params", "preset")) {
        s.cfg.set("params", "preset", implied);
        s.params = am2::params_from_config(s.cfg);
    }
    if (a.r) pl.r = *a.r;
    if (a.s2in) pl.S2in = *a.s2in;
    if (a.D) pl.D = *a.D;
    if (!a.grid.empty()) {
        if (a.grid.size() != 2) throw am2::ConfigError("--grid takes NX NY");
        pl.nx = a.grid[0];
        pl.ny = a.grid[1];
    }
    pl.validate();
    const auto m = am2::make_model(s.params);
    am2::ScanOptions so;
    so.jobs = a.jobs;
    const auto t0 = std::chrono::steady_clock::now();
    const auto scan = am2::scan_plane(m, pl, so);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto legend = am2::make_legend(m, scan);
    std::vector<am2::GammaCurve> gammas;
    for (int id = 0; id <= 15; ++id)
        if (auto g = am2::gamma_sample(m, id, pl); !g.empty()) gammas.push_back(std::move(g));

    const auto dir = out_dir(a);
    {
        auto os = open_out(dir / "grid.tsv");
        am2::write_grid_tsv(os, scan);
    }
    {
        auto os = open_out(dir / "legend.tsv");
        am2::write_legend_tsv(os, pl, legend);
    }
    {
        auto os = open_out(dir / "gammas.tsv");
        am2::write_gammas_tsv(os, pl, gammas);
    }
    std::printf("distinct regions: %d\n", scan.distinct_signatures);
    if (auto pp = a.plane.empty() ? std::nullopt : am2::plane_preset(a.plane))
        std::printf("expected for %s: %d\n", pp->name.c_str(), pp->expected_regions);
    for (const auto& l : legend)
        std::printf("  %-15s %-5s %-9s %-10s cells=%d%s\n", l.signature.c_str(),
                    l.J >= 0 ? ("J" + std::to_string(l.J)).c_str() : "-", l.status.c_str(), l.color.c_str(), l.cells,
                    l.refined ? " (refined)" : "");
    if (scan.disagreements) std::printf("analytic/numeric disagreements: %d\n", scan.disagreements);
    std::fprintf(stderr, "scan %dx%d in %.1fs\n", pl.nx, pl.ny, secs);
    return 0;
}

int cmd_simulate(const Args& a) {
    const auto s = load(a);
    const auto m = am2::make_model(s.params);
    const auto op = point_of(a, s);
    am2::FullState ic{};
    if (a.ic.empty()) {
        auto rng = am2::sample_stream(a.seed, 0);
        ic = am2::reconstruct_full_state(m, op, am2::sample_reduced_set(m, op, rng));
    } else if (a.ic.size() == 4) {
        ic = am2::reconstruct_full_state(m, op, {a.ic[0], a.ic[1], a.ic[2], a.ic[3]});
    } else if (a.ic.size() == 8) {
        std::copy(a.ic.begin(), a.ic.end(), ic.begin());
    } else {
        throw am2::ConfigError("--ic takes 4 reduced or 8 full components");
    }
    const auto opt = integrator_of(a);
    const auto tr = am2::simulate_full(m, op, ic, opt);
    {
        auto os = open_out(out_dir(a) / "trajectory.tsv");
        am2::write_trajectory_tsv(os, m, op, tr);
    }
    if (tr.event != am2::TerminalEvent::Converged) {
        std::printf("no convergence by t=%s (%ld steps)\n", am2::fmt9(tr.t_end).c_str(), tr.accepted);
        return kExitNoConvergence;
    }
    const auto states = am2::enumerate_steady_states(m, op);
    const int k = am2::match_steady_state(states, am2::project_reduced(tr.final));
    if (tr.accepted == 0) std::printf("converged at t=0\n");
    else std::printf("converged at t=%s after %ld steps\n", am2::fmt9(tr.t_end).c_str(), tr.accepted);
    std::printf("steady state: %s\n", k >= 0 ? am2::state_key(states[static_cast<std::size_t>(k)]).c_str() : "unmatched");
    return 0;
}

int cmd_basins(const Args& a) {
    const auto s = load(a);
    const auto m = am2::make_model(s.params);
    const auto op = point_of(a, s);
    am2::BasinOptions bo;
    bo.integrator = integrator_of(a);
    bo.jobs = a.jobs;
    const auto rep = am2::basin_sample(m, op, a.n, a.seed, bo);
    {
        auto os = open_out(out_dir(a) / "basins.json");
        os << am2::basin_report_json(op, rep).dump(2) << '\n';
    }
    std::printf("seed %llu, n %d\n", static_cast<unsigned long long>(rep.seed), rep.n);
    for (const auto& [k, v] : rep.counts) std::printf("  %-10s %d\n", k.c_str(), v);
    if (rep.unmatched) std::printf("  unmatched  %d\n", rep.unmatched);
    if (rep.unconverged) std::printf("  max-time   %d\n", rep.unconverged);
    return rep.unconverged ? kExitNoConvergence : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, stability, operating diagrams and simulation of the AM2 model in two chemostats in series"};
    app.require_subcommand(1);
    Args a;

    auto common = [&](CLI::App* c, bool point) {
        c->add_option("--preset", a.preset, "kinetic parameter preset (file in the preset directory or built-in)");
        c->add_option("--params", a.params_file, "config file with [params], [point], [plane] sections")
            ->check(CLI::ExistingFile);
        c->add_option("--r", a.r, "volume fraction of the first tank");
        c->add_option("--D", a.D, "overall dilution rate");
        c->add_option("--s2in", a.s2in, "input S2 concentration");
        if (point) c->add_option("--s1in", a.s1in, "input S1 concentration");
        c->add_option("--tol", a.tol, "relative tolerance");
        c->add_option("--out", a.out, "output directory");
    };
    auto* lambda = app.add_subcommand("lambda", "break-even concentrations and critical rates");
    common(lambda, true);
    auto* ss = app.add_subcommand("steady-states", "all steady states with existence and stability");
    common(ss, true);
    auto* diag = app.add_subcommand("diagram", "classify a parameter plane and write grid, legend and curves");
    common(diag, false);
    diag->add_option("--plane", a.plane, "plane preset: fig3, fig4, fig5, fig6, fig7");
    diag->add_option("--grid", a.grid, "grid size NX NY")->expected(2);
    diag->add_option("--jobs", a.jobs, "worker threads (0 = hardware concurrency)");
    auto* sim = app.add_subcommand("simulate", "integrate the eight-dimensional model");
    common(sim, true);
    sim->add_option("--ic", a.ic, "initial condition: 4 reduced or 8 full components (default: random in M)");
    sim->add_option("--tmax", a.tmax, "final time");
    sim->add_option("--seed", a.seed, "seed for the random initial condition");
    auto* bas = app.add_subcommand("basins", "sample initial conditions and count the attractors reached");
    common(bas, true);
    bas->add_option("--n", a.n, "number of initial conditions")->check(CLI::PositiveNumber);
    bas->add_option("--seed", a.seed, "random seed");
    bas->add_option("--tmax", a.tmax, "final time per trajectory");
    bas->add_option("--jobs", a.jobs, "worker threads (0 = hardware concurrency)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*lambda) return cmd_lambda(a);
        if (*ss) return cmd_steady_states(a);
        if (*diag) return cmd_diagram(a);
        if (*sim) return cmd_simulate(a);
        if (*bas) return cmd_basins(a);
    } catch (const am2::ConfigError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const am2::DomainError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const am2::StiffnessError& e) {
        std::fprintf(stderr, "stiffness: %s\n", e.what());
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return kExitNumeric;
    }
    return kExitUsage;
}
