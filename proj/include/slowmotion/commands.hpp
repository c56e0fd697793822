#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "slowmotion/config.hpp"
#include "slowmotion/csv.hpp"
#include "slowmotion/dynamics.hpp"
#include "slowmotion/family.hpp"
#include "slowmotion/spectral.hpp"
#include "slowmotion/stationary.hpp"

namespace slowmotion::commands {

namespace fs = std::filesystem;

inline fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) fail(ErrorKind::Config, "key 'output_dir': cannot create " + dir);
    return p;
}

inline std::vector<double> family_lattice(const RunConfig& c) {
    if (!c.xi_list.empty()) return c.xi_list;
    std::vector<double> xs;
    for (std::size_t j = 1; j <= c.xi_count; ++j)
        xs.push_back(c.ell * static_cast<double>(j) / static_cast<double>(c.xi_count + 1));
    return xs;
}

/// steady_<branch>.csv with x,u per branch plus steady_summary.csv.
inline void steady(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    const Grid grid = c.grid();
    const FluxFunction flux = c.flux();
    std::vector<BranchKind> kinds;
    if (c.branch == "all") kinds = {BranchKind::positive, BranchKind::negative, BranchKind::metastable, BranchKind::ns};
    else if (c.branch == "positive") kinds = {BranchKind::positive};
    else if (c.branch == "negative") kinds = {BranchKind::negative};
    else if (c.branch == "metastable") kinds = {BranchKind::metastable};
    else kinds = {BranchKind::ns};

    csv::Writer summary(dir / "steady_summary.csv",
                        {"branch", "eps", "ell", "n", "status", "residual_l1", "zero_crossings", "slope_mismatch"});
    for (BranchKind k : kinds) {
        try {
            const SteadyBranch b = build_branch(k, c.eps, flux, grid);
            csv::Writer w(dir / ("steady_" + to_string(k) + ".csv"), {"x", "u"});
            for (std::size_t i = 0; i < grid.size(); ++i) w.row(grid.x(i), b.field[i]);
            summary.row(to_string(k), c.eps, c.ell, grid.interior(), "ok", b.residual_l1, b.zero_crossings.size(),
                        b.slope_mismatch);
            log << "steady " << to_string(k) << ": residual_l1 " << csv::format(b.residual_l1) << '\n';
        } catch (const Error& e) {
            // With branch=all a branch outside its existence range is reported, not fatal.
            if (c.branch != "all") throw;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            summary.row(to_string(k), c.eps, c.ell, grid.interior(), to_string(e.kind()), nan, 0, nan);
            log << "steady " << to_string(k) << ": " << to_string(e.kind()) << '\n';
        }
    }
}

/// family.csv: residual law, spectral speed and matching points over a xi lattice.
inline void family(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    const Grid grid = c.grid();
    const FluxFunction flux = c.flux();
    csv::Writer w(dir / "family.csv", {"xi", "construction", "omega_big", "omega_small", "theta", "theta_asym",
                                       "asymptotic_ratio", "lambda1", "lambda2", "u1s", "u2s", "u1_asym", "u2_asym"});
    for (double xi : family_lattice(c)) {
        const ApproxSteadyState s =
            c.construction == "tanh" ? approx_state(c.eps, xi, grid) : exact_matched_state(c.eps, xi, flux, grid);
        const SpectralData sd = spectral_data(s, flux, 2);
        const ResidualReport r = residual_report(s, flux, sd);
        const MatchingPoints m = matching_points(c.eps, xi, c.ell);
        w.row(xi, c.construction, r.omega_big, r.omega_small, r.theta, r.theta_asym, r.asymptotic_ratio, sd.lambdas[0],
              sd.lambdas[1], m.u1s, m.u2s, m.u1_asym, m.u2_asym);
    }
    log << "family: " << family_lattice(c).size() << " members\n";
}

/// spectrum.csv, eigenfunctions.csv and h2report.csv.
inline void spectrum(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    const Grid grid = c.grid();
    const FluxFunction flux = c.flux();
    const double xi = c.xi_or_center();
    const double pi = std::acos(-1.0);
    SpectralData sd;
    if (c.state == "zero") {
        sd = eigensolve(assemble(c.eps, Field(grid), flux), c.k_max);
        sd.xi = xi;
    } else {
        sd = spectral_data(approx_state(c.eps, xi, grid), flux, c.k_max);
    }
    csv::Writer w(dir / "spectrum.csv", {"state", "eps", "xi", "k", "lambda", "lambda_zero_state"});
    for (std::size_t k = 1; k <= sd.k_max; ++k) {
        const double kp = static_cast<double>(k) * pi / c.ell;
        w.row(c.state, c.eps, xi, k, sd.lambdas[k - 1], 1.0 - c.eps * kp * kp);
    }
    std::vector<std::string> header{"x"};
    for (std::size_t k = 1; k <= sd.k_max; ++k) header.push_back("phi" + std::to_string(k));
    for (std::size_t k = 1; k <= sd.k_max; ++k) header.push_back("psi" + std::to_string(k));
    csv::Writer ef(dir / "eigenfunctions.csv", header);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::string> row{csv::format(grid.x(i))};
        for (const auto& p : sd.phis) row.push_back(csv::format(p[i]));
        for (const auto& p : sd.psis) row.push_back(csv::format(p[i]));
        ef.line(row);
    }

    const std::vector<double> eps_list = c.eps_list.empty() ? std::vector<double>{c.eps} : c.eps_list;
    const std::vector<double> xi_list =
        c.xi_list.empty() ? std::vector<double>{0.3 * c.ell, 0.5 * c.ell, 0.7 * c.ell} : c.xi_list;
    const H2Report h2 = validate_H2(eps_list, xi_list, flux, grid, c.k_max);
    std::vector<std::string> hh{"eps", "xi"};
    for (std::size_t k = 1; k <= c.k_max; ++k) hh.push_back("lambda" + std::to_string(k));
    for (const char* s : {"gap", "lambda2_sqrt_eps", "normalization_sum", "min_gap", "fitted_C",
                          "max_normalization_sum", "Lambda1", "Lambda2"})
        hh.push_back(s);
    csv::Writer hw(dir / "h2report.csv", hh);
    for (const H2Cell& cell : h2.cells) {
        const std::size_t e = static_cast<std::size_t>(
            std::find(eps_list.begin(), eps_list.end(), cell.eps) - eps_list.begin());
        std::vector<std::string> row{csv::format(cell.eps), csv::format(cell.xi)};
        for (double l : cell.lambdas) row.push_back(csv::format(l));
        for (double v : {cell.gap, cell.lambdas[1] * std::sqrt(cell.eps), cell.normalization_sum, h2.min_gap,
                         h2.fitted_C, h2.max_normalization_sum, h2.Lambda1[e], h2.Lambda2[e]})
            row.push_back(csv::format(v));
        hw.line(row);
    }
    log << "spectrum: lambda1 " << csv::format(sd.lambdas[0]) << ", lambda2 " << csv::format(sd.lambdas[1]) << '\n';
}

inline void write_trajectory(const fs::path& path, const Trajectory& tr) {
    std::vector<std::string> header{"t", "xi_zero", "xi_proj", "u_l2", "v_l2", "v_h1", "projection_residual"};
    for (std::size_t k = 1; k <= tr.k_max; ++k) header.push_back("v" + std::to_string(k));
    csv::Writer w(path, header);
    for (std::size_t j = 0; j < tr.times.size(); ++j) {
        std::vector<std::string> row;
        for (double v : {tr.times[j], tr.xi_zero[j], tr.xi_proj[j], tr.u_l2[j], tr.v_l2[j], tr.v_h1[j],
                         tr.projection_residual[j]})
            row.push_back(csv::format(v));
        for (double m : tr.modal[j]) row.push_back(csv::format(m));
        w.line(row);
    }
}

/// Last finite interface position of a trajectory.
inline double final_xi(const Trajectory& tr) {
    for (std::size_t j = tr.times.size(); j-- > 0;)
        if (std::isfinite(tr.xi(j))) return tr.xi(j);
    return std::numeric_limits<double>::quiet_NaN();
}

struct EvolveResult {
    Trajectory trajectory;
    std::optional<double> exit;
    double xi_final;
    BranchKind attractor;
    double attractor_distance;
};

inline EvolveResult run_evolve(const RunConfig& c, double eps, double a0, const std::vector<double>& snapshot_times) {
    const Grid grid = c.grid();
    const FluxFunction flux = c.flux();
    const InitialDatum d = c.datum(a0);
    const Field u0 = make_initial(d, grid);
    std::optional<SpectralProvider> provider;
    if (c.track) provider.emplace(eps, flux, grid, c.k_max);
    EvolveOptions opt;
    opt.record_stride = c.stride;
    opt.snapshot_times = snapshot_times;
    EvolveResult r;
    r.trajectory = evolve(u0, c.T, c.dt.value_or(0.0), eps, flux, provider ? &*provider : nullptr, opt);
    r.exit = exit_time(r.trajectory, c.delta);
    r.xi_final = final_xi(r.trajectory);
    r.attractor = predicted_attractor(d, c.ell);
    r.attractor_distance = std::numeric_limits<double>::quiet_NaN();
    try {
        const SteadyBranch b = build_branch(r.attractor, eps, flux, grid);
        if (!r.trajectory.snapshots.empty() && r.trajectory.snapshots.back().first == r.trajectory.times.back())
            r.attractor_distance = norm_l2(r.trajectory.snapshots.back().second - b.field);
    } catch (const Error&) {
        // No stable branch at this eps; the distance stays nan.
    }
    return r;
}

/// trajectory.csv, snapshots.csv and evolve_summary.csv.
inline void evolve(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    std::vector<double> snaps = c.snapshots;
    snaps.push_back(c.T);
    const EvolveResult r = run_evolve(c, c.eps, c.a0, snaps);
    const Trajectory& tr = r.trajectory;
    write_trajectory(dir / "trajectory.csv", tr);

    std::vector<std::string> sh{"t", "x", "u"};
    if (c.flame) sh.push_back("y");
    csv::Writer sw(dir / "snapshots.csv", sh);
    for (const auto& [t, u] : tr.snapshots) {
        const Field y = flame_front(u);
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (c.flame) sw.row(t, u.grid().x(i), u[i], y[i]);
            else sw.row(t, u.grid().x(i), u[i]);
        }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv::Writer s(dir / "evolve_summary.csv",
                  {"eps", "a0", "dt", "t_form", "exit_time", "delta", "xi_final", "attractor", "attractor_l2_distance"});
    s.row(c.eps, c.a0, tr.dt, tr.t_form.value_or(nan), r.exit.value_or(nan), c.delta, r.xi_final,
          to_string(r.attractor), r.attractor_distance);
    log << "evolve: " << tr.times.size() << " records, final xi " << csv::format(r.xi_final) << '\n';
}

/// reduced.csv with columns t, xi, beta.
inline void reduce(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    const double xi0 = c.xi0.value_or(c.a0);
    const ThetaSource src = c.theta == "spectral" ? ThetaSource::spectral : ThetaSource::asymptotic;
    std::optional<SpectralProvider> provider;
    if (src == ThetaSource::spectral) provider.emplace(c.eps, c.flux(), c.grid(), 1);
    ReducedOptions opt;
    opt.output_stride = c.stride;
    const ReducedSolution sol = reduced_ode(xi0, c.T, c.eps, c.ell, src, provider ? &*provider : nullptr, opt);
    csv::Writer w(dir / "reduced.csv", {"t", "xi", "beta"});
    for (std::size_t j = 0; j < sol.times.size(); ++j) w.row(sol.times[j], sol.xi[j], sol.beta);
    log << "reduce: beta " << csv::format(sol.beta) << '\n';
}

inline std::size_t sweep_threads(std::size_t cells) {
    std::size_t t = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SLOWMOTION_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) t = std::min<std::size_t>(t, static_cast<std::size_t>(v));
    }
    return std::min(t, std::max<std::size_t>(cells, 1));
}

struct SweepCell {
    double eps, xi, a0;
};

/// One directory per (eps, xi, a0) cell and summary.csv in cell order.
inline void sweep(const RunConfig& c, std::ostream& log) {
    const fs::path dir = prepare_dir(c.output_dir);
    const std::vector<double> es = c.eps_list.empty() ? std::vector<double>{c.eps} : c.eps_list;
    const std::vector<double> xs = c.xi_list.empty() ? std::vector<double>{c.xi_or_center()} : c.xi_list;
    const std::vector<double> as = c.a0_list.empty() ? std::vector<double>{c.a0} : c.a0_list;
    std::vector<SweepCell> cells;
    for (double e : es)
        for (double x : xs)
            for (double a : as) cells.push_back({e, x, a});

    const double nan = std::numeric_limits<double>::quiet_NaN();
    struct Row {
        std::string status = "pending";
        double omega = 0, theta = 0, theta_asym = 0, l1 = 0, l2 = 0, t_form = 0, exit = 0, xi_final = 0;
    };
    std::vector<Row> rows(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const SweepCell& cell = cells[i];
            Row& r = rows[i];
            r = Row{};
            for (double* p : {&r.omega, &r.theta, &r.theta_asym, &r.l1, &r.l2, &r.t_form, &r.exit, &r.xi_final})
                *p = nan;
            try {
                char name[32];
                std::snprintf(name, sizeof name, "cell_%04zu", i);
                const fs::path cd = dir / name;
                fs::create_directories(cd);
                RunConfig cc = c;
                cc.eps = cell.eps;
                cc.a0 = cell.a0;
                cc.xi = cell.xi;
                const FluxFunction flux = cc.flux();
                const ApproxSteadyState s = approx_state(cell.eps, cell.xi, cc.grid());
                const SpectralData sd = spectral_data(s, flux, 2);
                const ResidualReport rep = residual_report(s, flux, sd);
                r.omega = rep.omega_big;
                r.theta = rep.theta;
                r.theta_asym = rep.theta_asym;
                r.l1 = sd.lambdas[0];
                r.l2 = sd.lambdas[1];
                const EvolveResult ev = run_evolve(cc, cell.eps, cell.a0, {});
                write_trajectory(cd / "trajectory.csv", ev.trajectory);
                r.t_form = ev.trajectory.t_form.value_or(nan);
                r.exit = ev.exit.value_or(nan);
                r.xi_final = ev.xi_final;
                r.status = "ok";
            } catch (const Error& e) {
                r.status = to_string(e.kind());
            } catch (const std::exception&) {
                r.status = "error";
            }
        }
    };
    const std::size_t nt = sweep_threads(cells.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    csv::Writer w(dir / "summary.csv", {"cell", "eps", "xi", "a0", "status", "omega_big", "theta", "theta_asym",
                                        "lambda1", "lambda2", "t_form", "exit_time", "xi_final"});
    std::size_t failed = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const Row& r = rows[i];
        if (r.status != "ok") ++failed;
        w.row(i, cells[i].eps, cells[i].xi, cells[i].a0, r.status, r.omega, r.theta, r.theta_asym, r.l1, r.l2,
              r.t_form, r.exit, r.xi_final);
    }
    log << "sweep: " << cells.size() << " cells on " << nt << " threads, " << failed << " failed\n";
}

}  // namespace slowmotion::commands
