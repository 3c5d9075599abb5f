#include "fprna/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "fprna/csv.hpp"
#include "fprna/cv_sweep.hpp"
#include "fprna/distributions.hpp"
#include "fprna/errors.hpp"
#include "fprna/fp_solver.hpp"
#include "fprna/inequality_checks.hpp"
#include "fprna/quadrature.hpp"
#include "fprna/sde.hpp"

namespace fprna {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-') key.erase(0, 1);
        if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

// Strips --config and appends file entries that the command line does not
// already set.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    std::optional<std::string> config;
    for (std::size_t k = 0; k < args.size(); ++k) {
        const std::string& a = args[k];
        if (a == "--config") {
            if (k + 1 >= args.size()) throw UsageError("--config needs a path");
            config = args[++k];
        } else if (a.rfind("--config=", 0) == 0) {
            config = a.substr(9);
        } else {
            kept.push_back(a);
        }
    }
    if (!config) return kept;
    std::set<std::string> explicit_flags;
    for (const auto& a : kept) {
        if (a.rfind("--", 0) == 0) explicit_flags.insert(a.substr(2, a.find('=') - 2));
    }
    for (const auto& [key, value] : read_config(*config)) {
        if (explicit_flags.count(key)) continue;
        kept.push_back("--" + key);
        kept.push_back(value);
    }
    return kept;
}

DimensionlessParams law_params(const std::string& law_name, const CLI::Option* delta_opt,
                               double delta, const CLI::Option* eta_opt, double eta,
                               double gamma, double p, double kappa = 1.0, double nu = 1.0) {
    const NoiseLaw law = parse_noise_law(law_name.c_str());
    if (law == NoiseLaw::Quadratic) {
        if (eta_opt->count() > 0) throw UsageError("--eta applies to the linear law only");
        return DimensionlessParams::quadratic(delta, gamma, p, kappa, nu);
    }
    if (delta_opt->count() > 0) throw UsageError("--delta applies to the quadratic law only");
    return DimensionlessParams::linear(eta, gamma, p, kappa, nu);
}

void warn_tails(std::ostream& err, const DimensionlessParams& dp, const Grid2D& grid) {
    const double tr = std::pow(grid.r_max(), -dp.delta());
    const double tm = std::pow(grid.mu_max(), -dp.delta() * dp.kappa() / dp.nu());
    if (tr > 1e-8) {
        err << "warning: r_max^-delta = " << tr << " > 1e-8, truncation may bias the tails\n";
    }
    if (tm > 1e-8) {
        err << "warning: mu_max^-(delta kappa/nu) = " << tm
            << " > 1e-8, truncation may bias the tails\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stationary distributions of an mRNA/microRNA Fokker-Planck model", "fprna"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = auto)");

    // analytic
    auto* an = app.add_subcommand("analytic", "sample rho0 and the fast density on a grid");
    std::string an_law = "quadratic";
    double an_delta = 8, an_eta = 1, an_gamma = 1, an_p = 0.5, an_rmax = 5, an_tol = 1e-10;
    int an_n = 500;
    std::string an_out;
    an->add_option("--law", an_law)->check(CLI::IsMember({"quadratic", "linear"}));
    auto* an_delta_opt = an->add_option("--delta", an_delta);
    auto* an_eta_opt = an->add_option("--eta", an_eta);
    an->add_option("--gamma", an_gamma);
    an->add_option("--p", an_p);
    an->add_option("--r-max", an_rmax);
    an->add_option("--n", an_n);
    an->add_option("--tol", an_tol);
    an->add_option("--out", an_out)->required();

    // cv-sweep
    auto* sw = app.add_subcommand("cv-sweep", "relative CV over a (gamma, p) grid");
    std::string sw_law = "quadratic";
    double sw_delta = 2, sw_eta = 1;
    SweepSpec spec;
    std::string sw_out;
    sw->add_option("--law", sw_law)->check(CLI::IsMember({"quadratic", "linear"}));
    auto* sw_delta_opt = sw->add_option("--delta", sw_delta);
    auto* sw_eta_opt = sw->add_option("--eta", sw_eta);
    sw->add_option("--gamma-min", spec.gamma_min);
    sw->add_option("--gamma-max", spec.gamma_max);
    sw->add_option("--p-min", spec.p_min);
    sw->add_option("--p-max", spec.p_max);
    sw->add_option("--n-gamma", spec.n_gamma);
    sw->add_option("--n-p", spec.n_p);
    sw->add_option("--tol", spec.tol, "0 = 1e-8 for p <= 1, 1e-4 otherwise");
    sw->add_option("--out", sw_out)->required();

    // solve
    auto* so = app.add_subcommand("solve", "finite-volume steady state");
    double so_delta = 8, so_gamma = 1, so_p = 1, so_kappa = 1, so_nu = 1;
    double so_rmin = 0.06, so_rmax = 5, so_mmin = 0.05, so_mmax = 5;
    int so_nr = 70, so_nmu = 200;
    std::string so_field, so_marginal, so_summary;
    so->add_option("--delta", so_delta);
    so->add_option("--gamma", so_gamma);
    so->add_option("--p", so_p);
    so->add_option("--kappa", so_kappa);
    so->add_option("--nu", so_nu);
    so->add_option("--r-min", so_rmin);
    so->add_option("--r-max", so_rmax);
    so->add_option("--mu-min", so_mmin);
    so->add_option("--mu-max", so_mmax);
    so->add_option("--nr", so_nr);
    so->add_option("--nmu", so_nmu);
    so->add_option("--field", so_field);
    so->add_option("--marginal", so_marginal);
    so->add_option("--summary", so_summary);

    // mc
    auto* mc = app.add_subcommand("mc", "Monte-Carlo stationary histogram of r");
    std::string mc_law = "quadratic";
    double c_r = 8, c_mu = 1, c = 0, k_r = 8, k_mu = 1, s_r = 1, s_mu = 1;
    double dt = 0, t_end = 0, burn = 0.5, lo = 0, hi = 5;
    int paths = 1000, thin = 10, bins = 50;
    std::uint64_t seed = 42;
    std::string mc_out;
    mc->add_option("--law", mc_law)->check(CLI::IsMember({"quadratic", "linear"}));
    mc->add_option("--c-r", c_r);
    mc->add_option("--c-mu", c_mu);
    mc->add_option("--c", c);
    mc->add_option("--k-r", k_r);
    mc->add_option("--k-mu", k_mu);
    mc->add_option("--sigma-r", s_r);
    mc->add_option("--sigma-mu", s_mu);
    mc->add_option("--dt", dt, "0 = 1e-3/k_r");
    mc->add_option("--t-end", t_end, "0 = 50/k_r");
    mc->add_option("--burn-in", burn);
    mc->add_option("--paths", paths);
    mc->add_option("--thin", thin);
    mc->add_option("--seed", seed);
    mc->add_option("--bins", bins);
    mc->add_option("--lo", lo);
    mc->add_option("--hi", hi);
    mc->add_option("--out", mc_out)->required();

    // check
    auto* ck = app.add_subcommand("check", "numerical verification of the inequalities");
    std::string suite = "all";
    std::string ck_out;
    ck->add_option("--suite", suite)->check(
        CLI::IsMember({"all", "poincare", "lyapunov", "cv-bound"}));
    ck->add_option("--out", ck_out, "also write the report here");

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (an->parsed()) {
            const auto dp = law_params(an_law, an_delta_opt, an_delta, an_eta_opt, an_eta,
                                       an_gamma, an_p);
            if (an_n < 2 || !(an_rmax > 0.0)) throw UsageError("--n >= 2 and --r-max > 0 needed");
            const double log_c = log_normalizer_rhofast(dp, an_tol);
            std::vector<std::vector<double>> rows;
            rows.reserve(an_n);
            for (int i = 1; i <= an_n; ++i) {
                const double r = an_rmax * i / an_n;
                rows.push_back({r, rho0(dp, r), std::exp(log_rhofast_unnormalized(dp, r) + log_c)});
            }
            write_csv(an_out, {"r", "rho0", "rhofast"}, rows);
        } else if (sw->parsed()) {
            const auto base = law_params(sw_law, sw_delta_opt, sw_delta, sw_eta_opt, sw_eta, 0, 0);
            spec.law = base.law();
            spec.strength = base.noise_strength();
            spec.threads = threads;
            const SweepResult res = sweep(spec);
            std::vector<std::vector<double>> rows;
            rows.reserve(res.relative_cv.size());
            for (std::size_t ig = 0; ig < res.gammas.size(); ++ig) {
                for (std::size_t ip = 0; ip < res.ps.size(); ++ip) {
                    rows.push_back({res.gammas[ig], res.ps[ip], res.at(ig, ip)});
                }
            }
            write_csv(sw_out, {"gamma", "p", "relative_cv"}, rows);
            if (res.failures > 0) {
                err << "warning: " << res.failures << " cells did not converge (written as nan)\n";
            }
        } else if (so->parsed()) {
            const auto dp = DimensionlessParams::quadratic(so_delta, so_gamma, so_p, so_kappa, so_nu);
            const Grid2D grid(so_rmin, so_rmax, so_mmin, so_mmax, so_nr, so_nmu);
            warn_tails(err, dp, grid);
            SolveInfo info;
            const Field2D field = solve_steady(dp, grid, &info);
            const Density1D rho = marginal_r(field);
            const double cv_solver = discrete_cv(rho);
            const double cv0 = cv_rho0(dp);
            const double cvf = cv_rhofast(dp, default_tolerance(dp.p()));
            if (!so_field.empty()) {
                std::vector<std::vector<double>> rows;
                rows.reserve(grid.cells());
                for (int i = 0; i < grid.n_r(); ++i) {
                    for (int j = 0; j < grid.n_mu(); ++j) {
                        rows.push_back({grid.r(i), grid.mu(j), field.at(i, j)});
                    }
                }
                write_csv(so_field, {"r", "mu", "f"}, rows);
            }
            if (!so_marginal.empty()) {
                const auto ref0 = window_density(rho.grid, [&](double r) {
                    return log_rho0_shape(dp, r);
                });
                const auto reff = window_density(rho.grid, [&](double r) {
                    return log_rhofast_unnormalized(dp, r);
                });
                std::vector<std::vector<double>> rows;
                for (std::size_t i = 0; i < rho.grid.size(); ++i) {
                    rows.push_back({rho.grid[i], rho.values[i], ref0.values[i], reff.values[i]});
                }
                write_csv(so_marginal, {"r", "rho", "rho0", "rhofast"}, rows);
            }
            if (!so_summary.empty()) {
                write_summary_csv(so_summary, {{"delta", so_delta},
                                               {"gamma", so_gamma},
                                               {"p", so_p},
                                               {"kappa", so_kappa},
                                               {"nu", so_nu},
                                               {"cv_solver", cv_solver},
                                               {"cv_rho0", cv0},
                                               {"cv_rhofast", cvf},
                                               {"relative_cv_solver", cv_solver / cv0},
                                               {"mass", field.mass()},
                                               {"residual", info.residual},
                                               {"min_f", info.min_value}});
            }
            out << "cv_solver " << format_number(cv_solver) << "\ncv_rho0 " << format_number(cv0)
                << "\ncv_rhofast " << format_number(cvf) << "\n";
        } else if (mc->parsed()) {
            const ModelParams params(c_r, c_mu, c, k_r, k_mu, s_r, s_mu);
            SimConfig cfg = SimConfig::defaults(params, parse_noise_law(mc_law.c_str()));
            if (dt > 0) cfg.dt = dt;
            if (t_end > 0) cfg.t_end = t_end;
            cfg.burn_in = burn;
            cfg.n_paths = paths;
            cfg.thin = thin;
            cfg.seed = seed;
            cfg.threads = threads;
            const Histogram1D h = stationary_histogram(cfg, bins, lo, hi);
            std::vector<std::vector<double>> rows;
            for (std::size_t k = 0; k < h.masses.size(); ++k) {
                rows.push_back({h.edges[k], h.edges[k + 1], h.masses[k]});
            }
            write_csv(mc_out, {"bin_lo", "bin_hi", "mass"}, rows);
            out << "out_of_range " << format_number(h.out_of_range) << "\n";
        } else if (ck->parsed()) {
            const auto outcomes = run_checks(suite, threads);
            const std::string report = format_report(outcomes);
            out << report;
            if (!ck_out.empty()) write_text_atomic(ck_out, report);
            for (const auto& o : outcomes) {
                if (!o.passed) return kExitNumerical;
            }
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace fprna
