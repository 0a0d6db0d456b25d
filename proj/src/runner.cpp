#include "magsob/runner.hpp"

#include "magsob/asymptotics.hpp"
#include "magsob/montgomery.hpp"
#include "magsob/partition.hpp"
#include "magsob/solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace magsob::runner {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

constexpr const char* kCrlf = "\r\n";

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
}

json base_report(const config::RunConfig& cfg) {
    json j;
    j["version"] = kVersion;
    j["config"] = config::render_config(cfg);
    return j;
}

DomainPtr domain_from(const config::RunConfig& cfg) {
    if (cfg.domain_shape == "disk")
        return LatticeDomain::disk(cfg.disk_center, cfg.disk_radius, cfg.nx);
    return LatticeDomain::rectangle(cfg.extent[0], cfg.extent[1], cfg.extent[2], cfg.extent[3],
                                    cfg.nx, cfg.ny);
}

lattice::LinkPhases links_from(const config::RunConfig& cfg, const DomainPtr& domain, double h) {
    if (cfg.field) return lattice::build_links(domain, *cfg.field, h);
    return lattice::zero_field_links(domain, h);
}

solver::SolveOptions solve_options(const config::RunConfig& cfg) {
    solver::SolveOptions o;
    o.max_iterations = cfg.max_iterations;
    o.el_tolerance = cfg.el_tolerance;
    o.num_starts = cfg.num_starts;
    o.seed = cfg.seed;
    if (cfg.field) {
        switch (cfg.field->family) {
            case fields::Family::constant_field:
                o.well_center = {0.5 * (cfg.extent[0] + cfg.extent[1]),
                                 0.5 * (cfg.extent[2] + cfg.extent[3])};
                o.well_field = cfg.field->b0;
                break;
            case fields::Family::radial_well:
                o.well_center = cfg.field->x0;
                o.well_field = cfg.field->b0;
                break;
            case fields::Family::radial_vanishing:
                o.well_center = {cfg.field->r0, 0.0}; // a point on the zero circle
                o.well_field = cfg.field->gamma0;
                break;
            default:
                o.well_center = {0.0, 0.0};
                break;
        }
    } else {
        o.well_center = {0.5 * (cfg.extent[0] + cfg.extent[1]),
                         0.5 * (cfg.extent[2] + cfg.extent[3])};
        o.well_field = 1.0;
        o.initial_guess = solver::InitialGuess::random_seeded;
    }
    return o;
}

RunOutcome run_montgomery(const config::RunConfig& cfg, const fs::path& out) {
    auto band = montgomery::minimize_band(cfg.k, cfg.montgomery_half_width, cfg.montgomery_n);

    std::string csv = "alpha,nu1";
    csv += kCrlf;
    for (std::size_t i = 0; i < band.alphas.size(); ++i) {
        csv += format_g17(band.alphas[i]);
        csv += ',';
        csv += format_g17(band.nu1[i]);
        csv += kCrlf;
    }
    std::string csv_name = "montgomery_k" + std::to_string(cfg.k) + ".csv";
    write_text(out / csv_name, csv);

    json j = base_report(cfg);
    j["k"] = band.k;
    j["alpha0"] = band.alpha0;
    j["lambda2"] = band.lambda2;
    j["T"] = band.half_width;
    j["n"] = band.n;
    std::string json_name = "montgomery_k" + std::to_string(cfg.k) + ".json";
    write_text(out / json_name, j.dump(2) + "\n");

    RunOutcome outcome;
    outcome.artifacts = {csv_name, json_name};
    return outcome;
}

RunOutcome run_model(const config::RunConfig& cfg, const fs::path& out) {
    auto report = solver::model_constant(cfg.k, cfg.p, cfg.truncation, cfg.resolution,
                                         solve_options(cfg));
    json j = base_report(cfg);
    j["k"] = cfg.k;
    j["p"] = cfg.p;
    j["lambda"] = report.lambda;
    j["el_residual"] = report.finest.el_residual;
    j["iterations"] = report.finest.iterations;
    j["converged"] = report.finest.converged;
    j["spread"] = report.spread;
    j["truncation_converged"] = report.truncation_converged;
    j["values"] = report.values;
    if (!report.truncation_converged)
        j["warning"] = "truncation spread exceeds 5%";
    std::string name = "model_k" + std::to_string(cfg.k) + ".json";
    write_text(out / name, j.dump(2) + "\n");

    RunOutcome outcome;
    outcome.artifacts = {name};
    if (!cfg.dump_psi.empty()) {
        lattice::save_wavefunction(report.finest.psi, (out / cfg.dump_psi).string());
        outcome.artifacts.push_back(cfg.dump_psi);
    }
    return outcome;
}

RunOutcome run_solve(const config::RunConfig& cfg, const fs::path& out) {
    auto domain = domain_from(cfg);
    auto links = links_from(cfg, domain, cfg.h);
    auto result = solver::minimize_rayleigh(links, cfg.p, solve_options(cfg));

    json j = base_report(cfg);
    j["p"] = cfg.p;
    j["h"] = cfg.h;
    j["lambda"] = result.lambda;
    j["el_residual"] = result.el_residual;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["spread"] = result.multistart_spread;
    write_text(out / "solve.json", j.dump(2) + "\n");

    RunOutcome outcome;
    outcome.artifacts = {"solve.json"};
    if (!cfg.dump_psi.empty()) {
        lattice::save_wavefunction(result.psi, (out / cfg.dump_psi).string());
        outcome.artifacts.push_back(cfg.dump_psi);
    }
    if (!result.converged) outcome.message = "solve did not converge (flagged in report)";
    return outcome;
}

RunOutcome run_sweep(const config::RunConfig& cfg, const fs::path& out) {
    asymptotics::SweepConfig sc;
    sc.p = cfg.p;
    sc.hs = cfg.h_list;
    sc.nodes_per_length = cfg.nodes_per_length;
    sc.max_nodes = cfg.max_nodes;
    sc.solve = solve_options(cfg);

    fields::FieldSpec spec = cfg.field ? *cfg.field : fields::FieldSpec::constant(1.0);
    int model_k = (cfg.scenario == "vanishing") ? 1 : 0;
    auto model = solver::model_constant(model_k, cfg.p,
                                        model_k == 0 ? 8.0 : 12.0,
                                        model_k == 0 ? 97 : 145, solve_options(cfg));
    sc.model_lambda = model.lambda;
    sc.with_trial_bound = (cfg.scenario == "well" || cfg.scenario == "constant") && cfg.p >= 2;

    asymptotics::SweepReport report =
        (cfg.scenario == "vanishing")
            ? asymptotics::sweep_vanishing_field(cfg.extent, spec, sc)
            : asymptotics::sweep_constant_field(cfg.extent, spec, sc);

    std::string csv = "h,lambda,exponent_running,tail_lp,tail_inf";
    csv += kCrlf;
    for (const auto& pt : report.points) {
        csv += format_g17(pt.h);
        csv += ',';
        csv += format_g17(pt.lambda);
        csv += ',';
        csv += format_g17(pt.exponent_running);
        csv += ',';
        csv += format_g17(pt.tail_lp);
        csv += ',';
        csv += format_g17(pt.tail_inf);
        csv += kCrlf;
    }
    write_text(out / "sweep.csv", csv);

    json j = base_report(cfg);
    j["scenario"] = cfg.scenario;
    j["p"] = cfg.p;
    j["model_lambda"] = sc.model_lambda;
    j["target_exponent"] = report.target_exponent;
    j["fitted_exponent"] = report.asymptotic_fit.exponent;
    j["fitted_exponent_all"] = report.fit.exponent;
    j["prefactor"] = report.asymptotic_fit.prefactor;
    j["prefactor_ratio"] = report.prefactor_ratio;
    j["r_squared"] = report.fit.r_squared;
    j["decay_rate"] = report.decay_rate;
    j["pass"] = report.pass;
    json pts = json::array();
    bool tainted = false;
    for (const auto& pt : report.points) {
        json q;
        q["h"] = pt.h;
        q["lambda"] = pt.lambda;
        q["converged"] = pt.converged;
        q["el_residual"] = pt.el_residual;
        q["grid_n"] = pt.grid_n;
        if (pt.trial_bound > 0) q["trial_upper_bound"] = pt.trial_bound;
        if (!pt.converged) tainted = true;
        pts.push_back(std::move(q));
    }
    j["points"] = std::move(pts);
    if (tainted) j["warning"] = "unconverged samples excluded from the fit";
    write_text(out / "sweep.json", j.dump(2) + "\n");

    RunOutcome outcome;
    outcome.artifacts = {"sweep.csv", "sweep.json"};
    return outcome;
}

RunOutcome run_partition_test(const config::RunConfig& cfg, const fs::path& out) {
    const double alpha = cfg.alpha, rho = cfg.rho;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    json j = base_report(cfg);
    std::string table;
    auto row = [&table](const std::string& name, bool pass, const std::string& detail) {
        table += (pass ? "[PASS] " : "[FAIL] ") + name + ": " + detail + "\n";
    };
    bool all_pass = true;

    // partition of unity and support exactness at the configured h
    partition::PartitionSpec ps;
    ps.alpha = alpha;
    ps.rho = rho;
    ps.h = cfg.h;
    partition::Partition part(ps);
    double max_dev = 0.0;
    bool support_ok = true;
    for (int i = 0; i < 1000; ++i) {
        Vec2 x{4.0 * unif(rng), 4.0 * unif(rng)};
        max_dev = std::max(max_dev, std::abs(part.sum_of_squares(x) - 1.0));
        for (const auto& c : part.eval(x)) {
            Vec2 center = part.cell_center(c.cell);
            double d = std::max(std::abs(x[0] - center[0]), std::abs(x[1] - center[1]));
            if (c.chi != 0.0 && d >= part.support_half_width()) support_ok = false;
        }
    }
    bool pu_ok = max_dev <= 1e-12;
    all_pass &= pu_ok && support_ok;
    row("sum of squares = 1", pu_ok, "max deviation " + format_g17(max_dev));
    row("support exactness", support_ok, "chi = 0 outside the stated box");
    j["sum_sq_max_deviation"] = max_dev;

    // gradient budget: D measured at h = 1, reused across h
    auto measure_d = [&](double h) {
        partition::PartitionSpec q;
        q.alpha = alpha;
        q.rho = rho;
        q.h = h;
        partition::Partition p2(q);
        double d = 0.0;
        std::mt19937_64 local(cfg.seed + 17);
        std::uniform_real_distribution<double> u2(-2.0, 2.0);
        double scale = std::pow(h, 2.0 * alpha);
        for (int i = 0; i < 2000; ++i) {
            Vec2 x{u2(local) * p2.period(), u2(local) * p2.period()};
            d = std::max(d, p2.sum_of_grad_squares(x) * scale);
        }
        return d;
    };
    double d_ref = measure_d(1.0);
    double d_worst = 0.0;
    for (double h : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001})
        d_worst = std::max(d_worst, measure_d(h));
    bool d_ok = d_worst <= 1.05 * d_ref; // h-uniform within sampling slack
    all_pass &= d_ok;
    row("gradient budget h-uniform", d_ok,
        "D(h=1) = " + format_g17(d_ref) + ", worst over h = " + format_g17(d_worst));
    j["D"] = d_ref;
    j["D_worst"] = d_worst;

    // translation bound on a random localized density
    auto domain = LatticeDomain::square(4.0, 129);
    ScalarField f(domain);
    for (int bump = 0; bump < 5; ++bump) {
        double cx = 3.0 * unif(rng), cy = 3.0 * unif(rng);
        double s = 0.3 + 0.3 * std::abs(unif(rng));
        for (int iy = 0; iy < domain->ny; ++iy)
            for (int ix = 0; ix < domain->nx; ++ix) {
                Vec2 xp = domain->point(ix, iy);
                double dx = xp[0] - cx, dy = xp[1] - cy;
                f.at(ix, iy) += std::exp(-(dx * dx + dy * dy) / (2 * s * s));
            }
    }
    double r = 1.0, delta = 0.05;
    auto [tau, fraction] = partition::select_translation(r, delta, f);
    double bound = 3.0 * delta / (r + 2.0 * delta);
    bool tr_ok = fraction <= bound;
    all_pass &= tr_ok;
    row("translation bound", tr_ok,
        "fraction " + format_g17(fraction) + " <= " + format_g17(bound));
    j["translation_fraction"] = fraction;
    j["translation_bound"] = bound;
    j["tau"] = {tau[0], tau[1]};

    // L^p recovery slacks on a random state
    auto sdom = LatticeDomain::square(1.0, 65);
    WaveFunction psi = solver::random_state(sdom, cfg.seed + 5, cfg.p);
    partition::PartitionSpec ps2 = ps;
    ps2.extent = {-1.0, 1.0, -1.0, 1.0};
    partition::Partition part2(ps2);
    auto slacks = partition::lp_recovery_check(part2, psi, std::max(cfg.p, 2.0));
    bool slack_ok = slacks.lower >= -1e-12 && slacks.upper >= -1e-12;
    all_pass &= slack_ok;
    row("Lp recovery slacks", slack_ok,
        "lower " + format_g17(slacks.lower) + ", upper " + format_g17(slacks.upper) +
            ", empirical C' = " + format_g17(slacks.empirical_c));
    j["slack_lower"] = slacks.lower;
    j["slack_upper"] = slacks.upper;
    j["empirical_C"] = slacks.empirical_c;

    // IMS identity on a smooth state
    auto idom = LatticeDomain::square(1.0, 129);
    auto links = lattice::zero_field_links(idom, cfg.h);
    WaveFunction smooth(idom);
    for (std::size_t i = 0; i < smooth.values.size(); ++i) {
        auto [ix, iy] = idom->nodes[i];
        Vec2 x = idom->point(ix, iy);
        smooth.values[i] = std::cos(0.5 * M_PI * x[0]) * std::cos(0.5 * M_PI * x[1]);
    }
    partition::PartitionSpec ps3 = ps;
    ps3.extent = {-1.0, 1.0, -1.0, 1.0};
    auto parts = partition::ims_decompose(partition::Partition(ps3), links, smooth);
    double q = lattice::quadratic_form(links, smooth);
    double ims_err = std::abs(parts.localized_sum - parts.gradient_penalty - q) / q;
    bool ims_ok = ims_err <= 0.01;
    all_pass &= ims_ok;
    row("IMS identity", ims_ok, "relative defect " + format_g17(ims_err));
    j["ims_relative_defect"] = ims_err;

    j["pass"] = all_pass;
    write_text(out / "partition_test.json", j.dump(2) + "\n");
    write_text(out / "partition_test.txt", table);
    std::fputs(table.c_str(), stdout);

    RunOutcome outcome;
    outcome.artifacts = {"partition_test.json", "partition_test.txt"};
    if (!all_pass) {
        outcome.exit_code = 1;
        outcome.message = "partition invariant suite failed";
    }
    return outcome;
}

RunOutcome run_localize(const config::RunConfig& cfg, const fs::path& out) {
    auto domain = domain_from(cfg);
    auto links = links_from(cfg, domain, cfg.h);
    auto opts = solve_options(cfg);
    auto result = solver::minimize_rayleigh(links, cfg.p, opts);

    Vec2 x0 = opts.well_center;
    double dist = std::min(std::min(x0[0] - cfg.extent[0], cfg.extent[1] - x0[0]),
                           std::min(x0[1] - cfg.extent[2], cfg.extent[3] - x0[1]));
    std::vector<double> radii;
    for (int i = 0; i <= 16; ++i) radii.push_back(dist * i / 16.0);
    auto prof = asymptotics::localization_profile(result, x0, radii, cfg.p);
    prof.h = cfg.h;

    std::string csv = "radius,tail_lp,tail_inf";
    csv += kCrlf;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        csv += format_g17(prof.radii[i]);
        csv += ',';
        csv += format_g17(prof.tail_lp[i]);
        csv += ',';
        csv += format_g17(prof.tail_inf[i]);
        csv += kCrlf;
    }
    write_text(out / "localize.csv", csv);

    json j = base_report(cfg);
    j["p"] = cfg.p;
    j["h"] = cfg.h;
    j["lambda"] = result.lambda;
    j["converged"] = result.converged;
    j["center"] = {x0[0], x0[1]};
    j["radii"] = prof.radii;
    j["tail_lp"] = prof.tail_lp;
    j["tail_inf"] = prof.tail_inf;
    write_text(out / "localize.json", j.dump(2) + "\n");

    RunOutcome outcome;
    outcome.artifacts = {"localize.csv", "localize.json"};
    return outcome;
}

} // namespace

RunOutcome run(const config::RunConfig& cfg) {
    fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);

    try {
        if (cfg.subcommand == "montgomery") return run_montgomery(cfg, out);
        if (cfg.subcommand == "model") return run_model(cfg, out);
        if (cfg.subcommand == "solve") return run_solve(cfg, out);
        if (cfg.subcommand == "sweep") return run_sweep(cfg, out);
        if (cfg.subcommand == "partition-test") return run_partition_test(cfg, out);
        if (cfg.subcommand == "localize") return run_localize(cfg, out);
    } catch (const std::exception& e) {
        // numerical failures are serialized into the report
        json j = base_report(cfg);
        j["error"] = e.what();
        write_text(out / "error.json", j.dump(2) + "\n");
        RunOutcome outcome;
        outcome.exit_code = 1;
        outcome.message = e.what();
        outcome.artifacts = {"error.json"};
        return outcome;
    }
    RunOutcome outcome;
    outcome.exit_code = 2;
    outcome.message = "unknown subcommand " + cfg.subcommand;
    return outcome;
}

} // namespace magsob::runner
