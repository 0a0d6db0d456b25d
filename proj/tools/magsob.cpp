// magsob: optimal magnetic Sobolev constants on a lattice.
//
// Subcommands: montgomery, model, solve, sweep, partition-test, localize.
// Every run is driven by a validated flat config; command-line flags
// override individual keys.

#include "magsob/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::string threads;
};

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CLI::ValidationError("--config", "cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Overrides appended after the file contents win, since the parser applies
// assignments in order.
class ConfigBuilder {
public:
    void base(const std::string& text) { base_ = text; }
    void set(const std::string& section, const std::string& key, const std::string& value) {
        overrides_ += "[" + section + "]\n" + key + " = " + value + "\n";
    }
    std::string text() const { return base_ + "\n" + overrides_; }

private:
    std::string base_, overrides_;
};

int execute(const ConfigBuilder& builder) {
    auto outcome = magsob::config::parse_config(builder.text());
    if (!outcome.config) {
        std::fprintf(stderr, "configuration errors:\n");
        for (const auto& e : outcome.errors) std::fprintf(stderr, "  - %s\n", e.c_str());
        return 2;
    }
    auto result = magsob::runner::run(*outcome.config);
    if (!result.message.empty())
        std::fprintf(result.exit_code == 0 ? stdout : stderr, "%s\n", result.message.c_str());
    for (const auto& a : result.artifacts)
        std::printf("wrote %s/%s\n", outcome.config->out_dir.c_str(), a.c_str());
    return result.exit_code;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value config file");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--threads", args.threads, "worker threads (default 1)");
}

void apply_common(ConfigBuilder& b, const CommonArgs& args, const std::string& subcommand) {
    if (!args.config_path.empty()) b.base(read_file(args.config_path));
    b.set("run", "subcommand", subcommand);
    if (!args.seed.empty()) b.set("run", "seed", args.seed);
    if (!args.out_dir.empty()) b.set("run", "out", args.out_dir);
    if (!args.threads.empty()) b.set("run", "threads", args.threads);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal magnetic Sobolev constants: lattice solvers and semiclassical sweeps"};
    app.require_subcommand(1);

    // montgomery
    auto* mont = app.add_subcommand("montgomery", "1D reduced band function and its minimum");
    CommonArgs mont_common;
    add_common(mont, mont_common);
    std::string mont_k, mont_t, mont_n;
    mont->add_option("--k", mont_k, "field vanishing order k >= 0")->required();
    mont->add_option("--t", mont_t, "half width of the 1D interval");
    mont->add_option("--n", mont_n, "interior grid points");

    // model
    auto* model = app.add_subcommand("model", "whole-plane model constant lambda^[k](p)");
    CommonArgs model_common;
    add_common(model, model_common);
    std::string model_k, model_p, model_trunc, model_res, model_dump;
    model->add_option("--k", model_k, "field vanishing order k >= 0")->required();
    model->add_option("--p", model_p, "Lebesgue exponent p >= 2")->required();
    model->add_option("--truncation", model_trunc, "base truncation T");
    model->add_option("--resolution", model_res, "base nodes per side");
    model->add_option("--dump-psi", model_dump, "write the minimizer in the lattice binary format");

    // solve
    auto* solve = app.add_subcommand("solve", "single constrained minimization on a domain");
    CommonArgs solve_common;
    add_common(solve, solve_common);
    std::string solve_p, solve_h, solve_field, solve_b0, solve_gamma0, solve_r0, solve_k;
    std::string solve_xmin, solve_xmax, solve_ymin, solve_ymax, solve_nx, solve_ny, solve_dump;
    solve->add_option("--p", solve_p, "Lebesgue exponent p >= 2");
    solve->add_option("--h", solve_h, "semiclassical parameter h > 0");
    solve->add_option("--field", solve_field,
                      "field family (constant_field, power_well, radial_well, radial_vanishing, "
                      "translated_power, none)");
    solve->add_option("--b0", solve_b0, "field strength");
    solve->add_option("--gamma0", solve_gamma0, "normal derivative on the zero circle");
    solve->add_option("--r0", solve_r0, "zero circle radius");
    solve->add_option("--k", solve_k, "power-well order");
    solve->add_option("--xmin", solve_xmin);
    solve->add_option("--xmax", solve_xmax);
    solve->add_option("--ymin", solve_ymin);
    solve->add_option("--ymax", solve_ymax);
    solve->add_option("--nx", solve_nx);
    solve->add_option("--ny", solve_ny);
    solve->add_option("--dump-psi", solve_dump, "write the minimizer in the lattice binary format");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "semiclassical h-sweep with power-law fit");
    CommonArgs sweep_common;
    add_common(sweep, sweep_common);
    std::string sweep_scenario, sweep_p, sweep_hmin, sweep_hmax, sweep_n;
    std::string sweep_b0, sweep_gamma0, sweep_r0;
    std::string sweep_xmin, sweep_xmax, sweep_ymin, sweep_ymax;
    sweep->add_option("--scenario", sweep_scenario, "constant | well | vanishing")->required();
    sweep->add_option("--p", sweep_p, "Lebesgue exponent")->required();
    sweep->add_option("--hmin", sweep_hmin, "smallest h")->required();
    sweep->add_option("--hmax", sweep_hmax, "largest h")->required();
    sweep->add_option("--n", sweep_n, "number of h samples")->required();
    sweep->add_option("--b0", sweep_b0, "field strength (constant/well)");
    sweep->add_option("--gamma0", sweep_gamma0, "normal derivative (vanishing)");
    sweep->add_option("--r0", sweep_r0, "zero circle radius (vanishing)");
    sweep->add_option("--xmin", sweep_xmin);
    sweep->add_option("--xmax", sweep_xmax);
    sweep->add_option("--ymin", sweep_ymin);
    sweep->add_option("--ymax", sweep_ymax);

    // partition-test
    auto* part = app.add_subcommand("partition-test", "partition-of-unity invariant suite");
    CommonArgs part_common;
    add_common(part, part_common);
    std::string part_alpha, part_rho, part_h, part_p;
    part->add_option("--alpha", part_alpha, "transition exponent alpha >= rho")->required();
    part->add_option("--rho", part_rho, "plateau exponent rho > 0")->required();
    part->add_option("--h", part_h, "semiclassical parameter")->required();
    part->add_option("--p", part_p, "Lebesgue exponent for the recovery check");

    // localize
    auto* loc = app.add_subcommand("localize", "tail-mass profile of a minimizer");
    CommonArgs loc_common;
    add_common(loc, loc_common);
    std::string loc_p, loc_h;
    loc->add_option("--p", loc_p, "Lebesgue exponent");
    loc->add_option("--h", loc_h, "semiclassical parameter");

    CLI11_PARSE(app, argc, argv);

    try {
        ConfigBuilder b;
        if (mont->parsed()) {
            apply_common(b, mont_common, "montgomery");
            b.set("scenario", "k", mont_k);
            if (!mont_t.empty()) b.set("scenario", "half_width", mont_t);
            if (!mont_n.empty()) b.set("scenario", "n", mont_n);
        } else if (model->parsed()) {
            apply_common(b, model_common, "model");
            b.set("scenario", "k", model_k);
            b.set("scenario", "p", model_p);
            if (!model_trunc.empty()) b.set("scenario", "truncation", model_trunc);
            if (!model_res.empty()) b.set("scenario", "resolution", model_res);
            if (!model_dump.empty()) b.set("run", "dump_psi", model_dump);
        } else if (solve->parsed()) {
            apply_common(b, solve_common, "solve");
            if (!solve_p.empty()) b.set("scenario", "p", solve_p);
            if (!solve_h.empty()) b.set("scenario", "h", solve_h);
            if (!solve_field.empty()) b.set("field", "family", solve_field);
            if (!solve_b0.empty()) b.set("field", "b0", solve_b0);
            if (!solve_gamma0.empty()) b.set("field", "gamma0", solve_gamma0);
            if (!solve_r0.empty()) b.set("field", "r0", solve_r0);
            if (!solve_k.empty()) b.set("field", "k", solve_k);
            if (!solve_xmin.empty()) b.set("domain", "xmin", solve_xmin);
            if (!solve_xmax.empty()) b.set("domain", "xmax", solve_xmax);
            if (!solve_ymin.empty()) b.set("domain", "ymin", solve_ymin);
            if (!solve_ymax.empty()) b.set("domain", "ymax", solve_ymax);
            if (!solve_nx.empty()) b.set("domain", "nx", solve_nx);
            if (!solve_ny.empty()) b.set("domain", "ny", solve_ny);
            if (!solve_dump.empty()) b.set("run", "dump_psi", solve_dump);
        } else if (sweep->parsed()) {
            apply_common(b, sweep_common, "sweep");
            b.set("scenario", "name", sweep_scenario);
            b.set("scenario", "p", sweep_p);
            b.set("scenario", "h_min", sweep_hmin);
            b.set("scenario", "h_max", sweep_hmax);
            b.set("scenario", "h_count", sweep_n);
            if (sweep_scenario == "vanishing") {
                b.set("field", "family", "radial_vanishing");
                if (!sweep_gamma0.empty()) b.set("field", "gamma0", sweep_gamma0);
                if (!sweep_r0.empty()) b.set("field", "r0", sweep_r0);
            } else if (sweep_scenario == "well") {
                b.set("field", "family", "radial_well");
                if (!sweep_b0.empty()) b.set("field", "b0", sweep_b0);
            } else {
                b.set("field", "family", "constant_field");
                if (!sweep_b0.empty()) b.set("field", "b0", sweep_b0);
            }
            if (!sweep_xmin.empty()) b.set("domain", "xmin", sweep_xmin);
            if (!sweep_xmax.empty()) b.set("domain", "xmax", sweep_xmax);
            if (!sweep_ymin.empty()) b.set("domain", "ymin", sweep_ymin);
            if (!sweep_ymax.empty()) b.set("domain", "ymax", sweep_ymax);
        } else if (part->parsed()) {
            apply_common(b, part_common, "partition-test");
            b.set("scenario", "alpha", part_alpha);
            b.set("scenario", "rho", part_rho);
            b.set("scenario", "h", part_h);
            if (!part_p.empty()) b.set("scenario", "p", part_p);
        } else if (loc->parsed()) {
            apply_common(b, loc_common, "localize");
            if (!loc_p.empty()) b.set("scenario", "p", loc_p);
            if (!loc_h.empty()) b.set("scenario", "h", loc_h);
        }
        return execute(b);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
