#include "magsob/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace magsob::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

struct Parser {
    std::vector<std::string> errors;

    bool to_double(const std::string& key, const std::string& v, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            if (!std::isfinite(out)) throw std::invalid_argument("nonfinite");
            return true;
        } catch (...) {
            errors.push_back(key + ": expected a real number, got '" + v + "'");
            return false;
        }
    }
    bool to_int(const std::string& key, const std::string& v, int& out) {
        try {
            std::size_t pos = 0;
            long val = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            out = static_cast<int>(val);
            return true;
        } catch (...) {
            errors.push_back(key + ": expected an integer, got '" + v + "'");
            return false;
        }
    }
    bool to_u64(const std::string& key, const std::string& v, std::uint64_t& out) {
        try {
            std::size_t pos = 0;
            out = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("trailing");
            return true;
        } catch (...) {
            errors.push_back(key + ": expected a nonnegative integer, got '" + v + "'");
            return false;
        }
    }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ParseOutcome parse_config(const std::string& text) {
    Parser par;
    RunConfig cfg;

    // raw field parameters; the FieldSpec is assembled after parsing
    std::string field_family;
    double f_b0 = 1.0, f_hessian = 1.0, f_gamma0 = 1.0, f_r0 = 1.0;
    int f_k = 0;
    Vec2 f_x0{0.0, 0.0};
    bool has_field = false;
    double h_min = 0.0, h_max = 0.0;
    int h_count = 0;

    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                par.errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            static const char* known[] = {"run", "domain", "field", "scenario", "solver"};
            if (std::find(std::begin(known), std::end(known), section) == std::end(known))
                par.errors.push_back("unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            par.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        std::string full = section.empty() ? key : section + "." + key;

        if (section == "run") {
            if (key == "subcommand") cfg.subcommand = value;
            else if (key == "seed") par.to_u64(full, value, cfg.seed);
            else if (key == "out") cfg.out_dir = value;
            else if (key == "threads") par.to_int(full, value, cfg.threads);
            else if (key == "dump_psi") cfg.dump_psi = value;
            else par.errors.push_back("unknown key '" + full + "'");
        } else if (section == "domain") {
            if (key == "shape") cfg.domain_shape = value;
            else if (key == "xmin") par.to_double(full, value, cfg.extent[0]);
            else if (key == "xmax") par.to_double(full, value, cfg.extent[1]);
            else if (key == "ymin") par.to_double(full, value, cfg.extent[2]);
            else if (key == "ymax") par.to_double(full, value, cfg.extent[3]);
            else if (key == "nx") par.to_int(full, value, cfg.nx);
            else if (key == "ny") par.to_int(full, value, cfg.ny);
            else if (key == "radius") par.to_double(full, value, cfg.disk_radius);
            else if (key == "center_x") par.to_double(full, value, cfg.disk_center[0]);
            else if (key == "center_y") par.to_double(full, value, cfg.disk_center[1]);
            else par.errors.push_back("unknown key '" + full + "'");
        } else if (section == "field") {
            has_field = true;
            if (key == "family") field_family = value;
            else if (key == "b0") par.to_double(full, value, f_b0);
            else if (key == "k") par.to_int(full, value, f_k);
            else if (key == "x0_x") par.to_double(full, value, f_x0[0]);
            else if (key == "x0_y") par.to_double(full, value, f_x0[1]);
            else if (key == "hessian_scale") par.to_double(full, value, f_hessian);
            else if (key == "gamma0") par.to_double(full, value, f_gamma0);
            else if (key == "r0") par.to_double(full, value, f_r0);
            else par.errors.push_back("unknown key '" + full + "'");
        } else if (section == "scenario") {
            if (key == "name") cfg.scenario = value;
            else if (key == "p") par.to_double(full, value, cfg.p);
            else if (key == "h") par.to_double(full, value, cfg.h);
            else if (key == "h_min") par.to_double(full, value, h_min);
            else if (key == "h_max") par.to_double(full, value, h_max);
            else if (key == "h_count") par.to_int(full, value, h_count);
            else if (key == "k") par.to_int(full, value, cfg.k);
            else if (key == "truncation") par.to_double(full, value, cfg.truncation);
            else if (key == "resolution") par.to_int(full, value, cfg.resolution);
            else if (key == "alpha") par.to_double(full, value, cfg.alpha);
            else if (key == "rho") par.to_double(full, value, cfg.rho);
            else if (key == "nodes_per_length") par.to_double(full, value, cfg.nodes_per_length);
            else if (key == "max_nodes") par.to_int(full, value, cfg.max_nodes);
            else if (key == "half_width") par.to_double(full, value, cfg.montgomery_half_width);
            else if (key == "n") par.to_int(full, value, cfg.montgomery_n);
            else par.errors.push_back("unknown key '" + full + "'");
        } else if (section == "solver") {
            if (key == "max_iterations") par.to_int(full, value, cfg.max_iterations);
            else if (key == "el_tolerance") par.to_double(full, value, cfg.el_tolerance);
            else if (key == "num_starts") par.to_int(full, value, cfg.num_starts);
            else par.errors.push_back("unknown key '" + full + "'");
        } else {
            par.errors.push_back("key '" + key + "' outside any known section");
        }
    }

    // assemble the field spec
    if (has_field || !field_family.empty()) {
        fields::Family fam;
        if (field_family.empty()) {
            par.errors.push_back("field.family: missing");
        } else if (field_family == "none") {
            cfg.field.reset();
        } else if (!fields::parse_family(field_family, fam)) {
            par.errors.push_back("field.family: unknown family '" + field_family + "'");
        } else {
            try {
                switch (fam) {
                    case fields::Family::constant_field:
                        cfg.field = fields::FieldSpec::constant(f_b0);
                        break;
                    case fields::Family::power_well:
                        cfg.field = fields::FieldSpec::power_well(f_k);
                        break;
                    case fields::Family::translated_power:
                        cfg.field = fields::FieldSpec::translated_power(f_k, f_x0);
                        break;
                    case fields::Family::radial_well:
                        cfg.field = fields::FieldSpec::radial_well(f_b0, f_x0, f_hessian);
                        break;
                    case fields::Family::radial_vanishing:
                        cfg.field = fields::FieldSpec::radial_vanishing(f_gamma0, f_r0);
                        break;
                }
            } catch (const std::exception& e) {
                par.errors.push_back(std::string("field: ") + e.what());
            }
        }
    }

    // h list from range
    if (h_count > 0 || h_min > 0 || h_max > 0) {
        if (!(h_min > 0) || !(h_max > 0) || h_count < 3)
            par.errors.push_back("scenario.h_min/h_max/h_count: need h_max >= h_min > 0 and h_count >= 3");
        else if (h_min > h_max)
            par.errors.push_back("scenario.h_min must be <= scenario.h_max");
        else {
            for (int i = 0; i < h_count; ++i) {
                double t = (h_count == 1) ? 0.0 : static_cast<double>(i) / (h_count - 1);
                cfg.h_list.push_back(h_max * std::pow(h_min / h_max, t));
            }
        }
    }

    // cross-cutting validation (each failed precondition is reported)
    static const char* subcommands[] = {"montgomery", "model", "solve",
                                        "sweep", "partition-test", "localize"};
    if (cfg.subcommand.empty())
        par.errors.push_back("run.subcommand: missing");
    else if (std::find(std::begin(subcommands), std::end(subcommands), cfg.subcommand) ==
             std::end(subcommands))
        par.errors.push_back("run.subcommand: unknown subcommand '" + cfg.subcommand + "'");
    if (cfg.p < 2)
        par.errors.push_back("scenario.p: the constrained minimization requires p >= 2, got " +
                             format_double(cfg.p));
    if (!(cfg.h > 0)) par.errors.push_back("scenario.h: must be > 0");
    if (cfg.k < 0) par.errors.push_back("scenario.k: must be >= 0");
    if (!(cfg.truncation > 0)) par.errors.push_back("scenario.truncation: must be > 0");
    if (cfg.alpha < cfg.rho)
        par.errors.push_back("scenario.alpha/rho: the partition requires alpha >= rho, got alpha = " +
                             format_double(cfg.alpha) + " < rho = " + format_double(cfg.rho));
    if (!(cfg.rho > 0)) par.errors.push_back("scenario.rho: must be > 0");
    if (cfg.montgomery_n < 64) par.errors.push_back("scenario.n: must be >= 64");
    if (!(cfg.montgomery_half_width > 0)) par.errors.push_back("scenario.half_width: must be > 0");
    if (cfg.max_iterations < 1) par.errors.push_back("solver.max_iterations: must be >= 1");
    if (!(cfg.el_tolerance > 0)) par.errors.push_back("solver.el_tolerance: must be > 0");
    if (cfg.num_starts < 1) par.errors.push_back("solver.num_starts: must be >= 1");
    if (cfg.threads < 1) par.errors.push_back("run.threads: must be >= 1");
    if (cfg.nx < 3 || cfg.ny < 3) par.errors.push_back("domain.nx/ny: need at least 3 nodes per axis");
    if (!(cfg.extent[1] > cfg.extent[0]) || !(cfg.extent[3] > cfg.extent[2]))
        par.errors.push_back("domain: empty bounding box");
    if (cfg.domain_shape != "rectangle" && cfg.domain_shape != "disk")
        par.errors.push_back("domain.shape: expected 'rectangle' or 'disk'");
    if (cfg.domain_shape == "disk" && !(cfg.disk_radius > 0))
        par.errors.push_back("domain.radius: must be > 0");
    if (cfg.subcommand == "sweep") {
        if (cfg.h_list.empty())
            par.errors.push_back("sweep: requires scenario.h_min, h_max and h_count");
        if (cfg.scenario != "constant" && cfg.scenario != "well" && cfg.scenario != "vanishing")
            par.errors.push_back("scenario.name: expected constant | well | vanishing");
        if (cfg.scenario == "vanishing" && !(cfg.p > 2))
            par.errors.push_back("scenario.p: the vanishing-field law requires p > 2");
    }

    ParseOutcome out;
    out.errors = std::move(par.errors);
    if (out.errors.empty()) out.config = std::move(cfg);
    return out;
}

std::string render_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[run]\n";
    os << "subcommand = " << c.subcommand << "\n";
    os << "seed = " << c.seed << "\n";
    os << "threads = " << c.threads << "\n";
    os << "out = " << c.out_dir << "\n";
    if (!c.dump_psi.empty()) os << "dump_psi = " << c.dump_psi << "\n";
    os << "[domain]\n";
    os << "shape = " << c.domain_shape << "\n";
    os << "xmin = " << format_double(c.extent[0]) << "\n";
    os << "xmax = " << format_double(c.extent[1]) << "\n";
    os << "ymin = " << format_double(c.extent[2]) << "\n";
    os << "ymax = " << format_double(c.extent[3]) << "\n";
    os << "nx = " << c.nx << "\n";
    os << "ny = " << c.ny << "\n";
    if (c.domain_shape == "disk") {
        os << "radius = " << format_double(c.disk_radius) << "\n";
        os << "center_x = " << format_double(c.disk_center[0]) << "\n";
        os << "center_y = " << format_double(c.disk_center[1]) << "\n";
    }
    os << "[field]\n";
    if (c.field) {
        const auto& f = *c.field;
        os << "family = " << fields::family_name(f.family) << "\n";
        switch (f.family) {
            case fields::Family::constant_field:
                os << "b0 = " << format_double(f.b0) << "\n";
                break;
            case fields::Family::power_well:
                os << "k = " << f.k << "\n";
                break;
            case fields::Family::translated_power:
                os << "k = " << f.k << "\n";
                os << "x0_x = " << format_double(f.x0[0]) << "\n";
                os << "x0_y = " << format_double(f.x0[1]) << "\n";
                break;
            case fields::Family::radial_well:
                os << "b0 = " << format_double(f.b0) << "\n";
                os << "x0_x = " << format_double(f.x0[0]) << "\n";
                os << "x0_y = " << format_double(f.x0[1]) << "\n";
                os << "hessian_scale = " << format_double(f.hessian_scale) << "\n";
                break;
            case fields::Family::radial_vanishing:
                os << "gamma0 = " << format_double(f.gamma0) << "\n";
                os << "r0 = " << format_double(f.r0) << "\n";
                break;
        }
    } else {
        os << "family = none\n";
    }
    os << "[scenario]\n";
    os << "name = " << c.scenario << "\n";
    os << "p = " << format_double(c.p) << "\n";
    os << "h = " << format_double(c.h) << "\n";
    if (!c.h_list.empty()) {
        os << "h_min = " << format_double(c.h_list.back()) << "\n";
        os << "h_max = " << format_double(c.h_list.front()) << "\n";
        os << "h_count = " << c.h_list.size() << "\n";
    }
    os << "k = " << c.k << "\n";
    os << "truncation = " << format_double(c.truncation) << "\n";
    os << "resolution = " << c.resolution << "\n";
    os << "alpha = " << format_double(c.alpha) << "\n";
    os << "rho = " << format_double(c.rho) << "\n";
    os << "half_width = " << format_double(c.montgomery_half_width) << "\n";
    os << "n = " << c.montgomery_n << "\n";
    os << "nodes_per_length = " << format_double(c.nodes_per_length) << "\n";
    os << "max_nodes = " << c.max_nodes << "\n";
    os << "[solver]\n";
    os << "max_iterations = " << c.max_iterations << "\n";
    os << "el_tolerance = " << format_double(c.el_tolerance) << "\n";
    os << "num_starts = " << c.num_starts << "\n";
    return os.str();
}

} // namespace magsob::config
