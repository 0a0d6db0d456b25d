#pragma once

#include "magsob/fields.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace magsob::config {

/// Fully validated run description. Field defaults are filled during
/// parsing; every module precondition is checked before any compute starts.
struct RunConfig {
    std::string subcommand; // montgomery | model | solve | sweep | partition-test | localize

    // montgomery / model
    int k = 0;
    double truncation = 8.0;
    int resolution = 129;
    double montgomery_half_width = 12.0;
    int montgomery_n = 2048;

    // scenario / field
    std::string scenario = "constant"; // constant | well | vanishing
    std::optional<fields::FieldSpec> field; // absent = zero potential
    std::array<double, 4> extent{0.0, 1.0, 0.0, 1.0};
    std::string domain_shape = "rectangle"; // rectangle | disk
    double disk_radius = 1.0;
    Vec2 disk_center{0.0, 0.0};
    int nx = 129, ny = 129;

    // solve / sweep
    double p = 2.0;
    double h = 1.0;
    std::vector<double> h_list; // decreasing; built from h_min/h_max/h_count
    double nodes_per_length = 12.0;
    int max_nodes = 521;

    // partition-test
    double alpha = 7.0 / 16.0;
    double rho = 5.0 / 16.0;

    // solver options
    int max_iterations = 40000;
    double el_tolerance = 1e-8;
    int num_starts = 3;

    std::uint64_t seed = 1234;
    int threads = 1;
    std::string out_dir = ".";
    std::string dump_psi; // optional minimizer dump path
};

struct ParseOutcome {
    std::optional<RunConfig> config;       // set iff errors is empty
    std::vector<std::string> errors;       // all validation errors, not just the first
};

/// Parse a flat key = value config with [section] headers. Unknown keys,
/// type mismatches and constraint violations are all collected.
ParseOutcome parse_config(const std::string& text);

/// Re-render the resolved configuration as canonical key = value text
/// (embedded in reports for provenance).
std::string render_config(const RunConfig& config);

} // namespace magsob::config
