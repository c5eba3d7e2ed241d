#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace itergm {

inline constexpr const char* kSchemaVersion = "itergm-report/1";

// Commands run in this order regardless of how they are listed.
inline const std::vector<std::string>& command_order() {
    static const std::vector<std::string> order{"certify", "decompose", "connection", "verify-pf",
                                                "monodromy", "melnikov", "poincare-fit", "zeros"};
    return order;
}

struct Tolerances {
    double local = 1e-9;        // Runge-Kutta local error
    double level = 1e-10;       // |H - t| after projection
    double closure = 1e-7;      // oval closure
    double refine = 1e-2;       // tolerance ratio of the error-estimate run
    double vanishing = 1e-7;    // |M_j| per unit arclength counted as zero
    double pf_step = 2e-2;      // finite difference step in p
    double continuation = 1e-12;
    double margin = 1e-4;       // distance kept from the singular locus
    double zero_width = 5e-7;
    double tangency = -1;       // < 0: derived from the vanishing rule
    double poincare = 1e-13;
};

struct JobConfig {
    std::string hamiltonian;
    std::string perturbation_P = "0", perturbation_Q = "0";
    int K = 2;
    int K_max = 3;
    double p_lo = 0, p_hi = 0;
    bool has_interval = false;
    double p_seed = 0;
    bool has_seed_point = false;
    std::uint64_t seed = 1;
    int samples = 9;        // nest points for melnikov
    int pf_points = 10;
    double monodromy_radius = 0;  // 0: chosen from the distance to the other singular points
    int max_order = 60;
    double eps_lo = 1e-4, eps_hi = 1e-2;
    int eps_count = 8;
    int zero_grid = 33;
    bool symbolic = false;
    Tolerances tol;
    std::vector<std::string> commands;

    nlohmann::json to_json() const;  // normalized; the config hash is taken over its dump
};

// key = value lines, '#' starts a comment. Throws ConfigError naming the
// line and the offending field.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const JobConfig& cfg);  // 16 hex digits

struct RunReport {
    nlohmann::json document;  // schema_version, config_hash, config, results, diagnostics
    std::map<std::string, double> timings;  // seconds per command
    std::map<std::string, std::string> csv;  // file name -> contents
    bool ok = true;           // no command errored

    // document plus a "timings" object
    nlohmann::json full() const;
};

RunReport run(const JobConfig& cfg);

}  // namespace itergm
