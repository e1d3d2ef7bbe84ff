#pragma once

#include "zdirac/fiber.hpp"
#include "zdirac/gap_counting.hpp"
#include "zdirac/toroidal.hpp"

#include <boost/property_tree/ptree.hpp>

#include "json.hpp"

#include <string>
#include <vector>

namespace zdirac::io {

using json = nlohmann::ordered_json;

inline constexpr const char* version = "0.1.0";
inline constexpr const char* series_header = "lambda,count,operator,L,m,gamma,Gamma2,Gamma3";

// Rows (xi1, xi2, z_minus, z_zero, z_plus) on the N x N grid xi = j/N.
void write_band_csv(const std::string& path, double m, int N);
// (u, R(u)) on n points inside each open band branch, skipping thresholds.
void write_coarea_csv(const std::string& path, double m, int n);

void write_series_csv(const CountingSeries& s, const std::string& path);
CountingSeries read_series_csv(const std::string& path);
json series_to_json(const CountingSeries& s);
CountingSeries series_from_json(const json& j);
// format is "csv" or "json"
void export_series(const CountingSeries& s, const std::string& path, const std::string& format);

json fit_to_json(const PowerLawFit& f, double predicted_exponent, double predicted_constant);
json thresholds_to_json(const ThresholdSet& t);
json counting_law_to_json(const CountingLawReport& r);
void write_coefficients_csv(const CoefficientTable& t, const std::string& path);

void write_json(const json& j, const std::string& path);
json read_json(const std::string& path);

struct ExperimentConfig {
    std::string command = "validate";
    std::uint64_t seed = 0;

    double m = 1.0;
    double gamma = 4.0;
    double Gamma2 = 1.0;
    double Gamma3 = 1.0;
    double v1 = 1.0;  // vertex value at the center

    std::vector<int> L{64};
    Boundary boundary = Boundary::open;
    int sign = +1;
    double lambda0 = 0.125;
    int j_first = 0;
    int j_last = 40;
    std::vector<int> M{16};
    int N = 256;
    int quad_order = 16;
    int quad_levels = 40;
    double lambda_min = 0.0;  // ssf grid; both zero means the whole spectrum
    double lambda_max = 0.0;
    int n_lambda = 201;
    double fit_lo = 0.0;  // zero means the localization floor
    double fit_hi = 0.0;  // zero means no upper limit
    std::string series_path;  // fit: read this series instead of computing one

    std::string out_dir = "out";
    std::vector<std::string> formats{"csv", "json"};

    json to_json() const;
};

// Flat INI with dotted sections; keys are validated, unknown keys rejected.
boost::property_tree::ptree read_config_tree(const std::string& path);
ExperimentConfig parse_config(const boost::property_tree::ptree& tree);

struct RunReport {
    int status = 0;  // 0 ok, 1 numeric warning, 2 error
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;
    std::string error;
};

// Runs the configured command into cfg.out_dir; manifest.json is always written.
RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace zdirac::io
