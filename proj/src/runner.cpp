#include "zdirac/errors.hpp"
#include "zdirac/fiber.hpp"
#include "zdirac/io.hpp"
#include "zdirac/level_sets.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace zdirac::io {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> commands = {"bands", "count",     "ssf",      "fit",     "constant",
                                        "toroidal", "validate", "thresholds", "flatband"};

const std::map<std::string, std::set<std::string>> schema = {
    {"run", {"command", "seed"}},
    {"model", {"m", "gamma", "Gamma2", "Gamma3", "v1"}},
    {"numerics",
     {"L", "boundary", "sign", "lambda0", "j_first", "j_last", "lambda_min", "lambda_max", "n_lambda", "fit_lo",
      "fit_hi", "series", "M", "N", "quad_order", "quad_levels"}},
    {"output", {"dir", "formats"}},
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

double get_double(const pt::ptree& t, const std::string& key, double def) {
    auto v = t.get_optional<std::string>(key);
    if (!v) return def;
    const auto s = trim(*v);
    char* end = nullptr;
    const double x = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(x)) throw ConfigError(key, "expected a finite number, got '" + s + "'");
    return x;
}

long get_long(const pt::ptree& t, const std::string& key, long def) {
    auto v = t.get_optional<std::string>(key);
    if (!v) return def;
    const auto s = trim(*v);
    char* end = nullptr;
    const long x = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw ConfigError(key, "expected an integer, got '" + s + "'");
    return x;
}

std::vector<int> get_int_list(const pt::ptree& t, const std::string& key, std::vector<int> def) {
    auto v = t.get_optional<std::string>(key);
    if (!v) return def;
    std::vector<int> out;
    std::string item;
    std::istringstream is(*v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        char* end = nullptr;
        const long x = std::strtol(item.c_str(), &end, 10);
        if (item.empty() || *end != '\0') throw ConfigError(key, "expected a comma separated integer list");
        out.push_back(static_cast<int>(x));
    }
    if (out.empty()) throw ConfigError(key, "empty list");
    return out;
}

void require(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(key, msg);
}

bool wants(const ExperimentConfig& c, const std::string& f) {
    return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end();
}

Potential model_potential(const ExperimentConfig& c) {
    return Potential::dirac_power(c.gamma, c.Gamma2, c.Gamma3, c.v1);
}

std::vector<ToroidalComponent> dirac_components(const ExperimentConfig& c) {
    auto B = dirac_model_symbols(c.N);
    return {{B[0], DiscreteSymbol::power(2, c.Gamma2, c.gamma)}, {B[1], DiscreteSymbol::power(2, c.Gamma3, c.gamma)}};
}

// The grid stops at the localization floor: closer to -m the box cannot
// resolve the accumulation and the eigenvalues cluster below 1e-9 spacing.
CountingSeries plus_series(const ExperimentConfig& c, int L) {
    const auto box = build_lattice(L, c.boundary);
    const double floor = localization_floor(L, std::max(c.Gamma2, c.Gamma3), c.gamma);
    int j_last = c.j_last;
    if (floor > 0.0 && floor < c.lambda0)
        j_last = std::min(j_last, static_cast<int>(std::floor(2.0 * std::log2(c.lambda0 / floor))));
    if (j_last < c.j_first) throw FitWindowError("lambda grid lies entirely below the localization floor");
    return counting_series(box, c.m, model_potential(c), c.sign, geometric_grid(-c.m, c.lambda0, c.j_first, j_last));
}

struct Ctx {
    const ExperimentConfig& cfg;
    RunReport& rep;
    fs::path dir;

    std::string path(const std::string& name) {
        rep.artifacts.push_back(name);
        return (dir / name).string();
    }
    void series(const CountingSeries& s, const std::string& stem) {
        if (wants(cfg, "csv")) write_series_csv(s, path(stem + ".csv"));
        if (wants(cfg, "json")) write_json(series_to_json(s), path(stem + ".json"));
    }
    void warn(const std::string& w) {
        rep.warnings.push_back(w);
        rep.status = std::max(rep.status, 1);
    }
};

void cmd_bands(Ctx& x) {
    write_band_csv(x.path("bands.csv"), x.cfg.m, x.cfg.N);
    write_coarea_csv(x.path("coarea_density.csv"), x.cfg.m, 64);
}

void cmd_thresholds(Ctx& x) { write_json(thresholds_to_json(classify_thresholds(x.cfg.m)), x.path("thresholds.json")); }

void cmd_flatband(Ctx& x) {
    json rows = json::array();
    for (int L : x.cfg.L) {
        const auto box = build_lattice(L, x.cfg.boundary);
        const auto H = assemble_hamiltonian(box, x.cfg.m);
        double worst = 0.0;
        for (int x2 = 0; x2 < L; ++x2)
            for (int x1 = 0; x1 < L; ++x1) {
                Cochain f;
                try {
                    f = loop_state(box, x1, x2);
                } catch (const DomainError&) {
                    continue;
                }
                const Eigen::VectorXd v = f.stacked();
                worst = std::max(worst, (H * v + x.cfg.m * v).norm() / v.norm());
            }
        rows.push_back({{"L", L},
                        {"boundary", to_string(x.cfg.boundary)},
                        {"multiplicity", flat_band_multiplicity(box, x.cfg.m)},
                        {"plaquettes", box.boundary == Boundary::periodic ? L * L : (L - 1) * (L - 1)},
                        {"max_loop_residual", worst}});
        if (worst > 1e-13) x.warn("loop residual " + std::to_string(worst) + " at L = " + std::to_string(L));
    }
    write_json(json{{"m", x.cfg.m}, {"boxes", rows}}, x.path("flatband.json"));
}

void cmd_count(Ctx& x) {
    for (int L : x.cfg.L) x.series(plus_series(x.cfg, L), "count_L" + std::to_string(L));
}

void cmd_ssf(Ctx& x) {
    const auto& c = x.cfg;
    double lo = c.lambda_min, hi = c.lambda_max;
    if (lo == 0.0 && hi == 0.0) {
        hi = std::sqrt(c.m * c.m + 8.0) + 0.5;
        lo = -hi;
    }
    std::vector<double> grid;
    for (int i = 0; i < c.n_lambda; ++i) grid.push_back(c.n_lambda == 1 ? lo : lo + (hi - lo) * i / (c.n_lambda - 1));
    for (int L : c.L) {
        const auto box = build_lattice(L, c.boundary);
        x.series(finite_volume_ssf(box, c.m, model_potential(c), c.sign, grid), "ssf_L" + std::to_string(L));
    }
}

void cmd_fit(Ctx& x) {
    const auto& c = x.cfg;
    const double p = 2.0 / c.gamma;
    std::vector<CountingSeries> runs;
    if (!c.series_path.empty()) {
        runs.push_back(c.series_path.size() > 5 && c.series_path.substr(c.series_path.size() - 5) == ".json"
                           ? series_from_json(read_json(c.series_path))
                           : read_series_csv(c.series_path));
    } else {
        for (int L : c.L) {
            runs.push_back(plus_series(c, L));
            x.series(runs.back(), "count_L" + std::to_string(runs.back().meta.L));
        }
    }
    json out = json::array();
    for (const auto& s : runs) {
        const double ref = -s.meta.m;
        double lo = c.fit_lo;
        if (lo == 0.0 && c.series_path.empty())
            lo = localization_floor(s.meta.L, std::max(s.meta.Gamma2, s.meta.Gamma3), s.meta.gamma);
        const double C = s.meta.gamma > 2.0 ? asymptotic_constant_C(s.meta.gamma, s.meta.Gamma2, s.meta.Gamma3) : 0.0;
        try {
            auto f = fit_power_law(s, ref, lo, c.fit_hi);
            auto j = fit_to_json(f, s.meta.gamma > 0.0 ? 2.0 / s.meta.gamma : p, C);
            j["L"] = s.meta.L;
            out.push_back(j);
        } catch (const FitWindowError& e) {
            x.warn("L = " + std::to_string(s.meta.L) + ": " + e.what());
        }
    }
    write_json(out.size() == 1 ? out[0] : out, x.path("fit.json"));
}

void cmd_constant(Ctx& x) {
    const auto& c = x.cfg;
    const double C = asymptotic_constant_C(c.gamma, c.Gamma2, c.Gamma3, {c.quad_order, c.quad_levels});
    write_json(json{{"gamma", c.gamma}, {"Gamma2", c.Gamma2}, {"Gamma3", c.Gamma3}, {"C", C}}, x.path("constant.json"));
}

void cmd_toroidal(Ctx& x) {
    const auto& c = x.cfg;
    const auto comps = dirac_components(c);
    const int K = std::min(*std::min_element(c.M.begin(), c.M.end()), (c.N - 4) / 4);
    if (K >= 1) write_coefficients_csv(fourier_coefficients(comps[0].B, K), x.path("coefficients_B1.csv"));
    const auto r = verify_counting_law(comps, c.M, WindowSpec{}, c.gamma, 2);
    write_json(counting_law_to_json(r), x.path("counting_law.json"));
    if (!r.trend_nonincreasing) x.warn("deviation from the limit constant grows with M");
}

void cmd_validate(Ctx& x) {
    const auto& c = x.cfg;
    json checks = json::array();
    auto record = [&](const std::string& name, double value, double tol) {
        const bool ok = value <= tol;
        checks.push_back({{"check", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
        if (!ok) x.warn(name + " failed");
    };

    // band structure of a small periodic box against the fibers
    const int L = 8;
    const auto box = build_lattice(L, Boundary::periodic);
    const Eigen::MatrixXd H = Eigen::MatrixXd(assemble_hamiltonian(box, c.m));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> want;
    for (int j2 = 0; j2 < L; ++j2)
        for (int j1 = 0; j1 < L; ++j1) {
            const auto b = band_values(Torus(double(j1) / L, double(j2) / L), c.m);
            want.insert(want.end(), {b.z_minus, b.z_zero, b.z_plus});
        }
    std::sort(want.begin(), want.end());
    double dev = 0.0;
    for (size_t i = 0; i < want.size(); ++i) dev = std::max(dev, std::abs(want[i] - es.eigenvalues()[i]));
    record("floquet", dev, 1e-10);

    const Eigen::VectorXd f = loop_state(box, 3, 4).stacked();
    record("loop_residual", (H * f + c.m * f).norm(), 1e-13);

    const double Cbar = asymptotic_constant_C(c.gamma, c.Gamma2, c.Gamma2);
    record("constant_closed_form", std::abs(Cbar - M_PI * std::pow(c.Gamma2, 2.0 / c.gamma)), 1e-8);

    // sparse inertia against dense eigenvalues on a perturbed box
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    const auto obox = build_lattice(10, Boundary::open);
    const auto V = model_potential(c);
    const auto Hp = assemble_hamiltonian(obox, c.m, &V, +1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ep(Eigen::MatrixXd(Hp), Eigen::EigenvaluesOnly);
    double miss = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double lam = U(rng);
        const long dense = std::count_if(ep.eigenvalues().data(), ep.eigenvalues().data() + ep.eigenvalues().size(),
                                         [lam](double e) { return e < lam; });
        miss = std::max(miss, std::abs(double(dense - inertia_count_nudged(Hp, lam))));
    }
    record("inertia_vs_dense", miss, 0.0);
    write_json(json{{"m", c.m}, {"seed", c.seed}, {"checks", checks}}, x.path("validate.json"));
}

}  // namespace

json ExperimentConfig::to_json() const {
    return json{{"run", {{"command", command}, {"seed", seed}}},
                {"model", {{"m", m}, {"gamma", gamma}, {"Gamma2", Gamma2}, {"Gamma3", Gamma3}, {"v1", v1}}},
                {"numerics",
                 {{"L", L},
                  {"boundary", zdirac::to_string(boundary)},
                  {"sign", sign},
                  {"lambda0", lambda0},
                  {"j_first", j_first},
                  {"j_last", j_last},
                  {"lambda_min", lambda_min},
                  {"lambda_max", lambda_max},
                  {"n_lambda", n_lambda},
                  {"fit_lo", fit_lo},
                  {"fit_hi", fit_hi},
                  {"series", series_path},
                  {"M", M},
                  {"N", N},
                  {"quad_order", quad_order},
                  {"quad_levels", quad_levels}}},
                {"output", {{"dir", out_dir}, {"formats", formats}}}};
}

pt::ptree read_config_tree(const std::string& path) {
    pt::ptree t;
    try {
        pt::read_ini(path, t);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(path, e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    return t;
}

ExperimentConfig parse_config(const pt::ptree& t) {
    for (const auto& [sec, body] : t) {
        auto it = schema.find(sec);
        if (it == schema.end()) throw ConfigError(sec, "unknown section");
        if (!body.data().empty() && body.empty()) throw ConfigError(sec, "expected a section, got a bare key");
        for (const auto& [key, val] : body)
            if (!it->second.count(key)) throw ConfigError(sec + "." + key, "unknown key");
    }
    ExperimentConfig c;
    c.command = trim(t.get<std::string>("run.command", c.command));
    require(commands.count(c.command), "run.command", "unknown command '" + c.command + "'");
    const long seed = get_long(t, "run.seed", 0);
    require(seed >= 0, "run.seed", "must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);

    c.m = get_double(t, "model.m", c.m);
    require(c.m >= 0.0, "model.m", "mass must be nonnegative");
    c.gamma = get_double(t, "model.gamma", c.gamma);
    c.Gamma2 = get_double(t, "model.Gamma2", c.Gamma2);
    c.Gamma3 = get_double(t, "model.Gamma3", c.Gamma3);
    c.v1 = get_double(t, "model.v1", c.v1);
    require(c.Gamma2 >= 0.0, "model.Gamma2", "must be nonnegative");
    require(c.Gamma3 >= 0.0, "model.Gamma3", "must be nonnegative");
    require(c.v1 >= 0.0, "model.v1", "must be nonnegative");
    const bool needs_decay = c.command != "bands" && c.command != "thresholds" && c.command != "flatband";
    require(!needs_decay || c.gamma > 2.0, "model.gamma",
            "must exceed 2: the eigenvalue accumulation law at -m and its constant assume edge potentials "
            "decaying like Gamma |mu|^-gamma with gamma > 2");
    require(c.gamma > 0.0, "model.gamma", "must be positive");

    c.L = get_int_list(t, "numerics.L", c.L);
    for (int L : c.L) require(L >= 2, "numerics.L", "box side must be at least 2");
    try {
        c.boundary = boundary_from_string(trim(t.get<std::string>("numerics.boundary", "open")));
    } catch (const std::exception& e) {
        throw ConfigError("numerics.boundary", e.what());
    }
    c.sign = static_cast<int>(get_long(t, "numerics.sign", c.sign));
    require(c.sign == 1 || c.sign == -1, "numerics.sign", "must be 1 or -1");
    c.lambda0 = get_double(t, "numerics.lambda0", c.lambda0);
    require(c.lambda0 > 0.0, "numerics.lambda0", "must be positive");
    c.j_first = static_cast<int>(get_long(t, "numerics.j_first", c.j_first));
    c.j_last = static_cast<int>(get_long(t, "numerics.j_last", c.j_last));
    require(c.j_last >= c.j_first, "numerics.j_last", "must be at least j_first");
    c.lambda_min = get_double(t, "numerics.lambda_min", c.lambda_min);
    c.lambda_max = get_double(t, "numerics.lambda_max", c.lambda_max);
    require(c.lambda_max >= c.lambda_min, "numerics.lambda_max", "must be at least lambda_min");
    c.n_lambda = static_cast<int>(get_long(t, "numerics.n_lambda", c.n_lambda));
    require(c.n_lambda >= 1, "numerics.n_lambda", "must be positive");
    c.fit_lo = get_double(t, "numerics.fit_lo", c.fit_lo);
    c.fit_hi = get_double(t, "numerics.fit_hi", c.fit_hi);
    require(c.fit_lo >= 0.0 && c.fit_hi >= 0.0, "numerics.fit_lo", "fit window must be nonnegative");
    c.series_path = trim(t.get<std::string>("numerics.series", ""));
    c.M = get_int_list(t, "numerics.M", c.M);
    for (int M : c.M) require(M >= 4, "numerics.M", "momentum box needs M >= 4");
    c.N = static_cast<int>(get_long(t, "numerics.N", c.N));
    require(c.N >= 4, "numerics.N", "grid needs N >= 4");
    if (c.command == "toroidal") {
        const int Mmax = *std::max_element(c.M.begin(), c.M.end());
        require(c.N >= 8 * Mmax + 4, "numerics.N", "must be at least 8 max(M) + 4 to resolve the coefficients");
    }
    c.quad_order = static_cast<int>(get_long(t, "numerics.quad_order", c.quad_order));
    c.quad_levels = static_cast<int>(get_long(t, "numerics.quad_levels", c.quad_levels));
    require(c.quad_order >= 4 && c.quad_order <= 64, "numerics.quad_order", "must lie in [4, 64]");
    require(c.quad_levels >= 1 && c.quad_levels <= 60, "numerics.quad_levels", "must lie in [1, 60]");

    c.out_dir = trim(t.get<std::string>("output.dir", c.out_dir));
    require(!c.out_dir.empty(), "output.dir", "must not be empty");
    if (auto f = t.get_optional<std::string>("output.formats")) {
        c.formats.clear();
        std::string item;
        std::istringstream is(*f);
        while (std::getline(is, item, ',')) {
            item = trim(item);
            require(item == "csv" || item == "json", "output.formats", "unknown format '" + item + "'");
            c.formats.push_back(item);
        }
        require(!c.formats.empty(), "output.formats", "empty list");
    }
    return c;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    RunReport rep;
    Ctx x{cfg, rep, fs::path(cfg.out_dir)};
    static const std::map<std::string, std::function<void(Ctx&)>> table = {
        {"bands", cmd_bands}, {"thresholds", cmd_thresholds}, {"flatband", cmd_flatband},
        {"count", cmd_count}, {"ssf", cmd_ssf},               {"fit", cmd_fit},
        {"constant", cmd_constant}, {"toroidal", cmd_toroidal}, {"validate", cmd_validate}};
    try {
        fs::create_directories(x.dir);
        auto it = table.find(cfg.command);
        if (it == table.end()) throw ConfigError("run.command", "unknown command '" + cfg.command + "'");
        it->second(x);
    } catch (const std::exception& e) {
        rep.status = 2;
        rep.error = e.what();
    }
    try {
        fs::create_directories(x.dir);
        write_json(json{{"version", version},
                        {"config", cfg.to_json()},
                        {"status", rep.status},
                        {"artifacts", rep.artifacts},
                        {"warnings", rep.warnings},
                        {"error", rep.error}},
                   (x.dir / "manifest.json").string());
    } catch (const std::exception& e) {
        rep.status = 2;
        if (rep.error.empty()) rep.error = std::string("manifest: ") + e.what();
    }
    return rep;
}

}  // namespace zdirac::io
