#include "zdirac/io.hpp"
#include "zdirac/errors.hpp"
#include "zdirac/fiber.hpp"
#include "zdirac/level_sets.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace zdirac::io {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw std::runtime_error(where + ": bad number '" + s + "'");
    return v;
}

long to_long(const std::string& s, const std::string& where) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw std::runtime_error(where + ": bad integer '" + s + "'");
    return v;
}

}  // namespace

void write_band_csv(const std::string& path, double m, int N) {
    if (N < 1) throw InvalidSize("band grid needs N >= 1");
    auto f = open_out(path);
    f << "# bands m=" << fmt(m) << " N=" << N << "\n";
    f << "xi1,xi2,z_minus,z_zero,z_plus\n";
    for (int j2 = 0; j2 < N; ++j2)
        for (int j1 = 0; j1 < N; ++j1) {
            const Torus xi(double(j1) / N, double(j2) / N);
            const auto b = band_values(xi, m);
            f << fmt(xi[0]) << ',' << fmt(xi[1]) << ',' << fmt(b.z_minus) << ',' << fmt(b.z_zero) << ','
              << fmt(b.z_plus) << '\n';
        }
}

void write_coarea_csv(const std::string& path, double m, int n) {
    if (n < 2) throw InvalidSize("need at least two levels per branch");
    auto f = open_out(path);
    f << "# coarea density m=" << fmt(m) << "\n";
    f << "u,R\n";
    // u^2 = m^2 + 4 t, t in (0,1) and (1,2), midpoints of n cells
    for (int branch = 0; branch < 2; ++branch)
        for (int i = 0; i < n; ++i) {
            const double t = branch + (i + 0.5) / n;
            const double u = std::sqrt(m * m + 4.0 * t);
            f << fmt(u) << ',' << fmt(coarea_density(m, u)) << '\n';
        }
}

void write_series_csv(const CountingSeries& s, const std::string& path) {
    if (s.lambda.size() != s.counts.size()) throw LengthMismatch("lambda and counts differ in length");
    auto f = open_out(path);
    f << "# boundary=" << to_string(s.meta.boundary) << " sign=" << s.meta.sign << "\n";
    f << series_header << "\n";
    const auto& m = s.meta;
    for (size_t i = 0; i < s.lambda.size(); ++i)
        f << fmt(s.lambda[i]) << ',' << s.counts[i] << ',' << to_string(m.op) << ',' << m.L << ',' << fmt(m.m) << ','
          << fmt(m.gamma) << ',' << fmt(m.Gamma2) << ',' << fmt(m.Gamma3) << '\n';
}

CountingSeries read_series_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    CountingSeries s;
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream is(line.substr(1));
            std::string kv;
            while (is >> kv) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) continue;
                const auto k = kv.substr(0, eq), v = kv.substr(eq + 1);
                if (k == "boundary") s.meta.boundary = boundary_from_string(v);
                if (k == "sign") s.meta.sign = static_cast<int>(to_long(v, path));
            }
            continue;
        }
        if (!header) {
            if (line != series_header) throw std::runtime_error(path + ": unexpected header '" + line + "'");
            header = true;
            continue;
        }
        const auto where = path + ":" + std::to_string(lineno);
        const auto c = split(line, ',');
        if (c.size() != 8) throw std::runtime_error(where + ": expected 8 columns");
        s.lambda.push_back(to_double(c[0], where));
        s.counts.push_back(to_long(c[1], where));
        s.meta.op = operator_tag_from_string(c[2]);
        s.meta.L = static_cast<int>(to_long(c[3], where));
        s.meta.m = to_double(c[4], where);
        s.meta.gamma = to_double(c[5], where);
        s.meta.Gamma2 = to_double(c[6], where);
        s.meta.Gamma3 = to_double(c[7], where);
    }
    if (!header) throw std::runtime_error(path + ": missing header");
    return s;
}

json series_to_json(const CountingSeries& s) {
    const auto& m = s.meta;
    return json{{"lambda", s.lambda},     {"count", s.counts},       {"operator", to_string(m.op)},
                {"L", m.L},               {"boundary", to_string(m.boundary)}, {"sign", m.sign},
                {"m", m.m},               {"gamma", m.gamma},        {"Gamma2", m.Gamma2},
                {"Gamma3", m.Gamma3}};
}

CountingSeries series_from_json(const json& j) {
    CountingSeries s;
    s.lambda = j.at("lambda").get<std::vector<double>>();
    s.counts = j.at("count").get<std::vector<long>>();
    if (s.lambda.size() != s.counts.size()) throw LengthMismatch("lambda and count differ in length");
    s.meta.op = operator_tag_from_string(j.at("operator").get<std::string>());
    s.meta.L = j.at("L").get<int>();
    s.meta.boundary = boundary_from_string(j.at("boundary").get<std::string>());
    s.meta.sign = j.at("sign").get<int>();
    s.meta.m = j.at("m").get<double>();
    s.meta.gamma = j.at("gamma").get<double>();
    s.meta.Gamma2 = j.at("Gamma2").get<double>();
    s.meta.Gamma3 = j.at("Gamma3").get<double>();
    return s;
}

void export_series(const CountingSeries& s, const std::string& path, const std::string& format) {
    if (format == "csv")
        write_series_csv(s, path);
    else if (format == "json")
        write_json(series_to_json(s), path);
    else
        throw std::invalid_argument("unknown series format '" + format + "'");
}

json fit_to_json(const PowerLawFit& f, double predicted_exponent, double predicted_constant) {
    return json{{"exponent", f.exponent},
                {"constant", f.constant},
                {"residual", f.residual},
                {"window", {f.window.first, f.window.second}},
                {"n_points", f.n_points},
                {"predicted_exponent", predicted_exponent},
                {"predicted_constant", predicted_constant}};
}

json thresholds_to_json(const ThresholdSet& t) {
    json items = json::array();
    for (const auto& th : t.items) items.push_back({{"value", th.value}, {"kind", to_string(th.kind)}});
    return json{{"m", t.m}, {"thresholds", items}};
}

json counting_law_to_json(const CountingLawReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"M", e.M},
                           {"dim", e.dim},
                           {"lambda", e.lambda},
                           {"n_plus", e.n_plus},
                           {"scaled", e.scaled},
                           {"median", e.median},
                           {"deviation", e.deviation}});
    return json{{"gamma", r.gamma},
                {"d", r.d},
                {"target_plus", r.target_plus},
                {"target_minus", r.target_minus},
                {"entries", entries},
                {"trend_nonincreasing", r.trend_nonincreasing}};
}

void write_coefficients_csv(const CoefficientTable& t, const std::string& path) {
    if (t.d != 2) throw InvalidSize("coefficient export is two-dimensional");
    auto f = open_out(path);
    f << "mu1,mu2,re,im\n";
    for (int a = -t.K; a <= t.K; ++a)
        for (int b = -t.K; b <= t.K; ++b) {
            const auto c = t.at({a, b});
            f << a << ',' << b << ',' << fmt(c.real()) << ',' << fmt(c.imag()) << '\n';
        }
}

void write_json(const json& j, const std::string& path) {
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open '" + path + "'");
    return json::parse(f);
}

}  // namespace zdirac::io
