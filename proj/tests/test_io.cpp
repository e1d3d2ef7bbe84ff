#include "doctest.h"

#include "zdirac/errors.hpp"
#include "zdirac/io.hpp"

#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace zdirac;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / "zdirac_io_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream f(p);
    std::vector<std::string> out;
    std::string l;
    while (std::getline(f, l)) out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CountingSeries random_series(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    std::uniform_int_distribution<long> C(0, 1000000);
    CountingSeries s;
    for (int i = 0; i < n; ++i) {
        s.lambda.push_back(U(rng) * std::pow(10.0, U(rng)));
        s.counts.push_back(C(rng));
    }
    s.meta.L = 37;
    s.meta.boundary = Boundary::periodic;
    s.meta.m = std::abs(U(rng));
    s.meta.gamma = 2.0 + std::abs(U(rng));
    s.meta.Gamma2 = std::abs(U(rng)) / 3.0;
    s.meta.Gamma3 = std::abs(U(rng)) / 7.0;
    s.meta.sign = -1;
    s.meta.op = OperatorTag::Hminus;
    return s;
}

void same_series(const CountingSeries& a, const CountingSeries& b) {
    REQUIRE(a.lambda.size() == b.lambda.size());
    for (size_t i = 0; i < a.lambda.size(); ++i) {
        CHECK(std::memcmp(&a.lambda[i], &b.lambda[i], sizeof(double)) == 0);
        CHECK(a.counts[i] == b.counts[i]);
    }
    CHECK(a.meta.L == b.meta.L);
    CHECK(a.meta.boundary == b.meta.boundary);
    CHECK(a.meta.sign == b.meta.sign);
    CHECK(a.meta.op == b.meta.op);
    CHECK(a.meta.m == b.meta.m);
    CHECK(a.meta.gamma == b.meta.gamma);
    CHECK(a.meta.Gamma2 == b.meta.Gamma2);
    CHECK(a.meta.Gamma3 == b.meta.Gamma3);
}

boost::property_tree::ptree tree(std::initializer_list<std::pair<std::string, std::string>> kv) {
    boost::property_tree::ptree t;
    for (const auto& [k, v] : kv) t.put(k, v);
    return t;
}

}  // namespace

TEST_CASE("series csv: header, empty series, ssf tag") {
    auto d = scratch("csv");
    CountingSeries s;
    s.meta.op = OperatorTag::ssf;
    io::write_series_csv(s, (d / "empty.csv").string());
    auto l = lines(d / "empty.csv");
    REQUIRE(l.size() == 2);
    CHECK(l[0][0] == '#');
    CHECK(l[1] == "lambda,count,operator,L,m,gamma,Gamma2,Gamma3");
    CHECK(io::read_series_csv((d / "empty.csv").string()).lambda.empty());

    s.lambda = {0.5, 0.25};
    s.counts = {3, -2};
    s.meta.L = 8;
    io::write_series_csv(s, (d / "ssf.csv").string());
    l = lines(d / "ssf.csv");
    REQUIRE(l.size() == 4);
    CHECK(l[2].find(",ssf,") != std::string::npos);
    CHECK(l[2].rfind("0.5,3,ssf,8,", 0) == 0);
}

TEST_CASE("series round trips are bit exact") {
    auto d = scratch("roundtrip");
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_series(rng, 1 + trial * 7);
        io::export_series(s, (d / "s.csv").string(), "csv");
        same_series(s, io::read_series_csv((d / "s.csv").string()));
        io::export_series(s, (d / "s.json").string(), "json");
        same_series(s, io::series_from_json(io::read_json((d / "s.json").string())));
    }
    CHECK_THROWS(io::export_series(CountingSeries{}, (d / "x").string(), "xml"));
}

TEST_CASE("bands and thresholds outputs") {
    auto d = scratch("bands");
    io::ExperimentConfig c;
    c.command = "bands";
    c.m = 1.0;
    c.N = 64;
    c.out_dir = (d / "b").string();
    auto rep = io::run_experiment(c);
    CHECK(rep.status == 0);
    auto l = lines(d / "b" / "bands.csv");
    REQUIRE(l.size() == 4096 + 2);
    CHECK(l[1] == "xi1,xi2,z_minus,z_zero,z_plus");
    for (size_t i = 2; i < l.size(); ++i) {
        std::stringstream ss(l[i]);
        std::string cell;
        for (int k = 0; k < 4; ++k) std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == -1.0);
    }
    CHECK(fs::exists(d / "b" / "coarea_density.csv"));

    c.command = "thresholds";
    c.m = 0.0;
    c.out_dir = (d / "t").string();
    REQUIRE(io::run_experiment(c).status == 0);
    auto j = io::read_json((d / "t" / "thresholds.json").string());
    std::vector<std::pair<double, std::string>> got;
    for (const auto& t : j["thresholds"]) got.emplace_back(t["value"].get<double>(), t["kind"].get<std::string>());
    const double r8 = std::sqrt(8.0);
    const std::vector<std::pair<double, std::string>> want = {
        {-r8, "elliptic"}, {-2.0, "hyperbolic"}, {0.0, "dirac_point"}, {2.0, "hyperbolic"}, {r8, "elliptic"}};
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(got[i].first - want[i].first) <= 1e-15);
        CHECK(got[i].second == want[i].second);
    }
}

TEST_CASE("fit pipeline recovers a planted power law") {
    auto d = scratch("fit");
    CountingSeries s;
    s.meta.m = 1.0;
    s.meta.gamma = 4.0;
    s.meta.Gamma2 = s.meta.Gamma3 = 1.0;
    s.meta.L = 0;
    const double p = 0.5, C = 1000.0;
    for (int j = 0; j <= 30; ++j) {
        const double eps = 0.125 * std::pow(2.0, -0.5 * j);
        s.lambda.push_back(-1.0 + eps);
        s.counts.push_back(std::lround(C * std::pow(eps, -p)));
    }
    io::write_series_csv(s, (d / "planted.csv").string());
    io::ExperimentConfig c;
    c.command = "fit";
    c.series_path = (d / "planted.csv").string();
    c.out_dir = (d / "out").string();
    REQUIRE(io::run_experiment(c).status == 0);
    auto j = io::read_json((d / "out" / "fit.json").string());
    CHECK(std::abs(j["exponent"].get<double>() - p) <= 1e-4);
    CHECK(std::abs(j["constant"].get<double>() / C - 1.0) <= 1e-3);
    CHECK(j["predicted_exponent"].get<double>() == 0.5);
    CHECK(std::abs(j["predicted_constant"].get<double>() - M_PI) <= 1e-8);
}

TEST_CASE("config parsing and schema errors") {
    auto c = io::parse_config(tree({{"run.command", "count"}, {"numerics.L", "64, 96,128"}, {"model.m", "0.5"}}));
    CHECK(c.L == std::vector<int>{64, 96, 128});
    CHECK(c.m == 0.5);
    CHECK(c.seed == 0);

    auto field_of = [](const boost::property_tree::ptree& t) {
        try {
            io::parse_config(t);
        } catch (const ConfigError& e) {
            return e.field;
        }
        return std::string("none");
    };
    CHECK(field_of(tree({{"model.gama", "3"}})) == "model.gama");
    CHECK(field_of(tree({{"modle.gamma", "3"}})) == "modle");
    CHECK(field_of(tree({{"model.m", "abc"}})) == "model.m");
    CHECK(field_of(tree({{"model.m", "-1"}})) == "model.m");
    CHECK(field_of(tree({{"numerics.L", "4,x"}})) == "numerics.L");
    CHECK(field_of(tree({{"numerics.boundary", "twisted"}})) == "numerics.boundary");
    CHECK(field_of(tree({{"output.formats", "csv,xml"}})) == "output.formats");
    CHECK(field_of(tree({{"run.command", "bogus"}})) == "run.command");
    CHECK(field_of(tree({{"run.command", "toroidal"}, {"numerics.M", "48"}, {"numerics.N", "256"}})) ==
          "numerics.N");
    for (const char* cmd : {"count", "ssf", "fit", "constant", "toroidal", "validate"}) {
        CHECK(field_of(tree({{"run.command", cmd}, {"model.gamma", "2"}})) == "model.gamma");
    }
    try {
        io::parse_config(tree({{"run.command", "constant"}, {"model.gamma", "1.5"}}));
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gamma > 2") != std::string::npos);
    }
    CHECK(field_of(tree({{"run.command", "bands"}, {"model.gamma", "1.5"}})) == "none");
}

TEST_CASE("manifest is written on failure and reruns are byte identical") {
    auto d = scratch("manifest");
    io::ExperimentConfig c;
    c.command = "toroidal";
    c.M = {4};
    c.N = 64;
    c.out_dir = (d / "fail").string();
    auto rep = io::run_experiment(c);
    CHECK(rep.status == 2);
    CHECK_FALSE(rep.error.empty());
    auto man = io::read_json((d / "fail" / "manifest.json").string());
    CHECK(man["status"] == 2);
    CHECK(man["config"]["run"]["command"] == "toroidal");
    CHECK(man["version"] == io::version);

    c.command = "flatband";
    c.L = {4, 6};
    c.out_dir = (d / "a").string();
    REQUIRE(io::run_experiment(c).status == 0);
    c.out_dir = (d / "b").string();
    REQUIRE(io::run_experiment(c).status == 0);
    CHECK(slurp(d / "a" / "flatband.json") == slurp(d / "b" / "flatband.json"));
    auto ma = io::read_json((d / "a" / "manifest.json").string());
    auto mb = io::read_json((d / "b" / "manifest.json").string());
    ma["config"]["output"].erase("dir");
    mb["config"]["output"].erase("dir");
    CHECK(ma == mb);
}

TEST_CASE("coefficient csv") {
    auto d = scratch("coef");
    auto g = sample_grid(2, 16, [](const std::vector<double>&) { return std::complex<double>(2.0, -1.0); });
    io::write_coefficients_csv(fourier_coefficients(g, 2), (d / "c.csv").string());
    auto l = lines(d / "c.csv");
    REQUIRE(l.size() == 1 + 25);
    CHECK(l[0] == "mu1,mu2,re,im");
    CHECK(l[13] == "0,0,2,-1");
}
