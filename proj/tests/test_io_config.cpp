#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>
#include <sstream>

#include "slabcgo/config.hpp"
#include "slabcgo/fit.hpp"
#include "slabcgo/io.hpp"

using namespace slabcgo;

TEST_CASE("config round-trips losslessly through serialization") {
    ExperimentConfig c;
    c.experiment = "identity-limits";
    c.scenario = "opp";
    c.tau_list = {4, 8, 16, 32, 64};
    c.xi = {0.9, 0.4, 0.3};
    c.contrast = 0.07;
    c.seed = 12345;
    c.L = 2.0;
    std::string text = serialize_config(c);
    std::istringstream in(text);
    ExperimentConfig back = parse_config(in);
    CHECK(back.experiment == c.experiment);
    CHECK(back.scenario == c.scenario);
    CHECK(back.tau_list == c.tau_list);
    CHECK(back.xi.x == c.xi.x);
    CHECK(back.contrast == c.contrast);
    CHECK(back.seed == c.seed);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("config validation rejects bad inputs") {
    ExperimentConfig c;
    c.tau_list = {};
    CHECK_THROWS(c.validate());
    c.tau_list = {8, 4};
    CHECK_THROWS(c.validate());
    c.tau_list = {4, 8};
    c.scenario = "diagonal";
    CHECK_THROWS(c.validate());
    c.scenario = "same";
    c.Rp = 0.1;  // violates R < R'
    CHECK_THROWS(c.validate());
    c.Rp = 0.7;
    CHECK_NOTHROW(c.validate());

    std::istringstream bad("[geometry]\nunknown_key = 3\n");
    CHECK_THROWS(parse_config(bad));
}

TEST_CASE("csv writer is deterministic") {
    auto write = [](const std::string& path) {
        CsvWriter w(path, {"tau", "value"}, "corrector decay sweep");
        w.row({2.0, 0.123456789012345678});
        w.row({4.0, 1e-17});
    };
    write("/tmp/slabcgo_t1.csv");
    write("/tmp/slabcgo_t2.csv");
    std::ifstream a("/tmp/slabcgo_t1.csv"), b("/tmp/slabcgo_t2.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("# ", 0) == 0);
    CHECK(sa.str().find("tau,value\n") != std::string::npos);
    std::remove("/tmp/slabcgo_t1.csv");
    std::remove("/tmp/slabcgo_t2.csv");
}

TEST_CASE("binary field dump round-trips") {
    Grid3 g;
    g.n = {5, 4, 3};
    g.h = {0.1, 0.2, 0.3};
    g.x0 = {-1, -1, 0};
    GridField f(g, 8);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    for (auto& v : f.data) v = cplx(d(rng), d(rng));
    dump_field(f, "/tmp/slabcgo_dump.bin");
    GridField back = load_field("/tmp/slabcgo_dump.bin");
    CHECK(back.grid.n == g.n);
    CHECK(back.ncomp == 8);
    CHECK(back.grid.h.z == g.h.z);
    CHECK(back.data == f.data);
    std::remove("/tmp/slabcgo_dump.bin");
}

TEST_CASE("log-log slope fit with R^2") {
    std::vector<double> x{8, 16, 32, 64}, y;
    for (double t : x) y.push_back(3.7 / t);
    auto fit = fit_loglog(x, y);
    CHECK(std::abs(fit.slope + 1.0) < 1e-12);
    CHECK(fit.r2 > 0.999999);
    CHECK_THROWS(fit_loglog({1.0}, {2.0}));

    CHECK(decreasing_tail({5, 4, 3, 2, 1}, 3));
    CHECK_FALSE(decreasing_tail({5, 4, 3, 3.5, 1}, 3));
}
