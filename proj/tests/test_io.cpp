#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "qot/io.hpp"

using namespace qot;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string first_line(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() /
              ("qot_io_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string sub(const std::string& name) const { return (dir / name).string(); }
    static int& counter() { static int c = 0; return c; }
};

PotentialPair solved_pair(double eps = 1e-2) {
    SolverConfig cfg;
    cfg.nx = cfg.ny = 129;
    Marginal u = Marginal::uniform(0, 1);
    return solve(u, u, eps, cfg);
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    for (double v : {1.0 / 3.0, 1e-17, -0.1, 12345.6789, 0.0})
        CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("fnv1a reference values") {
    // standard 64-bit FNV-1a test vectors
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 12638187200555641996ull);
    CHECK(fnv1a("hello") != fnv1a("hellp"));
}

TEST_CASE("checkpoint round-trip is exact") {
    TempDir td;
    PotentialPair p = solved_pair();
    std::vector<std::string> paths = write_checkpoint(td.sub("run"), p);
    CHECK(paths.size() == 3);
    CHECK(first_line(td.sub("run_f.csv")) == "grid_value,potential_value");
    PotentialPair q = read_checkpoint(td.sub("run"));
    CHECK(q.eps == p.eps);
    CHECK(q.f.n() == p.f.n());
    for (int i = 0; i < p.f.n(); ++i) {
        CHECK(q.f.v[static_cast<size_t>(i)] == p.f.v[static_cast<size_t>(i)]);
        CHECK(q.g.v[static_cast<size_t>(i)] == p.g.v[static_cast<size_t>(i)]);
    }
    CHECK(q.resid0 == p.resid0);
    CHECK(q.normalization_shift == p.normalization_shift);
    CHECK(q.mu0.describe() == p.mu0.describe());
}

TEST_CASE("checkpoint rewrites are byte-identical") {
    TempDir td;
    PotentialPair p = solved_pair();
    write_checkpoint(td.sub("a"), p);
    write_checkpoint(td.sub("b"), p);
    CHECK(slurp(td.sub("a_f.csv")) == slurp(td.sub("b_f.csv")));
    CHECK(hash_file(td.sub("a_g.csv")) == hash_file(td.sub("b_g.csv")));
}

TEST_CASE("read_checkpoint rejects corruption") {
    TempDir td;
    PotentialPair p = solved_pair();
    write_checkpoint(td.sub("run"), p);

    CHECK_THROWS_AS(read_checkpoint(td.sub("missing")), std::runtime_error);

    // truncated potential table
    {
        std::string text = slurp(td.sub("run_f.csv"));
        std::ofstream out(td.sub("run_f.csv"), std::ios::trunc);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(read_checkpoint(td.sub("run")), std::runtime_error);

    write_checkpoint(td.sub("run"), p);
    // mangled metadata
    {
        std::ofstream out(td.sub("run.json"), std::ios::trunc);
        out << "{ not json";
    }
    CHECK_THROWS_AS(read_checkpoint(td.sub("run")), std::runtime_error);
}

TEST_CASE("sections csv layout") {
    TempDir td;
    PotentialPair p = solved_pair(2e-3);
    write_sections_csv(td.sub("sections.csv"), p);
    CHECK(first_line(td.sub("sections.csv")) ==
          "x,y_m,y_M,diameter,f_prime,f_second_or_nan,barycentric");
    std::string body = slurp(td.sub("sections.csv"));
    // curvature is undefined at clipped sections: nan must appear near the edges
    CHECK(body.find("nan") != std::string::npos);
    size_t rows = static_cast<size_t>(std::count(body.begin(), body.end(), '\n'));
    CHECK(rows == static_cast<size_t>(p.f.n()) + 1);
}

TEST_CASE("sweep csv layout") {
    TempDir td;
    SweepRecord r;
    r.eps = 1e-2;
    r.sup_diam = 0.5;
    r.iters = 12;
    write_sweep_csv(td.sub("sweep.csv"), {r});
    CHECK(first_line(td.sub("sweep.csv")) ==
          "epsilon,sup_diam,mean_diam,sigma_m_f,sigma_M_f,sigma_m_g,sigma_M_g,"
          "l2_hausdorff,l2_fprime_minus_T0,holder_f_minus_f0,cost_gap,"
          "l2_barycentric_minus_T0,resid0,resid1,iters,ms");
    CHECK(slurp(td.sub("sweep.csv")).find("0.01,0.5") != std::string::npos);
}

TEST_CASE("fits json layout") {
    TempDir td;
    RateFit fit;
    fit.slope = 1.0 / 3.0;
    fit.intercept = 0.5;
    fit.r2 = 0.999;
    fit.n_points = 7;
    write_fits_json(td.sub("fits.json"), {{"sup_diam", fit}});
    std::string text = slurp(td.sub("fits.json"));
    CHECK(text.find("sup_diam") != std::string::npos);
    CHECK(text.find("slope") != std::string::npos);
    CHECK(text.find("r2") != std::string::npos);
    CHECK(text.find("0.333333333333") != std::string::npos);
}

TEST_CASE("manifest lists every artifact with its hash") {
    TempDir td;
    {
        std::ofstream(td.sub("one.csv")) << "alpha\n";
        std::ofstream(td.sub("two.csv")) << "beta\n";
    }
    write_manifest(td.dir.string(), {td.sub("one.csv"), td.sub("two.csv")});
    std::string text = slurp(td.sub("manifest.json"));
    CHECK(text.find("one.csv") != std::string::npos);
    CHECK(text.find(hash_file(td.sub("two.csv"))) != std::string::npos);
    CHECK(text.find("fnv1a64") != std::string::npos);
}
