#include "qot/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qot {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a(const std::string& data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << data;
}

json marginal_json(const Marginal& m) {
    json j;
    switch (m.family()) {
        case Family::Uniform: j["family"] = "uniform"; break;
        case Family::Linear: j["family"] = "linear"; break;
        case Family::CosineBump: j["family"] = "cosine_bump"; break;
    }
    j["a"] = m.a();
    j["b"] = m.b();
    if (m.family() == Family::Linear) {
        j["c0"] = m.param_c0();
        j["c1"] = m.param_c1();
    }
    if (m.family() == Family::CosineBump) j["beta"] = m.param_beta();
    return j;
}

Marginal marginal_from_json(const json& j) {
    std::string fam = j.at("family");
    double a = j.at("a"), b = j.at("b");
    if (fam == "uniform") return Marginal::uniform(a, b);
    if (fam == "linear") return Marginal::linear(a, b, j.at("c0"), j.at("c1"));
    if (fam == "cosine_bump") return Marginal::cosine_bump(a, b, j.at("beta"));
    throw std::runtime_error("unknown marginal family: " + fam);
}

void write_potential_csv(const std::string& path, const GridFn& fn) {
    std::ostringstream os;
    os << "grid_value,potential_value\n";
    for (int i = 0; i < fn.n(); ++i)
        os << fmt17(fn.node(i)) << ',' << fmt17(fn.v[static_cast<size_t>(i)]) << '\n';
    spit(path, os.str());
}

GridFn read_potential_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "grid_value,potential_value")
        throw std::runtime_error(path + ": bad header");
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error(path + ": malformed row");
        try {
            t.push_back(std::stod(line.substr(0, comma)));
            v.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": malformed row");
        }
    }
    if (t.size() < 2) throw std::runtime_error(path + ": too few rows");
    return GridFn{t.front(), t.back(), std::move(v)};
}

}  // namespace

std::string hash_file(const std::string& path) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(slurp(path))));
    return buf;
}

std::vector<std::string> write_checkpoint(const std::string& stem, const PotentialPair& p) {
    std::string fp = stem + "_f.csv", gp = stem + "_g.csv", jp = stem + ".json";
    write_potential_csv(fp, p.f);
    write_potential_csv(gp, p.g);
    json j;
    j["eps"] = p.eps;
    j["nx"] = p.f.n();
    j["ny"] = p.g.n();
    j["resid0"] = p.resid0;
    j["resid1"] = p.resid1;
    j["iterations"] = p.iterations;
    j["normalization_shift"] = p.normalization_shift;
    j["marginal0"] = marginal_json(p.mu0);
    j["marginal1"] = marginal_json(p.mu1);
    spit(jp, j.dump(2) + "\n");
    return {fp, gp, jp};
}

PotentialPair read_checkpoint(const std::string& stem) {
    json j;
    try {
        j = json::parse(slurp(stem + ".json"));
    } catch (const json::exception& e) {
        throw std::runtime_error(stem + ".json: " + e.what());
    }
    try {
        PotentialPair p{j.at("eps"), marginal_from_json(j.at("marginal0")),
                        marginal_from_json(j.at("marginal1"))};
        p.f = read_potential_csv(stem + "_f.csv");
        p.g = read_potential_csv(stem + "_g.csv");
        p.resid0 = j.at("resid0");
        p.resid1 = j.at("resid1");
        p.iterations = j.at("iterations");
        p.normalization_shift = j.value("normalization_shift", 0.0);
        if (p.f.n() != j.at("nx").get<int>() || p.g.n() != j.at("ny").get<int>())
            throw std::runtime_error("grid size mismatch between CSVs and metadata");
        if (std::abs(p.f.a - p.mu0.a()) > 1e-12 || std::abs(p.g.a - p.mu1.a()) > 1e-12)
            throw std::runtime_error("grid does not cover the declared support");
        if (!(p.eps > 0)) throw std::runtime_error("nonpositive eps");
        return p;
    } catch (const json::exception& e) {
        throw std::runtime_error(stem + ".json: " + e.what());
    }
}

void write_sections_csv(const std::string& path, const PotentialPair& p) {
    SectionTable t = section_table(p);
    std::ostringstream os;
    os << "x,y_m,y_M,diameter,f_prime,f_second_or_nan,barycentric\n";
    for (int i = 0; i < p.f.n(); ++i) {
        const auto& s = t.rows[static_cast<size_t>(i)];
        double fp = p.mu1.moment1(s.y_m, s.y_M) / p.mu1.mass(s.y_m, s.y_M);
        double fs = std::nan("");
        try {
            fs = f_second(p, s.x, &t);
        } catch (const std::domain_error&) {
        }
        os << fmt17(s.x) << ',' << fmt17(s.y_m) << ',' << fmt17(s.y_M) << ','
           << fmt17(s.diameter()) << ',' << fmt17(fp) << ',' << fmt17(fs) << ','
           << fmt17(barycentric_projection(p, s.x)) << '\n';
    }
    spit(path, os.str());
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& recs) {
    std::ostringstream os;
    os << "epsilon,sup_diam,mean_diam,sigma_m_f,sigma_M_f,sigma_m_g,sigma_M_g,"
          "l2_hausdorff,l2_fprime_minus_T0,holder_f_minus_f0,cost_gap,"
          "l2_barycentric_minus_T0,resid0,resid1,iters,ms\n";
    for (const auto& r : recs) {
        os << fmt17(r.eps) << ',' << fmt17(r.sup_diam) << ',' << fmt17(r.mean_diam) << ','
           << fmt17(r.sigma_m_f) << ',' << fmt17(r.sigma_M_f) << ',' << fmt17(r.sigma_m_g)
           << ',' << fmt17(r.sigma_M_g) << ',' << fmt17(r.l2_hausdorff) << ','
           << fmt17(r.l2_fprime_T0) << ',' << fmt17(r.holder_f_f0) << ','
           << fmt17(r.cost_gap) << ',' << fmt17(r.l2_barycentric_T0) << ','
           << fmt17(r.resid0) << ',' << fmt17(r.resid1) << ',' << r.iters << ','
           << fmt17(r.ms) << '\n';
    }
    spit(path, os.str());
}

void write_fits_json(const std::string& path,
                     const std::vector<std::pair<std::string, RateFit>>& fits) {
    json arr = json::array();
    for (const auto& [name, f] : fits) {
        json j;
        j["quantity"] = name;
        j["slope"] = f.slope;
        j["intercept"] = f.intercept;
        j["r2"] = f.r2;
        j["n_points"] = f.n_points;
        arr.push_back(j);
    }
    spit(path, arr.dump(2) + "\n");
}

void write_manifest(const std::string& dir, const std::vector<std::string>& paths) {
    json files = json::object();
    for (const auto& p : paths)
        files[std::filesystem::path(p).filename().string()] = hash_file(p);
    json j;
    j["hash"] = "fnv1a64";
    j["files"] = files;
    spit((std::filesystem::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace qot
