#include "qot/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qot {

namespace {

std::string trim(const std::string& s) {
    size_t i = s.find_first_not_of(" \t\r");
    if (i == std::string::npos) return "";
    size_t j = s.find_last_not_of(" \t\r");
    return s.substr(i, j - i + 1);
}

using Section = std::map<std::string, std::string>;

struct Parsed {
    std::map<std::string, Section> sections;
    std::vector<std::string> errors;
};

Parsed tokenize(const std::string& text) {
    Parsed out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                out.errors.push_back("line " + std::to_string(lineno) + ": unterminated section");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            out.sections[section];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos || section.empty()) {
            out.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        out.sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

class Reader {
public:
    Reader(const Section& s, std::string prefix, std::vector<std::string>& errs)
        : s_(s), prefix_(std::move(prefix)), errs_(errs) {}

    ~Reader() {
        for (const auto& [k, v] : s_)
            if (!used_.count(k)) errs_.push_back(prefix_ + k + ": unknown key");
    }

    bool has(const std::string& k) {
        used_.insert(k);
        return s_.count(k) > 0;
    }

    std::string str(const std::string& k, const std::string& dflt) {
        return has(k) ? s_.at(k) : dflt;
    }

    double num(const std::string& k, double dflt) {
        if (!has(k)) return dflt;
        try {
            size_t pos = 0;
            double v = std::stod(s_.at(k), &pos);
            if (pos != s_.at(k).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::exception&) {
            errs_.push_back(prefix_ + k + ": not a number: " + s_.at(k));
            return dflt;
        }
    }

    std::vector<double> list(const std::string& k) {
        std::vector<double> out;
        if (!has(k)) return out;
        std::istringstream in(s_.at(k));
        std::string tok;
        while (std::getline(in, tok, ',')) {
            try {
                out.push_back(std::stod(trim(tok)));
            } catch (const std::exception&) {
                errs_.push_back(prefix_ + k + ": not a number: " + trim(tok));
            }
        }
        return out;
    }

private:
    const Section& s_;
    std::string prefix_;
    std::vector<std::string>& errs_;
    std::set<std::string> used_;
};

MarginalSpec read_marginal(const Section& s, const std::string& name,
                           std::vector<std::string>& errs) {
    MarginalSpec m;
    Reader r(s, name + ".", errs);
    m.family = r.str("family", "uniform");
    m.a = r.num("a", 0.0);
    m.b = r.num("b", 1.0);
    m.c0 = r.num("c0", 0.0);
    m.c1 = r.num("c1", 0.0);
    m.beta = r.num("beta", 0.0);
    if (m.family != "uniform" && m.family != "linear" && m.family != "cosine_bump")
        errs.push_back(name + ".family: unknown family '" + m.family + "'");
    if (!(m.a < m.b)) errs.push_back(name + ": requires a < b");
    if (m.family == "cosine_bump" && !(std::abs(m.beta) < 1.0))
        errs.push_back(name + ".beta: requires |beta| < 1");
    if (m.family == "linear") {
        double lo = m.c0 + m.c1 * m.a, hi = m.c0 + m.c1 * m.b;
        if (!(lo > 0) || !(hi > 0))
            errs.push_back(name + ": linear density must be positive on [a,b]");
    }
    return m;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error([&] {
          std::string m = "invalid config:";
          for (const auto& e : errs) m += "\n  " + e;
          return m;
      }()),
      errors(std::move(errs)) {}

Marginal MarginalSpec::build() const {
    if (family == "uniform") return Marginal::uniform(a, b);
    if (family == "linear") return Marginal::linear(a, b, c0, c1);
    if (family == "cosine_bump") return Marginal::cosine_bump(a, b, beta);
    throw std::invalid_argument("unknown marginal family: " + family);
}

ExperimentConfig parse_config(const std::string& text) {
    Parsed p = tokenize(text);
    std::vector<std::string> errs = std::move(p.errors);
    ExperimentConfig cfg;

    static const Section empty;
    auto section = [&](const char* name) -> const Section& {
        auto it = p.sections.find(name);
        return it == p.sections.end() ? empty : it->second;
    };
    for (const auto& [name, _] : p.sections)
        if (name != "marginal0" && name != "marginal1" && name != "run")
            errs.push_back("unknown section [" + name + "]");

    cfg.marginal0 = read_marginal(section("marginal0"), "marginal0", errs);
    cfg.marginal1 = read_marginal(section("marginal1"), "marginal1", errs);

    {
        Reader r(section("run"), "run.", errs);
        std::string mode = r.str("mode", "solve");
        if (mode == "solve") cfg.mode = RunMode::Solve;
        else if (mode == "sweep") cfg.mode = RunMode::Sweep;
        else if (mode == "check") cfg.mode = RunMode::Check;
        else if (mode == "oracle") cfg.mode = RunMode::Oracle;
        else errs.push_back("run.mode: unknown mode '" + mode + "'");

        cfg.eps = r.list("eps");
        if (cfg.eps.empty() && r.has("eps"))
            errs.push_back("run.eps: empty list");
        for (double e : cfg.eps)
            if (!(e > 0)) errs.push_back("run.eps: values must be positive");
        std::vector<double> sorted = cfg.eps;
        std::sort(sorted.rbegin(), sorted.rend());
        cfg.eps = sorted;

        cfg.sweep.solver.nx = static_cast<int>(r.num("nx", cfg.sweep.solver.nx));
        cfg.sweep.solver.ny = static_cast<int>(r.num("ny", cfg.sweep.solver.ny));
        cfg.sweep.solver.tol = r.num("tol", cfg.sweep.solver.tol);
        cfg.sweep.solver.max_outer =
            static_cast<int>(r.num("max_outer", cfg.sweep.solver.max_outer));
        cfg.sweep.nodes_in_support =
            static_cast<int>(r.num("nodes_in_support", cfg.sweep.nodes_in_support));
        cfg.sweep.max_grid = static_cast<int>(r.num("max_grid", cfg.sweep.max_grid));
        cfg.outdir = r.str("outdir", ".");
        cfg.seed = static_cast<unsigned>(r.num("seed", 0.0));
        if (cfg.sweep.solver.nx < 64 || cfg.sweep.solver.ny < 64)
            errs.push_back("run.nx/ny: grid sizes must be >= 64");
        if (!(cfg.sweep.solver.tol > 0)) errs.push_back("run.tol: must be positive");
    }

    if (cfg.eps.empty() && cfg.mode != RunMode::Check) {
        if (cfg.mode == RunMode::Sweep) cfg.eps = default_eps_ladder();
        else cfg.eps = {1e-2};
    }

    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

}  // namespace qot
