#include "wkam/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wkam {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string orbit_csv(const Orbit& orbit) {
    std::ostringstream os;
    os << "t,x,u,p\n";
    for (std::size_t i = 0; i < orbit.samples.size(); ++i) {
        const ContactState& s = orbit.samples[i];
        os << fmt12(orbit.t_at(i)) << ',' << fmt12(s.x) << ',' << fmt12(s.u) << ',' << fmt12(s.p)
           << '\n';
    }
    return os.str();
}

std::string field_csv(const ScalarField& f) {
    std::ostringstream os;
    os << "x,value\n";
    for (int i = 0; i < f.grid.n; ++i)
        os << fmt12(f.grid.node(i)) << ',' << fmt12(f.values[i]) << '\n';
    return os.str();
}

std::string table_csv(const ActionTable& t) {
    std::ostringstream os;
    os << "t,x,value\n";
    for (int k = 0; k < t.n_layers(); ++k)
        for (int i = 0; i < t.grid.n; ++i)
            os << fmt12(t.t_of(k)) << ',' << fmt12(t.grid.node(i)) << ',' << fmt12(t.layers[k][i])
               << '\n';
    return os.str();
}

std::string minimizer_csv(const std::vector<CurvePoint>& c) {
    std::ostringstream os;
    os << "t,x,u\n";
    for (const CurvePoint& p : c)
        os << fmt12(p.t) << ',' << fmt12(p.x) << ',' << fmt12(p.u) << '\n';
    return os.str();
}

std::string set_csv(const SetEstimate& s) {
    std::ostringstream os;
    os << "x,u,p,kind,defect\n";
    for (const SetPoint& p : s.points)
        os << fmt12(p.s.x) << ',' << fmt12(p.s.u) << ',' << fmt12(p.s.p) << ','
           << set_kind_name(s.kind) << ',' << fmt12(p.defect) << '\n';
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

Check& ExperimentReport::check(const std::string& description, double expected, double observed,
                               double tolerance, const std::string& provenance) {
    require(!provenance.empty(), "report: every expected value needs a provenance tag");
    Check c;
    c.description = description;
    c.expected = expected;
    c.observed = observed;
    c.tolerance = tolerance;
    c.pass = std::fabs(observed - expected) <= tolerance;
    c.provenance = provenance;
    checks.push_back(std::move(c));
    return checks.back();
}

Check& ExperimentReport::check_flag(const std::string& description, bool pass, double observed,
                                    const std::string& provenance) {
    require(!provenance.empty(), "report: every expected value needs a provenance tag");
    Check c;
    c.description = description;
    c.expected = 1.0;
    c.observed = observed;
    c.tolerance = 0.0;
    c.pass = pass;
    c.provenance = provenance;
    checks.push_back(std::move(c));
    return checks.back();
}

bool ExperimentReport::all_pass() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    nlohmann::ordered_json jp = nlohmann::ordered_json::object();
    for (const auto& [k, v] : params) jp[k] = v;
    j["params"] = jp;
    j["checks"] = nlohmann::ordered_json::array();
    for (const Check& c : checks) {
        nlohmann::ordered_json jc;
        jc["description"] = c.description;
        jc["expected"] = fmt12(c.expected);
        jc["observed"] = fmt12(c.observed);
        jc["tolerance"] = fmt12(c.tolerance);
        jc["pass"] = c.pass;
        jc["provenance"] = c.provenance;
        j["checks"].push_back(jc);
    }
    j["all_pass"] = all_pass();
    nlohmann::ordered_json jt = nlohmann::ordered_json::array();
    for (const auto& [k, v] : tables) jt.push_back(k);
    j["tables"] = jt;
    return j.dump(2) + "\n";
}

void ExperimentReport::write(const std::string& dir) const {
    std::filesystem::create_directories(dir);
    write_file(dir + "/report.json", to_json());
    for (const auto& [name_, csv] : tables) write_file(dir + "/" + name_ + ".csv", csv);
}

}  // namespace wkam
