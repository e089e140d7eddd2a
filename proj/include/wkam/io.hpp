#ifndef WKAM_IO_HPP
#define WKAM_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "wkam/action.hpp"
#include "wkam/sets.hpp"

namespace wkam {

/// Fixed 12-significant-digit formatting; all CSV/JSON numbers go through this
/// so identical runs produce byte-identical artifacts.
std::string fmt12(double v);

std::string orbit_csv(const Orbit& orbit);
std::string field_csv(const ScalarField& f);
std::string table_csv(const ActionTable& t);                 // long format t,x,value
std::string minimizer_csv(const std::vector<CurvePoint>& c); // t,x,u
std::string set_csv(const SetEstimate& s);                   // x,u,p,kind,defect

void write_file(const std::string& path, const std::string& content);

/// One verifiable statement inside an experiment report. Every expected value
/// carries the provenance of where it came from; the builder rejects blanks.
struct Check {
    std::string description;
    double expected = 0.0;
    double observed = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string provenance;
};

struct ExperimentReport {
    std::string name;
    std::map<std::string, std::string> params;
    std::vector<Check> checks;
    std::map<std::string, std::string> tables;  // artifact name -> csv payload

    /// Adds |observed - expected| <= tolerance; throws if provenance is blank.
    Check& check(const std::string& description, double expected, double observed,
                 double tolerance, const std::string& provenance);
    /// Adds a pass/fail statement with an explicit verdict (for order/subset claims).
    Check& check_flag(const std::string& description, bool pass, double observed,
                      const std::string& provenance);
    bool all_pass() const;
    std::string to_json() const;
    /// Write report.json plus each table as <name>.csv under dir.
    void write(const std::string& dir) const;
};

}  // namespace wkam

#endif
