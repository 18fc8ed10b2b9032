// JSON/CSV serialization: table potentials, field tables, kernel exports,
// verdict reports. Key order is fixed and doubles are printed losslessly so
// repeated runs produce byte-identical files.
#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "gibbslab/criteria.hpp"
#include "gibbslab/fields.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab::io {

using json = nlohmann::ordered_json;

json site_to_json(const Site& s);
Site site_from_json(const json& j);
json volume_to_json(const Volume& v);
Volume volume_from_json(const json& j);

// {"alphabet_size": k, "bodies": [{"support": [[..]..], "values": [..]}..]}
json table_potential_to_json(const TablePotential& p);
TablePotential table_potential_from_json(const json& doc);

// {"window": [[..]..], "alphabet_size": k, "order": "lexicographic",
//  "probabilities": [..]}  (rational mode: probabilities as "p/q" strings)
json field_table_to_json(const FieldTable<double>& f);
FieldTable<double> field_table_from_json(const json& doc);
json field_table_to_json(const FieldTable<Rational>& f);
FieldTable<Rational> rational_field_table_from_json(const json& doc);

// Element list in canonical order: sites ascending, conditioning supports in
// mask order, conditioning configurations by rank.
json onepoint_kernel_to_json(const OnePointKernel& q, int max_support_sites,
                             int budget_bits = default_budget_bits);

json verdict_report_to_json(const VerdictReport& rep);

// defects.csv: site,symbol,radius,condition,defect (17 significant digits)
std::string defects_csv(const std::vector<DefectSchedule>& schedules);

struct ViolationRow {
    std::string check;
    std::string location;
    double defect = 0.0;
};

// violations.csv: check,location,defect
std::string violations_csv(const std::vector<ViolationRow>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

} // namespace gibbslab::io
