#include "gibbslab/io.hpp"

#include <fstream>
#include <sstream>

namespace gibbslab::io {

json site_to_json(const Site& s) {
    json j = json::array();
    for (std::int32_t c : s.coords) j.push_back(c);
    return j;
}

Site site_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("site must be a non-empty array");
    Site s;
    for (const auto& c : j) s.coords.push_back(c.get<std::int32_t>());
    return s;
}

json volume_to_json(const Volume& v) {
    json j = json::array();
    for (const Site& s : v.sites()) j.push_back(site_to_json(s));
    return j;
}

Volume volume_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("volume must be an array of sites");
    std::vector<Site> sites;
    for (const auto& s : j) sites.push_back(site_from_json(s));
    return Volume(std::move(sites));
}

json table_potential_to_json(const TablePotential& p) {
    json doc;
    doc["alphabet_size"] = p.alphabet_size();
    json bodies = json::array();
    for (const auto& b : p.bodies()) {
        json jb;
        jb["support"] = volume_to_json(b.support);
        jb["values"] = b.values;
        bodies.push_back(std::move(jb));
    }
    doc["bodies"] = std::move(bodies);
    return doc;
}

TablePotential table_potential_from_json(const json& doc) {
    const int k = doc.at("alphabet_size").get<int>();
    std::vector<TablePotential::Body> bodies;
    for (const auto& jb : doc.at("bodies")) {
        TablePotential::Body b;
        b.support = volume_from_json(jb.at("support"));
        b.values = jb.at("values").get<std::vector<double>>();
        bodies.push_back(std::move(b));
    }
    return TablePotential(std::move(bodies), k);
}

namespace {

template <class R>
json field_table_to_json_impl(const FieldTable<R>& f) {
    json doc;
    doc["window"] = volume_to_json(f.window());
    doc["alphabet_size"] = f.alphabet_size();
    doc["order"] = "lexicographic";
    json probs = json::array();
    for (const R& p : f.table().p) {
        if constexpr (is_rational_v<R>) probs.push_back(scalar_to_string(p));
        else probs.push_back(p);
    }
    doc["probabilities"] = std::move(probs);
    return doc;
}

void check_order_field(const json& doc) {
    if (doc.contains("order") && doc.at("order").get<std::string>() != "lexicographic")
        throw std::invalid_argument("field table order must be \"lexicographic\"");
}

} // namespace

json field_table_to_json(const FieldTable<double>& f) { return field_table_to_json_impl(f); }
json field_table_to_json(const FieldTable<Rational>& f) { return field_table_to_json_impl(f); }

FieldTable<double> field_table_from_json(const json& doc) {
    check_order_field(doc);
    DistributionTable t;
    t.domain = volume_from_json(doc.at("window"));
    t.alphabet_size = doc.at("alphabet_size").get<int>();
    t.p = doc.at("probabilities").get<std::vector<double>>();
    return FieldTable<double>(std::move(t));
}

FieldTable<Rational> rational_field_table_from_json(const json& doc) {
    check_order_field(doc);
    RationalTable t;
    t.domain = volume_from_json(doc.at("window"));
    t.alphabet_size = doc.at("alphabet_size").get<int>();
    Rational total = 0;
    for (const auto& v : doc.at("probabilities")) {
        Rational r = v.is_string() ? rational_from_string(v.get<std::string>())
                                   : Rational(v.get<long>());
        t.p.push_back(r);
        total += r;
    }
    // integer weights are accepted and normalized exactly
    if (total != 1)
        for (auto& r : t.p) r /= total;
    return FieldTable<Rational>(std::move(t));
}

json onepoint_kernel_to_json(const OnePointKernel& q, int max_support_sites, int budget_bits) {
    json doc;
    doc["window"] = volume_to_json(q.window());
    doc["alphabet_size"] = q.alphabet_size();
    doc["mode"] = q.mode() == ConditioningMode::full_complement ? "full_complement"
                                                                : "finite_support";
    json elements = json::array();
    const int k = q.alphabet_size();
    for (const Site& t : q.window().sites()) {
        const Volume rest = volume_difference(q.window(), Volume({t}));
        std::vector<Volume> supports;
        if (q.mode() == ConditioningMode::full_complement) {
            supports.push_back(rest);
        } else {
            const std::size_t m = rest.size();
            if (m > 20) throw budget_error("kernel export window too large");
            for (std::uint64_t mask = 1; mask < (1ull << m); ++mask) {
                if (max_support_sites > 0 &&
                    __builtin_popcountll(mask) > max_support_sites)
                    continue;
                std::vector<Site> chosen;
                for (std::size_t i = 0; i < m; ++i)
                    if (mask & (1ull << i)) chosen.push_back(rest.site(i));
                supports.push_back(Volume(std::move(chosen)));
            }
        }
        for (const Volume& S : supports) {
            const std::uint64_t n = config_count(S.size(), k, budget_bits);
            for (std::uint64_t r = 0; r < n; ++r) {
                const Configuration cond = config_from_rank(S, k, r);
                const auto tbl = q.element(t, cond);
                json el;
                el["site"] = site_to_json(t);
                el["conditioning_support"] = volume_to_json(S);
                json vals = json::array();
                for (Symbol v : cond.values()) vals.push_back(int(v));
                el["conditioning_values"] = std::move(vals);
                el["probabilities"] = tbl.p;
                elements.push_back(std::move(el));
            }
        }
    }
    doc["elements"] = std::move(elements);
    return doc;
}

json verdict_report_to_json(const VerdictReport& rep) {
    json doc;
    doc["verdict"] = to_string(rep.verdict);
    doc["min_positivity"] = rep.min_positivity;
    doc["positivity_ok"] = rep.positivity_ok;
    doc["decay_monotone"] = rep.decay_monotone;
    doc["decay_below_threshold"] = rep.decay_below_threshold;
    doc["max_final_truncation_defect"] = rep.max_final_truncation_defect;
    doc["window_sites"] = rep.window_sites;
    doc["positivity_support_cap"] = rep.positivity_support_cap;
    doc["scan_semantics"] = rep.scan_semantics;
    doc["thresholds"] = {{"positivity_floor", rep.thresholds.positivity_floor},
                         {"decay_threshold", rep.thresholds.decay_threshold},
                         {"flat_floor", rep.thresholds.flat_floor},
                         {"monotonicity_slack", rep.thresholds.monotonicity_slack}};
    json scheds = json::array();
    for (const auto& s : rep.schedules) {
        json js;
        js["site"] = site_to_json(s.t);
        js["symbol"] = int(s.x);
        js["condition"] = s.condition;
        js["radii"] = s.radii;
        js["defects"] = s.defects;
        js["truncated"] = s.truncated;
        scheds.push_back(std::move(js));
    }
    doc["schedules"] = std::move(scheds);
    return doc;
}

namespace {

std::string csv_site(const Site& s) {
    std::ostringstream os;
    for (std::size_t i = 0; i < s.coords.size(); ++i) {
        if (i) os << ";";
        os << s.coords[i];
    }
    return os.str();
}

} // namespace

std::string defects_csv(const std::vector<DefectSchedule>& schedules) {
    std::ostringstream os;
    os << "site,symbol,radius,condition,defect\n";
    for (const auto& s : schedules)
        for (std::size_t i = 0; i < s.radii.size(); ++i)
            os << csv_site(s.t) << "," << int(s.x) << "," << s.radii[i] << "," << s.condition
               << "," << scalar_to_string(s.defects[i]) << "\n";
    return os.str();
}

std::string violations_csv(const std::vector<ViolationRow>& rows) {
    std::ostringstream os;
    os << "check,location,defect\n";
    for (const auto& r : rows)
        os << r.check << "," << r.location << "," << scalar_to_string(r.defect) << "\n";
    return os.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << contents;
}

} // namespace gibbslab::io
