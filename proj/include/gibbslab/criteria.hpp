// Gibbsianness diagnostics: envelope brackets, uniform nonnullness, the
// oscillation/truncation defect families over growing conditioning volumes,
// and a three-valued verdict report.
//
// Defect families are tagged with the single letters used in the reports:
//   A  Cauchy defect of one-point conditionals under growing conditioning
//      supports, sup over window boundaries (field subjects);
//   C  spread over pairs of conditionings agreeing on Lambda;
//   D  as C but both conditionings on one common support;
//   E  deviation from the conditioning truncated to Lambda.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gibbslab/fields.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

struct Thresholds {
    double positivity_floor = 1e-6;
    double decay_threshold = 1e-3;
    double flat_floor = 5e-2;
    double monotonicity_slack = 1e-9;
};

enum class Verdict { gibbs_consistent, non_gibbs_flagged, inconclusive };
const char* to_string(Verdict v);

struct DefectSchedule {
    Site t;
    Symbol x = 0;
    std::string condition; // "A", "C", "D" or "E"
    std::vector<int> radii;
    std::vector<double> defects;
    bool truncated = false; // budget ran out before the last radius
};

struct VerdictReport {
    double min_positivity = 0.0;
    std::vector<DefectSchedule> schedules;
    bool positivity_ok = false;
    bool decay_monotone = false; // every E schedule non-increasing within slack
    bool decay_below_threshold = false;
    double max_final_truncation_defect = 0.0;
    Verdict verdict = Verdict::inconclusive;
    int window_sites = 0;
    int positivity_support_cap = 0; // 0 = unbounded within the window
    std::string scan_semantics;
    Thresholds thresholds;
};

// min over extensions (lower) and max (upper) of the one-point kernel value
// at x over full boundaries extending z; q must be full-complement.
std::pair<double, double> sullivan_envelope(const OnePointKernel& q, const Site& t, Symbol x,
                                            const Volume& lambda, const Configuration& z,
                                            int budget_bits = default_budget_bits);

struct OscillationDefects {
    double agreement = 0.0;    // C
    double same_support = 0.0; // D
    double truncation = 0.0;   // E
};

// One scan over all conditioning supports J with lambda ⊆ J ⊆ W \ t and all
// configurations on them yields the three defects; q must be finite-support.
OscillationDefects oscillation_defects(const OnePointKernel& q, const Site& t, Symbol x,
                                       const Volume& lambda,
                                       int budget_bits = default_budget_bits);

double agreement_oscillation(const OnePointKernel& q, const Site& t, Symbol x,
                             const Volume& lambda, int budget_bits = default_budget_bits);
double same_support_oscillation(const OnePointKernel& q, const Site& t, Symbol x,
                                const Volume& lambda, int budget_bits = default_budget_bits);
double truncation_deviation(const OnePointKernel& q, const Site& t, Symbol x,
                            const Volume& lambda, int budget_bits = default_budget_bits);

// radius-R ball around t inside the window, t excluded
Volume window_ball(const Volume& window, const Site& t, int radius);

// Cauchy ("A") schedule of a field subject: per radius, the truncation
// deviation of its one-point finite-conditional values at the radius ball.
// A budget overrun marks the schedule truncated instead of throwing.
DefectSchedule conditional_cauchy_schedule(const FieldT<double>& field, const Site& t, Symbol x,
                                           const std::vector<int>& radii,
                                           int budget_bits = default_budget_bits);

struct NonnullScanScope {
    std::vector<Site> sites;   // empty: every window site
    int max_support_sites = 0; // 0: unbounded within the window
    int budget_bits = default_budget_bits;
};

// min over scanned (t, conditioning, x) of the kernel value.
double uniform_nonnullness(const OnePointKernel& q, const NonnullScanScope& scope = {});

// Diagnostic verdict for a field subject over the radius schedule. The rule:
// gibbs-consistent when positivity clears the floor and every E schedule is
// non-increasing within slack and ends below the decay threshold;
// non-gibbs-flagged when some E schedule still sits above the flat floor at
// the largest radius (or the subject is not strictly positive); otherwise
// inconclusive.
VerdictReport gibbs_verdict(const FieldT<double>& subject, const std::vector<Site>& sites,
                            const std::vector<int>& radii, const Thresholds& thresholds = {},
                            int budget_bits = default_budget_bits);

} // namespace gibbslab
