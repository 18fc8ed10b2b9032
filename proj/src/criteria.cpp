#include "gibbslab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace gibbslab {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::gibbs_consistent: return "gibbs-consistent";
        case Verdict::non_gibbs_flagged: return "non-gibbs-flagged";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::pair<double, double> sullivan_envelope(const OnePointKernel& q, const Site& t, Symbol x,
                                            const Volume& lambda, const Configuration& z,
                                            int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    if (!rest.contains(lambda)) throw std::domain_error("lambda must avoid t inside the window");
    if (!(z.support() == lambda)) throw std::domain_error("z must live on lambda");
    const Volume free = volume_difference(rest, lambda);
    const int k = q.alphabet_size();
    const std::int64_t n = static_cast<std::int64_t>(config_count(free.size(), k, budget_bits));
    double lo = 2.0, hi = -1.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(min : lo) reduction(max : hi)
    for (std::int64_t r = 0; r < n; ++r) {
        const Configuration ext = config_from_rank(free, k, static_cast<std::uint64_t>(r));
        const double v = q.element_ptr(t, free.empty() ? z : concatenate(z, ext))->p[x];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

OscillationDefects oscillation_defects(const OnePointKernel& q, const Site& t, Symbol x,
                                       const Volume& lambda, int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    if (lambda.empty())
        throw std::domain_error("oscillation defects need a non-empty agreement volume");
    if (!rest.contains(lambda)) throw std::domain_error("lambda must avoid t inside the window");
    const Volume others = volume_difference(rest, lambda);
    const int k = q.alphabet_size();
    const std::size_t m = others.size();
    const double bits = static_cast<double>(lambda.size()) * std::log2(double(k)) +
                        static_cast<double>(m) * std::log2(double(k + 1));
    if (bits > budget_bits) {
        std::ostringstream os;
        os << "oscillation scan needs " << bits << " bits, budget is " << budget_bits;
        throw budget_error(os.str());
    }

    const std::uint64_t groups = config_count(lambda.size(), k, 62);
    std::vector<double> base(groups);
    for (std::uint64_t z = 0; z < groups; ++z)
        base[z] = q.element_ptr(t, config_from_rank(lambda, k, z))->p[x];

    std::vector<double> cmax(groups, -1.0), cmin(groups, 2.0), edev(groups, 0.0);
    double dworst = 0.0;
    const std::int64_t masks = 1ll << m;
#pragma omp parallel
    {
        std::vector<double> l_cmax(groups, -1.0), l_cmin(groups, 2.0), l_edev(groups, 0.0);
        double l_d = 0.0;
        std::vector<double> jmax(groups), jmin(groups);
#pragma omp for schedule(dynamic) nowait
        for (std::int64_t mask = 0; mask < masks; ++mask) {
            std::vector<Site> extra;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1ll << i)) extra.push_back(others.site(i));
            const Volume J = volume_union(lambda, Volume(std::move(extra)));
            std::vector<std::size_t> lam_pos;
            lam_pos.reserve(lambda.size());
            for (std::size_t i = 0; i < lambda.size(); ++i)
                lam_pos.push_back(*J.index_of(lambda.site(i)));
            std::fill(jmax.begin(), jmax.end(), -1.0);
            std::fill(jmin.begin(), jmin.end(), 2.0);
            const std::uint64_t n = config_count(J.size(), k, 62);
            std::vector<Symbol> vals(J.size());
            for (std::uint64_t r = 0; r < n; ++r) {
                decode_rank(r, k, J.size(), vals.data());
                const double v = q.element_ptr(t, Configuration(J, vals))->p[x];
                std::uint64_t z = 0;
                for (std::size_t i : lam_pos) z = z * k + vals[i];
                l_cmax[z] = std::max(l_cmax[z], v);
                l_cmin[z] = std::min(l_cmin[z], v);
                l_edev[z] = std::max(l_edev[z], std::abs(v - base[z]));
                jmax[z] = std::max(jmax[z], v);
                jmin[z] = std::min(jmin[z], v);
            }
            for (std::uint64_t z = 0; z < groups; ++z)
                if (jmax[z] >= 0.0) l_d = std::max(l_d, jmax[z] - jmin[z]);
        }
#pragma omp critical
        {
            for (std::uint64_t z = 0; z < groups; ++z) {
                cmax[z] = std::max(cmax[z], l_cmax[z]);
                cmin[z] = std::min(cmin[z], l_cmin[z]);
                edev[z] = std::max(edev[z], l_edev[z]);
            }
            dworst = std::max(dworst, l_d);
        }
    }

    OscillationDefects out;
    for (std::uint64_t z = 0; z < groups; ++z) {
        out.agreement = std::max(out.agreement, cmax[z] - cmin[z]);
        out.truncation = std::max(out.truncation, edev[z]);
    }
    out.same_support = dworst;
    return out;
}

double agreement_oscillation(const OnePointKernel& q, const Site& t, Symbol x,
                             const Volume& lambda, int budget_bits) {
    return oscillation_defects(q, t, x, lambda, budget_bits).agreement;
}

double same_support_oscillation(const OnePointKernel& q, const Site& t, Symbol x,
                                const Volume& lambda, int budget_bits) {
    return oscillation_defects(q, t, x, lambda, budget_bits).same_support;
}

double truncation_deviation(const OnePointKernel& q, const Site& t, Symbol x,
                            const Volume& lambda, int budget_bits) {
    return oscillation_defects(q, t, x, lambda, budget_bits).truncation;
}

Volume window_ball(const Volume& window, const Site& t, int radius) {
    std::vector<Site> sites;
    for (const Site& s : window.sites())
        if (!(s == t) && linf_distance(s, t) <= radius) sites.push_back(s);
    return Volume(std::move(sites));
}

DefectSchedule conditional_cauchy_schedule(const FieldT<double>& field, const Site& t, Symbol x,
                                           const std::vector<int>& radii, int budget_bits) {
    auto kernel = FieldOnePoint<double>(
        std::shared_ptr<const FieldT<double>>(&field, [](const FieldT<double>*) {}));
    DefectSchedule sched;
    sched.t = t;
    sched.x = x;
    sched.condition = "A";
    for (int radius : radii) {
        const Volume ball = window_ball(field.window(), t, radius);
        try {
            const double d = oscillation_defects(kernel, t, x, ball, budget_bits).truncation;
            sched.radii.push_back(radius);
            sched.defects.push_back(d);
        } catch (const budget_error&) {
            sched.truncated = true;
            break;
        }
    }
    return sched;
}

double uniform_nonnullness(const OnePointKernel& q, const NonnullScanScope& scope) {
    const int k = q.alphabet_size();
    std::vector<Site> sites = scope.sites;
    if (sites.empty()) sites = q.window().sites();
    double worst = 2.0;
    for (const Site& t : sites) {
        const Volume rest = volume_difference(q.window(), Volume({t}));
        if (q.mode() == ConditioningMode::full_complement) {
            const std::int64_t n =
                static_cast<std::int64_t>(config_count(rest.size(), k, scope.budget_bits));
            double local = 2.0;
#pragma omp parallel for schedule(dynamic, 64) reduction(min : local)
            for (std::int64_t r = 0; r < n; ++r) {
                const auto tbl = q.element_ptr(t, config_from_rank(rest, k, std::uint64_t(r)));
                for (double v : tbl->p) local = std::min(local, v);
            }
            worst = std::min(worst, local);
            continue;
        }
        const std::size_t m = rest.size();
        const double bits = static_cast<double>(m) * std::log2(double(k + 1));
        if (bits > scope.budget_bits)
            throw budget_error("nonnullness scan exceeds budget; cap the support size");
        const std::int64_t masks = 1ll << m;
        const int cap = scope.max_support_sites;
        double local = 2.0;
#pragma omp parallel for schedule(dynamic) reduction(min : local)
        for (std::int64_t mask = 1; mask < masks; ++mask) {
            if (cap > 0 && __builtin_popcountll(mask) > cap) continue;
            std::vector<Site> chosen;
            for (std::size_t i = 0; i < m; ++i)
                if (mask & (1ll << i)) chosen.push_back(rest.site(i));
            const Volume S(std::move(chosen));
            const std::uint64_t n = config_count(S.size(), k, 62);
            for (std::uint64_t r = 0; r < n; ++r) {
                const auto tbl = q.element_ptr(t, config_from_rank(S, k, r));
                for (double v : tbl->p) local = std::min(local, v);
            }
        }
        worst = std::min(worst, local);
    }
    return worst;
}

VerdictReport gibbs_verdict(const FieldT<double>& subject, const std::vector<Site>& sites,
                            const std::vector<int>& radii, const Thresholds& thresholds,
                            int budget_bits) {
    if (radii.empty()) throw std::invalid_argument("radius schedule must not be empty");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1]) throw std::invalid_argument("radii must increase");

    VerdictReport rep;
    rep.thresholds = thresholds;
    rep.window_sites = static_cast<int>(subject.window().size());
    rep.scan_semantics =
        "sup over exterior conditions realized as exhaustive scan over all window extensions";

    if (!subject.strictly_positive()) {
        rep.verdict = Verdict::non_gibbs_flagged;
        return rep;
    }

    auto holder = std::shared_ptr<const FieldT<double>>(&subject, [](const FieldT<double>*) {});
    const FieldOnePoint<double> kernel(holder);

    std::vector<Site> diag_sites = sites;
    if (diag_sites.empty()) diag_sites.push_back(subject.window().site(subject.window().size() / 2));

    NonnullScanScope scope;
    scope.sites = diag_sites;
    scope.budget_bits = budget_bits;
    rep.min_positivity = uniform_nonnullness(kernel, scope);
    rep.positivity_ok = rep.min_positivity >= thresholds.positivity_floor;

    const int k = subject.alphabet_size();
    bool monotone = true;
    bool all_below = true;
    bool any_flat = false;
    for (const Site& t : diag_sites) {
        for (int x = 0; x < k; ++x) {
            DefectSchedule ec, cc, dc;
            ec.t = cc.t = dc.t = t;
            ec.x = cc.x = dc.x = static_cast<Symbol>(x);
            ec.condition = "E";
            cc.condition = "C";
            dc.condition = "D";
            for (int radius : radii) {
                const Volume ball = window_ball(subject.window(), t, radius);
                try {
                    const auto d =
                        oscillation_defects(kernel, t, static_cast<Symbol>(x), ball, budget_bits);
                    ec.radii.push_back(radius);
                    ec.defects.push_back(d.truncation);
                    cc.radii.push_back(radius);
                    cc.defects.push_back(d.agreement);
                    dc.radii.push_back(radius);
                    dc.defects.push_back(d.same_support);
                } catch (const budget_error&) {
                    ec.truncated = cc.truncated = dc.truncated = true;
                    break;
                }
            }
            for (std::size_t i = 1; i < ec.defects.size(); ++i)
                if (ec.defects[i] > ec.defects[i - 1] + thresholds.monotonicity_slack)
                    monotone = false;
            if (!ec.defects.empty()) {
                const double last = ec.defects.back();
                rep.max_final_truncation_defect = std::max(rep.max_final_truncation_defect, last);
                if (last > thresholds.decay_threshold) all_below = false;
                if (last >= thresholds.flat_floor) any_flat = true;
            }
            rep.schedules.push_back(std::move(ec));
            rep.schedules.push_back(std::move(cc));
            rep.schedules.push_back(std::move(dc));
        }
    }
    rep.decay_monotone = monotone;
    rep.decay_below_threshold = all_below;

    if (any_flat) rep.verdict = Verdict::non_gibbs_flagged;
    else if (rep.positivity_ok && monotone && all_below) rep.verdict = Verdict::gibbs_consistent;
    else rep.verdict = Verdict::inconclusive;
    return rep;
}

} // namespace gibbslab
