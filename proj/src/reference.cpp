#include "gibbslab/reference.hpp"

#include <cmath>
#include <map>

namespace gibbslab::ref {

namespace {

void subsets_up_to(const std::vector<Site>& pool, std::size_t max_size,
                   const std::function<void(const std::vector<Site>&)>& visit) {
    std::vector<Site> current;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        visit(current);
        if (current.size() == max_size) return;
        for (std::size_t i = start; i < pool.size(); ++i) {
            current.push_back(pool[i]);
            rec(i + 1);
            current.pop_back();
        }
    };
    rec(0);
}

} // namespace

double energy_brute(const Potential& phi, const Volume& lambda, const Configuration& x,
                    const Configuration& boundary, int truncation_radius) {
    std::vector<Site> exterior;
    for (const Site& s : boundary.support().sites())
        if (linf_distance(s, lambda) <= truncation_radius) exterior.push_back(s);
    const Configuration scene = exterior.empty()
                                    ? x
                                    : concatenate(x, restrict_to(boundary, Volume(exterior)));
    const std::size_t cap = static_cast<std::size_t>(phi.max_body_size());
    double sum = 0.0;
    subsets_up_to(lambda.sites(), cap, [&](const std::vector<Site>& J) {
        if (J.empty() || J.size() > cap) return;
        subsets_up_to(exterior, cap - J.size(), [&](const std::vector<Site>& Jt) {
            std::vector<Site> body = J;
            body.insert(body.end(), Jt.begin(), Jt.end());
            sum += phi.value(restrict_to(scene, Volume(std::move(body))));
        });
    });
    return sum;
}

DistributionTable gibbs_element(const Potential& phi, const Volume& window, int k,
                                const Volume& lambda, const Configuration& boundary,
                                int trunc_radius) {
    if (!window.contains(lambda)) throw std::domain_error("lambda outside window");
    const std::uint64_t n = config_count(lambda.size(), k, 62);
    std::vector<double> u(n);
    for (std::uint64_t r = 0; r < n; ++r)
        u[r] = energy_brute(phi, lambda, config_from_rank(lambda, k, r), boundary, trunc_radius);
    const double base = *std::min_element(u.begin(), u.end());
    DistributionTable out;
    out.domain = lambda;
    out.alphabet_size = k;
    out.p.resize(n);
    double z = 0.0;
    for (std::uint64_t r = 0; r < n; ++r) {
        out.p[r] = std::exp(-(u[r] - base));
        z += out.p[r];
    }
    for (double& v : out.p) v /= z;
    return out;
}

double spec_consistency_defect(const SpecKernel& Q, const Volume& lambda, const Volume& I) {
    const Volume bsup = volume_difference(Q.window(), lambda);
    const int k = Q.alphabet_size();
    const std::uint64_t nb = config_count(bsup.size(), k, 62);
    const Volume rest = volume_difference(lambda, I);
    const std::uint64_t nx = config_count(rest.size(), k, 62);
    const std::uint64_t ny = config_count(I.size(), k, 62);
    double worst = 0.0;
    for (std::uint64_t br = 0; br < nb; ++br) {
        const Configuration boundary = config_from_rank(bsup, k, br);
        const auto q_lambda = Q.element(lambda, boundary);
        const auto q_rest = table_marginal(q_lambda, rest);
        for (std::uint64_t xr = 0; xr < nx; ++xr) {
            const Configuration xcfg = config_from_rank(rest, k, xr);
            const auto q_I = Q.element(I, concatenate(boundary, xcfg));
            for (std::uint64_t yr = 0; yr < ny; ++yr) {
                const Configuration ycfg = config_from_rank(I, k, yr);
                const double lhs = q_lambda.at(concatenate(xcfg, ycfg));
                const double rhs = q_rest.p[xr] * q_I.p[yr];
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
    }
    return worst;
}

double onepoint_cycle_max_defect(const OnePointKernel& q, const Site& t, const Site& s) {
    const Volume rest = volume_difference(q.window(), Volume({t, s}));
    const int k = q.alphabet_size();
    const std::uint64_t n = config_count(rest.size(), k, 62);
    double worst = 0.0;
    for (std::uint64_t r = 0; r < n; ++r)
        worst = std::max(worst, onepoint_cycle_defect(q, t, s, config_from_rank(rest, k, r)));
    return worst;
}

std::vector<double> quasilocality_modulus(const OnePointKernel& q, const Site& t, Symbol x,
                                          const std::vector<int>& radii) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    const int k = q.alphabet_size();
    const std::uint64_t n = config_count(rest.size(), k, 62);
    std::vector<double> value(n);
    for (std::uint64_t r = 0; r < n; ++r)
        value[r] = q.element_ptr(t, config_from_rank(rest, k, r))->p[x];
    std::vector<Symbol> a(rest.size()), b(rest.size());
    std::vector<double> out;
    for (int radius : radii) {
        std::vector<std::size_t> ball;
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (linf_distance(rest.site(i), t) <= radius) ball.push_back(i);
        double worst = 0.0;
        for (std::uint64_t ra = 0; ra < n; ++ra) {
            decode_rank(ra, k, rest.size(), a.data());
            for (std::uint64_t rb = ra + 1; rb < n; ++rb) {
                decode_rank(rb, k, rest.size(), b.data());
                bool agree = true;
                for (std::size_t i : ball)
                    if (a[i] != b[i]) {
                        agree = false;
                        break;
                    }
                if (agree) worst = std::max(worst, std::abs(value[ra] - value[rb]));
            }
        }
        out.push_back(worst);
    }
    return out;
}

OscillationDefects oscillation_defects(const OnePointKernel& q, const Site& t, Symbol x,
                                       const Volume& lambda) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    const Volume others = volume_difference(rest, lambda);
    const int k = q.alphabet_size();
    // group the kernel values by the configuration restricted to lambda
    std::map<std::uint64_t, std::vector<double>> by_group;
    std::vector<Site> chosen;
    const std::size_t m = others.size();
    OscillationDefects out;
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
        chosen.clear();
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1ull << i)) chosen.push_back(others.site(i));
        const Volume J = volume_union(lambda, Volume(chosen));
        std::map<std::uint64_t, std::pair<double, double>> within;
        const std::uint64_t n = config_count(J.size(), k, 62);
        for (std::uint64_t r = 0; r < n; ++r) {
            const Configuration c = config_from_rank(J, k, r);
            const double v = q.element_ptr(t, c)->p[x];
            const std::uint64_t g = rank_of(restrict_to(c, lambda), k);
            by_group[g].push_back(v);
            auto [it, fresh] = within.emplace(g, std::make_pair(v, v));
            if (!fresh) {
                it->second.first = std::min(it->second.first, v);
                it->second.second = std::max(it->second.second, v);
            }
        }
        for (const auto& [g, mm] : within)
            out.same_support = std::max(out.same_support, mm.second - mm.first);
    }
    for (const auto& [g, vs] : by_group) {
        const double base = q.element_ptr(t, config_from_rank(lambda, k, g))->p[x];
        double lo = vs[0], hi = vs[0];
        for (double v : vs) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            out.truncation = std::max(out.truncation, std::abs(v - base));
        }
        out.agreement = std::max(out.agreement, hi - lo);
    }
    return out;
}

std::pair<double, double> sullivan_envelope(const OnePointKernel& q, const Site& t, Symbol x,
                                            const Volume& lambda, const Configuration& z) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    const Volume free = volume_difference(rest, lambda);
    const int k = q.alphabet_size();
    const std::uint64_t n = config_count(free.size(), k, 62);
    double lo = 2.0, hi = -1.0;
    for (std::uint64_t r = 0; r < n; ++r) {
        const Configuration ext = config_from_rank(free, k, r);
        const double v = q.element_ptr(t, free.empty() ? z : concatenate(z, ext))->p[x];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

double uniform_nonnullness(const OnePointKernel& q, const std::vector<Site>& sites) {
    const int k = q.alphabet_size();
    double worst = 2.0;
    for (const Site& t : sites) {
        const Volume rest = volume_difference(q.window(), Volume({t}));
        if (q.mode() == ConditioningMode::full_complement) {
            const std::uint64_t n = config_count(rest.size(), k, 62);
            for (std::uint64_t r = 0; r < n; ++r)
                for (double v : q.element_ptr(t, config_from_rank(rest, k, r))->p)
                    worst = std::min(worst, v);
            continue;
        }
        for (std::uint64_t mask = 1; mask < (1ull << rest.size()); ++mask) {
            std::vector<Site> chosen;
            for (std::size_t i = 0; i < rest.size(); ++i)
                if (mask & (1ull << i)) chosen.push_back(rest.site(i));
            const Volume S(std::move(chosen));
            const std::uint64_t n = config_count(S.size(), k, 62);
            for (std::uint64_t r = 0; r < n; ++r)
                for (double v : q.element_ptr(t, config_from_rank(S, k, r))->p)
                    worst = std::min(worst, v);
        }
    }
    return worst;
}

double product_mixture_onepoint(const std::vector<double>& weights,
                                const std::vector<std::vector<double>>& site_probs,
                                const std::vector<int>& symbol_counts, Symbol x) {
    double norm = 0.0, acc = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        double mass = weights[c];
        for (std::size_t v = 0; v < symbol_counts.size(); ++v)
            mass *= std::pow(site_probs[c][v], symbol_counts[v]);
        norm += mass;
        acc += mass * site_probs[c][x];
    }
    return acc / norm;
}

} // namespace gibbslab::ref
