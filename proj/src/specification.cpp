#include "gibbslab/specification.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

namespace gibbslab {

std::string element_cache_key(const Volume& lambda, const Configuration& cond) {
    std::string key;
    key.reserve((lambda.size() + cond.support().size()) * 6 + cond.values().size() + 2);
    const auto put_site = [&key](const Site& s) {
        key.push_back(char(s.coords.size()));
        key.append(reinterpret_cast<const char*>(s.coords.data()), s.coords.size() * 4);
    };
    key.push_back(char(lambda.size()));
    for (const Site& s : lambda.sites()) put_site(s);
    key.push_back(char(cond.support().size()));
    for (const Site& s : cond.support().sites()) put_site(s);
    key.append(reinterpret_cast<const char*>(cond.values().data()), cond.values().size());
    return key;
}

DistributionTable gibbs_element(const Potential& phi, const Volume& window, int k,
                                const Volume& lambda, const Configuration& boundary,
                                int trunc_radius, int budget_bits) {
    if (!window.contains(lambda)) throw std::domain_error("lambda must lie inside the window");
    if (!(boundary.support() == volume_difference(window, lambda)))
        throw std::domain_error("boundary must live on window minus lambda");
    const std::uint64_t n = config_count(lambda.size(), k, budget_bits);

    DistributionTable out;
    out.domain = lambda;
    out.alphabet_size = k;
    out.p.assign(n, 1.0);
    if (lambda.empty()) {
        return out;
    }

    std::vector<Site> within;
    for (const Site& s : boundary.support().sites())
        if (linf_distance(s, lambda) <= trunc_radius) within.push_back(s);
    const Volume allowed(std::move(within));
    int margin = 0;
    for (int j = 1; j <= trunc_radius; ++j) {
        if (!boundary.support().contains(neighborhood(lambda, j))) break;
        margin = j;
    }
    double tail = 0.0;
    for (const Site& t : lambda.sites()) tail += phi.tail(t, std::min(trunc_radius, margin));

    // each body contributes through a dense value table indexed by the
    // ranks of its interior digits, so the per-configuration loop is pure
    // table arithmetic
    struct BodyEval {
        std::vector<std::size_t> lambda_pos; // interior digit positions, body order
        std::vector<double> values;          // k^{#interior}
    };
    std::vector<BodyEval> evals;
    phi.for_each_body(lambda, allowed, [&](const Volume& S) {
        BodyEval be;
        std::vector<std::size_t> interior_slots;
        std::vector<Symbol> vals(S.size(), 0);
        for (std::size_t i = 0; i < S.size(); ++i) {
            if (auto pos = lambda.index_of(S.site(i))) {
                be.lambda_pos.push_back(*pos);
                interior_slots.push_back(i);
            } else {
                vals[i] = boundary.at(S.site(i));
            }
        }
        const std::uint64_t m = config_count(be.lambda_pos.size(), k, 62);
        be.values.resize(m);
        std::vector<Symbol> digits(be.lambda_pos.size());
        for (std::uint64_t c = 0; c < m; ++c) {
            decode_rank(c, k, digits.size(), digits.data());
            for (std::size_t j = 0; j < digits.size(); ++j) vals[interior_slots[j]] = digits[j];
            be.values[c] = phi.value(Configuration(S, vals));
        }
        evals.push_back(std::move(be));
    });

    std::vector<double> energies(n, 0.0);
    std::vector<Symbol> buf(lambda.size());
    for (std::uint64_t r = 0; r < n; ++r) {
        decode_rank(r, k, lambda.size(), buf.data());
        double u = 0.0;
        for (const BodyEval& be : evals) {
            std::uint64_t idx = 0;
            for (std::size_t pos : be.lambda_pos) idx = idx * k + buf[pos];
            u += be.values[idx];
        }
        energies[r] = u;
    }
    const double base = *std::min_element(energies.begin(), energies.end());
    double z = 0.0;
    for (std::uint64_t r = 0; r < n; ++r) {
        out.p[r] = std::exp(-(energies[r] - base));
        z += out.p[r];
    }
    for (double& v : out.p) v /= z;
    out.tail_halfwidth = std::expm1(2.0 * tail);
    return out;
}

RationalTable gibbs_element_exact(const RationalWeightPotential& weights, const Volume& window,
                                  int k, const Volume& lambda, const Configuration& boundary,
                                  int budget_bits) {
    if (!window.contains(lambda)) throw std::domain_error("lambda must lie inside the window");
    if (!(boundary.support() == volume_difference(window, lambda)))
        throw std::domain_error("boundary must live on window minus lambda");
    const std::uint64_t n = config_count(lambda.size(), k, budget_bits);

    std::vector<Volume> bodies;
    weights.for_each_body(lambda, boundary.support(),
                          [&](const Volume& S) { bodies.push_back(S); });

    RationalTable out;
    out.domain = lambda;
    out.alphabet_size = k;
    out.p.resize(n);
    Rational z = 0;
    for (std::uint64_t r = 0; r < n; ++r) {
        const Configuration x = config_from_rank(lambda, k, r);
        const Configuration scene = boundary.empty() ? x : concatenate(x, boundary);
        Rational w = 1;
        for (const Volume& S : bodies) w *= weights.weight(restrict_to(scene, S));
        out.p[r] = w;
        z += w;
    }
    for (auto& v : out.p) v /= z;
    return out;
}

GibbsSpecKernel::GibbsSpecKernel(std::shared_ptr<const Potential> phi, Volume window, int k,
                                 int trunc_radius)
    : phi_(std::move(phi)), window_(std::move(window)), k_(k), trunc_radius_(trunc_radius) {
    if (!phi_) throw std::invalid_argument("null potential");
    if (k_ < 2) throw std::invalid_argument("alphabet size must be >= 2");
    if (trunc_radius_ < 0) throw std::invalid_argument("truncation radius must be >= 0");
}

TablePtr<double> GibbsSpecKernel::element_ptr(const Volume& lambda,
                                              const Configuration& boundary) const {
    return cache_.get_or_compute(element_cache_key(lambda, boundary), [&] {
        return gibbs_element(*phi_, window_, k_, lambda, boundary, trunc_radius_);
    });
}

RationalGibbsSpecKernel::RationalGibbsSpecKernel(
    std::shared_ptr<const RationalWeightPotential> weights, Volume window, int k)
    : weights_(std::move(weights)), window_(std::move(window)), k_(k) {
    if (!weights_) throw std::invalid_argument("null weight potential");
    if (k_ < 2) throw std::invalid_argument("alphabet size must be >= 2");
}

TablePtr<Rational> RationalGibbsSpecKernel::element_ptr(const Volume& lambda,
                                                        const Configuration& boundary) const {
    return cache_.get_or_compute(element_cache_key(lambda, boundary), [&] {
        return gibbs_element_exact(*weights_, window_, k_, lambda, boundary);
    });
}

double spec_consistency_defect(const SpecKernel& Q, const Volume& lambda, const Volume& I,
                               int budget_bits) {
    const Volume bsup = volume_difference(Q.window(), lambda);
    const int k = Q.alphabet_size();
    const std::int64_t n = static_cast<std::int64_t>(config_count(bsup.size(), k, budget_bits));
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
    for (std::int64_t r = 0; r < n; ++r) {
        const double d = spec_consistency_defect_one(
            Q, lambda, I, config_from_rank(bsup, k, static_cast<std::uint64_t>(r)));
        worst = std::max(worst, d);
    }
    return worst;
}

Rational spec_consistency_defect(const RationalSpecKernel& Q, const Volume& lambda,
                                 const Volume& I, int budget_bits) {
    const Volume bsup = volume_difference(Q.window(), lambda);
    const int k = Q.alphabet_size();
    const std::uint64_t n = config_count(bsup.size(), k, budget_bits);
    Rational worst = 0;
    for (std::uint64_t r = 0; r < n; ++r)
        worst = std::max(worst,
                         spec_consistency_defect_one(Q, lambda, I, config_from_rank(bsup, k, r)));
    return worst;
}

double onepoint_cycle_max_defect(const OnePointKernel& q, const Site& t, const Site& s,
                                 int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t, s}));
    const int k = q.alphabet_size();
    const std::int64_t n = static_cast<std::int64_t>(config_count(rest.size(), k, budget_bits));
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
    for (std::int64_t r = 0; r < n; ++r) {
        const double d =
            onepoint_cycle_defect(q, t, s, config_from_rank(rest, k, static_cast<std::uint64_t>(r)));
        worst = std::max(worst, d);
    }
    return worst;
}

Rational onepoint_cycle_max_defect(const RationalOnePointKernel& q, const Site& t, const Site& s,
                                   int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t, s}));
    const int k = q.alphabet_size();
    const std::uint64_t n = config_count(rest.size(), k, budget_bits);
    Rational worst = 0;
    for (std::uint64_t r = 0; r < n; ++r)
        worst = std::max(worst, onepoint_cycle_defect(q, t, s, config_from_rank(rest, k, r)));
    return worst;
}

namespace {

// split of lambda into (I, rest) with the lambda-rank contribution of each
// rest rank and I rank precomputed, so the inner comparison loop is pure
// array arithmetic
struct SubsetSplit {
    Volume I;
    Volume rest;
    std::vector<std::uint64_t> x_contrib; // per rest rank
    std::vector<std::uint64_t> y_contrib; // per I rank
};

SubsetSplit make_split(const Volume& lambda, const Volume& I, int k) {
    SubsetSplit sp;
    sp.I = I;
    sp.rest = volume_difference(lambda, I);
    const std::size_t nl = lambda.size();
    std::vector<std::uint64_t> place(nl, 1);
    for (std::size_t j = nl; j-- > 1;) place[j - 1] = place[j] * std::uint64_t(k);
    const auto contrib = [&](const Volume& part) {
        std::vector<std::uint64_t> mul;
        for (const Site& s : part.sites()) mul.push_back(place[*lambda.index_of(s)]);
        const std::uint64_t n = config_count(part.size(), k, 62);
        std::vector<std::uint64_t> out(n);
        std::vector<Symbol> digits(part.size());
        for (std::uint64_t r = 0; r < n; ++r) {
            decode_rank(r, k, part.size(), digits.data());
            std::uint64_t acc = 0;
            for (std::size_t j = 0; j < part.size(); ++j) acc += digits[j] * mul[j];
            out[r] = acc;
        }
        return out;
    };
    sp.x_contrib = contrib(sp.rest);
    sp.y_contrib = contrib(sp.I);
    return sp;
}

double consistency_defect_splits_one(const SpecKernel& Q, const Volume& lambda,
                                     const std::vector<SubsetSplit>& splits,
                                     const Configuration& boundary) {
    const int k = Q.alphabet_size();
    const auto q_lambda = Q.element_ptr(lambda, boundary);
    double worst = 0.0;
    for (const SubsetSplit& sp : splits) {
        const auto q_rest = table_marginal(*q_lambda, sp.rest);
        for (std::uint64_t xr = 0; xr < sp.x_contrib.size(); ++xr) {
            const Configuration x = config_from_rank(sp.rest, k, xr);
            const auto q_I = Q.element_ptr(sp.I, concatenate(boundary, x));
            const std::uint64_t xc = sp.x_contrib[xr];
            const double px = q_rest.p[xr];
            for (std::uint64_t yr = 0; yr < sp.y_contrib.size(); ++yr) {
                const double lhs = q_lambda->p[xc + sp.y_contrib[yr]];
                worst = std::max(worst, std::abs(lhs - px * q_I->p[yr]));
            }
        }
    }
    return worst;
}

} // namespace

double spec_consistency_defect_subsets(const SpecKernel& Q, const Volume& lambda,
                                       int budget_bits) {
    const int k = Q.alphabet_size();
    std::vector<SubsetSplit> splits;
    for (std::uint64_t mask = 0; mask < (1ull << lambda.size()); ++mask) {
        std::vector<Site> sites;
        for (std::size_t i = 0; i < lambda.size(); ++i)
            if (mask & (1ull << i)) sites.push_back(lambda.site(i));
        splits.push_back(make_split(lambda, Volume(std::move(sites)), k));
    }
    const Volume bsup = volume_difference(Q.window(), lambda);
    const std::int64_t n = static_cast<std::int64_t>(config_count(bsup.size(), k, budget_bits));
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : worst)
    for (std::int64_t r = 0; r < n; ++r) {
        const double d = consistency_defect_splits_one(
            Q, lambda, splits, config_from_rank(bsup, k, static_cast<std::uint64_t>(r)));
        worst = std::max(worst, d);
    }
    return worst;
}

std::vector<double> quasilocality_modulus(const OnePointKernel& q, const Site& t, Symbol x,
                                          const std::vector<int>& radii, int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t}));
    const int k = q.alphabet_size();
    std::uint64_t n;
    try {
        n = config_count(rest.size(), k, budget_bits);
    } catch (const budget_error&) {
        std::ostringstream os;
        os << "quasilocality scan over " << rest.size() << " boundary sites exceeds the "
           << budget_bits << "-bit budget; shrink the window or raise the budget";
        throw budget_error(os.str());
    }

    // one kernel evaluation per boundary configuration, reused for all radii
    std::vector<double> values(n);
    {
        const std::int64_t sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t r = 0; r < sn; ++r)
            values[static_cast<std::size_t>(r)] =
                q.element_ptr(t, config_from_rank(rest, k, static_cast<std::uint64_t>(r)))->p[x];
    }

    std::vector<double> out;
    out.reserve(radii.size());
    std::vector<Symbol> buf(rest.size());
    for (int radius : radii) {
        if (radius < 0) throw std::invalid_argument("radius must be >= 0");
        // agreement set: rest sites within the radius ball around t
        std::vector<std::size_t> agree;
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (linf_distance(rest.site(i), t) <= radius) agree.push_back(i);
        const std::uint64_t groups = config_count(agree.size(), k, 62);
        std::vector<double> mx(groups, -1.0), mn(groups, 2.0);
        for (std::uint64_t r = 0; r < n; ++r) {
            decode_rank(r, k, rest.size(), buf.data());
            std::uint64_t g = 0;
            for (std::size_t i : agree) g = g * k + buf[i];
            mx[g] = std::max(mx[g], values[r]);
            mn[g] = std::min(mn[g], values[r]);
        }
        double worst = 0.0;
        for (std::uint64_t g = 0; g < groups; ++g) worst = std::max(worst, mx[g] - mn[g]);
        out.push_back(worst);
    }
    return out;
}

std::vector<double> quasilocality_bound(const Potential& phi, const Site& t,
                                        const std::vector<int>& radii) {
    std::vector<double> out;
    out.reserve(radii.size());
    for (int radius : radii) out.push_back(std::expm1(2.0 * phi.tail(t, radius)));
    return out;
}

} // namespace gibbslab
