// Gibbsian specification kernels, one-point kernels, the product-ratio
// reconstruction of multi-site elements from one-point data, and validators
// for the consistency and cycle identities plus quasilocality moduli.
//
// Templated functions here are the serial implementations; the double
// overloads declared at the bottom scan boundary configurations with OpenMP.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "gibbslab/distribution.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/potential.hpp"

namespace gibbslab {

// Binary-packed memo key (not human readable; scans hit this hard).
std::string element_cache_key(const Volume& lambda, const Configuration& cond);

template <class R>
using TablePtr = std::shared_ptr<const BasicDistributionTable<R>>;

// Thread-safe memo for kernel elements; concurrent inserts of identical
// values are benign.
template <class R>
class ElementCache {
  public:
    template <class F>
    TablePtr<R> get_or_compute(const std::string& key, F&& compute) const {
        {
            std::shared_lock lk(mu_);
            auto it = map_.find(key);
            if (it != map_.end()) return it->second;
        }
        auto t = std::make_shared<const BasicDistributionTable<R>>(compute());
        {
            std::unique_lock lk(mu_);
            auto [it, fresh] = map_.emplace(key, t);
            if (!fresh) return it->second;
        }
        return t;
    }
    std::size_t size() const {
        std::shared_lock lk(mu_);
        return map_.size();
    }

  private:
    mutable std::unordered_map<std::string, TablePtr<R>> map_;
    mutable std::shared_mutex mu_;
};

template <class R>
class SpecKernelT {
  public:
    virtual ~SpecKernelT() = default;
    virtual const Volume& window() const = 0;
    virtual int alphabet_size() const = 0;
    // Distribution on X^lambda given the boundary configuration on W \ lambda.
    // Shared so memoized kernels hand out elements without copying.
    virtual TablePtr<R> element_ptr(const Volume& lambda,
                                    const Configuration& boundary) const = 0;
    BasicDistributionTable<R> element(const Volume& lambda, const Configuration& boundary) const {
        return *element_ptr(lambda, boundary);
    }
};

using SpecKernel = SpecKernelT<double>;
using RationalSpecKernel = SpecKernelT<Rational>;

// Normalized exp(-U) over X^lambda, energies truncated at trunc_radius.
// The boundary must live exactly on W \ lambda.
DistributionTable gibbs_element(const Potential& phi, const Volume& window, int k,
                                const Volume& lambda, const Configuration& boundary,
                                int trunc_radius, int budget_bits = default_budget_bits);

// Exact counterpart for rational Boltzmann weights.
RationalTable gibbs_element_exact(const RationalWeightPotential& weights, const Volume& window,
                                  int k, const Volume& lambda, const Configuration& boundary,
                                  int budget_bits = default_budget_bits);

class GibbsSpecKernel final : public SpecKernel {
  public:
    GibbsSpecKernel(std::shared_ptr<const Potential> phi, Volume window, int k, int trunc_radius);

    const Volume& window() const override { return window_; }
    int alphabet_size() const override { return k_; }
    TablePtr<double> element_ptr(const Volume& lambda,
                                 const Configuration& boundary) const override;

    const Potential& potential() const { return *phi_; }
    int trunc_radius() const { return trunc_radius_; }

  private:
    std::shared_ptr<const Potential> phi_;
    Volume window_;
    int k_;
    int trunc_radius_;
    ElementCache<double> cache_;
};

class RationalGibbsSpecKernel final : public RationalSpecKernel {
  public:
    RationalGibbsSpecKernel(std::shared_ptr<const RationalWeightPotential> weights, Volume window,
                            int k);

    const Volume& window() const override { return window_; }
    int alphabet_size() const override { return k_; }
    TablePtr<Rational> element_ptr(const Volume& lambda,
                                   const Configuration& boundary) const override;

  private:
    std::shared_ptr<const RationalWeightPotential> weights_;
    Volume window_;
    int k_;
    ElementCache<Rational> cache_;
};

enum class ConditioningMode { full_complement, finite_support };

template <class R>
class OnePointKernelT {
  public:
    virtual ~OnePointKernelT() = default;
    virtual ConditioningMode mode() const = 0;
    virtual const Volume& window() const = 0;
    virtual int alphabet_size() const = 0;
    // Distribution on X^t. Full-complement kernels require support(cond) =
    // W \ t; finite-support kernels accept any non-empty subset of it.
    virtual TablePtr<R> element_ptr(const Site& t, const Configuration& cond) const = 0;
    BasicDistributionTable<R> element(const Site& t, const Configuration& cond) const {
        return *element_ptr(t, cond);
    }
};

using OnePointKernel = OnePointKernelT<double>;
using RationalOnePointKernel = OnePointKernelT<Rational>;

// One-point subsystem of a specification kernel.
template <class R>
class SpecOnePoint final : public OnePointKernelT<R> {
  public:
    explicit SpecOnePoint(std::shared_ptr<const SpecKernelT<R>> q) : q_(std::move(q)) {}

    ConditioningMode mode() const override { return ConditioningMode::full_complement; }
    const Volume& window() const override { return q_->window(); }
    int alphabet_size() const override { return q_->alphabet_size(); }
    TablePtr<R> element_ptr(const Site& t, const Configuration& cond) const override {
        const Volume lam({t});
        if (!(cond.support() == volume_difference(q_->window(), lam)))
            throw std::domain_error("full-complement kernel requires conditioning on W minus t");
        return q_->element_ptr(lam, cond);
    }

  private:
    std::shared_ptr<const SpecKernelT<R>> q_;
};

// Table-backed kernel (tests, JSON round trips, perturbation oracles).
template <class R>
class ExplicitOnePointKernel final : public OnePointKernelT<R> {
  public:
    ExplicitOnePointKernel(Volume window, int k, ConditioningMode mode)
        : window_(std::move(window)), k_(k), mode_(mode) {}

    void set_element(const Site& t, const Configuration& cond, BasicDistributionTable<R> table) {
        map_[element_cache_key(Volume({t}), cond)] =
            std::make_shared<const BasicDistributionTable<R>>(std::move(table));
    }

    ConditioningMode mode() const override { return mode_; }
    const Volume& window() const override { return window_; }
    int alphabet_size() const override { return k_; }
    TablePtr<R> element_ptr(const Site& t, const Configuration& cond) const override {
        auto it = map_.find(element_cache_key(Volume({t}), cond));
        if (it == map_.end())
            throw std::out_of_range("no element stored for site " + to_string(t));
        return it->second;
    }

  private:
    Volume window_;
    int k_;
    ConditioningMode mode_;
    std::map<std::string, TablePtr<R>> map_;
};

// Multi-site element from one-point elements: swap the sites of lambda one
// at a time from the reference u to the target, each step conditioned on the
// boundary plus the mixed configuration, and normalize the product ratios.
// The result does not depend on the order or on u when the kernel satisfies
// the cycle identity.
template <class R>
BasicDistributionTable<R> reconstruct_from_onepoint(const OnePointKernelT<R>& q,
                                                    const Volume& lambda,
                                                    const Configuration& boundary,
                                                    const Configuration& u,
                                                    const std::vector<Site>& order) {
    const int k = q.alphabet_size();
    if (!(u.support() == lambda)) throw std::domain_error("reference configuration must be on lambda");
    if (!volumes_disjoint(lambda, boundary.support()))
        throw std::domain_error("boundary overlaps lambda");
    if (!(Volume(order) == lambda)) throw std::domain_error("order must be a permutation of lambda");
    const std::uint64_t n = config_count(lambda.size(), k, 62);

    BasicDistributionTable<R> out;
    out.domain = lambda;
    out.alphabet_size = k;
    out.p.assign(n, R{});
    R total{};
    for (std::uint64_t r = 0; r < n; ++r) {
        const Configuration x = config_from_rank(lambda, k, r);
        R w;
        if constexpr (is_rational_v<R>) w = 1; else w = 1.0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Site& ti = order[i];
            std::vector<Site> swapped(order.begin(), order.begin() + i);
            std::vector<Site> pending(order.begin() + i + 1, order.end());
            Configuration mixed = concatenate(restrict_to(x, Volume(std::move(swapped))),
                                              restrict_to(u, Volume(std::move(pending))));
            const auto tbl = q.element_ptr(ti, concatenate(boundary, mixed));
            const R num = tbl->p[x.at(ti)];
            const R den = tbl->p[u.at(ti)];
            if (!(num > R{}) || !(den > R{}))
                throw positivity_error("one-point kernel not strictly positive at site " +
                                       to_string(ti));
            w *= num;
            w /= den;
        }
        out.p[r] = w;
        total += w;
    }
    for (auto& v : out.p) v /= total;
    return out;
}

// Canonical order, all-zeros reference.
template <class R>
BasicDistributionTable<R> reconstruct_from_onepoint(const OnePointKernelT<R>& q,
                                                    const Volume& lambda,
                                                    const Configuration& boundary) {
    return reconstruct_from_onepoint(q, lambda, boundary,
                                     Configuration(lambda, std::vector<Symbol>(lambda.size(), 0)),
                                     lambda.sites());
}

// Specification kernel determined by a strictly positive one-point kernel.
template <class R>
class ReconstructedSpecKernel final : public SpecKernelT<R> {
  public:
    explicit ReconstructedSpecKernel(std::shared_ptr<const OnePointKernelT<R>> q)
        : q_(std::move(q)) {}

    const Volume& window() const override { return q_->window(); }
    int alphabet_size() const override { return q_->alphabet_size(); }
    TablePtr<R> element_ptr(const Volume& lambda,
                            const Configuration& boundary) const override {
        return cache_.get_or_compute(element_cache_key(lambda, boundary), [&] {
            return reconstruct_from_onepoint(*q_, lambda, boundary);
        });
    }

  private:
    std::shared_ptr<const OnePointKernelT<R>> q_;
    ElementCache<R> cache_;
};

// Factorization defect of the lambda-element against its marginal on
// lambda \ I times the I-element, maximized over interior configurations.
template <class R>
R spec_consistency_defect_one(const SpecKernelT<R>& Q, const Volume& lambda, const Volume& I,
                              const Configuration& boundary) {
    if (!lambda.contains(I)) throw std::domain_error("I must be contained in lambda");
    const int k = Q.alphabet_size();
    const auto q_lambda = Q.element_ptr(lambda, boundary);
    const Volume rest = volume_difference(lambda, I);
    const auto q_rest = table_marginal(*q_lambda, rest);
    R worst{};
    const std::uint64_t nx = config_count(rest.size(), k, 62);
    const std::uint64_t ny = config_count(I.size(), k, 62);
    for (std::uint64_t xr = 0; xr < nx; ++xr) {
        const Configuration x = config_from_rank(rest, k, xr);
        const auto q_I = Q.element_ptr(I, concatenate(boundary, x));
        for (std::uint64_t yr = 0; yr < ny; ++yr) {
            const Configuration y = config_from_rank(I, k, yr);
            const R lhs = q_lambda->at(concatenate(x, y));
            const R rhs = q_rest.p[xr] * q_I->p[yr];
            worst = std::max(worst, abs_value(static_cast<R>(lhs - rhs)));
        }
    }
    return worst;
}

// Four-swap cycle defect of a full-complement one-point kernel at two sites
// under a fixed ambient configuration on W \ {t,s}.
template <class R>
R onepoint_cycle_defect(const OnePointKernelT<R>& q, const Site& t, const Site& s,
                        const Configuration& ambient) {
    if (t == s) throw std::domain_error("cycle defect needs two distinct sites");
    const int k = q.alphabet_size();
    std::vector<TablePtr<R>> qt(k), qs(k);
    for (int v = 0; v < k; ++v) {
        qt[v] = q.element_ptr(t, concatenate(ambient, Configuration(Volume({s}), {Symbol(v)})));
        qs[v] = q.element_ptr(s, concatenate(ambient, Configuration(Volume({t}), {Symbol(v)})));
    }
    R worst{};
    for (int x = 0; x < k; ++x)
        for (int u = 0; u < k; ++u)
            for (int y = 0; y < k; ++y)
                for (int v = 0; v < k; ++v) {
                    const R lhs = qt[v]->p[x] * qs[x]->p[y] * qt[y]->p[u] * qs[u]->p[v];
                    const R rhs = qs[u]->p[y] * qt[y]->p[x] * qs[x]->p[v] * qt[v]->p[u];
                    worst = std::max(worst, abs_value(static_cast<R>(lhs - rhs)));
                }
    return worst;
}

// ---- boundary scans (OpenMP for the double instantiation) -----------------

double spec_consistency_defect(const SpecKernel& Q, const Volume& lambda, const Volume& I,
                               int budget_bits = default_budget_bits);
Rational spec_consistency_defect(const RationalSpecKernel& Q, const Volume& lambda,
                                 const Volume& I, int budget_bits = default_budget_bits);

// Max consistency defect over every subset I of lambda in one boundary scan
// (the lambda-element and its marginals are reused across subsets).
double spec_consistency_defect_subsets(const SpecKernel& Q, const Volume& lambda,
                                       int budget_bits = default_budget_bits);

double onepoint_cycle_max_defect(const OnePointKernel& q, const Site& t, const Site& s,
                                 int budget_bits = default_budget_bits);
Rational onepoint_cycle_max_defect(const RationalOnePointKernel& q, const Site& t, const Site& s,
                                   int budget_bits = default_budget_bits);

// Per radius R: sup over pairs of full boundaries agreeing on the radius-R
// ball around t of the spread of the kernel value at x. Exhaustive over the
// window; throws budget_error when the window scan does not fit the budget.
std::vector<double> quasilocality_modulus(const OnePointKernel& q, const Site& t, Symbol x,
                                          const std::vector<int>& radii,
                                          int budget_bits = default_budget_bits);

// Certified modulus bound expm1(2 tau(t, R)) for kernels from a decaying
// potential.
std::vector<double> quasilocality_bound(const Potential& phi, const Site& t,
                                        const std::vector<int>& radii);

} // namespace gibbslab
