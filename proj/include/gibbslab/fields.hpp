// Strictly positive fields on windows: explicit tables, product mixtures
// (conditionals via component posteriors, no joint table), and an exact 1D
// transfer-chain backend; finite-conditional distributions, the exchange and
// cycle validators, and field reconstruction from one-point data.
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include "gibbslab/distribution.hpp"
#include "gibbslab/errors.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab {

template <class R>
class FieldT {
  public:
    virtual ~FieldT() = default;
    virtual const Volume& window() const = 0;
    virtual int alphabet_size() const = 0;
    virtual bool strictly_positive() const = 0;
    virtual BasicDistributionTable<R> marginal(const Volume& I) const = 0;

    // Ratio form: q(x) = M_{lambda ∪ S}(x cond) / M_S(cond); the conditioning
    // support must be non-empty and disjoint from lambda.
    virtual BasicDistributionTable<R> finite_conditional(const Volume& lambda,
                                                         const Configuration& cond) const {
        if (cond.empty()) throw std::domain_error("conditioning support must be non-empty");
        if (!volumes_disjoint(lambda, cond.support()))
            throw std::domain_error("conditioning support overlaps lambda");
        const int k = alphabet_size();
        const auto joint = marginal(volume_union(lambda, cond.support()));
        const auto below = marginal(cond.support());
        const R den = below.at(cond);
        if (!(den > R{})) throw positivity_error("conditioning configuration has zero mass");
        BasicDistributionTable<R> out;
        out.domain = lambda;
        out.alphabet_size = k;
        const std::uint64_t n = config_count(lambda.size(), k, 62);
        out.p.resize(n);
        for (std::uint64_t r = 0; r < n; ++r) {
            const Configuration x = config_from_rank(lambda, k, r);
            out.p[r] = joint.at(concatenate(x, cond)) / den;
        }
        return out;
    }
};

using Field = FieldT<double>;
using RationalField = FieldT<Rational>;

// Explicit strictly positive table with memoized marginals (each marginal is
// derived from its one-site-larger parent, so a chain of queries costs one
// pass per distinct volume).
template <class R>
class FieldTable final : public FieldT<R> {
  public:
    explicit FieldTable(BasicDistributionTable<R> table) : table_(std::move(table)) {
        if constexpr (is_rational_v<R>)
            for (R& v : table_.p) v.canonicalize();
        check_distribution(table_);
        if (!(table_.min_entry() > R{}))
            throw std::domain_error("field table must be strictly positive");
    }

    // moves drop the marginal cache (it is rebuilt on demand)
    FieldTable(FieldTable&& other) noexcept : table_(std::move(other.table_)) {}
    FieldTable(const FieldTable& other) : table_(other.table_) {}
    FieldTable& operator=(FieldTable&&) = delete;
    FieldTable& operator=(const FieldTable&) = delete;

    const Volume& window() const override { return table_.domain; }
    int alphabet_size() const override { return table_.alphabet_size; }
    bool strictly_positive() const override { return true; }
    const BasicDistributionTable<R>& table() const { return table_; }

    BasicDistributionTable<R> marginal(const Volume& I) const override {
        if (!table_.domain.contains(I)) throw std::domain_error("marginal target outside window");
        if (I == table_.domain) return table_;
        const std::string key = to_string(I);
        {
            std::shared_lock lk(mu_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        // sum out the smallest site missing from I, recursively
        const Volume missing = volume_difference(table_.domain, I);
        const Volume parent = volume_union(I, Volume({missing.site(0)}));
        BasicDistributionTable<R> out = table_marginal(marginal(parent), I);
        {
            std::unique_lock lk(mu_);
            cache_.emplace(key, out);
        }
        return out;
    }

  private:
    BasicDistributionTable<R> table_;
    mutable std::map<std::string, BasicDistributionTable<R>> cache_;
    mutable std::shared_mutex mu_;
};

// Mixture of strictly positive components: translation-invariant product
// measures (one symbol distribution used at every site) and/or explicit
// tables. Conditionals are computed through component posteriors.
template <class R>
struct MixtureComponent {
    R weight{};
    std::vector<R> site_probs;                   // non-empty: product component
    std::shared_ptr<const FieldTable<R>> table;  // otherwise: table component
};

template <class R>
class MixtureField final : public FieldT<R> {
  public:
    MixtureField(Volume window, int k, std::vector<MixtureComponent<R>> components)
        : window_(std::move(window)), k_(k), components_(std::move(components)) {
        if (components_.size() < 2)
            throw std::invalid_argument("mixture needs at least two components");
        R total{};
        for (const auto& c : components_) {
            if (!(c.weight > R{})) throw std::invalid_argument("mixture weights must be positive");
            total += c.weight;
            if (!c.site_probs.empty()) {
                if (static_cast<int>(c.site_probs.size()) != k_)
                    throw std::invalid_argument("site distribution size must match the alphabet");
                R s{};
                for (const R& p : c.site_probs) {
                    if (!(p > R{}))
                        throw std::invalid_argument("product components must be strictly positive");
                    s += p;
                }
                if (mass_off(s)) throw std::invalid_argument("site distribution must sum to 1");
            } else if (c.table) {
                if (!(c.table->window() == window_) || c.table->alphabet_size() != k_)
                    throw std::invalid_argument("table component window/alphabet mismatch");
            } else {
                throw std::invalid_argument("mixture component needs site probabilities or a table");
            }
        }
        if (mass_off(total)) throw std::invalid_argument("mixture weights must sum to 1");
    }

    const Volume& window() const override { return window_; }
    int alphabet_size() const override { return k_; }
    bool strictly_positive() const override { return true; }
    const std::vector<MixtureComponent<R>>& components() const { return components_; }

    BasicDistributionTable<R> marginal(const Volume& I) const override {
        if (!window_.contains(I)) throw std::domain_error("marginal target outside window");
        BasicDistributionTable<R> out;
        out.domain = I;
        out.alphabet_size = k_;
        const std::uint64_t n = config_count(I.size(), k_, 62);
        out.p.assign(n, R{});
        std::vector<Symbol> vals(I.size());
        for (std::uint64_t r = 0; r < n; ++r) {
            decode_rank(r, k_, I.size(), vals.data());
            R acc{};
            for (const auto& c : components_) acc += c.weight * component_mass(c, I, vals);
            out.p[r] = acc;
        }
        return out;
    }

    BasicDistributionTable<R> finite_conditional(const Volume& lambda,
                                                 const Configuration& cond) const override {
        if (cond.empty()) throw std::domain_error("conditioning support must be non-empty");
        if (!volumes_disjoint(lambda, cond.support()))
            throw std::domain_error("conditioning support overlaps lambda");
        const std::size_t m = components_.size();
        std::vector<R> posterior(m);
        R total{};
        for (std::size_t c = 0; c < m; ++c) {
            posterior[c] =
                components_[c].weight * component_mass(components_[c], cond.support(), cond.values());
            total += posterior[c];
        }
        std::vector<BasicDistributionTable<R>> table_cond(m);
        for (std::size_t c = 0; c < m; ++c)
            if (components_[c].site_probs.empty())
                table_cond[c] = components_[c].table->finite_conditional(lambda, cond);
        BasicDistributionTable<R> out;
        out.domain = lambda;
        out.alphabet_size = k_;
        const std::uint64_t n = config_count(lambda.size(), k_, 62);
        out.p.assign(n, R{});
        std::vector<Symbol> vals(lambda.size());
        for (std::uint64_t r = 0; r < n; ++r) {
            decode_rank(r, k_, lambda.size(), vals.data());
            R acc{};
            for (std::size_t c = 0; c < m; ++c) {
                const auto& comp = components_[c];
                if (!comp.site_probs.empty()) {
                    R p = posterior[c];
                    for (Symbol v : vals) p *= comp.site_probs[v];
                    acc += p;
                } else {
                    acc += posterior[c] * table_cond[c].p[r];
                }
            }
            out.p[r] = acc / total;
        }
        return out;
    }

  private:
    static bool mass_off(const R& s) {
        if constexpr (is_rational_v<R>) return s != 1;
        else return std::abs(to_double(s) - 1.0) > 1e-12;
    }

    R component_mass(const MixtureComponent<R>& c, const Volume& I,
                     const std::vector<Symbol>& vals) const {
        if (!c.site_probs.empty()) {
            R p;
            if constexpr (is_rational_v<R>) p = 1; else p = 1.0;
            for (Symbol v : vals) p *= c.site_probs[v];
            return p;
        }
        return c.table->marginal(I).p[rank_of(vals, k_)];
    }

    Volume window_;
    int k_;
    std::vector<MixtureComponent<R>> components_;
};

// Exact infinite-volume marginals of the unique field of a 1D
// translation-invariant finite-range potential, via a strictly positive
// block transfer matrix and its Perron eigendata (deterministic power
// iteration). Marginals may be requested on any finite 1D volume.
class TransferChain final : public FieldT<double> {
  public:
    TransferChain(std::shared_ptr<const Potential> phi, int k, Volume observation_window,
                  double tol = 1e-14);

    const Volume& window() const override { return window_; }
    int alphabet_size() const override { return k_; }
    bool strictly_positive() const override { return true; }

    DistributionTable marginal(const Volume& I) const override;
    DistributionTable finite_conditional(const Volume& lambda,
                                         const Configuration& cond) const override;

    // Mass of a single configuration; the workhorse behind both overrides.
    double marginal_value(const Configuration& c) const;

    double leading_eigenvalue() const { return lambda1_; }
    int block_size() const { return block_; }

  private:
    double chain_value(const std::vector<int>& positions, const std::vector<Symbol>& vals) const;

    std::shared_ptr<const Potential> phi_;
    int k_;
    Volume window_;
    int range_ = 1;
    int block_ = 1;
    std::size_t nstates_ = 0;
    std::vector<double> T_;           // nstates x nstates, row-major
    std::vector<double> left_, right_;
    double lambda1_ = 0.0;
    double lr_ = 0.0;
};

// Free-function form for the chain backend.
DistributionTable transfer_marginals(const TransferChain& chain, const Volume& lambda);

// One-point finite-conditional kernel of a field.
template <class R>
class FieldOnePoint final : public OnePointKernelT<R> {
  public:
    explicit FieldOnePoint(std::shared_ptr<const FieldT<R>> field) : field_(std::move(field)) {}

    ConditioningMode mode() const override { return ConditioningMode::finite_support; }
    const Volume& window() const override { return field_->window(); }
    int alphabet_size() const override { return field_->alphabet_size(); }
    TablePtr<R> element_ptr(const Site& t, const Configuration& cond) const override {
        return std::make_shared<const BasicDistributionTable<R>>(
            field_->finite_conditional(Volume({t}), cond));
    }

  private:
    std::shared_ptr<const FieldT<R>> field_;
};

// Two-factor exchange defect at sites t, s under a fixed conditioning with
// support disjoint from both.
template <class R>
R fc_exchange_defect(const OnePointKernelT<R>& q, const Site& t, const Site& s,
                     const Configuration& cond) {
    if (t == s) throw std::domain_error("exchange defect needs two distinct sites");
    if (cond.empty()) throw std::domain_error("conditioning support must be non-empty");
    if (cond.support().contains(t) || cond.support().contains(s))
        throw std::domain_error("conditioning support must avoid t and s");
    const int k = q.alphabet_size();
    const auto qt = q.element_ptr(t, cond);
    const auto qs = q.element_ptr(s, cond);
    std::vector<TablePtr<R>> qs_given_t(k), qt_given_s(k);
    for (int v = 0; v < k; ++v) {
        qs_given_t[v] =
            q.element_ptr(s, concatenate(cond, Configuration(Volume({t}), {Symbol(v)})));
        qt_given_s[v] =
            q.element_ptr(t, concatenate(cond, Configuration(Volume({s}), {Symbol(v)})));
    }
    R worst{};
    for (int x = 0; x < k; ++x)
        for (int y = 0; y < k; ++y) {
            const R lhs = qt->p[x] * qs_given_t[x]->p[y];
            const R rhs = qs->p[y] * qt_given_s[y]->p[x];
            worst = std::max(worst, abs_value(static_cast<R>(lhs - rhs)));
        }
    return worst;
}

// Eight-factor cycle defect with bare single-site conditionings only.
template <class R>
R fc_cycle_defect(const OnePointKernelT<R>& q, const Site& t, const Site& s) {
    if (t == s) throw std::domain_error("cycle defect needs two distinct sites");
    const int k = q.alphabet_size();
    std::vector<TablePtr<R>> qt(k), qs(k);
    for (int v = 0; v < k; ++v) {
        qt[v] = q.element_ptr(t, Configuration(Volume({s}), {Symbol(v)}));
        qs[v] = q.element_ptr(s, Configuration(Volume({t}), {Symbol(v)}));
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

// Exchange defect maximized over conditioning supports inside the window
// (every support when the scan fits the budget; OpenMP over supports).
double fc_exchange_max_defect(const OnePointKernel& q, const Site& t, const Site& s,
                              int budget_bits = default_budget_bits);

struct ReconstructionGate {
    double tolerance = 1e-8;
    bool enabled = true;
};

// The unique strictly positive field with the given one-point
// finite-conditional kernel: weights grow from a reference configuration by
// swapping one site at a time along the given order (canonical by default;
// the result does not depend on it). Kernels failing the exchange/cycle gate
// are rejected.
template <class R>
FieldTable<R> reconstruct_field(const OnePointKernelT<R>& q, const Volume& V,
                                const Configuration& u, const std::vector<Site>& order,
                                ReconstructionGate gate = {},
                                int budget_bits = default_budget_bits) {
    if (V.size() < 2)
        throw std::domain_error("field reconstruction needs at least two sites");
    if (!(u.support() == V)) throw std::domain_error("reference configuration must be on V");
    if (!(Volume(order) == V)) throw std::domain_error("order must be a permutation of V");
    const int k = q.alphabet_size();
    const std::uint64_t n = config_count(V.size(), k, budget_bits);

    if (gate.enabled) {
        double worst = 0.0;
        for (std::size_t i = 0; i < V.size() && worst <= gate.tolerance; ++i)
            for (std::size_t j = i + 1; j < V.size(); ++j) {
                const Site& t = V.site(i);
                const Site& s = V.site(j);
                worst = std::max(worst, to_double(fc_cycle_defect(q, t, s)));
                const Volume rest = volume_difference(V, Volume({t, s}));
                if (!rest.empty()) {
                    // bare singleton conditionings plus the full complement
                    for (std::size_t a = 0; a < rest.size(); ++a)
                        for (int v = 0; v < k; ++v)
                            worst = std::max(
                                worst, to_double(fc_exchange_defect(
                                           q, t, s,
                                           Configuration(Volume({rest.site(a)}), {Symbol(v)}))));
                    const std::uint64_t nr = config_count(rest.size(), k, 62);
                    const std::uint64_t step = std::max<std::uint64_t>(1, nr / 16);
                    for (std::uint64_t r = 0; r < nr; r += step)
                        worst = std::max(worst, to_double(fc_exchange_defect(
                                                    q, t, s, config_from_rank(rest, k, r))));
                }
                if (worst > gate.tolerance) break;
            }
        if (worst > gate.tolerance) {
            std::ostringstream os;
            os << "one-point kernel fails the exchange/cycle gate: defect " << worst
               << " exceeds " << gate.tolerance;
            throw inconsistent_kernel_error(os.str());
        }
    }

    BasicDistributionTable<R> out;
    out.domain = V;
    out.alphabet_size = k;
    out.p.assign(n, R{});
    R total{};
    for (std::uint64_t r = 0; r < n; ++r) {
        const Configuration x = config_from_rank(V, k, r);
        R w;
        if constexpr (is_rational_v<R>) w = 1; else w = 1.0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const Site& ti = order[i];
            std::vector<Site> swapped(order.begin(), order.begin() + i);
            std::vector<Site> pending(order.begin() + i + 1, order.end());
            const Configuration mixed = concatenate(restrict_to(x, Volume(std::move(swapped))),
                                                    restrict_to(u, Volume(std::move(pending))));
            const auto tbl = q.element_ptr(ti, mixed);
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
    return FieldTable<R>(std::move(out));
}

template <class R>
FieldTable<R> reconstruct_field(const OnePointKernelT<R>& q, const Volume& V,
                                const Configuration& u, ReconstructionGate gate = {},
                                int budget_bits = default_budget_bits) {
    return reconstruct_field(q, V, u, V.sites(), gate, budget_bits);
}

} // namespace gibbslab
