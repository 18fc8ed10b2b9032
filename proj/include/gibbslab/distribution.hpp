// Dense probability tables over X^Lambda in canonical configuration order,
// generic over the scalar (double or exact Rational).
#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "gibbslab/lattice.hpp"
#include "gibbslab/numeric.hpp"

namespace gibbslab {

template <class R>
struct BasicDistributionTable {
    Volume domain;
    int alphabet_size = 2;
    std::vector<R> p; // size k^{|domain|}, canonical configuration order

    // Certified half-width of the truncation interval for kernels built from
    // decaying potentials on a window; 0 for exact computations.
    double tail_halfwidth = 0.0;

    const R& at_rank(std::uint64_t r) const { return p[r]; }
    const R& at(const Configuration& x) const {
        if (!(x.support() == domain)) throw std::domain_error("configuration not on table domain");
        return p[rank_of(x, alphabet_size)];
    }
    R min_entry() const {
        if (p.empty()) throw std::domain_error("empty table");
        return *std::min_element(p.begin(), p.end());
    }
    R sum() const {
        R s{};
        for (const R& v : p) s += v;
        return s;
    }
};

using DistributionTable = BasicDistributionTable<double>;
using RationalTable = BasicDistributionTable<Rational>;

// Distribution invariants: entries >= 0 and total mass 1 (exact for
// rationals, within tol for floats). Throws std::invalid_argument.
template <class R>
void check_distribution(const BasicDistributionTable<R>& t, double tol = 1e-12) {
    const std::uint64_t n = config_count(t.domain.size(), t.alphabet_size, 62);
    if (t.p.size() != n) throw std::invalid_argument("table size does not match domain");
    for (const R& v : t.p)
        if (v < R{}) throw std::invalid_argument("negative probability entry");
    if constexpr (is_rational_v<R>) {
        if (t.sum() != 1) throw std::invalid_argument("rational table mass differs from 1");
    } else {
        if (std::abs(to_double(t.sum()) - 1.0) > tol)
            throw std::invalid_argument("table mass differs from 1 beyond tolerance");
    }
}

template <class R>
BasicDistributionTable<R> uniform_table(const Volume& domain, int k) {
    BasicDistributionTable<R> t;
    t.domain = domain;
    t.alphabet_size = k;
    const std::uint64_t n = config_count(domain.size(), k, 62);
    if constexpr (is_rational_v<R>) {
        t.p.assign(n, Rational(1, static_cast<unsigned long>(n)));
    } else {
        t.p.assign(n, 1.0 / static_cast<double>(n));
    }
    return t;
}

// Marginal of a table onto I (a subset of its domain): sums out the rest.
// marginal(t, {}) is the unit mass on the empty configuration.
template <class R>
BasicDistributionTable<R> table_marginal(const BasicDistributionTable<R>& t, const Volume& I) {
    if (!t.domain.contains(I)) throw std::domain_error("marginal target not inside table domain");
    BasicDistributionTable<R> out;
    out.domain = I;
    out.alphabet_size = t.alphabet_size;
    out.tail_halfwidth = t.tail_halfwidth;
    const std::uint64_t n_out = config_count(I.size(), t.alphabet_size, 62);
    out.p.assign(n_out, R{});
    const std::size_t n = t.domain.size();
    std::vector<std::size_t> pick; // positions of I's sites inside the domain order
    pick.reserve(I.size());
    for (std::size_t i = 0; i < I.size(); ++i) pick.push_back(*t.domain.index_of(I.site(i)));
    std::vector<Symbol> vals(n);
    for (std::uint64_t r = 0; r < t.p.size(); ++r) {
        decode_rank(r, t.alphabet_size, n, vals.data());
        std::uint64_t ro = 0;
        for (std::size_t j : pick) ro = ro * t.alphabet_size + vals[j];
        out.p[ro] += t.p[r];
    }
    return out;
}

// Total variation distance (half the l1 distance) between tables on the
// same domain.
template <class R>
R tv_distance(const BasicDistributionTable<R>& a, const BasicDistributionTable<R>& b) {
    if (!(a.domain == b.domain) || a.alphabet_size != b.alphabet_size || a.p.size() != b.p.size())
        throw std::domain_error("tables on different domains");
    R s{};
    for (std::size_t i = 0; i < a.p.size(); ++i) s += abs_value(static_cast<R>(a.p[i] - b.p[i]));
    return s / 2;
}

template <class R>
R max_abs_diff(const BasicDistributionTable<R>& a, const BasicDistributionTable<R>& b) {
    if (a.p.size() != b.p.size()) throw std::domain_error("tables of different size");
    R m{};
    for (std::size_t i = 0; i < a.p.size(); ++i)
        m = std::max(m, abs_value(static_cast<R>(a.p[i] - b.p[i])));
    return m;
}

} // namespace gibbslab
