#include "gibbslab/fields.hpp"

#include <cmath>
#include <numeric>

namespace gibbslab {

namespace {

// merged config over positions 0..block of a bond (u covers 0..block-1,
// v supplies position block)
void merge_states(std::uint64_t u, std::uint64_t v, int k, int block, Symbol* out) {
    decode_rank(u, k, block, out);
    out[block] = static_cast<Symbol>(v % static_cast<std::uint64_t>(k));
}

bool shift_compatible(std::uint64_t u, std::uint64_t v, int k, int block) {
    if (block == 1) return true;
    // u's digits 1.. must equal v's digits ..block-2
    std::uint64_t pow = 1;
    for (int i = 0; i < block - 1; ++i) pow *= k;
    return u % pow == v / static_cast<std::uint64_t>(k);
}

} // namespace

TransferChain::TransferChain(std::shared_ptr<const Potential> phi, int k,
                             Volume observation_window, double tol)
    : phi_(std::move(phi)), k_(k), window_(std::move(observation_window)) {
    if (!phi_) throw std::invalid_argument("null potential");
    if (window_.empty() || window_.site(0).dimension() != 1)
        throw std::domain_error("transfer chain requires a one-dimensional window");
    const auto r = phi_->finite_range();
    if (!r) throw unsupported_potential_error("transfer chain requires a finite-range potential");
    range_ = std::max(1, *r);
    block_ = range_;
    if (static_cast<double>(block_) * std::log2(static_cast<double>(k_)) > 12.0)
        throw budget_error("transfer block state space too large");
    nstates_ = static_cast<std::size_t>(config_count(block_, k_, 62));

    // bond energy: bodies containing position 0 inside positions 0..block
    std::vector<std::int32_t> pos;
    const Volume origin({Site({0})});
    std::vector<Site> ext;
    for (int i = 1; i <= block_; ++i) ext.push_back(Site({i}));
    const Volume allowed(std::move(ext));
    std::vector<Volume> bodies;
    phi_->for_each_body(origin, allowed, [&](const Volume& S) { bodies.push_back(S); });

    Volume span_sites = volume_union(origin, allowed);
    T_.assign(nstates_ * nstates_, 0.0);
    std::vector<Symbol> merged(block_ + 1);
    for (std::uint64_t u = 0; u < nstates_; ++u)
        for (std::uint64_t v = 0; v < nstates_; ++v) {
            if (!shift_compatible(u, v, k_, block_)) continue;
            merge_states(u, v, k_, block_, merged.data());
            const Configuration scene(span_sites, std::vector<Symbol>(merged.begin(), merged.end()));
            double e = 0.0;
            for (const Volume& S : bodies) e += phi_->value(restrict_to(scene, S));
            T_[u * nstates_ + v] = std::exp(-e);
        }

    // Perron pair by deterministic power iteration (start: all ones)
    auto iterate = [&](bool transpose, std::vector<double>& vec) {
        vec.assign(nstates_, 1.0 / static_cast<double>(nstates_));
        std::vector<double> next(nstates_);
        double lam = 0.0;
        for (int it = 0; it < 1000000; ++it) {
            for (std::size_t i = 0; i < nstates_; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < nstates_; ++j)
                    s += (transpose ? T_[j * nstates_ + i] : T_[i * nstates_ + j]) * vec[j];
                next[i] = s;
            }
            const double norm = std::accumulate(next.begin(), next.end(), 0.0);
            for (double& x : next) x /= norm;
            double diff = 0.0;
            for (std::size_t i = 0; i < nstates_; ++i) diff = std::max(diff, std::abs(next[i] - vec[i]));
            vec.swap(next);
            if (diff < tol && std::abs(norm - lam) < tol * std::max(1.0, lam)) {
                lam = norm;
                break;
            }
            lam = norm;
        }
        return lam;
    };
    lambda1_ = iterate(false, right_);
    iterate(true, left_);
    lr_ = 0.0;
    for (std::size_t i = 0; i < nstates_; ++i) lr_ += left_[i] * right_[i];
    for (double v : right_)
        if (!(v > 0.0)) throw positivity_error("transfer chain eigenvector not strictly positive");
    for (double v : left_)
        if (!(v > 0.0)) throw positivity_error("transfer chain eigenvector not strictly positive");
}

double TransferChain::chain_value(const std::vector<int>& positions,
                                  const std::vector<Symbol>& vals) const {
    // run covering all requested positions, padded to at least one block
    const int a = positions.front();
    const int z = positions.back();
    const int N = std::max(z - a + 1, block_);
    std::vector<int> req(N, -1);
    for (std::size_t i = 0; i < positions.size(); ++i) req[positions[i] - a] = vals[i];

    // initial block mask over offsets 0..block-1
    std::vector<double> w(nstates_);
    std::vector<Symbol> digits(block_);
    for (std::uint64_t u = 0; u < nstates_; ++u) {
        decode_rank(u, k_, block_, digits.data());
        bool ok = true;
        for (int o = 0; o < block_ && ok; ++o)
            if (req[o] >= 0 && digits[o] != req[o]) ok = false;
        w[u] = ok ? left_[u] : 0.0;
    }
    // one transfer step per new offset
    std::vector<double> next(nstates_);
    for (int o = block_; o < N; ++o) {
        for (std::uint64_t v = 0; v < nstates_; ++v) {
            const Symbol lastdigit = static_cast<Symbol>(v % static_cast<std::uint64_t>(k_));
            if (req[o] >= 0 && lastdigit != req[o]) {
                next[v] = 0.0;
                continue;
            }
            double s = 0.0;
            for (std::uint64_t u = 0; u < nstates_; ++u) s += w[u] * T_[u * nstates_ + v];
            next[v] = s / lambda1_;
        }
        w.swap(next);
    }
    double s = 0.0;
    for (std::uint64_t u = 0; u < nstates_; ++u) s += w[u] * right_[u];
    return s / lr_;
}

double TransferChain::marginal_value(const Configuration& c) const {
    if (c.empty()) return 1.0;
    std::vector<int> positions;
    positions.reserve(c.support().size());
    for (const Site& s : c.support().sites()) {
        if (s.dimension() != 1) throw std::domain_error("transfer chain marginals are 1D");
        positions.push_back(s.coords[0]);
    }
    return chain_value(positions, c.values());
}

DistributionTable TransferChain::marginal(const Volume& I) const {
    DistributionTable out;
    out.domain = I;
    out.alphabet_size = k_;
    const std::uint64_t n = config_count(I.size(), k_, 62);
    out.p.resize(n);
    for (std::uint64_t r = 0; r < n; ++r) out.p[r] = marginal_value(config_from_rank(I, k_, r));
    return out;
}

DistributionTable TransferChain::finite_conditional(const Volume& lambda,
                                                    const Configuration& cond) const {
    if (cond.empty()) throw std::domain_error("conditioning support must be non-empty");
    if (!volumes_disjoint(lambda, cond.support()))
        throw std::domain_error("conditioning support overlaps lambda");
    const double den = marginal_value(cond);
    if (!(den > 0.0)) throw positivity_error("conditioning configuration has zero mass");
    DistributionTable out;
    out.domain = lambda;
    out.alphabet_size = k_;
    const std::uint64_t n = config_count(lambda.size(), k_, 62);
    out.p.resize(n);
    double z = 0.0;
    for (std::uint64_t r = 0; r < n; ++r) {
        out.p[r] = marginal_value(concatenate(config_from_rank(lambda, k_, r), cond)) / den;
        z += out.p[r];
    }
    // the chain product is consistent, so z = 1 up to rounding; keep it exact
    for (double& v : out.p) v /= z;
    return out;
}

DistributionTable transfer_marginals(const TransferChain& chain, const Volume& lambda) {
    return chain.marginal(lambda);
}

double fc_exchange_max_defect(const OnePointKernel& q, const Site& t, const Site& s,
                              int budget_bits) {
    const Volume rest = volume_difference(q.window(), Volume({t, s}));
    if (rest.empty()) return 0.0;
    const int k = q.alphabet_size();
    const std::size_t m = rest.size();
    const double bits = static_cast<double>(m) * std::log2(static_cast<double>(k + 1));
    if (bits > budget_bits) throw budget_error("conditioning-support scan exceeds budget");
    const std::int64_t masks = 1ll << m;
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (std::int64_t mask = 1; mask < masks; ++mask) {
        std::vector<Site> sites;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1ll << i)) sites.push_back(rest.site(i));
        const Volume S(std::move(sites));
        const std::uint64_t n = config_count(S.size(), k, 62);
        for (std::uint64_t r = 0; r < n; ++r)
            worst = std::max(worst, fc_exchange_defect(q, t, s, config_from_rank(S, k, r)));
    }
    return worst;
}

} // namespace gibbslab
