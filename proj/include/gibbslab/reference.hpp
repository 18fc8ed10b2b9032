// Plain serial reference implementations kept for testing and benchmarking
// the OpenMP scan kernels: straightforward loops, no memoization, no
// parallelism, and independent routes where a closed form exists.
#pragma once

#include <utility>
#include <vector>

#include "gibbslab/criteria.hpp"
#include "gibbslab/fields.hpp"
#include "gibbslab/lattice.hpp"
#include "gibbslab/potential.hpp"
#include "gibbslab/specification.hpp"

namespace gibbslab::ref {

// Energy by brute force over every (interior subset, exterior subset) pair
// up to the potential's body size, with the same truncation rule as the
// production path.
double energy_brute(const Potential& phi, const Volume& lambda, const Configuration& x,
                    const Configuration& boundary, int truncation_radius);

DistributionTable gibbs_element(const Potential& phi, const Volume& window, int k,
                                const Volume& lambda, const Configuration& boundary,
                                int trunc_radius);

double spec_consistency_defect(const SpecKernel& Q, const Volume& lambda, const Volume& I);

double onepoint_cycle_max_defect(const OnePointKernel& q, const Site& t, const Site& s);

std::vector<double> quasilocality_modulus(const OnePointKernel& q, const Site& t, Symbol x,
                                          const std::vector<int>& radii);

OscillationDefects oscillation_defects(const OnePointKernel& q, const Site& t, Symbol x,
                                       const Volume& lambda);

std::pair<double, double> sullivan_envelope(const OnePointKernel& q, const Site& t, Symbol x,
                                            const Volume& lambda, const Configuration& z);

double uniform_nonnullness(const OnePointKernel& q, const std::vector<Site>& sites);

// Closed-form one-point conditional of a mixture of translation-invariant
// product measures given only the symbol counts of the conditioning; the
// independent posterior-form oracle for mixture scans.
double product_mixture_onepoint(const std::vector<double>& weights,
                                const std::vector<std::vector<double>>& site_probs,
                                const std::vector<int>& symbol_counts, Symbol x);

} // namespace gibbslab::ref
