#include <bit>
#include <cstdint>
#include <unordered_map>

#include "berrydet/transport.hpp"

namespace berrydet {

namespace {

using Subset = std::uint64_t;

// Ordered k-subsets of {0..n-1} as bitmasks, lexicographic in the sorted
// index tuples.
std::vector<Subset> k_subsets(std::size_t n, std::size_t k) {
  std::vector<Subset> out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    Subset mask = 0;
    for (auto i : idx) mask |= Subset{1} << i;
    out.push_back(mask);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

int popcount_between(Subset mask, std::size_t a, std::size_t b) {
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);
  if (hi - lo <= 1) return 0;
  const Subset window = ((Subset{1} << hi) - 1) & ~((Subset{1} << (lo + 1)) - 1);
  return std::popcount(mask & window);
}

}  // namespace

ComplexMatrix exterior_power_matrix(const ComplexMatrix& h, std::size_t k) {
  const auto n = static_cast<std::size_t>(h.rows());
  if (h.rows() != h.cols()) throw Error(Errc::BadSpec, "exterior power needs a square matrix");
  if (k > n || n > 63) throw Error(Errc::BadSpec, "exterior power needs k <= N <= 63");
  if (k == 0) return ComplexMatrix::Zero(1, 1);

  const std::vector<Subset> basis = k_subsets(n, k);
  std::unordered_map<Subset, Eigen::Index> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<Eigen::Index>(i));

  const auto dim = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix lifted = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const Subset source = basis[col];
    for (std::size_t r = 0; r < n; ++r) {
      if (!(source & (Subset{1} << r))) continue;
      const Subset rest = source & ~(Subset{1} << r);
      // H e_r = Σ_p H(p, r) e_p replaces the factor e_r in the wedge.
      for (std::size_t p = 0; p < n; ++p) {
        const Complex coeff = h(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r));
        if (coeff == Complex(0.0)) continue;
        if (p != r && (rest & (Subset{1} << p))) continue;
        const Subset target = rest | (Subset{1} << p);
        const double sign = (popcount_between(rest, p, r) % 2 == 0) ? 1.0 : -1.0;
        lifted(index.at(target), col) += sign * coeff;
      }
    }
  }
  return lifted;
}

PeriodicHamiltonian exterior_power(const PeriodicHamiltonian& fam, std::size_t k) {
  // The Leibniz lift is linear and commutes with †, so it acts coefficientwise.
  ComplexMatrix c0 = exterior_power_matrix(fam.constant_term(), k);
  std::vector<ComplexMatrix> harmonics;
  for (const auto& c : fam.harmonics()) harmonics.push_back(exterior_power_matrix(c, k));
  FourierSeries spec{c0, harmonics};
  return PeriodicHamiltonian(std::move(spec), std::move(c0), std::move(harmonics));
}

BerryPhase berry_phase_exterior(const PeriodicHamiltonian& fam, const LevelCurve& level,
                                const KatoOptions& opts) {
  const std::size_t k = projector_below(fam(0.0), level(0.0), 0.0).n_minus;
  if (k == 0) return {0.0, BerryMethod::Exterior};
  const ProjectorField field = ProjectorField::lowest(exterior_power(fam, k), 1);
  const GaugePath path = kato_evolve(field, opts);
  BerryPhase phase = berry_phase_holonomy(path, field.split(0.0));
  phase.method = BerryMethod::Exterior;
  return phase;
}

}  // namespace berrydet
