#include "dpmimo/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpmimo/errors.hpp"

namespace dpmimo {
namespace {

// Leakage-weighted i.i.d. draw: co-polar ports CN(0, 1 - q), cross-polar
// CN(0, q). `v_receive` selects which ports count as co-polar.
ComplexVector weighted_innovation(Eigen::Index ports, double q, bool v_receive,
                                  RandomStream& rng) {
  const double co = std::sqrt(1.0 - q);
  const double cross = std::sqrt(q);
  ComplexVector s(ports);
  for (Eigen::Index i = 0; i < ports; ++i) {
    const bool v_port = (i % 2) == 0;
    s(i) = (v_port == v_receive ? co : cross) * rng.complex_normal();
  }
  return s;
}

using StridedVector = Eigen::Map<ComplexVector, 0, Eigen::InnerStride<2>>;
using ConstStridedVector = Eigen::Map<const ComplexVector, 0, Eigen::InnerStride<2>>;

// (B (x) I_2) s, applied per polarization slot instead of forming B (x) I_2.
ComplexVector apply_kron_identity(const ComplexMatrix& b, const ComplexVector& s) {
  const Eigen::Index half = b.rows();
  ComplexVector out(2 * half);
  for (Eigen::Index slot = 0; slot < 2; ++slot) {
    StridedVector(out.data() + slot, half).noalias() =
        b * ConstStridedVector(s.data() + slot, b.cols());
  }
  return out;
}

}  // namespace

DualPolChannel sample_dual_channel_with_factor(const ComplexMatrix& bs_factor, double q,
                                               RandomStream& rng) {
  const Eigen::Index m = 2 * bs_factor.cols();
  DualPolChannel ch;
  ch.h_v = apply_kron_identity(bs_factor, weighted_innovation(m, q, true, rng));
  ch.h_h = apply_kron_identity(bs_factor, weighted_innovation(m, q, false, rng));
  return ch;
}

DualPolChannel sample_dual_channel(const CorrelationSet& corr, RandomStream& rng) {
  return sample_dual_channel_with_factor(corr.sqrt_R_bs.factor, corr.q, rng);
}

UniPolChannel sample_uni_channel(const HermitianFactor& factor, RandomStream& rng) {
  return {factor.factor * sample_standard_complex_gaussian(factor.factor.cols(), rng)};
}

double empirical_xpd(std::span<const DualPolChannel> samples) {
  if (samples.size() < kMinXpdSamples) {
    throw Error(ErrorCode::kInsufficientSamples,
                std::to_string(samples.size()) + " samples, need " +
                    std::to_string(kMinXpdSamples));
  }
  double co = 0.0;
  double cross = 0.0;
  for (const auto& ch : samples) {
    for (Eigen::Index i = 0; i < ch.h_v.size(); ++i) {
      const bool v_port = (i % 2) == 0;
      const double pv = std::norm(ch.h_v(i));
      const double ph = std::norm(ch.h_h(i));
      co += v_port ? pv : ph;
      cross += v_port ? ph : pv;
    }
  }
  if (cross == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(co / cross);
}

}  // namespace dpmimo
