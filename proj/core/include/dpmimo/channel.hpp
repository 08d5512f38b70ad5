#pragma once

#include <span>

#include "dpmimo/correlation.hpp"

namespace dpmimo {

/// One realization of H_k = [h_v, h_h]^H. h_v is the channel from all BS
/// ports to the UE's V element, h_h to its H element.
struct DualPolChannel {
  ComplexVector h_v;
  ComplexVector h_h;
};

struct UniPolChannel {
  ComplexVector h;
};

/// h_v = R^{1/2} s_v and h_h = R^{1/2} s_h, where s_v has CN(0, 1 - q)
/// entries on V ports and CN(0, q) on H ports, and s_h the swapped pattern.
DualPolChannel sample_dual_channel(const CorrelationSet& corr, RandomStream& rng);

/// Same construction with an arbitrary factor B of R_bs (B B^H = R_bs);
/// R^{1/2} is then B (x) I_2.
DualPolChannel sample_dual_channel_with_factor(const ComplexMatrix& bs_factor, double q,
                                               RandomStream& rng);

/// h = factor z with z ~ CN(0, I).
UniPolChannel sample_uni_channel(const HermitianFactor& factor, RandomStream& rng);

/// 10 log10(mean co-polar power / mean cross-polar power) over the samples.
/// Co-polar entries are the V ports of h_v and the H ports of h_h.
/// Throws Error(kInsufficientSamples) below 1000 samples.
double empirical_xpd(std::span<const DualPolChannel> samples);

inline constexpr std::size_t kMinXpdSamples = 1000;

}  // namespace dpmimo
