#pragma once

#include <span>
#include <vector>

#include "dpmimo/estimation.hpp"

namespace dpmimo {

enum class PrecoderScheme { kMR, kZF };

const char* to_string(PrecoderScheme scheme);

struct StreamPowers {
  double rho_v = 0.0;  // mW
  double rho_h = 0.0;  // mW
};

/// Per-UE precoders: M x 2 (columns V stream, H stream) for dual-polarized
/// setups, M/2 x 1 for the uni-polarized baseline.
struct PrecoderSet {
  PrecoderScheme scheme = PrecoderScheme::kMR;
  std::vector<ComplexMatrix> W;
};

inline constexpr double kMinEstimateTrace = 1e-30;
inline constexpr double kMaxGramCondition = 1e12;

/// [sqrt(rho_v) hhat_v / sqrt(tr Gamma_v), sqrt(rho_h) hhat_h / sqrt(tr Gamma_h)].
/// Throws Error(kDegenerateEstimateStatistics) when a stream with positive
/// power has tr(Gamma) <= 1e-30.
ComplexMatrix mr_precoder_dual(const ChannelEstimate& est, StreamPowers powers);

/// Unnormalized ZF directions H^H (H H^H)^{-1} for stacked estimates H
/// (rows: hhat_{k,v}^H, hhat_{k,h}^H). Satisfies H W = I.
/// Throws Error(kTooManyUes) when rows > columns, Error(kRankDeficient) when
/// the Gram condition number exceeds 1e12.
ComplexMatrix zf_directions(const ComplexMatrix& stacked_estimates);

/// Stacks the dual-polarized estimates into the 2K x M matrix used by ZF.
ComplexMatrix stack_estimates(std::span<const ChannelEstimate> estimates);

/// Each UE's two ZF columns normalized to unit norm and scaled by sqrt(rho).
PrecoderSet zf_precoder_dual(std::span<const ChannelEstimate> estimates,
                             std::span<const StreamPowers> powers);

/// sqrt(rho) hhat / sqrt(tr Gamma).
ComplexVector mr_precoder_uni(const ComplexVector& hhat, double trace_gamma, double rho);

/// Columns are the UE estimates.
PrecoderSet zf_precoder_uni(std::span<const ComplexVector> estimates, double rho);

}  // namespace dpmimo
