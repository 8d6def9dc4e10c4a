#pragma once

#include <span>

#include "storseismic/seisgen/gather.hpp"

namespace storseismic {

struct NmoOptions {
  //! Samples whose stretch t(x) / t0 - 1 exceeds this are zeroed.
  double stretch_mute = 0.5;
  //! Only traces with |offset| <= offset_fraction * max|offset| are corrected.
  double offset_fraction = 1.0;
  //! Traces past the offset limit are zeroed when true, copied when false.
  bool exclude_far = false;
};

//! Normal moveout correction with a V_rms profile sampled on the gather's
//! time grid: out(t0, x) = in(sqrt(t0^2 + x^2 / v(t0)^2), x), linearly
//! interpolated; samples past the record end read as zero. An infinite
//! velocity leaves the gather unchanged.
ShotGather nmo_correct(const ShotGather& d, std::span<const double> vrms,
                       const NmoOptions& options = {});

//! Inverse moveout: spreads each corrected sample back onto its hyperbola by
//! inverting the monotone map t0 -> t(t0, x). Muted t0 samples stay zero.
ShotGather inverse_nmo(const ShotGather& d, std::span<const double> vrms,
                       const NmoOptions& options = {});

}  // namespace storseismic
