#pragma once

#include "sbb/bitvec.hpp"
#include "sbb/image.hpp"

namespace sbb {

/// 256-bit DCT-based similarity hash.
///
/// Pipeline: two box-filter passes (window ceil(dim/64) per axis, a tent
/// filter overall), decimation to 64x64, orthonormal 2D DCT-II keeping the
/// 16x16 lowest AC frequencies (slots 1..16 on each axis), then one bit per
/// slot: 1 iff the coefficient strictly exceeds the median of all 256
/// retained coefficients. Coefficients within 1e-6 of zero count as exact
/// zeros, so analytically empty spectra tie cleanly and flat images hash to
/// all zeroes.
///
/// This follows the published DCT-hash construction but does not chase
/// bit-exact parity with any particular implementation.
///
/// Throws ImageTooSmall unless width >= 64 and height >= 64.
BitVec compute_hash(const LuminanceImage& img);

/// 16-bit coarse variant: same pipeline truncated to the 4x4 lowest
/// retained frequencies, median-thresholded over those 16 coefficients.
BitVec compute_coarse_pdq(const LuminanceImage& img);

}  // namespace sbb
