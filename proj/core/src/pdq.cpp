#include "sbb/pdq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sbb/errors.hpp"

namespace sbb {

namespace {

constexpr int kGrid = 64;
constexpr int kKeep = 16;

// Sliding box average along each row; shrinking windows at the borders so a
// constant image stays constant.
void box_rows(std::vector<double>& a, int rows, int cols, int window) {
  if (window <= 1) return;
  const int left = (window - 1) / 2;
  const int right = window / 2;
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (int i = 0; i < rows; ++i) {
    double* p = a.data() + static_cast<std::size_t>(i) * cols;
    double sum = 0;
    int lo = 0, hi = -1;  // current window [lo, hi]
    for (int j = 0; j < cols; ++j) {
      const int want_hi = std::min(cols - 1, j + right);
      const int want_lo = std::max(0, j - left);
      while (hi < want_hi) sum += p[++hi];
      while (lo < want_lo) sum -= p[lo++];
      row[static_cast<std::size_t>(j)] = sum / (hi - lo + 1);
    }
    std::copy(row.begin(), row.end(), p);
  }
}

void box_cols(std::vector<double>& a, int rows, int cols, int window) {
  if (window <= 1) return;
  const int left = (window - 1) / 2;
  const int right = window / 2;
  std::vector<double> col(static_cast<std::size_t>(rows));
  for (int j = 0; j < cols; ++j) {
    double sum = 0;
    int lo = 0, hi = -1;
    for (int i = 0; i < rows; ++i) {
      const int want_hi = std::min(rows - 1, i + right);
      const int want_lo = std::max(0, i - left);
      while (hi < want_hi) sum += a[static_cast<std::size_t>(++hi) * cols + j];
      while (lo < want_lo) sum -= a[static_cast<std::size_t>(lo++) * cols + j];
      col[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    for (int i = 0; i < rows; ++i) a[static_cast<std::size_t>(i) * cols + j] = col[static_cast<std::size_t>(i)];
  }
}

// Midpoint decimation to kGrid x kGrid.
void decimate(const std::vector<double>& in, int rows, int cols, double out[kGrid][kGrid]) {
  for (int i = 0; i < kGrid; ++i) {
    const int si = static_cast<int>(((2 * i + 1) * static_cast<std::int64_t>(rows)) / (2 * kGrid));
    for (int j = 0; j < kGrid; ++j) {
      const int sj = static_cast<int>(((2 * j + 1) * static_cast<std::int64_t>(cols)) / (2 * kGrid));
      out[i][j] = in[static_cast<std::size_t>(si) * cols + sj];
    }
  }
}

// Rows 1..16 of the orthonormal 64-point DCT-II matrix.
const std::array<std::array<double, kGrid>, kKeep>& dct_matrix() {
  static const auto m = [] {
    std::array<std::array<double, kGrid>, kKeep> d{};
    const double scale = std::sqrt(2.0 / kGrid);
    for (int i = 0; i < kKeep; ++i)
      for (int j = 0; j < kGrid; ++j)
        d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            scale * std::cos((M_PI / (2.0 * kGrid)) * (i + 1) * (2 * j + 1));
    return d;
  }();
  return m;
}

// B = D A D^T restricted to the kept 16x16 block.
void dct_keep(const double a[kGrid][kGrid], double b[kKeep][kKeep]) {
  const auto& d = dct_matrix();
  double t[kKeep][kGrid];
  for (int i = 0; i < kKeep; ++i)
    for (int j = 0; j < kGrid; ++j) {
      double s = 0;
      for (int k = 0; k < kGrid; ++k) s += d[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * a[k][j];
      t[i][j] = s;
    }
  for (int i = 0; i < kKeep; ++i)
    for (int j = 0; j < kKeep; ++j) {
      double s = 0;
      for (int k = 0; k < kGrid; ++k) s += t[i][k] * d[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      b[i][j] = s;
    }
}

// Midpoint-of-central-order-statistics median: with no ties, exactly half
// of the values end up strictly above it.
double midpoint_median(std::vector<double> v) {
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h), v.end());
  const double upper = v[h];
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(h - 1),
                   v.begin() + static_cast<std::ptrdiff_t>(h));
  return (v[h - 1] + upper) / 2.0;
}

void dct16_from_image(const LuminanceImage& img, double out[kKeep][kKeep]) {
  if (!img.valid()) throw Error("pdq: pixel buffer size does not match dimensions");
  if (img.width < kGrid || img.height < kGrid)
    throw ImageTooSmall("pdq: image must be at least 64x64");

  const int rows = static_cast<int>(img.height);
  const int cols = static_cast<int>(img.width);
  std::vector<double> buf(img.pixels.begin(), img.pixels.end());

  const int wr = (cols + kGrid - 1) / kGrid;
  const int wc = (rows + kGrid - 1) / kGrid;
  for (int pass = 0; pass < 2; ++pass) {
    box_rows(buf, rows, cols, wr);
    box_cols(buf, rows, cols, wc);
  }

  double down[kGrid][kGrid];
  decimate(buf, rows, cols, down);
  dct_keep(down, out);
}

// Coefficients whose analytic value is zero come out of the transform as
// float noise around 1e-13; snap them so the tie rule sees real ties.
// Genuine coefficients of 8-bit inputs sit far above this band.
constexpr double kZeroBand = 1e-6;

BitVec threshold_block(const double* block, int n_side, std::uint32_t nbits) {
  std::vector<double> vals(block, block + n_side * n_side);
  for (auto& v : vals)
    if (std::abs(v) < kZeroBand) v = 0.0;
  const double med = midpoint_median(vals);
  BitVec h(nbits);
  for (int i = 0; i < n_side * n_side; ++i) {
    const double v = std::abs(block[i]) < kZeroBand ? 0.0 : block[i];
    if (v > med) h.set(static_cast<std::uint32_t>(i), true);
  }
  return h;
}

}  // namespace

BitVec compute_hash(const LuminanceImage& img) {
  double b[kKeep][kKeep];
  dct16_from_image(img, b);
  return threshold_block(&b[0][0], kKeep, 256);
}

BitVec compute_coarse_pdq(const LuminanceImage& img) {
  double b[kKeep][kKeep];
  dct16_from_image(img, b);
  double c[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i][j] = b[i][j];
  return threshold_block(&c[0][0], 4, 16);
}

}  // namespace sbb
