#include <Eigen/SVD>

#include <cmath>

#include "photopuf/common/errors.hpp"
#include "photopuf/common/random.hpp"
#include "photopuf/hashing/hashing.hpp"

namespace photopuf::hashing {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SingularPair leading_pair(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SingularPair out;
  out.sigma = svd.singularValues()(0);
  out.u.assign(svd.matrixU().col(0).data(), svd.matrixU().col(0).data() + a.rows());
  out.v.assign(svd.matrixV().col(0).data(), svd.matrixV().col(0).data() + a.cols());
  if (!std::isfinite(out.sigma)) throw NumericError("SVD produced a non-finite singular value");
  for (double x : out.u)
    if (!std::isfinite(x)) throw NumericError("SVD produced a non-finite singular vector");
  for (double x : out.v)
    if (!std::isfinite(x)) throw NumericError("SVD produced a non-finite singular vector");
  normalize_sign(out.u);
  normalize_sign(out.v);
  return out;
}

std::vector<BlockOrigin> draw_origins(Rng& rng, std::uint32_t host_rows, std::uint32_t host_cols,
                                      std::uint32_t k, std::uint32_t count) {
  std::vector<BlockOrigin> o(count);
  for (auto& b : o) {
    b.row = static_cast<std::uint32_t>(rng.below(host_rows - k + 1));
    b.col = static_cast<std::uint32_t>(rng.below(host_cols - k + 1));
  }
  return o;
}

void check_shape(sim::Dims dims, std::uint32_t k1, std::uint32_t k2, std::size_t p,
                 std::size_t r) {
  if (k1 == 0 || k2 == 0) throw InvalidArgument("SVD hash: block sizes must be positive");
  if (p == 0 || r == 0) throw InvalidArgument("SVD hash: p and r must be at least 1");
  if (k1 > dims.rows || k1 > dims.cols)
    throw InvalidArgument("SVD hash: k1 does not fit in the image");
  if (k2 > k1 || k2 > 2 * p)
    throw InvalidArgument("SVD hash: k2 does not fit in the intermediate image");
}

}  // namespace

void normalize_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  if (!v.empty() && v[best] < 0)
    for (auto& x : v) x = -x;
}

SingularPair first_singular_pair(std::span<const double> block, std::size_t rows,
                                 std::size_t cols) {
  if (rows == 0 || cols == 0 || block.size() != rows * cols)
    throw InvalidArgument("first_singular_pair: bad block shape");
  Eigen::Map<const RowMatrix> m(block.data(), static_cast<Eigen::Index>(rows),
                                static_cast<Eigen::Index>(cols));
  return leading_pair(m);
}

std::vector<std::uint8_t> quantize_against_right_neighbor(std::span<const double> h) {
  std::vector<std::uint8_t> bits(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) bits[i] = h[i] < h[(i + 1) % h.size()] ? 0 : 1;
  return bits;
}

void SvdHelper::validate() const {
  check_shape(dims, k1, k2, stage1.size(), stage2.size());
  for (const auto& b : stage1)
    if (b.row + k1 > dims.rows || b.col + k1 > dims.cols)
      throw InvalidArgument("SVD hash: stage-1 block out of bounds");
  const std::size_t gamma_cols = 2 * stage1.size();
  for (const auto& b : stage2)
    if (b.row + k2 > k1 || b.col + k2 > gamma_cols)
      throw InvalidArgument("SVD hash: stage-2 block out of bounds");
  if (indices.empty() || indices.size() > raw_length())
    throw InvalidArgument("SVD hash: M must be in [1, 2*r*k2]");
  for (auto i : indices)
    if (i >= raw_length()) throw InvalidArgument("SVD hash: index out of range");
}

SvdHelper make_svd_helper(sim::Dims dims, std::size_t output_bits, SvdShape shape,
                          std::uint64_t seed) {
  check_shape(dims, shape.k1, shape.k2, shape.p, shape.r);
  const std::size_t raw = 2ULL * shape.r * shape.k2;
  if (output_bits == 0 || output_bits > raw)
    throw InvalidArgument("SVD hash: M=" + std::to_string(output_bits) + " exceeds 2*r*k2=" +
                          std::to_string(raw));
  SvdHelper h;
  h.dims = dims;
  h.k1 = shape.k1;
  h.k2 = shape.k2;
  Rng rng(derive_seed({seed, 0x5D}));
  h.stage1 = draw_origins(rng, dims.rows, dims.cols, shape.k1, shape.p);
  h.stage2 = draw_origins(rng, shape.k1, 2 * shape.p, shape.k2, shape.r);
  h.indices = sample_without_replacement(rng, static_cast<std::uint32_t>(raw),
                                         static_cast<std::uint32_t>(output_bits));
  return h;
}

std::vector<double> svd_raw_hash(std::span<const double> y, const SvdHelper& helper) {
  helper.validate();
  if (y.size() != helper.dims.count())
    throw InvalidArgument("SVD hash: response size does not match helper");
  Eigen::Map<const RowMatrix> img(y.data(), helper.dims.rows, helper.dims.cols);

  const Eigen::Index k1 = helper.k1;
  const Eigen::Index p = static_cast<Eigen::Index>(helper.stage1.size());
  Eigen::MatrixXd gamma(k1, 2 * p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& o = helper.stage1[static_cast<std::size_t>(j)];
    const auto sp = leading_pair(img.block(o.row, o.col, k1, k1));
    gamma.col(j) = Eigen::Map<const Eigen::VectorXd>(sp.u.data(), k1);
    gamma.col(p + j) = Eigen::Map<const Eigen::VectorXd>(sp.v.data(), k1);
  }

  const Eigen::Index k2 = helper.k2;
  const std::size_t r = helper.stage2.size();
  std::vector<double> h(helper.raw_length());
  for (std::size_t j = 0; j < r; ++j) {
    const auto& o = helper.stage2[j];
    const auto sp = leading_pair(gamma.block(o.row, o.col, k2, k2));
    std::copy(sp.u.begin(), sp.u.end(), h.begin() + static_cast<std::ptrdiff_t>(j * k2));
    std::copy(sp.v.begin(), sp.v.end(), h.begin() + static_cast<std::ptrdiff_t>((r + j) * k2));
  }
  return h;
}

BitKey svd_hash(const sim::SpeckleImage& image, const SvdHelper& helper) {
  if (image.dims() != helper.dims) throw InvalidArgument("SVD hash: image dims do not match helper");
  const auto h = svd_raw_hash(standardize(image), helper);
  const auto q = quantize_against_right_neighbor(h);
  BitKey key(helper.indices.size());
  for (std::size_t i = 0; i < helper.indices.size(); ++i) key.set(i, q[helper.indices[i]] != 0);
  return key;
}

std::pair<BitKey, SvdHelper> svd_enroll(const sim::SpeckleImage& image, std::size_t output_bits,
                                        SvdShape shape, std::uint64_t seed) {
  auto helper = make_svd_helper(image.dims(), output_bits, shape, seed);
  auto key = svd_hash(image, helper);
  return {std::move(key), std::move(helper)};
}

}  // namespace photopuf::hashing
